##
# File:    SyntheticTaskGenerator.py
# Date:    07-Oct-2026
#
# Updates:
#   09-Oct-2026  content-hash split assignment and quota-filling generate_splits
#   11-Oct-2026  independent scan solver used to audit generated answers
##
"""
Deterministic generator of parallel synthetic instruction data.

Each example is drawn from its own random stream seeded by
``(task seed, example index)``: the pivot pair (x_en, y_en) is sampled
and solved, then mapped through the target language to give
(x_tgt, y_tgt).  Split tags come from a bucket of the example's content
hash (8/1/1 of 10 buckets for train/dev/test), so an example lands in the
same split whenever it is regenerated.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.003"

import logging

import numpy as np

from deepsup.dft.model.ModelConfig import EOS_ID
from deepsup.dft.supervision.ParallelExample import ParallelExample
from deepsup.dft.syndata.DatasetFile import SPLITS, Dataset
from deepsup.dft.syndata.LanguageMap import ASK_ID, PLUS_ID, SEP_ID, TASK_MARKERS, pivot_alphabet
from deepsup.dft.utils.DftExceptions import ConfigError, ContractError

logger = logging.getLogger(__name__)

SPLIT_BUCKETS = {"train": range(0, 8), "dev": range(8, 9), "test": range(9, 10)}


def split_of(example):
    bucket = int(example.content_hash()[:8], 16) % 10
    for name in SPLITS:
        if bucket in SPLIT_BUCKETS[name]:
            return name
    return "train"  # pragma: no cover


class SyntheticTaskGenerator(object):
    def __init__(self, taskSpec, language):
        if language.vocab_size != taskSpec.vocab_size:
            raise ConfigError("language covers %d ids, task vocab_size is %d" % (language.vocab_size, taskSpec.vocab_size))
        self.__task = taskSpec
        self.__language = language
        self.__alphabet = pivot_alphabet(taskSpec.vocab_size)

    def __rng(self, index):
        return np.random.default_rng([int(self.__task.seed), int(index)])

    def __draw(self, rng, n, distinct=False):
        if distinct:
            idx = rng.choice(len(self.__alphabet), size=n, replace=False)
        else:
            idx = rng.integers(0, len(self.__alphabet), size=n)
        return [self.__alphabet[int(i)] for i in idx]

    def sample_pivot(self, rng):
        """One pivot-language (query, answer) pair solving the task."""
        task = self.__task
        n = int(rng.integers(task.query_len[0], task.query_len[1] + 1))
        marker = TASK_MARKERS[task.kind]
        if task.kind in ("copy", "reverse"):
            payload = self.__draw(rng, n)
            answer = payload if task.kind == "copy" else payload[::-1]
            return [marker] + payload + [SEP_ID], answer + [EOS_ID]
        if task.kind == "kv":
            keys = self.__draw(rng, n, distinct=True)
            values = self.__draw(rng, n)
            m = int(rng.integers(task.answer_len[0], task.answer_len[1] + 1))
            asked = [int(i) for i in rng.choice(n, size=m, replace=False)]
            query = [marker]
            for k, v in zip(keys, values):
                query.extend([k, v])
            query.append(ASK_ID)
            query.extend(keys[i] for i in asked)
            query.append(SEP_ID)
            return query, [values[i] for i in asked] + [EOS_ID]
        operands = [int(v) for v in rng.integers(0, task.modulus, size=n)]
        query = [marker]
        for pos, a in enumerate(operands):
            if pos:
                query.append(PLUS_ID)
            query.append(self.__alphabet[a])
        query.append(SEP_ID)
        return query, [self.__alphabet[sum(operands) % task.modulus], EOS_ID]

    def example(self, index):
        xEn, yEn = self.sample_pivot(self.__rng(index))
        return ParallelExample(self.__language(xEn), xEn, self.__language(yEn), yEn)

    def meta(self):
        return {"task": self.__task.to_dict(), "language": self.__language.to_dict(), "language_fingerprint": self.__language.fingerprint(), "vocab_size": self.__task.vocab_size}

    def generate(self, n):
        """The first ``n`` examples of the stream, split-tagged by content hash."""
        if n < 1:
            raise ConfigError("number of examples must be positive, got %r" % n)
        examples = [self.example(i) for i in range(int(n))]
        return Dataset(examples, [split_of(ex) for ex in examples], self.meta())

    def generate_splits(self, sizes, maxDraws=None):
        """Exactly ``sizes[split]`` distinct examples per split, in stream order."""
        want = {name: int(sizes.get(name, 0)) for name in SPLITS}
        unknown = sorted(set(sizes) - set(SPLITS))
        if unknown or any(v < 0 for v in want.values()) or sum(want.values()) == 0:
            raise ConfigError("split sizes must be non-negative counts for %s, got %r" % (", ".join(SPLITS), sizes))
        maxDraws = maxDraws or 50 * sum(want.values()) + 1000
        have = {name: 0 for name in SPLITS}
        seen = set()
        examples, splits = [], []
        index = 0
        while have != want:
            if index >= maxDraws:
                raise ConfigError("could not fill splits %r after %d draws (got %r); the task space is too small" % (want, maxDraws, have))
            ex = self.example(index)
            index += 1
            digest = ex.content_hash()
            if digest in seen:
                continue
            seen.add(digest)
            tag = split_of(ex)
            if have[tag] >= want[tag]:
                continue
            have[tag] += 1
            examples.append(ex)
            splits.append(tag)
        logger.info("generated %s after %d draws", have, index)
        return Dataset(examples, splits, self.meta())


def generate(task, language, n):
    return SyntheticTaskGenerator(task, language).generate(n)


def generate_splits(task, language, sizes):
    return SyntheticTaskGenerator(task, language).generate_splits(sizes)


def solve_pivot(query, vocabSize, modulus=10):
    """Answer a pivot-language query by scanning it; independent of the sampler."""
    query = [int(t) for t in query]
    if len(query) < 2 or query[-1] != SEP_ID:
        raise ContractError("query must start with a task marker and end with the separator")
    body = query[1:-1]
    kind = {v: k for k, v in TASK_MARKERS.items()}.get(query[0])
    if kind == "copy":
        return body + [EOS_ID]
    if kind == "reverse":
        return list(reversed(body)) + [EOS_ID]
    if kind == "kv":
        split = body.index(ASK_ID)
        pairs, asked = body[:split], body[split + 1 :]
        out = []
        for q in asked:
            for pos in range(0, len(pairs), 2):
                if pairs[pos] == q:
                    out.append(pairs[pos + 1])
                    break
            else:
                raise ContractError("key %d not present in query" % q)
        return out + [EOS_ID]
    if kind == "add":
        alphabet = pivot_alphabet(vocabSize)
        total = 0
        for tok in body:
            if tok != PLUS_ID:
                total += alphabet.index(tok)
        return [alphabet[total % modulus], EOS_ID]
    raise ContractError("unknown task marker %d" % query[0])
