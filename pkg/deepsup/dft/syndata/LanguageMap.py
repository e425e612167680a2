##
# File:    LanguageMap.py
# Date:    06-Oct-2026
#
# Updates:
#   09-Oct-2026  disjoint pivot/target alphabets
##
"""
Vocabulary layout and token-bijection languages.

Ids below ``N_RESERVED`` are control tokens shared by every language.  The
remaining content ids are split into a pivot alphabet (first half) and a
target alphabet (second half).  A target language swaps the two halves
through a seeded random pairing, so its sentences never reuse a pivot
surface form and have exactly the pivot sentence's length.  With an odd
number of content ids the last one is a fixed point.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import hashlib
import logging

import numpy as np

from deepsup.dft.model.ModelConfig import EOS_ID, PAD_ID
from deepsup.dft.utils.DftExceptions import ConfigError, TokenIndexError

logger = logging.getLogger(__name__)

SEP_ID = 2
ASK_ID = 3
PLUS_ID = 4
TASK_MARKERS = {"copy": 5, "reverse": 6, "kv": 7, "add": 8}
N_RESERVED = 9
RESERVED_IDS = (PAD_ID, EOS_ID, SEP_ID, ASK_ID, PLUS_ID) + tuple(sorted(TASK_MARKERS.values()))


def alphabet_size(vocabSize):
    return (vocabSize - N_RESERVED) // 2


def pivot_alphabet(vocabSize):
    h = alphabet_size(vocabSize)
    return list(range(N_RESERVED, N_RESERVED + h))


def target_alphabet(vocabSize):
    h = alphabet_size(vocabSize)
    return list(range(N_RESERVED + h, N_RESERVED + 2 * h))


class LanguageMap(object):
    """A bijection on token ids; reserved ids are fixed points."""

    def __init__(self, name, permutation, seed=None):
        perm = np.asarray(permutation, dtype=np.int64)
        if perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ConfigError("language %s: mapping is not a bijection on 0..%d" % (name, perm.size - 1))
        for t in RESERVED_IDS:
            if t < perm.size and perm[t] != t:
                raise ConfigError("language %s: reserved token %d is not a fixed point" % (name, t))
        self.name = name
        self.seed = seed
        self.__perm = perm
        self.__perm.setflags(write=False)

    @property
    def vocab_size(self):
        return int(self.__perm.size)

    @property
    def permutation(self):
        return self.__perm

    def map_token(self, tok):
        tok = int(tok)
        if not 0 <= tok < self.__perm.size:
            raise TokenIndexError("token %d outside vocabulary of size %d" % (tok, self.__perm.size))
        return int(self.__perm[tok])

    def __call__(self, seq):
        return [self.map_token(t) for t in seq]

    def inverse(self):
        inv = np.empty_like(self.__perm)
        inv[self.__perm] = np.arange(self.__perm.size)
        return LanguageMap(self.name + "^-1", inv, seed=self.seed)

    def is_identity(self):
        return bool(np.array_equal(self.__perm, np.arange(self.__perm.size)))

    def fingerprint(self):
        return hashlib.sha256(np.ascontiguousarray(self.__perm, dtype="<i8").tobytes()).hexdigest()

    def to_dict(self):
        return {"name": self.name, "seed": self.seed, "vocab_size": self.vocab_size}

    def __eq__(self, other):
        return isinstance(other, LanguageMap) and np.array_equal(self.__perm, other.permutation)

    def __hash__(self):
        return hash(self.fingerprint())


def _checkVocab(vocabSize):
    if not isinstance(vocabSize, int) or alphabet_size(vocabSize) < 2:
        raise ConfigError("vocab_size %r is too small: need at least %d ids (%d reserved + two 2-token alphabets)" % (vocabSize, N_RESERVED + 4, N_RESERVED))


def identity_language(vocab_size):
    """The pivot language: every id maps to itself."""
    _checkVocab(vocab_size)
    return LanguageMap("pivot", np.arange(vocab_size), seed=None)


def make_language(seed, vocab_size, name=None):
    """Seeded target language pairing pivot id A[k] with target id B[perm[k]] both ways."""
    _checkVocab(vocab_size)
    rng = np.random.default_rng(seed)
    h = alphabet_size(vocab_size)
    pivot = np.arange(N_RESERVED, N_RESERVED + h)
    target = np.arange(N_RESERVED + h, N_RESERVED + 2 * h)[rng.permutation(h)]
    perm = np.arange(vocab_size, dtype=np.int64)
    perm[pivot] = target
    perm[target] = pivot
    lang = LanguageMap(name or "tgt-%s" % seed, perm, seed=seed)
    logger.debug("built language %s over %d content pairs", lang.name, h)
    return lang
