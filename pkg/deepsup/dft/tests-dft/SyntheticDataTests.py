##
#
# File:    SyntheticDataTests.py
# Date:    16-Oct-2026
#
# Updated:
#   17-Oct-2026  dataset file parsing errors
#
##
"""
Test cases for synthetic languages, task generators and dataset files.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.02"

import logging
import os
import platform
import unittest

import numpy as np

from deepsup.dft.model.ModelConfig import EOS_ID
from deepsup.dft.syndata.DatasetFile import Dataset, read_dataset, write_dataset
from deepsup.dft.syndata.LanguageMap import (
    N_RESERVED,
    PLUS_ID,
    RESERVED_IDS,
    SEP_ID,
    TASK_MARKERS,
    identity_language,
    make_language,
    pivot_alphabet,
    target_alphabet,
)
from deepsup.dft.syndata.SyntheticTaskGenerator import SyntheticTaskGenerator, generate, generate_splits, solve_pivot, split_of
from deepsup.dft.syndata.TaskSpec import TaskSpec
from deepsup.dft.utils.ArtifactFile import sha256_file
from deepsup.dft.utils.DftExceptions import ConfigError, ContractError, DatasetParseError, EmptySplitError, VocabMismatchError

HERE = os.path.abspath(os.path.dirname(__file__))
TESTOUTPUT = os.path.join(HERE, "test-output", platform.python_version())
if not os.path.exists(TESTOUTPUT):  # pragma: no cover
    os.makedirs(TESTOUTPUT)

logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)s]-%(module)s.%(funcName)s: %(message)s")
logger = logging.getLogger()

VOCAB = 64


class LanguageMapTests(unittest.TestCase):
    def testAlphabets(self):
        self.assertEqual(pivot_alphabet(VOCAB)[0], N_RESERVED)
        self.assertEqual(len(pivot_alphabet(VOCAB)), len(target_alphabet(VOCAB)))
        self.assertFalse(set(pivot_alphabet(VOCAB)) & set(target_alphabet(VOCAB)))

    def testBijectionWithFixedReservedIds(self):
        lang = make_language(3, VOCAB)
        perm = lang.permutation
        self.assertEqual(sorted(perm.tolist()), list(range(VOCAB)))
        for t in RESERVED_IDS:
            self.assertEqual(lang.map_token(t), t)
        seq = pivot_alphabet(VOCAB)[:5] + [SEP_ID, EOS_ID]
        mapped = lang(seq)
        self.assertTrue(all(t in target_alphabet(VOCAB) for t in mapped[:5]))
        self.assertEqual(lang(mapped), seq)
        self.assertEqual(lang.inverse()(mapped), seq)

    def testSeededLanguages(self):
        self.assertEqual(make_language(3, VOCAB), make_language(3, VOCAB))
        self.assertEqual(make_language(3, VOCAB).fingerprint(), make_language(3, VOCAB).fingerprint())
        self.assertNotEqual(make_language(3, VOCAB).fingerprint(), make_language(4, VOCAB).fingerprint())
        self.assertTrue(identity_language(VOCAB).is_identity())
        self.assertFalse(make_language(3, VOCAB).is_identity())

    def testErrors(self):
        with self.assertRaises(ConfigError):
            make_language(0, N_RESERVED + 3)
        with self.assertRaises(IndexError):
            make_language(0, VOCAB).map_token(VOCAB)


class SyntheticTaskGeneratorTests(unittest.TestCase):
    def setUp(self):
        self.__lang = make_language(1, VOCAB)

    def testTaskSpecValidation(self):
        self.assertEqual(TaskSpec(kind="key-value-recall", vocab_size=VOCAB).kind, "kv")
        self.assertEqual(TaskSpec(kind="modular-add", vocab_size=VOCAB).marker, TASK_MARKERS["add"])
        with self.assertRaises(ConfigError):
            TaskSpec(kind="sort", vocab_size=VOCAB)
        with self.assertRaises(ConfigError):
            TaskSpec(kind="copy", vocab_size=VOCAB, query_len=(3, 2))
        with self.assertRaises(ConfigError):
            TaskSpec(kind="copy", vocab_size=VOCAB, query_len=(2, 20), max_seq_len=32)
        with self.assertRaises(ConfigError):
            TaskSpec(kind="add", vocab_size=VOCAB, modulus=1)
        spec = TaskSpec(kind="reverse", vocab_size=VOCAB, seed=4)
        self.assertEqual(TaskSpec.from_dict(spec.to_dict()), spec)

    def testAnswersSolveQueries(self):
        for kind in ("copy", "reverse", "kv", "add"):
            task = TaskSpec(kind=kind, vocab_size=VOCAB, seed=2)
            ds = generate(task, self.__lang, 40)
            for ex in ds:
                self.assertEqual(list(ex.y_en), solve_pivot(ex.x_en, VOCAB, task.modulus), kind)
                self.assertEqual(list(ex.x_tgt), self.__lang(ex.x_en))
                self.assertEqual(list(ex.y_tgt), self.__lang(ex.y_en))
                self.assertEqual(ex.x_en[0], TASK_MARKERS[kind])
                self.assertEqual(ex.x_en[-1], SEP_ID)
                self.assertEqual(ex.y_en[-1], EOS_ID)
                self.assertLessEqual(len(ex), task.max_seq_len)

    def testMaxLengthsMatchGeneratedExamples(self):
        for kind in ("copy", "reverse", "kv", "add"):
            task = TaskSpec(kind=kind, vocab_size=VOCAB, query_len=(3, 3), answer_len=(2, 2), seed=1)
            qMax, aMax = task.max_lengths()
            ds = generate(task, self.__lang, 20)
            self.assertEqual(max(len(ex.x_en) for ex in ds), qMax, kind)
            self.assertEqual(max(len(ex.y_en) for ex in ds), aMax, kind)
            TaskSpec(kind=kind, vocab_size=VOCAB, query_len=(3, 3), answer_len=(2, 2), max_seq_len=qMax + aMax)
            with self.assertRaises(ConfigError):
                TaskSpec(kind=kind, vocab_size=VOCAB, query_len=(3, 3), answer_len=(2, 2), max_seq_len=qMax + aMax - 1)
        # [kv] k v k v k v [ask] q [sep] plus the answer and eos
        with self.assertRaises(ConfigError):
            TaskSpec(kind="kv", vocab_size=VOCAB, query_len=(3, 3), answer_len=(1, 1), max_seq_len=11)

    def testModularAdd(self):
        a = pivot_alphabet(VOCAB)
        self.assertEqual(solve_pivot([TASK_MARKERS["add"], a[3], PLUS_ID, a[4], SEP_ID], VOCAB), [a[7], EOS_ID])
        self.assertEqual(solve_pivot([TASK_MARKERS["add"], a[7], PLUS_ID, a[5], SEP_ID], VOCAB), [a[2], EOS_ID])
        with self.assertRaises(ContractError):
            solve_pivot([TASK_MARKERS["add"], a[1]], VOCAB)

    def testStreamIsIndexAddressed(self):
        task = TaskSpec(kind="kv", vocab_size=VOCAB, seed=5)
        gen = SyntheticTaskGenerator(task, self.__lang)
        first = gen.generate(12)
        self.assertEqual(first.examples[:5], gen.generate(5).examples)
        self.assertEqual(gen.example(7), SyntheticTaskGenerator(task, self.__lang).example(7))
        other = SyntheticTaskGenerator(TaskSpec(kind="kv", vocab_size=VOCAB, seed=6), self.__lang)
        self.assertNotEqual([ex.x_en for ex in first], [ex.x_en for ex in other.generate(12)])

    def testSplitsAreExactAndDisjoint(self):
        task = TaskSpec(kind="copy", vocab_size=VOCAB, seed=0)
        ds = generate_splits(task, self.__lang, {"train": 30, "dev": 5, "test": 5})
        self.assertEqual(ds.split_sizes(), {"train": 30, "dev": 5, "test": 5})
        hashes = [ex.content_hash() for ex in ds]
        self.assertEqual(len(hashes), len(set(hashes)))
        for ex, tag in zip(ds.examples, ds.splits):
            self.assertEqual(split_of(ex), tag)
        with self.assertRaises(ConfigError):
            generate_splits(task, self.__lang, {"train": 1, "holdout": 1})

    def testTinyTaskSpaceIsReported(self):
        task = TaskSpec(kind="copy", vocab_size=N_RESERVED + 4, query_len=(1, 1), max_seq_len=8)
        with self.assertRaises(ConfigError):
            SyntheticTaskGenerator(task, make_language(0, N_RESERVED + 4)).generate_splits({"train": 20}, maxDraws=200)

    def testLanguageMustCoverVocabulary(self):
        with self.assertRaises(ConfigError):
            SyntheticTaskGenerator(TaskSpec(vocab_size=VOCAB), make_language(0, 32))


class DatasetFileTests(unittest.TestCase):
    def setUp(self):
        lang = make_language(1, VOCAB)
        self.__ds = generate_splits(TaskSpec(kind="kv", vocab_size=VOCAB, seed=3), lang, {"train": 20, "dev": 4, "test": 4})
        self.__path = os.path.join(TESTOUTPUT, "kv.jsonl")

    def testRoundTrip(self):
        write_dataset(self.__path, self.__ds)
        back = read_dataset(self.__path)
        self.assertEqual(back, self.__ds)
        self.assertEqual(back.content_hash(), self.__ds.content_hash())
        digest = sha256_file(self.__path)
        write_dataset(self.__path, back)
        self.assertEqual(sha256_file(self.__path), digest)
        self.assertEqual(len(back.split("dev")), 4)

    def testSplitAndVocabChecks(self):
        ds = Dataset(self.__ds.examples[:3], ["train"] * 3, {"vocab_size": VOCAB})
        with self.assertRaises(EmptySplitError):
            ds.split("test")
        with self.assertRaises(VocabMismatchError):
            ds.check_vocab(32)
        ds.check_vocab(VOCAB)
        with self.assertRaises(VocabMismatchError):
            Dataset(self.__ds.examples[:3]).check_vocab(ds.max_token())

    def testParseErrors(self):
        write_dataset(self.__path, self.__ds)
        with open(self.__path, "r", encoding="utf-8") as ifh:
            lines = ifh.read().splitlines()
        bad = os.path.join(TESTOUTPUT, "kv-bad.jsonl")
        with open(bad, "w", encoding="utf-8") as ofh:
            ofh.write("\n".join(lines[:3] + [lines[3][: len(lines[3]) // 2]] + lines[4:]) + "\n")
        with self.assertRaises(DatasetParseError) as ctx:
            read_dataset(bad)
        self.assertEqual(ctx.exception.lineNumber, 4)
        self.assertIn("line 4", str(ctx.exception))
        with open(bad, "w", encoding="utf-8") as ofh:
            ofh.write('{"x_tgt": [5], "x_en": [5], "y_tgt": [6]}\n')
        with self.assertRaises(DatasetParseError):
            read_dataset(bad)
        with open(bad, "w", encoding="utf-8") as ofh:
            ofh.write('{"x_tgt": [5, 6], "x_en": [5], "y_tgt": [6], "y_en": [6]}\n')
        with self.assertRaises(DatasetParseError):
            read_dataset(bad)

    def testExamplesKeepOrder(self):
        write_dataset(self.__path, self.__ds)
        back = read_dataset(self.__path)
        self.assertEqual([ex.content_hash() for ex in back], [ex.content_hash() for ex in self.__ds])
        self.assertTrue(np.array_equal(np.array(back.examples[0].x_en), np.array(self.__ds.examples[0].x_en)))


if __name__ == "__main__":  # pragma: no cover
    unittest.main()
