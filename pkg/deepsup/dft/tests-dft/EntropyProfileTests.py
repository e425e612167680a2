##
#
# File:    EntropyProfileTests.py
# Date:    16-Oct-2026
#
# Updated:
#   19-Oct-2026  corpus order check
#
##
"""
Test cases for logit-lens entropy profiles and critical-layer selection.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.01"

import logging
import math
import os
import platform
import unittest

import numpy as np

from deepsup.dft.entropy.EntropyProfile import EntropyProfile, detect_drops, profile, row_entropy, suggest_critical_layers
from deepsup.dft.model.ModelConfig import ModelConfig
from deepsup.dft.model.ModelParams import init_params
from deepsup.dft.utils.ArtifactFile import ArtifactFile
from deepsup.dft.utils.DftExceptions import ContractError, InsufficientStructureError

HERE = os.path.abspath(os.path.dirname(__file__))
TESTOUTPUT = os.path.join(HERE, "test-output", platform.python_version())
if not os.path.exists(TESTOUTPUT):  # pragma: no cover
    os.makedirs(TESTOUTPUT)

logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)s]-%(module)s.%(funcName)s: %(message)s")
logger = logging.getLogger()

TWO_DROPS = [5.0, 5.0, 2.0, 2.0, 2.0, 0.5, 0.5]


class EntropyProfileTests(unittest.TestCase):
    def testRowEntropy(self):
        self.assertAlmostEqual(float(row_entropy(np.zeros(32))), math.log(32), places=12)
        peaked = np.zeros(8)
        peaked[3] = 1.0e4
        self.assertAlmostEqual(float(row_entropy(peaked)), 0.0, places=12)
        rows = row_entropy(np.array([[0.0, 0.0], [1.0e3, 0.0]]))
        np.testing.assert_allclose(rows, [math.log(2), 0.0], atol=1e-12)

    def testTwoDrops(self):
        self.assertEqual(detect_drops(TWO_DROPS), [(2, 3.0), (5, 1.5)])
        self.assertEqual(suggest_critical_layers(TWO_DROPS), (2, 4))
        prof = EntropyProfile(TWO_DROPS)
        self.assertEqual((prof.suggested_i, prof.suggested_j), (2, 4))
        self.assertEqual(prof.n_layers, 6)
        self.assertEqual(prof.drop_magnitudes()[:3], [None, 0.0, 3.0])

    def testLinearCurveHasNoDrop(self):
        linear = [4.0, 3.0, 2.0, 1.0, 0.0]
        self.assertEqual(detect_drops(linear), [])
        with self.assertRaises(InsufficientStructureError) as ctx:
            suggest_critical_layers(linear)
        self.assertEqual(ctx.exception.profile.drops, [])
        self.assertIsNone(EntropyProfile(linear).suggested_i)

    def testSingleDrop(self):
        with self.assertRaises(InsufficientStructureError):
            suggest_critical_layers([3.0, 3.0, 1.0, 1.0, 1.0])

    def testFlatAndSmallDropsAreIgnored(self):
        self.assertEqual(detect_drops([2.0, 2.0, 2.0, 2.0]), [])
        # the 0.05 wobble is below a tenth of the curve's range
        self.assertEqual(detect_drops([6.0, 6.0, 1.0, 1.05, 1.0, 1.0]), [(2, 5.0)])

    def testEndLayerDrop(self):
        self.assertEqual(detect_drops([4.0, 4.0, 4.0, 1.0]), [(3, 3.0)])
        self.assertEqual(detect_drops([1.0, 4.0, 4.0]), [])

    def testWiderWindow(self):
        e = [6.0, 6.0, 5.0, 3.0, 3.0, 3.0, 2.0, 0.0, 0.0]
        drops = detect_drops(e, window=2)
        self.assertEqual([k for k, _ in drops], [3, 7])
        self.assertEqual(suggest_critical_layers(e, window=2), (3, 5))

    def testArgumentErrors(self):
        with self.assertRaises(ContractError):
            detect_drops([1.0, 0.0])
        with self.assertRaises(ContractError):
            detect_drops([3.0, 2.0, 1.0], window=3)

    def testProfileOfModel(self):
        config = ModelConfig(n_layers=3, hidden_size=8, n_heads=2, vocab_size=16, max_seq_len=8, mlp_ratio=2)
        params = init_params(config, 2)
        corpus = [[5, 6, 7, 2], [9, 10, 2, 0, 0]]
        prof = profile(params, corpus)
        self.assertEqual(len(prof.per_layer), config.n_layers + 1)
        self.assertEqual(prof.n_positions, 7)
        self.assertEqual(prof.vocab_size, 16)
        for e in prof.per_layer:
            self.assertGreaterEqual(e, 0.0)
            self.assertLessEqual(e, math.log(16) + 1e-9)
        self.assertEqual(prof.per_layer_per_position.shape, (4, 5))
        self.assertTrue(np.isnan(prof.per_layer_per_position[0, 4]))
        self.assertEqual(profile(params, corpus).per_layer, prof.per_layer)
        with self.assertRaises(ContractError):
            profile(params, [[0, 0]])

    def testCorpusOrderDoesNotChangeProfile(self):
        config = ModelConfig(n_layers=3, hidden_size=8, n_heads=2, vocab_size=16, max_seq_len=8, mlp_ratio=2)
        params = init_params(config, 5)
        corpus = [[5 + (3 * k + p) % 10 for p in range(3 + k % 4)] for k in range(9)]
        prof = profile(params, corpus)
        for seed in range(3):
            order = np.random.default_rng(seed).permutation(len(corpus))
            other = profile(params, [corpus[i] for i in order])
            self.assertEqual(other.per_layer, prof.per_layer)
            np.testing.assert_array_equal(other.per_layer_per_position, prof.per_layer_per_position)
            self.assertEqual(other.drops, prof.drops)

    def testFreshModelIsNearlyUniform(self):
        config = ModelConfig()
        params = init_params(config, 0)
        corpus = [[9 + (7 * k + 3 * p) % 200 for p in range(12)] for k in range(4)]
        prof = profile(params, corpus)
        for e in prof.per_layer:
            self.assertGreater(e, 0.9 * math.log(config.vocab_size))

    def testWriteRecords(self):
        prof = EntropyProfile(TWO_DROPS, per_layer_per_position=np.array([[1.0, np.nan]] * 7), vocab_size=32)
        recPath = os.path.join(TESTOUTPUT, "entropy.jsonl")
        csvPath = os.path.join(TESTOUTPUT, "entropy-heatmap.csv")
        prof.write_records(recPath)
        prof.write_heatmap(csvPath)
        records = ArtifactFile(recPath).readJsonLines()
        self.assertEqual(len(records), len(TWO_DROPS) + 1)
        self.assertTrue(records[2]["is_drop"])
        self.assertEqual(records[-1]["summary"]["suggested_j"], 4)
        self.assertAlmostEqual(records[-1]["summary"]["max_entropy"], math.log(32))
        with open(csvPath, "r", encoding="utf-8") as ifh:
            lines = ifh.read().splitlines()
        self.assertEqual(lines[0], "layer,pos0,pos1")
        self.assertEqual(lines[1], "0,1.0,")
        with self.assertRaises(ContractError):
            EntropyProfile(TWO_DROPS).write_heatmap(csvPath)


if __name__ == "__main__":  # pragma: no cover
    unittest.main()
