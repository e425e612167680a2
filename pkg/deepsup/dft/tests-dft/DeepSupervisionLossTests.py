##
#
# File:    DeepSupervisionLossTests.py
# Date:    16-Oct-2026
#
# Updated:
#   19-Oct-2026  term-by-term composite gradient, repeatable backward pass and echo read-out fixture
#
##
"""
Test cases for parallel batches and the translated-tuning, language-conversion
and English-thinking objectives.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.02"

import logging
import time
import unittest

import numpy as np

from deepsup.dft.autodiff import TensorOps as ops
from deepsup.dft.autodiff.GradCheck import analytic_gradients, check_gradients
from deepsup.dft.model.ModelConfig import ModelConfig
from deepsup.dft.model.ModelParams import init_params, layer_of
from deepsup.dft.model.Transformer import forward
from deepsup.dft.supervision.DeepSupervisionLoss import (
    loss_et_feature,
    loss_et_logits,
    loss_lc_feature,
    loss_lc_logits,
    loss_tft,
    loss_total,
)
from deepsup.dft.supervision.ParallelExample import ParallelBatch, ParallelExample
from deepsup.dft.supervision.SupervisionSpec import NO_SUPERVISION, SupervisionSpec
from deepsup.dft.utils.DftExceptions import ConfigError, ContractError, SequenceLengthError

logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)s]-%(module)s.%(funcName)s: %(message)s")
logger = logging.getLogger()

SMALL = ModelConfig(n_layers=4, hidden_size=8, n_heads=2, vocab_size=16, max_seq_len=12, mlp_ratio=2)

EX_A = ParallelExample(x_tgt=[5, 12, 13, 2], x_en=[5, 9, 10, 2], y_tgt=[14, 1], y_en=[11, 1])
EX_B = ParallelExample(x_tgt=[6, 13, 2], x_en=[6, 10, 2], y_tgt=[15, 12, 1], y_en=[9, 9, 1])


def _gradsAbove(params, lossTensor, layer):
    """Names of parameters deeper than ``layer`` that received a non-zero gradient."""
    params.zero_grad()
    lossTensor.backward()
    leaked = [n for n, g in params.grads().items() if layer_of(n, params.config) > layer and np.any(g != 0.0)]
    reached = [n for n, g in params.grads().items() if layer_of(n, params.config) <= layer and np.any(g != 0.0)]
    params.zero_grad()
    return leaked, reached


class ParallelBatchTests(unittest.TestCase):
    def testExampleValidation(self):
        self.assertEqual(EX_A.query_len, 4)
        self.assertEqual(EX_A.answer_len, 2)
        self.assertEqual(len(EX_A), 6)
        self.assertEqual(EX_A.target_sequence(), [5, 12, 13, 2, 14, 1])
        self.assertEqual(EX_A.max_token(), 14)
        with self.assertRaises(ContractError):
            ParallelExample([5, 6], [5], [7], [8])
        with self.assertRaises(ContractError):
            ParallelExample([5, 6], [5, 6], [7], [8, 9])
        with self.assertRaises(ContractError):
            ParallelExample([5, 0], [5, 6], [7], [8])
        with self.assertRaises(ContractError):
            ParallelExample([5], [5], [], [])

    def testMasks(self):
        batch = ParallelBatch([EX_A, EX_B])
        self.assertEqual(batch.size, 2)
        self.assertEqual(batch.seq_len, 6)
        self.assertEqual(batch.query_mask[0].tolist(), [True, True, True, True, False, False])
        self.assertEqual(batch.answer_mask[0].tolist(), [False, False, False, False, True, True])
        self.assertEqual(batch.predict_mask[0].tolist(), [False, False, False, True, True, False])
        self.assertEqual(batch.predict_mask[1].tolist(), [False, False, True, True, True, False])
        self.assertEqual(batch.next_tgt[0].tolist(), [0, 0, 0, 14, 1, 0])
        self.assertEqual(batch.next_en[1].tolist(), [0, 0, 9, 9, 1, 0])
        self.assertEqual(batch.query_en[1].tolist(), [6, 10, 2, 0, 0, 0])
        self.assertEqual(batch.tokens_tgt[1].tolist(), [6, 13, 2, 15, 12, 1])
        self.assertEqual(int(batch.predict_mask.sum()), EX_A.answer_len + EX_B.answer_len)

    def testPaddingAndLength(self):
        short = ParallelExample([5, 2], [5, 2], [7, 1], [9, 1])
        batch = ParallelBatch([EX_A, short])
        self.assertEqual(batch.tokens_tgt[1].tolist(), [5, 2, 7, 1, 0, 0])
        self.assertEqual(batch.context_mask()[1].tolist(), [True, True, True, False, False, False])
        with self.assertRaises(SequenceLengthError):
            ParallelBatch([EX_A], maxSeqLen=5)
        with self.assertRaises(ContractError):
            ParallelBatch([])


class SupervisionSpecTests(unittest.TestCase):
    def testValidation(self):
        SupervisionSpec(lc_mode="logits", et_mode="feature", layer_i=1, layer_j=3).validate(4)
        SupervisionSpec(et_mode="logits", layer_j=4).validate(4)
        with self.assertRaises(ConfigError):
            SupervisionSpec(lc_mode="logits", layer_i=4).validate(4)
        with self.assertRaises(ConfigError):
            SupervisionSpec(lc_mode="logits", et_mode="logits", layer_i=2, layer_j=2).validate(4)
        with self.assertRaises(ConfigError):
            SupervisionSpec(lc_mode="logits", et_mode="logits", layer_i=1, layer_j=4).validate(4)
        with self.assertRaises(ConfigError):
            SupervisionSpec(lc_mode="hidden", layer_i=1).validate(4)
        with self.assertRaises(ConfigError):
            SupervisionSpec(et_mode="feature", layer_j=2, weight_et=-1.0).validate(4)
        with self.assertRaises(ConfigError):
            SupervisionSpec.from_dict({"lc_mode": "logits", "depth": 2})

    def testFlags(self):
        self.assertFalse(NO_SUPERVISION.any_active)
        spec = SupervisionSpec(et_mode="feature", layer_j=2)
        self.assertTrue(spec.et_active)
        self.assertFalse(spec.lc_active)
        self.assertEqual(SupervisionSpec.from_dict(spec.to_dict()), spec)


class DeepSupervisionLossTests(unittest.TestCase):
    def setUp(self):
        self.__startTime = time.time()
        self.__params = init_params(SMALL, 7)
        logger.debug("Starting %s at %s", self.id(), time.strftime("%Y %m %d %H:%M:%S", time.localtime()))

    def tearDown(self):
        endTime = time.time()
        logger.debug("Completed %s at %s (%.4f seconds)", self.id(), time.strftime("%Y %m %d %H:%M:%S", time.localtime()), endTime - self.__startTime)

    def testTranslatedTuningValue(self):
        logits, _ = forward(self.__params, EX_A.target_sequence())
        expected = ops.cross_entropy(logits, [0, 0, 0, 14, 1, 0], [False, False, False, True, True, False]).item()
        self.assertAlmostEqual(loss_tft(self.__params, EX_A).item(), expected, places=12)
        self.assertNotAlmostEqual(loss_tft(self.__params, EX_A, include_query=True).item(), expected, places=6)

    def testTokenMeanReduction(self):
        """cross-entropy terms weight every supervised token equally"""
        single = loss_tft(self.__params, EX_A).item()
        self.assertAlmostEqual(loss_tft(self.__params, ParallelBatch([EX_A, EX_A])).item(), single, places=10)
        other = loss_tft(self.__params, EX_B).item()
        mixed = loss_tft(self.__params, ParallelBatch([EX_A, EX_B])).item()
        weighted = (EX_A.answer_len * single + EX_B.answer_len * other) / (EX_A.answer_len + EX_B.answer_len)
        self.assertAlmostEqual(mixed, weighted, places=10)
        lcA = loss_lc_logits(self.__params, EX_A, 2).item()
        lcB = loss_lc_logits(self.__params, EX_B, 2).item()
        self.assertAlmostEqual(loss_lc_logits(self.__params, ParallelBatch([EX_A, EX_B]), 2).item(), (4 * lcA + 3 * lcB) / 7.0, places=10)

    def testExampleMeanReduction(self):
        """cosine terms weight every example equally"""
        for fn, layer in ((loss_lc_feature, 2), (loss_et_feature, 3)):
            a = fn(self.__params, EX_A, layer).item()
            b = fn(self.__params, EX_B, layer).item()
            both = fn(self.__params, ParallelBatch([EX_A, EX_B]), layer).item()
            self.assertAlmostEqual(both, 0.5 * (a + b), places=10)
            self.assertGreaterEqual(a, 0.0)
            self.assertLessEqual(a, 2.0)

    def testIdenticalLanguagesGiveZeroCosineLoss(self):
        same = ParallelExample(EX_A.x_en, EX_A.x_en, EX_A.y_en, EX_A.y_en)
        self.assertAlmostEqual(loss_lc_feature(self.__params, same, 2).item(), 0.0, places=12)
        self.assertAlmostEqual(loss_et_feature(self.__params, same, SMALL.n_layers).item(), 0.0, places=12)

    def testGradientLocality(self):
        """intermediate objectives leave deeper blocks and the output side untouched"""
        cases = (
            ("lc-logits", loss_lc_logits, 1),
            ("lc-feature", loss_lc_feature, 2),
            ("et-logits", loss_et_logits, 2),
            ("et-feature", loss_et_feature, 3),
        )
        for label, fn, layer in cases:
            leaked, reached = _gradsAbove(self.__params, fn(self.__params, EX_A, layer), layer)
            self.assertEqual(leaked, [], label)
            self.assertIn("embed.token", reached, label)
            self.assertIn("layers.1.mlp.w_in", reached, label)

    def testLayerRangeErrors(self):
        with self.assertRaises(ContractError):
            loss_lc_logits(self.__params, EX_A, SMALL.n_layers)
        with self.assertRaises(ContractError):
            loss_et_feature(self.__params, EX_A, 0)
        with self.assertRaises(ContractError):
            loss_tft(self.__params, [5, 6, 7])

    def testBreakdownRecombines(self):
        spec = SupervisionSpec(lc_mode="logits", et_mode="feature", layer_i=1, layer_j=3, weight_lc=0.5, weight_et=2.0)
        bd = loss_total(self.__params, ParallelBatch([EX_A, EX_B]), spec)
        self.assertAlmostEqual(bd.total, bd.recombined(), places=12)
        self.assertGreater(bd.l_lc, 0.0)
        self.assertGreater(bd.l_et, 0.0)
        self.assertAlmostEqual(bd.l_lc, loss_lc_logits(self.__params, ParallelBatch([EX_A, EX_B]), 1).item(), places=12)
        self.assertAlmostEqual(bd.l_et, loss_et_feature(self.__params, ParallelBatch([EX_A, EX_B]), 3).item(), places=12)
        self.assertEqual(sorted(bd.to_dict()), ["l_et", "l_lc", "l_tft", "total"])

    def testNoSupervisionIsTranslatedTuning(self):
        bd = loss_total(self.__params, EX_A, NO_SUPERVISION)
        self.assertEqual(bd.total, loss_tft(self.__params, EX_A).item())
        self.assertEqual(bd.l_lc, 0.0)
        self.assertEqual(bd.l_et, 0.0)
        with self.assertRaises(ConfigError):
            loss_total(self.__params, EX_A, SupervisionSpec(lc_mode="logits", layer_i=SMALL.n_layers))

    def testCompositeGradient(self):
        """composite objectives against central differences on every block and embedding weight (d=16, V=32)"""
        config = ModelConfig(n_layers=2, hidden_size=16, n_heads=2, vocab_size=32, max_seq_len=8, mlp_ratio=1)
        params = init_params(config, 1)
        ex = ParallelExample(x_tgt=[5, 21, 27, 2], x_en=[5, 11, 17, 2], y_tgt=[30, 1], y_en=[20, 1])
        # the read-out path holds the final norm and head fixed, so those two are left out
        picks = [t for n, t in params.items() if n not in ("final_norm", "head")]
        self.assertEqual(len(picks), 2 + 10 * config.n_layers)
        # a two-block model admits one active stage at a time
        for spec in (SupervisionSpec(lc_mode="logits", layer_i=1), SupervisionSpec(et_mode="logits", layer_j=2)):
            err = check_gradients(lambda: loss_total(params, ex, spec).loss, picks)
            self.assertLess(err, 1.0e-3, repr(spec))

    def testCompositeGradientIsSumOfTerms(self):
        batch = ParallelBatch([EX_A, EX_B])
        lcFns = {"logits": loss_lc_logits, "feature": loss_lc_feature}
        etFns = {"logits": loss_et_logits, "feature": loss_et_feature}
        cases = [(2, mode, "none") for mode in lcFns] + [(2, "none", mode) for mode in etFns]
        cases += [(3, lc, et) for lc in lcFns for et in etFns]
        for nLayers, lcMode, etMode in cases:
            config = ModelConfig(n_layers=nLayers, hidden_size=16, n_heads=2, vocab_size=32, max_seq_len=8, mlp_ratio=1)
            params = init_params(config, 1)
            tensors = params.tensors()
            spec = SupervisionSpec(lc_mode=lcMode, et_mode=etMode, layer_i=1, layer_j=2, weight_lc=0.7, weight_et=1.3)
            expected = analytic_gradients(lambda: loss_tft(params, batch), tensors)
            if lcMode != "none":
                gLc = analytic_gradients(lambda: lcFns[lcMode](params, batch, 1), tensors)
                expected = [a + 0.7 * b for a, b in zip(expected, gLc)]
            if etMode != "none":
                gEt = analytic_gradients(lambda: etFns[etMode](params, batch, 2), tensors)
                expected = [a + 1.3 * b for a, b in zip(expected, gEt)]
            total = analytic_gradients(lambda: loss_total(params, batch, spec).loss, tensors)
            for name, g, e in zip(params.names(), total, expected):
                np.testing.assert_allclose(g, e, rtol=1e-9, atol=1e-12, err_msg="%s L=%d %s/%s" % (name, nLayers, lcMode, etMode))

    def testBackwardIsDeterministic(self):
        spec = SupervisionSpec(lc_mode="feature", et_mode="logits", layer_i=2, layer_j=3)
        batch = ParallelBatch([EX_A, EX_B])
        tensors = self.__params.tensors()
        first = analytic_gradients(lambda: loss_total(self.__params, batch, spec).loss, tensors)
        second = analytic_gradients(lambda: loss_total(self.__params, batch, spec).loss, tensors)
        for name, a, b in zip(self.__params.names(), first, second):
            np.testing.assert_array_equal(a, b, err_msg=name)
        self.assertTrue(any(np.any(g != 0.0) for g in first))

    def testEchoModelHasSmallConversionLoss(self):
        """a model whose layer-1 read-out echoes its input scores near zero on an identical-language pair"""
        config = ModelConfig(n_layers=2, hidden_size=32, n_heads=2, vocab_size=32, max_seq_len=12, mlp_ratio=1)
        params = init_params(config, 3)
        fresh = params.copy()
        # one-hot token embeddings pass through blocks whose residual writes are zeroed
        params["embed.token"].data[...] = np.eye(32)
        params["embed.position"].data[...] = 0.0
        for k in (1, 2):
            for leaf in ("attn.wo", "mlp.w_out", "mlp.b_out"):
                params["layers.%d.%s" % (k, leaf)].data[...] = 0.0
        params["head"].data[...] = 2.0 * np.eye(32)

        same = ParallelExample(x_tgt=[9, 14, 20, 2], x_en=[9, 14, 20, 2], y_tgt=[25, 1], y_en=[25, 1])
        self.assertLess(loss_lc_logits(params, same, 1).item(), 0.1)
        self.assertGreater(loss_lc_logits(fresh, same, 1).item(), 1.0)
        # once the pivot query differs, echoing the target tokens is wrong
        differs = ParallelExample(x_tgt=[9, 14, 20, 2], x_en=[9, 15, 21, 2], y_tgt=[25, 1], y_en=[25, 1])
        self.assertGreater(loss_lc_logits(params, differs, 1).item(), 1.0)


def supervisionSuite():  # pragma: no cover
    suiteSelect = unittest.TestSuite()
    suiteSelect.addTest(ParallelBatchTests("testMasks"))
    suiteSelect.addTest(DeepSupervisionLossTests("testGradientLocality"))
    suiteSelect.addTest(DeepSupervisionLossTests("testCompositeGradient"))
    return suiteSelect


if __name__ == "__main__":  # pragma: no cover
    unittest.main()
