##
#
# File:    TrainConfigTests.py
# Date:    17-Oct-2026
#
# Updated:
#
##
"""
Test cases for reading and writing INI training configurations.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.01"

import logging
import os
import unittest

from deepsup.dft.model.ModelConfig import ModelConfig
from deepsup.dft.supervision.SupervisionSpec import SupervisionSpec
from deepsup.dft.trainer.TrainConfig import TrainConfig, load_train_config, parse_train_config
from deepsup.dft.utils.DftExceptions import ConfigError

HERE = os.path.abspath(os.path.dirname(__file__))
FIXTURES = os.path.join(HERE, "fixtures")

logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)s]-%(module)s.%(funcName)s: %(message)s")
logger = logging.getLogger()

MINIMAL = """
[data]
train_path = data/copy.jsonl
"""


class TrainConfigTests(unittest.TestCase):
    def testLoadFixture(self):
        config = load_train_config(os.path.join(FIXTURES, "tiny-dft.cfg"))
        self.assertEqual(config.model, ModelConfig(n_layers=4, hidden_size=8, n_heads=2, vocab_size=64, max_seq_len=16, mlp_ratio=2))
        self.assertEqual(config.init_seed, 3)
        self.assertEqual(config.train_path, os.path.join(FIXTURES, "tiny-kv.jsonl"))
        self.assertIsNone(config.eval_path)
        self.assertEqual(config.supervision, SupervisionSpec(lc_mode="logits", et_mode="feature", layer_i=1, layer_j=3, weight_et=0.5))
        self.assertEqual(config.optimizer.clip_norm, 1.0)
        self.assertEqual(config.optimizer.schedule, "linear")
        self.assertAlmostEqual(config.optimizer.learning_rate, 3e-3)
        self.assertEqual((config.batch_size, config.epochs, config.max_steps, config.seed, config.checkpoint_every), (4, 2, 6, 9, 3))
        self.assertFalse(config.record_wall_time)
        self.assertEqual(config.label(), "dft[lc=logits@1,et=feature@3]")

    def testDefaults(self):
        config = parse_train_config(MINIMAL, baseDir="/runs")
        self.assertEqual(config.method, "tft")
        self.assertEqual(config.model, ModelConfig())
        self.assertEqual(config.train_path, os.path.normpath("/runs/data/copy.jsonl"))
        self.assertEqual(config.label(), "tft")
        self.assertFalse(config.effective_supervision().any_active)

    def testIniRoundTrip(self):
        config = load_train_config(os.path.join(FIXTURES, "tiny-dft.cfg"))
        self.assertEqual(parse_train_config(config.to_ini()), config)
        sft = config.replace(method="sft")
        self.assertEqual(parse_train_config(sft.to_ini()), sft)
        self.assertFalse(sft.effective_supervision().any_active)

    def testRejectsUnknownNames(self):
        with self.assertRaises(ConfigError):
            parse_train_config(MINIMAL + "\n[run]\nbatchsize = 8\n")
        with self.assertRaises(ConfigError):
            parse_train_config(MINIMAL + "\n[scheduler]\nwarmup = 8\n")

    def testRejectsBadValues(self):
        with self.assertRaises(ConfigError):
            parse_train_config(MINIMAL + "\n[run]\nbatch_size = eight\n")
        with self.assertRaises(ConfigError):
            parse_train_config(MINIMAL + "\n[run]\nbatch_size = 0\n")
        with self.assertRaises(ConfigError):
            parse_train_config(MINIMAL + "\n[optimizer]\nschedule = cosine\n")
        with self.assertRaises(ConfigError):
            parse_train_config(MINIMAL + "\n[model]\nn_layers = 4\n[supervision]\nlc_mode = logits\nlayer_i = 4\n[method]\nmethod = dft\n")
        with self.assertRaises(ConfigError):
            parse_train_config("[run]\nbatch_size = 8\n")
        with self.assertRaises(ConfigError):
            parse_train_config("[data\ntrain_path = x\n")

    def testDeepSupervisionNeedsAStage(self):
        with self.assertRaises(ConfigError):
            parse_train_config(MINIMAL + "\n[method]\nmethod = dft\n")
        # programmatic configs only warn; the run reduces to translated tuning
        TrainConfig(method="dft").validate()

    def testMissingFile(self):
        with self.assertRaises(ConfigError):
            load_train_config(os.path.join(FIXTURES, "no-such.cfg"))


if __name__ == "__main__":  # pragma: no cover
    unittest.main()
