##
# File:    TrainConfig.py
# Date:    08-Oct-2026
#
# Updates:
#   11-Oct-2026  INI loader with section/key validation and %(name)s interpolation
##
"""
Training configuration and its INI file form.

Example::

    [run]
    output_dir = runs/kv-dft
    seed = 7
    batch_size = 32
    epochs = 20

    [data]
    train_path = data/kv.jsonl

    [method]
    method = dft

    [supervision]
    lc_mode = logits
    et_mode = logits
    layer_i = 2
    layer_j = 5

    [optimizer]
    name = adam
    learning_rate = 1e-3

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import configparser
import dataclasses
import logging
import os

from deepsup.dft.model.ModelConfig import ModelConfig
from deepsup.dft.supervision.SupervisionSpec import NO_SUPERVISION, SupervisionSpec
from deepsup.dft.trainer.Optimizers import SCHEDULES
from deepsup.dft.utils.DftExceptions import ConfigError

logger = logging.getLogger(__name__)

METHODS = ("sft", "tft", "dft")


@dataclasses.dataclass(frozen=True)
class OptimizerConfig(object):
    name: str = "adam"
    learning_rate: float = 1.0e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1.0e-8
    clip_norm: float = None
    schedule: str = "constant"


@dataclasses.dataclass(frozen=True)
class TrainConfig(object):
    model: ModelConfig = dataclasses.field(default_factory=ModelConfig)
    init_seed: int = 0
    method: str = "tft"
    supervision: SupervisionSpec = NO_SUPERVISION
    optimizer: OptimizerConfig = dataclasses.field(default_factory=OptimizerConfig)
    train_path: str = None
    eval_path: str = None
    split: str = "train"
    batch_size: int = 32
    epochs: int = 1
    max_steps: int = None
    seed: int = 0
    checkpoint_every: int = 0
    output_dir: str = None
    record_wall_time: bool = False

    def validate(self, requireActiveStage=False):
        """Raise ConfigError on an unusable configuration.

        ``requireActiveStage`` makes method dft without any active stage an
        error (config files); otherwise it only warns, as that run reduces
        to translated tuning.
        """
        self.model.validate()
        if self.method not in METHODS:
            raise ConfigError("method must be one of %s, got %r" % ("|".join(METHODS), self.method))
        self.supervision.validate(self.model.n_layers)
        if self.method == "dft" and not self.supervision.any_active:
            if requireActiveStage:
                raise ConfigError("method dft needs at least one active supervision stage (lc_mode or et_mode)")
            logger.warning("method dft with no active supervision stage reduces to tft")
        if self.method != "dft" and self.supervision.any_active:
            logger.warning("method %s ignores the supervision settings", self.method)
        opt = self.optimizer
        if opt.name not in ("adam", "sgd"):
            raise ConfigError("optimizer.name must be adam or sgd, got %r" % opt.name)
        if opt.schedule not in SCHEDULES:
            raise ConfigError("optimizer.schedule must be one of %s, got %r" % ("|".join(SCHEDULES), opt.schedule))
        if not opt.learning_rate > 0:
            raise ConfigError("optimizer.learning_rate must be positive, got %r" % opt.learning_rate)
        if not (0.0 <= opt.beta1 < 1.0 and 0.0 <= opt.beta2 < 1.0 and opt.epsilon > 0):
            raise ConfigError("optimizer betas must lie in [0, 1) and epsilon must be positive")
        if opt.clip_norm is not None and not opt.clip_norm > 0:
            raise ConfigError("optimizer.clip_norm must be positive, got %r" % opt.clip_norm)
        for name in ("batch_size", "epochs"):
            if getattr(self, name) < 1:
                raise ConfigError("run.%s must be at least 1, got %r" % (name, getattr(self, name)))
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigError("run.max_steps must be at least 1, got %r" % self.max_steps)
        if self.checkpoint_every < 0:
            raise ConfigError("run.checkpoint_every must be >= 0, got %r" % self.checkpoint_every)
        return self

    def effective_supervision(self):
        return self.supervision if self.method == "dft" else NO_SUPERVISION

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)

    def to_dict(self):
        return dataclasses.asdict(self)

    def label(self):
        """Short row label: sft, tft, dft, dft[lc=logits@2,et=feature@5]."""
        if self.method != "dft":
            return self.method
        parts = []
        if self.supervision.lc_active:
            parts.append("lc=%s@%d" % (self.supervision.lc_mode, self.supervision.layer_i))
        if self.supervision.et_active:
            parts.append("et=%s@%d" % (self.supervision.et_mode, self.supervision.layer_j))
        return "dft[%s]" % ",".join(parts) if parts else "dft[none]"

    def to_ini(self):
        """INI text that ``load_train_config`` reads back to an equal config."""
        sections = {
            "model": dict(self.model.to_dict(), init_seed=self.init_seed),
            "data": {"train_path": self.train_path, "eval_path": self.eval_path, "split": self.split},
            "method": {"method": self.method},
            "supervision": self.supervision.to_dict(),
            "optimizer": dataclasses.asdict(self.optimizer),
            "run": {
                "batch_size": self.batch_size,
                "epochs": self.epochs,
                "max_steps": self.max_steps,
                "seed": self.seed,
                "checkpoint_every": self.checkpoint_every,
                "output_dir": self.output_dir,
                "record_wall_time": self.record_wall_time,
            },
        }
        lines = []
        for section, values in sections.items():
            lines.append("[%s]" % section)
            for key in sorted(values):
                value = values[key]
                if value is None:
                    value = "none"
                elif isinstance(value, bool):
                    value = "true" if value else "false"
                lines.append("%s = %s" % (key, str(value).replace("%", "%%")))
            lines.append("")
        return "\n".join(lines)


# ---------------------------------------------------------------- INI reader

_SCHEMA = {
    "model": {
        "n_layers": "int",
        "hidden_size": "int",
        "n_heads": "int",
        "vocab_size": "int",
        "max_seq_len": "int",
        "mlp_ratio": "int",
        "tie_output_head": "bool",
        "init_seed": "int",
    },
    "data": {"train_path": "path", "eval_path": "path", "split": "str"},
    "method": {"method": "str"},
    "supervision": {"lc_mode": "str", "et_mode": "str", "layer_i": "int", "layer_j": "int", "weight_lc": "float", "weight_et": "float"},
    "optimizer": {"name": "str", "learning_rate": "float", "beta1": "float", "beta2": "float", "epsilon": "float", "clip_norm": "float", "schedule": "str"},
    "run": {
        "batch_size": "int",
        "epochs": "int",
        "max_steps": "int",
        "seed": "int",
        "checkpoint_every": "int",
        "output_dir": "path",
        "record_wall_time": "bool",
    },
}


def _convert(cp, section, key, kind, baseDir):
    raw = cp.get(section, key).strip()
    if raw.lower() in ("none", ""):
        return None
    try:
        if kind == "int":
            return cp.getint(section, key)
        if kind == "float":
            return cp.getfloat(section, key)
        if kind == "bool":
            return cp.getboolean(section, key)
    except ValueError:
        raise ConfigError("[%s] %s: cannot read %r as %s" % (section, key, raw, kind))
    if kind == "path" and not os.path.isabs(raw):
        return os.path.normpath(os.path.join(baseDir, raw))
    return raw


def parse_train_config(text, baseDir="."):
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError("malformed config: %s" % e)
    unknownSections = sorted(set(cp.sections()) - set(_SCHEMA))
    if unknownSections:
        raise ConfigError("unknown config section(s): %s" % ", ".join(unknownSections))
    values = {}
    for section in cp.sections():
        unknownKeys = sorted(set(cp.options(section)) - set(_SCHEMA[section]))
        if unknownKeys:
            raise ConfigError("unknown key(s) in [%s]: %s" % (section, ", ".join(unknownKeys)))
        try:
            values[section] = {key: _convert(cp, section, key, _SCHEMA[section][key], baseDir) for key in cp.options(section)}
        except configparser.Error as e:
            raise ConfigError("[%s]: %s" % (section, e))

    model = {k: v for k, v in values.get("model", {}).items() if v is not None}
    initSeed = model.pop("init_seed", 0)
    supervision = {k: v for k, v in values.get("supervision", {}).items() if v is not None}
    optimizer = {k: v for k, v in values.get("optimizer", {}).items() if v is not None or k == "clip_norm"}
    run = {k: v for k, v in values.get("run", {}).items() if v is not None or k in ("max_steps", "output_dir")}
    data = {k: v for k, v in values.get("data", {}).items() if v is not None or k == "eval_path"}
    if not data.get("train_path"):
        raise ConfigError("[data] train_path is required")
    config = TrainConfig(
        model=ModelConfig(**model),
        init_seed=initSeed,
        method=values.get("method", {}).get("method") or "tft",
        supervision=SupervisionSpec(**supervision),
        optimizer=OptimizerConfig(**optimizer),
        **data,
        **run,
    )
    return config.validate(requireActiveStage=True)


def load_train_config(fPath):
    """Read and validate an INI training config; relative paths resolve against its directory."""
    try:
        with open(fPath, "r", encoding="utf-8") as ifh:
            text = ifh.read()
    except OSError as e:
        raise ConfigError("cannot read config %s (%s)" % (fPath, e))
    config = parse_train_config(text, baseDir=os.path.dirname(os.path.abspath(fPath)))
    logger.info("loaded %s config from %s", config.label(), fPath)
    return config
