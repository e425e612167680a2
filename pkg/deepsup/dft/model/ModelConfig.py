##
# File:    ModelConfig.py
# Date:    03-Oct-2026
#
# Updates:
##
"""
Hyperparameters of the decoder-only transformer.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.001"

import dataclasses

from deepsup.dft.utils.DftExceptions import ConfigError

PAD_ID = 0
EOS_ID = 1


@dataclasses.dataclass(frozen=True)
class ModelConfig(object):
    """Transformer shape.  Defaults are the desk-scale acceptance model."""

    n_layers: int = 8
    hidden_size: int = 64
    n_heads: int = 4
    vocab_size: int = 256
    max_seq_len: int = 32
    tie_output_head: bool = False
    mlp_ratio: int = 4

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("n_layers", "hidden_size", "n_heads", "vocab_size", "max_seq_len", "mlp_ratio"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError("model.%s must be a positive integer, got %r" % (name, value))
        if self.hidden_size % self.n_heads != 0:
            raise ConfigError("model.hidden_size (%d) must be divisible by model.n_heads (%d)" % (self.hidden_size, self.n_heads))
        if self.vocab_size <= EOS_ID:
            raise ConfigError("model.vocab_size must leave room for the pad and eos tokens")

    @property
    def head_size(self):
        return self.hidden_size // self.n_heads

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, dIn):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(dIn) - known)
        if unknown:
            raise ConfigError("unknown model settings: %s" % ", ".join(unknown))
        return cls(**dIn)
