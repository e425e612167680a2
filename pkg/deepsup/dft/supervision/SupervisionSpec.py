##
# File:    SupervisionSpec.py
# Date:    06-Oct-2026
#
# Updates:
##
"""
Which intermediate supervision stages are active, where, and how strongly.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.001"

import dataclasses
import logging

from deepsup.dft.utils.DftExceptions import ConfigError

logger = logging.getLogger(__name__)

MODES = ("none", "logits", "feature")


@dataclasses.dataclass(frozen=True)
class SupervisionSpec(object):
    lc_mode: str = "none"
    et_mode: str = "none"
    layer_i: int = None
    layer_j: int = None
    weight_lc: float = 1.0
    weight_et: float = 1.0

    @property
    def lc_active(self):
        return self.lc_mode != "none"

    @property
    def et_active(self):
        return self.et_mode != "none"

    @property
    def any_active(self):
        return self.lc_active or self.et_active

    def validate(self, nLayers):
        """Raise ConfigError unless these settings are usable on an ``nLayers``-block model.

        LC needs 1 <= i <= L-1, ET needs 1 <= j <= L, and with both stages
        active the layers must satisfy i < j < L.
        """
        for name in ("lc_mode", "et_mode"):
            if getattr(self, name) not in MODES:
                raise ConfigError("supervision.%s must be one of %s, got %r" % (name, "|".join(MODES), getattr(self, name)))
        for name in ("weight_lc", "weight_et"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
                raise ConfigError("supervision.%s must be a real >= 0, got %r" % (name, value))
        if self.lc_active:
            if not isinstance(self.layer_i, int) or not 1 <= self.layer_i <= nLayers - 1:
                raise ConfigError("supervision.layer_i must lie in 1..%d, got %r" % (nLayers - 1, self.layer_i))
        if self.et_active:
            if not isinstance(self.layer_j, int) or not 1 <= self.layer_j <= nLayers:
                raise ConfigError("supervision.layer_j must lie in 1..%d, got %r" % (nLayers, self.layer_j))
        if self.lc_active and self.et_active and not self.layer_i < self.layer_j < nLayers:
            raise ConfigError("with both stages active need layer_i < layer_j < %d, got i=%r j=%r" % (nLayers, self.layer_i, self.layer_j))
        return self

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, dIn):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(dIn) - known)
        if unknown:
            raise ConfigError("unknown supervision settings: %s" % ", ".join(unknown))
        return cls(**dIn)


NO_SUPERVISION = SupervisionSpec()


class LossBreakdown(object):
    """Scalar components of one composite loss evaluation.

    ``loss`` is the differentiable total; ``total`` and the components are
    plain floats taken from the same computation.
    """

    def __init__(self, loss, l_tft, l_lc=0.0, l_et=0.0, weight_lc=1.0, weight_et=1.0):
        self.loss = loss
        self.l_tft = float(l_tft)
        self.l_lc = float(l_lc)
        self.l_et = float(l_et)
        self.weight_lc = float(weight_lc)
        self.weight_et = float(weight_et)
        self.total = float(loss.item())

    def recombined(self):
        return self.l_tft + self.weight_lc * self.l_lc + self.weight_et * self.l_et

    def to_dict(self):
        return {"l_tft": self.l_tft, "l_lc": self.l_lc, "l_et": self.l_et, "total": self.total}

    def __repr__(self):
        return "LossBreakdown(l_tft=%.6g, l_lc=%.6g, l_et=%.6g, total=%.6g)" % (self.l_tft, self.l_lc, self.l_et, self.total)
