##
# File:    Optimizers.py
# Date:    08-Oct-2026
#
# Updates:
#   10-Oct-2026  global-norm clipping and linear decay schedule
##
"""
Parameter update rules, gradient clipping and learning-rate schedules.

Updates run in name order over plain numpy arrays and modify them in place,
so a run is reproducible bit for bit.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import collections
import dataclasses
import logging
import math

import numpy as np

from deepsup.dft.autodiff.Tensor import DTYPE
from deepsup.dft.utils.DftExceptions import ConfigError, NonFiniteError

logger = logging.getLogger(__name__)

SCHEDULES = ("constant", "linear")


@dataclasses.dataclass(frozen=True)
class AdamHyper(object):
    learning_rate: float = 1.0e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1.0e-8


class AdamState(object):
    """First/second moment estimates and the number of updates applied."""

    def __init__(self, m=None, v=None, step=0):
        self.m = collections.OrderedDict(m or {})
        self.v = collections.OrderedDict(v or {})
        self.step = int(step)

    @classmethod
    def zeros_like(cls, arrays):
        return cls(
            collections.OrderedDict((n, np.zeros_like(a, dtype=DTYPE)) for n, a in arrays.items()),
            collections.OrderedDict((n, np.zeros_like(a, dtype=DTYPE)) for n, a in arrays.items()),
        )


def check_finite_grads(grads):
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NonFiniteError("non-finite gradient for %s" % name)


def adam_step(params, grads, state, hyper):
    """Bias-corrected Adam update of ``params`` (name -> array, modified in place).

    :returns: the updated AdamState
    """
    check_finite_grads(grads)
    if state is None:
        state = AdamState.zeros_like(params)
    t = state.step + 1
    b1, b2 = hyper.beta1, hyper.beta2
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    for name, p in params.items():
        g = grads[name]
        m, v = state.m[name], state.v[name]
        if m.shape != p.shape or v.shape != p.shape:
            raise ConfigError("optimizer state for %s has shape %s, parameter has %s" % (name, m.shape, p.shape))
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= hyper.learning_rate * (m / c1) / (np.sqrt(v / c2) + hyper.epsilon)
    state.step = t
    return state


def sgd_step(params, grads, learningRate):
    check_finite_grads(grads)
    for name, p in params.items():
        p -= learningRate * grads[name]


def global_norm(grads):
    return math.sqrt(math.fsum(float(np.dot(g.reshape(-1), g.reshape(-1))) for g in grads.values()))


def clip_global_norm(grads, maxNorm):
    """Scale ``grads`` (in place) so their joint L2 norm is at most ``maxNorm``.

    :returns: the norm before clipping
    """
    norm = global_norm(grads)
    if maxNorm is not None and norm > maxNorm:
        factor = maxNorm / norm
        for g in grads.values():
            g *= factor
    return norm


def learning_rate_at(schedule, baseRate, step, totalSteps):
    """Rate for the update numbered ``step`` (0-based) of ``totalSteps``."""
    if schedule == "constant":
        return baseRate
    if schedule == "linear":
        return baseRate * max(0.0, 1.0 - float(step) / float(max(totalSteps, 1)))
    raise ConfigError("unknown learning-rate schedule %r (choose from %s)" % (schedule, ", ".join(SCHEDULES)))


class AdamOptimizer(object):
    name = "adam"

    def __init__(self, hyper):
        self.hyper = hyper
        self.state = None

    def step(self, params, grads, learningRate):
        hyper = dataclasses.replace(self.hyper, learning_rate=learningRate)
        self.state = adam_step(params, grads, self.state, hyper)

    def state_dict(self):
        if self.state is None:
            return {"name": self.name, "step": 0, "slots": {}}
        return {"name": self.name, "step": self.state.step, "slots": {"m": self.state.m, "v": self.state.v}}

    def load_state_dict(self, stateDict):
        if stateDict.get("name") != self.name:
            raise ConfigError("cannot resume adam from %r optimizer state" % stateDict.get("name"))
        slots = stateDict.get("slots", {})
        if stateDict.get("step", 0) and slots:
            self.state = AdamState(slots["m"], slots["v"], stateDict["step"])


class SgdOptimizer(object):
    name = "sgd"

    def __init__(self):
        self.steps = 0

    def step(self, params, grads, learningRate):
        sgd_step(params, grads, learningRate)
        self.steps += 1

    def state_dict(self):
        return {"name": self.name, "step": self.steps, "slots": {}}

    def load_state_dict(self, stateDict):
        if stateDict.get("name") != self.name:
            raise ConfigError("cannot resume sgd from %r optimizer state" % stateDict.get("name"))
        self.steps = int(stateDict.get("step", 0))


def make_optimizer(optimizerConfig):
    if optimizerConfig.name == "adam":
        return AdamOptimizer(AdamHyper(optimizerConfig.learning_rate, optimizerConfig.beta1, optimizerConfig.beta2, optimizerConfig.epsilon))
    if optimizerConfig.name == "sgd":
        return SgdOptimizer()
    raise ConfigError("unknown optimizer %r (choose from adam, sgd)" % optimizerConfig.name)
