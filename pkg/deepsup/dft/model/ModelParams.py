##
# File:    ModelParams.py
# Date:    03-Oct-2026
#
# Updates:
#   07-Oct-2026  add layer ownership lookup used by the gradient-locality checks
##
"""
Learnable parameters of the transformer, keyed by stable dotted names.

Naming scheme::

    embed.token, embed.position                  (layer 0)
    layers.<k>.attn_norm, layers.<k>.attn.w{q,k,v,o},
    layers.<k>.mlp_norm, layers.<k>.mlp.{w_in,b_in,w_out,b_out}   (block k, 1-based)
    final_norm, head                             (above the last block)

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import collections
import hashlib
import logging

import numpy as np

from deepsup.dft.autodiff.Tensor import DTYPE, Tensor
from deepsup.dft.model.ModelConfig import ModelConfig
from deepsup.dft.utils.DftExceptions import ConfigError

logger = logging.getLogger(__name__)

INIT_STD = 0.02


def parameter_shapes(config):
    """Ordered (name, shape) pairs; a pure function of the config."""
    d = config.hidden_size
    m = config.mlp_ratio * d
    shapes = [("embed.token", (config.vocab_size, d)), ("embed.position", (config.max_seq_len, d))]
    for k in range(1, config.n_layers + 1):
        pfx = "layers.%d." % k
        shapes.extend(
            [
                (pfx + "attn_norm", (d,)),
                (pfx + "attn.wq", (d, d)),
                (pfx + "attn.wk", (d, d)),
                (pfx + "attn.wv", (d, d)),
                (pfx + "attn.wo", (d, d)),
                (pfx + "mlp_norm", (d,)),
                (pfx + "mlp.w_in", (d, m)),
                (pfx + "mlp.b_in", (m,)),
                (pfx + "mlp.w_out", (m, d)),
                (pfx + "mlp.b_out", (d,)),
            ]
        )
    shapes.append(("final_norm", (d,)))
    if not config.tie_output_head:
        shapes.append(("head", (d, config.vocab_size)))
    return shapes


def parameter_count(config):
    return int(sum(np.prod(s) for _, s in parameter_shapes(config)))


def layer_of(name, config):
    """Depth that owns a parameter: 0 for embeddings, k for block k, L+1 for the output side."""
    if name.startswith("embed."):
        return 0
    if name.startswith("layers."):
        return int(name.split(".")[1])
    return config.n_layers + 1


class ModelParams(object):
    """Ordered mapping of parameter name to leaf Tensor."""

    def __init__(self, config, tensors):
        self.config = config
        self.__tensors = collections.OrderedDict()
        expected = parameter_shapes(config)
        names = [n for n, _ in expected]
        if sorted(names) != sorted(tensors.keys()):
            missing = sorted(set(names) - set(tensors))
            extra = sorted(set(tensors) - set(names))
            raise ConfigError("parameter set does not match config (missing %s, unexpected %s)" % (missing, extra))
        for name, shape in expected:
            t = tensors[name]
            if not isinstance(t, Tensor):
                t = Tensor(t, requires_grad=True, name=name)
            if tuple(t.shape) != tuple(shape):
                raise ConfigError("parameter %s has shape %s, expected %s" % (name, t.shape, shape))
            t.requires_grad = True
            t.name = name
            self.__tensors[name] = t

    def __getitem__(self, name):
        return self.__tensors[name]

    def __contains__(self, name):
        return name in self.__tensors

    def names(self):
        return list(self.__tensors.keys())

    def items(self):
        return list(self.__tensors.items())

    def tensors(self):
        return list(self.__tensors.values())

    def count(self):
        return int(sum(t.size for t in self.__tensors.values()))

    def output_head(self):
        """The W_out tensor (d x V); the transposed token table when tied."""
        if self.config.tie_output_head:
            from deepsup.dft.autodiff import TensorOps  # pylint: disable=import-outside-toplevel

            return TensorOps.transpose(self.__tensors["embed.token"])
        return self.__tensors["head"]

    def zero_grad(self):
        for t in self.__tensors.values():
            t.zero_grad()

    def grads(self):
        """Gradient arrays in name order (zeros where no gradient arrived)."""
        return collections.OrderedDict((n, np.zeros_like(t.data) if t.grad is None else t.grad) for n, t in self.__tensors.items())

    def arrays(self):
        return collections.OrderedDict((n, t.data) for n, t in self.__tensors.items())

    def copy(self):
        return ModelParams(self.config, collections.OrderedDict((n, Tensor(t.data, requires_grad=True, name=n)) for n, t in self.__tensors.items()))

    def content_hash(self):
        h = hashlib.sha256()
        for name, t in self.__tensors.items():
            h.update(name.encode("utf-8"))
            h.update(np.ascontiguousarray(t.data, dtype="<f8").tobytes())
        return h.hexdigest()

    def bit_equal(self, other):
        if self.names() != other.names():
            return False
        return all(np.array_equal(self[n].data, other[n].data) for n in self.names())


def init_params(config, seed):
    """Deterministic initialisation: N(0, 0.02) weights, unit norm gains, zero biases."""
    if not isinstance(config, ModelConfig):
        raise ConfigError("init_params needs a ModelConfig")
    config.validate()
    rng = np.random.default_rng(seed)
    tensors = collections.OrderedDict()
    for name, shape in parameter_shapes(config):
        leaf = name.split(".")[-1]
        if leaf.endswith("norm"):
            arr = np.ones(shape, dtype=DTYPE)
        elif leaf.startswith("b_"):
            arr = np.zeros(shape, dtype=DTYPE)
        else:
            arr = rng.normal(0.0, INIT_STD, size=shape).astype(DTYPE)
        tensors[name] = Tensor.fromArray(arr, requires_grad=True, name=name)
    params = ModelParams(config, tensors)
    logger.debug("initialised %d parameters (seed %s)", params.count(), seed)
    return params
