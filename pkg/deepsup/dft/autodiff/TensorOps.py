##
# File:    TensorOps.py
# Date:    02-Oct-2026
#
# Updates:
#   04-Oct-2026  fused cross_entropy and cosine_loss rules
#   06-Oct-2026  batched matmul, transpose/reshape for multi-head attention
##
"""
Differentiable operations over Tensor.

Broadcasting is limited to adding (or subtracting) a vector over the
trailing dimension; every other shape disagreement raises DimensionError.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.003"

import logging
import math

import numpy as np

from deepsup.dft.autodiff.Tensor import DTYPE, Tensor, is_grad_enabled
from deepsup.dft.utils.DftExceptions import (
    ContractError,
    DegenerateVectorError,
    DimensionError,
    EmptyPoolError,
    EmptySupervisionError,
    TokenIndexError,
)

logger = logging.getLogger(__name__)

MASK_VALUE = -1.0e30
GELU_C = math.sqrt(2.0 / math.pi)


def _result(data, parents, backwardFn, op):
    if is_grad_enabled() and any(p.requires_grad for p in parents):
        return Tensor.fromArray(data, requires_grad=True, op=op, parents=parents, backwardFn=backwardFn)
    return Tensor.fromArray(data, op=op)


def _asTensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _sumToTrailing(g, ndim):
    """Reduce a gradient to the trailing ``ndim`` dimensions (bias rule)."""
    lead = g.ndim - ndim
    if lead <= 0:
        return g
    return g.sum(axis=tuple(range(lead)))


def _isTrailingBias(a, b):
    return b.ndim == 1 and a.ndim >= 1 and a.shape[-1] == b.shape[0] and a.shape != b.shape


# ---------------------------------------------------------------- elementwise


def add(a, b):
    a, b = _asTensor(a), _asTensor(b)
    if a.shape == b.shape:

        def bw(g):
            return g, g

    elif _isTrailingBias(a, b):

        def bw(g):
            return g, _sumToTrailing(g, 1)

    else:
        raise DimensionError("add", a.shape, b.shape)
    return _result(a.data + b.data, (a, b), bw, "add")


def sub(a, b):
    a, b = _asTensor(a), _asTensor(b)
    if a.shape == b.shape:

        def bw(g):
            return g, -g

    elif _isTrailingBias(a, b):

        def bw(g):
            return g, -_sumToTrailing(g, 1)

    else:
        raise DimensionError("sub", a.shape, b.shape)
    return _result(a.data - b.data, (a, b), bw, "sub")


def mul(a, b):
    a, b = _asTensor(a), _asTensor(b)
    if a.shape != b.shape:
        raise DimensionError("mul", a.shape, b.shape)
    aD, bD = a.data, b.data

    def bw(g):
        return g * bD, g * aD

    return _result(aD * bD, (a, b), bw, "mul")


def scale(a, c):
    c = float(c)

    def bw(g):
        return (g * c,)

    return _result(a.data * c, (a,), bw, "scale")


def gelu(x):
    """Tanh approximation of the Gaussian error linear unit."""
    xD = x.data
    inner = GELU_C * (xD + 0.044715 * xD**3)
    t = np.tanh(inner)
    out = 0.5 * xD * (1.0 + t)

    def bw(g):
        dInner = GELU_C * (1.0 + 3.0 * 0.044715 * xD**2)
        return (g * (0.5 * (1.0 + t) + 0.5 * xD * (1.0 - t * t) * dInner),)

    return _result(out, (x,), bw, "gelu")


def detach(x):
    """Stop-gradient: same values (shared buffer), no path back to ``x``."""
    return Tensor.fromArray(x.data, op="detach")


# ---------------------------------------------------------------- reductions / shape


def sum_all(x):
    shape = x.shape

    def bw(g):
        return (np.broadcast_to(g, shape).copy(),)

    return _result(np.array(x.data.sum(), dtype=DTYPE), (x,), bw, "sum")


def mean_all(x):
    n = float(x.size)
    shape = x.shape

    def bw(g):
        return (np.full(shape, float(g) / n, dtype=DTYPE),)

    return _result(np.array(x.data.sum() / n, dtype=DTYPE), (x,), bw, "mean")


def reshape(x, shape):
    shape = tuple(shape)
    if int(np.prod(shape)) != x.size:
        raise DimensionError("reshape", x.shape, shape)
    inShape = x.shape

    def bw(g):
        return (g.reshape(inShape),)

    return _result(x.data.reshape(shape), (x,), bw, "reshape")


def transpose(x, axes=None):
    """Permute axes; default swaps the last two."""
    if axes is None:
        if x.ndim < 2:
            raise DimensionError("transpose", x.shape, detail="needs at least two dimensions")
        axes = list(range(x.ndim))
        axes[-1], axes[-2] = axes[-2], axes[-1]
    axes = tuple(axes)
    if sorted(axes) != list(range(x.ndim)):
        raise DimensionError("transpose", x.shape, detail="bad permutation %s" % (axes,))
    inverse = tuple(np.argsort(axes))

    def bw(g):
        return (np.transpose(g, inverse),)

    return _result(np.ascontiguousarray(np.transpose(x.data, axes)), (x,), bw, "transpose")


def slice_axis(x, start, stop, axis=0):
    axis = axis % x.ndim
    if not 0 <= start < stop <= x.shape[axis]:
        raise DimensionError("slice", x.shape, detail="range [%d:%d) on axis %d" % (start, stop, axis))
    index = [slice(None)] * x.ndim
    index[axis] = slice(start, stop)
    index = tuple(index)
    inShape = x.shape

    def bw(g):
        full = np.zeros(inShape, dtype=DTYPE)
        full[index] = g
        return (full,)

    return _result(x.data[index].copy(), (x,), bw, "slice")


def take(x, i):
    """Select entry ``i`` along axis 0 (one example of a batch)."""
    if not 0 <= i < x.shape[0]:
        raise DimensionError("take", x.shape, detail="index %d" % i)
    inShape = x.shape

    def bw(g):
        full = np.zeros(inShape, dtype=DTYPE)
        full[i] = g
        return (full,)

    return _result(x.data[i].copy(), (x,), bw, "take")


def concat(tensors, axis=0):
    tensors = list(tensors)
    if not tensors:
        raise ContractError("concat needs at least one tensor")
    ref = tensors[0]
    axis = axis % ref.ndim
    for t in tensors[1:]:
        if t.ndim != ref.ndim or any(t.shape[k] != ref.shape[k] for k in range(ref.ndim) if k != axis):
            raise DimensionError("concat", ref.shape, t.shape)
    bounds = np.cumsum([0] + [t.shape[axis] for t in tensors])

    def bw(g):
        out = []
        for k in range(len(tensors)):
            index = [slice(None)] * g.ndim
            index[axis] = slice(int(bounds[k]), int(bounds[k + 1]))
            out.append(g[tuple(index)])
        return tuple(out)

    return _result(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), bw, "concat")


# ---------------------------------------------------------------- linear algebra


def matmul(a, b):
    """Matrix product over the last two axes.

    ``a`` may carry leading batch axes; ``b`` is either a plain matrix shared
    across the batch or carries exactly the same leading axes as ``a``.
    """
    if a.ndim < 2 or b.ndim < 2:
        raise DimensionError("matmul", a.shape, b.shape, detail="operands must be at least 2-D")
    if a.shape[-1] != b.shape[-2]:
        raise DimensionError("matmul", a.shape, b.shape, detail="inner dimensions %d != %d" % (a.shape[-1], b.shape[-2]))
    if b.ndim > 2 and a.shape[:-2] != b.shape[:-2]:
        raise DimensionError("matmul", a.shape, b.shape, detail="batch dimensions differ")
    aD, bD = a.data, b.data
    shared = b.ndim == 2

    def bw(g):
        gA = np.matmul(g, np.swapaxes(bD, -1, -2)) if a.requires_grad else None
        gB = None
        if b.requires_grad:
            if shared:
                gB = np.matmul(aD.reshape(-1, aD.shape[-1]).T, g.reshape(-1, g.shape[-1]))
            else:
                gB = np.matmul(np.swapaxes(aD, -1, -2), g)
        return gA, gB

    return _result(np.matmul(aD, bD), (a, b), bw, "matmul")


# ---------------------------------------------------------------- normalisation / attention helpers


def rms_norm(x, gain, eps=1.0e-6):
    """Root-mean-square normalisation over the last axis, times ``gain``."""
    if gain.ndim != 1 or gain.shape[0] != x.shape[-1]:
        raise DimensionError("rms_norm", x.shape, gain.shape)
    xD, gD = x.data, gain.data
    r = 1.0 / np.sqrt(np.mean(xD * xD, axis=-1, keepdims=True) + eps)
    xHat = xD * r

    def bw(g):
        gX = None
        if x.requires_grad:
            dHat = g * gD
            gX = r * (dHat - xHat * np.mean(dHat * xHat, axis=-1, keepdims=True))
        gG = _sumToTrailing(g * xHat, 1) if gain.requires_grad else None
        return gX, gG

    return _result(xHat * gD, (x, gain), bw, "rms_norm")


def embedding_lookup(table, ids):
    ids = np.asarray(ids, dtype=np.int64)
    vocab = table.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= vocab):
        bad = int(ids.max()) if ids.max() >= vocab else int(ids.min())
        raise TokenIndexError("token id %d outside vocabulary of size %d" % (bad, vocab))
    tShape = table.shape

    def bw(g):
        full = np.zeros(tShape, dtype=DTYPE)
        np.add.at(full, ids.reshape(-1), g.reshape(-1, tShape[1]))
        return (full,)

    return _result(table.data[ids], (table,), bw, "embedding")


def causal_mask(scores):
    """Replace entries above the diagonal of the last two axes by a huge negative constant."""
    t = scores.shape[-1]
    if scores.ndim < 2 or scores.shape[-2] != t:
        raise DimensionError("causal_mask", scores.shape, detail="needs square trailing axes")
    upper = np.triu(np.ones((t, t), dtype=bool), k=1)
    out = np.where(upper, MASK_VALUE, scores.data)

    def bw(g):
        return (np.where(upper, 0.0, g),)

    return _result(out, (scores,), bw, "causal_mask")


# ---------------------------------------------------------------- probability


def softmax(x, axis=-1):
    shifted = x.data - np.max(x.data, axis=axis, keepdims=True)
    e = np.exp(shifted)
    s = e / np.sum(e, axis=axis, keepdims=True)

    def bw(g):
        return (s * (g - np.sum(g * s, axis=axis, keepdims=True)),)

    return _result(s, (x,), bw, "softmax")


def log_softmax(x, axis=-1):
    shifted = x.data - np.max(x.data, axis=axis, keepdims=True)
    lse = np.log(np.sum(np.exp(shifted), axis=axis, keepdims=True))
    out = shifted - lse
    s = np.exp(out)

    def bw(g):
        return (g - s * np.sum(g, axis=axis, keepdims=True),)

    return _result(out, (x,), bw, "log_softmax")


def cross_entropy(logits, targets, mask=None):
    """Mean negative log-likelihood of ``targets`` over the masked rows.

    :param logits: Tensor of shape positions x vocab
    :param targets: integer ids, one per position
    :param mask: booleans, one per position (all positions when None)
    """
    if logits.ndim != 2:
        raise DimensionError("cross_entropy", logits.shape, detail="logits must be positions x vocab")
    n, vocab = logits.shape
    targets = np.asarray(targets, dtype=np.int64).reshape(-1)
    mask = np.ones(n, dtype=bool) if mask is None else np.asarray(mask, dtype=bool).reshape(-1)
    if targets.shape[0] != n or mask.shape[0] != n:
        raise DimensionError("cross_entropy", logits.shape, (targets.shape[0], mask.shape[0]), detail="targets/mask length")
    rows = np.nonzero(mask)[0]
    if rows.size == 0:
        raise EmptySupervisionError("cross_entropy: the mask selects no position")
    tSel = targets[rows]
    if tSel.min() < 0 or tSel.max() >= vocab:
        raise TokenIndexError("target id %d outside vocabulary of size %d" % (int(tSel.max()) if tSel.max() >= vocab else int(tSel.min()), vocab))
    sel = logits.data[rows]
    shifted = sel - np.max(sel, axis=1, keepdims=True)
    lse = np.log(np.sum(np.exp(shifted), axis=1))
    nll = lse - shifted[np.arange(rows.size), tSel]
    k = float(rows.size)
    value = np.array(nll.sum() / k, dtype=DTYPE)

    def bw(g):
        p = np.exp(shifted - lse[:, None])
        p[np.arange(rows.size), tSel] -= 1.0
        full = np.zeros((n, vocab), dtype=DTYPE)
        full[rows] = p * (float(g) / k)
        return (full,)

    return _result(value, (logits,), bw, "cross_entropy")


# ---------------------------------------------------------------- pooling / similarity


def mean_pool(h, mask):
    """Arithmetic mean of the rows of ``h`` selected by ``mask``."""
    if h.ndim != 2:
        raise DimensionError("mean_pool", h.shape, detail="expects positions x hidden")
    mask = np.asarray(mask, dtype=bool).reshape(-1)
    if mask.shape[0] != h.shape[0]:
        raise DimensionError("mean_pool", h.shape, mask.shape)
    rows = np.nonzero(mask)[0]
    if rows.size == 0:
        raise EmptyPoolError("mean_pool: the mask selects no row")
    k = float(rows.size)
    inShape = h.shape

    def bw(g):
        full = np.zeros(inShape, dtype=DTYPE)
        full[rows] = g / k
        return (full,)

    return _result(h.data[rows].sum(axis=0) / k, (h,), bw, "mean_pool")


def cosine_similarity_value(a, b):
    """Plain-number cosine of two arrays (raises on a zero-norm operand)."""
    aD = np.asarray(a, dtype=DTYPE).reshape(-1)
    bD = np.asarray(b, dtype=DTYPE).reshape(-1)
    na2 = float(np.dot(aD, aD))
    nb2 = float(np.dot(bD, bD))
    if na2 == 0.0 or nb2 == 0.0:
        raise DegenerateVectorError("cosine of a zero-norm vector is undefined")
    return min(1.0, max(-1.0, float(np.dot(aD, bD)) / math.sqrt(na2 * nb2)))


def cosine_loss(a, b):
    """1 - cos(a, b); range [0, 2]."""
    if a.ndim != 1 or a.shape != b.shape:
        raise DimensionError("cosine_loss", a.shape, b.shape, detail="expects equal-length vectors")
    aD, bD = a.data, b.data
    na2 = float(np.dot(aD, aD))
    nb2 = float(np.dot(bD, bD))
    if na2 == 0.0 or nb2 == 0.0:
        raise DegenerateVectorError("cosine_loss: operand with zero norm")
    denom = math.sqrt(na2 * nb2)
    cos = float(np.dot(aD, bD)) / denom
    # rounding can push cos just past +-1; the gradient keeps the raw value
    value = np.array(1.0 - min(1.0, max(-1.0, cos)), dtype=DTYPE)

    def bw(g):
        g = float(g)
        gA = -g * (bD / denom - cos * aD / na2) if a.requires_grad else None
        gB = -g * (aD / denom - cos * bD / nb2) if b.requires_grad else None
        return gA, gB

    return _result(value, (a, b), bw, "cosine_loss")
