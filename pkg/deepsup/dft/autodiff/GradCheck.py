##
# File:    GradCheck.py
# Date:    03-Oct-2026
#
# Updates:
##
"""
Central finite-difference oracle for checking analytic gradients.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.001"

import logging

import numpy as np

from deepsup.dft.autodiff.Tensor import DTYPE, backward, no_grad

logger = logging.getLogger(__name__)


def numerical_gradient(lossFn, tensor, eps=1.0e-5):
    """Estimate d lossFn() / d tensor by central differences.

    ``lossFn`` takes no argument and must read ``tensor`` when called; the
    tensor's buffer is perturbed in place and restored afterwards.
    """
    data = tensor.data
    grad = np.zeros_like(data, dtype=DTYPE)
    flat = data.reshape(-1)
    gFlat = grad.reshape(-1)
    with no_grad():
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + eps
            fPlus = lossFn().item()
            flat[idx] = orig - eps
            fMinus = lossFn().item()
            flat[idx] = orig
            gFlat[idx] = (fPlus - fMinus) / (2.0 * eps)
    return grad


def analytic_gradients(lossFn, tensors):
    """Run one backward pass and return copies of the gradients of ``tensors``."""
    for t in tensors:
        t.zero_grad()
    loss = lossFn()
    backward(loss)
    out = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in tensors]
    for t in tensors:
        t.zero_grad()
    return out


def relative_error(analytic, numeric):
    a = np.asarray(analytic, dtype=DTYPE).reshape(-1)
    n = np.asarray(numeric, dtype=DTYPE).reshape(-1)
    denom = max(np.linalg.norm(a), np.linalg.norm(n), 1.0e-12)
    return float(np.linalg.norm(a - n) / denom)


def check_gradients(lossFn, tensors, eps=1.0e-5):
    """Return the worst relative error over ``tensors`` (analytic vs. numeric)."""
    analytic = analytic_gradients(lossFn, tensors)
    worst = 0.0
    for t, a in zip(tensors, analytic):
        err = relative_error(a, numerical_gradient(lossFn, t, eps=eps))
        logger.debug("gradient check %s shape %s relative error %.3e", t.name, t.shape, err)
        worst = max(worst, err)
    return worst
