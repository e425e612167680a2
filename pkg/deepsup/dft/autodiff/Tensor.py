##
# File:    Tensor.py
# Date:    02-Oct-2026
#
# Updates:
#   05-Oct-2026  add Graph.check_finite() and the no_grad() context
##
"""
Dense 64-bit tensors with a dynamic reverse-mode tape.

Each differentiable operation (see TensorOps) returns a Tensor that records
its parents and a backward rule.  Graph orders the reachable nodes so that a
node is visited only after every consumer has contributed its gradient.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import contextlib
import logging
import threading

import numpy as np

from deepsup.dft.utils.DftExceptions import ContractError, DimensionError, NonFiniteError

logger = logging.getLogger(__name__)

DTYPE = np.float64

_gradState = threading.local()


def is_grad_enabled():
    return getattr(_gradState, "enabled", True)


@contextlib.contextmanager
def no_grad():
    """Build no tape inside the block (evaluation and decoding)."""
    prev = is_grad_enabled()
    _gradState.enabled = False
    try:
        yield
    finally:
        _gradState.enabled = prev


class Tensor(object):
    """A node of the computation graph.

    Values are immutable after construction; only the ``grad`` slot changes,
    and only for tensors created with ``requires_grad=True``.
    """

    def __init__(self, data, requires_grad=False, name=None):
        arr = np.array(data, dtype=DTYPE)
        self.__init(arr, requires_grad, "leaf", (), None, name)

    @classmethod
    def fromArray(cls, arr, requires_grad=False, op="leaf", parents=(), backwardFn=None, name=None):
        """Wrap ``arr`` without copying (internal use by operations)."""
        obj = cls.__new__(cls)
        obj.__init(arr, requires_grad, op, parents, backwardFn, name)
        return obj

    def __init(self, arr, requires_grad, op, parents, backwardFn, name):
        if arr.dtype != DTYPE:
            arr = arr.astype(DTYPE)
        if any(n < 1 for n in arr.shape):
            raise DimensionError("tensor", arr.shape, detail="extents must be positive")
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.op = op
        self.name = name
        self._parents = tuple(parents)
        self._backward = backwardFn

    # -- shape helpers
    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        if self.data.size != 1:
            raise ContractError("item() needs a single-element tensor, got shape %s" % (self.shape,))
        return float(self.data.reshape(-1)[0])

    def numpy(self):
        return self.data

    def is_leaf(self):
        return self._backward is None

    def zero_grad(self):
        self.grad = None

    def accumulate(self, g):
        """Add ``g`` into the gradient slot (no-op unless requires_grad)."""
        if not self.requires_grad:
            return
        if g.shape != self.data.shape:
            raise DimensionError("accumulate", self.data.shape, g.shape)
        if self.grad is None:
            self.grad = np.array(g, dtype=DTYPE)
        else:
            self.grad += g

    def backward(self):
        backward(self)

    # -- operator sugar
    def __add__(self, other):
        from deepsup.dft.autodiff import TensorOps  # pylint: disable=import-outside-toplevel

        return TensorOps.add(self, other)

    def __sub__(self, other):
        from deepsup.dft.autodiff import TensorOps  # pylint: disable=import-outside-toplevel

        return TensorOps.sub(self, other)

    def __mul__(self, other):
        from deepsup.dft.autodiff import TensorOps  # pylint: disable=import-outside-toplevel

        if isinstance(other, (int, float)):
            return TensorOps.scale(self, float(other))
        return TensorOps.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        from deepsup.dft.autodiff import TensorOps  # pylint: disable=import-outside-toplevel

        return TensorOps.scale(self, -1.0)

    def __matmul__(self, other):
        from deepsup.dft.autodiff import TensorOps  # pylint: disable=import-outside-toplevel

        return TensorOps.matmul(self, other)

    def __repr__(self):
        return "<Tensor op=%s shape=%s requires_grad=%s%s>" % (self.op, self.shape, self.requires_grad, "" if self.name is None else " name=%s" % self.name)


class Graph(object):
    """Topologically ordered view of the tape below a root node."""

    def __init__(self, root):
        self.root = root
        self.nodes = self.__topoSort(root)

    @staticmethod
    def __topoSort(root):
        # iterative post-order; parents appear before the nodes consuming them
        order = []
        seen = set()
        stack = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen or not node.requires_grad:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in reversed(node._parents):  # pylint: disable=protected-access
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))
        return order

    def check_finite(self):
        for node in self.nodes:
            if not np.all(np.isfinite(node.data)):
                raise NonFiniteError("non-finite value produced by op '%s' with shape %s" % (node.op, node.shape))
        if not np.all(np.isfinite(self.root.data)):
            raise NonFiniteError("non-finite value at graph root (op '%s')" % self.root.op)

    def backward(self):
        root = self.root
        if root.ndim != 0:
            raise ContractError("backward() needs a scalar root, got shape %s" % (root.shape,))
        if not root.requires_grad:
            logger.debug("backward() on a root that requires no gradient; nothing to do")
            return
        pending = {id(root): np.ones((), dtype=DTYPE)}
        for node in reversed(self.nodes):
            g = pending.pop(id(node), None)
            if g is None:
                continue
            node.accumulate(g)
            if node._backward is None:  # pylint: disable=protected-access
                continue
            parentGrads = node._backward(g)  # pylint: disable=protected-access
            for parent, pg in zip(node._parents, parentGrads):  # pylint: disable=protected-access
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in pending:
                    pending[key] = pending[key] + pg
                else:
                    pending[key] = pg


def backward(root):
    """Populate ``grad`` of every requires_grad tensor reachable from ``root``.

    Gradients add to whatever the slots already hold; callers zero them
    between optimisation steps.
    """
    Graph(root).backward()
