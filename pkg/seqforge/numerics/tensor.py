"""Reverse-mode automatic differentiation over numpy arrays.

Each ``Tensor`` wraps a float64 ``np.ndarray``. Operations on tensors that
require gradients record their parents and a closure that pushes the
output gradient back to them; ``Tensor.backward`` walks the recorded graph
in reverse topological order.

Notes
-----
There is no global tape: a graph lives only as long as the tensors that
reference it, so separate graphs can be built and differentiated from
different threads. Gradients accumulate into ``.grad`` until cleared.
"""

from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from seqforge.core.exceptions import ShapeError

ArrayLike = Union["Tensor", np.ndarray, float, int, Sequence]


class Tensor:
    """A float64 array node in a differentiable computation graph.

    Parameters
    ----------
    data : array-like
        Values; converted to a float64 array.
    requires_grad : bool, optional
        Whether gradients should flow into this tensor (default False).

    Attributes
    ----------
    data : np.ndarray
        Row-major float64 values.
    grad : Optional[np.ndarray]
        Accumulated gradient, same shape as ``data`` once populated.
    requires_grad : bool
        True for parameters and anything computed from them.
    """

    def __init__(self, data: ArrayLike, requires_grad: bool = False) -> None:
        if isinstance(data, Tensor):
            data = data.data
        self.data: np.ndarray = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[Callable[[np.ndarray], None]] = None
        self._op = ""

    @classmethod
    def parameter(cls, data: ArrayLike) -> "Tensor":
        """Create a trainable leaf holding its own contiguous copy of ``data``."""
        return cls(np.array(data, dtype=np.float64, copy=True, order="C"), requires_grad=True)

    # ------------------------------------------------------------------
    # Introspection
    # ------------------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def item(self) -> float:
        """Return the value of a single-element tensor as a Python float."""
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        """Return a constant tensor sharing this tensor's values."""
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}, op={self._op!r})"

    # ------------------------------------------------------------------
    # Backpropagation
    # ------------------------------------------------------------------

    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        """Accumulate d(self)/d(leaf) into every reachable tensor's ``grad``.

        Parameters
        ----------
        grad : Optional[np.ndarray]
            Upstream gradient. Defaults to 1 for single-element tensors.

        Raises
        ------
        ShapeError
            If ``grad`` is omitted for a non-scalar tensor.
        """
        if grad is None:
            if self.data.size != 1:
                raise ShapeError("backward() without grad requires a scalar tensor")
            grad = np.ones_like(self.data)
        if not self.requires_grad:
            return

        # iterative post-order DFS; recurrent graphs are too deep for recursion
        topo: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))

        _accumulate(self, np.asarray(grad, dtype=np.float64))
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # ------------------------------------------------------------------
    # Operators
    # ------------------------------------------------------------------

    def __add__(self, other: ArrayLike) -> "Tensor":
        return add(self, other)

    def __radd__(self, other: ArrayLike) -> "Tensor":
        return add(other, self)

    def __sub__(self, other: ArrayLike) -> "Tensor":
        return sub(self, other)

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return sub(other, self)

    def __mul__(self, other: ArrayLike) -> "Tensor":
        return mul(self, other)

    def __rmul__(self, other: ArrayLike) -> "Tensor":
        return mul(other, self)

    def __truediv__(self, other: ArrayLike) -> "Tensor":
        return div(self, other)

    def __rtruediv__(self, other: ArrayLike) -> "Tensor":
        return div(other, self)

    def __neg__(self) -> "Tensor":
        return mul(self, -1.0)

    def __pow__(self, exponent: float) -> "Tensor":
        return power(self, exponent)

    def __matmul__(self, other: ArrayLike) -> "Tensor":
        return matmul(self, other)

    def __rmatmul__(self, other: ArrayLike) -> "Tensor":
        return matmul(other, self)

    def __getitem__(self, index) -> "Tensor":
        return getitem(self, index)

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def exp(self) -> "Tensor":
        return exp(self)

    def log(self) -> "Tensor":
        return log(self)

    def tanh(self) -> "Tensor":
        return tanh(self)

    def sigmoid(self) -> "Tensor":
        return sigmoid(self)

    def relu(self) -> "Tensor":
        return relu(self)

    def sqrt(self) -> "Tensor":
        return sqrt(self)

    def softmax(self, axis: int = -1) -> "Tensor":
        return softmax(self, axis=axis)


# ======================================================================
# Graph plumbing
# ======================================================================


def as_tensor(value: ArrayLike) -> Tensor:
    """Wrap non-tensors as constants; tensors pass through unchanged."""
    return value if isinstance(value, Tensor) else Tensor(value)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` over the axes that broadcasting expanded to reach ``shape``."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


def _accumulate(tensor: Tensor, grad: np.ndarray) -> None:
    if not tensor.requires_grad:
        return
    grad = _unbroadcast(grad, tensor.shape)
    if tensor.grad is None:
        tensor.grad = np.array(grad, dtype=np.float64, copy=True)
    else:
        tensor.grad = tensor.grad + grad


def _result(
    data: np.ndarray,
    parents: Tuple[Tensor, ...],
    backward: Callable[[np.ndarray], None],
    op: str,
) -> Tensor:
    out = Tensor(data)
    out._op = op
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward
    return out


# ======================================================================
# Elementwise arithmetic
# ======================================================================


def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g)
        _accumulate(b, g)

    return _result(a.data + b.data, (a, b), _backward, "add")


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g)
        _accumulate(b, -g)

    return _result(a.data - b.data, (a, b), _backward, "sub")


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g * b.data)
        _accumulate(b, g * a.data)

    return _result(a.data * b.data, (a, b), _backward, "mul")


def div(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g / b.data)
        _accumulate(b, -g * a.data / (b.data * b.data))

    return _result(a.data / b.data, (a, b), _backward, "div")


def power(a: ArrayLike, exponent: float) -> Tensor:
    a = as_tensor(a)
    exponent = float(exponent)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g * exponent * a.data ** (exponent - 1.0))

    return _result(a.data**exponent, (a,), _backward, "pow")


def exp(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out_data = np.exp(a.data)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g * out_data)

    return _result(out_data, (a,), _backward, "exp")


def log(a: ArrayLike) -> Tensor:
    a = as_tensor(a)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g / a.data)

    return _result(np.log(a.data), (a,), _backward, "log")


def sqrt(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out_data = np.sqrt(a.data)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g * 0.5 / out_data)

    return _result(out_data, (a,), _backward, "sqrt")


def tanh(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out_data = np.tanh(a.data)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g * (1.0 - out_data * out_data))

    return _result(out_data, (a,), _backward, "tanh")


def sigmoid(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    out_data = expit(a.data)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g * out_data * (1.0 - out_data))

    return _result(out_data, (a,), _backward, "sigmoid")


def relu(a: ArrayLike) -> Tensor:
    a = as_tensor(a)
    mask = a.data > 0

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g * mask)

    return _result(np.where(mask, a.data, 0.0), (a,), _backward, "relu")


def clip_min(a: ArrayLike, floor: float) -> Tensor:
    """max(a, floor) elementwise; no gradient flows where the floor is active."""
    a = as_tensor(a)
    mask = a.data >= floor

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g * mask)

    return _result(np.maximum(a.data, floor), (a,), _backward, "clip_min")


# ======================================================================
# Reductions and shape manipulation
# ======================================================================


def tsum(a: ArrayLike, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)

    def _backward(g: np.ndarray) -> None:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        _accumulate(a, np.broadcast_to(g, a.shape))

    return _result(np.sum(a.data, axis=axis, keepdims=keepdims), (a,), _backward, "sum")


def mean(a: ArrayLike, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    if axis is None:
        count = a.size
    else:
        axes = axis if isinstance(axis, tuple) else (axis,)
        count = int(np.prod([a.shape[ax] for ax in axes]))
    return tsum(a, axis=axis, keepdims=keepdims) * (1.0 / count)


def reshape(a: ArrayLike, shape: Tuple[int, ...]) -> Tensor:
    a = as_tensor(a)

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, g.reshape(a.shape))

    return _result(a.data.reshape(shape), (a,), _backward, "reshape")


def transpose(a: ArrayLike, axes: Optional[Tuple[int, ...]] = None) -> Tensor:
    a = as_tensor(a)
    inverse = None if axes is None else tuple(np.argsort(axes))

    def _backward(g: np.ndarray) -> None:
        _accumulate(a, np.transpose(g, inverse))

    return _result(np.transpose(a.data, axes), (a,), _backward, "transpose")


def getitem(a: ArrayLike, index) -> Tensor:
    a = as_tensor(a)

    def _backward(g: np.ndarray) -> None:
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        _accumulate(a, full)

    return _result(a.data[index], (a,), _backward, "getitem")


def concat(tensors: Sequence[ArrayLike], axis: int = -1) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    data = np.concatenate([p.data for p in parts], axis=axis)
    bounds = np.cumsum([p.shape[axis] for p in parts])[:-1]

    def _backward(g: np.ndarray) -> None:
        for part, piece in zip(parts, np.split(g, bounds, axis=axis)):
            _accumulate(part, piece)

    return _result(data, tuple(parts), _backward, "concat")


def stack(tensors: Sequence[ArrayLike], axis: int = 0) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    data = np.stack([p.data for p in parts], axis=axis)

    def _backward(g: np.ndarray) -> None:
        for i, part in enumerate(parts):
            _accumulate(part, np.take(g, i, axis=axis))

    return _result(data, tuple(parts), _backward, "stack")


# ======================================================================
# Linear algebra and network primitives
# ======================================================================


def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    """Matrix product ``a @ b`` for ``a`` of shape (..., n, k) and ``b`` of shape (k, m).

    Raises
    ------
    ShapeError
        If ``b`` is not 2-D, ``a`` is not at least 2-D, or inner sizes differ.
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim != 2 or a.shape[-1] != b.shape[0]:
        raise ShapeError(f"matmul shapes incompatible: {a.shape} @ {b.shape}")

    def _backward(g: np.ndarray) -> None:
        if a.requires_grad:
            _accumulate(a, g @ b.data.T)
        if b.requires_grad:
            a2 = a.data.reshape(-1, a.shape[-1])
            g2 = g.reshape(-1, g.shape[-1])
            _accumulate(b, a2.T @ g2)

    return _result(a.data @ b.data, (a, b), _backward, "matmul")


def softmax(a: ArrayLike, axis: int = -1) -> Tensor:
    a = as_tensor(a)
    shifted = a.data - np.max(a.data, axis=axis, keepdims=True)
    e = np.exp(shifted)
    out_data = e / np.sum(e, axis=axis, keepdims=True)

    def _backward(g: np.ndarray) -> None:
        inner = np.sum(g * out_data, axis=axis, keepdims=True)
        _accumulate(a, out_data * (g - inner))

    return _result(out_data, (a,), _backward, "softmax")


def conv2d(x: ArrayLike, weight: ArrayLike, bias: ArrayLike, padding: int = 0) -> Tensor:
    """Stride-1 2-D cross-correlation.

    Parameters
    ----------
    x : Tensor
        Input of shape (B, C_in, H, W).
    weight : Tensor
        Kernels of shape (C_out, C_in, kh, kw).
    bias : Tensor
        Per-channel bias of shape (C_out,).
    padding : int
        Zero padding applied on every spatial border.

    Returns
    -------
    Tensor
        Output of shape (B, C_out, H + 2p - kh + 1, W + 2p - kw + 1).
    """
    x, weight, bias = as_tensor(x), as_tensor(weight), as_tensor(bias)
    if x.ndim != 4 or weight.ndim != 4 or x.shape[1] != weight.shape[1]:
        raise ShapeError(f"conv2d shapes incompatible: {x.shape} * {weight.shape}")
    kh, kw = weight.shape[2], weight.shape[3]
    pad = ((0, 0), (0, 0), (padding, padding), (padding, padding))
    xp = np.pad(x.data, pad)
    windows = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3))
    out_data = np.einsum("bchwij,ocij->bohw", windows, weight.data)
    out_data = out_data + bias.data[None, :, None, None]
    out_h, out_w = out_data.shape[2], out_data.shape[3]

    def _backward(g: np.ndarray) -> None:
        if weight.requires_grad:
            _accumulate(weight, np.einsum("bchwij,bohw->ocij", windows, g))
        if bias.requires_grad:
            _accumulate(bias, g.sum(axis=(0, 2, 3)))
        if x.requires_grad:
            gxp = np.zeros_like(xp)
            for i in range(kh):
                for j in range(kw):
                    gxp[:, :, i : i + out_h, j : j + out_w] += np.einsum(
                        "bohw,oc->bchw", g, weight.data[:, :, i, j]
                    )
            h, w = x.shape[2], x.shape[3]
            _accumulate(x, gxp[:, :, padding : padding + h, padding : padding + w])

    return _result(out_data, (x, weight, bias), _backward, "conv2d")
