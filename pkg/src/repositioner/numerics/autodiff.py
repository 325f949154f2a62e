"""Reverse-mode differentiation over numpy arrays.

A small tape restricted to the operations the embedding and prediction
models in this package actually use (dense layers, graph aggregation,
gather/scatter for embedding tables, 1-D pooling).  Everything is float64
and fully deterministic: the same inputs always produce bit-identical
values and gradients.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Var",
    "as_var",
    "concat",
    "stack",
    "gather",
    "backward",
]


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Var:
    """A node in the computation tape wrapping a float64 ndarray."""

    __slots__ = ("value", "grad", "requires_grad", "_parents", "_vjps")

    def __init__(self, value, requires_grad=False, _parents=(), _vjps=()):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad or any(p.requires_grad for p in _parents)
        self._parents = _parents
        self._vjps = _vjps

    @property
    def shape(self):
        return self.value.shape

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = as_var(other)
        return Var(
            self.value + other.value,
            _parents=(self, other),
            _vjps=(
                lambda g: _unbroadcast(g, self.shape),
                lambda g: _unbroadcast(g, other.shape),
            ),
        )

    __radd__ = __add__

    def __neg__(self):
        return Var(-self.value, _parents=(self,), _vjps=(lambda g: -g,))

    def __sub__(self, other):
        return self + (-as_var(other))

    def __rsub__(self, other):
        return as_var(other) + (-self)

    def __mul__(self, other):
        other = as_var(other)
        return Var(
            self.value * other.value,
            _parents=(self, other),
            _vjps=(
                lambda g: _unbroadcast(g * other.value, self.shape),
                lambda g: _unbroadcast(g * self.value, other.shape),
            ),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_var(other)
        return Var(
            self.value / other.value,
            _parents=(self, other),
            _vjps=(
                lambda g: _unbroadcast(g / other.value, self.shape),
                lambda g: _unbroadcast(-g * self.value / other.value**2, other.shape),
            ),
        )

    def __rtruediv__(self, other):
        return as_var(other) / self

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, float, np.integer, np.floating)):
            raise TypeError("only constant exponents are supported")
        return Var(
            self.value**exponent,
            _parents=(self,),
            _vjps=(lambda g: g * exponent * self.value ** (exponent - 1),),
        )

    def __matmul__(self, other):
        other = as_var(other)
        a, b = self.value, other.value
        return Var(
            a @ b,
            _parents=(self, other),
            _vjps=(
                lambda g: _matmul_vjp_left(g, a, b),
                lambda g: _matmul_vjp_right(g, a, b),
            ),
        )

    # -- shape ---------------------------------------------------------

    @property
    def T(self):
        return Var(self.value.T, _parents=(self,), _vjps=(lambda g: g.T,))

    def reshape(self, *shape):
        old = self.shape
        return Var(
            self.value.reshape(*shape),
            _parents=(self,),
            _vjps=(lambda g: g.reshape(old),),
        )

    # -- elementwise non-linearities ------------------------------------

    def exp(self):
        out = np.exp(self.value)
        return Var(out, _parents=(self,), _vjps=(lambda g: g * out,))

    def log(self):
        return Var(np.log(self.value), _parents=(self,), _vjps=(lambda g: g / self.value,))

    def sqrt(self):
        out = np.sqrt(self.value)
        return Var(out, _parents=(self,), _vjps=(lambda g: g * 0.5 / out,))

    def tanh(self):
        out = np.tanh(self.value)
        return Var(out, _parents=(self,), _vjps=(lambda g: g * (1.0 - out**2),))

    def sigmoid(self):
        out = _sigmoid(self.value)
        return Var(out, _parents=(self,), _vjps=(lambda g: g * out * (1.0 - out),))

    def relu(self):
        mask = self.value > 0
        return Var(
            np.where(mask, self.value, 0.0),
            _parents=(self,),
            _vjps=(lambda g: g * mask,),
        )

    def softplus(self):
        # log(1 + e^x), computed stably; derivative is sigmoid(x)
        out = np.logaddexp(0.0, self.value)
        return Var(out, _parents=(self,), _vjps=(lambda g: g * _sigmoid(self.value),))

    def sin(self):
        return Var(np.sin(self.value), _parents=(self,), _vjps=(lambda g: g * np.cos(self.value),))

    def cos(self):
        return Var(np.cos(self.value), _parents=(self,), _vjps=(lambda g: -g * np.sin(self.value),))

    def abs(self):
        # subgradient 0 at the kink
        return Var(
            np.abs(self.value),
            _parents=(self,),
            _vjps=(lambda g: g * np.sign(self.value),),
        )

    # -- reductions ------------------------------------------------------

    def sum(self, axis=None, keepdims=False):
        shape = self.shape

        def vjp(g):
            if axis is None:
                return np.broadcast_to(g, shape).copy()
            gg = g if keepdims else np.expand_dims(g, axis)
            return np.broadcast_to(gg, shape).copy()

        return Var(self.value.sum(axis=axis, keepdims=keepdims), _parents=(self,), _vjps=(vjp,))

    def mean(self, axis=None, keepdims=False):
        n = self.value.size if axis is None else self.value.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) / float(n)

    def max(self, axis):
        """Max along one axis; gradient flows to the first argmax."""
        idx = np.argmax(self.value, axis=axis)
        out = np.take_along_axis(self.value, np.expand_dims(idx, axis), axis=axis).squeeze(axis)
        shape = self.shape

        def vjp(g):
            grad = np.zeros(shape)
            np.put_along_axis(
                grad, np.expand_dims(idx, axis), np.expand_dims(g, axis), axis=axis
            )
            return grad

        return Var(out, _parents=(self,), _vjps=(vjp,))

    def softmax(self, axis=-1):
        shifted = self - np.max(self.value, axis=axis, keepdims=True)
        e = shifted.exp()
        return e / e.sum(axis=axis, keepdims=True)

    # -- autodiff ---------------------------------------------------------

    def backward(self):
        backward(self)


def _matmul_vjp_left(g, a, b):
    if b.ndim == 1:
        return np.outer(g, b) if a.ndim == 2 else g * b
    if a.ndim == 1:
        return g @ b.T
    return g @ np.swapaxes(b, -1, -2)


def _matmul_vjp_right(g, a, b):
    if a.ndim == 1:
        return np.outer(a, g) if b.ndim == 2 else g * a
    if b.ndim == 1:
        return a.T @ g
    return np.swapaxes(a, -1, -2) @ g


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def as_var(x) -> Var:
    return x if isinstance(x, Var) else Var(x)


def concat(vars_, axis=0):
    """Concatenate along `axis`, splitting the gradient back apart."""
    vars_ = [as_var(v) for v in vars_]
    sizes = [v.shape[axis] for v in vars_]
    offsets = np.cumsum([0] + sizes)

    def make_vjp(i):
        sl = [slice(None)] * vars_[i].value.ndim
        sl[axis] = slice(offsets[i], offsets[i + 1])
        return lambda g: g[tuple(sl)]

    return Var(
        np.concatenate([v.value for v in vars_], axis=axis),
        _parents=tuple(vars_),
        _vjps=tuple(make_vjp(i) for i in range(len(vars_))),
    )


def stack(vars_, axis=0):
    vars_ = [as_var(v) for v in vars_]

    def make_vjp(i):
        return lambda g: np.take(g, i, axis=axis)

    return Var(
        np.stack([v.value for v in vars_], axis=axis),
        _parents=tuple(vars_),
        _vjps=tuple(make_vjp(i) for i in range(len(vars_))),
    )


def gather(table: Var, index) -> Var:
    """Row lookup `table[index]` with scatter-add on the way back.

    `index` may have any shape; the result has shape
    ``index.shape + table.shape[1:]``.
    """
    index = np.asarray(index, dtype=np.intp)
    shape = table.shape

    def vjp(g):
        grad = np.zeros(shape)
        np.add.at(grad, index, g)
        return grad

    return Var(table.value[index], _parents=(table,), _vjps=(vjp,))


def backward(root: Var) -> None:
    """Accumulate gradients of a scalar `root` into every reachable Var."""
    if root.value.size != 1:
        raise ValueError("backward() requires a scalar root")

    order: list[Var] = []
    seen: set[int] = set()
    stack_ = [(root, False)]
    while stack_:
        node, expanded = stack_.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack_.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack_.append((p, False))

    root.grad = np.ones_like(root.value)
    for node in reversed(order):
        g = node.grad
        for parent, vjp in zip(node._parents, node._vjps):
            if not parent.requires_grad:
                continue
            contrib = vjp(g)
            if parent.grad is None:
                parent.grad = np.zeros_like(parent.value)
            parent.grad += contrib
