"""Feed-forward stacks, the Adam optimizer and gradient checking.

Parameters live in plain ``dict[str, np.ndarray]`` containers so model
state is trivially serializable.  All randomness flows through
`derive_rng`, which keys independent streams off a 64-bit seed and a
component label: two models that share a seed but differ in label get
unrelated, reproducible streams.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .autodiff import Var, as_var

__all__ = [
    "derive_rng",
    "glorot",
    "FeedForwardNet",
    "ffn_forward_backward",
    "AdamState",
    "adam_step",
    "finite_diff_check",
]

_ACTIVATIONS = ("sigmoid", "tanh", "relu", "identity")


def derive_rng(seed: int, label: str = "") -> np.random.Generator:
    """Deterministic per-component RNG stream for a (seed, label) pair."""
    return np.random.default_rng(np.random.SeedSequence((int(seed) & (2**64 - 1), zlib.crc32(label.encode()))))


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int, shape=None) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape if shape is not None else (fan_in, fan_out))


def apply_activation(x: Var, name: str) -> Var:
    if name == "sigmoid":
        return x.sigmoid()
    if name == "tanh":
        return x.tanh()
    if name == "relu":
        return x.relu()
    if name == "identity":
        return x
    raise ValueError(f"unknown activation {name!r}; expected one of {_ACTIVATIONS}")


@dataclass
class FeedForwardNet:
    """A stack of dense layers (W, b, activation) with an L2 penalty weight.

    Layer l maps dimension dims[l] -> dims[l+1]; adjacent dimensions must
    chain, and lam >= 0.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activations: list[str]
    lam: float = 0.0

    def __post_init__(self):
        if not (len(self.weights) == len(self.biases) == len(self.activations)):
            raise ValueError("weights, biases and activations must have equal length")
        if self.lam < 0:
            raise ValueError("regularization coefficient must be >= 0")
        for act in self.activations:
            if act not in _ACTIVATIONS:
                raise ValueError(f"unknown activation {act!r}")
        for l in range(len(self.weights) - 1):
            if self.weights[l].shape[1] != self.weights[l + 1].shape[0]:
                raise ValueError(f"layer {l} output dim {self.weights[l].shape[1]} does not chain "
                                 f"into layer {l + 1} input dim {self.weights[l + 1].shape[0]}")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if b.shape != (w.shape[1],):
                raise ValueError(f"layer {l} bias shape {b.shape} does not match W columns {w.shape[1]}")

    @classmethod
    def create(cls, dims: list[int], activations: list[str], lam: float, rng: np.random.Generator):
        weights = [glorot(rng, dims[l], dims[l + 1]) for l in range(len(dims) - 1)]
        biases = [np.zeros(dims[l + 1]) for l in range(len(dims) - 1)]
        return cls(weights=weights, biases=biases, activations=list(activations), lam=lam)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    def forward(self, x: Var, w_vars: list[Var], b_vars: list[Var]) -> Var:
        h = x
        for w, b, act in zip(w_vars, b_vars, self.activations):
            h = apply_activation(h @ w + b, act)
        return h


def ffn_forward_backward(net: FeedForwardNet, batch: np.ndarray, loss_spec):
    """Loss and exact gradients of a feed-forward net on one batch.

    loss_spec is ("squared", target) or ("logistic", target); the
    regularized objective adds lam * sum_l ||W_l||_F^2.  Returns
    (loss, weight gradients, bias gradients).
    """
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != net.input_dim:
        raise ValueError(f"batch of shape {batch.shape} does not match input dim {net.input_dim}")
    kind, target = loss_spec
    target = np.asarray(target, dtype=np.float64)

    w_vars = [Var(w, requires_grad=True) for w in net.weights]
    b_vars = [Var(b, requires_grad=True) for b in net.biases]
    out = net.forward(as_var(batch), w_vars, b_vars)
    if kind == "squared":
        loss = ((out - target) ** 2).sum()
    elif kind == "logistic":
        # BCE with logits: mean over entries of softplus(z) - y*z
        loss = (out.softplus() - as_var(target) * out).mean()
    else:
        raise ValueError(f"unknown loss kind {kind!r}")
    if net.lam:
        for w in w_vars:
            loss = loss + net.lam * (w**2).sum()
    value = float(loss.value)
    if not np.isfinite(value):
        raise FloatingPointError("non-finite loss")
    loss.backward()
    return value, [w.grad for w in w_vars], [b.grad for b in b_vars]


@dataclass
class AdamState:
    """First/second moment accumulators and per-parameter step counters."""

    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: dict = field(default_factory=dict)


def adam_step(params: dict, grads: dict, state: AdamState, lr: float = 1e-3,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
    """One Adam update, in place, for every key present in `grads`."""
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    for key, g in grads.items():
        p = params[key]
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter {key!r} {p.shape}")
        if key not in state.m:
            state.m[key] = np.zeros_like(p)
            state.v[key] = np.zeros_like(p)
            state.t[key] = 0
        state.t[key] += 1
        t = state.t[key]
        state.m[key] = beta1 * state.m[key] + (1 - beta1) * g
        state.v[key] = beta2 * state.v[key] + (1 - beta2) * g * g
        m_hat = state.m[key] / (1 - beta1**t)
        v_hat = state.v[key] / (1 - beta2**t)
        p -= lr * m_hat / (np.sqrt(v_hat) + eps)


def finite_diff_check(fn, point, analytic, h: float = 1e-5) -> float:
    """Max relative error of analytic gradients against central differences.

    `fn` maps a list of arrays to a scalar; `point` and `analytic` are
    parallel lists of arrays.  The relative error denominator is
    max(1, |analytic coordinate|).
    """
    point = [np.asarray(p, dtype=np.float64).copy() for p in point]
    analytic = [np.asarray(a, dtype=np.float64) for a in analytic]
    worst = 0.0
    for arr, grad in zip(point, analytic):
        flat = arr.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = fn(point)
            flat[i] = orig - h
            down = fn(point)
            flat[i] = orig
            if not (np.isfinite(up) and np.isfinite(down)):
                raise FloatingPointError("non-finite evaluation during finite differences")
            numeric = (up - down) / (2 * h)
            err = abs(numeric - gflat[i]) / max(1.0, abs(gflat[i]))
            worst = max(worst, err)
    return worst
