"""Multi-network autoencoder: per-network encoders onto a shared bottleneck."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numerics import AdamState, Var, adam_step, derive_rng, glorot
from ..numerics.nn import apply_activation

__all__ = ["MdaModel", "mda_loss_and_grads", "train_mda"]


@dataclass
class MdaModel:
    """Per-network encoder/decoder stacks around one shared code.

    Encoders all end at the bottleneck dimension; the shared drug code is
    the mean of the per-network encoder outputs.  `params` keys follow
    `enc{i}.W{l}` / `dec{i}.W{l}` (and `.b{l}`).
    """

    params: dict[str, np.ndarray]
    n_networks: int
    dims: list[int]
    bottleneck: int
    activation: str = "sigmoid"
    loss_history: list[float] = field(default_factory=list)
    per_network_history: list[list[float]] = field(default_factory=list)

    def encode(self, ppmis: list[np.ndarray]) -> np.ndarray:
        """Shared bottleneck activations, one row per drug."""
        leaves = {k: Var(v) for k, v in self.params.items()}
        return _shared_code(leaves, ppmis, self.dims, self.activation).value

    def reconstruct(self, ppmis: list[np.ndarray]) -> list[np.ndarray]:
        leaves = {k: Var(v) for k, v in self.params.items()}
        z = _shared_code(leaves, ppmis, self.dims, self.activation)
        return [_decode(leaves, z, i, self.dims, self.activation).value
                for i in range(self.n_networks)]


def _encoder_dims(n: int, hidden: tuple[int, ...], bottleneck: int) -> list[int]:
    return [n, *hidden, bottleneck]


def _encode_one(leaves, x: Var, i: int, dims: list[int], activation: str) -> Var:
    h = x
    for l in range(len(dims) - 1):
        h = apply_activation(h @ leaves[f"enc{i}.W{l}"] + leaves[f"enc{i}.b{l}"], activation)
    return h


def _shared_code(leaves, ppmis, dims, activation) -> Var:
    codes = [_encode_one(leaves, Var(p), i, dims, activation) for i, p in enumerate(ppmis)]
    z = codes[0]
    for c in codes[1:]:
        z = z + c
    return z / float(len(codes))


def _decode(leaves, z: Var, i: int, dims: list[int], activation: str) -> Var:
    h = z
    rev = list(reversed(dims))
    for l in range(len(rev) - 1):
        act = activation if l < len(rev) - 2 else "identity"
        h = apply_activation(h @ leaves[f"dec{i}.W{l}"] + leaves[f"dec{i}.b{l}"], act)
    return h


def mda_loss_and_grads(params: dict[str, np.ndarray], ppmis: list[np.ndarray],
                       dims: list[int], activation: str = "sigmoid"):
    """Summed reconstruction loss, gradients, and the per-network terms."""
    leaves = {k: Var(v, requires_grad=True) for k, v in params.items()}
    z = _shared_code(leaves, ppmis, dims, activation)
    loss = None
    per_network = []
    for i, x in enumerate(ppmis):
        recon = _decode(leaves, z, i, dims, activation)
        term = ((recon - x) ** 2).sum()
        per_network.append(float(term.value))
        loss = term if loss is None else loss + term
    value = float(loss.value)
    if not np.isfinite(value):
        raise FloatingPointError("non-finite reconstruction loss")
    loss.backward()
    return value, {k: v.grad for k, v in leaves.items() if v.grad is not None}, per_network


def init_mda_params(n_networks: int, dims: list[int], seed: int) -> dict[str, np.ndarray]:
    # every network starts from the same draw: identical inputs then evolve
    # in lockstep, which keeps per-network losses comparable
    rng = derive_rng(seed, "mda:init")
    enc = [(glorot(rng, dims[l], dims[l + 1]), np.zeros(dims[l + 1]))
           for l in range(len(dims) - 1)]
    rev = list(reversed(dims))
    dec = [(glorot(rng, rev[l], rev[l + 1]), np.zeros(rev[l + 1]))
           for l in range(len(rev) - 1)]
    params: dict[str, np.ndarray] = {}
    for i in range(n_networks):
        for l, (w, b) in enumerate(enc):
            params[f"enc{i}.W{l}"] = w.copy()
            params[f"enc{i}.b{l}"] = b.copy()
        for l, (w, b) in enumerate(dec):
            params[f"dec{i}.W{l}"] = w.copy()
            params[f"dec{i}.b{l}"] = b.copy()
    return params


def train_mda(ppmis, bottleneck: int, epochs: int, seed: int, lr: float = 1e-2,
              hidden: tuple[int, ...] = (), activation: str = "sigmoid"):
    """Train the multi-network autoencoder; returns (model, drug code matrix).

    All PPMI inputs must share the drug count n, and the bottleneck must be
    strictly smaller than n unless the caller is deliberately probing the
    full-rank regime.
    """
    mats = [p.matrix if hasattr(p, "matrix") else np.asarray(p, dtype=np.float64) for p in ppmis]
    if not mats:
        raise ValueError("no input networks")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise ValueError("all PPMI matrices must share one vocabulary")
    if bottleneck < 1 or bottleneck > n:
        raise ValueError(f"bottleneck {bottleneck} out of range for n={n}")

    dims = _encoder_dims(n, tuple(hidden), bottleneck)
    params = init_mda_params(len(mats), dims, seed)
    state = AdamState()
    history = []
    per_network = []
    for _ in range(epochs):
        value, grads, terms = mda_loss_and_grads(params, mats, dims, activation)
        adam_step(params, grads, state, lr=lr)
        history.append(value)
        per_network.append(terms)
    model = MdaModel(params=params, n_networks=len(mats), dims=dims,
                     bottleneck=bottleneck, activation=activation,
                     loss_history=history, per_network_history=per_network)
    return model, model.encode(mats)
