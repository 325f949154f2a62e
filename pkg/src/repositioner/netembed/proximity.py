"""Arbitrary-order proximity embedding through one eigendecomposition.

The proximity matrix is a positive-weighted polynomial of the adjacency;
its eigenvalues are the polynomial applied to the adjacency eigenvalues,
so any number of (order, weight, dimension) configurations reuse a single
decomposition, and the factorization is rank-optimal by Eckart-Young.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import SpectralDecomposition, symmetric_eig

__all__ = [
    "ProximityConfig",
    "ProximityEmbedding",
    "ProximityFactorization",
    "arbitrary_proximity_embed",
    "polynomial_of_matrix",
]


@dataclass(frozen=True)
class ProximityConfig:
    """Polynomial order, per-power weights (all > 0) and embedding width."""

    weights: tuple[float, ...]
    dim: int

    def __post_init__(self):
        if len(self.weights) < 1:
            raise ValueError("order must be >= 1")
        if any(w <= 0 for w in self.weights):
            raise ValueError("all polynomial weights must be > 0")
        if self.dim < 1:
            raise ValueError("embedding dimension must be >= 1")

    @property
    def order(self) -> int:
        return len(self.weights)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Evaluate the polynomial at eigenvalues."""
        out = np.zeros_like(values)
        power = np.ones_like(values)
        for w in self.weights:
            power = power * values
            out = out + w * power
        return out


@dataclass
class ProximityEmbedding:
    """Content (U) and context (V) factors of the proximity polynomial."""

    content: np.ndarray
    context: np.ndarray
    selected_values: np.ndarray
    residual_sq: float

    @property
    def dim(self) -> int:
        return self.content.shape[1]


class ProximityFactorization:
    """One eigendecomposition of an adjacency, reusable across configs."""

    def __init__(self, adjacency: np.ndarray):
        self.adjacency = np.asarray(adjacency, dtype=np.float64)
        self.decomposition: SpectralDecomposition = symmetric_eig(self.adjacency)

    def embed(self, config: ProximityConfig) -> ProximityEmbedding:
        n = self.adjacency.shape[0]
        if config.dim > n:
            raise ValueError(f"embedding dimension {config.dim} exceeds node count {n}")
        f_vals = config.apply(self.decomposition.values)
        order = np.argsort(-np.abs(f_vals), kind="stable")
        keep = order[: config.dim]
        rest = order[config.dim:]
        vecs = self.decomposition.vectors[:, keep]
        vals = f_vals[keep]
        root = np.sqrt(np.abs(vals))
        content = vecs * root
        context = vecs * (np.sign(vals) * root)
        residual_sq = float(np.sum(f_vals[rest] ** 2))
        return ProximityEmbedding(content=content, context=context,
                                  selected_values=vals, residual_sq=residual_sq)


def polynomial_of_matrix(adjacency: np.ndarray, config: ProximityConfig) -> np.ndarray:
    """Dense w1*M + w2*M^2 + ... + wl*M^l, for oracles and small problems."""
    m = np.asarray(adjacency, dtype=np.float64)
    out = np.zeros_like(m)
    power = np.eye(m.shape[0])
    for w in config.weights:
        power = power @ m
        out = out + w * power
    return out


def arbitrary_proximity_embed(adjacency: np.ndarray, config: ProximityConfig) -> ProximityEmbedding:
    """Embed one symmetric adjacency under one proximity configuration."""
    return ProximityFactorization(adjacency).embed(config)
