"""Random-surf co-occurrence statistics and positive PMI matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data.tables import NetworkLayer

__all__ = ["PpmiMatrix", "random_surf_ppmi", "ppmi_from_adjacency"]


@dataclass
class PpmiMatrix:
    """Positive PMI over one vocabulary, plus the walk parameters used."""

    matrix: np.ndarray
    source: str
    restart: float
    steps: int

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if not np.isfinite(self.matrix).all():
            raise ValueError("PPMI matrix has non-finite entries")
        if self.matrix.size and self.matrix.min() < 0:
            raise ValueError("PPMI entries must be non-negative")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def ppmi_from_adjacency(adj: np.ndarray, restart: float = 0.98, steps: int = 10,
                        source: str = "") -> PpmiMatrix:
    """PPMI of the restart-augmented lazy walk on a square adjacency.

    The one-step matrix is P = restart * T + (1 - restart) * I with T the
    row-normalized adjacency; rows with no outgoing weight stay all-zero
    (no teleport), so isolated nodes end up with zero PPMI rows and
    columns.  Co-occurrence C accumulates P^1 .. P^steps, and
    PPMI_ij = max(0, log(C_ij * sum(C) / (rowsum_i * colsum_j))), with
    cells of zero co-occurrence pinned to zero.
    """
    adj = np.asarray(adj, dtype=np.float64)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ValueError("adjacency must be square")
    if not 0 < restart <= 1:
        raise ValueError(f"restart probability {restart} outside (0, 1]")
    if steps < 1:
        raise ValueError("walk length must be >= 1")

    n = adj.shape[0]
    rowsum = adj.sum(axis=1)
    alive = rowsum > 0
    p = np.zeros((n, n))
    if alive.any():
        p[alive] = restart * adj[alive] / rowsum[alive, None]
        p[alive, alive] += 1.0 - restart

    cooc = np.zeros((n, n))
    pk = np.eye(n)
    for _ in range(steps):
        pk = pk @ p
        cooc += pk

    total = cooc.sum()
    ppmi = np.zeros((n, n))
    if total > 0:
        rows = cooc.sum(axis=1)
        cols = cooc.sum(axis=0)
        nz = cooc > 0
        denom = rows[:, None] * cols[None, :]
        ratio = np.ones_like(cooc)
        ratio[nz] = cooc[nz] * total / denom[nz]
        ppmi = np.where(nz, np.log(ratio), 0.0)
        np.maximum(ppmi, 0.0, out=ppmi)
    return PpmiMatrix(matrix=ppmi, source=source, restart=restart, steps=steps)


def random_surf_ppmi(layer: NetworkLayer, restart: float = 0.98, steps: int = 10) -> PpmiMatrix:
    """PPMI representation of one square network layer."""
    if not layer.square:
        raise ValueError(f"layer {layer.name!r} is not square")
    return ppmi_from_adjacency(layer.matrix, restart=restart, steps=steps, source=layer.name)
