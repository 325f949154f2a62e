"""Similarity network fusion by iterative cross-diffusion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data.tables import NetworkLayer

__all__ = ["SnfConfig", "snf_fuse"]

_ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class SnfConfig:
    """Neighbourhood size and diffusion rounds for fusion."""

    neighbors: int = 10
    iterations: int = 10

    def __post_init__(self):
        if self.neighbors < 1:
            raise ValueError("neighbourhood size must be >= 1")
        if self.iterations < 1:
            raise ValueError("iteration count must be >= 1")


def _full_kernel(w: np.ndarray) -> np.ndarray:
    """Row-stochastic status kernel: half the mass on the diagonal.

    Rows with no off-diagonal mass put everything on the diagonal.
    """
    n = w.shape[0]
    out = np.zeros_like(w)
    for i in range(n):
        off = w[i].sum() - w[i, i]
        if off > 0:
            out[i] = w[i] / (2.0 * off)
            out[i, i] = 0.5
        else:
            out[i, i] = 1.0
    return out


def _knn_kernel(w: np.ndarray, k: int) -> np.ndarray:
    """Row-stochastic kernel restricted to each row's K strongest neighbours."""
    n = w.shape[0]
    s = np.zeros_like(w)
    for i in range(n):
        row = w[i].copy()
        row[i] = -np.inf
        nbr = np.argsort(-row, kind="stable")[:k]
        mass = w[i, nbr].sum()
        if mass > 0:
            s[i, nbr] = w[i, nbr] / mass
        else:
            s[i, i] = 1.0
    return s


def _check_row_stochastic(p: np.ndarray, where: str) -> None:
    err = np.abs(p.sum(axis=1) - 1.0).max()
    if err > _ROW_SUM_TOL:
        raise AssertionError(f"status matrix rows drifted from 1 by {err:.2e} ({where})")


def snf_fuse(layers, config: SnfConfig = SnfConfig()) -> np.ndarray:
    """Fuse >= 2 symmetric similarity matrices into one consensus matrix.

    Accepts NetworkLayer objects or raw square arrays sharing one
    vocabulary.  Each layer gets a full row-stochastic kernel (the status
    matrix) and a K-nearest-neighbour kernel; `iterations` rounds of
    cross-diffusion P <- S @ avg(others) @ S^T follow, re-normalizing
    after every round so status rows always sum to one.  The output is
    the symmetrized average of the final status matrices.
    """
    mats = []
    vocab = None
    for layer in layers:
        if isinstance(layer, NetworkLayer):
            if vocab is not None and layer.row_ids != vocab:
                raise ValueError(f"layer {layer.name!r} is on a different vocabulary")
            vocab = layer.row_ids
            mats.append(np.asarray(layer.matrix, dtype=np.float64))
        else:
            mats.append(np.asarray(layer, dtype=np.float64))
    if len(mats) < 2:
        raise ValueError("fusion needs at least two layers")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise ValueError("all layers must be square and equally sized")
        if np.abs(m - m.T).max() > 1e-10:
            raise ValueError("fusion inputs must be symmetric")

    status = [_full_kernel(m) for m in mats]
    sparse = [_knn_kernel(m, config.neighbors) for m in mats]
    for p in status:
        _check_row_stochastic(p, "initial")

    m_count = len(mats)
    for it in range(config.iterations):
        total = np.sum(status, axis=0)
        new = []
        for v in range(m_count):
            avg_others = (total - status[v]) / (m_count - 1)
            diffused = sparse[v] @ avg_others @ sparse[v].T
            diffused = (diffused + diffused.T) / 2.0
            renormed = _full_kernel(diffused)
            _check_row_stochastic(renormed, f"iteration {it}")
            new.append(renormed)
        status = new

    fused = np.sum(status, axis=0) / m_count
    return (fused + fused.T) / 2.0
