"""Dense spectral routines: symmetric eigendecomposition and truncated SVD.

The eigensolver is a cyclic Jacobi sweep, which is plenty accurate at the
matrix sizes this package works with and, unlike LAPACK drivers, gives a
deterministic eigenvector sign convention we control.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SpectralDecomposition", "symmetric_eig", "truncated_svd"]

_SYMMETRY_TOL = 1e-10
_OFF_DIAG_TOL = 1e-12
_MAX_SWEEPS = 100


class ConvergenceError(RuntimeError):
    """Jacobi iteration failed to reach the off-diagonal threshold."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs of a symmetric matrix, sorted by descending |eigenvalue|.

    `vectors[:, i]` is the unit eigenvector for `values[i]`, with its first
    nonzero coordinate made positive so decompositions are reproducible.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T

    def residual(self, a: np.ndarray) -> float:
        """Relative Frobenius error of V diag(w) V^T against `a`."""
        denom = max(np.linalg.norm(a), 1e-30)
        return float(np.linalg.norm(self.reconstruct() - a) / denom)


def symmetric_eig(a: np.ndarray) -> SpectralDecomposition:
    """Full eigendecomposition of a symmetric matrix via cyclic Jacobi.

    Raises ValueError for non-square or asymmetric (beyond 1e-10) input and
    ConvergenceError if 100 sweeps do not drive the off-diagonal mass below
    threshold.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    asym = np.abs(a - a.T).max() if a.size else 0.0
    if asym > _SYMMETRY_TOL:
        raise ValueError(f"matrix is asymmetric: max |A - A^T| = {asym:.3e}")

    n = a.shape[0]
    A = (a + a.T) / 2.0
    V = np.eye(n)
    scale = max(np.linalg.norm(A), 1.0)

    converged = False
    for _ in range(_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.square(A - np.diag(np.diag(A)))))
        if off <= _OFF_DIAG_TOL * scale:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # rotate rows/columns p and q
                Ap, Aq = A[p].copy(), A[q].copy()
                A[p] = c * Ap - s * Aq
                A[q] = s * Ap + c * Aq
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    else:
        converged = np.sqrt(np.sum(np.square(A - np.diag(np.diag(A))))) <= _OFF_DIAG_TOL * scale
    if not converged:
        raise ConvergenceError(f"Jacobi did not converge in {_MAX_SWEEPS} sweeps")

    values = np.diag(A).copy()
    order = np.argsort(-np.abs(values), kind="stable")
    values = values[order]
    vectors = V[:, order]
    for i in range(n):
        col = vectors[:, i]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0:
            vectors[:, i] = -col
    return SpectralDecomposition(values=values, vectors=vectors)


def truncated_svd(a: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Best rank-k factors (U, s, V) of `a`, so that U @ diag(s) @ V.T ~ a.

    Computed through the eigendecomposition of the smaller Gram matrix
    (A A^T or A^T A).  Singular vectors for numerically zero singular
    values are returned as zero columns.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    n, m = a.shape
    if not 1 <= k <= min(n, m):
        raise ValueError(f"k={k} out of range for a {n}x{m} matrix")

    if n <= m:
        dec = symmetric_eig(a @ a.T)
        u = dec.vectors[:, :k]
        s = np.sqrt(np.maximum(dec.values[:k], 0.0))
        v = np.zeros((m, k))
        for i in range(k):
            if s[i] > 1e-12 * max(s[0], 1e-30):
                v[:, i] = (a.T @ u[:, i]) / s[i]
    else:
        dec = symmetric_eig(a.T @ a)
        v = dec.vectors[:, :k]
        s = np.sqrt(np.maximum(dec.values[:k], 0.0))
        u = np.zeros((n, k))
        for i in range(k):
            if s[i] > 1e-12 * max(s[0], 1e-30):
                u[:, i] = (a @ v[:, i]) / s[i]
    return u, s, v
