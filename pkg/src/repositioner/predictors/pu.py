"""Positive-unlabeled low-rank completion of a drug-target matrix.

Observed interactions get unit weight; every unobserved cell is pulled
toward zero with weight epsilon < 1, and the bilinear scoring form is
x_d^T P O^T x_t over drug/target feature vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data.entities import NotFoundError
from ..numerics import AdamState, Var, adam_step, derive_rng

__all__ = ["PuCompletionModel", "pu_complete", "pu_score", "pu_objective",
           "pu_objective_and_grads"]


@dataclass
class PuCompletionModel:
    p: np.ndarray
    o: np.ndarray
    eps: float
    lam: float
    drug_features: np.ndarray
    target_features: np.ndarray
    drug_ids: list[str] = field(default_factory=list)
    target_ids: list[str] = field(default_factory=list)
    final_objective: float = float("nan")
    objective_history: list[float] = field(default_factory=list)

    def score_matrix(self) -> np.ndarray:
        return self.drug_features @ self.p @ self.o.T @ self.target_features.T


def pu_objective(m: np.ndarray, xd: np.ndarray, xt: np.ndarray, p: np.ndarray,
                 o: np.ndarray, eps: float, lam: float) -> float:
    """Independent cell-by-cell evaluation of the weighted completion objective.

    Kept deliberately naive (explicit loops over the observed and
    unobserved index sets) so it can serve as an oracle for the
    vectorized trainer.
    """
    core = p @ o.T
    total = 0.0
    n_d, n_t = m.shape
    for i in range(n_d):
        row = xd[i] @ core
        for j in range(n_t):
            r = m[i, j] - float(row @ xt[j])
            if m[i, j] == 1.0:
                total += r * r
            else:
                total += eps * r * r
    total += lam * (float(np.sum(p * p)) + float(np.sum(o * o)))
    return total


def pu_objective_and_grads(m, xd, xt, p, o, eps, lam):
    """Vectorized objective and exact gradients for P and O."""
    pv = Var(p, requires_grad=True)
    ov = Var(o, requires_grad=True)
    scores = Var(xd) @ pv @ ov.T @ Var(xt).T
    weights = np.where(m == 1.0, 1.0, eps)
    loss = (Var(weights) * (Var(m) - scores) ** 2).sum() \
        + lam * ((pv**2).sum() + (ov**2).sum())
    value = float(loss.value)
    if not np.isfinite(value):
        raise FloatingPointError("non-finite completion objective")
    loss.backward()
    return value, pv.grad, ov.grad


def pu_complete(m, xd, xt, k: int, eps: float, lam: float, epochs: int, seed: int,
                lr: float = 1e-2, drug_ids=None, target_ids=None) -> PuCompletionModel:
    """Gradient descent on the exact weighted objective.

    The observed set is the ones of `m`; everything else is unobserved and
    weighted by eps.  eps must lie in (0, 1]; values below 1 are the
    positive-unlabeled regime.  k is capped at half the smaller side.
    """
    m = np.asarray(m, dtype=np.float64)
    xd = np.asarray(xd, dtype=np.float64)
    xt = np.asarray(xt, dtype=np.float64)
    n_d, n_t = m.shape
    if xd.shape[0] != n_d or xt.shape[0] != n_t:
        raise ValueError("feature tables do not match the association matrix")
    if not 1 <= k <= min(n_d, n_t) // 2:
        raise ValueError(f"k={k} out of range (1..{min(n_d, n_t) // 2})")
    if not 0 < eps <= 1:
        raise ValueError(f"epsilon {eps} outside (0, 1]")
    if lam < 0:
        raise ValueError("lambda must be >= 0")

    rng = derive_rng(seed, "pu:init")
    p = 0.1 * rng.standard_normal((xd.shape[1], k))
    o = 0.1 * rng.standard_normal((xt.shape[1], k))
    params = {"p": p, "o": o}
    state = AdamState()
    history = []
    for _ in range(epochs):
        value, gp, go = pu_objective_and_grads(m, xd, xt, params["p"], params["o"], eps, lam)
        adam_step(params, {"p": gp, "o": go}, state, lr=lr)
        history.append(value)
    final, _, _ = pu_objective_and_grads(m, xd, xt, params["p"], params["o"], eps, lam)
    return PuCompletionModel(
        p=params["p"], o=params["o"], eps=eps, lam=lam,
        drug_features=xd, target_features=xt,
        drug_ids=list(drug_ids) if drug_ids else [],
        target_ids=list(target_ids) if target_ids else [],
        final_objective=final, objective_history=history)


def pu_score(model: PuCompletionModel, drug, target) -> float:
    """Bilinear interaction score for one (drug, target) pair.

    Accepts integer row/column indices or, when the model carries
    vocabularies, entity ids.
    """
    if isinstance(drug, str):
        if drug not in model.drug_ids:
            raise NotFoundError(f"unknown drug {drug!r}")
        drug = model.drug_ids.index(drug)
    if isinstance(target, str):
        if target not in model.target_ids:
            raise NotFoundError(f"unknown target {target!r}")
        target = model.target_ids.index(target)
    xd = model.drug_features[drug]
    xt = model.target_features[target]
    return float(xd @ model.p @ model.o.T @ xt)
