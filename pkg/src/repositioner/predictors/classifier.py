"""L2-regularized logistic head over concatenated pair embeddings.

Stands in for the cascade-forest stage of the proximity pipeline; the
interface is a plain fit/predict pair so a different classifier can be
swapped in without touching the callers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numerics import AdamState, Var, adam_step, derive_rng

__all__ = ["LinearClassifier", "train_classifier"]


@dataclass
class LinearClassifier:
    weights: np.ndarray
    bias: float
    lam: float
    loss_history: list[float] = field(default_factory=list)

    def decision(self, features: np.ndarray) -> np.ndarray:
        return np.asarray(features) @ self.weights + self.bias

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        z = self.decision(features)
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out


def _loss_and_grads(params, x, y, lam):
    w = Var(params["w"], requires_grad=True)
    b = Var(params["b"], requires_grad=True)
    logits = Var(x) @ w + b
    loss = (logits.softplus() - Var(y) * logits).mean() + lam * (w**2).sum()
    value = float(loss.value)
    loss.backward()
    return value, {"w": w.grad, "b": b.grad}


def train_classifier(features, labels, lam: float, epochs: int, seed: int,
                     lr: float = 5e-2) -> LinearClassifier:
    """Fit logistic weights by full-batch Adam on mean BCE + lam*||w||^2."""
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise ValueError("features must be (n, d) with one label per row")
    if len(np.unique(y)) < 2:
        raise ValueError("training labels are a single class")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    rng = derive_rng(seed, "classifier:init")
    params = {"w": 0.01 * rng.standard_normal(x.shape[1]), "b": np.zeros(())}
    state = AdamState()
    history = []
    for _ in range(epochs):
        value, grads = _loss_and_grads(params, x, y, lam)
        adam_step(params, grads, state, lr=lr)
        history.append(value)
    return LinearClassifier(weights=params["w"], bias=float(params["b"]),
                            lam=lam, loss_history=history)
