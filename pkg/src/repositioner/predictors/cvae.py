"""Collective variational autoencoder for drug-disease recommendation.

One Gaussian-latent trunk is shared by two reconstruction pathways: drug
feature rows (squared error) and drug-disease association rows (per-entry
logistic), coupled through per-pathway input/output adapters.  Training
alternates epochs between the pathways.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data.entities import EntityRef, NotFoundError
from ..numerics import AdamState, Var, adam_step, derive_rng, glorot
from .ranking import RankedList

__all__ = ["CvaeModel", "train_cvae", "cvae_recommend", "cvae_loss_and_grads", "kl_divergence"]

_TRUNK_KEYS = ("enc.W", "enc.b", "mu.W", "mu.b", "logvar.W", "logvar.b", "dec.W", "dec.b")


@dataclass
class CvaeModel:
    params: dict[str, np.ndarray]
    latent_dim: int
    feature_dim: int
    n_diseases: int
    hidden: int
    drug_ids: list[str]
    disease_ids: list[str]
    y: np.ndarray
    loss_history: list[float] = field(default_factory=list)

    def scores(self) -> np.ndarray:
        """Deterministic reconstructed association probabilities (z = mu)."""
        leaves = {k: Var(v) for k, v in self.params.items()}
        logits = _decode_y(leaves, _posterior_mean(leaves, self.y, "y"))
        return _sigmoid(logits.value)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def kl_divergence(mu: np.ndarray, logvar: np.ndarray) -> float:
    """KL(N(mu, diag exp(logvar)) || N(0, I)); zero exactly at the standard normal."""
    return float(-0.5 * np.sum(1.0 + logvar - mu**2 - np.exp(logvar)))


def init_cvae_params(feature_dim: int, n_diseases: int, hidden: int, latent: int,
                     seed: int) -> dict[str, np.ndarray]:
    rng = derive_rng(seed, "cvae:init")
    p = {
        "adapt_x.W": glorot(rng, feature_dim, hidden), "adapt_x.b": np.zeros(hidden),
        "adapt_y.W": glorot(rng, n_diseases, hidden), "adapt_y.b": np.zeros(hidden),
        "enc.W": glorot(rng, hidden, hidden), "enc.b": np.zeros(hidden),
        "mu.W": glorot(rng, hidden, latent), "mu.b": np.zeros(latent),
        "logvar.W": glorot(rng, hidden, latent), "logvar.b": np.zeros(latent),
        "dec.W": glorot(rng, latent, hidden), "dec.b": np.zeros(hidden),
        "out_x.W": glorot(rng, hidden, feature_dim), "out_x.b": np.zeros(feature_dim),
        "out_y.W": glorot(rng, hidden, n_diseases), "out_y.b": np.zeros(n_diseases),
    }
    return p


def _encode(leaves, batch: np.ndarray, pathway: str):
    adapted = (Var(batch) @ leaves[f"adapt_{pathway}.W"] + leaves[f"adapt_{pathway}.b"]).tanh()
    h = (adapted @ leaves["enc.W"] + leaves["enc.b"]).tanh()
    mu = h @ leaves["mu.W"] + leaves["mu.b"]
    logvar = h @ leaves["logvar.W"] + leaves["logvar.b"]
    return mu, logvar


def _posterior_mean(leaves, batch, pathway):
    mu, _ = _encode(leaves, batch, pathway)
    return mu


def _decode_y(leaves, z):
    h = (z @ leaves["dec.W"] + leaves["dec.b"]).tanh()
    return h @ leaves["out_y.W"] + leaves["out_y.b"]


def _decode_x(leaves, z):
    h = (z @ leaves["dec.W"] + leaves["dec.b"]).tanh()
    return h @ leaves["out_x.W"] + leaves["out_x.b"]


def cvae_loss_and_grads(params, batch: np.ndarray, pathway: str, beta: float,
                        noise: np.ndarray):
    """Evidence-bound loss for one pathway with fixed reparameterization noise."""
    leaves = {k: Var(v, requires_grad=True) for k, v in params.items()}
    mu, logvar = _encode(leaves, batch, pathway)
    z = mu + (logvar * 0.5).exp() * noise
    kl = (-0.5) * (1.0 + logvar - mu**2 - logvar.exp()).sum()
    if pathway == "x":
        recon = ((_decode_x(leaves, z) - batch) ** 2).sum()
    elif pathway == "y":
        logits = _decode_y(leaves, z)
        recon = (logits.softplus() - Var(batch) * logits).sum()
    else:
        raise ValueError(f"unknown pathway {pathway!r}")
    loss = recon + beta * kl
    value = float(loss.value)
    if not np.isfinite(value):
        raise FloatingPointError("non-finite evidence-bound loss")
    loss.backward()
    return value, {k: v.grad for k, v in leaves.items() if v.grad is not None}


def train_cvae(x, y, latent_dim: int, beta_kl: float, epochs: int, seed: int,
               lr: float = 1e-2, hidden: int = 32, pathways=("x", "y"),
               drug_ids: list[str] | None = None,
               disease_ids: list[str] | None = None) -> CvaeModel:
    """Alternating-pathway training of the collective VAE.

    The KL weight anneals linearly from 0 to `beta_kl` over the first half
    of training.  Feature rows and association rows must index the same
    drug vocabulary.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[0] != y.shape[0]:
        raise ValueError("feature matrix and association matrix index different drug sets")
    n, f = x.shape
    m = y.shape[1]
    if latent_dim >= min(f, m):
        raise ValueError(f"latent dimension {latent_dim} must be < min(input dims) = {min(f, m)}")
    if not pathways:
        raise ValueError("at least one pathway required")

    params = init_cvae_params(f, m, hidden, latent_dim, seed)
    state = AdamState()
    noise_rng = derive_rng(seed, "cvae:noise")
    history = []
    half = max(1, epochs // 2)
    for epoch in range(epochs):
        pathway = pathways[epoch % len(pathways)]
        beta = beta_kl * min(1.0, (epoch + 1) / half)
        batch = x if pathway == "x" else y
        noise = noise_rng.standard_normal((n, latent_dim))
        value, grads = cvae_loss_and_grads(params, batch, pathway, beta, noise)
        adam_step(params, grads, state, lr=lr)
        history.append(value)

    return CvaeModel(params=params, latent_dim=latent_dim, feature_dim=f,
                     n_diseases=m, hidden=hidden,
                     drug_ids=list(drug_ids) if drug_ids else [str(i) for i in range(n)],
                     disease_ids=list(disease_ids) if disease_ids else [str(j) for j in range(m)],
                     y=y, loss_history=history)


def cvae_recommend(model: CvaeModel, disease: EntityRef | str, top_n: int,
                   drug_refs: dict[str, EntityRef] | None = None) -> RankedList:
    """Rank drugs for one disease by reconstructed association score.

    Drugs already associated with the disease are excluded: this is a
    novel-indication ranking.
    """
    disease_id = disease.id if isinstance(disease, EntityRef) else disease
    try:
        col = model.disease_ids.index(disease_id)
    except ValueError:
        raise NotFoundError(f"unknown disease {disease_id!r}") from None
    scores = model.scores()[:, col]
    query = disease if isinstance(disease, EntityRef) else EntityRef(disease_id, disease_id, "disease")
    scored = []
    for i, drug_id in enumerate(model.drug_ids):
        if model.y[i, col] == 1.0:
            continue
        ref = (drug_refs or {}).get(drug_id) or EntityRef(drug_id, drug_id, "drug")
        scored.append((ref, float(scores[i])))
    return RankedList.from_scores(query, scored, top_n, model_id="deepdr")
