"""Network-side representation learning, step by step.

Walk statistics to PPMI, similarity fusion, the two autoencoders, and the
spectral proximity embedding - each on a small planted network so the
printed numbers are interpretable.
"""

import numpy as np

from repositioner.netembed import (
    ProximityConfig,
    ProximityFactorization,
    SnfConfig,
    polynomial_of_matrix,
    ppmi_from_adjacency,
    snf_fuse,
    train_mda,
    train_sdae,
)
from repositioner.numerics import derive_rng

rng = derive_rng(7, "demo:networks")

# --- a two-cluster drug similarity network --------------------------------
n = 16
group = np.arange(n) % 2
adj = np.zeros((n, n))
for i in range(n):
    for j in range(i + 1, n):
        w = 0.8 if group[i] == group[j] else 0.05
        if rng.random() < w:
            adj[i, j] = adj[j, i] = round(0.5 + 0.5 * rng.random(), 3)

ppmi = ppmi_from_adjacency(adj, restart=0.98, steps=10)
print(f"PPMI: shape {ppmi.matrix.shape}, "
      f"{np.count_nonzero(ppmi.matrix)} nonzero entries, all >= 0: "
      f"{bool((ppmi.matrix >= 0).all())}")
same = ppmi.matrix[group[:, None] == group[None, :]].mean()
cross = ppmi.matrix[group[:, None] != group[None, :]].mean()
print(f"mean PPMI within cluster {same:.3f} vs across {cross:.3f}\n")

# --- fuse two noisy views of the same structure ----------------------------
view2 = adj.copy()
noise = rng.random((n, n)) * 0.3
view2 = np.maximum(view2 + (noise + noise.T) / 2, 0)
np.fill_diagonal(view2, 0)
fused = snf_fuse([adj, view2], SnfConfig(neighbors=4, iterations=8))
print(f"SNF fused two views -> symmetric: {np.allclose(fused, fused.T)}, "
      f"shape {fused.shape}\n")

# --- multi-network autoencoder over both PPMI views ------------------------
ppmis = [ppmi.matrix, ppmi_from_adjacency(view2).matrix]
mda, code = train_mda(ppmis, bottleneck=4, epochs=300, seed=3)
print(f"MDA: loss {mda.loss_history[0]:.2f} -> {mda.loss_history[-1]:.2f}, "
      f"shared code shape {code.shape}")

# --- denoising autoencoder on the fused network ----------------------------
sdae, features = train_sdae(fused, dims=[n, 6, n], corruption=0.2, lam=1e-4,
                            epochs=300, seed=3)
print(f"SDAE: loss {sdae.loss_history[0]:.2f} -> {sdae.loss_history[-1]:.2f}, "
      f"middle-layer features {features.shape}\n")

# --- arbitrary-order proximity embedding -----------------------------------
fact = ProximityFactorization(adj)          # one eigendecomposition ...
for order, weights in [(1, (1.0,)), (3, (0.5, 0.3, 0.2))]:
    config = ProximityConfig(weights=weights, dim=4)
    emb = fact.embed(config)                # ... reused across configs
    s = polynomial_of_matrix(adj, config)
    err = np.linalg.norm(s - emb.content @ emb.context.T) ** 2
    print(f"proximity order {order}: residual {err:.4f} "
          f"(optimal rank-4 residual {emb.residual_sq:.4f})")
