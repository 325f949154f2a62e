"""Stacked denoising autoencoder over one network representation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numerics import AdamState, FeedForwardNet, adam_step, derive_rng, ffn_forward_backward
from ..numerics.autodiff import Var, as_var

__all__ = ["SdaeModel", "train_sdae"]


@dataclass
class SdaeModel:
    """A trained denoising autoencoder plus its training trace."""

    net: FeedForwardNet
    dims: list[int]
    corruption: float
    loss_history: list[float] = field(default_factory=list)

    @property
    def middle_layer(self) -> int:
        # index of the narrowest layer output along the chain
        return int(np.argmin(self.dims[1:])) + 1

    def features(self, x: np.ndarray) -> np.ndarray:
        """Middle-layer activations on clean input."""
        h = as_var(np.asarray(x, dtype=np.float64))
        w_vars = [Var(w) for w in self.net.weights]
        b_vars = [Var(b) for b in self.net.biases]
        for l in range(self.middle_layer):
            from ..numerics.nn import apply_activation
            h = apply_activation(h @ w_vars[l] + b_vars[l], self.net.activations[l])
        return h.value

    def reconstruct(self, x: np.ndarray) -> np.ndarray:
        w_vars = [Var(w) for w in self.net.weights]
        b_vars = [Var(b) for b in self.net.biases]
        return self.net.forward(as_var(np.asarray(x, dtype=np.float64)), w_vars, b_vars).value


def train_sdae(ppmi, dims: list[int], corruption: float, lam: float, epochs: int,
               seed: int, lr: float = 1e-2) -> tuple[SdaeModel, np.ndarray]:
    """Train on corrupted rows against clean targets; returns (model, features).

    `dims` chains from the input width down to a bottleneck and back;
    corruption masks coordinates with the given rate during training only.
    The objective is ||x - x_hat||_F^2 + lam * sum_l ||W_l||_F^2.
    """
    x = ppmi.matrix if hasattr(ppmi, "matrix") else np.asarray(ppmi, dtype=np.float64)
    if not 0 <= corruption < 1:
        raise ValueError(f"corruption rate {corruption} outside [0, 1)")
    if dims[0] != x.shape[1] or dims[-1] != x.shape[1]:
        raise ValueError("dims must start and end at the input width")
    if lam < 0:
        raise ValueError("regularization must be >= 0")

    rng_init = derive_rng(seed, "sdae:init")
    activations = ["sigmoid"] * (len(dims) - 2) + ["identity"]
    net = FeedForwardNet.create(dims, activations, lam, rng_init)
    noise = derive_rng(seed, "sdae:noise")
    state = AdamState()
    history = []
    for _ in range(epochs):
        if corruption > 0:
            mask = noise.random(x.shape) >= corruption
            corrupted = x * mask
        else:
            corrupted = x
        value, w_grads, b_grads = ffn_forward_backward(net, corrupted, ("squared", x))
        params = {}
        grads = {}
        for l in range(len(net.weights)):
            params[f"W{l}"], grads[f"W{l}"] = net.weights[l], w_grads[l]
            params[f"b{l}"], grads[f"b{l}"] = net.biases[l], b_grads[l]
        adam_step(params, grads, state, lr=lr)
        history.append(value)
    model = SdaeModel(net=net, dims=list(dims), corruption=corruption, loss_history=history)
    return model, model.features(x)
