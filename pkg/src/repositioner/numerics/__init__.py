from .autodiff import Var, as_var, concat, stack, gather, backward
from .linalg import SpectralDecomposition, symmetric_eig, truncated_svd
from .nn import (
    AdamState,
    FeedForwardNet,
    adam_step,
    derive_rng,
    ffn_forward_backward,
    finite_diff_check,
    glorot,
)

__all__ = [
    "Var", "as_var", "concat", "stack", "gather", "backward",
    "SpectralDecomposition", "symmetric_eig", "truncated_svd",
    "AdamState", "FeedForwardNet", "adam_step", "derive_rng",
    "ffn_forward_backward", "finite_diff_check", "glorot",
]
