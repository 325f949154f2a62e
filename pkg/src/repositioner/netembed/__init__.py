from .ppmi import PpmiMatrix, ppmi_from_adjacency, random_surf_ppmi
from .snf import SnfConfig, snf_fuse
from .mda import MdaModel, mda_loss_and_grads, train_mda
from .sdae import SdaeModel, train_sdae
from .proximity import (
    ProximityConfig,
    ProximityEmbedding,
    ProximityFactorization,
    arbitrary_proximity_embed,
    polynomial_of_matrix,
)
