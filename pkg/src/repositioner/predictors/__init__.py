from .ranking import RankedList, compute_auroc, hits_at_k
from .cvae import CvaeModel, cvae_loss_and_grads, cvae_recommend, kl_divergence, train_cvae
from .pu import (
    PuCompletionModel,
    pu_complete,
    pu_objective,
    pu_objective_and_grads,
    pu_score,
)
from .hetgnn import (
    HetGnnConfig,
    HetGraph,
    hetgnn_embed,
    hetgnn_link_loss,
    init_hetgnn_params,
    train_hetgnn,
)
from .skipgram import metapath_walks, skipgram_loss_and_grads, skipgram_refine, skipgram_softmax
from .classifier import LinearClassifier, train_classifier
