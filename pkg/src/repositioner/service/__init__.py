from .artifacts import (
    EXPLANATION_STYLE,
    MODEL_KINDS,
    ArtifactError,
    ArtifactPayload,
    latest_version,
    list_versions,
    load_artifact,
    save_artifact,
)
from .pipelines import DEFAULT_HYPERPARAMETERS, build_predictor, evaluate_model, train_model
from .registry import CenterMismatchError, NotTrainedError, Registry, RegistrySnapshot
from .api import TOP_N_CAP, create_app
