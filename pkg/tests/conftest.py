"""Session-wide fixtures: one synthetic dataset, one trained registry."""

import pytest

from repositioner.data import load_dataset
from repositioner.fixtures import generate_dataset
from repositioner.service import MODEL_KINDS, Registry, save_artifact, train_model

FIXTURE_SEED = 11
TRAIN_SEED = 5


@pytest.fixture(scope="session")
def dataset_ledger(tmp_path_factory):
    root = tmp_path_factory.mktemp("platform-data")
    ledger = generate_dataset(root, seed=FIXTURE_SEED)
    return load_dataset(ledger["manifest"]), ledger


@pytest.fixture(scope="session")
def platform_dataset(dataset_ledger):
    return dataset_ledger[0]


@pytest.fixture(scope="session")
def trained_artifacts(tmp_path_factory, platform_dataset):
    """All seven model kinds trained once and persisted."""
    artifacts = tmp_path_factory.mktemp("artifacts")
    versions = {}
    for kind in MODEL_KINDS:
        payload = train_model(kind, platform_dataset, seed=TRAIN_SEED)
        versions[kind] = save_artifact(payload, artifacts)
    return artifacts, versions


@pytest.fixture(scope="session")
def registry(platform_dataset, trained_artifacts):
    artifacts, _ = trained_artifacts
    return Registry(platform_dataset, artifacts)
