"""Immutable registry snapshots over the artifact store.

A snapshot binds loaded artifacts (fingerprint-checked against the live
dataset) to ready predictors.  Reload builds a fresh snapshot and swaps
it in atomically; requests in flight keep the snapshot they started with.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from ..data.loaders import Dataset
from .artifacts import (
    EXPLANATION_STYLE,
    MODEL_KINDS,
    ArtifactError,
    ArtifactPayload,
    latest_version,
    load_artifact,
)
from .pipelines import build_predictor

__all__ = ["Registry", "RegistrySnapshot", "CenterMismatchError", "NotTrainedError"]


class CenterMismatchError(Exception):
    pass


class NotTrainedError(Exception):
    pass


@dataclass
class LoadedModel:
    payload: ArtifactPayload
    rank: object


@dataclass
class RegistrySnapshot:
    dataset: Dataset
    models: dict[str, LoadedModel] = field(default_factory=dict)

    def describe(self) -> list[dict]:
        out = []
        for kind, center in MODEL_KINDS.items():
            loaded = self.models.get(kind)
            out.append({
                "kind": kind,
                "center": center,
                "trained": loaded is not None,
                "version": loaded.payload.version if loaded else None,
                "explanation": EXPLANATION_STYLE[kind],
            })
        return out

    def get(self, center: str, kind: str) -> LoadedModel:
        if kind not in MODEL_KINDS:
            raise CenterMismatchError(f"unknown model kind {kind!r}")
        if MODEL_KINDS[kind] != center:
            raise CenterMismatchError(
                f"model {kind!r} belongs to {MODEL_KINDS[kind]!r}, not {center!r}")
        if kind not in self.models:
            raise NotTrainedError(f"no trained artifact for {kind!r}")
        return self.models[kind]

    def state_hash(self) -> str:
        h = hashlib.sha256()
        h.update(self.dataset.fingerprint().encode())
        for kind in sorted(self.models):
            loaded = self.models[kind]
            h.update(f"{kind}:{loaded.payload.version}\n".encode())
            for key in sorted(loaded.payload.params):
                h.update(key.encode())
                h.update(loaded.payload.params[key].tobytes())
        return h.hexdigest()


class Registry:
    def __init__(self, dataset: Dataset, artifacts_dir: Path):
        self.dataset = dataset
        self.artifacts_dir = Path(artifacts_dir)
        self._snapshot = RegistrySnapshot(dataset=dataset)
        self.reload()

    def reload(self) -> RegistrySnapshot:
        """Build a fresh snapshot from disk and swap it in atomically."""
        fingerprint = self.dataset.fingerprint()
        models: dict[str, LoadedModel] = {}
        for kind in MODEL_KINDS:
            if latest_version(self.artifacts_dir, kind) is None:
                continue
            payload = load_artifact(self.artifacts_dir, kind)
            if payload.fingerprint != fingerprint:
                raise ArtifactError(
                    f"artifact {kind}:{payload.version} was trained against a "
                    f"different vocabulary (fingerprint mismatch)")
            models[kind] = LoadedModel(payload=payload,
                                       rank=build_predictor(payload, self.dataset))
        snapshot = RegistrySnapshot(dataset=self.dataset, models=models)
        self._snapshot = snapshot
        return snapshot

    @property
    def snapshot(self) -> RegistrySnapshot:
        return self._snapshot
