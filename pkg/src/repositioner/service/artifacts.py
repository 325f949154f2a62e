"""Versioned on-disk persistence for trained models.

Parameter blobs are written in a deterministic container (sorted keys,
raw .npy encoding, no timestamps), so a fixed-seed retrain produces a
byte-identical blob.  The version id is a content hash of the blob plus
the training config and the data fingerprint; creation time lives only in
meta.json, outside the hashed identity.
"""

from __future__ import annotations

import hashlib
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["ArtifactError", "ArtifactPayload", "save_artifact", "load_artifact",
           "list_versions", "latest_version"]

_MAGIC = b"RPOSPARAMS1\n"

MODEL_KINDS = {
    "deepdr": "disease-centric",
    "hetdr": "disease-centric",
    "diskge": "disease-centric",
    "deepdtnet": "target-centric",
    "aopedf": "target-centric",
    "tarkge": "target-centric",
    "kgmtl": "target-centric",
}

EXPLANATION_STYLE = {
    "deepdr": "similarity",
    "hetdr": "similarity",
    "diskge": "paths",
    "deepdtnet": "similarity",
    "aopedf": "similarity",
    "tarkge": "paths",
    "kgmtl": "paths",
}


class ArtifactError(Exception):
    pass


@dataclass
class ArtifactPayload:
    kind: str
    params: dict[str, np.ndarray]
    config: dict
    fingerprint: str
    version: str = ""
    created_at: str = ""

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ArtifactError(f"unknown model kind {self.kind!r}")

    @property
    def center(self) -> str:
        return MODEL_KINDS[self.kind]


def _encode_params(params: dict[str, np.ndarray]) -> bytes:
    buf = io.BytesIO()
    buf.write(_MAGIC)
    for key in sorted(params):
        buf.write(key.encode("utf-8") + b"\n")
        np.lib.format.write_array(buf, np.ascontiguousarray(params[key]), version=(1, 0))
    return buf.getvalue()


def _decode_params(blob: bytes) -> dict[str, np.ndarray]:
    buf = io.BytesIO(blob)
    if buf.read(len(_MAGIC)) != _MAGIC:
        raise ArtifactError("parameter blob has a bad header")
    params: dict[str, np.ndarray] = {}
    while True:
        line = buf.readline()
        if not line:
            break
        key = line.rstrip(b"\n").decode("utf-8")
        params[key] = np.lib.format.read_array(buf)
    return params


def _canonical_config(config: dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def save_artifact(payload: ArtifactPayload, artifacts_dir: Path) -> str:
    """Persist one trained model; returns the content-derived version id."""
    artifacts_dir = Path(artifacts_dir)
    blob = _encode_params(payload.params)
    digest = hashlib.sha256()
    digest.update(blob)
    digest.update(_canonical_config(payload.config).encode())
    digest.update(payload.fingerprint.encode())
    version = digest.hexdigest()[:12]

    vdir = artifacts_dir / payload.kind / version
    vdir.mkdir(parents=True, exist_ok=True)
    (vdir / "params.bin").write_bytes(blob)
    meta = {
        "kind": payload.kind,
        "center": payload.center,
        "version": version,
        "created_at": payload.created_at or time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "fingerprint": payload.fingerprint,
        "config": payload.config,
        "params_sha256": hashlib.sha256(blob).hexdigest(),
    }
    (vdir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True),
                                    encoding="utf-8")

    manifest_path = artifacts_dir / "manifest.json"
    manifest = {}
    if manifest_path.is_file():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    entry = manifest.setdefault(payload.kind, {"versions": []})
    if version not in entry["versions"]:
        entry["versions"].append(version)
    entry["latest"] = version
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True),
                             encoding="utf-8")
    payload.version = version
    return version


def list_versions(artifacts_dir: Path, kind: str) -> list[str]:
    manifest_path = Path(artifacts_dir) / "manifest.json"
    if not manifest_path.is_file():
        return []
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    return list(manifest.get(kind, {}).get("versions", []))


def latest_version(artifacts_dir: Path, kind: str) -> str | None:
    manifest_path = Path(artifacts_dir) / "manifest.json"
    if not manifest_path.is_file():
        return None
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    return manifest.get(kind, {}).get("latest")


def load_artifact(artifacts_dir: Path, kind: str, version: str | None = None) -> ArtifactPayload:
    """Load and checksum-verify one artifact (latest version by default)."""
    artifacts_dir = Path(artifacts_dir)
    if version is None:
        version = latest_version(artifacts_dir, kind)
        if version is None:
            raise ArtifactError(f"no trained artifact for kind {kind!r}")
    vdir = artifacts_dir / kind / version
    if not vdir.is_dir():
        raise ArtifactError(f"unknown version {version!r} for kind {kind!r}")
    meta = json.loads((vdir / "meta.json").read_text(encoding="utf-8"))
    blob = (vdir / "params.bin").read_bytes()
    if hashlib.sha256(blob).hexdigest() != meta["params_sha256"]:
        raise ArtifactError(f"checksum mismatch in {vdir / 'params.bin'}")
    return ArtifactPayload(kind=kind, params=_decode_params(blob),
                           config=meta["config"], fingerprint=meta["fingerprint"],
                           version=version, created_at=meta["created_at"])
