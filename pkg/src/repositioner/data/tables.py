"""Matrix-shaped data: network layers, associations, features, molecules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entities import SchemaError

__all__ = [
    "NetworkLayer",
    "LayeredNetworkSet",
    "AssociationMatrix",
    "FeatureTable",
    "DrugRecord",
    "MoleculeGraph",
    "ProteinSequence",
    "ATOM_FEATURE_DIM",
    "AMINO_ALPHABET",
]

ATOM_FEATURE_DIM = 78
AMINO_ALPHABET = "ACDEFGHIKLMNPQRSTVWYX"

_SYMMETRY_TOL = 1e-12


@dataclass
class NetworkLayer:
    """One named adjacency layer over row/col vocabularies.

    Weights are unit-free non-negative reals; layers flagged symmetric
    must be square over a single vocabulary and symmetric to 1e-12.
    """

    name: str
    row_kind: str
    col_kind: str
    row_ids: list[str]
    col_ids: list[str]
    matrix: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.shape != (len(self.row_ids), len(self.col_ids)):
            raise SchemaError(
                f"layer {self.name!r}: matrix shape {self.matrix.shape} does not match "
                f"vocab sizes ({len(self.row_ids)}, {len(self.col_ids)})")
        if self.matrix.size and not np.isfinite(self.matrix).all():
            raise SchemaError(f"layer {self.name!r}: non-finite weight")
        if self.matrix.size and self.matrix.min() < 0:
            raise SchemaError(f"layer {self.name!r}: negative weight")
        if self.symmetric:
            if self.row_ids != self.col_ids:
                raise SchemaError(f"symmetric layer {self.name!r} must share row/col vocabulary")
            if self.matrix.size and np.abs(self.matrix - self.matrix.T).max() > _SYMMETRY_TOL:
                raise SchemaError(f"layer {self.name!r} is not symmetric")

    @property
    def square(self) -> bool:
        return self.row_ids == self.col_ids

    def row_index(self, entity_id: str) -> int:
        try:
            return self.row_ids.index(entity_id)
        except ValueError:
            raise SchemaError(f"{entity_id!r} not in layer {self.name!r} rows") from None


@dataclass
class LayeredNetworkSet:
    """Named layers over shared per-kind vocabularies."""

    layers: dict[str, NetworkLayer]
    vocab: dict[str, list[str]]

    def layer(self, name: str) -> NetworkLayer:
        if name not in self.layers:
            raise SchemaError(f"no layer named {name!r}")
        return self.layers[name]

    def names(self) -> list[str]:
        return list(self.layers)

    def square_layers(self, kind: str) -> list[NetworkLayer]:
        return [l for l in self.layers.values() if l.square and l.row_kind == kind]


@dataclass
class AssociationMatrix:
    """Binary row-kind x col-kind association matrix (e.g. drug-disease)."""

    row_ids: list[str]
    col_ids: list[str]
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.float64)
        if self.entries.shape != (len(self.row_ids), len(self.col_ids)):
            raise SchemaError("association matrix shape does not match vocab sizes")
        bad = ~np.isin(self.entries, (0.0, 1.0))
        if bad.any():
            raise SchemaError("association entries must be 0 or 1")

    @classmethod
    def from_layer(cls, layer: NetworkLayer) -> "AssociationMatrix":
        return cls(row_ids=list(layer.row_ids), col_ids=list(layer.col_ids),
                   entries=layer.matrix.copy())

    def col_index(self, entity_id: str) -> int:
        try:
            return self.col_ids.index(entity_id)
        except ValueError:
            raise SchemaError(f"{entity_id!r} not a column of the association matrix") from None


class FeatureTable:
    """Dense real feature vectors keyed by entity id, all one dimension."""

    def __init__(self, dim: int):
        if dim <= 0:
            raise SchemaError("feature dimension must be positive")
        self.dim = dim
        self._rows: dict[str, np.ndarray] = {}

    def add(self, entity_id: str, vector) -> None:
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (self.dim,):
            raise SchemaError(
                f"feature vector for {entity_id!r} has dimension {vector.shape}, expected ({self.dim},)")
        if not np.isfinite(vector).all():
            raise SchemaError(f"non-finite feature for {entity_id!r}")
        self._rows[entity_id] = vector

    def vector(self, entity_id: str) -> np.ndarray:
        if entity_id not in self._rows:
            raise SchemaError(f"no features for {entity_id!r}")
        return self._rows[entity_id]

    def ids(self) -> list[str]:
        return list(self._rows)

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self._rows

    def __len__(self) -> int:
        return len(self._rows)

    def matrix(self, ids: list[str]) -> np.ndarray:
        """Rows stacked in the order of `ids`."""
        return np.stack([self.vector(i) for i in ids]) if ids else np.zeros((0, self.dim))


@dataclass(frozen=True)
class DrugRecord:
    drug_id: str
    atc_codes: tuple[str, ...]
    background: str
    indication: str
    structure: str


@dataclass
class MoleculeGraph:
    """Atoms carry fixed 78-dimensional features; bonds are undirected."""

    atoms: np.ndarray
    bonds: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.atoms = np.asarray(self.atoms, dtype=np.float64)
        if self.atoms.ndim != 2 or self.atoms.shape[1] != ATOM_FEATURE_DIM:
            raise SchemaError(
                f"atom features must be (n, {ATOM_FEATURE_DIM}), got {self.atoms.shape}")
        if self.atoms.shape[0] == 0:
            raise SchemaError("molecule must have at least one atom")
        n = self.atoms.shape[0]
        for a, b in self.bonds:
            if not (0 <= a < n and 0 <= b < n):
                raise SchemaError(f"bond ({a}, {b}) out of range for {n} atoms")

    @property
    def num_atoms(self) -> int:
        return self.atoms.shape[0]

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.num_atoms, self.num_atoms))
        for a, b in self.bonds:
            adj[a, b] = adj[b, a] = 1.0
        return adj


@dataclass(frozen=True)
class ProteinSequence:
    target_id: str
    sequence: str

    def __post_init__(self):
        if not self.sequence:
            raise SchemaError(f"empty protein sequence for {self.target_id!r}")
        bad = set(self.sequence) - set(AMINO_ALPHABET)
        if bad:
            raise SchemaError(
                f"illegal residue(s) {sorted(bad)} in sequence for {self.target_id!r}")

    def encode(self) -> np.ndarray:
        """Residues as indices into the 21-letter alphabet."""
        return np.array([AMINO_ALPHABET.index(c) for c in self.sequence], dtype=np.intp)
