"""File parsing and serialization for every data source the platform ingests.

Everything is tab-separated text with `#` comments.  A top-level manifest
(ini-style key=value sections) names every input path; see the README for
the layer/table schemas.  Loaded structures are immutable by convention
and every loader has a matching writer so structures round-trip exactly.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .entities import (
    KINDS,
    EntityCatalog,
    KnowledgeGraph,
    NotFoundError,
    SchemaError,
)
from .tables import (
    ATOM_FEATURE_DIM,
    AssociationMatrix,
    DrugRecord,
    FeatureTable,
    LayeredNetworkSet,
    MoleculeGraph,
    NetworkLayer,
    ProteinSequence,
)

__all__ = [
    "read_rows",
    "load_manifest",
    "load_network_layers",
    "load_knowledge_graph",
    "load_feature_table",
    "load_drug_records",
    "load_molecules",
    "load_proteins",
    "load_pairs",
    "load_auxiliary_tables",
    "load_dataset",
    "AuxTables",
    "Dataset",
    "write_edges",
    "write_entities",
    "write_triples",
    "write_kg_metadata",
    "write_feature_table",
    "write_drug_records",
    "write_molecules",
    "write_proteins",
    "write_pairs",
]


def read_rows(path: Path):
    """Yield (line_number, columns) for a TSV file, skipping comments."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing input file: {path}")
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line.split("\t")


def load_manifest(path: Path) -> configparser.ConfigParser:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing manifest: {path}")
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep layer names case-sensitive
    parser.read(path, encoding="utf-8")
    return parser


# ---------------------------------------------------------------------------
# network layers
# ---------------------------------------------------------------------------


def _load_entity_file(path: Path, kind: str, catalog: EntityCatalog) -> list[str]:
    ids = []
    for lineno, cols in read_rows(path):
        if len(cols) < 1 or not cols[0]:
            raise SchemaError(f"{path}:{lineno}: empty entity id")
        name = cols[1] if len(cols) > 1 else ""
        catalog.add(cols[0], name, kind)
        if cols[0] not in ids:
            ids.append(cols[0])
    return ids


def load_network_layers(manifest_path: Path) -> tuple[LayeredNetworkSet, EntityCatalog]:
    """Load every layer named by the manifest's [layers] section.

    Layer values are `row_kind,col_kind,{symmetric|bipartite},path`.  Kinds
    with an [entities] file have a closed vocabulary: edges referencing
    unknown ids are errors.  Kinds without one accrue ids in
    first-appearance order.  Symmetric layers are symmetrized by
    max(w_ij, w_ji).
    """
    manifest_path = Path(manifest_path)
    manifest = load_manifest(manifest_path)
    root = manifest_path.parent
    catalog = EntityCatalog()

    vocab: dict[str, list[str]] = {}
    closed: set[str] = set()
    if manifest.has_section("entities"):
        for kind, rel in manifest.items("entities"):
            if kind not in KINDS:
                raise SchemaError(f"manifest declares unknown entity kind {kind!r}")
            vocab[kind] = _load_entity_file(root / rel, kind, catalog)
            closed.add(kind)

    index: dict[str, dict[str, int]] = {
        kind: {eid: i for i, eid in enumerate(ids)} for kind, ids in vocab.items()
    }

    def intern(kind: str, entity_id: str, where: str) -> int:
        table = index.setdefault(kind, {})
        if entity_id in table:
            return table[entity_id]
        if kind in closed:
            raise SchemaError(f"{where}: id {entity_id!r} not in the closed {kind} vocabulary")
        table[entity_id] = len(table)
        vocab.setdefault(kind, []).append(entity_id)
        catalog.add(entity_id, "", kind)
        return table[entity_id]

    if not manifest.has_section("layers"):
        raise SchemaError("manifest has no [layers] section")

    # first pass: collect edges so every layer sees the final shared vocab
    parsed = []
    for name, value in manifest.items("layers"):
        parts = [p.strip() for p in value.split(",")]
        if len(parts) != 4:
            raise SchemaError(f"layer {name!r}: expected 'row_kind,col_kind,mode,path'")
        row_kind, col_kind, mode, rel = parts
        if mode not in ("symmetric", "bipartite"):
            raise SchemaError(f"layer {name!r}: unknown mode {mode!r}")
        if mode == "symmetric" and row_kind != col_kind:
            raise SchemaError(f"layer {name!r}: symmetric layers need matching kinds")
        edges = []
        seen: dict[tuple[str, str], float] = {}
        for lineno, cols in read_rows(root / rel):
            where = f"{rel}:{lineno}"
            if len(cols) != 3:
                raise SchemaError(f"{where}: expected 3 columns, got {len(cols)}")
            src, dst, wtext = cols
            try:
                w = float(wtext)
            except ValueError:
                raise SchemaError(f"{where}: bad weight {wtext!r}") from None
            if not np.isfinite(w):
                raise SchemaError(f"{where}: non-finite weight")
            if w < 0:
                raise SchemaError(f"{where}: negative weight {w}")
            key = (src, dst)
            if key in seen:
                if seen[key] != w:
                    raise SchemaError(
                        f"{where}: duplicate edge {src!r}->{dst!r} with conflicting "
                        f"weight {w} (was {seen[key]})")
                continue
            seen[key] = w
            intern(row_kind, src, where)
            intern(col_kind, dst, where)
            edges.append((src, dst, w))
        parsed.append((name, row_kind, col_kind, mode, edges))

    layers: dict[str, NetworkLayer] = {}
    for name, row_kind, col_kind, mode, edges in parsed:
        row_ids = vocab.get(row_kind, [])
        col_ids = row_ids if mode == "symmetric" else vocab.get(col_kind, [])
        m = np.zeros((len(row_ids), len(col_ids)))
        ridx, cidx = index.get(row_kind, {}), index.get(col_kind, {})
        for src, dst, w in edges:
            i, j = ridx[src], cidx[dst]
            if mode == "symmetric":
                m[i, j] = max(m[i, j], w)
                m[j, i] = max(m[j, i], w)
            else:
                m[i, j] = w
        layers[name] = NetworkLayer(
            name=name, row_kind=row_kind, col_kind=col_kind,
            row_ids=row_ids, col_ids=col_ids, matrix=m,
            symmetric=(mode == "symmetric"),
        )
    return LayeredNetworkSet(layers=layers, vocab=vocab), catalog


# ---------------------------------------------------------------------------
# knowledge graph
# ---------------------------------------------------------------------------


def load_knowledge_graph(
    triples_path: Path,
    metadata_path: Path,
    declared_kinds: list[str] | None = None,
    expected_entities: int | None = None,
    expected_edges: int | None = None,
) -> KnowledgeGraph:
    """Load a deduplicated knowledge graph with per-entity metadata.

    Metadata rows are (id, name, kind); triple rows are
    (head, relation, tail).  When `declared_kinds` is given, any metadata
    kind outside it is a schema error; the expected-count arguments
    validate the loaded totals.
    """
    kg = KnowledgeGraph()
    declared = set(declared_kinds) if declared_kinds is not None else None
    for lineno, cols in read_rows(metadata_path):
        if len(cols) != 3:
            raise SchemaError(f"{metadata_path}:{lineno}: expected 3 columns (id, name, kind)")
        entity_id, name, raw_kind = cols
        if declared is not None and raw_kind not in declared:
            raise SchemaError(
                f"{metadata_path}:{lineno}: kind {raw_kind!r} not among the "
                f"{len(declared)} declared kinds")
        kg.add_entity(entity_id, name, raw_kind)

    for lineno, cols in read_rows(triples_path):
        if len(cols) != 3:
            raise SchemaError(f"{triples_path}:{lineno}: expected 3 columns, got {len(cols)}")
        head, relation, tail = cols
        kg.add_triple(head, relation, tail)

    if kg.num_triples() == 0:
        raise SchemaError("knowledge graph has no triples")
    if expected_entities is not None and kg.num_entities() != expected_entities:
        raise SchemaError(
            f"expected {expected_entities} entities, loaded {kg.num_entities()}")
    if expected_edges is not None and kg.num_triples() != expected_edges:
        raise SchemaError(f"expected {expected_edges} edges, loaded {kg.num_triples()}")
    return kg


# ---------------------------------------------------------------------------
# auxiliary tables
# ---------------------------------------------------------------------------


def load_feature_table(path: Path, expected_dim: int | None = None) -> FeatureTable:
    table: FeatureTable | None = None
    for lineno, cols in read_rows(path):
        if len(cols) < 2:
            raise SchemaError(f"{path}:{lineno}: expected id plus feature columns")
        entity_id, values = cols[0], cols[1:]
        try:
            vec = np.array([float(v) for v in values])
        except ValueError:
            raise SchemaError(f"{path}:{lineno}: non-numeric feature value") from None
        if table is None:
            dim = expected_dim if expected_dim is not None else vec.size
            table = FeatureTable(dim)
        if vec.size != table.dim:
            raise SchemaError(
                f"{path}:{lineno}: dimension {vec.size} != declared {table.dim}")
        table.add(entity_id, vec)
    if table is None:
        raise SchemaError(f"{path}: empty feature table")
    return table


def load_drug_records(path: Path) -> dict[str, DrugRecord]:
    records: dict[str, DrugRecord] = {}
    for lineno, cols in read_rows(path):
        if len(cols) != 5:
            raise SchemaError(
                f"{path}:{lineno}: expected 5 columns (id, atc, background, indication, structure)")
        drug_id, atc, background, indication, structure = cols
        codes = tuple(c for c in atc.split("|") if c)
        records[drug_id] = DrugRecord(
            drug_id=drug_id, atc_codes=codes, background=background,
            indication=indication, structure=structure)
    return records


def load_molecules(path: Path) -> dict[str, MoleculeGraph]:
    """Parse the molecule block format.

    Each block is a `mol <id> <n_atoms> <n_bonds>` header, n_atoms rows of
    78 feature columns, then n_bonds rows of two atom indices.
    """
    molecules: dict[str, MoleculeGraph] = {}
    rows = list(read_rows(path))
    pos = 0
    while pos < len(rows):
        lineno, cols = rows[pos]
        if cols[0] != "mol" or len(cols) != 4:
            raise SchemaError(f"{path}:{lineno}: expected 'mol<TAB>id<TAB>atoms<TAB>bonds' header")
        mol_id = cols[1]
        try:
            n_atoms, n_bonds = int(cols[2]), int(cols[3])
        except ValueError:
            raise SchemaError(f"{path}:{lineno}: malformed block header") from None
        pos += 1
        if pos + n_atoms + n_bonds > len(rows):
            raise SchemaError(f"{path}:{lineno}: truncated block for {mol_id!r}")
        atoms = []
        for k in range(n_atoms):
            alineno, acols = rows[pos + k]
            if len(acols) != ATOM_FEATURE_DIM:
                raise SchemaError(
                    f"{path}:{alineno}: atom row has {len(acols)} features, "
                    f"expected {ATOM_FEATURE_DIM}")
            atoms.append([float(v) for v in acols])
        pos += n_atoms
        bonds = []
        for k in range(n_bonds):
            blineno, bcols = rows[pos + k]
            if len(bcols) != 2:
                raise SchemaError(f"{path}:{blineno}: bond row needs two atom indices")
            bonds.append((int(bcols[0]), int(bcols[1])))
        pos += n_bonds
        if mol_id in molecules:
            raise SchemaError(f"{path}: duplicate molecule {mol_id!r}")
        molecules[mol_id] = MoleculeGraph(atoms=np.array(atoms), bonds=bonds)
    return molecules


def load_proteins(path: Path) -> dict[str, ProteinSequence]:
    proteins: dict[str, ProteinSequence] = {}
    for lineno, cols in read_rows(path):
        if len(cols) != 2:
            raise SchemaError(f"{path}:{lineno}: expected (target id, sequence)")
        proteins[cols[0]] = ProteinSequence(target_id=cols[0], sequence=cols[1])
    return proteins


def load_pairs(path: Path) -> list[tuple[str, str, int]]:
    pairs = []
    for lineno, cols in read_rows(path):
        if len(cols) != 3:
            raise SchemaError(f"{path}:{lineno}: expected (id, id, label)")
        label = cols[2]
        if label not in ("0", "1"):
            raise SchemaError(f"{path}:{lineno}: label must be 0 or 1, got {label!r}")
        pairs.append((cols[0], cols[1], int(label)))
    return pairs


@dataclass
class AuxTables:
    disease_features: FeatureTable | None = None
    drug_records: dict[str, DrugRecord] = field(default_factory=dict)
    molecules: dict[str, MoleculeGraph] = field(default_factory=dict)
    proteins: dict[str, ProteinSequence] = field(default_factory=dict)


def load_auxiliary_tables(paths: dict[str, Path], catalog: EntityCatalog) -> AuxTables:
    """All-or-nothing load of the side tables, cross-checked against vocab.

    `paths` may contain `disease_features`, `drug_records`, `molecules`,
    `proteins`.  Any unresolvable id or malformed file aborts the whole
    load.
    """
    aux = AuxTables()
    if "disease_features" in paths:
        aux.disease_features = load_feature_table(paths["disease_features"])
        for entity_id in aux.disease_features.ids():
            if catalog.get("disease", entity_id) is None:
                raise SchemaError(f"disease features reference unknown disease {entity_id!r}")
    if "drug_records" in paths:
        aux.drug_records = load_drug_records(paths["drug_records"])
        for drug_id in aux.drug_records:
            if catalog.get("drug", drug_id) is None:
                raise SchemaError(f"drug record references unknown drug {drug_id!r}")
    if "molecules" in paths:
        aux.molecules = load_molecules(paths["molecules"])
        for drug_id in aux.molecules:
            if catalog.get("drug", drug_id) is None:
                raise SchemaError(f"molecule table references unknown drug {drug_id!r}")
    if "proteins" in paths:
        aux.proteins = load_proteins(paths["proteins"])
        for target_id in aux.proteins:
            if catalog.get("target", target_id) is None:
                raise SchemaError(f"protein table references unknown target {target_id!r}")
    return aux


# ---------------------------------------------------------------------------
# whole-dataset loading
# ---------------------------------------------------------------------------


@dataclass
class Dataset:
    """Everything one manifest describes, loaded and cross-validated."""

    root: Path
    catalog: EntityCatalog
    layers: LayeredNetworkSet
    kg: KnowledgeGraph | None = None
    aux: AuxTables = field(default_factory=AuxTables)
    dti_pairs: list[tuple[str, str, int]] = field(default_factory=list)
    cpi_pairs: list[tuple[str, str, int]] = field(default_factory=list)

    def association(self, layer_name: str) -> AssociationMatrix:
        return AssociationMatrix.from_layer(self.layers.layer(layer_name))

    def fingerprint(self) -> str:
        """Content hash of every vocabulary, in index order."""
        h = hashlib.sha256()
        for kind in KINDS:
            for ref in self.catalog.entities(kind):
                h.update(f"{kind}\t{ref.id}\t{ref.name}\n".encode())
        if self.kg is not None:
            for entity_id in self.kg.entity_ids():
                ref = self.kg.entity(entity_id)
                h.update(f"kg\t{entity_id}\t{ref.name}\t{self.kg.raw_kind(entity_id)}\n".encode())
            for rel in self.kg.relations:
                h.update(f"rel\t{rel}\n".encode())
        return h.hexdigest()

    def summary(self) -> dict:
        out = {
            "vocab": {kind: self.catalog.size(kind) for kind in self.catalog.kinds()},
            "layers": {
                name: int(np.count_nonzero(layer.matrix))
                for name, layer in self.layers.layers.items()
            },
        }
        if self.kg is not None:
            out["kg"] = {
                "entities": self.kg.num_entities(),
                "triples": self.kg.num_triples(),
                "kinds": self.kg.kind_counts(),
                "relations": self.kg.relation_counts(),
            }
        out["tables"] = {
            "disease_features": len(self.aux.disease_features) if self.aux.disease_features else 0,
            "drug_records": len(self.aux.drug_records),
            "molecules": len(self.aux.molecules),
            "proteins": len(self.aux.proteins),
        }
        out["pairs"] = {"dti": len(self.dti_pairs), "cpi": len(self.cpi_pairs)}
        return out


def load_dataset(manifest_path: Path) -> Dataset:
    manifest_path = Path(manifest_path)
    manifest = load_manifest(manifest_path)
    root = manifest_path.parent
    layers, catalog = load_network_layers(manifest_path)

    kg = None
    if manifest.has_section("knowledge_graph"):
        section = manifest["knowledge_graph"]
        declared = None
        if "kinds" in section:
            declared = [k.strip() for k in section["kinds"].split(",") if k.strip()]
        kg = load_knowledge_graph(
            root / section["triples"],
            root / section["metadata"],
            declared_kinds=declared,
            expected_entities=section.getint("expected_entities", fallback=None),
            expected_edges=section.getint("expected_edges", fallback=None),
        )
        # KG metadata may carry display names the layer files lack
        for entity_id in kg.entity_ids():
            ref = kg.entity(entity_id)
            if catalog.get(ref.kind, entity_id) is not None and ref.name:
                catalog.add(entity_id, ref.name, ref.kind)

    aux_paths: dict[str, Path] = {}
    if manifest.has_section("tables"):
        for key, rel in manifest.items("tables"):
            aux_paths[key] = root / rel
    aux = load_auxiliary_tables(aux_paths, catalog)

    dti_pairs: list[tuple[str, str, int]] = []
    cpi_pairs: list[tuple[str, str, int]] = []
    if manifest.has_section("pairs"):
        section = manifest["pairs"]
        if "dti" in section:
            dti_pairs = load_pairs(root / section["dti"])
        if "cpi" in section:
            cpi_pairs = load_pairs(root / section["cpi"])

    return Dataset(root=root, catalog=catalog, layers=layers, kg=kg, aux=aux,
                   dti_pairs=dti_pairs, cpi_pairs=cpi_pairs)


# ---------------------------------------------------------------------------
# writers (round-trip counterparts of the loaders)
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def write_entities(path: Path, refs) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for ref in refs:
            fh.write(f"{ref.id}\t{ref.name}\n")


def write_edges(path: Path, layer: NetworkLayer) -> None:
    """Emit the nonzero cells of a layer; symmetric layers emit i <= j."""
    with Path(path).open("w", encoding="utf-8") as fh:
        rows, cols = np.nonzero(layer.matrix)
        for i, j in zip(rows, cols):
            if layer.symmetric and i > j:
                continue
            fh.write(f"{layer.row_ids[i]}\t{layer.col_ids[j]}\t{_fmt(layer.matrix[i, j])}\n")


def write_triples(path: Path, kg: KnowledgeGraph) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for t in kg.triples:
            fh.write(f"{t.head}\t{t.relation}\t{t.tail}\n")


def write_kg_metadata(path: Path, kg: KnowledgeGraph) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for entity_id in kg.entity_ids():
            ref = kg.entity(entity_id)
            fh.write(f"{entity_id}\t{ref.name}\t{kg.raw_kind(entity_id)}\n")


def write_feature_table(path: Path, table: FeatureTable) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for entity_id in table.ids():
            values = "\t".join(_fmt(v) for v in table.vector(entity_id))
            fh.write(f"{entity_id}\t{values}\n")


def write_drug_records(path: Path, records: dict[str, DrugRecord]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records.values():
            fh.write(f"{rec.drug_id}\t{'|'.join(rec.atc_codes)}\t{rec.background}\t"
                     f"{rec.indication}\t{rec.structure}\n")


def write_molecules(path: Path, molecules: dict[str, MoleculeGraph]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for mol_id, mol in molecules.items():
            fh.write(f"mol\t{mol_id}\t{mol.num_atoms}\t{len(mol.bonds)}\n")
            for row in mol.atoms:
                fh.write("\t".join(_fmt(v) for v in row) + "\n")
            for a, b in mol.bonds:
                fh.write(f"{a}\t{b}\n")


def write_proteins(path: Path, proteins: dict[str, ProteinSequence]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for seq in proteins.values():
            fh.write(f"{seq.target_id}\t{seq.sequence}\n")


def write_pairs(path: Path, pairs: list[tuple[str, str, int]]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for a, b, label in pairs:
            fh.write(f"{a}\t{b}\t{label}\n")
