"""Synthetic dataset generators with exact bookkeeping.

Every generator is deterministic in its seed and returns a ledger of the
counts and planted structure it produced, so tests can check loaders and
recovery behaviour against ground truth instead of guessed numbers.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .data import (
    DrugRecord,
    KnowledgeGraph,
    MoleculeGraph,
    ProteinSequence,
    write_drug_records,
    write_entities,
    write_kg_metadata,
    write_molecules,
    write_pairs,
    write_proteins,
    write_triples,
)
from .data.tables import ATOM_FEATURE_DIM
from .numerics import derive_rng

__all__ = [
    "generate_dataset",
    "compositional_kg",
    "planted_pu_instance",
    "planted_cvae_instance",
    "kgmtl_fixture",
    "ppmi_graph_family",
]

SIMILARITY_LAYERS = (
    "chemical-similarity",
    "therapeutic-similarity",
    "target-seq-similarity",
    "go-bp-similarity",
    "go-cc-similarity",
    "go-mf-similarity",
)

EXPLANATION_LAYERS = (
    "therapeutic-similarity",
    "chemical-similarity",
    "go-bp-similarity",
    "go-cc-similarity",
    "go-mf-similarity",
)

EXAMPLE_DISEASE = ("C0342731", "Deficiency of mevalonate kinase")
EXAMPLE_TARGET = ("9971", "NR1H4")


class _Ref:
    def __init__(self, id, name):
        self.id, self.name = id, name


def _write_edge_file(path, edges):
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write("# source\ttarget\tweight\n")
        for a, b, w in edges:
            fh.write(f"{a}\t{b}\t{w!r}\n")


def generate_dataset(root: Path, seed: int = 11, n_drugs: int = 40,
                     n_diseases: int = 15, n_targets: int = 12,
                     n_side_effects: int = 10) -> dict:
    """Write a complete synthetic platform dataset under `root`.

    Drugs, diseases and targets carry a planted group label; similarity,
    association and knowledge-graph structure all follow the groups, so
    embedding models can genuinely recover signal.  Returns a ledger with
    exact counts, the group assignments and the file layout.
    """
    root = Path(root)
    (root / "layers").mkdir(parents=True, exist_ok=True)
    (root / "kg").mkdir(exist_ok=True)
    (root / "tables").mkdir(exist_ok=True)
    (root / "pairs").mkdir(exist_ok=True)
    n_groups = 3

    drugs = [_Ref(f"DRG{i:03d}", f"Drugane-{i:03d}") for i in range(n_drugs)]
    diseases = [_Ref(EXAMPLE_DISEASE[0], EXAMPLE_DISEASE[1])]
    diseases += [_Ref(f"C{7000 + i:07d}", f"Synthetic disease {i}") for i in range(1, n_diseases - 2)]
    # two distinct diseases sharing a display name, for ambiguity handling
    diseases += [_Ref("C9000001", "Duplicate syndrome"), _Ref("C9000002", "Duplicate syndrome")]
    targets = [_Ref(EXAMPLE_TARGET[0], EXAMPLE_TARGET[1])]
    targets += [_Ref(f"{1000 + i}", f"GENE{i}") for i in range(1, n_targets)]
    side_effects = [_Ref(f"SE{i:03d}", f"Side effect {i}") for i in range(n_side_effects)]
    pathways = [_Ref(f"PW{i:02d}", f"Pathway {i}") for i in range(3)]

    group = {
        "drug": {r.id: i % n_groups for i, r in enumerate(drugs)},
        "disease": {r.id: i % n_groups for i, r in enumerate(diseases)},
        "target": {r.id: i % n_groups for i, r in enumerate(targets)},
    }

    write_entities(root / "entities_drug.tsv", drugs)
    write_entities(root / "entities_disease.tsv", diseases)
    write_entities(root / "entities_target.tsv", targets)
    write_entities(root / "entities_side_effect.tsv", side_effects)

    layer_nonzeros: dict[str, int] = {}

    def similarity_edges(name, refs, grp, rng, base=0.15, boost=0.75, p_skip=0.25):
        edges = []
        count = 0
        for i in range(len(refs)):
            for j in range(i + 1, len(refs)):
                if rng.random() < p_skip:
                    continue
                w = base * rng.random()
                if grp[refs[i].id] == grp[refs[j].id]:
                    w += boost * (0.5 + 0.5 * rng.random())
                w = round(w, 6)
                if w <= 0:
                    continue
                edges.append((refs[i].id, refs[j].id, w))
                count += 2
        layer_nonzeros[name] = count
        return edges

    for name in SIMILARITY_LAYERS:
        rng = derive_rng(seed, f"layer:{name}")
        _write_edge_file(root / "layers" / f"{name}.tsv", similarity_edges(name, drugs, group["drug"], rng))

    rng = derive_rng(seed, "layer:ddi")
    ddi_edges = similarity_edges("drug-drug-interaction", drugs, group["drug"], rng,
                                 base=0.0, boost=1.0, p_skip=0.82)
    _write_edge_file(root / "layers" / "drug-drug-interaction.tsv", ddi_edges)

    rng = derive_rng(seed, "layer:ppi")
    ppi_edges = similarity_edges("protein-protein-interaction", targets, group["target"], rng,
                                 base=0.05, boost=0.9, p_skip=0.4)
    _write_edge_file(root / "layers" / "protein-protein-interaction.tsv", ppi_edges)

    def bipartite_edges(name, rows, cols, rgrp, cgrp, rng, p_match=0.5, p_other=0.02, binary=True):
        edges = []
        for r in rows:
            for c in cols:
                p = p_match if rgrp[r.id] == cgrp[c.id] else p_other
                if rng.random() < p:
                    w = 1.0 if binary else round(rng.random(), 6)
                    edges.append((r.id, c.id, w))
        layer_nonzeros[name] = len(edges)
        return edges

    rng = derive_rng(seed, "layer:drug-disease")
    dd_edges = bipartite_edges("drug-disease", drugs, diseases, group["drug"], group["disease"], rng,
                               p_match=0.45, p_other=0.02)
    _write_edge_file(root / "layers" / "drug-disease.tsv", dd_edges)

    rng = derive_rng(seed, "layer:drug-target")
    dt_edges = bipartite_edges("drug-target", drugs, targets, group["drug"], group["target"], rng,
                               p_match=0.5, p_other=0.03)
    _write_edge_file(root / "layers" / "drug-target.tsv", dt_edges)

    rng = derive_rng(seed, "layer:drug-sideeffect")
    se_grp = {r.id: i % n_groups for i, r in enumerate(side_effects)}
    ds_edges = bipartite_edges("drug-side-effect", drugs, side_effects, group["drug"], se_grp, rng,
                               p_match=0.4, p_other=0.05)
    _write_edge_file(root / "layers" / "drug-side-effect.tsv", ds_edges)

    # knowledge graph over the same entities plus pathway hubs
    kg = KnowledgeGraph()
    for refs, raw in ((drugs, "drug"), (diseases, "disease"), (targets, "target"),
                      (side_effects, "side-effect"), (pathways, "pathway")):
        for r in refs:
            kg.add_entity(r.id, r.name, raw)
    for a, b, _ in dd_edges:
        kg.add_triple(a, "treats", b)
    for a, b, _ in dt_edges:
        kg.add_triple(a, "targets", b)
    for a, b, _ in ddi_edges:
        kg.add_triple(a, "interacts-with", b)
    for a, b, _ in ds_edges:
        kg.add_triple(a, "causes", b)
    rng = derive_rng(seed, "kg:extra")
    for t in targets:
        kg.add_triple(t.id, "participates-in", pathways[group["target"][t.id]].id)
        for d in diseases:
            if group["target"][t.id] == group["disease"][d.id] and rng.random() < 0.4:
                kg.add_triple(t.id, "associated-with", d.id)
    write_triples(root / "kg" / "triples.tsv", kg)
    write_kg_metadata(root / "kg" / "metadata.tsv", kg)

    # disease feature table (precomputed text-feature stand-in)
    feat_dim = 16
    rng = derive_rng(seed, "tables:disease-features")
    with (root / "tables" / "disease_features.tsv").open("w", encoding="utf-8") as fh:
        for d in diseases:
            v = 0.1 * rng.normal(size=feat_dim)
            v[group["disease"][d.id]] += 1.0
            fh.write(d.id + "\t" + "\t".join(repr(float(x)) for x in v) + "\n")

    records = {}
    for i, d in enumerate(drugs):
        records[d.id] = DrugRecord(
            drug_id=d.id,
            atc_codes=(f"A{i % 9}{i % 7:02d}", f"B{i % 5}{i % 3:02d}"),
            background=f"Synthetic small molecule number {i}.",
            indication=f"Investigated for group-{group['drug'][d.id]} conditions.",
            structure=f"STRUCT-{d.id}",
        )
    write_drug_records(root / "tables" / "drug_records.tsv", records)

    molecules = {}
    rng = derive_rng(seed, "tables:molecules")
    for d in drugs:
        n_atoms = int(rng.integers(3, 8))
        atoms = 0.05 * rng.normal(size=(n_atoms, ATOM_FEATURE_DIM))
        atoms[:, group["drug"][d.id]] += 1.0
        bonds = [(k, k + 1) for k in range(n_atoms - 1)]
        molecules[d.id] = MoleculeGraph(atoms=atoms, bonds=bonds)
    write_molecules(root / "tables" / "molecules.tsv", molecules)

    motifs = ("AAAA", "WWWW", "HHHH")
    proteins = {}
    rng = derive_rng(seed, "tables:proteins")
    for t in targets:
        length = int(rng.integers(14, 26))
        letters = "ACDEFGHIKLMNPQRSTVWY"
        seq = "".join(letters[int(rng.integers(0, 20))] for _ in range(length))
        pos = int(rng.integers(0, length - 4))
        motif = motifs[group["target"][t.id]]
        proteins[t.id] = ProteinSequence(t.id, seq[:pos] + motif + seq[pos + 4:])
    write_proteins(root / "tables" / "proteins.tsv", proteins)

    rng = derive_rng(seed, "pairs")
    dti_pairs, cpi_pairs = [], []
    for d in drugs:
        for t in targets:
            if rng.random() < 0.35:
                label = int(group["drug"][d.id] == group["target"][t.id])
                dti_pairs.append((d.id, t.id, label))
            if rng.random() < 0.35:
                label = int(group["drug"][d.id] == group["target"][t.id])
                cpi_pairs.append((d.id, t.id, label))
    write_pairs(root / "pairs" / "dti.tsv", dti_pairs)
    write_pairs(root / "pairs" / "cpi.tsv", cpi_pairs)

    manifest = root / "manifest.ini"
    with manifest.open("w", encoding="utf-8") as fh:
        fh.write("[entities]\n")
        fh.write("drug = entities_drug.tsv\n")
        fh.write("disease = entities_disease.tsv\n")
        fh.write("target = entities_target.tsv\n")
        fh.write("side-effect = entities_side_effect.tsv\n\n")
        fh.write("[layers]\n")
        for name in SIMILARITY_LAYERS:
            fh.write(f"{name} = drug,drug,symmetric,layers/{name}.tsv\n")
        fh.write("drug-drug-interaction = drug,drug,symmetric,layers/drug-drug-interaction.tsv\n")
        fh.write("protein-protein-interaction = target,target,symmetric,layers/protein-protein-interaction.tsv\n")
        fh.write("drug-disease = drug,disease,bipartite,layers/drug-disease.tsv\n")
        fh.write("drug-target = drug,target,bipartite,layers/drug-target.tsv\n")
        fh.write("drug-side-effect = drug,side-effect,bipartite,layers/drug-side-effect.tsv\n\n")
        fh.write("[knowledge_graph]\n")
        fh.write("triples = kg/triples.tsv\n")
        fh.write("metadata = kg/metadata.tsv\n")
        fh.write("kinds = drug,disease,target,side-effect,pathway\n")
        fh.write(f"expected_entities = {kg.num_entities()}\n")
        fh.write(f"expected_edges = {kg.num_triples()}\n\n")
        fh.write("[tables]\n")
        fh.write("disease_features = tables/disease_features.tsv\n")
        fh.write("drug_records = tables/drug_records.tsv\n")
        fh.write("molecules = tables/molecules.tsv\n")
        fh.write("proteins = tables/proteins.tsv\n\n")
        fh.write("[pairs]\n")
        fh.write("dti = pairs/dti.tsv\n")
        fh.write("cpi = pairs/cpi.tsv\n")

    return {
        "manifest": manifest,
        "seed": seed,
        "vocab": {"drug": n_drugs, "disease": n_diseases, "target": n_targets,
                  "side-effect": n_side_effects},
        "groups": group,
        "layer_nonzeros": layer_nonzeros,
        "kg": {
            "entities": kg.num_entities(),
            "triples": kg.num_triples(),
            "kinds": kg.kind_counts(),
            "relations": kg.relation_counts(),
        },
        "pairs": {"dti": len(dti_pairs), "cpi": len(cpi_pairs)},
        "example_disease": EXAMPLE_DISEASE[0],
        "example_target": EXAMPLE_TARGET[0],
    }


def compositional_kg(seed: int = 23, n_entities: int = 50, keep_prob: float = 0.9,
                     holdout_fraction: float = 0.1):
    """Ring-structured KG whose fourth relation composes the second and third.

    Entities sit on a ring; relations step +1, +3, +7 and +10 positions, so
    `step10 = step3 o step7` by construction.  Returns (kg, train_triples,
    heldout_triples, ledger).
    """
    rng = derive_rng(seed, "compositional-kg")
    kg = KnowledgeGraph()
    ids = [f"E{i:02d}" for i in range(n_entities)]
    for i, entity_id in enumerate(ids):
        kg.add_entity(entity_id, f"Entity {i}", "other")
    steps = {"step1": 1, "step3": 3, "step7": 7, "step10": 10}
    all_triples = []
    for rel, delta in steps.items():
        for i in range(n_entities):
            if rng.random() < keep_prob:
                all_triples.append((ids[i], rel, ids[(i + delta) % n_entities]))
    order = rng.permutation(len(all_triples))
    n_hold = int(round(holdout_fraction * len(all_triples)))
    heldout = [all_triples[i] for i in order[:n_hold]]
    train = [all_triples[i] for i in order[n_hold:]]
    for h, r, t in all_triples:
        kg.add_triple(h, r, t)
    ledger = {"entities": n_entities, "relations": list(steps), "total": len(all_triples),
              "train": len(train), "heldout": len(heldout)}
    return kg, train, heldout, ledger


def planted_pu_instance(seed: int = 7, n_drugs: int = 100, n_targets: int = 80,
                        observed_fraction: float = 0.3):
    """Planted rank-2 drug-target matrix with partially observed positives.

    Drugs and targets each split into two latent groups and interact
    exactly within matching groups, so the full positive matrix has rank
    two.  Returns (observed matrix, full positive mask, held-out positive
    index pairs, drug features, target features); features are identity
    matrices.
    """
    rng = derive_rng(seed, "pu-instance")
    drug_group = rng.permuted(np.arange(n_drugs) % 2)
    target_group = rng.permuted(np.arange(n_targets) % 2)
    positives = drug_group[:, None] == target_group[None, :]
    pos_idx = np.argwhere(positives)
    order = rng.permutation(len(pos_idx))
    n_obs = int(round(observed_fraction * len(pos_idx)))
    observed_idx = pos_idx[order[:n_obs]]
    heldout_idx = pos_idx[order[n_obs:]]
    observed = np.zeros((n_drugs, n_targets))
    observed[observed_idx[:, 0], observed_idx[:, 1]] = 1.0
    return observed, positives, heldout_idx, np.eye(n_drugs), np.eye(n_targets)


def planted_cvae_instance(n_drugs: int = 10, n_diseases: int = 8,
                          holdout: tuple[int, int] | None = None):
    """Block-structured drug-disease matrix: two drug blocks, two disease blocks."""
    y = np.zeros((n_drugs, n_diseases))
    half_d, half_c = n_drugs // 2, n_diseases // 2
    y[:half_d, :half_c] = 1.0
    y[half_d:, half_c:] = 1.0
    full = y.copy()
    if holdout is not None:
        y[holdout] = 0.0
    x = np.eye(n_drugs)
    return x, y, full


def kgmtl_fixture(seed: int = 5, n_drugs: int = 10, n_targets: int = 10,
                  n_context: int = 10):
    """Two-group multi-task fixture: KG, molecules, proteins and pair labels.

    Drugs and targets connect to per-group context hubs, molecule features
    and protein motifs carry the same group, and both DTI and CPI labels
    are group agreement, so both tasks are fully learnable.
    """
    rng = derive_rng(seed, "kgmtl")
    kg = KnowledgeGraph()
    drugs = [f"KD{i}" for i in range(n_drugs)]
    targets = [f"KT{i}" for i in range(n_targets)]
    context = [f"KC{i}" for i in range(n_context)]
    for i, d in enumerate(drugs):
        kg.add_entity(d, f"Drug {i}", "drug")
    for i, t in enumerate(targets):
        kg.add_entity(t, f"Target {i}", "target")
    for i, c in enumerate(context):
        kg.add_entity(c, f"Context {i}", "other")
    group = {}
    half = n_context // 2
    for i, d in enumerate(drugs):
        group[d] = i % 2
        for j in range(half):
            if rng.random() < 0.6:
                kg.add_triple(d, "drug-context", context[group[d] * half + j])
    for i, t in enumerate(targets):
        group[t] = i % 2
        for j in range(half):
            if rng.random() < 0.6:
                kg.add_triple(t, "target-context", context[group[t] * half + j])

    molecules = {}
    for d in drugs:
        n_atoms = int(rng.integers(3, 6))
        atoms = 0.05 * rng.normal(size=(n_atoms, ATOM_FEATURE_DIM))
        atoms[:, group[d]] += 1.0
        molecules[d] = MoleculeGraph(atoms=atoms, bonds=[(k, k + 1) for k in range(n_atoms - 1)])

    motifs = ("AAAA", "WWWW")
    proteins = {}
    letters = "CDEFGHIKLMNPQRSTVY"
    for t in targets:
        length = int(rng.integers(12, 20))
        seq = "".join(letters[int(rng.integers(0, len(letters)))] for _ in range(length))
        pos = int(rng.integers(0, length - 4))
        proteins[t] = ProteinSequence(t, seq[:pos] + motifs[group[t]] + seq[pos + 4:])

    dti = [(d, t, int(group[d] == group[t])) for d in drugs for t in targets]
    cpi = [(d, t, int(group[d] == group[t])) for d in drugs for t in targets]
    return kg, molecules, proteins, dti, cpi, group


def ppmi_graph_family() -> list[np.ndarray]:
    """Small symmetric test graphs (<= 6 nodes), including degenerate shapes."""
    graphs = [
        np.array([[0.0, 1.0], [1.0, 0.0]]),                      # single edge
        np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 2.0], [0.0, 2.0, 0.0]]),  # weighted path
        np.zeros((3, 3)),                                        # empty graph
    ]
    star = np.zeros((5, 5))
    star[0, 1:] = star[1:, 0] = 1.0
    graphs.append(star)
    cycle = np.zeros((6, 6))
    for i in range(6):
        cycle[i, (i + 1) % 6] = cycle[(i + 1) % 6, i] = 1.0
    graphs.append(cycle)
    isolated = np.zeros((4, 4))
    isolated[0, 1] = isolated[1, 0] = 1.0
    isolated[1, 2] = isolated[2, 1] = 3.0   # node 3 isolated
    graphs.append(isolated)
    for n in (4, 5, 6):
        rng = derive_rng(97, f"ppmi-random-{n}")
        a = rng.random((n, n))
        a = np.triu(a, 1)
        a = a + a.T
        a[a < 0.35] = 0.0
        graphs.append(a)
    complete = np.ones((5, 5)) - np.eye(5)
    graphs.append(complete)
    return graphs
