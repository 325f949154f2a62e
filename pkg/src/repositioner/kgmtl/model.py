"""Knowledge-graph / molecular multi-task model.

An RGCN over a KG subgraph feeds a drug-target head; a molecular GCN plus
a protein sequence CNN feed a compound-protein head; a shared unit mixes
the drug entity embedding with the molecule readout between two RGCN
layers so both tasks exchange drug information.  With the unit disabled
the two tasks are fully independent: parameters, RNG streams and
optimizer state never touch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data.entities import KnowledgeGraph, NotFoundError
from ..data.tables import ATOM_FEATURE_DIM, MoleculeGraph, ProteinSequence
from ..numerics import AdamState, Var, adam_step, concat, derive_rng, gather, glorot, stack

__all__ = [
    "KgMtlConfig",
    "Subgraph",
    "extract_subgraph",
    "rgcn_forward",
    "mol_gcn_readout",
    "protein_encode",
    "shared_unit_apply",
    "SharedUnitResult",
    "KgMtlModel",
    "train_kg_mtl",
    "predict_dti",
    "predict_cpi",
]


@dataclass(frozen=True)
class KgMtlConfig:
    hidden: int = 16
    rgcn_layers: int = 3
    shared_unit: bool = True
    shared_after_layer: int = 1
    protein_embed_dim: int = 8
    protein_channels: int = 8
    protein_kernels: tuple[int, ...] = (4, 8)
    subgraph_hops: int = 2
    node_budget: int = 400
    epochs: int = 60
    batch_size: int = 32
    lr: float = 5e-3
    tasks: tuple[str, ...] = ("dti", "cpi")

    def __post_init__(self):
        if self.rgcn_layers != 3:
            raise ValueError("the entity encoder is fixed at 3 relational layers")
        if not 0 < self.shared_after_layer < self.rgcn_layers:
            raise ValueError("shared unit must sit between two layers")
        for task in self.tasks:
            if task not in ("dti", "cpi"):
                raise ValueError(f"unknown task {task!r}")


@dataclass
class Subgraph:
    """Entity slice of a KG with per-relation mean-aggregation operators."""

    entity_ids: list[str]
    relations: list[str]
    operators: dict[str, np.ndarray]
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {e: i for i, e in enumerate(self.entity_ids)}

    def index(self, entity_id: str) -> int:
        if entity_id not in self._index:
            raise NotFoundError(f"entity {entity_id!r} not in the extracted subgraph")
        return self._index[entity_id]

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self._index


def extract_subgraph(kg: KnowledgeGraph, seed_ids, hops: int = 2,
                     budget: int = 400) -> Subgraph:
    """Union of bounded-hop neighbourhoods, capped at `budget` nodes (BFS order)."""
    frontier = [s for s in seed_ids if kg.has_entity(s)]
    keep: dict[str, None] = {}
    for s in frontier:
        keep.setdefault(s)
    for _ in range(hops):
        nxt = []
        for node in frontier:
            for idx in kg.incident_triples(node):
                t = kg.triples[idx]
                other = t.tail if t.head == node else t.head
                if other not in keep:
                    keep.setdefault(other)
                    nxt.append(other)
        frontier = nxt
    entity_ids = list(keep)[:budget]
    member = set(entity_ids)
    n = len(entity_ids)
    index = {e: i for i, e in enumerate(entity_ids)}

    counts: dict[str, np.ndarray] = {}
    for t in kg.triples:
        if t.head in member and t.tail in member:
            adj = counts.setdefault(t.relation, np.zeros((n, n)))
            adj[index[t.tail], index[t.head]] += 1.0   # message head -> tail
    operators = {}
    for rel, adj in counts.items():
        deg = adj.sum(axis=1)
        op = np.zeros_like(adj)
        nz = deg > 0
        op[nz] = adj[nz] / deg[nz, None]
        operators[rel] = op
    return Subgraph(entity_ids=entity_ids, relations=sorted(operators), operators=operators)


# ---------------------------------------------------------------------------
# forward components (tape-level, shared by training and inference)
# ---------------------------------------------------------------------------


def init_kgmtl_params(subgraph: Subgraph, config: KgMtlConfig, seed: int) -> dict[str, np.ndarray]:
    h = config.hidden
    params: dict[str, np.ndarray] = {}
    rng = derive_rng(seed, "kgmtl:entity")
    params["entity_emb"] = 0.3 * rng.standard_normal((len(subgraph.entity_ids), h))
    rng = derive_rng(seed, "kgmtl:rgcn")
    for l in range(config.rgcn_layers):
        for rel in subgraph.relations:
            params[f"rgcn.l{l}.rel.{rel}"] = glorot(rng, h, h)
        params[f"rgcn.l{l}.self"] = glorot(rng, h, h)
    rng = derive_rng(seed, "kgmtl:dti_head")
    params["dti_head.W0"] = glorot(rng, 2 * h, h)
    params["dti_head.b0"] = np.zeros(h)
    params["dti_head.W1"] = glorot(rng, h, 1)
    params["dti_head.b1"] = np.zeros(1)
    rng = derive_rng(seed, "kgmtl:molgcn")
    params["molgcn.W0"] = glorot(rng, ATOM_FEATURE_DIM, h)
    params["molgcn.b0"] = np.zeros(h)
    params["molgcn.W1"] = glorot(rng, h, h)
    params["molgcn.b1"] = np.zeros(h)
    rng = derive_rng(seed, "kgmtl:prot")
    pe, c = config.protein_embed_dim, config.protein_channels
    params["prot.embed"] = 0.3 * rng.standard_normal((21, pe))
    for w in config.protein_kernels:
        params[f"prot.k{w}.W"] = glorot(rng, w * pe, c)
        params[f"prot.k{w}.b"] = np.zeros(c)
    params["prot.out.W"] = glorot(rng, len(config.protein_kernels) * c, h)
    params["prot.out.b"] = np.zeros(h)
    rng = derive_rng(seed, "kgmtl:cpi_head")
    params["cpi_head.W0"] = glorot(rng, 2 * h, h)
    params["cpi_head.b0"] = np.zeros(h)
    params["cpi_head.W1"] = glorot(rng, h, 1)
    params["cpi_head.b1"] = np.zeros(1)
    if config.shared_unit:
        rng = derive_rng(seed, "kgmtl:unit")
        for name in ("dd", "dg", "gg", "gd"):
            params[f"unit.W{name}"] = np.ones(h) if name in ("dd", "gg") else np.zeros(h)
        for name in ("dd", "dg", "gg", "gd"):
            params[f"unit.P{name}"] = glorot(rng, h * h, h)
        params["unit.bd"] = np.zeros(h)
        params["unit.bg"] = np.zeros(h)
    return params


def _rgcn_span(leaves, subgraph: Subgraph, h: Var, layers, activation="relu") -> Var:
    for l in layers:
        total = h @ leaves[f"rgcn.l{l}.self"]
        for rel in subgraph.relations:
            total = total + Var(subgraph.operators[rel]) @ h @ leaves[f"rgcn.l{l}.rel.{rel}"]
        h = total.relu() if activation == "relu" else total
    return h


def rgcn_forward(subgraph: Subgraph, features: np.ndarray, params: dict,
                 n_layers: int = 3, activation: str = "relu") -> np.ndarray:
    """Relational graph convolution over the subgraph.

    Layer rule: x_i <- act( sum_r mean_{j in N_i^r} x_j W_r + x_i W_self );
    isolated nodes keep only the self term.
    """
    leaves = {k: Var(v) for k, v in params.items()}
    out = _rgcn_span(leaves, subgraph, Var(np.asarray(features, dtype=np.float64)),
                     range(n_layers), activation)
    return out.value


def _mol_readout(leaves, mol: MoleculeGraph) -> Var:
    adj = mol.adjacency() + np.eye(mol.num_atoms)
    h = Var(mol.atoms)
    h = (Var(adj) @ h @ leaves["molgcn.W0"] + leaves["molgcn.b0"]).relu()
    h = (Var(adj) @ h @ leaves["molgcn.W1"] + leaves["molgcn.b1"]).relu()
    return h.mean(axis=0)


def mol_gcn_readout(mol: MoleculeGraph, params: dict) -> np.ndarray:
    """Two neighbour-sum convolutions then a mean over atom embeddings."""
    leaves = {k: Var(v) for k, v in params.items()}
    return _mol_readout(leaves, mol).value


def _protein_vector(leaves, seq_idx: np.ndarray, config: KgMtlConfig) -> Var:
    emb = gather(leaves["prot.embed"], seq_idx)          # (T, pe)
    pooled = []
    T = len(seq_idx)
    for w in config.protein_kernels:
        if T < w:
            raise ValueError(f"sequence of length {T} shorter than kernel width {w}")
        windows = np.arange(T - w + 1)[:, None] + np.arange(w)[None, :]
        feats = gather(emb, windows).reshape(T - w + 1, w * config.protein_embed_dim)
        act = (feats @ leaves[f"prot.k{w}.W"] + leaves[f"prot.k{w}.b"]).relu()
        pooled.append(act.max(axis=0))                   # (channels,)
    joined = concat(pooled, axis=0)
    return joined @ leaves["prot.out.W"] + leaves["prot.out.b"]


def protein_encode(seq: ProteinSequence, params: dict, config: KgMtlConfig) -> np.ndarray:
    """Residue embeddings, parallel 1-D convolutions, global max pool."""
    leaves = {k: Var(v) for k, v in params.items()}
    return _protein_vector(leaves, seq.encode(), config).value


@dataclass
class SharedUnitResult:
    """First-stage mixes, the rank-1 cross matrix and the projections."""

    x_prime_d: np.ndarray
    x_prime_g: np.ndarray
    cross: np.ndarray
    x_out_d: np.ndarray
    x_out_g: np.ndarray


def _shared_unit(leaves, x_d: Var, x_g: Var):
    """Batched unit: inputs (B, h); outputs ((B, h), (B, h))."""
    b, h = x_d.shape
    xpd = leaves["unit.Wdd"] * x_d + leaves["unit.Wgd"] * x_g
    xpg = leaves["unit.Wgg"] * x_g + leaves["unit.Wdg"] * x_d
    cross = xpd.reshape(b, h, 1) * xpg.reshape(b, 1, h)
    cross_t = xpg.reshape(b, h, 1) * xpd.reshape(b, 1, h)
    flat = cross.reshape(b, h * h)
    flat_t = cross_t.reshape(b, h * h)
    x_out_d = flat @ leaves["unit.Pdd"] + flat_t @ leaves["unit.Pgd"] + leaves["unit.bd"]
    x_out_g = flat @ leaves["unit.Pgg"] + flat_t @ leaves["unit.Pdg"] + leaves["unit.bg"]
    return xpd, xpg, cross, x_out_d, x_out_g


def shared_unit_apply(x_d: np.ndarray, x_g: np.ndarray, params: dict) -> SharedUnitResult:
    """Apply the unit to one vector pair (or a batch of pairs)."""
    x_d = np.asarray(x_d, dtype=np.float64)
    x_g = np.asarray(x_g, dtype=np.float64)
    single = x_d.ndim == 1
    if single:
        x_d, x_g = x_d[None, :], x_g[None, :]
    if x_d.shape != x_g.shape:
        raise ValueError("entity and molecule embeddings must share the unit dimension")
    if x_d.shape[1] ** 2 != params["unit.Pdd"].shape[0]:
        raise ValueError("unit projection shape does not match the embedding dimension")
    leaves = {k: Var(v) for k, v in params.items()}
    xpd, xpg, cross, x_out_d, x_out_g = _shared_unit(leaves, Var(x_d), Var(x_g))
    take = (lambda a: a[0]) if single else (lambda a: a)
    return SharedUnitResult(
        x_prime_d=take(xpd.value), x_prime_g=take(xpg.value),
        cross=take(cross.value), x_out_d=take(x_out_d.value),
        x_out_g=take(x_out_g.value))


# ---------------------------------------------------------------------------
# the joint model
# ---------------------------------------------------------------------------


@dataclass
class KgMtlModel:
    params: dict[str, np.ndarray]
    config: KgMtlConfig
    subgraph: Subgraph
    molecules: dict[str, MoleculeGraph]
    proteins: dict[str, ProteinSequence]
    dti_loss_history: list[float] = field(default_factory=list)
    cpi_loss_history: list[float] = field(default_factory=list)


def _mid_entity_state(leaves, model_like, with_unit_drugs=None):
    """Entity matrix after the pre-unit RGCN layers, optionally unit-mixed.

    with_unit_drugs: ordered unique drug ids whose rows get replaced by the
    unit's entity-side output.  Returns (H_mid, dict drug -> unit x''_g Var).
    """
    config = model_like.config
    sub = model_like.subgraph
    h_mid = _rgcn_span(leaves, sub, leaves["entity_emb"],
                       range(config.shared_after_layer))
    unit_g: dict = {}
    if with_unit_drugs:
        idx = np.array([sub.index(d) for d in with_unit_drugs])
        x_d = gather(h_mid, idx)
        x_g = stack([_mol_readout(leaves, model_like.molecules[d])
                     for d in with_unit_drugs], axis=0)
        _, _, _, x_out_d, x_out_g = _shared_unit(leaves, x_d, x_g)
        place = np.zeros((len(sub.entity_ids), len(idx)))
        place[idx, np.arange(len(idx))] = 1.0
        h_mid = h_mid + Var(place) @ (x_out_d - x_d)
        unit_g = {"matrix": x_out_g, "order": list(with_unit_drugs)}
    return h_mid, unit_g


def _final_entity_state(leaves, model_like, with_unit_drugs=None):
    config = model_like.config
    h_mid, unit_g = _mid_entity_state(leaves, model_like, with_unit_drugs)
    h_final = _rgcn_span(leaves, model_like.subgraph, h_mid,
                         range(config.shared_after_layer, config.rgcn_layers))
    return h_final, unit_g


def _mlp_head(leaves, prefix: str, features: Var) -> Var:
    hidden = (features @ leaves[f"{prefix}.W0"] + leaves[f"{prefix}.b0"]).relu()
    return (hidden @ leaves[f"{prefix}.W1"] + leaves[f"{prefix}.b1"]).reshape(-1)


def _bce_with_logits(logits: Var, labels: np.ndarray) -> Var:
    return (logits.softplus() - Var(labels) * logits).mean()


def _unit_drugs_for(model_like, drug_ids) -> list[str]:
    if not model_like.config.shared_unit:
        return []
    seen: dict[str, None] = {}
    for d in drug_ids:
        if d in model_like.molecules and d in model_like.subgraph:
            seen.setdefault(d)
    return sorted(seen)


def dti_loss_and_grads(params, model_like, pairs, labels):
    """Logistic DTI loss over final entity embeddings (unit applied mid-stack)."""
    leaves = {k: Var(v, requires_grad=True) for k, v in params.items()}
    sub = model_like.subgraph
    unit_drugs = _unit_drugs_for(model_like, [d for d, _ in pairs])
    h_final, _ = _final_entity_state(leaves, model_like, unit_drugs)
    d_idx = np.array([sub.index(d) for d, _ in pairs])
    t_idx = np.array([sub.index(t) for _, t in pairs])
    feats = concat([gather(h_final, d_idx), gather(h_final, t_idx)], axis=1)
    loss = _bce_with_logits(_mlp_head(leaves, "dti_head", feats), labels)
    value = float(loss.value)
    if not np.isfinite(value):
        raise FloatingPointError("non-finite drug-target loss")
    loss.backward()
    return value, {k: v.grad for k, v in leaves.items() if v.grad is not None}


def cpi_loss_and_grads(params, model_like, pairs, labels):
    """Logistic CPI loss over molecule readouts (unit-mixed) and protein vectors."""
    leaves = {k: Var(v, requires_grad=True) for k, v in params.items()}
    compounds = [c for c, _ in pairs]
    unit_drugs = _unit_drugs_for(model_like, compounds)
    if unit_drugs:
        _, unit_g = _mid_entity_state(leaves, model_like, unit_drugs)
        g_matrix, order = unit_g["matrix"], unit_g["order"]
        pos = {d: i for i, d in enumerate(order)}
        comp_vecs = []
        for c in compounds:
            if c in pos:
                comp_vecs.append(gather(g_matrix, np.array([pos[c]])).reshape(-1))
            else:
                comp_vecs.append(_mol_readout(leaves, model_like.molecules[c]))
        comp = stack(comp_vecs, axis=0)
    else:
        comp = stack([_mol_readout(leaves, model_like.molecules[c]) for c in compounds],
                     axis=0)
    prot = stack([_protein_vector(leaves, model_like.proteins[p].encode(),
                                  model_like.config) for _, p in pairs], axis=0)
    feats = concat([comp, prot], axis=1)
    loss = _bce_with_logits(_mlp_head(leaves, "cpi_head", feats), labels)
    value = float(loss.value)
    if not np.isfinite(value):
        raise FloatingPointError("non-finite compound-protein loss")
    loss.backward()
    return value, {k: v.grad for k, v in leaves.items() if v.grad is not None}


def train_kg_mtl(kg: KnowledgeGraph, dti_pairs, cpi_pairs,
                 molecules: dict[str, MoleculeGraph],
                 proteins: dict[str, ProteinSequence],
                 config: KgMtlConfig = KgMtlConfig(), seed: int = 0) -> KgMtlModel:
    """Alternating minibatch training of both task losses.

    Every id in the pair lists must resolve (entities in the extracted
    subgraph, molecules and proteins in their tables).
    """
    seeds = [d for d, _, _ in dti_pairs] + [t for _, t, _ in dti_pairs]
    seeds += [c for c, _, _ in cpi_pairs]
    subgraph = extract_subgraph(kg, seeds, hops=config.subgraph_hops,
                                budget=config.node_budget)
    for d, t, _ in dti_pairs:
        subgraph.index(d), subgraph.index(t)
    for c, p, _ in cpi_pairs:
        if c not in molecules:
            raise NotFoundError(f"compound {c!r} has no molecule graph")
        if p not in proteins:
            raise NotFoundError(f"protein {p!r} has no sequence")
    if config.shared_unit:
        for d, _, _ in dti_pairs:
            if d not in molecules:
                raise NotFoundError(f"drug {d!r} has no molecule graph (shared unit active)")

    params = init_kgmtl_params(subgraph, config, seed)
    model = KgMtlModel(params=params, config=config, subgraph=subgraph,
                       molecules=molecules, proteins=proteins)
    state = AdamState()
    dti_rng = derive_rng(seed, "kgmtl:dti:batches")
    cpi_rng = derive_rng(seed, "kgmtl:cpi:batches")
    dti = list(dti_pairs)
    cpi = list(cpi_pairs)
    bs = config.batch_size
    for _ in range(config.epochs):
        epoch_dti, epoch_cpi = [], []
        dti_order = dti_rng.permutation(len(dti)) if ("dti" in config.tasks and dti) else []
        cpi_order = cpi_rng.permutation(len(cpi)) if ("cpi" in config.tasks and cpi) else []
        n_steps = max((len(dti_order) + bs - 1) // bs if len(dti_order) else 0,
                      (len(cpi_order) + bs - 1) // bs if len(cpi_order) else 0)
        for step in range(n_steps):
            lo = step * bs
            if len(dti_order) and lo < len(dti_order):
                chunk = [dti[i] for i in dti_order[lo:lo + bs]]
                pairs = [(d, t) for d, t, _ in chunk]
                labels = np.array([float(l) for _, _, l in chunk])
                value, grads = dti_loss_and_grads(params, model, pairs, labels)
                adam_step(params, grads, state, lr=config.lr)
                epoch_dti.append(value)
            if len(cpi_order) and lo < len(cpi_order):
                chunk = [cpi[i] for i in cpi_order[lo:lo + bs]]
                pairs = [(c, p) for c, p, _ in chunk]
                labels = np.array([float(l) for _, _, l in chunk])
                value, grads = cpi_loss_and_grads(params, model, pairs, labels)
                adam_step(params, grads, state, lr=config.lr)
                epoch_cpi.append(value)
        if epoch_dti:
            model.dti_loss_history.append(float(np.mean(epoch_dti)))
        if epoch_cpi:
            model.cpi_loss_history.append(float(np.mean(epoch_cpi)))
    return model


def predict_dti(model: KgMtlModel, drug: str, target: str) -> float:
    """Deterministic interaction probability, strictly inside (0, 1)."""
    leaves = {k: Var(v) for k, v in model.params.items()}
    sub = model.subgraph
    unit_drugs = _unit_drugs_for(model, [drug])
    h_final, _ = _final_entity_state(leaves, model, unit_drugs)
    d_idx = np.array([sub.index(drug)])
    t_idx = np.array([sub.index(target)])
    feats = concat([gather(h_final, d_idx), gather(h_final, t_idx)], axis=1)
    logit = float(_mlp_head(leaves, "dti_head", feats).value[0])
    logit = float(np.clip(logit, -30.0, 30.0))
    return float(1.0 / (1.0 + np.exp(-logit)))


def predict_cpi(model: KgMtlModel, compound: str, protein: str) -> float:
    if compound not in model.molecules:
        raise NotFoundError(f"unknown compound {compound!r}")
    if protein not in model.proteins:
        raise NotFoundError(f"unknown protein {protein!r}")
    leaves = {k: Var(v) for k, v in model.params.items()}
    unit_drugs = _unit_drugs_for(model, [compound])
    if unit_drugs:
        _, unit_g = _mid_entity_state(leaves, model, unit_drugs)
        comp = unit_g["matrix"].reshape(1, model.config.hidden)
    else:
        comp = stack([_mol_readout(leaves, model.molecules[compound])], axis=0)
    prot = stack([_protein_vector(leaves, model.proteins[protein].encode(),
                                  model.config)], axis=0)
    feats = concat([comp, prot], axis=1)
    logit = float(_mlp_head(leaves, "cpi_head", feats).value[0])
    logit = float(np.clip(logit, -30.0, 30.0))
    return float(1.0 / (1.0 + np.exp(-logit)))
