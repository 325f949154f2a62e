"""Per-model-kind training and serving pipelines.

Each pipeline turns a loaded Dataset into a persistable parameter payload
and rebuilds a ranker from that payload.  Disease-centric kinds rank
drugs for a disease; target-centric kinds rank drugs for a target.  All
hyperparameters echo into the artifact config.
"""

from __future__ import annotations

import numpy as np

from ..data.entities import EntityRef, NotFoundError
from ..data.loaders import Dataset
from ..kge import evaluate_hits, rank_candidates, train_rotate
from ..kge.rotate import RotateModel
from ..kgmtl import KgMtlConfig, predict_dti, train_kg_mtl
from ..kgmtl.model import KgMtlModel, extract_subgraph
from ..netembed import (
    ProximityConfig,
    ProximityFactorization,
    SnfConfig,
    ppmi_from_adjacency,
    snf_fuse,
    train_mda,
    train_sdae,
)
from ..numerics import derive_rng
from ..predictors import (
    HetGnnConfig,
    HetGraph,
    RankedList,
    compute_auroc,
    cvae_recommend,
    hetgnn_embed,
    skipgram_refine,
    train_classifier,
    train_cvae,
    train_hetgnn,
)
from ..predictors.cvae import CvaeModel
from ..predictors.classifier import LinearClassifier
from .artifacts import MODEL_KINDS, ArtifactPayload

__all__ = ["MODEL_KINDS", "DEFAULT_HYPERPARAMETERS", "train_model",
           "build_predictor", "evaluate_model"]

DRUG_SQUARE_LAYERS = (
    "chemical-similarity",
    "therapeutic-similarity",
    "target-seq-similarity",
    "go-bp-similarity",
    "go-cc-similarity",
    "go-mf-similarity",
    "drug-drug-interaction",
)

DEFAULT_HYPERPARAMETERS: dict[str, dict] = {
    "deepdr": {"restart": 0.98, "walk_steps": 10, "mda_bottleneck": 16,
               "mda_epochs": 150, "latent": 8, "beta_kl": 0.02,
               "cvae_epochs": 400, "cvae_hidden": 32,
               "association_layer": "drug-disease"},
    "hetdr": {"snf_neighbors": 5, "snf_iterations": 8, "sdae_hidden": 24,
              "sdae_epochs": 150, "corruption": 0.1, "lam": 1e-4,
              "hetgnn_epochs": 120, "neighbor_dim": 16, "out_dim": 16,
              "attention_dim": 8, "walk_count": 6, "walk_length": 12,
              "window": 3, "negatives": 5, "skipgram_epochs": 5,
              "similarity_neighbors": 3, "association_layer": "drug-disease"},
    "diskge": {"dim": 24, "gamma": 6.0, "temperature": 1.0, "negatives": 8,
               "epochs": 120, "batch_size": 256, "relation": "treats"},
    "tarkge": {"dim": 24, "gamma": 6.0, "temperature": 1.0, "negatives": 8,
               "epochs": 120, "batch_size": 256, "relation": "targets"},
    "deepdtnet": {"restart": 0.98, "walk_steps": 10, "sdae_bottleneck": 8,
                  "sdae_epochs": 100, "k": 4, "eps": 0.1, "lam": 0.01,
                  "pu_epochs": 250, "association_layer": "drug-target",
                  "ppi_layer": "protein-protein-interaction"},
    "aopedf": {"order_weights": [0.5, 0.3, 0.2], "dim": 16,
               "classifier_lam": 1e-4, "classifier_epochs": 250,
               "negatives_per_positive": 1, "association_layer": "drug-target"},
    "kgmtl": {"hidden": 8, "epochs": 30, "batch_size": 32, "lr": 1e-2,
              "protein_embed_dim": 6, "protein_channels": 6,
              "protein_kernels": [2, 4], "shared_unit": True,
              "association_layer": "drug-target"},
}


def _merged(kind: str, hyper: dict | None) -> dict:
    config = dict(DEFAULT_HYPERPARAMETERS[kind])
    if hyper:
        unknown = set(hyper) - set(config)
        if unknown:
            raise ValueError(f"unknown hyperparameters for {kind}: {sorted(unknown)}")
        config.update(hyper)
    return config


def _drug_square_matrices(dataset: Dataset) -> list[np.ndarray]:
    return [dataset.layers.layer(name).matrix for name in DRUG_SQUARE_LAYERS
            if name in dataset.layers.layers]


# ---------------------------------------------------------------------------
# deepdr: PPMI -> multi-network autoencoder -> collective VAE
# ---------------------------------------------------------------------------


def _train_deepdr(dataset: Dataset, seed: int, config: dict) -> dict[str, np.ndarray]:
    ppmis = [ppmi_from_adjacency(m, config["restart"], config["walk_steps"]).matrix
             for m in _drug_square_matrices(dataset)]
    _, code = train_mda(ppmis, bottleneck=config["mda_bottleneck"],
                        epochs=config["mda_epochs"], seed=seed)
    assoc = dataset.association(config["association_layer"])
    model = train_cvae(code, assoc.entries, latent_dim=config["latent"],
                       beta_kl=config["beta_kl"], epochs=config["cvae_epochs"],
                       seed=seed, hidden=config["cvae_hidden"],
                       drug_ids=assoc.row_ids, disease_ids=assoc.col_ids)
    params = dict(model.params)
    params["_code"] = code
    return params


def _deepdr_predictor(payload: ArtifactPayload, dataset: Dataset):
    config = payload.config["hyperparameters"]
    assoc = dataset.association(config["association_layer"])
    params = {k: v for k, v in payload.params.items() if not k.startswith("_")}
    code = payload.params["_code"]
    model = CvaeModel(params=params, latent_dim=config["latent"],
                      feature_dim=code.shape[1], n_diseases=len(assoc.col_ids),
                      hidden=config["cvae_hidden"], drug_ids=assoc.row_ids,
                      disease_ids=assoc.col_ids, y=assoc.entries)
    refs = {r.id: r for r in dataset.catalog.entities("drug")}

    def rank(query: EntityRef, top_n: int) -> RankedList:
        ranking = cvae_recommend(model, query, top_n, drug_refs=refs)
        ranking.model_id = payload.kind
        return ranking

    return rank


# ---------------------------------------------------------------------------
# hetdr: SNF -> SDAE -> heterogeneous GNN -> skip-gram refinement
# ---------------------------------------------------------------------------


def _hetdr_graph(dataset: Dataset, fused: np.ndarray, config: dict):
    assoc = dataset.association(config["association_layer"])
    drugs, diseases = assoc.row_ids, assoc.col_ids
    node_ids = list(drugs) + list(diseases)
    node_kind = {d: "drug" for d in drugs}
    node_kind.update({c: "disease" for c in diseases})
    edges = []
    for i, d in enumerate(drugs):
        for j, c in enumerate(diseases):
            if assoc.entries[i, j] == 1.0:
                edges.append((d, c, "assoc"))
    k = config["similarity_neighbors"]
    for i, d in enumerate(drugs):
        row = fused[i].copy()
        row[i] = -np.inf
        for j in np.argsort(-row, kind="stable")[:k]:
            if row[j] > 0:
                edges.append((d, drugs[j], "drug-sim"))
    feats = dataset.aux.disease_features
    if feats is not None:
        dis_vecs = np.stack([feats.vector(c) for c in diseases])
        norms = np.linalg.norm(dis_vecs, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        cos = (dis_vecs / norms) @ (dis_vecs / norms).T
        for i, c in enumerate(diseases):
            row = cos[i].copy()
            row[i] = -np.inf
            for j in np.argsort(-row, kind="stable")[:k]:
                edges.append((c, diseases[j], "disease-sim"))
    return HetGraph(node_ids=node_ids, node_kind=node_kind, edges=edges), assoc


def _train_hetdr(dataset: Dataset, seed: int, config: dict) -> dict[str, np.ndarray]:
    mats = _drug_square_matrices(dataset)
    fused = snf_fuse(mats, SnfConfig(neighbors=config["snf_neighbors"],
                                     iterations=config["snf_iterations"]))
    n = fused.shape[0]
    dims = [n, config["sdae_hidden"], n]
    _, drug_feats = train_sdae(fused, dims, corruption=config["corruption"],
                               lam=config["lam"], epochs=config["sdae_epochs"],
                               seed=seed)
    graph, assoc = _hetdr_graph(dataset, fused, config)
    feats = {d: drug_feats[i] for i, d in enumerate(assoc.row_ids)}
    disease_table = dataset.aux.disease_features
    for c in assoc.col_ids:
        feats[c] = disease_table.vector(c) if disease_table and c in disease_table \
            else np.zeros(16)

    pos = [(assoc.row_ids[i], assoc.col_ids[j])
           for i, j in np.argwhere(assoc.entries == 1.0)]
    rng = derive_rng(seed, "hetdr:negatives")
    neg = []
    for _ in range(len(pos)):
        i = int(rng.integers(0, len(assoc.row_ids)))
        j = int(rng.integers(0, len(assoc.col_ids)))
        neg.append((assoc.row_ids[i], assoc.col_ids[j]))
    pairs = pos + neg
    labels = np.array([1.0] * len(pos) + [0.0] * len(neg))
    gnn_config = HetGnnConfig(layers=2, neighbor_dim=config["neighbor_dim"],
                              out_dim=config["out_dim"],
                              attention_dim=config["attention_dim"])
    params, _ = train_hetgnn(graph, feats, gnn_config, pairs, labels,
                             epochs=config["hetgnn_epochs"], seed=seed)
    overall = hetgnn_embed(graph, feats, params, gnn_config)
    refined, _, _ = skipgram_refine(
        graph, [["drug", "disease", "drug"], ["disease", "drug", "disease"]],
        overall, walk_count=config["walk_count"], walk_length=config["walk_length"],
        window=config["window"], negatives=config["negatives"],
        epochs=config["skipgram_epochs"], seed=seed)
    return {"embeddings": refined}


def _hetdr_predictor(payload: ArtifactPayload, dataset: Dataset):
    config = payload.config["hyperparameters"]
    assoc = dataset.association(config["association_layer"])
    emb = payload.params["embeddings"]
    drugs, diseases = assoc.row_ids, assoc.col_ids
    refs = {r.id: r for r in dataset.catalog.entities("drug")}

    def rank(query: EntityRef, top_n: int) -> RankedList:
        if query.id not in diseases:
            raise NotFoundError(f"unknown disease {query.id!r}")
        j = diseases.index(query.id)
        dis_vec = emb[len(drugs) + j]
        scored = []
        for i, d in enumerate(drugs):
            if assoc.entries[i, j] == 1.0:
                continue
            ref = refs.get(d) or EntityRef(d, d, "drug")
            scored.append((ref, float(emb[i] @ dis_vec)))
        return RankedList.from_scores(query, scored, top_n, model_id=payload.kind)

    return rank


# ---------------------------------------------------------------------------
# diskge / tarkge: rotation embedding over the knowledge graph
# ---------------------------------------------------------------------------


def _train_kge(dataset: Dataset, seed: int, config: dict) -> dict[str, np.ndarray]:
    if dataset.kg is None:
        raise NotFoundError("dataset has no knowledge graph")
    model = train_rotate(dataset.kg, k=config["dim"], gamma=config["gamma"],
                         tau=config["temperature"], n_neg=config["negatives"],
                         epochs=config["epochs"], batch_size=config["batch_size"],
                         seed=seed)
    return {"re": model.re, "im": model.im, "phases": model.phases}


def _kge_model(payload: ArtifactPayload, dataset: Dataset) -> RotateModel:
    config = payload.config["hyperparameters"]
    return RotateModel(entity_ids=dataset.kg.entity_ids(),
                       relation_ids=dataset.kg.relations,
                       re=payload.params["re"], im=payload.params["im"],
                       phases=payload.params["phases"], gamma=config["gamma"],
                       temperature=config["temperature"], n_neg=config["negatives"])


def _kge_predictor(payload: ArtifactPayload, dataset: Dataset):
    config = payload.config["hyperparameters"]
    model = _kge_model(payload, dataset)

    def rank(query: EntityRef, top_n: int) -> RankedList:
        return rank_candidates(model, dataset.kg, query, config["relation"],
                               "drug", top_n, filter_known=True,
                               model_id=payload.kind)

    return rank


# ---------------------------------------------------------------------------
# deepdtnet: per-network SDAE features + PU completion
# ---------------------------------------------------------------------------


def _train_deepdtnet(dataset: Dataset, seed: int, config: dict) -> dict[str, np.ndarray]:
    from ..predictors import pu_complete

    drug_feats = []
    for m in _drug_square_matrices(dataset):
        ppmi = ppmi_from_adjacency(m, config["restart"], config["walk_steps"])
        n = ppmi.matrix.shape[0]
        dims = [n, config["sdae_bottleneck"], n]
        _, feats = train_sdae(ppmi, dims, corruption=0.1, lam=1e-4,
                              epochs=config["sdae_epochs"], seed=seed)
        drug_feats.append(feats)
    xd = np.concatenate(drug_feats, axis=1)

    ppi = dataset.layers.layer(config["ppi_layer"]).matrix
    ppi_ppmi = ppmi_from_adjacency(ppi, config["restart"], config["walk_steps"])
    n_t = ppi.shape[0]
    dims = [n_t, config["sdae_bottleneck"], n_t]
    _, xt = train_sdae(ppi_ppmi, dims, corruption=0.1, lam=1e-4,
                       epochs=config["sdae_epochs"], seed=seed)

    assoc = dataset.association(config["association_layer"])
    model = pu_complete(assoc.entries, xd, xt, k=config["k"], eps=config["eps"],
                        lam=config["lam"], epochs=config["pu_epochs"], seed=seed)
    return {"p": model.p, "o": model.o, "xd": xd, "xt": xt}


def _deepdtnet_predictor(payload: ArtifactPayload, dataset: Dataset):
    config = payload.config["hyperparameters"]
    assoc = dataset.association(config["association_layer"])
    xd, xt = payload.params["xd"], payload.params["xt"]
    scores = xd @ payload.params["p"] @ payload.params["o"].T @ xt.T
    refs = {r.id: r for r in dataset.catalog.entities("drug")}

    def rank(query: EntityRef, top_n: int) -> RankedList:
        if query.id not in assoc.col_ids:
            raise NotFoundError(f"unknown target {query.id!r}")
        j = assoc.col_ids.index(query.id)
        scored = []
        for i, d in enumerate(assoc.row_ids):
            if assoc.entries[i, j] == 1.0:
                continue
            ref = refs.get(d) or EntityRef(d, d, "drug")
            scored.append((ref, float(scores[i, j])))
        return RankedList.from_scores(query, scored, top_n, model_id=payload.kind)

    return rank


# ---------------------------------------------------------------------------
# aopedf: proximity embedding of the assembled heterogeneous network + head
# ---------------------------------------------------------------------------


def _aopedf_adjacency(dataset: Dataset, config: dict):
    assoc = dataset.association(config["association_layer"])
    dd = dataset.association("drug-disease")
    drugs, targets = assoc.row_ids, assoc.col_ids
    diseases = dd.col_ids
    drug_block = np.mean(_drug_square_matrices(dataset), axis=0)
    n_d, n_t, n_c = len(drugs), len(targets), len(diseases)
    n = n_d + n_t + n_c
    adj = np.zeros((n, n))
    adj[:n_d, :n_d] = drug_block
    adj[:n_d, n_d:n_d + n_t] = assoc.entries
    adj[n_d:n_d + n_t, :n_d] = assoc.entries.T
    adj[:n_d, n_d + n_t:] = dd.entries
    adj[n_d + n_t:, :n_d] = dd.entries.T
    if "protein-protein-interaction" in dataset.layers.layers:
        adj[n_d:n_d + n_t, n_d:n_d + n_t] = \
            dataset.layers.layer("protein-protein-interaction").matrix
    node_order = list(drugs) + list(targets) + list(diseases)
    return adj, node_order, assoc


def _train_aopedf(dataset: Dataset, seed: int, config: dict) -> dict[str, np.ndarray]:
    adj, node_order, assoc = _aopedf_adjacency(dataset, config)
    prox = ProximityFactorization(adj).embed(
        ProximityConfig(weights=tuple(config["order_weights"]), dim=config["dim"]))
    emb = prox.content
    n_d = len(assoc.row_ids)
    pos = list(np.argwhere(assoc.entries == 1.0))
    rng = derive_rng(seed, "aopedf:negatives")
    features, labels = [], []
    for i, j in pos:
        features.append(np.concatenate([emb[i], emb[n_d + j]]))
        labels.append(1.0)
        for _ in range(config["negatives_per_positive"]):
            ii = int(rng.integers(0, len(assoc.row_ids)))
            jj = int(rng.integers(0, len(assoc.col_ids)))
            features.append(np.concatenate([emb[ii], emb[n_d + jj]]))
            labels.append(0.0)
    head = train_classifier(np.array(features), np.array(labels),
                            lam=config["classifier_lam"],
                            epochs=config["classifier_epochs"], seed=seed)
    return {"embeddings": emb, "head_w": head.weights,
            "head_b": np.array([head.bias])}


def _aopedf_predictor(payload: ArtifactPayload, dataset: Dataset):
    config = payload.config["hyperparameters"]
    assoc = dataset.association(config["association_layer"])
    emb = payload.params["embeddings"]
    head = LinearClassifier(weights=payload.params["head_w"],
                            bias=float(payload.params["head_b"][0]),
                            lam=config["classifier_lam"])
    n_d = len(assoc.row_ids)
    refs = {r.id: r for r in dataset.catalog.entities("drug")}

    def rank(query: EntityRef, top_n: int) -> RankedList:
        if query.id not in assoc.col_ids:
            raise NotFoundError(f"unknown target {query.id!r}")
        j = assoc.col_ids.index(query.id)
        scored = []
        for i, d in enumerate(assoc.row_ids):
            if assoc.entries[i, j] == 1.0:
                continue
            feats = np.concatenate([emb[i], emb[n_d + j]])
            ref = refs.get(d) or EntityRef(d, d, "drug")
            scored.append((ref, float(head.decision(feats[None, :])[0])))
        return RankedList.from_scores(query, scored, top_n, model_id=payload.kind)

    return rank


# ---------------------------------------------------------------------------
# kgmtl: multi-task model over the KG plus molecule/protein tables
# ---------------------------------------------------------------------------


def _kgmtl_config(config: dict) -> KgMtlConfig:
    return KgMtlConfig(hidden=config["hidden"], epochs=config["epochs"],
                       batch_size=config["batch_size"], lr=config["lr"],
                       protein_embed_dim=config["protein_embed_dim"],
                       protein_channels=config["protein_channels"],
                       protein_kernels=tuple(config["protein_kernels"]),
                       shared_unit=config["shared_unit"])


def _train_kgmtl(dataset: Dataset, seed: int, config: dict) -> dict[str, np.ndarray]:
    model = train_kg_mtl(dataset.kg, dataset.dti_pairs, dataset.cpi_pairs,
                         dataset.aux.molecules, dataset.aux.proteins,
                         _kgmtl_config(config), seed=seed)
    return dict(model.params)


def _kgmtl_predictor(payload: ArtifactPayload, dataset: Dataset):
    config = payload.config["hyperparameters"]
    kconfig = _kgmtl_config(config)
    seeds = [d for d, _, _ in dataset.dti_pairs] + [t for _, t, _ in dataset.dti_pairs]
    seeds += [c for c, _, _ in dataset.cpi_pairs]
    subgraph = extract_subgraph(dataset.kg, seeds, hops=kconfig.subgraph_hops,
                                budget=kconfig.node_budget)
    model = KgMtlModel(params=dict(payload.params), config=kconfig, subgraph=subgraph,
                       molecules=dataset.aux.molecules, proteins=dataset.aux.proteins)
    assoc = dataset.association(config["association_layer"])
    refs = {r.id: r for r in dataset.catalog.entities("drug")}

    def rank(query: EntityRef, top_n: int) -> RankedList:
        if query.id not in assoc.col_ids or query.id not in subgraph:
            raise NotFoundError(f"unknown target {query.id!r}")
        j = assoc.col_ids.index(query.id)
        scored = []
        for i, d in enumerate(assoc.row_ids):
            if assoc.entries[i, j] == 1.0 or d not in subgraph:
                continue
            ref = refs.get(d) or EntityRef(d, d, "drug")
            scored.append((ref, predict_dti(model, d, query.id)))
        return RankedList.from_scores(query, scored, top_n, model_id=payload.kind)

    return rank


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_TRAINERS = {
    "deepdr": _train_deepdr,
    "hetdr": _train_hetdr,
    "diskge": _train_kge,
    "tarkge": _train_kge,
    "deepdtnet": _train_deepdtnet,
    "aopedf": _train_aopedf,
    "kgmtl": _train_kgmtl,
}

_PREDICTORS = {
    "deepdr": _deepdr_predictor,
    "hetdr": _hetdr_predictor,
    "diskge": _kge_predictor,
    "tarkge": _kge_predictor,
    "deepdtnet": _deepdtnet_predictor,
    "aopedf": _aopedf_predictor,
    "kgmtl": _kgmtl_predictor,
}


def train_model(kind: str, dataset: Dataset, seed: int,
                hyper: dict | None = None) -> ArtifactPayload:
    """Train one model kind and wrap it as a persistable payload."""
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    config = _merged(kind, hyper)
    params = _TRAINERS[kind](dataset, seed, config)
    return ArtifactPayload(kind=kind, params=params,
                           config={"hyperparameters": config, "seed": seed},
                           fingerprint=dataset.fingerprint())


def build_predictor(payload: ArtifactPayload, dataset: Dataset):
    """Rebuild the ranking closure for a persisted payload."""
    return _PREDICTORS[payload.kind](payload, dataset)


def evaluate_model(kind: str, dataset: Dataset, seed: int,
                   holdout_fraction: float = 0.1, hyper: dict | None = None) -> dict:
    """Hold out a slice of the supervision signal, retrain, report metrics."""
    config = _merged(kind, hyper)
    rng = derive_rng(seed, f"eval:{kind}")
    if kind in ("diskge", "tarkge"):
        kg = dataset.kg
        triples = [(t.head, t.relation, t.tail) for t in kg.triples]
        order = rng.permutation(len(triples))
        n_hold = max(1, int(holdout_fraction * len(triples)))
        heldout = [triples[i] for i in order[:n_hold]]
        train = [triples[i] for i in order[n_hold:]]
        model = train_rotate(kg, k=config["dim"], gamma=config["gamma"],
                             tau=config["temperature"], n_neg=config["negatives"],
                             epochs=config["epochs"], batch_size=config["batch_size"],
                             seed=seed, triples=train)
        return evaluate_hits(model, kg, heldout, ks=(1, 3, 10))

    assoc = dataset.association(config["association_layer"])
    entries = assoc.entries.copy()
    pos = np.argwhere(entries == 1.0)
    order = rng.permutation(len(pos))
    n_hold = max(1, int(holdout_fraction * len(pos)))
    heldout = pos[order[:n_hold]]
    masked = entries.copy()
    masked[heldout[:, 0], heldout[:, 1]] = 0.0

    import copy
    trimmed = copy.copy(dataset)
    layer = dataset.layers.layer(config["association_layer"])
    from ..data.tables import LayeredNetworkSet, NetworkLayer
    new_layer = NetworkLayer(name=layer.name, row_kind=layer.row_kind,
                             col_kind=layer.col_kind, row_ids=layer.row_ids,
                             col_ids=layer.col_ids, matrix=masked,
                             symmetric=layer.symmetric)
    new_layers = dict(dataset.layers.layers)
    new_layers[config["association_layer"]] = new_layer
    trimmed.layers = LayeredNetworkSet(layers=new_layers, vocab=dataset.layers.vocab)

    payload = train_model(kind, trimmed, seed, hyper)
    ranker = build_predictor(payload, trimmed)
    negatives = np.argwhere(entries == 0.0)
    neg_pick = negatives[rng.permutation(len(negatives))[: 4 * len(heldout)]]
    scores, labels = [], []
    kind_of_query = "disease" if MODEL_KINDS[kind] == "disease-centric" else "target"
    cols = assoc.col_ids
    by_col: dict[int, dict[str, float]] = {}
    for (i, j), label in [((i, j), 1) for i, j in heldout] + \
                         [((i, j), 0) for i, j in neg_pick]:
        if j not in by_col:
            query = dataset.catalog.get(kind_of_query, cols[j]) \
                or EntityRef(cols[j], cols[j], kind_of_query)
            try:
                ranking = ranker(query, len(assoc.row_ids))
            except NotFoundError:
                by_col[j] = {}
                continue
            by_col[j] = {ref.id: s for ref, s in ranking.entries}
        drug_id = assoc.row_ids[i]
        if drug_id in by_col[j]:
            scores.append(by_col[j][drug_id])
            labels.append(label)
    if len(set(labels)) < 2:
        return {"auroc": float("nan"), "evaluated_pairs": len(labels)}
    return {"auroc": compute_auroc(np.array(scores), np.array(labels)),
            "evaluated_pairs": len(labels)}
