"""Meta-path guided random walks and skip-gram embedding refinement.

Walks are constrained to repeat a node-kind sequence; (center, context)
pairs within a window train the embeddings by negative sampling, with
negatives drawn from the context node's kind partition.  The exact
softmax over a kind partition is exposed for evaluation.
"""

from __future__ import annotations

import numpy as np

from ..numerics import AdamState, Var, adam_step, derive_rng, gather
from .hetgnn import HetGraph

__all__ = ["metapath_walks", "skipgram_softmax", "skipgram_loss_and_grads",
           "skipgram_refine"]


def _kind_neighbors(graph: HetGraph):
    """node -> kind -> sorted neighbour list (deterministic walk support)."""
    table: dict[str, dict[str, list[str]]] = {n: {} for n in graph.node_ids}
    for u, v, _ in graph.edges:
        table[u].setdefault(graph.node_kind[v], []).append(v)
        table[v].setdefault(graph.node_kind[u], []).append(u)
    for node in table:
        for kind in table[node]:
            table[node][kind] = sorted(set(table[node][kind]))
    return table


def metapath_walks(graph: HetGraph, metapaths: list[list[str]], walk_count: int,
                   walk_length: int, seed: int):
    """Generate kind-constrained walks; returns (walks, skipped_start_count).

    Each meta-path is a kind sequence whose first and last kinds match so
    it can cycle (drug-disease-drug, ...).  Walks from nodes with no
    neighbour of the required kind are skipped and counted.
    """
    kinds = set(graph.kinds())
    for path in metapaths:
        for kind in path:
            if kind not in kinds:
                raise ValueError(f"meta-path references absent node kind {kind!r}")
    nbrs = _kind_neighbors(graph)
    rng = derive_rng(seed, "skipgram:walks")
    walks = []
    skipped = 0
    for path in metapaths:
        if len(path) < 2:
            raise ValueError("meta-paths need at least two kinds")
        starts = [n for n in graph.node_ids if graph.node_kind[n] == path[0]]
        for _ in range(walk_count):
            for start in starts:
                if not nbrs[start].get(path[1]):
                    skipped += 1
                    continue
                walk = [start]
                step = 0
                while len(walk) < walk_length:
                    want = path[1 + (step % (len(path) - 1))]
                    choices = nbrs[walk[-1]].get(want, [])
                    if not choices:
                        break
                    walk.append(choices[int(rng.integers(0, len(choices)))])
                    step += 1
                if len(walk) > 1:
                    walks.append(walk)
    return walks, skipped


def skipgram_softmax(center_vec: np.ndarray, context_matrix: np.ndarray) -> np.ndarray:
    """Exact P(context_j | center) over one kind partition's context rows."""
    logits = context_matrix @ center_vec
    logits = logits - logits.max()
    e = np.exp(logits)
    return e / e.sum()


def skipgram_loss_and_grads(params, center_idx, context_idx, negative_idx):
    """Negative-sampling loss: -log s(c_ctx . v) - sum -log s(-c_neg . v)."""
    v = Var(params["v"], requires_grad=True)
    c = Var(params["c"], requires_grad=True)
    centers = gather(v, center_idx)            # (B, d)
    contexts = gather(c, context_idx)          # (B, d)
    negatives = gather(c, negative_idx)        # (B, K, d)
    pos_logits = (centers * contexts).sum(axis=1)
    neg_logits = (negatives * centers.reshape(centers.shape[0], 1, centers.shape[1])).sum(axis=2)
    loss = ((-pos_logits).softplus().sum() + neg_logits.softplus().sum()) / float(len(center_idx))
    value = float(loss.value)
    if not np.isfinite(value):
        raise FloatingPointError("non-finite skip-gram loss")
    loss.backward()
    return value, {"v": v.grad, "c": c.grad}


def skipgram_refine(graph: HetGraph, metapaths, embeddings: np.ndarray,
                    walk_count: int = 10, walk_length: int = 20, window: int = 3,
                    negatives: int = 5, epochs: int = 5, seed: int = 0,
                    lr: float = 2.5e-2):
    """Refine node embeddings in place of the provided table.

    Returns (refined node embeddings, context embeddings, stats) where
    stats records walk and pair counts plus skipped isolated starts.
    """
    walks, skipped = metapath_walks(graph, metapaths, walk_count, walk_length, seed)
    pairs: list[tuple[int, int]] = []
    for walk in walks:
        idx = [graph.index(n) for n in walk]
        for i, center in enumerate(idx):
            for j in range(max(0, i - window), min(len(idx), i + window + 1)):
                if j != i:
                    pairs.append((center, idx[j]))
    kind_partition: dict[str, np.ndarray] = {}
    for kind in graph.kinds():
        members = [graph.index(n) for n in graph.node_ids if graph.node_kind[n] == kind]
        kind_partition[kind] = np.array(members, dtype=np.intp)
    node_kind_by_index = [graph.node_kind[n] for n in graph.node_ids]

    params = {
        "v": np.asarray(embeddings, dtype=np.float64).copy(),
        "c": 0.1 * derive_rng(seed, "skipgram:context").standard_normal(embeddings.shape),
    }
    state = AdamState()
    neg_rng = derive_rng(seed, "skipgram:negatives")
    history = []
    if pairs:
        center_idx = np.array([p[0] for p in pairs], dtype=np.intp)
        context_idx = np.array([p[1] for p in pairs], dtype=np.intp)
        for _ in range(epochs):
            negative_idx = np.empty((len(pairs), negatives), dtype=np.intp)
            for row, (_, ctx) in enumerate(pairs):
                partition = kind_partition[node_kind_by_index[ctx]]
                negative_idx[row] = partition[neg_rng.integers(0, len(partition), negatives)]
            value, grads = skipgram_loss_and_grads(params, center_idx, context_idx, negative_idx)
            adam_step(params, grads, state, lr=lr)
            history.append(value)
    stats = {"walks": len(walks), "pairs": len(pairs), "skipped_starts": skipped,
             "loss_history": history}
    return params["v"], params["c"], stats
