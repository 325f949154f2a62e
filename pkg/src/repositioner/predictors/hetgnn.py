"""Attribute-aware heterogeneous graph embedding.

Per-edge-type neighbourhoods are aggregated through shared layer weights,
an attention softmax over edge types gates the aggregated channels, and
the overall embedding adds type-specific base and feature transforms.
The edge-type-stacked attention follows from the scalar softmax in the
source formulation being degenerate; see the package docs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numerics import AdamState, Var, adam_step, derive_rng, glorot, stack

__all__ = ["HetGraph", "HetGnnConfig", "init_hetgnn_params", "hetgnn_embed",
           "hetgnn_link_loss", "train_hetgnn"]


@dataclass
class HetGraph:
    """Typed nodes and undirected, type-labelled edges."""

    node_ids: list[str]
    node_kind: dict[str, str]
    edges: list[tuple[str, str, str]]
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {n: i for i, n in enumerate(self.node_ids)}
        for u, v, _ in self.edges:
            if u not in self._index or v not in self._index:
                raise ValueError(f"edge ({u}, {v}) references unknown node")

    def index(self, node_id: str) -> int:
        return self._index[node_id]

    @property
    def edge_types(self) -> list[str]:
        seen: dict[str, None] = {}
        for _, _, t in self.edges:
            seen.setdefault(t)
        return list(seen)

    def kinds(self) -> list[str]:
        seen: dict[str, None] = {}
        for n in self.node_ids:
            seen.setdefault(self.node_kind[n])
        return list(seen)

    def mean_adjacency(self, edge_type: str) -> np.ndarray:
        """Row-normalized neighbour-mean operator for one edge type.

        Rows of nodes with no neighbours of this type are all zero (the
        empty mean is the zero vector).
        """
        n = len(self.node_ids)
        adj = np.zeros((n, n))
        for u, v, t in self.edges:
            if t != edge_type:
                continue
            iu, iv = self._index[u], self._index[v]
            adj[iu, iv] = 1.0
            adj[iv, iu] = 1.0
        deg = adj.sum(axis=1)
        out = np.zeros_like(adj)
        nz = deg > 0
        out[nz] = adj[nz] / deg[nz, None]
        return out

    def placement(self, kind: str) -> tuple[np.ndarray, list[str]]:
        """One-hot matrix dropping kind-local rows into global node order."""
        members = [n for n in self.node_ids if self.node_kind[n] == kind]
        place = np.zeros((len(self.node_ids), len(members)))
        for j, n in enumerate(members):
            place[self._index[n], j] = 1.0
        return place, members


@dataclass(frozen=True)
class HetGnnConfig:
    layers: int = 2
    neighbor_dim: int = 16     # f_n
    out_dim: int = 16          # f_o
    attention_dim: int = 8     # d_a
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError("need at least one aggregation layer")
        if not np.isfinite(self.alpha) or not np.isfinite(self.beta):
            raise ValueError("alpha and beta must be finite")


def init_hetgnn_params(graph: HetGraph, feature_dims: dict[str, int],
                       config: HetGnnConfig, seed: int) -> dict[str, np.ndarray]:
    rng = derive_rng(seed, "hetgnn:init")
    params: dict[str, np.ndarray] = {}
    for kind in graph.kinds():
        if kind not in feature_dims:
            raise ValueError(f"no feature dimension declared for node kind {kind!r}")
        d = feature_dims[kind]
        params[f"g.{kind}"] = glorot(rng, d, config.neighbor_dim)
        params[f"b.{kind}"] = glorot(rng, d, config.out_dim)
        params[f"D.{kind}"] = glorot(rng, d, config.out_dim)
    for l in range(config.layers):
        params[f"W{l}"] = glorot(rng, config.neighbor_dim, config.neighbor_dim)
    params["M"] = glorot(rng, config.neighbor_dim, config.out_dim)
    params["attn.w"] = glorot(rng, config.attention_dim, 1, shape=(config.attention_dim,))
    params["attn.W"] = glorot(rng, config.attention_dim, config.neighbor_dim,
                              shape=(config.attention_dim, config.neighbor_dim))
    return params


def _forward(leaves, graph: HetGraph, features: dict[str, np.ndarray],
             config: HetGnnConfig):
    kinds = graph.kinds()
    feature_mats = {}
    for kind in kinds:
        place, members = graph.placement(kind)
        for node in members:
            if node not in features:
                raise ValueError(f"node {node!r} has no features")
        feature_mats[kind] = (place, np.stack([features[n] for n in members]))

    def typed_transform(prefix):
        total = None
        for kind in kinds:
            place, x = feature_mats[kind]
            term = Var(place) @ (Var(x) @ leaves[f"{prefix}.{kind}"])
            total = term if total is None else total + term
        return total

    h0 = typed_transform("g")
    etypes = graph.edge_types
    means = [graph.mean_adjacency(t) for t in etypes]
    channels = []
    for mean in means:
        h = h0
        for l in range(config.layers):
            h = (Var(mean) @ h @ leaves[f"W{l}"]).relu()
        channels.append(h)

    # attention over edge types: softmax of w^T tanh(W n) per channel
    logits = [(h @ leaves["attn.W"].T).tanh() @ leaves["attn.w"] for h in channels]
    gate = stack(logits, axis=1).softmax(axis=1)      # (n, E)
    stacked = stack(channels, axis=1)                 # (n, E, f_n)
    n_nodes = len(graph.node_ids)
    attended = (stacked * gate.reshape(n_nodes, len(channels), 1)).sum(axis=1)

    overall = typed_transform("b") + config.alpha * (attended @ leaves["M"]) \
        + config.beta * typed_transform("D")
    return overall, gate


def hetgnn_embed(graph: HetGraph, features: dict[str, np.ndarray],
                 params: dict[str, np.ndarray], config: HetGnnConfig) -> np.ndarray:
    """Overall node embeddings (rows follow graph.node_ids)."""
    leaves = {k: Var(v) for k, v in params.items()}
    overall, _ = _forward(leaves, graph, features, config)
    return overall.value


def hetgnn_link_loss(params, graph: HetGraph, features, config: HetGnnConfig,
                     pairs: list[tuple[str, str]], labels: np.ndarray):
    """Logistic link-prediction loss over inner products of embeddings."""
    leaves = {k: Var(v, requires_grad=True) for k, v in params.items()}
    overall, _ = _forward(leaves, graph, features, config)
    idx_u = np.array([graph.index(u) for u, _ in pairs])
    idx_v = np.array([graph.index(v) for _, v in pairs])
    from ..numerics import gather
    eu = gather(overall, idx_u)
    ev = gather(overall, idx_v)
    logits = (eu * ev).sum(axis=1)
    loss = (logits.softplus() - Var(np.asarray(labels, dtype=np.float64)) * logits).mean()
    value = float(loss.value)
    if not np.isfinite(value):
        raise FloatingPointError("non-finite link loss")
    loss.backward()
    return value, {k: v.grad for k, v in leaves.items() if v.grad is not None}


def train_hetgnn(graph: HetGraph, features, config: HetGnnConfig,
                 pairs, labels, epochs: int, seed: int, lr: float = 5e-3):
    """Fit the embedding parameters on labelled node pairs."""
    feature_dims = {}
    for node in graph.node_ids:
        kind = graph.node_kind[node]
        feature_dims.setdefault(kind, len(features[node]))
    params = init_hetgnn_params(graph, feature_dims, config, seed)
    state = AdamState()
    history = []
    labels = np.asarray(labels, dtype=np.float64)
    for _ in range(epochs):
        value, grads = hetgnn_link_loss(params, graph, features, config, pairs, labels)
        adam_step(params, grads, state, lr=lr)
        history.append(value)
    return params, history
