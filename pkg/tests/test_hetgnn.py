"""Heterogeneous GNN: closed forms, attention degeneracy, dense oracle."""

import numpy as np
import pytest

from repositioner.numerics import derive_rng, finite_diff_check
from repositioner.predictors import (
    HetGnnConfig,
    HetGraph,
    hetgnn_embed,
    hetgnn_link_loss,
    init_hetgnn_params,
    train_hetgnn,
)


def toy_graph(extra_type=True):
    nodes = ["d0", "d1", "c0", "c1"]
    kinds = {"d0": "drug", "d1": "drug", "c0": "disease", "c1": "disease"}
    edges = [("d0", "c0", "treats"), ("d1", "c1", "treats")]
    if extra_type:
        edges.append(("d0", "d1", "similar"))
    return HetGraph(node_ids=nodes, node_kind=kinds, edges=edges)


def toy_features(seed=0, d_drug=3, d_disease=2):
    rng = derive_rng(seed, "hetgnn-feat")
    return {"d0": rng.normal(size=d_drug), "d1": rng.normal(size=d_drug),
            "c0": rng.normal(size=d_disease), "c1": rng.normal(size=d_disease)}


def test_isolated_node_gets_base_and_feature_terms_only():
    graph = HetGraph(node_ids=["d0", "d1", "c0"],
                     node_kind={"d0": "drug", "d1": "drug", "c0": "disease"},
                     edges=[("d0", "c0", "treats")])
    features = {k: v for k, v in toy_features().items() if k in ("d0", "d1", "c0")}
    config = HetGnnConfig(layers=1, neighbor_dim=4, out_dim=3, attention_dim=2,
                          alpha=0.5, beta=0.25)
    params = init_hetgnn_params(graph, {"drug": 3, "disease": 2}, config, seed=1)
    out = hetgnn_embed(graph, features, params, config)
    # d1 has no neighbours: aggregated channel is relu(0 @ W) = 0, so only
    # b_t(x) + beta * D_t(x) remain (the attention term gates zeros)
    x = features["d1"]
    expected = x @ params["b.drug"] + 0.25 * (x @ params["D.drug"])
    np.testing.assert_allclose(out[graph.index("d1")], expected, atol=1e-12)


def test_single_edge_type_attention_is_passthrough():
    graph = toy_graph(extra_type=False)
    features = toy_features()
    config = HetGnnConfig(layers=2, neighbor_dim=4, out_dim=3, attention_dim=2,
                          alpha=1.0, beta=1.0)
    params = init_hetgnn_params(graph, {"drug": 3, "disease": 2}, config, seed=2)
    out = hetgnn_embed(graph, features, params, config)

    # dense straight-line recomputation with softmax over one type == 1
    def g(k, x):
        return x @ params[f"g.{k}"]
    h0 = np.stack([g(graph.node_kind[n], features[n]) for n in graph.node_ids])
    mean = graph.mean_adjacency("treats")
    h = h0
    for l in range(2):
        h = np.maximum(mean @ h @ params[f"W{l}"], 0.0)
    for i, n in enumerate(graph.node_ids):
        x = features[n]
        kind = graph.node_kind[n]
        expected = x @ params[f"b.{kind}"] + h[i] @ params["M"] + x @ params[f"D.{kind}"]
        np.testing.assert_allclose(out[i], expected, atol=1e-12)


def test_matches_dense_oracle_two_edge_types():
    graph = toy_graph(extra_type=True)
    features = toy_features(seed=3)
    config = HetGnnConfig(layers=1, neighbor_dim=3, out_dim=2, attention_dim=2,
                          alpha=0.7, beta=0.3)
    params = init_hetgnn_params(graph, {"drug": 3, "disease": 2}, config, seed=4)
    out = hetgnn_embed(graph, features, params, config)

    h0 = np.stack([features[n] @ params[f"g.{graph.node_kind[n]}"] for n in graph.node_ids])
    channels = []
    for etype in graph.edge_types:
        mean = graph.mean_adjacency(etype)
        channels.append(np.maximum(mean @ h0 @ params["W0"], 0.0))
    for i, n in enumerate(graph.node_ids):
        logits = np.array([params["attn.w"] @ np.tanh(params["attn.W"] @ ch[i])
                           for ch in channels])
        weights = np.exp(logits - logits.max())
        weights /= weights.sum()
        attended = sum(w * ch[i] for w, ch in zip(weights, channels))
        x = features[n]
        kind = graph.node_kind[n]
        expected = x @ params[f"b.{kind}"] + 0.7 * (params["M"].T @ attended) \
            + 0.3 * (x @ params[f"D.{kind}"])
        np.testing.assert_allclose(out[i], expected, atol=1e-12)


def test_missing_feature_and_missing_transform():
    graph = toy_graph()
    config = HetGnnConfig(layers=1, neighbor_dim=3, out_dim=2, attention_dim=2)
    params = init_hetgnn_params(graph, {"drug": 3, "disease": 2}, config, seed=5)
    features = toy_features()
    del features["c1"]
    with pytest.raises(ValueError, match="no features"):
        hetgnn_embed(graph, features, params, config)
    with pytest.raises(ValueError, match="no feature dimension"):
        init_hetgnn_params(graph, {"drug": 3}, config, seed=5)


def test_link_loss_gradients_match_finite_differences():
    graph = toy_graph()
    features = toy_features(seed=6)
    config = HetGnnConfig(layers=1, neighbor_dim=3, out_dim=3, attention_dim=2,
                          alpha=0.9, beta=0.4)
    params = init_hetgnn_params(graph, {"drug": 3, "disease": 2}, config, seed=7)
    pairs = [("d0", "c0"), ("d1", "c0"), ("d0", "c1")]
    labels = np.array([1.0, 0.0, 0.0])
    _, grads = hetgnn_link_loss(params, graph, features, config, pairs, labels)
    keys = sorted(grads)

    def fn(arrays):
        p = dict(params)
        p.update(dict(zip(keys, arrays)))
        value, _ = hetgnn_link_loss(p, graph, features, config, pairs, labels)
        return value

    err = finite_diff_check(fn, [params[k] for k in keys], [grads[k] for k in keys])
    assert err <= 1e-4


def test_training_separates_planted_links():
    rng = derive_rng(8, "hetgnn-train")
    drugs = [f"d{i}" for i in range(8)]
    diseases = [f"c{i}" for i in range(6)]
    nodes = drugs + diseases
    kinds = {n: ("drug" if n.startswith("d") else "disease") for n in nodes}
    group = {n: i % 2 for i, n in enumerate(drugs)}
    group.update({n: i % 2 for i, n in enumerate(diseases)})
    edges = [(d, c, "treats") for d in drugs for c in diseases
             if group[d] == group[c] and rng.random() < 0.7]
    edges += [(a, b, "similar") for a in drugs for b in drugs
              if a < b and group[a] == group[b]]
    graph = HetGraph(node_ids=nodes, node_kind=kinds, edges=edges)
    features = {n: np.concatenate([np.eye(2)[group[n]], 0.1 * rng.normal(size=2)])
                for n in nodes}
    config = HetGnnConfig(layers=2, neighbor_dim=8, out_dim=8, attention_dim=4)
    pairs = [(d, c) for d in drugs for c in diseases]
    labels = np.array([float(group[d] == group[c]) for d, c in pairs])
    params, history = train_hetgnn(graph, features, config, pairs, labels,
                                   epochs=200, seed=9)
    from repositioner.predictors import compute_auroc
    emb = hetgnn_embed(graph, features, params, config)
    scores = [float(emb[graph.index(d)] @ emb[graph.index(c)]) for d, c in pairs]
    assert history[-1] < history[0]
    assert compute_auroc(np.array(scores), labels.astype(int)) >= 0.95
    again, _ = train_hetgnn(graph, features, config, pairs, labels,
                            epochs=200, seed=9)
    for k in params:
        np.testing.assert_array_equal(params[k], again[k])
