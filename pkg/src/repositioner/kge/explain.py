"""Explanation artifacts: connecting paths and per-layer similar drugs."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..data.entities import EntityCatalog, EntityRef, KnowledgeGraph, NotFoundError
from ..data.tables import LayeredNetworkSet
from ..predictors.ranking import RankedList

__all__ = ["ExplanationSubgraph", "extract_paths", "top_similar_drugs",
           "DEFAULT_SIMILARITY_LAYERS"]

DEFAULT_SIMILARITY_LAYERS = (
    "therapeutic-similarity",
    "chemical-similarity",
    "go-bp-similarity",
    "go-cc-similarity",
    "go-mf-similarity",
)


@dataclass
class ExplanationSubgraph:
    """Union of the simple paths connecting a drug to a query entity.

    `paths` holds ordered indices into `edges`; `path_directions` records,
    per step, whether the stored triple was walked head-to-tail.
    """

    nodes: list[EntityRef] = field(default_factory=list)
    edges: list[tuple[str, str, str]] = field(default_factory=list)
    paths: list[list[int]] = field(default_factory=list)
    path_directions: list[list[bool]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.paths


def extract_paths(kg: KnowledgeGraph, drug_id: str, entity_id: str,
                  max_hops: int, max_paths: int) -> ExplanationSubgraph:
    """Shortest-first enumeration of simple connecting paths.

    Edges may be walked in either direction (stored direction is
    recorded).  Within one hop count, paths are ordered lexicographically
    by their stored-edge triples; at most `max_paths` are returned and a
    disconnected pair yields an empty subgraph.
    """
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    if max_paths < 1:
        raise ValueError("max_paths must be >= 1")
    kg.entity(drug_id)
    kg.entity(entity_id)

    found: list[tuple[list[int], list[bool]]] = []

    def dfs(current: str, visited: set[str], edge_trail: list[int],
            dir_trail: list[bool], budget: int):
        if budget == 0:
            return
        for edge_idx in kg.incident_triples(current):
            triple = kg.triples[edge_idx]
            if triple.head == current:
                nxt, forward = triple.tail, True
            elif triple.tail == current:
                nxt, forward = triple.head, False
            else:
                continue
            if nxt == entity_id and len(edge_trail) + 1 == depth:
                found.append((edge_trail + [edge_idx], dir_trail + [forward]))
                continue
            if nxt in visited or nxt == entity_id:
                continue
            visited.add(nxt)
            dfs(nxt, visited, edge_trail + [edge_idx], dir_trail + [forward], budget - 1)
            visited.remove(nxt)

    collected: list[tuple[list[int], list[bool]]] = []
    for depth in range(1, max_hops + 1):
        if len(collected) >= max_paths:
            break
        found = []
        dfs(drug_id, {drug_id}, [], [], depth)
        found.sort(key=lambda pd: tuple(
            (kg.triples[e].head, kg.triples[e].relation, kg.triples[e].tail)
            for e in pd[0]))
        collected.extend(found)
    collected = collected[:max_paths]

    sub = ExplanationSubgraph()
    edge_map: dict[int, int] = {}
    node_seen: dict[str, None] = {}
    for edge_trail, dir_trail in collected:
        local = []
        for e in edge_trail:
            if e not in edge_map:
                t = kg.triples[e]
                edge_map[e] = len(sub.edges)
                sub.edges.append((t.head, t.relation, t.tail))
                node_seen.setdefault(t.head)
                node_seen.setdefault(t.tail)
            local.append(edge_map[e])
        sub.paths.append(local)
        sub.path_directions.append(dir_trail)
    sub.nodes = [kg.entity(n) for n in node_seen]
    return sub


def top_similar_drugs(layers: LayeredNetworkSet, drug_id: str, m: int = 20,
                      layer_names=DEFAULT_SIMILARITY_LAYERS,
                      catalog: EntityCatalog | None = None) -> dict[str, RankedList]:
    """Per-layer strongest neighbours of a drug, self excluded.

    Every requested layer must exist; the result always carries one key
    per requested layer (possibly with an empty list).
    """
    out: dict[str, RankedList] = {}
    for name in layer_names:
        layer = layers.layer(name)
        if drug_id not in layer.row_ids:
            raise NotFoundError(f"unknown drug {drug_id!r}")
        i = layer.row_index(drug_id)
        query = (catalog.get("drug", drug_id) if catalog else None) \
            or EntityRef(drug_id, drug_id, "drug")
        scored = []
        for j, other in enumerate(layer.col_ids):
            if other == drug_id:
                continue
            w = float(layer.matrix[i, j])
            if w > 0:
                ref = (catalog.get("drug", other) if catalog else None) \
                    or EntityRef(other, other, "drug")
                scored.append((ref, w))
        out[name] = RankedList.from_scores(query, scored, m, model_id=name)
    return out
