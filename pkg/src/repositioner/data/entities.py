"""Entity vocabularies, name resolution and the knowledge graph."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "KINDS",
    "DataError",
    "NotFoundError",
    "AmbiguousNameError",
    "SchemaError",
    "EntityRef",
    "EntityCatalog",
    "Triple",
    "KnowledgeGraph",
    "canonical_kind",
]

KINDS = ("drug", "disease", "target", "side-effect", "pathway", "other")


class DataError(Exception):
    """Base class for data-layer failures."""


class NotFoundError(DataError):
    pass


class AmbiguousNameError(DataError):
    def __init__(self, query: str, candidates: list["EntityRef"]):
        self.query = query
        self.candidates = candidates
        names = ", ".join(f"{c.id}/{c.name}" for c in candidates)
        super().__init__(f"name {query!r} is ambiguous: {names}")


class SchemaError(DataError):
    pass


def canonical_kind(label: str) -> str:
    """Map an arbitrary kind label onto the entity-kind enumeration."""
    label = label.strip().lower()
    aliases = {
        "drug": "drug", "compound": "drug",
        "disease": "disease",
        "target": "target", "gene": "target", "protein": "target",
        "side-effect": "side-effect", "side_effect": "side-effect", "sideeffect": "side-effect",
        "pathway": "pathway",
    }
    return aliases.get(label, "other")


@dataclass(frozen=True)
class EntityRef:
    """An identified entity: opaque id, display name, fixed kind."""

    id: str
    name: str
    kind: str

    def __post_init__(self):
        if not self.id:
            raise SchemaError("entity id must be non-empty")
        if self.kind not in KINDS:
            raise SchemaError(f"unknown entity kind {self.kind!r}")


class EntityCatalog:
    """Per-kind vocabularies in first-appearance order, with name lookup.

    Ids are case-sensitive primary keys; names resolve case-insensitively
    and may collide, in which case resolution reports the ambiguity.
    """

    def __init__(self):
        self._by_kind: dict[str, dict[str, EntityRef]] = {}
        self._name_index: dict[str, dict[str, list[str]]] = {}

    def add(self, entity_id: str, name: str, kind: str) -> EntityRef:
        ref = EntityRef(id=entity_id, name=name, kind=kind)
        bucket = self._by_kind.setdefault(kind, {})
        existing = bucket.get(entity_id)
        if existing is not None:
            if name and existing.name and existing.name != name:
                raise SchemaError(
                    f"conflicting names for {kind} {entity_id!r}: {existing.name!r} vs {name!r}")
            if name and not existing.name:
                bucket[entity_id] = ref
                self._index_name(ref)
                return ref
            return existing
        bucket[entity_id] = ref
        self._index_name(ref)
        return ref

    def _index_name(self, ref: EntityRef) -> None:
        if not ref.name:
            return
        ids = self._name_index.setdefault(ref.kind, {}).setdefault(ref.name.casefold(), [])
        if ref.id not in ids:
            ids.append(ref.id)

    def get(self, kind: str, entity_id: str) -> EntityRef | None:
        return self._by_kind.get(kind, {}).get(entity_id)

    def ids(self, kind: str) -> list[str]:
        return list(self._by_kind.get(kind, {}))

    def entities(self, kind: str) -> list[EntityRef]:
        return list(self._by_kind.get(kind, {}).values())

    def kinds(self) -> list[str]:
        return [k for k in KINDS if self._by_kind.get(k)]

    def size(self, kind: str) -> int:
        return len(self._by_kind.get(kind, {}))

    def resolve(self, query: str, kind: str) -> EntityRef:
        """Exact id match first, then unique case-insensitive name match."""
        if not query:
            raise NotFoundError("empty query")
        if kind not in KINDS:
            raise SchemaError(f"unknown entity kind {kind!r}")
        ref = self.get(kind, query)
        if ref is not None:
            return ref
        ids = self._name_index.get(kind, {}).get(query.casefold(), [])
        if len(ids) == 1:
            return self.get(kind, ids[0])
        if len(ids) > 1:
            raise AmbiguousNameError(query, [self.get(kind, i) for i in ids])
        raise NotFoundError(f"no {kind} matches {query!r}")


@dataclass(frozen=True)
class Triple:
    head: str
    relation: str
    tail: str


class KnowledgeGraph:
    """Typed entities plus relation-labelled triples.

    Entity ids are globally unique across kinds here (they key the triple
    endpoints).  `raw_kind` keeps the kind label exactly as the metadata
    file declared it; `EntityRef.kind` carries the canonical enumeration.
    """

    def __init__(self):
        self._entities: dict[str, EntityRef] = {}
        self._raw_kind: dict[str, str] = {}
        self._relations: dict[str, int] = {}
        self.triples: list[Triple] = []
        self._triple_set: set[tuple[str, str, str]] = set()
        self._incident: dict[str, list[int]] = {}

    # -- construction ---------------------------------------------------

    def add_entity(self, entity_id: str, name: str, raw_kind: str) -> EntityRef:
        if entity_id in self._entities:
            prev = self._entities[entity_id]
            if self._raw_kind[entity_id] != raw_kind or (name and prev.name != name):
                raise SchemaError(f"conflicting metadata for entity {entity_id!r}")
            return prev
        ref = EntityRef(id=entity_id, name=name, kind=canonical_kind(raw_kind))
        self._entities[entity_id] = ref
        self._raw_kind[entity_id] = raw_kind
        return ref

    def add_triple(self, head: str, relation: str, tail: str) -> bool:
        """Add one triple; returns False for an exact duplicate."""
        if head not in self._entities:
            raise SchemaError(f"triple head {head!r} has no metadata")
        if tail not in self._entities:
            raise SchemaError(f"triple tail {tail!r} has no metadata")
        if not relation:
            raise SchemaError("empty relation label")
        key = (head, relation, tail)
        if key in self._triple_set:
            return False
        self._triple_set.add(key)
        self._relations.setdefault(relation, len(self._relations))
        idx = len(self.triples)
        self.triples.append(Triple(head, relation, tail))
        self._incident.setdefault(head, []).append(idx)
        if tail != head:
            self._incident.setdefault(tail, []).append(idx)
        return True

    # -- access ----------------------------------------------------------

    @property
    def relations(self) -> list[str]:
        return list(self._relations)

    def entity_ids(self) -> list[str]:
        return list(self._entities)

    def entity(self, entity_id: str) -> EntityRef:
        ref = self._entities.get(entity_id)
        if ref is None:
            raise NotFoundError(f"unknown entity {entity_id!r}")
        return ref

    def has_entity(self, entity_id: str) -> bool:
        return entity_id in self._entities

    def raw_kind(self, entity_id: str) -> str:
        return self._raw_kind[entity_id]

    def has_triple(self, head: str, relation: str, tail: str) -> bool:
        return (head, relation, tail) in self._triple_set

    def incident_triples(self, entity_id: str) -> list[int]:
        """Indices of triples touching the entity (either endpoint)."""
        return self._incident.get(entity_id, [])

    def num_entities(self) -> int:
        return len(self._entities)

    def num_triples(self) -> int:
        return len(self.triples)

    def kind_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for entity_id in self._entities:
            raw = self._raw_kind[entity_id]
            counts[raw] = counts.get(raw, 0) + 1
        return counts

    def relation_counts(self) -> dict[str, int]:
        counts = {r: 0 for r in self._relations}
        for t in self.triples:
            counts[t.relation] += 1
        return counts

    def entities_of_kind(self, kind: str) -> list[EntityRef]:
        """Entities whose canonical kind matches."""
        return [ref for ref in self._entities.values() if ref.kind == kind]
