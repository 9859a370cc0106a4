"""Concept graph types shared by extraction, matching, merging and generation."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable

from .errors import Diagnostic
from .xsd import Occurrence


class Rule(str, Enum):
    """The thirteen XSD-structure-to-concept mapping rules."""

    COMPLEX_TYPE = "complexType"
    SIMPLE_TYPE = "simpleType"
    DERIVATION = "extension-restriction"
    UNION = "union"
    ANY = "any"
    SIMPLE_CONTENT = "simpleContent"
    ELEMENT_REF = "element-ref"
    ELEMENT_TYPED = "element-typed"
    ELEMENT_NAMED = "element-named"
    OCCURS = "occurs"
    SEQUENCE_ALL = "sequence-all"
    ATTRIBUTE = "attribute"
    CHOICE = "choice"


class EdgeKind(str, Enum):
    IS_A = "is-a"
    PROPERTY_OF = "propertyOf"
    DISJOINT = "disjointWith"
    EQUIVALENT = "equivalentTo"

    @property
    def symmetric(self) -> bool:
        return self in (EdgeKind.DISJOINT, EdgeKind.EQUIVALENT)


class RelationKind(str, Enum):
    SEMANTIC = "semantic"
    NON_SEMANTIC = "non-semantic"


@dataclass(frozen=True, order=True)
class Provenance:
    source_id: str
    construct_path: str
    rule_applied: Rule


@dataclass(frozen=True, order=True)
class Relation:
    kind: RelationKind
    target: str
    note: str = ""


@dataclass(frozen=True)
class Edge:
    kind: EdgeKind
    source: str
    target: str
    cardinality: Occurrence | None = None

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.kind.value, self.source, self.target)


@dataclass(frozen=True)
class Concept:
    """A label with its hierarchy links, relations and source instances.

    ``hierarchy_links``, ``properties``, ``property_labels`` and ``context``
    are derived from the owning graph's edges by :func:`assemble_graph`.
    """

    id: str
    label: str
    instances: tuple[Provenance, ...]
    relations: tuple[Relation, ...] = ()
    datatype_target: str | None = None
    hierarchy_links: tuple[tuple[EdgeKind, str], ...] = ()
    properties: tuple[tuple[str, Occurrence | None], ...] = ()
    property_labels: tuple[str, ...] = ()
    context: tuple[tuple[str, str, str], ...] = ()  # (edge kind, neighbour id, neighbour label)

    def __post_init__(self) -> None:
        if not self.instances:
            raise ValueError(f"concept {self.id!r} has no source instance")

    @property
    def sources(self) -> frozenset[str]:
        return frozenset(p.source_id for p in self.instances)

    @property
    def complex_origin(self) -> bool:
        return any(p.rule_applied is Rule.COMPLEX_TYPE for p in self.instances)

    @property
    def property_ids(self) -> frozenset[str]:
        return frozenset(p for p, _ in self.properties)

    def core(self) -> "Concept":
        """The concept stripped of graph-derived fields."""
        return Concept(self.id, self.label, self.instances, self.relations, self.datatype_target)


@dataclass(frozen=True)
class ConceptGraph:
    concepts: dict[str, Concept] = field(default_factory=dict)
    edges: frozenset[Edge] = frozenset()
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False)

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.concepts

    def label(self, concept_id: str) -> str:
        c = self.concepts.get(concept_id)
        return c.label if c else concept_id

    def edges_of(self, kind: EdgeKind) -> list[Edge]:
        return sorted((e for e in self.edges if e.kind is kind), key=lambda e: e.key)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: e.key)


@dataclass(frozen=True)
class RoleAssignment:
    classes: frozenset[str] = frozenset()
    properties: frozenset[str] = frozenset()
    datatypes: frozenset[str] = frozenset()

    def role_of(self, concept_id: str) -> str | None:
        if concept_id in self.classes:
            return "class"
        if concept_id in self.properties:
            return "property"
        if concept_id in self.datatypes:
            return "datatype"
        return None


def _sort_key(concept: Concept | None, concept_id: str) -> tuple[str, str]:
    return ((concept.label if concept else concept_id).casefold(), concept_id)


def assemble_graph(
    concepts: Iterable[Concept],
    edges: Iterable[Edge],
    warnings: Iterable[Diagnostic] = (),
) -> ConceptGraph:
    """Canonicalise edges and fill each concept's graph-derived fields.

    Symmetric edges are stored once, lower (label, id) first; duplicate
    propertyOf edges widen into one cardinality; cardinality is dropped from
    every other edge kind. Dangling edges are kept for validation to report.
    """
    by_id: dict[str, Concept] = {}
    for c in concepts:
        if c.id in by_id:
            raise ValueError(f"duplicate concept id {c.id!r}")
        by_id[c.id] = c

    merged: dict[tuple[str, str, str], Edge] = {}
    for e in edges:
        src, tgt = e.source, e.target
        if e.kind.symmetric and _sort_key(by_id.get(tgt), tgt) < _sort_key(by_id.get(src), src):
            src, tgt = tgt, src
        card = e.cardinality if e.kind is EdgeKind.PROPERTY_OF else None
        edge = Edge(e.kind, src, tgt, card)
        old = merged.get(edge.key)
        if old is not None and old.cardinality is not None and card is not None:
            edge = Edge(e.kind, src, tgt, old.cardinality.widen(card))
        elif old is not None:
            edge = Edge(e.kind, src, tgt, old.cardinality or card)
        merged[edge.key] = edge

    links: dict[str, list[tuple[EdgeKind, str]]] = defaultdict(list)
    props: dict[str, list[tuple[str, Occurrence | None]]] = defaultdict(list)
    context: dict[str, set[tuple[str, str, str]]] = defaultdict(set)
    for e in merged.values():
        if e.source not in by_id or e.target not in by_id:
            continue
        if e.kind in (EdgeKind.IS_A, EdgeKind.PROPERTY_OF):
            links[e.source].append((e.kind, e.target))
        if e.kind is EdgeKind.PROPERTY_OF:
            props[e.source].append((e.target, e.cardinality))
        context[e.source].add((e.kind.value, e.target, by_id[e.target].label.casefold()))
        context[e.target].add((e.kind.value, e.source, by_id[e.source].label.casefold()))

    out: dict[str, Concept] = {}
    for cid in sorted(by_id):
        c = by_id[cid]
        plist = sorted(props[cid], key=lambda p: p[0])
        out[cid] = replace(
            c,
            instances=tuple(sorted(c.instances)),
            relations=tuple(sorted(set(c.relations))),
            hierarchy_links=tuple(sorted(links[cid], key=lambda link: (link[0].value, link[1]))),
            properties=tuple(plist),
            property_labels=tuple(by_id[p].label for p, _ in plist),
            context=tuple(sorted(context[cid])),
        )
    return ConceptGraph(out, frozenset(merged.values()), tuple(warnings))
