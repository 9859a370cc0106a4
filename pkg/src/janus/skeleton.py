"""Ontology skeleton generation and deterministic Turtle serialization."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass

from .concepts import ConceptGraph, EdgeKind, RoleAssignment
from .errors import EmptyLabel, InvalidIri, UnclassifiedConcept
from .lexical import tokenize_label
from .xsd import Occurrence

OBJECT = "object"
DATATYPE = "datatype"


@dataclass(frozen=True, order=True)
class PropertyDef:
    """One property of the skeleton; ``range`` is a class id or an XSD built-in name."""

    concept_id: str
    label: str
    kind: str
    domains: tuple[tuple[str, Occurrence | None], ...] = ()
    range: str | None = None


@dataclass(frozen=True)
class OntologySkeleton:
    classes: frozenset[str] = frozenset()
    object_properties: tuple[PropertyDef, ...] = ()
    datatype_properties: tuple[PropertyDef, ...] = ()
    isa_links: frozenset[tuple[str, str]] = frozenset()
    disjoint_pairs: frozenset[tuple[str, str]] = frozenset()
    equivalent_pairs: frozenset[tuple[str, str]] = frozenset()
    labels: tuple[tuple[str, str], ...] = ()  # (concept id, label), sorted by id

    def label(self, concept_id: str) -> str:
        return dict(self.labels).get(concept_id, concept_id)

    @property
    def properties(self) -> tuple[PropertyDef, ...]:
        return tuple(sorted(self.object_properties + self.datatype_properties))


def _resolve_range(graph: ConceptGraph, roles: RoleAssignment, pid: str) -> tuple[str, str | None]:
    """Follow is-a links from a property concept to the first printable type or class."""
    start = graph.concepts[pid]
    if start.datatype_target:
        return DATATYPE, start.datatype_target
    if pid in roles.classes:
        return OBJECT, pid
    seen = {pid}
    queue = deque([pid])
    while queue:
        cur = graph.concepts[queue.popleft()]
        for kind, target in cur.hierarchy_links:
            if kind is not EdgeKind.IS_A or target in seen or target not in graph.concepts:
                continue
            seen.add(target)
            tc = graph.concepts[target]
            if target in roles.datatypes or (tc.datatype_target and not tc.properties):
                return DATATYPE, tc.datatype_target
            if target in roles.classes:
                return OBJECT, target
            queue.append(target)
    return OBJECT, None


def generate_skeleton(graph: ConceptGraph, roles: RoleAssignment) -> OntologySkeleton:
    """Classes, typed properties with domains, and class-level is-a/disjoint/equivalent links."""
    known = roles.classes | roles.properties | roles.datatypes
    domains: dict[str, list[tuple[str, Occurrence | None]]] = {}
    for cid in sorted(roles.classes):
        for pid, card in graph.concepts[cid].properties:
            if pid not in known:
                raise UnclassifiedConcept(f"{graph.label(pid)!r} is a property of {graph.label(cid)!r} but has no role")
            domains.setdefault(pid, []).append((cid, card))
    members = set(domains) | (roles.properties - roles.classes)

    object_props, datatype_props = [], []
    for pid in sorted(members):
        if pid not in graph.concepts:
            raise UnclassifiedConcept(f"property {pid!r} is not in the graph")
        kind, rng = _resolve_range(graph, roles, pid)
        prop = PropertyDef(pid, graph.concepts[pid].label, kind, tuple(sorted(domains.get(pid, ()), key=lambda d: d[0])), rng)
        (datatype_props if kind == DATATYPE else object_props).append(prop)

    entities = roles.classes | members
    isa = frozenset(
        (e.source, e.target) for e in graph.edges_of(EdgeKind.IS_A)
        if e.target in roles.classes and e.source in entities and e.source != e.target
    )
    disjoint = frozenset(
        (e.source, e.target) for e in graph.edges_of(EdgeKind.DISJOINT)
        if e.source in entities and e.target in entities
    )
    equivalent = frozenset(
        (e.source, e.target) for e in graph.edges_of(EdgeKind.EQUIVALENT)
        if e.source in entities and e.target in entities
    )
    labels = tuple((cid, graph.concepts[cid].label) for cid in sorted(entities))
    return OntologySkeleton(
        frozenset(roles.classes), tuple(object_props), tuple(datatype_props), isa, disjoint, equivalent, labels
    )


# --------------------------------------------------------------------------- Turtle

PREFIXES = (
    ("owl", "http://www.w3.org/2002/07/owl#"),
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("xsd", "http://www.w3.org/2001/XMLSchema#"),
)

_IRI_SCHEME = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:\S+")
_IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_ROLE_RANK = {"class": 0, "property": 1}


def validate_base_iri(base_iri: str) -> None:
    if not isinstance(base_iri, str) or not base_iri.endswith(("/", "#")):
        raise InvalidIri(f"base IRI must end in '/' or '#': {base_iri!r}")
    if not _IRI_SCHEME.fullmatch(base_iri) or _IRI_FORBIDDEN.search(base_iri):
        raise InvalidIri(f"not a valid absolute IRI: {base_iri!r}")


def local_name(label: str) -> str:
    """Lower snake case of the label's tokens, restricted to ASCII name characters."""
    try:
        tokens = tokenize_label(label)
    except EmptyLabel:
        return "concept"
    text = "_".join(tokens)
    return "".join(ch if ch.isascii() and (ch.isalnum() or ch == "_") else f"x{ord(ch):04x}" for ch in text)


def mint_names(skeleton: OntologySkeleton) -> tuple[dict[str, str], dict[str, str]]:
    """Local names for classes and properties; collisions get ``_2``, ``_3`` in sorted order."""
    entries = [("class", cid, skeleton.label(cid)) for cid in skeleton.classes]
    entries += [("property", p.concept_id, p.label) for p in skeleton.properties]
    keyed = sorted((local_name(lbl), _ROLE_RANK[role], lbl, cid, role) for role, cid, lbl in entries)
    used: set[str] = set()
    names: dict[str, dict[str, str]] = {"class": {}, "property": {}}
    pending = []
    for base, _, _, cid, role in keyed:
        if base not in used:
            used.add(base)
            names[role][cid] = base
        else:
            pending.append((base, cid, role))
    for base, cid, role in pending:
        n = 2
        while f"{base}_{n}" in used:
            n += 1
        used.add(f"{base}_{n}")
        names[role][cid] = f"{base}_{n}"
    return names["class"], names["property"]


def _literal(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "\\r")
    return f'"{escaped}"'


def _card(occ: Occurrence | None) -> str:
    if occ is None:
        return ""
    return f"# card [{occ.min},{'*' if occ.max is None else occ.max}]"


def serialize_skeleton(skeleton: OntologySkeleton, base_iri: str) -> str:
    """Turtle text: prefix block, then one block per entity sorted by IRI."""
    validate_base_iri(base_iri)
    class_names, prop_names = mint_names(skeleton)

    def ref(cid: str) -> str:
        name = class_names.get(cid) or prop_names.get(cid)
        if name is None:
            raise ValueError(f"skeleton refers to {cid!r}, which is neither a class nor a property")
        return ":" + name

    blocks: dict[str, list[tuple[str, str]]] = {}
    for cid, name in class_names.items():
        blocks[":" + name] = [("a owl:Class", ""), (f"rdfs:label {_literal(skeleton.label(cid))}", "")]
    for p in skeleton.properties:
        kind = "owl:DatatypeProperty" if p.kind == DATATYPE else "owl:ObjectProperty"
        lines = [(f"a {kind}", ""), (f"rdfs:label {_literal(p.label)}", "")]
        for dom, occ in sorted(p.domains, key=lambda d: ref(d[0])):
            lines.append((f"rdfs:domain {ref(dom)}", _card(occ)))
        if p.range is not None:
            rng = f"xsd:{p.range}" if p.kind == DATATYPE else ref(p.range)
            lines.append((f"rdfs:range {rng}", ""))
        blocks[":" + prop_names[p.concept_id]] = lines

    axioms: dict[str, set[str]] = {}
    for src, tgt in skeleton.isa_links:
        axioms.setdefault(ref(src), set()).add(f"rdfs:subClassOf {ref(tgt)}")
    for predicate, pairs in (("owl:equivalentClass", skeleton.equivalent_pairs), ("owl:disjointWith", skeleton.disjoint_pairs)):
        for a, b in pairs:
            lo, hi = sorted((ref(a), ref(b)))
            axioms.setdefault(lo, set()).add(f"{predicate} {hi}")

    out = [f"@prefix : <{base_iri}> ."]
    out += [f"@prefix {p}: <{iri}> ." for p, iri in PREFIXES]
    for subject in sorted(blocks):
        out.append("")
        lines = blocks[subject]
        for i, (stmt, comment) in enumerate(lines):
            end = " ." if i == len(lines) - 1 else " ;"
            head = f"{subject} " if i == 0 else "    "
            out.append(f"{head}{stmt}{end}" + (f"  {comment}" if comment else ""))
        out += [f"{subject} {stmt} ." for stmt in sorted(axioms.get(subject, ()))]
    return "\n".join(out) + "\n"
