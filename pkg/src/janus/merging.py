"""Cluster merging of matched concepts and automated consistency checks."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import networkx as nx

from .concepts import (
    Concept,
    ConceptGraph,
    Edge,
    EdgeKind,
    Relation,
    RelationKind,
    RoleAssignment,
    assemble_graph,
)
from .errors import Diagnostic
from .extraction import classify_roles
from .lexical import EMPTY_RESOURCE, LexicalResource, matched_jaccard
from .matching import MatchSet, _property_counter, concept_tokens, match_concepts


def detect_inclusion(c1: Concept, c2: Concept, resource: LexicalResource = EMPTY_RESOURCE) -> bool:
    """True when c1's property labels all occur among c2's and the two labels share a token."""
    p1, p2 = _property_counter(c1, resource), _property_counter(c2, resource)
    if any(n > p2[k] for k, n in p1.items()):
        return False
    return matched_jaccard(set(concept_tokens(c1, resource)), set(concept_tokens(c2, resource)), resource) > 0


def _inclusion_pairs(graph: ConceptGraph, roles: RoleAssignment, resource: LexicalResource) -> list[tuple[str, str]]:
    """Same-role, cross-source pairs with equal non-empty property label multisets and related labels."""
    pairs = []
    for role_set in (roles.classes, roles.properties - roles.classes):
        buckets: dict = defaultdict(list)
        for cid in sorted(role_set):
            c = graph.concepts.get(cid)
            if c is None or not c.properties:
                continue
            buckets[frozenset(_property_counter(c, resource).items())].append(c)
        for members in buckets.values():
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    if a.sources != b.sources and detect_inclusion(a, b, resource) and detect_inclusion(b, a, resource):
                        pairs.append((a.id, b.id))
    return pairs


class _Clusters:
    """Union-find over concept ids that refuses unions which would close an is-a cycle."""

    def __init__(self, graph: ConceptGraph) -> None:
        self.parent = {cid: cid for cid in graph.concepts}
        self.members = {cid: {cid} for cid in graph.concepts}
        self.isa: dict[str, set[str]] = defaultdict(set)
        self.disjoint: dict[str, set[str]] = defaultdict(set)
        for e in graph.edges:
            if e.source not in graph.concepts or e.target not in graph.concepts:
                continue
            if e.kind is EdgeKind.IS_A:
                self.isa[e.source].add(e.target)
            elif e.kind is EdgeKind.DISJOINT:
                self.disjoint[e.source].add(e.target)
                self.disjoint[e.target].add(e.source)

    def find(self, x: str) -> str:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def _reaches(self, start: str, goal: str) -> bool:
        seen = {start}
        stack = [start]
        while stack:
            root = stack.pop()
            for member in self.members[root]:
                for t in self.isa[member]:
                    rt = self.find(t)
                    if rt == goal:
                        return True
                    if rt not in seen:
                        seen.add(rt)
                        stack.append(rt)
        return False

    def conflict(self, a: str, b: str) -> str | None:
        ra, rb = self.find(a), self.find(b)
        if self._reaches(ra, rb) or self._reaches(rb, ra):
            return "is-a cycle"
        if any(self.find(d) == rb for m in self.members[ra] for d in self.disjoint[m]):
            return "disjointness"
        return None

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.members[ra] |= self.members.pop(rb)

    def groups(self) -> list[list[str]]:
        return sorted(sorted(m) for m in self.members.values() if len(m) > 1)


def _select_label(members: list[Concept]) -> Concept:
    """Most source documents, then fewest tokens, then lexicographic label, then id."""
    sources: dict[str, set[str]] = defaultdict(set)
    for c in members:
        sources[c.label] |= c.sources
    best = min(sources, key=lambda lbl: (-len(sources[lbl]), len(concept_tokens(lbl)), lbl))
    return min((c for c in members if c.label == best), key=lambda c: c.id)


def _collapse(graph: ConceptGraph, groups: list[list[str]], warnings: list[Diagnostic]) -> ConceptGraph:
    remap: dict[str, str] = {}
    replaced: dict[str, Concept] = {}
    for group in groups:
        members = [graph.concepts[cid] for cid in group]
        chosen = _select_label(members)
        relations = {r for c in members for r in c.relations}
        relations |= {
            Relation(RelationKind.NON_SEMANTIC, c.label, "merged")
            for c in members if c.label != chosen.label
        }
        datatype = next((c.datatype_target for c in members if c.datatype_target), None)
        instances = tuple(p for c in members for p in c.instances)
        replaced[chosen.id] = Concept(chosen.id, chosen.label, instances, tuple(relations), datatype)
        for cid in group:
            remap[cid] = chosen.id
    concepts = [
        replaced.get(cid, c.core()) for cid, c in graph.concepts.items() if remap.get(cid, cid) == cid
    ]
    edges = []
    for e in graph.edges:
        src, tgt = remap.get(e.source, e.source), remap.get(e.target, e.target)
        if src == tgt and e.kind is not EdgeKind.PROPERTY_OF:
            continue
        edges.append(Edge(e.kind, src, tgt, e.cardinality))
    with_props = {e.source for e in edges if e.kind is EdgeKind.PROPERTY_OF}
    concepts = [
        Concept(c.id, c.label, c.instances, c.relations, None) if c.datatype_target and c.id in with_props else c
        for c in concepts
    ]
    return assemble_graph(concepts, edges, (*graph.warnings, *warnings))


def merge_concepts(
    graph: ConceptGraph,
    matches: MatchSet,
    resource: LexicalResource = EMPTY_RESOURCE,
) -> ConceptGraph:
    """Collapse clusters of matched or mutually included concepts until no cluster remains.

    Clusters are the connected components over accepted matches and
    mutual-inclusion pairs. After each round the graph is re-matched with the
    MatchSet's configuration, so the result is a fixpoint. A pair whose union
    would close an is-a cycle (or join two disjoint concepts) is dropped with a
    ``merge-conflict`` warning.
    """
    config = matches.config
    pending = [(m.left, m.right) for m in matches]
    current = graph
    reported: set[tuple[str, str]] = set()
    while True:
        roles = classify_roles(current)
        pairs = pending + _inclusion_pairs(current, roles, resource)
        clusters = _Clusters(current)
        warnings: list[Diagnostic] = []
        for a, b in pairs:
            if a not in current.concepts or b not in current.concepts or clusters.find(a) == clusters.find(b):
                continue
            reason = clusters.conflict(a, b)
            if reason is not None:
                key = (a, b)
                if key not in reported:
                    reported.add(key)
                    warnings.append(Diagnostic(
                        "merge-conflict",
                        f"not merging {current.label(a)!r} and {current.label(b)!r}: would create {reason}",
                        concepts=(a, b),
                    ))
                continue
            clusters.union(a, b)
        groups = clusters.groups()
        if not groups:
            if warnings:
                current = assemble_graph(
                    [c.core() for c in current.concepts.values()], current.edges, (*current.warnings, *warnings)
                )
            return current
        current = _collapse(current, groups, warnings)
        pending = [(m.left, m.right) for m in match_concepts(current, classify_roles(current), config, resource)]


# --------------------------------------------------------------------------- validation


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[Diagnostic, ...] = ()
    warnings: tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "errors": [d.to_dict() for d in self.errors],
            "warnings": [d.to_dict() for d in self.warnings],
        }

    def to_text(self) -> str:
        lines = [f"Errors: {len(self.errors)}"]
        lines += [f"  [{d.code}] {d.message}" for d in self.errors]
        lines.append(f"Warnings: {len(self.warnings)}")
        for d in self.warnings:
            where = f" ({d.source_id}{' ' + d.path if d.path else ''})" if d.source_id else ""
            lines.append(f"  [{d.code}] {d.message}{where}")
        return "\n".join(lines) + "\n"


def validate_graph(graph: ConceptGraph, roles: RoleAssignment) -> ValidationReport:
    """Cycle, disjointness, dangling-edge and role checks; the graph is not modified."""
    errors: list[Diagnostic] = []
    concepts = graph.concepts

    for e in graph.sorted_edges():
        missing = [x for x in (e.source, e.target) if x not in concepts]
        if missing:
            errors.append(Diagnostic(
                "dangling-edge",
                f"{e.kind.value} edge {e.source} -> {e.target} points to unknown concept(s) {missing}",
                concepts=(e.source, e.target),
            ))

    isa = nx.DiGraph()
    isa.add_nodes_from(concepts)
    isa.add_edges_from((e.source, e.target) for e in graph.edges_of(EdgeKind.IS_A)
                       if e.source in concepts and e.target in concepts)
    cyclic = sorted(
        sorted(scc) for scc in nx.strongly_connected_components(isa)
        if len(scc) > 1 or isa.has_edge(next(iter(scc)), next(iter(scc)))
    )
    for scc in cyclic:
        names = " -> ".join(graph.label(c) for c in scc)
        errors.append(Diagnostic("isa-cycle", f"is-a cycle among {names}", concepts=tuple(scc)))

    for e in graph.edges_of(EdgeKind.DISJOINT):
        if e.source not in concepts or e.target not in concepts:
            continue
        if nx.has_path(isa, e.source, e.target) or nx.has_path(isa, e.target, e.source):
            errors.append(Diagnostic(
                "disjoint-subsumption",
                f"{graph.label(e.source)!r} and {graph.label(e.target)!r} are disjoint but linked by is-a",
                concepts=(e.source, e.target),
            ))

    for cid in sorted(roles.classes & roles.datatypes):
        errors.append(Diagnostic("role-conflict", f"{graph.label(cid)!r} is both class and datatype", concepts=(cid,)))
    for cid in sorted(roles.classes | roles.properties | roles.datatypes):
        if cid not in concepts:
            errors.append(Diagnostic("dangling-role", f"role assigned to unknown concept {cid!r}", concepts=(cid,)))
    for cid in sorted(roles.classes):
        c = concepts.get(cid)
        if c is not None and not (len(c.properties) > 1 or (len(c.properties) == 1 and c.complex_origin)):
            errors.append(Diagnostic(
                "role-violation", f"class {c.label!r} has {len(c.properties)} propert(ies)", concepts=(cid,)
            ))
    for cid in sorted(roles.datatypes):
        c = concepts.get(cid)
        if c is not None and (c.properties or not c.datatype_target):
            errors.append(Diagnostic(
                "role-violation", f"datatype {c.label!r} must have no properties and a printable target",
                concepts=(cid,),
            ))
    for cid in sorted(set(concepts) - roles.classes - roles.properties - roles.datatypes):
        errors.append(Diagnostic("unclassified", f"{graph.label(cid)!r} has no role", concepts=(cid,)))

    return ValidationReport(tuple(errors), tuple(graph.warnings))
