"""Versioned, checksummed JSON persistence of the concept graph."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .concepts import (
    Concept,
    ConceptGraph,
    Edge,
    EdgeKind,
    Provenance,
    Relation,
    RelationKind,
    RoleAssignment,
    Rule,
    assemble_graph,
)
from .errors import CorruptStore, Diagnostic, UnsupportedVersion
from .lexical import LexicalResource
from .matching import MatchConfig
from .xsd import Occurrence

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ConceptStore:
    graph: ConceptGraph
    roles: RoleAssignment
    config_fingerprint: str
    format_version: int = FORMAT_VERSION


def config_fingerprint(config: MatchConfig, resource: LexicalResource) -> str:
    payload = {"match": config.to_dict(), "lexicon": resource.fingerprint_data()}
    return hashlib.sha256(_canonical(payload).encode("utf-8")).hexdigest()


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _occ(o: Occurrence | None):
    return None if o is None else [o.min, o.max]


def graph_to_dict(graph: ConceptGraph) -> dict:
    concepts = []
    for cid in sorted(graph.concepts):
        c = graph.concepts[cid]
        concepts.append({
            "id": c.id,
            "label": c.label,
            "datatype_target": c.datatype_target,
            "instances": [[p.source_id, p.construct_path, p.rule_applied.value] for p in c.instances],
            "relations": [[r.kind.value, r.target, r.note] for r in c.relations],
        })
    edges = [[e.kind.value, e.source, e.target, _occ(e.cardinality)] for e in graph.sorted_edges()]
    return {"concepts": concepts, "edges": edges}


def graph_from_dict(data: dict) -> ConceptGraph:
    concepts = [
        Concept(
            c["id"],
            c["label"],
            tuple(Provenance(s, p, Rule(r)) for s, p, r in c["instances"]),
            tuple(Relation(RelationKind(k), t, n) for k, t, n in c["relations"]),
            c["datatype_target"],
        )
        for c in data["concepts"]
    ]
    edges = [
        Edge(EdgeKind(k), s, t, None if card is None else Occurrence(card[0], card[1]))
        for k, s, t, card in data["edges"]
    ]
    return assemble_graph(concepts, edges)


def _roles_to_dict(roles: RoleAssignment) -> dict:
    return {"classes": sorted(roles.classes), "properties": sorted(roles.properties), "datatypes": sorted(roles.datatypes)}


def store_to_text(store: ConceptStore) -> str:
    body = {
        "format_version": store.format_version,
        "config_fingerprint": store.config_fingerprint,
        "graph": graph_to_dict(store.graph),
        "roles": _roles_to_dict(store.roles),
    }
    body["checksum"] = hashlib.sha256(_canonical(body).encode("utf-8")).hexdigest()
    return json.dumps(body, sort_keys=False, indent=1, ensure_ascii=False) + "\n"


def store_from_text(text: str) -> ConceptStore:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptStore(f"store is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise CorruptStore("store root must be an object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"store format_version {version!r} is not supported (expected {FORMAT_VERSION})")
    checksum = data.pop("checksum", None)
    if checksum != hashlib.sha256(_canonical(data).encode("utf-8")).hexdigest():
        raise CorruptStore("store checksum mismatch")
    try:
        graph = graph_from_dict(data["graph"])
        roles = data["roles"]
        return ConceptStore(
            graph,
            RoleAssignment(frozenset(roles["classes"]), frozenset(roles["properties"]), frozenset(roles["datatypes"])),
            data["config_fingerprint"],
            version,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptStore(f"store content is malformed: {exc}") from exc


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a partial file."""
    target = Path(path)
    tmp = target.with_name(f".{target.name}.tmp{os.getpid()}")
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    finally:
        if tmp.exists():
            tmp.unlink()


def save_store(store: ConceptStore, path: str | os.PathLike) -> None:
    write_atomic(path, store_to_text(store))


def load_store(path: str | os.PathLike) -> ConceptStore:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise CorruptStore(f"store {path} is not UTF-8") from exc
    return store_from_text(text)


def join_store(graph: ConceptGraph, store: ConceptStore, fingerprint: str | None = None) -> ConceptGraph:
    """Add the stored graph to a freshly extracted one as one more source.

    Concepts are united by id; the fresh graph's label wins. Stored provenance
    already present in the fresh graph is not repeated, and a stored concept
    that contributes nothing new is left out, so joining a store built from
    the same corpus leaves the graph unchanged.
    """
    warnings = list(graph.warnings)
    if fingerprint is not None and fingerprint != store.config_fingerprint:
        warnings.append(Diagnostic(
            "store-fingerprint",
            "concept store was built with a different match configuration or lexicon",
        ))
    known = {p for c in graph.concepts.values() for p in c.instances}
    merged: dict[str, Concept] = {cid: c.core() for cid, c in graph.concepts.items()}
    for cid, sc in store.graph.concepts.items():
        fresh = tuple(p for p in sc.instances if p not in known)
        base = merged.get(cid)
        if base is None:
            if fresh:
                merged[cid] = Concept(cid, sc.label, fresh, sc.relations, sc.datatype_target)
            continue
        merged[cid] = Concept(
            cid,
            base.label,
            base.instances + fresh,
            tuple(set(base.relations) | set(sc.relations)),
            base.datatype_target or sc.datatype_target,
        )
    edges = list(graph.edges) + [
        e for e in store.graph.edges if e.source in merged and e.target in merged
    ]
    with_props = {e.source for e in edges if e.kind is EdgeKind.PROPERTY_OF}
    concepts = [
        Concept(c.id, c.label, c.instances, c.relations, None) if c.datatype_target and c.id in with_props else c
        for c in merged.values()
    ]
    return assemble_graph(concepts, edges, warnings)
