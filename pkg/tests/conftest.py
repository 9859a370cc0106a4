"""Shared fixtures: the wine corpus, inline XSD helpers and hand-built graphs."""

from __future__ import annotations

from pathlib import Path

import pytest

from janus.concepts import Concept, Edge, EdgeKind, Provenance, Rule, assemble_graph
from janus.extraction import classify_roles, extract_concepts
from janus.xsd import Occurrence, build_corpus_model, parse_schema_document

FIXTURES = Path(__file__).parent / "fixtures"
WINE_DIR = FIXTURES / "wine"

XS_HEAD = '<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">'


def xsd(body: str) -> str:
    return f"{XS_HEAD}{body}</xs:schema>"


def graph_of(*bodies: str, singularize: bool = False):
    """Extract a concept graph from inline schema bodies named s0.xsd, s1.xsd, ..."""
    docs = [parse_schema_document(xsd(b), f"s{i}.xsd") for i, b in enumerate(bodies)]
    return extract_concepts(build_corpus_model(docs), singularize=singularize)


def wine_documents():
    return [parse_schema_document(p.read_bytes(), p.name) for p in sorted(WINE_DIR.glob("*.xsd"))]


def hand_graph(nodes, edges=()):
    """nodes: {id: (label, sources, datatype_target)}; edges: (kind, src, tgt[, (min, max)])."""
    concepts = []
    for cid, (label, sources, dt) in nodes.items():
        rule = Rule.SIMPLE_TYPE if dt else Rule.COMPLEX_TYPE
        inst = tuple(Provenance(s, f"/{label}", rule) for s in sources)
        concepts.append(Concept(cid, label, inst, (), dt))
    built = []
    for e in edges:
        kind, src, tgt = EdgeKind(e[0]), e[1], e[2]
        card = Occurrence(*e[3]) if len(e) > 3 else (Occurrence() if kind is EdgeKind.PROPERTY_OF else None)
        built.append(Edge(kind, src, tgt, card))
    return assemble_graph(concepts, built)


@pytest.fixture(scope="session")
def wine_graph():
    return extract_concepts(build_corpus_model(wine_documents()))


@pytest.fixture(scope="session")
def wine_roles(wine_graph):
    return classify_roles(wine_graph)


def labels(graph, ids) -> set[str]:
    return {graph.label(i) for i in ids}


# ------------------------------------------------------------------ acceptance reporting

ACCEPTANCE_RESULTS: dict[int, tuple[str, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        verdict, title, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"[{verdict}] {n}. {title}: {detail}")
