from __future__ import annotations

from collections import Counter

import networkx as nx
from hypothesis import given, settings

from janus.concepts import EdgeKind, RelationKind
from janus.extraction import classify_roles, extract_concepts
from janus.lexical import LexicalResource
from janus.matching import MatchConfig, MatchSet, match_concepts
from janus.merging import detect_inclusion, merge_concepts, validate_graph
from janus.xsd import Occurrence, build_corpus_model, parse_schema_document

from conftest import WINE_DIR, hand_graph
from graphgen import concept_graphs

LEX = LexicalResource.build([["owner", "person"], ["zip", "postcode"]])


def _merge(graph, config=MatchConfig(), resource=LexicalResource()):
    return merge_concepts(graph, match_concepts(graph, classify_roles(graph), config, resource), resource)


def _inclusion_graph():
    return hand_graph(
        {"pa": ("postal_address", ["a"], None), "ad": ("address", ["b"], None), "ad2": ("address", ["c"], None),
         "x": ("wine", ["b"], None), "name": ("name", ["a", "b"], None), "street": ("street", ["b"], None),
         "year": ("year", ["b"], None)},
        [("propertyOf", "pa", "name"), ("propertyOf", "ad", "name"), ("propertyOf", "ad", "street"),
         ("propertyOf", "ad2", "name"), ("propertyOf", "ad2", "street"), ("propertyOf", "x", "year")],
    )


def test_detect_inclusion():
    c = _inclusion_graph().concepts
    assert detect_inclusion(c["pa"], c["ad"])
    assert not detect_inclusion(c["ad"], c["pa"])
    assert detect_inclusion(c["ad"], c["ad2"]) and detect_inclusion(c["ad2"], c["ad"])
    assert not detect_inclusion(c["ad"], c["x"])


def test_empty_matchset_leaves_graph_unchanged(wine_graph):
    assert merge_concepts(wine_graph, MatchSet()) == wine_graph


def test_two_addresses_collapse_with_union_of_properties():
    g = hand_graph(
        {"address": ("address", ["a.xsd"], None), "address#b": ("address", ["b.xsd"], None),
         "street": ("street", ["a.xsd", "b.xsd"], None), "city": ("city", ["a.xsd"], None),
         "zip": ("zip", ["b.xsd"], None), "person": ("person", ["b.xsd"], None)},
        [("propertyOf", "address", "street"), ("propertyOf", "address", "city"),
         ("propertyOf", "address#b", "street", (0, 1)), ("propertyOf", "address#b", "zip"),
         ("propertyOf", "person", "address#b"), ("propertyOf", "person", "street")],
    )
    roles = classify_roles(g)
    ms = match_concepts(g, roles, MatchConfig(accept_threshold=0.6))
    assert ms.pairs() == {frozenset({"address", "address#b"})}
    merged = merge_concepts(g, ms)
    assert "address#b" not in merged.concepts
    addr = merged.concepts["address"]
    assert addr.property_ids == {"street", "city", "zip"}
    assert len(addr.instances) == 2
    assert dict(addr.properties)["street"] == Occurrence(0, 1)
    assert "address" in merged.concepts["person"].property_ids


def test_merged_label_selection_and_relation():
    g = hand_graph(
        {"owner": ("owner", ["a"], None), "person": ("person", ["b", "c"], None),
         "name": ("name", ["a", "b"], None), "age": ("age", ["a", "b"], None)},
        [("propertyOf", "owner", "name"), ("propertyOf", "owner", "age"),
         ("propertyOf", "person", "name"), ("propertyOf", "person", "age")],
    )
    merged = _merge(g, resource=LEX)
    (cid,) = [c for c in merged.concepts if c not in ("name", "age")]
    c = merged.concepts[cid]
    assert c.label == "person"  # person occurs in two documents, owner in one
    assert any(r.kind is RelationKind.NON_SEMANTIC and r.target == "owner" for r in c.relations)


def test_mutual_inclusion_merges_without_matches():
    merged = merge_concepts(_inclusion_graph(), MatchSet())
    assert "ad2" not in merged.concepts and "ad" in merged.concepts
    assert "pa" in merged.concepts  # one-way inclusion is not enough


def test_merge_conflict_on_isa_cycle():
    g = hand_graph(
        {"a": ("address", ["a"], None), "b": ("address", ["b"], None),
         "s": ("street", ["a", "b"], None), "c": ("city", ["a", "b"], None)},
        [("propertyOf", "a", "s"), ("propertyOf", "a", "c"), ("propertyOf", "b", "s"),
         ("propertyOf", "b", "c"), ("is-a", "a", "b")],
    )
    merged = _merge(g, MatchConfig(accept_threshold=0.5))
    assert set(merged.concepts) == set(g.concepts)
    assert [w.code for w in merged.warnings] == ["merge-conflict"]
    assert validate_graph(merged, classify_roles(merged)).ok


def test_duplicated_corpus_reproduces_graph(wine_graph):
    docs = []
    for prefix in ("one", "two"):
        for p in sorted(WINE_DIR.glob("*.xsd")):
            docs.append(parse_schema_document(p.read_bytes(), f"{prefix}/{p.name}"))
    doubled = extract_concepts(build_corpus_model(docs))
    merged = _merge(doubled)
    assert set(merged.concepts) == set(wine_graph.concepts)
    assert merged.edges == wine_graph.edges
    for cid, c in merged.concepts.items():
        assert c.label == wine_graph.concepts[cid].label
        assert len(c.instances) == 2 * len(wine_graph.concepts[cid].instances)


# ------------------------------------------------------------------ validation


def test_valid_graph_has_no_errors(wine_graph, wine_roles):
    assert validate_graph(wine_graph, wine_roles).errors == ()


def test_cycle_detected_once():
    g = hand_graph({"a": ("A", ["x"], None), "b": ("B", ["x"], None)}, [("is-a", "a", "b"), ("is-a", "b", "a")])
    (err,) = validate_graph(g, classify_roles(g)).errors
    assert err.code == "isa-cycle" and set(err.concepts) == {"a", "b"}


def test_disjoint_plus_subsumption_detected_once():
    g = hand_graph({"x": ("X", ["s"], None), "y": ("Y", ["s"], None)}, [("disjointWith", "x", "y"), ("is-a", "x", "y")])
    (err,) = validate_graph(g, classify_roles(g)).errors
    assert err.code == "disjoint-subsumption"


def test_dangling_edge_detected():
    g = hand_graph({"x": ("X", ["s"], None)}, [("is-a", "x", "ghost")])
    report = validate_graph(g, classify_roles(g))
    assert [e.code for e in report.errors] == ["dangling-edge"]


def test_report_serialisation():
    g = hand_graph({"a": ("A", ["x"], None)}, [("is-a", "a", "a")])
    report = validate_graph(g, classify_roles(g))
    doc = report.to_dict()
    assert doc["errors"][0]["code"] == "isa-cycle" and doc["errors"][0]["concepts"] == ["a"]
    assert set(doc["errors"][0]) >= {"code", "message", "concepts"} and doc["warnings"] == []
    assert report.to_text().startswith("Errors: 1")


@settings(max_examples=200, deadline=None)
@given(concept_graphs(cycles=True))
def test_cycle_errors_agree_with_networkx(graph):
    before = graph
    report = validate_graph(graph, classify_roles(graph))
    assert graph == before
    dg = nx.DiGraph((e.source, e.target) for e in graph.edges if e.kind is EdgeKind.IS_A)
    has_cycle = dg.number_of_nodes() > 0 and not nx.is_directed_acyclic_graph(dg)
    assert has_cycle == any(e.code == "isa-cycle" for e in report.errors)


# ------------------------------------------------------------------ merge properties


def _owner_map(before, after):
    where = {p: cid for cid, c in after.concepts.items() for p in c.instances}
    return {cid: where[c.instances[0]] for cid, c in before.concepts.items()}


_LOW = MatchConfig(accept_threshold=0.5)


@settings(max_examples=200, deadline=None)
@given(concept_graphs())
def test_merge_conserves_provenance(graph):
    merged = _merge(graph, _LOW, LEX)
    before = Counter(p for c in graph.concepts.values() for p in c.instances)
    after = Counter(p for c in merged.concepts.values() for p in c.instances)
    assert before == after


@settings(max_examples=200, deadline=None)
@given(concept_graphs())
def test_merge_never_loses_properties(graph):
    merged = _merge(graph, _LOW, LEX)
    mapping = _owner_map(graph, merged)
    for cid, c in graph.concepts.items():
        new = merged.concepts[mapping[cid]]
        assert {mapping[p] for p in c.property_ids} <= new.property_ids


@settings(max_examples=200, deadline=None)
@given(concept_graphs())
def test_double_merge_is_fixpoint(graph):
    merged = _merge(graph, _LOW, LEX)
    again = _merge(merged, _LOW, LEX)
    assert again == merged
    # pairs still scoring above threshold are exactly those refused to avoid a conflict
    isa = nx.DiGraph((e.source, e.target) for e in merged.edges if e.kind is EdgeKind.IS_A)
    isa.add_nodes_from(merged.concepts)
    disjoint = {frozenset((e.source, e.target)) for e in merged.edges if e.kind is EdgeKind.DISJOINT}
    for m in match_concepts(merged, classify_roles(merged), _LOW, LEX):
        a, b = m.left, m.right
        assert nx.has_path(isa, a, b) or nx.has_path(isa, b, a) or frozenset((a, b)) in disjoint
        assert any(w.code == "merge-conflict" for w in merged.warnings)


def test_fixpoint_without_conflicts(wine_graph):
    merged = _merge(_inclusion_graph(), _LOW, LEX)
    assert len(match_concepts(merged, classify_roles(merged), _LOW, LEX)) == 0


@settings(max_examples=200, deadline=None)
@given(concept_graphs())
def test_merge_of_acyclic_graph_stays_acyclic(graph):
    merged = _merge(graph, _LOW, LEX)
    errors = validate_graph(merged, classify_roles(merged)).errors
    assert not [e for e in errors if e.code == "isa-cycle"]
