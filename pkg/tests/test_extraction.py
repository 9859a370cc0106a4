from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from janus.concepts import Concept, Edge, EdgeKind, Provenance, Rule, assemble_graph
from janus.errors import RoleConflict
from janus.extraction import classify_roles, extract_concepts
from janus.xsd import Occurrence, build_corpus_model

from conftest import graph_of, hand_graph, labels, wine_documents
from rule_fixtures import RULE_FIXTURES, run_rule_fixture

WINE_CLASSES = {"wine_taste", "wine", "person", "drinker", "drink", "address"}
WINE_PROPERTIES = {"quantity", "vineyard", "year", "zip", "status", "city", "coca", "street",
                     "boolean", "liquid", "name", "owner"}
WINE_DATATYPES = {"string", "anyURI", "gYear", "token", "integer", "byte", "number"}


def test_every_rule_has_a_fixture():
    assert set(RULE_FIXTURES) == set(Rule) and len(Rule) == 13


@pytest.mark.parametrize("rule", list(Rule), ids=lambda r: r.value)
def test_rule_fixture(rule):
    run_rule_fixture(rule)


def test_empty_model():
    g = extract_concepts(build_corpus_model([]))
    assert g.concepts == {} and g.edges == frozenset()


def test_wine_roles_match_expected(wine_graph, wine_roles):
    assert labels(wine_graph, wine_roles.classes) == WINE_CLASSES
    assert labels(wine_graph, wine_roles.properties - wine_roles.classes) == WINE_PROPERTIES
    assert labels(wine_graph, wine_roles.datatypes) == WINE_DATATYPES


def test_wine_relationships(wine_graph):
    isa = {(e.source, e.target) for e in wine_graph.edges if e.kind is EdgeKind.IS_A}
    assert {("drinker", "person"), ("owner", "person")} <= isa
    disjoint = {(e.source, e.target) for e in wine_graph.edges if e.kind is EdgeKind.DISJOINT}
    assert disjoint == {("coca", "wine")}


def test_owner_plays_property_and_isa(wine_graph, wine_roles):
    assert "owner" in wine_roles.properties
    assert ("owner", Occurrence(0, None)) in wine_graph.concepts["wine"].properties


def test_unbounded_cardinality(wine_graph):
    cards = dict(wine_graph.concepts["drinker"].properties)
    assert cards["drink"] == Occurrence(0, None)


def test_label_unification_accumulates_provenance(wine_graph):
    # complexType drinker and the global element drinker both land on one concept
    sources = {p.source_id for p in wine_graph.concepts["drinker"].instances}
    assert sources == {"wine_drinkers.xsd", "wine_tasting.xsd"}


def test_surjectivity_witness(wine_graph):
    named = {"address", "person", "drinker", "number", "wine", "drink", "wine_taste"}
    for name in named:
        assert wine_graph.concepts[name].instances


def test_untyped_element_with_inline_choice_is_class():
    g = graph_of('<xs:element name="Tasting"><xs:complexType><xs:choice>'
                 '<xs:element name="Coca" type="Drink"/><xs:element name="Wine" type="Drink"/>'
                 "</xs:choice></xs:complexType></xs:element>"
                 '<xs:complexType name="Drink"><xs:sequence><xs:element name="a" type="xs:string"/>'
                 '<xs:element name="b" type="xs:string"/></xs:sequence></xs:complexType>')
    assert g.label("coca") == "Coca"
    assert {(e.source, e.target) for e in g.edges_of(EdgeKind.DISJOINT)} == {("coca", "wine")}


def test_case_insensitive_unification_keeps_frequent_spelling():
    g = graph_of('<xs:element name="Wine" type="xs:string"/>',
                 '<xs:element name="Wine" type="xs:string"/>',
                 '<xs:element name="wine" type="xs:string"/>')
    assert g.label("wine") == "Wine" and len(g.concepts["wine"].instances) == 3


def test_singularize_flag_unifies_plural():
    body = ('<xs:element name="owners" type="xs:string"/>', '<xs:element name="owner" type="xs:string"/>')
    assert {"owner", "owners"} <= set(graph_of(*body).concepts)
    assert "owners" not in graph_of(*body, singularize=True).concepts


def test_unresolved_reference_becomes_opaque_datatype():
    g = graph_of('<xs:complexType name="T"><xs:sequence><xs:element name="x" type="Unknown"/>'
                 '<xs:element name="y" type="xs:string"/></xs:sequence></xs:complexType>')
    r = classify_roles(g)
    assert "unknown" in r.datatypes
    assert any(w.code == "unresolved-reference" for w in g.warnings)


def test_nested_group_occurrence_multiplies():
    g = graph_of('<xs:complexType name="T"><xs:sequence minOccurs="0" maxOccurs="2">'
                 '<xs:element name="x" type="xs:string" maxOccurs="3"/>'
                 '<xs:element name="y" type="xs:string"/></xs:sequence></xs:complexType>')
    assert dict(g.concepts["t"].properties)["x"] == Occurrence(0, 6)


def test_classify_hand_graphs():
    g = hand_graph({"s": ("string", ["a"], "string")})
    assert classify_roles(g).datatypes == {"s"}
    g = hand_graph(
        {"a": ("A", ["x"], None), "b": ("B", ["x"], "string"), "c": ("C", ["x"], "int")},
        [("propertyOf", "a", "b"), ("propertyOf", "a", "c")],
    )
    r = classify_roles(g)
    assert r.classes == {"a"} and r.properties == {"b", "c"} and r.datatypes == {"b", "c"}


def test_single_property_escape_rule():
    complex_one = graph_of('<xs:complexType name="T"><xs:sequence><xs:element name="x" type="xs:string"/>'
                           "</xs:sequence></xs:complexType>")
    assert "t" in classify_roles(complex_one).classes
    b = Concept("b", "B", (Provenance("x", "/B", Rule.SIMPLE_TYPE),), (), "string")
    a = Concept("a", "A", (Provenance("x", "/A", Rule.ELEMENT_NAMED),))
    g = assemble_graph([a, b], [Edge(EdgeKind.PROPERTY_OF, "a", "b", Occurrence())])
    assert classify_roles(g).role_of("a") == "property"


def test_role_conflict_on_corrupt_graph():
    g = hand_graph({"a": ("A", ["x"], "string"), "b": ("B", ["x"], None)}, [("propertyOf", "a", "b")])
    with pytest.raises(RoleConflict):
        classify_roles(g)


def test_extraction_order_invariant():
    docs = wine_documents()
    reference = extract_concepts(build_corpus_model(docs))
    for perm in itertools.permutations(docs):
        g = extract_concepts(build_corpus_model(list(perm)))
        assert g == reference


_NAMES = st.sampled_from(["wine", "Wine", "person", "owner", "drink", "year", "name", "Status", "address"])
_TYPES = st.sampled_from(["xs:string", "xs:integer", "person", "wine", None])


@st.composite
def _schema_bodies(draw):
    bodies = []
    for _ in range(draw(st.integers(1, 3))):
        parts = []
        for tname in draw(st.lists(_NAMES, min_size=1, max_size=3, unique=True)):
            kids = draw(st.lists(st.tuples(_NAMES, _TYPES), min_size=1, max_size=4, unique_by=lambda t: t[0]))
            compositor = draw(st.sampled_from(["sequence", "choice", "all"]))
            els = "".join(f'<xs:element name="{n}"' + (f' type="{t}"' if t else "") + "/>" for n, t in kids)
            parts.append(f'<xs:complexType name="{tname}"><xs:{compositor}>{els}</xs:{compositor}></xs:complexType>')
        bodies.append("".join(parts))
    return bodies


@settings(max_examples=80, deadline=None)
@given(_schema_bodies())
def test_random_schemas_satisfy_graph_invariants(bodies):
    g = graph_of(*bodies)
    r = classify_roles(g)
    assert set(g.concepts) == r.classes | r.properties | r.datatypes
    assert not (r.classes & r.datatypes)
    for c in g.concepts.values():
        assert c.instances
        assert not (c.datatype_target and c.properties)
    for e in g.edges:
        assert e.source in g.concepts and e.target in g.concepts
        assert (e.cardinality is not None) == (e.kind is EdgeKind.PROPERTY_OF)
        if e.kind is EdgeKind.DISJOINT:
            assert e.source != e.target
    for cid in r.classes:
        c = g.concepts[cid]
        assert len(c.properties) > 1 or (len(c.properties) == 1 and c.complex_origin)
