"""Hypothesis strategy for small random concept graphs."""

from __future__ import annotations

from hypothesis import strategies as st

from janus.concepts import Concept, Edge, EdgeKind, Provenance, Relation, RelationKind, Rule, assemble_graph
from janus.xsd import Occurrence

LABELS = ["address", "Address", "postal_address", "person", "owner", "name", "street", "city",
          "wine", "zip", "postcode", "drinker", "status", "year"]
SOURCES = ["a.xsd", "b.xsd", "c.xsd"]
BUILTINS = ["string", "integer", "gYear"]
_RULES = [Rule.COMPLEX_TYPE, Rule.ELEMENT_TYPED, Rule.ELEMENT_NAMED, Rule.ATTRIBUTE]


@st.composite
def concept_graphs(draw, max_concepts: int = 20, cycles: bool = False):
    n = draw(st.integers(1, max_concepts))
    is_datatype = [draw(st.booleans()) and draw(st.booleans()) for _ in range(n)]
    concepts = []
    for i in range(n):
        label = draw(st.sampled_from(LABELS))
        srcs = draw(st.lists(st.sampled_from(SOURCES), min_size=1, max_size=2))
        rule = Rule.SIMPLE_TYPE if is_datatype[i] else draw(st.sampled_from(_RULES))
        inst = tuple(Provenance(s, f"/{label}[{i}]#{k}", rule) for k, s in enumerate(srcs))
        rel = (Relation(RelationKind.SEMANTIC, "synonym"),) if draw(st.booleans()) and not is_datatype[i] else ()
        dt = draw(st.sampled_from(BUILTINS)) if is_datatype[i] else None
        concepts.append(Concept(f"c{i}", label, inst, rel, dt))
    edges = []
    owners = [i for i in range(n) if not is_datatype[i]]
    for _ in range(draw(st.integers(0, 2 * n))):
        if not owners or n < 2:
            break
        s = draw(st.sampled_from(owners))
        t = draw(st.integers(0, n - 1))
        if s == t:
            continue
        kind = draw(st.sampled_from([EdgeKind.PROPERTY_OF, EdgeKind.PROPERTY_OF, EdgeKind.IS_A, EdgeKind.DISJOINT]))
        if kind is EdgeKind.IS_A and not cycles and s > t:
            s, t = t, s
            if is_datatype[s]:
                continue
        card = Occurrence(draw(st.integers(0, 1)), draw(st.sampled_from([1, 2, None]))) if kind is EdgeKind.PROPERTY_OF else None
        edges.append(Edge(kind, f"c{s}", f"c{t}", card))
    return assemble_graph(concepts, edges)


def random_graph(rng, max_concepts: int = 20):
    """Same shape as ``concept_graphs`` but driven by a ``random.Random``; used where trial counts must be exact."""
    n = rng.randint(1, max_concepts)
    is_datatype = [rng.random() < 0.25 for _ in range(n)]
    concepts = []
    for i in range(n):
        label = rng.choice(LABELS)
        srcs = rng.sample(SOURCES, rng.randint(1, 2))
        rule = Rule.SIMPLE_TYPE if is_datatype[i] else rng.choice(_RULES)
        inst = tuple(Provenance(s, f"/{label}[{i}]#{k}", rule) for k, s in enumerate(srcs))
        dt = rng.choice(BUILTINS) if is_datatype[i] else None
        concepts.append(Concept(f"c{i}", label, inst, (), dt))
    owners = [i for i in range(n) if not is_datatype[i]]
    edges = []
    for _ in range(rng.randint(0, 2 * n)):
        if not owners or n < 2:
            break
        s, t = rng.choice(owners), rng.randrange(n)
        if s == t:
            continue
        kind = rng.choice([EdgeKind.PROPERTY_OF, EdgeKind.PROPERTY_OF, EdgeKind.IS_A, EdgeKind.DISJOINT])
        if kind is EdgeKind.IS_A and s > t:
            s, t = t, s
            if is_datatype[s]:
                continue
        card = Occurrence(rng.randint(0, 1), rng.choice([1, 2, None])) if kind is EdgeKind.PROPERTY_OF else None
        edges.append(Edge(kind, f"c{s}", f"c{t}", card))
    return assemble_graph(concepts, edges)
