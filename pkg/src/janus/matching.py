"""Cross-source concept matching on label, property-set and context similarity."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

from .concepts import Concept, ConceptGraph, RoleAssignment
from .errors import EmptyLabel, InvalidConfig
from .lexical import EMPTY_RESOURCE, LexicalResource, label_signature, matched_jaccard, normalize_label

EPS = 1e-12


@dataclass(frozen=True)
class MatchConfig:
    label_weight: float = 0.5
    property_weight: float = 0.3
    context_weight: float = 0.2
    accept_threshold: float = 0.8

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        weights = (self.label_weight, self.property_weight, self.context_weight)
        if any(not math.isfinite(w) or w < 0 for w in weights):
            raise InvalidConfig(f"weights must be non-negative reals, got {weights}")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise InvalidConfig(f"weights must sum to 1, got {sum(weights)!r}")
        if not (0.0 <= self.accept_threshold <= 1.0):
            raise InvalidConfig(f"threshold must lie in [0,1], got {self.accept_threshold!r}")

    @property
    def weights(self) -> tuple[float, float, float]:
        return (self.label_weight, self.property_weight, self.context_weight)

    def combine(self, label: float, prop: float, context: float) -> float:
        return self.label_weight * label + self.property_weight * prop + self.context_weight * context

    def to_dict(self) -> dict:
        return {
            "label_weight": self.label_weight,
            "property_weight": self.property_weight,
            "context_weight": self.context_weight,
            "accept_threshold": self.accept_threshold,
        }


DEFAULT_CONFIG = MatchConfig()


@dataclass(frozen=True)
class Match:
    left: str
    right: str
    label_score: float
    property_score: float
    context_score: float
    combined_score: float


@dataclass(frozen=True)
class MatchSet:
    matches: tuple[Match, ...] = ()
    config: MatchConfig = field(default=DEFAULT_CONFIG, compare=False)

    def __len__(self) -> int:
        return len(self.matches)

    def __iter__(self) -> Iterator[Match]:
        return iter(self.matches)

    def pairs(self) -> set[frozenset[str]]:
        return {frozenset((m.left, m.right)) for m in self.matches}


def concept_tokens(concept: Concept | str, resource: LexicalResource = EMPTY_RESOURCE) -> tuple[str, ...]:
    label = concept if isinstance(concept, str) else concept.label
    try:
        return normalize_label(label, resource)
    except EmptyLabel:
        return (label.casefold() or "_",)


def _property_counter(concept: Concept, resource: LexicalResource) -> Counter:
    return Counter(label_signature(concept_tokens(lbl, resource), resource) for lbl in concept.property_labels)


def _counter_jaccard(a: Counter, b: Counter) -> float:
    size_a, size_b = sum(a.values()), sum(b.values())
    if not size_a or not size_b:
        return 0.0
    m = sum(min(n, b[k]) for k, n in a.items())
    return m / (size_a + size_b - m)


def property_set_similarity(c1: Concept, c2: Concept, resource: LexicalResource = EMPTY_RESOURCE) -> float:
    """Jaccard over property labels, two labels being equal when their label similarity is 1.0.

    Concepts without properties score 0.
    """
    return _counter_jaccard(_property_counter(c1, resource), _property_counter(c2, resource))


def _context_set(concept: Concept, exclude: str) -> set[tuple[str, str]]:
    return {(kind, label) for kind, neighbour, label in concept.context if neighbour != exclude}


def context_similarity(c1: Concept, c2: Concept) -> float:
    a, b = _context_set(c1, c2.id), _context_set(c2, c1.id)
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def _ordered(c1: Concept, c2: Concept) -> tuple[Concept, Concept]:
    return (c1, c2) if (c1.label.casefold(), c1.id) <= (c2.label.casefold(), c2.id) else (c2, c1)


@dataclass
class _Features:
    concept: Concept
    tokens: tuple[str, ...]
    label_classes: frozenset[str]
    props: Counter
    context: frozenset[tuple[str, str]]


def _features(concept: Concept, resource: LexicalResource) -> _Features:
    tokens = concept_tokens(concept, resource)
    return _Features(
        concept,
        tokens,
        frozenset(resource.canonical(t) for t in tokens),
        _property_counter(concept, resource),
        frozenset((kind, label) for kind, _, label in concept.context),
    )


def _component_keys(f: _Features, component: int) -> Iterable:
    if component == 0:
        return f.label_classes
    if component == 1:
        return f.props.keys()
    return f.context


def _candidate_pairs(ids: list[str], feats: dict[str, _Features], config: MatchConfig) -> Iterator[tuple[str, str]]:
    """Pairs that can possibly reach the threshold.

    A component whose absence caps the combined score below the threshold is
    required; pairs are drawn from the inverted index of one required
    component and filtered on the others.
    """
    w = config.weights
    required = [i for i in range(3) if sum(w) - w[i] < config.accept_threshold - 1e-9]
    if not required:
        yield from combinations(ids, 2)
        return
    indexes: dict[int, dict] = {}
    for comp in required:
        index: dict = defaultdict(list)
        for cid in ids:
            for k in _component_keys(feats[cid], comp):
                index[k].append(cid)
        indexes[comp] = index
    driver = min(required, key=lambda c: sum(len(v) ** 2 for v in indexes[c].values()))
    others = [c for c in required if c != driver]
    position = {cid: i for i, cid in enumerate(ids)}
    for cid in ids:
        fa = feats[cid]
        partners: set[str] = set()
        for k in _component_keys(fa, driver):
            partners.update(indexes[driver][k])
        for other in sorted(partners, key=position.__getitem__):
            if position[other] <= position[cid]:
                continue
            fb = feats[other]
            if all(not set(_component_keys(fa, c)).isdisjoint(_component_keys(fb, c)) for c in others):
                yield cid, other


def score_pair(c1: Concept, c2: Concept, config: MatchConfig, resource: LexicalResource = EMPTY_RESOURCE) -> Match:
    left, right = _ordered(c1, c2)
    ls = matched_jaccard(set(concept_tokens(left, resource)), set(concept_tokens(right, resource)), resource)
    ps = property_set_similarity(left, right, resource)
    cs = context_similarity(left, right)
    return Match(left.id, right.id, ls, ps, cs, config.combine(ls, ps, cs))


def match_concepts(
    graph: ConceptGraph,
    roles: RoleAssignment,
    config: MatchConfig = DEFAULT_CONFIG,
    resource: LexicalResource = EMPTY_RESOURCE,
) -> MatchSet:
    """Score same-role pairs whose source sets differ; keep those at or above the threshold."""
    config.validate()
    found: list[Match] = []
    for role_set in (roles.classes, roles.properties - roles.classes):
        ids = sorted(cid for cid in role_set if cid in graph.concepts)
        feats = {cid: _features(graph.concepts[cid], resource) for cid in ids}
        for a, b in _candidate_pairs(ids, feats, config):
            ca, cb = graph.concepts[a], graph.concepts[b]
            if ca.sources == cb.sources:
                continue
            left, right = _ordered(ca, cb)
            fl, fr = feats[left.id], feats[right.id]
            ls = matched_jaccard(set(fl.tokens), set(fr.tokens), resource)
            ps = _counter_jaccard(fl.props, fr.props)
            cs = context_similarity(left, right)
            combined = config.combine(ls, ps, cs)
            if combined >= config.accept_threshold - EPS:
                found.append(Match(left.id, right.id, ls, ps, cs, combined))
    found.sort(key=lambda m: (-m.combined_score, graph.label(m.left).casefold(), graph.label(m.right).casefold(), m.left, m.right))
    return MatchSet(tuple(found), config)
