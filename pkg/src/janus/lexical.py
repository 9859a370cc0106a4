"""Label normalisation and synonym-aware label similarity.

Labels are split into lowercase tokens, abbreviations are expanded from a
pluggable lexicon, and two token lists are compared with a Jaccard
coefficient whose intersection counts synonym-equivalent tokens.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyLabel, LexiconError

TokenList = tuple[str, ...]

_SINGULAR_KEEP = frozenset(
    {"status", "address", "news", "series", "species", "analysis", "basis", "axis",
     "gas", "bus", "this", "yes", "its", "us", "is", "was", "has", "plus", "bonus", "campus"}
)


def _kind(ch: str) -> str:
    if ch.isdigit():
        return "digit"
    if ch.isupper():
        return "upper"
    if ch.isalpha():
        return "lower"
    return "delim"


def tokenize_label(raw: str) -> TokenList:
    """Split an XML name into lowercase tokens.

    Boundaries: any non-alphanumeric character (``_ - .`` and spaces among
    them), lower-to-upper case transitions, letter/digit transitions, and the
    last capital of an acronym run that is followed by a lowercase letter
    (``XMLSchema`` -> ``xml``, ``schema``).
    """
    tokens: list[str] = []
    current: list[str] = []
    text = raw or ""
    for i, ch in enumerate(text):
        kind = _kind(ch)
        if kind == "delim":
            if current:
                tokens.append("".join(current))
                current = []
            continue
        if current:
            prev = _kind(text[i - 1])
            nxt = _kind(text[i + 1]) if i + 1 < len(text) else "delim"
            split = (
                (prev == "lower" and kind == "upper")
                or (prev == "digit") != (kind == "digit")
                or (prev == "upper" and kind == "upper" and nxt == "lower")
            )
            if split:
                tokens.append("".join(current))
                current = []
        current.append(ch)
    if current:
        tokens.append("".join(current))
    if not tokens:
        raise EmptyLabel(f"label {raw!r} contains no word characters")
    return tuple(t.lower() for t in tokens)


def singularize(word: str) -> str:
    """Naive English singular: drop one trailing ``s`` unless the word looks singular already."""
    if len(word) <= 3 or word in _SINGULAR_KEEP or not word.endswith("s"):
        return word
    if word.endswith(("ss", "us", "is")):
        return word
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    return word[:-1]


@dataclass(frozen=True)
class LexicalResource:
    """Synonym classes and abbreviation expansions; immutable once built.

    ``synonym_sets`` maps every token that has synonyms to its whole
    equivalence class (the closure of all ``syn:`` records it occurs in).
    """

    synonym_sets: dict[str, frozenset[str]] = field(default_factory=dict)
    abbreviations: dict[str, TokenList] = field(default_factory=dict)
    singularize: bool = False

    @classmethod
    def build(cls, synonym_groups=(), abbreviations=None, singularize: bool = False) -> "LexicalResource":
        parent: dict[str, str] = {}

        def find(t: str) -> str:
            while parent[t] != t:
                parent[t] = parent[parent[t]]
                t = parent[t]
            return t

        for group in synonym_groups:
            group = [g.strip().lower() for g in group if g.strip()]
            for t in group:
                parent.setdefault(t, t)
            for a, b in zip(group, group[1:]):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        classes: dict[str, set[str]] = {}
        for t in parent:
            classes.setdefault(find(t), set()).add(t)
        synonym_sets = {t: frozenset(classes[find(t)]) for t in parent if len(classes[find(t)]) > 1}
        abbr: dict[str, TokenList] = {}
        for short, long in (abbreviations or {}).items():
            expansion = tuple(long.lower().split()) if isinstance(long, str) else tuple(w.lower() for w in long)
            if not expansion:
                raise LexiconError(f"abbreviation {short!r} has an empty expansion")
            abbr[short.strip().lower()] = expansion
        return cls(synonym_sets, abbr, singularize)

    def canonical(self, token: str) -> str:
        """Representative of the token's synonym class (the class minimum)."""
        group = self.synonym_sets.get(token)
        return min(group) if group else token

    def synonymous(self, a: str, b: str) -> bool:
        return a == b or b in self.synonym_sets.get(a, ())

    def fingerprint_data(self) -> dict:
        return {
            "synonyms": sorted(sorted(g) for g in {g for g in self.synonym_sets.values()}),
            "abbreviations": {k: list(v) for k, v in sorted(self.abbreviations.items())},
            "singularize": self.singularize,
        }


EMPTY_RESOURCE = LexicalResource()


def parse_lexicon(text: str, singularize: bool = False) -> LexicalResource:
    """Parse the sidecar format: ``syn: t1, t2, ...`` and ``abbr: short = long words``; ``#`` comments."""
    groups: list[list[str]] = []
    abbreviations: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, sep, body = line.partition(":")
        tag = tag.strip().lower()
        if not sep or tag not in ("syn", "abbr"):
            raise LexiconError(f"line {lineno}: expected 'syn:' or 'abbr:' record, got {raw!r}")
        if tag == "syn":
            group = [t.strip() for t in body.split(",") if t.strip()]
            if len(group) < 2:
                raise LexiconError(f"line {lineno}: a synonym record needs at least two terms")
            groups.append(group)
        else:
            short, eq, long = body.partition("=")
            if not eq or not short.strip() or not long.strip():
                raise LexiconError(f"line {lineno}: expected 'abbr: short = long words'")
            abbreviations[short.strip()] = long.strip()
    return LexicalResource.build(groups, abbreviations, singularize)


def load_lexicon(path: str | os.PathLike | None, singularize: bool = False) -> LexicalResource:
    if path is None:
        return LexicalResource(singularize=singularize)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon {path}: {exc}") from exc
    return parse_lexicon(text, singularize)


def expand_abbreviations(tokens: TokenList, resource: LexicalResource) -> TokenList:
    out: list[str] = []
    for t in tokens:
        out.extend(resource.abbreviations.get(t, (t,)))
    return tuple(out)


def normalize_label(raw: str, resource: LexicalResource = EMPTY_RESOURCE) -> TokenList:
    tokens = expand_abbreviations(tokenize_label(raw), resource)
    if resource.singularize:
        tokens = tuple(singularize(t) for t in tokens)
    return tokens


def _matched(a: set[str], b: set[str], resource: LexicalResource) -> int:
    """Size of a maximum one-to-one pairing of synonym-equal tokens between a and b."""
    ca = Counter(resource.canonical(t) for t in a)
    cb = Counter(resource.canonical(t) for t in b)
    return sum(min(n, cb[k]) for k, n in ca.items())


def matched_jaccard(a: set[str], b: set[str], resource: LexicalResource) -> float:
    if not a and not b:
        return 0.0
    m = _matched(a, b, resource)
    return m / (len(a) + len(b) - m)


def label_similarity(a: TokenList, b: TokenList, resource: LexicalResource = EMPTY_RESOURCE) -> float:
    """Jaccard coefficient over token sets where synonyms count as equal.

    The intersection is the size of a maximum pairing of equal tokens, so the
    score is symmetric, 1.0 for identical lists, and never decreases when the
    lexicon gains synonyms.
    """
    if not a or not b:
        raise ValueError("label_similarity needs non-empty token lists")
    return matched_jaccard(set(a), set(b), resource)


def label_signature(tokens: TokenList, resource: LexicalResource) -> tuple[tuple[str, int], ...]:
    """Two labels have similarity 1.0 exactly when their signatures are equal."""
    counts = Counter(resource.canonical(t) for t in set(tokens))
    return tuple(sorted(counts.items()))


def default_lexicon_path() -> Path:
    return Path(__file__).with_name("data") / "b2b.lex"
