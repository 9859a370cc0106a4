"""End-to-end orchestration: parse, extract, join store, match, merge, validate, generate, write."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .concepts import ConceptGraph, EdgeKind, RoleAssignment
from .errors import EmptyCorpus
from .extraction import classify_roles, extract_concepts
from .lexical import LexicalResource, load_lexicon
from .matching import DEFAULT_CONFIG, MatchConfig, match_concepts
from .merging import ValidationReport, merge_concepts, validate_graph
from .skeleton import OntologySkeleton, generate_skeleton, serialize_skeleton, validate_base_iri
from .store import ConceptStore, config_fingerprint, join_store, load_store, save_store, write_atomic
from .xsd import build_corpus_model, parse_schema_document

DEFAULT_BASE_IRI = "http://example.org/ontology#"


@dataclass(frozen=True)
class PipelineConfig:
    input_paths: tuple[str, ...] = ()
    lexicon_path: str | None = None
    match_config: MatchConfig = DEFAULT_CONFIG
    singularize: bool = False
    base_iri: str = DEFAULT_BASE_IRI
    store_path: str | None = None
    output_path: str = "ontology.ttl"
    report_format: str = "text"

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_paths", tuple(str(p) for p in self.input_paths))
        if self.report_format not in ("text", "json"):
            raise ValueError(f"report_format must be 'text' or 'json', got {self.report_format!r}")

    @property
    def report_path(self) -> Path:
        out = Path(self.output_path)
        return out.with_name(f"{out.stem}.report.{'json' if self.report_format == 'json' else 'txt'}")


@dataclass(frozen=True)
class SummaryReport:
    classes: tuple[str, ...] = ()
    properties: tuple[str, ...] = ()
    datatypes: tuple[str, ...] = ()
    relationships: tuple[tuple[str, str, str], ...] = ()  # (kind, from, to)

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "properties": list(self.properties),
            "datatypes": list(self.datatypes),
            "relationships": [{"kind": k, "from": a, "to": b} for k, a, b in self.relationships],
        }

    def to_text(self) -> str:
        lines = [
            f"Classes: {len(self.classes)} ({', '.join(self.classes)})",
            f"Properties: {len(self.properties)} ({', '.join(self.properties)})",
            f"Datatypes: {len(self.datatypes)} ({', '.join(self.datatypes)})",
            f"Relationships: {len(self.relationships)}",
        ]
        lines += [f"  {a} {k} {b}" for k, a, b in self.relationships]
        return "\n".join(lines) + "\n"


def report_summary(graph: ConceptGraph, roles: RoleAssignment) -> SummaryReport:
    """Sorted labels per role plus the reported relationships.

    Reported relationships are is-a links into classes from non-datatype
    concepts, and every disjointness and equivalence link.
    """
    def names(ids) -> tuple[str, ...]:
        return tuple(sorted(graph.label(i) for i in ids if i in graph.concepts))

    rels = set()
    for e in graph.edges:
        if e.source not in graph.concepts or e.target not in graph.concepts:
            continue
        if e.kind is EdgeKind.IS_A:
            if e.target in roles.classes and e.source not in roles.datatypes:
                rels.add((e.kind.value, graph.label(e.source), graph.label(e.target)))
        elif e.kind in (EdgeKind.DISJOINT, EdgeKind.EQUIVALENT):
            rels.add((e.kind.value, graph.label(e.source), graph.label(e.target)))
    return SummaryReport(
        names(roles.classes),
        names(roles.properties - roles.classes),
        names(roles.datatypes),
        tuple(sorted(rels)),
    )


@dataclass
class PipelineResult:
    skeleton: OntologySkeleton
    validation: ValidationReport
    summary: SummaryReport
    graph: ConceptGraph
    roles: RoleAssignment
    turtle: str
    report_text: str
    files: list[Path] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 0 if self.validation.ok else 2

    def __iter__(self):
        return iter((self.skeleton, self.validation, self.summary))


def discover_inputs(paths) -> list[tuple[str, Path]]:
    """(source id, file) for every ``*.xsd`` under the given paths, sorted by source id."""
    found: dict[str, Path] = {}
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            for f in p.rglob("*.xsd"):
                if f.is_file():
                    found[(Path(raw) / f.relative_to(p)).as_posix()] = f
        elif p.is_file():
            found[p.as_posix()] = p
        else:
            raise FileNotFoundError(f"input path does not exist: {raw}")
    return sorted(found.items())


def render_report(summary: SummaryReport, validation: ValidationReport, fmt: str) -> str:
    if fmt == "json":
        doc = {"summary": summary.to_dict(), "validation": validation.to_dict()}
        return json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=False) + "\n"
    return summary.to_text() + "\n" + validation.to_text()


def build_graph(sources: list[tuple[str, bytes]], singularize: bool = False) -> ConceptGraph:
    docs = [parse_schema_document(data, sid) for sid, data in sources]
    return extract_concepts(build_corpus_model(docs), singularize=singularize)


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Run every stage and write the Turtle file, the report and (when valid) the store.

    Nothing is written until all stages have succeeded; each file is
    replaced atomically.
    """
    validate_base_iri(config.base_iri)
    config.match_config.validate()
    resource: LexicalResource = load_lexicon(config.lexicon_path, config.singularize)

    inputs = discover_inputs(config.input_paths)
    store: ConceptStore | None = None
    if config.store_path and Path(config.store_path).exists():
        store = load_store(config.store_path)
    if not inputs and store is None:
        raise EmptyCorpus("no .xsd files found and no concept store given")

    sources = [(sid, path.read_bytes()) for sid, path in inputs]
    graph = build_graph(sources, config.singularize)

    fingerprint = config_fingerprint(config.match_config, resource)
    if store is not None:
        graph = join_store(graph, store, fingerprint)

    roles = classify_roles(graph)
    matches = match_concepts(graph, roles, config.match_config, resource)
    merged = merge_concepts(graph, matches, resource)
    roles = classify_roles(merged)
    validation = validate_graph(merged, roles)
    summary = report_summary(merged, roles)

    skeleton = generate_skeleton(merged, roles)
    turtle = serialize_skeleton(skeleton, config.base_iri)
    report_text = render_report(summary, validation, config.report_format)

    result = PipelineResult(skeleton, validation, summary, merged, roles, turtle, report_text)
    out = Path(config.output_path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_atomic(out, turtle)
    write_atomic(config.report_path, report_text)
    result.files += [out, config.report_path]
    if config.store_path and validation.ok:
        save_store(ConceptStore(merged, roles, fingerprint), config.store_path)
        result.files.append(Path(config.store_path))
    return result


__all__ = [
    "DEFAULT_BASE_IRI",
    "PipelineConfig",
    "PipelineResult",
    "SummaryReport",
    "discover_inputs",
    "render_report",
    "report_summary",
    "run_pipeline",
]
