"""Derive an ontology skeleton from a corpus of XML Schema documents."""

from .concepts import Concept, ConceptGraph, Edge, EdgeKind, Provenance, Relation, RoleAssignment, Rule
from .errors import (
    CorruptStore,
    EmptyCorpus,
    EmptyLabel,
    InvalidConfig,
    InvalidIri,
    JanusError,
    LexiconError,
    MalformedXml,
    NotASchema,
    RoleConflict,
    UnclassifiedConcept,
    UnsupportedVersion,
)
from .extraction import classify_roles, extract_concepts
from .lexical import LexicalResource, label_similarity, load_lexicon, normalize_label, parse_lexicon, tokenize_label
from .matching import Match, MatchConfig, MatchSet, context_similarity, match_concepts, property_set_similarity
from .merging import ValidationReport, detect_inclusion, merge_concepts, validate_graph
from .pipeline import PipelineConfig, SummaryReport, report_summary, run_pipeline
from .skeleton import OntologySkeleton, PropertyDef, generate_skeleton, serialize_skeleton
from .store import ConceptStore, load_store, save_store
from .xsd import CorpusModel, SchemaDocument, build_corpus_model, parse_schema_document

__version__ = "0.1.0"
