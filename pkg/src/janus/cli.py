"""Command-line entry point: ``janus generate <paths...>``."""

from __future__ import annotations

import argparse
import os
import sys

from .errors import JanusError
from .matching import MatchConfig
from .pipeline import DEFAULT_BASE_IRI, PipelineConfig, run_pipeline

EXIT_OK, EXIT_FATAL, EXIT_INVALID = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="janus", description="Generate an ontology skeleton from XSD files.")
    sub = parser.add_subparsers(dest="command", required=True)
    gen = sub.add_parser("generate", help="extract, match, merge and serialize")
    gen.add_argument("paths", nargs="*", help="XSD files or directories (scanned recursively)")
    gen.add_argument("--out", default="ontology.ttl", help="Turtle output file (default: %(default)s)")
    gen.add_argument("--report", choices=("text", "json"), default="text", help="report format")
    gen.add_argument("--lexicon", help="synonym/abbreviation file (default: $JANUS_LEXICON)")
    gen.add_argument("--store", help="concept store to load before matching and save afterwards")
    gen.add_argument("--base-iri", default=DEFAULT_BASE_IRI)
    defaults = MatchConfig()
    gen.add_argument("--label-weight", type=float, default=defaults.label_weight)
    gen.add_argument("--property-weight", type=float, default=defaults.property_weight)
    gen.add_argument("--context-weight", type=float, default=defaults.context_weight)
    gen.add_argument("--threshold", type=float, default=defaults.accept_threshold)
    gen.add_argument("--singularize", action="store_true", help="unify singular and plural label forms")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = PipelineConfig(
            input_paths=tuple(args.paths),
            lexicon_path=args.lexicon or os.environ.get("JANUS_LEXICON") or None,
            match_config=MatchConfig(args.label_weight, args.property_weight, args.context_weight, args.threshold),
            singularize=args.singularize,
            base_iri=args.base_iri,
            store_path=args.store,
            output_path=args.out,
            report_format=args.report,
        )
        result = run_pipeline(config)
    except (JanusError, OSError, ValueError) as exc:
        print(f"janus: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FATAL
    sys.stdout.write(result.report_text)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
