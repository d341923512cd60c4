"""Command-line front end: ``divcdcr <command> ...``.

Exit codes: 0 success, 1 findings at or above the fail level (or a score
threshold not met), 2 usage, I/O or parse errors.  Payload goes to stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import tables
from .errors import DivcdcrError, ParseError
from .graph import build_discourse_entities, build_global_referents, extract_frames, relation_stats
from .ingest import export_corpus, import_tabular_export, load_corpus
from .metrics import ALL_METRICS, score_corpora
from .validation import ValidationConfig, exceeds, validate_corpus
from .wikidata import WikidataClient, audit_corpus_links

EXIT_OK, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2

log = logging.getLogger("divcdcr")


class UsageError(Exception):
    pass


def _print_findings(findings, fmt: str) -> None:
    if fmt == "machine":
        sys.stdout.write(tables.json_lines(f.to_record() for f in findings))
    else:
        for f in findings:
            print(f.to_line())


def _client(args) -> WikidataClient:
    return WikidataClient(args.cache, offline=args.offline)


def cmd_validate(args) -> int:
    disabled = [r for r in (args.disable or "").split(",") if r.strip()]
    config = ValidationConfig(fail_level=args.fail_on, disabled_rules=disabled)
    corpus = load_corpus(args.corpus)
    findings = validate_corpus(corpus, config)
    _print_findings(findings, args.format)
    return EXIT_FINDINGS if exceeds(findings, config.fail_level) else EXIT_OK


def cmd_convert(args) -> int:
    if args.source_format != "tabular":
        raise UsageError(f"unsupported input format {args.source_format!r}")
    in_dir = Path(args.in_dir)
    if not in_dir.is_dir():
        raise UsageError(f"{in_dir} is not a directory")
    paths = sorted(in_dir.glob("*.tsv"))
    if not paths:
        raise UsageError(f"no .tsv export files in {in_dir}")
    mapping = None
    if args.discourse_map:
        mapping = json.loads(Path(args.discourse_map).read_text(encoding="utf-8"))
        if not isinstance(mapping, dict):
            raise UsageError("discourse map must be a JSON object")
    files = {p.stem: p.read_bytes() for p in paths}
    corpus = import_tabular_export(files, mapping)
    # the native format only stores the closed vocabularies
    vocabulary = [f for f in validate_corpus(corpus) if f.rule_id in ("V01", "V02")]
    if vocabulary:
        for f in vocabulary:
            print(f.to_line(), file=sys.stderr)
        raise UsageError("input uses unknown entity types or relation labels; nothing written")
    Path(args.out).write_bytes(export_corpus(corpus))
    docs = list(corpus.documents())
    print(
        f"documents {len(docs)} "
        f"mentions {sum(len(d.mentions) for d in docs)} "
        f"relations {sum(len(d.relations) for d in docs)}"
    )
    return EXIT_OK


def cmd_entities(args) -> int:
    corpus = load_corpus(args.corpus)
    entities = build_discourse_entities(corpus)
    referents = build_global_referents(corpus, entities)
    if args.format == "machine":
        sys.stdout.write(tables.json_lines(tables.entity_records(entities, referents)))
    else:
        sys.stdout.write(tables.entities_text(entities, referents))
    if args.wikidata_check:
        findings = audit_corpus_links(corpus, _client(args))
        if args.format == "text" and findings:
            print()
        _print_findings(findings, args.format)
    return EXIT_OK


def cmd_link_audit(args) -> int:
    corpus = load_corpus(args.corpus)
    findings = audit_corpus_links(corpus, _client(args), suggest=not args.no_suggest)
    _print_findings(findings, args.format)
    return EXIT_FINDINGS if exceeds(findings, args.fail_on) else EXIT_OK


def cmd_frames(args) -> int:
    frames = extract_frames(load_corpus(args.corpus), args.referent)
    if args.format == "machine":
        sys.stdout.write(tables.json_lines(tables.frame_records(frames)))
    else:
        sys.stdout.write(tables.frames_text(frames))
    return EXIT_OK


def cmd_stats(args) -> int:
    stats = relation_stats(load_corpus(args.corpus), dense=args.dense)
    if args.format == "machine":
        sys.stdout.write(tables.json_lines(tables.stats_records(stats)))
    else:
        sys.stdout.write(tables.stats_text(stats))
    return EXIT_OK


def cmd_score(args) -> int:
    metrics = [m.strip() for m in args.metrics.split(",")] if args.metrics else list(ALL_METRICS)
    unknown = [m for m in metrics if m not in ALL_METRICS]
    if unknown:
        raise UsageError(f"unknown metric(s) {', '.join(unknown)}; choose from {', '.join(ALL_METRICS)}")
    report = score_corpora(load_corpus(args.gold), load_corpus(args.sys))
    if args.format == "machine":
        rec = report.to_record()
        sys.stdout.write(tables.json_lines([{k: v for k, v in rec.items() if k in metrics}]))
    else:
        sys.stdout.write(tables.score_text(report, metrics))
    if args.min_conll is not None and report.conll < args.min_conll:
        return EXIT_FINDINGS
    return EXIT_OK


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "machine"), default="text",
                   help="aligned text (default) or JSON lines")


def _add_wikidata(p: argparse.ArgumentParser) -> None:
    p.add_argument("--offline", action="store_true", help="use the response cache only, never the network")
    p.add_argument("--cache", metavar="DIR", default=None,
                   help="response cache directory (default: $XDG_CACHE_HOME/divcdcr/wikidata)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="divcdcr", description="Diverse cross-document coreference corpus tools.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log informational notices to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", help="check a corpus against the annotation scheme")
    p.add_argument("corpus", help="native corpus file (.dcdcr.json)")
    p.add_argument("--fail-on", choices=("error", "warning"), default="error",
                   help="lowest severity that makes the exit code 1 (default: error)")
    p.add_argument("--disable", metavar="V..,V..", help="comma-separated rule ids to skip")
    _add_format(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert tabular exports into a native corpus")
    p.add_argument("--from", dest="source_format", choices=("tabular",), required=True, help="input format")
    p.add_argument("--in", dest="in_dir", metavar="DIR", required=True, help="directory of .tsv export files")
    p.add_argument("--out", metavar="FILE", required=True, help="native corpus file to write")
    p.add_argument("--discourse-map", metavar="FILE",
                   help="JSON object mapping document id to discourse id (or {discourse, outlet})")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("entities", help="list discourse entities and global referents")
    p.add_argument("corpus")
    p.add_argument("--wikidata-check", action="store_true", help="also audit Wikidata links")
    _add_wikidata(p)
    _add_format(p)
    p.set_defaults(func=cmd_entities)

    p = sub.add_parser("link-audit", help="audit Wikidata links of all clusters")
    p.add_argument("corpus")
    p.add_argument("--no-suggest", action="store_true", help="skip candidate search for unlinked clusters")
    p.add_argument("--fail-on", choices=("error", "warning", "info"), default="error",
                   help="lowest severity that makes the exit code 1 (default: error)")
    _add_wikidata(p)
    _add_format(p)
    p.set_defaults(func=cmd_link_audit)

    p = sub.add_parser("frames", help="per-outlet word choices for one referent")
    p.add_argument("corpus")
    p.add_argument("--referent", required=True, metavar="QID|NAME", help="Wikidata id or global entity name")
    _add_format(p)
    p.set_defaults(func=cmd_frames)

    p = sub.add_parser("stats", help="relation counts per outlet and label")
    p.add_argument("corpus")
    p.add_argument("--dense", action="store_true", help="include zero rows")
    _add_format(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("score", help="score a system (or second annotator) corpus against gold")
    p.add_argument("--gold", required=True, metavar="CORPUS")
    p.add_argument("--sys", required=True, metavar="CORPUS")
    p.add_argument("--metrics", metavar="LIST", help=f"comma-separated subset of: {', '.join(ALL_METRICS)}")
    p.add_argument("--min-conll", type=float, metavar="X", help="exit 1 if the CoNLL average is below X")
    _add_format(p)
    p.set_defaults(func=cmd_score)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
    except (DivcdcrError, UsageError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ERROR


def run() -> None:
    sys.exit(main())
