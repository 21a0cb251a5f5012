"""Command-line entry points for every pipeline stage.

Stages read and write the JSONL wire format, so any stage can be re-run
in isolation; `fcn run` chains them all into a work directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analytics import (
    GoldAnnotation,
    MatcherConfig,
    distributions_report,
    evaluate,
)
from .attribution import attribute_documents, validate_schema
from .backends import bundled_lexicon
from .config import load_config
from .curation import EffectCategoryMap, curate, load_fkg_resolver, load_synonym_table
from .errors import ConfigError
from .extraction import ExtractionAudit, extract_document
from .graph import TripleStore
from .ingest import DumpFormat, run_ingest
from .model import (
    FoodClaim,
    FoodEntity,
    ReviewState,
    SourceDocument,
    ValidatingSource,
    read_jsonl,
    to_json_line,
    write_jsonl,
)
from .pipeline import PipelinePaths, build_store, make_backend, run_pipeline
from .preprocess import Lexicon, detect_food_mentions, segment_sentences
from .review import AuditLog, ReviewDecision, apply_review_decision, build_queue, calibration_report


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args) or 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fcn", description=__doc__)
    parser.add_argument("--version", action="version", version=f"fcn {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("ingest", help="read a dump, filter, emit documents")
    p.add_argument("--input", required=True)
    p.add_argument("--format", default="jsonl_posts", choices=[f.value for f in DumpFormat])
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess", help="segment documents, detect food mentions")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("extract", help="extract claim drafts (LIE stage)")
    p.add_argument("--in", dest="input", required=True, help="sentences.jsonl from preprocess")
    p.add_argument("--docs", required=True)
    p.add_argument("--backend", default="rule", choices=["rule", "remote"])
    p.add_argument("--lexicon")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attribute", help="find validating sources, validate schema (FACT stage)")
    p.add_argument("--claims", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--backend", default="rule", choices=["rule", "remote"])
    p.add_argument("--out", required=True)
    p.add_argument("--flagged", required=True)
    p.set_defaults(func=cmd_attribute)

    p = sub.add_parser("curate", help="normalize, dedup, link entities")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--validations", required=True)
    p.add_argument("--entities", required=True)
    p.add_argument("--synonyms")
    p.add_argument("--categories")
    p.add_argument("--fkg-links")
    p.add_argument("--out", required=True)
    p.add_argument("--merge-log", required=True)
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("graph", help="triple store operations")
    graph_sub = p.add_subparsers(dest="graph_command", required=True)
    g = graph_sub.add_parser("ingest", help="build a store from a work directory")
    g.add_argument("--workdir", required=True)
    g.add_argument("--store", required=True)
    g.add_argument("--namespace", default="https://fcn.example.org/")
    g.set_defaults(func=cmd_graph_ingest)
    g = graph_sub.add_parser("query", help="conjunctive exact-match query")
    g.add_argument("--store", required=True)
    g.add_argument("--class", dest="class_name")
    g.add_argument("--subject-entity")
    g.add_argument("--effect-type")
    g.add_argument("--stance")
    g.add_argument("--validity-status")
    g.add_argument("--claim-type")
    g.set_defaults(func=cmd_graph_query)
    g = graph_sub.add_parser("export", help="serialize the store")
    g.add_argument("--store", required=True)
    g.add_argument("--format", default="ntriples", choices=["ntriples", "turtle"])
    g.add_argument("--out")
    g.set_defaults(func=cmd_graph_export)
    g = graph_sub.add_parser("stats", help="node/edge/class/predicate counts")
    g.add_argument("--store", required=True)
    g.set_defaults(func=cmd_graph_stats)

    p = sub.add_parser("analyze", help="distributions and evaluation")
    analyze_sub = p.add_subparsers(dest="analyze_command", required=True)
    a = analyze_sub.add_parser("stats", help="distribution report from a store")
    a.add_argument("--store", required=True)
    a.add_argument("--categories")
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_analyze_stats)
    a = analyze_sub.add_parser("eval", help="recall/URL metrics against gold annotations")
    a.add_argument("--workdir", required=True)
    a.add_argument("--gold", required=True)
    a.add_argument("--jaccard", type=float, default=0.5)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_analyze_eval)

    p = sub.add_parser("review", help="review queue and decisions")
    review_sub = p.add_subparsers(dest="review_command", required=True)
    r = review_sub.add_parser("queue", help="list unreviewed claims by priority")
    r.add_argument("--workdir", required=True)
    r.add_argument("--limit", type=int)
    r.set_defaults(func=cmd_review_queue)
    r = review_sub.add_parser("apply", help="apply ReviewDecision JSONL")
    r.add_argument("--workdir", required=True)
    r.add_argument("--decisions", required=True)
    r.set_defaults(func=cmd_review_apply)
    r = review_sub.add_parser("calibration", help="per-backend correction rates")
    r.add_argument("--workdir", required=True)
    r.add_argument("--out")
    r.set_defaults(func=cmd_review_calibration)
    r = review_sub.add_parser("export", help="curated claims, sans tombstones by default")
    r.add_argument("--workdir", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--include-rejected", action="store_true")
    r.set_defaults(func=cmd_review_export)

    p = sub.add_parser("run", help="full pipeline into a work directory")
    p.add_argument("--input", required=True)
    p.add_argument("--workdir", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--workdir", required=True)
    p.add_argument("--config")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_serve)

    return parser


# ── Stage commands ────────────────────────────────────────────────────


def cmd_ingest(args) -> int:
    config = load_config(args.config)
    docs, stats = run_ingest(args.input, DumpFormat(args.format), config.ingest)
    write_jsonl(args.out, docs)
    print(json.dumps(stats.to_dict(), indent=2))
    return 0


def _lexicon(path: str | None) -> Lexicon:
    return Lexicon.from_csv(path) if path else bundled_lexicon()


def cmd_preprocess(args) -> int:
    lexicon = _lexicon(args.lexicon)
    count = 0
    with open(args.out, "w", encoding="utf-8") as fh:
        for doc in read_jsonl(args.input, SourceDocument.from_dict):
            sentences = segment_sentences(doc.body, doc.id)
            mentions = detect_food_mentions(sentences, lexicon)
            for sentence in sentences:
                record = sentence.to_dict()
                record["mentions"] = [
                    m.to_dict() for m in mentions if m.sentence_index == sentence.index
                ]
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                count += 1
    print(f"wrote {count} sentences to {args.out}")
    return 0


def cmd_extract(args) -> int:
    from .preprocess import MentionSpan

    config = replace(load_config(args.config), backend=args.backend)
    lexicon = _lexicon(args.lexicon)
    backend = make_backend(config, lexicon)
    docs = list(read_jsonl(args.docs, SourceDocument.from_dict))
    mentions_by_doc: dict[str, list[MentionSpan]] = {}
    with open(args.input, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            for m in record.get("mentions", ()):
                mentions_by_doc.setdefault(m["doc_id"], []).append(MentionSpan.from_dict(m))

    audit = ExtractionAudit()
    claims: list[FoodClaim] = []
    entities: dict[str, FoodEntity] = {}
    contexts: dict = {}
    failed = 0
    for doc in docs:
        extraction = extract_document(
            doc, mentions_by_doc.get(doc.id.value, []), backend, lexicon, audit
        )
        if extraction.failed:
            failed += 1
            continue
        claims.extend(extraction.claims)
        entities.update(extraction.entities)
        contexts.update(extraction.contexts)
    write_jsonl(args.out, claims)
    out_dir = Path(args.out).parent
    write_jsonl(out_dir / "entities.jsonl", [entities[k] for k in sorted(entities)])
    write_jsonl(out_dir / "contexts.jsonl", [contexts[k] for k in sorted(contexts)])
    with open(out_dir / "extraction_audit.jsonl", "w", encoding="utf-8") as fh:
        for entry in audit.rejected:
            fh.write(json.dumps({"kind": "rejected", **entry}, ensure_ascii=False) + "\n")
        for entry in audit.notes:
            fh.write(json.dumps({"kind": "note", **entry}, ensure_ascii=False) + "\n")
    print(f"extracted {len(claims)} claim drafts ({failed} documents failed)")
    return 0


def cmd_attribute(args) -> int:
    config = replace(load_config(None), backend=args.backend)
    backend = make_backend(config)
    docs = list(read_jsonl(args.docs, SourceDocument.from_dict))
    claims = list(read_jsonl(args.claims, FoodClaim.from_dict))
    validations, upgraded = attribute_documents(docs, claims, backend)
    platforms = {d.id.value: d.platform for d in docs}
    batch = validate_schema(upgraded, validations, platforms)
    write_jsonl(args.out, batch.surviving_claims())
    write_jsonl(args.flagged, batch.flagged)
    out_dir = Path(args.out).parent
    write_jsonl(out_dir / "validations.jsonl", batch.surviving_validations())
    with open(out_dir / "reports.jsonl", "w", encoding="utf-8") as fh:
        for report in batch.reports:
            fh.write(json.dumps(report.to_dict(), ensure_ascii=False) + "\n")
    print(
        f"accepted {len(batch.accepted)}, repaired {len(batch.repaired)}, "
        f"flagged {len(batch.flagged)}"
    )
    return 0


def cmd_curate(args) -> int:
    claims = list(read_jsonl(args.input, FoodClaim.from_dict))
    validations = list(read_jsonl(args.validations, ValidatingSource.from_dict))
    entities = list(read_jsonl(args.entities, FoodEntity.from_dict))
    synonyms = load_synonym_table(args.synonyms)
    resolver = load_fkg_resolver(args.fkg_links)
    result = curate(claims, validations, entities, synonyms, resolver)
    write_jsonl(args.out, result.claims)
    out_dir = Path(args.out).parent
    write_jsonl(out_dir / "validations.jsonl", result.validations)
    write_jsonl(out_dir / "entities.jsonl", result.entities)
    with open(args.merge_log, "w", encoding="utf-8") as fh:
        for log in result.merge_logs:
            fh.write(json.dumps(log.to_dict(), ensure_ascii=False) + "\n")
    print(
        f"curated {len(result.claims)} claims "
        f"({sum(len(m.merged_ids) for m in result.merge_logs)} merged)"
    )
    return 0


def cmd_graph_ingest(args) -> int:
    store = build_store(PipelinePaths(Path(args.workdir)), args.namespace)
    store.save(args.store)
    print(json.dumps(store.stats().to_dict(), indent=2))
    return 0


def cmd_graph_query(args) -> int:
    store = TripleStore.load(args.store)
    pattern = {}
    for key, attr in (
        ("class", "class_name"),
        ("subject_entity", "subject_entity"),
        ("effect_type", "effect_type"),
        ("stance", "stance"),
        ("validity_status", "validity_status"),
        ("claim_type", "claim_type"),
    ):
        value = getattr(args, attr)
        if value:
            pattern[key] = value
    for record in store.query(pattern):
        print(to_json_line(record))
    return 0


def cmd_graph_export(args) -> int:
    store = TripleStore.load(args.store)
    text = store.serialize(args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_graph_stats(args) -> int:
    store = TripleStore.load(args.store)
    print(json.dumps(store.stats().to_dict(), indent=2))
    return 0


def cmd_analyze_stats(args) -> int:
    from .analytics import (
        category_distribution,
        distribution_csv,
        effect_distribution,
        validation_medium_distribution,
    )

    store = TripleStore.load(args.store)
    category_map = EffectCategoryMap.from_csv(args.categories)
    report = {
        "graph": store.stats().to_dict(),
        "distributions": distributions_report(store, category_map),
    }
    out = Path(args.out)
    out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    pairs, totals = effect_distribution(store)
    csv_outputs = {
        "effect_types.csv": distribution_csv(totals, ["effect_type", "count"]),
        "subject_effect_types.csv": distribution_csv(
            pairs, ["subject", "effect_type", "count"]
        ),
        "categories.csv": distribution_csv(
            category_distribution(store, category_map), ["category", "count"]
        ),
        "validation_mediums.csv": distribution_csv(
            validation_medium_distribution(store), ["medium", "count"]
        ),
    }
    for name, text in csv_outputs.items():
        (out.parent / name).write_text(text, encoding="utf-8")
    print(f"wrote {args.out} and {len(csv_outputs)} CSV tables")
    return 0


def cmd_analyze_eval(args) -> int:
    paths = PipelinePaths(Path(args.workdir))
    docs = list(read_jsonl(paths.docs, SourceDocument.from_dict))
    claims = list(read_jsonl(paths.claims_final, FoodClaim.from_dict))
    validations = list(read_jsonl(paths.validations, ValidatingSource.from_dict))
    entities = list(read_jsonl(paths.entities, FoodEntity.from_dict))
    gold = list(read_jsonl(args.gold, GoldAnnotation.from_dict))
    metrics = evaluate(
        claims,
        gold,
        MatcherConfig(jaccard_threshold=args.jaccard),
        entities=entities,
        validations=validations,
        docs=docs,
        doc_ids=[d.id.value for d in docs],
    )
    Path(args.out).write_text(
        json.dumps(metrics.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(json.dumps(metrics.to_dict(), indent=2, sort_keys=True))
    return 0


# ── Review commands ───────────────────────────────────────────────────


def _load_store_and_audit(workdir: str) -> tuple[PipelinePaths, TripleStore, AuditLog]:
    paths = PipelinePaths(Path(workdir))
    if paths.store.exists():
        store = TripleStore.load(paths.store)
    else:
        store = build_store(paths, "https://fcn.example.org/")
    audit = AuditLog()
    if paths.review_audit.exists():
        audit = AuditLog.from_jsonl(paths.review_audit.read_text(encoding="utf-8"))
    return paths, store, audit


def cmd_review_queue(args) -> int:
    _, store, _ = _load_store_and_audit(args.workdir)
    for entry in build_queue(store, None, EffectCategoryMap.from_csv(None), args.limit):
        print(json.dumps(entry.to_dict(), ensure_ascii=False))
    return 0


def cmd_review_apply(args) -> int:
    paths, store, audit = _load_store_and_audit(args.workdir)
    decisions = list(read_jsonl(args.decisions, ReviewDecision.from_dict))
    applied = replayed = 0
    for decision in decisions:
        _, record = apply_review_decision(decision, store, audit)
        if record is None:
            replayed += 1
        else:
            applied += 1
    store.save(paths.store)
    paths.review_audit.write_text(audit.to_jsonl(), encoding="utf-8")
    print(f"applied {applied} decisions ({replayed} replayed no-ops)")
    return 0


def cmd_review_calibration(args) -> int:
    paths, _, audit = _load_store_and_audit(args.workdir)
    report = calibration_report(audit)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def cmd_review_export(args) -> int:
    _, store, _ = _load_store_and_audit(args.workdir)
    claims = store.records("FoodClaim")
    if not args.include_rejected:
        claims = [c for c in claims if c.review_state is not ReviewState.REJECTED]
    claims.sort(key=lambda c: c.id.value)
    write_jsonl(args.out, claims)
    print(f"exported {len(claims)} claims to {args.out}")
    return 0


def cmd_run(args) -> int:
    config = load_config(args.config)
    result = run_pipeline(args.input, args.workdir, config)
    print(
        json.dumps(
            {
                "documents": result.documents,
                "claims_final": result.claims_final,
                "validations": result.validations,
                "entities": result.entities,
                "flagged": result.flagged,
                "failed_documents": result.failed_documents,
                "ingest": result.ingest_stats.to_dict(),
            },
            indent=2,
        )
    )
    return 0


def cmd_serve(args) -> int:  # pragma: no cover
    from .service import serve

    config = load_config(args.config)
    if args.host or args.port:
        config = replace(config, host=args.host or config.host, port=args.port or config.port)
    serve(args.workdir, config)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
