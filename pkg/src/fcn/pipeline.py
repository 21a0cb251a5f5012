"""End-to-end orchestration: dump in, curated graph and reports out.

Every stage is a pure function of its inputs (claims inherit their
document's retrieval time), so two runs over the same corpus produce
byte-identical artifacts. Stage outputs land in a work directory as
JSONL, the graph as an N-Triples snapshot, and the stats report as JSON.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .attribution import attribute_documents, validate_schema
from .backends import ExtractorBackend, RemoteBackend, RemoteConfig, RuleBackend, bundled_lexicon
from .config import PipelineConfig
from .curation import EffectCategoryMap, curate, load_fkg_resolver, load_synonym_table
from .errors import ConfigError
from .extraction import DocumentExtraction, ExtractionAudit, extract_document, extract_entity_profile
from .graph import TripleStore, Vocabulary, ingest_records
from .ids import IdentifierKind, canonical_key, mint_identifier
from .ingest import IngestStats, run_ingest
from .model import (
    ClaimContext,
    FoodClaim,
    FoodEntity,
    SourceDocument,
    ValidatingSource,
    read_jsonl,
    write_jsonl,
)
from .analytics import distributions_report
from .backends import classify_entity
from .preprocess import Lexicon, detect_food_mentions, segment_sentences
from .review import ClaimHistory


@dataclass
class PipelinePaths:
    workdir: Path

    def __post_init__(self):
        self.workdir = Path(self.workdir)

    @property
    def docs(self) -> Path:
        return self.workdir / "docs.jsonl"

    @property
    def sentences(self) -> Path:
        return self.workdir / "sentences.jsonl"

    @property
    def claims_raw(self) -> Path:
        return self.workdir / "claims.raw.jsonl"

    @property
    def claims_attributed(self) -> Path:
        return self.workdir / "claims.attributed.jsonl"

    @property
    def claims_final(self) -> Path:
        return self.workdir / "claims.final.jsonl"

    @property
    def validations(self) -> Path:
        return self.workdir / "validations.jsonl"

    @property
    def entities(self) -> Path:
        return self.workdir / "entities.jsonl"

    @property
    def contexts(self) -> Path:
        return self.workdir / "contexts.jsonl"

    @property
    def flagged(self) -> Path:
        return self.workdir / "flagged.jsonl"

    @property
    def reports(self) -> Path:
        return self.workdir / "reports.jsonl"

    @property
    def merges(self) -> Path:
        return self.workdir / "merges.jsonl"

    @property
    def audit_sidecar(self) -> Path:
        return self.workdir / "extraction_audit.jsonl"

    @property
    def store(self) -> Path:
        return self.workdir / "store.nt"

    @property
    def stats_report(self) -> Path:
        return self.workdir / "report.json"

    @property
    def review_audit(self) -> Path:
        return self.workdir / "review_audit.jsonl"


def make_backend(config: PipelineConfig, lexicon: Lexicon | None = None) -> ExtractorBackend:
    if config.backend == "rule":
        return RuleBackend(lexicon or _load_lexicon(config))
    if config.backend == "remote":
        return RemoteBackend(RemoteConfig.from_env())
    raise ConfigError(f"unknown backend: {config.backend!r}")


def _load_lexicon(config: PipelineConfig) -> Lexicon:
    if config.lexicon_path:
        return Lexicon.from_csv(config.lexicon_path)
    return bundled_lexicon()


@dataclass
class PipelineResult:
    paths: PipelinePaths
    ingest_stats: IngestStats
    documents: int = 0
    claims_final: int = 0
    validations: int = 0
    entities: int = 0
    flagged: int = 0
    failed_documents: int = 0
    histories: dict = None  # claim id -> ClaimHistory, for the review queue


def run_pipeline(
    input_path: str | Path,
    workdir: str | Path,
    config: PipelineConfig,
    lexicon: Lexicon | None = None,
    backend: ExtractorBackend | None = None,
) -> PipelineResult:
    paths = PipelinePaths(Path(workdir))
    paths.workdir.mkdir(parents=True, exist_ok=True)
    lexicon = lexicon or _load_lexicon(config)
    backend = backend or make_backend(config, lexicon)

    # Step 1: data mining.
    docs, stats = run_ingest(input_path, config.dump_format, config.ingest)

    # Step 2: preprocessing (sentences + mentions, and the primary entity).
    sentences_by_doc = {}
    mentions_by_doc = {}
    tagged_docs: list[SourceDocument] = []
    for doc in docs:
        sentences = segment_sentences(doc.body, doc.id)
        mentions = detect_food_mentions(sentences, lexicon)
        if mentions:
            primary = lexicon.resolve(mentions[0].surface) or mentions[0].surface
            doc = replace(
                doc,
                primary_entity_id=mint_identifier(
                    IdentifierKind.ENTITY, canonical_key(primary)
                ),
            )
        tagged_docs.append(doc)
        sentences_by_doc[doc.id.value] = sentences
        mentions_by_doc[doc.id.value] = mentions
    docs = tagged_docs
    write_jsonl(paths.docs, docs)
    _write_sentences(paths.sentences, docs, sentences_by_doc, mentions_by_doc)

    # Steps 3-4: LIE extraction.
    audit = ExtractionAudit()

    def _extract(doc: SourceDocument) -> DocumentExtraction:
        return extract_document(
            doc,
            mentions_by_doc[doc.id.value],
            backend,
            lexicon,
            audit,
            sentences_by_doc[doc.id.value],
            max_attempts=config.max_attempts,
            backoff_base=config.backoff_base,
        )

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            extractions = list(pool.map(_extract, docs))
    else:
        extractions = [_extract(doc) for doc in docs]

    draft_claims: list[FoodClaim] = []
    entities: dict[str, FoodEntity] = {}
    contexts: dict[str, ClaimContext] = {}
    draft_rejected: set[str] = set()
    failed_docs = 0
    for extraction in extractions:
        if extraction.failed:
            failed_docs += 1
            continue
        draft_claims.extend(extraction.claims)
        entities.update(extraction.entities)
        contexts.update(extraction.contexts)
        for report in extraction.reports:
            if report.violations:
                draft_rejected.add(report.target_id.value)
    _ensure_primary_entities(docs, entities, backend, lexicon)
    write_jsonl(paths.claims_raw, draft_claims)

    # Step 5: FACT attribution + schema validation.
    validations, upgraded = attribute_documents(docs, draft_claims, backend)
    platforms = {d.id.value: d.platform for d in docs}
    batch = validate_schema(upgraded, validations, platforms)
    surviving_claims = batch.surviving_claims()
    surviving_validations = batch.surviving_validations()
    write_jsonl(paths.claims_attributed, surviving_claims)
    write_jsonl(paths.flagged, batch.flagged)
    with open(paths.reports, "w", encoding="utf-8") as fh:
        for report in batch.reports:
            fh.write(json.dumps(report.to_dict(), ensure_ascii=False) + "\n")

    histories: dict[str, ClaimHistory] = {}
    for report in batch.reports:
        if report.defaults_applied:
            histories[report.target_id.value] = ClaimHistory(
                repaired_fields=report.defaults_applied,
                was_flagged=report.target_id.value in draft_rejected,
            )

    # Step 7: curation.
    synonym_table = load_synonym_table(config.synonyms_path)
    resolver = load_fkg_resolver(config.fkg_links_path)
    curated = curate(
        surviving_claims,
        surviving_validations,
        [entities[k] for k in sorted(entities)],
        synonym_table,
        resolver,
    )
    used_contexts = {c.context_id.value for c in curated.claims if c.context_id is not None}
    kept_contexts = [contexts[k] for k in sorted(contexts) if k in used_contexts]
    write_jsonl(paths.claims_final, curated.claims)
    write_jsonl(paths.validations, curated.validations)
    write_jsonl(paths.entities, curated.entities)
    write_jsonl(paths.contexts, kept_contexts)
    with open(paths.merges, "w", encoding="utf-8") as fh:
        for log in curated.merge_logs:
            fh.write(json.dumps(log.to_dict(), ensure_ascii=False) + "\n")
    with open(paths.audit_sidecar, "w", encoding="utf-8") as fh:
        for entry in audit.rejected:
            fh.write(json.dumps({"kind": "rejected", **entry}, ensure_ascii=False) + "\n")
        for entry in audit.notes:
            fh.write(json.dumps({"kind": "note", **entry}, ensure_ascii=False) + "\n")

    # Step 8: graph ingestion.
    vocab = Vocabulary(namespace=config.namespace)
    store = TripleStore(vocab)
    ingest_records(store, docs)
    ingest_records(store, curated.entities)
    ingest_records(store, kept_contexts)
    ingest_records(store, curated.claims)
    ingest_records(store, curated.validations)
    store.save(paths.store)

    # Stats report.
    category_map = EffectCategoryMap.from_csv(config.categories_path)
    report = {
        "ingest": stats.to_dict(),
        "graph": store.stats().to_dict(),
        "pipeline": {
            "documents": len(docs),
            "draft_claims": len(draft_claims),
            "claims_final": len(curated.claims),
            "validations": len(curated.validations),
            "entities": len(curated.entities),
            "flagged": len(batch.flagged),
            "merged": sum(len(m.merged_ids) for m in curated.merge_logs),
            "failed_documents": failed_docs,
            "unknown_effect_types": curated.unknown_effect_types,
            "fkg_misses": curated.fkg_misses,
        },
        "distributions": distributions_report(store, category_map),
    }
    paths.stats_report.write_text(
        json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    return PipelineResult(
        paths=paths,
        ingest_stats=stats,
        documents=len(docs),
        claims_final=len(curated.claims),
        validations=len(curated.validations),
        entities=len(curated.entities),
        flagged=len(batch.flagged),
        failed_documents=failed_docs,
        histories=histories,
    )


def _ensure_primary_entities(
    docs: Sequence[SourceDocument],
    entities: dict[str, FoodEntity],
    backend: ExtractorBackend,
    lexicon: Lexicon,
) -> None:
    """A document's primary entity gets a record even when no claim used it."""
    for doc in docs:
        primary = doc.primary_entity_id
        if primary is None or primary.value in entities:
            continue
        surface = None
        for name in lexicon.canonical_names():
            if mint_identifier(IdentifierKind.ENTITY, canonical_key(name)) == primary:
                surface = name
                break
        if surface is None:
            continue
        extracted, inferred = extract_entity_profile(doc, surface, backend)
        entities[primary.value] = FoodEntity(
            id=primary,
            canonical_name=surface,
            classification=classify_entity(surface),
            extracted_profile=extracted,
            inferred_profile=inferred,
        )


def _write_sentences(path: Path, docs, sentences_by_doc, mentions_by_doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            mentions = mentions_by_doc[doc.id.value]
            for sentence in sentences_by_doc[doc.id.value]:
                record = sentence.to_dict()
                record["mentions"] = [
                    m.to_dict() for m in mentions if m.sentence_index == sentence.index
                ]
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")


# ── Loading stage outputs back (CLI and service) ──────────────────────


def load_dataset(paths: PipelinePaths):
    docs = list(read_jsonl(paths.docs, SourceDocument.from_dict))
    claims = list(read_jsonl(paths.claims_final, FoodClaim.from_dict))
    validations = list(read_jsonl(paths.validations, ValidatingSource.from_dict))
    entities = list(read_jsonl(paths.entities, FoodEntity.from_dict))
    contexts = list(read_jsonl(paths.contexts, ClaimContext.from_dict))
    return docs, claims, validations, entities, contexts


def build_store(paths: PipelinePaths, namespace: str) -> TripleStore:
    docs, claims, validations, entities, contexts = load_dataset(paths)
    store = TripleStore(Vocabulary(namespace=namespace))
    for records in (docs, entities, contexts, claims, validations):
        ingest_records(store, records)
    return store
