"""LIE stage: claim statement extraction, decomposition, grammar enforcement.

Outputs here are deliberately provisional — drafts carry
validity_status="unverified" until attribution and review. Rejected or
undecomposable candidates are kept in an audit trail, never silently
dropped; the recall evaluation needs them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Sequence

from .backends import (
    CAP_CLAIMS,
    CAP_PROFILES,
    ExtractorBackend,
    RawClaimCandidate,
    _split_points,
    classify_entity,
    rule_tables,
    with_retries,
)
from .errors import ConfigError, TransportError
from .ids import Identifier, IdentifierKind, canonical_key, mint_identifier
from .model import (
    ClaimContext,
    ClaimSubject,
    EntityProfile,
    FoodClaim,
    FoodEntity,
    ReviewState,
    SourceDocument,
    ValidationReport,
    check_claim_invariants,
)
from .preprocess import Lexicon, MentionSpan, SentenceSpan, segment_sentences


@dataclass
class ExtractionAudit:
    """Sidecar of everything that did not become a claim draft."""

    rejected: list[dict] = field(default_factory=list)
    notes: list[dict] = field(default_factory=list)

    def reject(self, candidate: RawClaimCandidate, reason: str) -> None:
        self.rejected.append({"reason": reason, "candidate": candidate.to_dict()})

    def note(self, doc_id: Identifier, message: str) -> None:
        self.notes.append({"doc_id": doc_id.value, "note": message})


def extract_claims(
    doc: SourceDocument,
    mentions: Sequence[MentionSpan],
    backend: ExtractorBackend,
    sentences: Sequence[SentenceSpan] | None = None,
    max_attempts: int = 3,
    backoff_base: float = 0.5,
) -> list[RawClaimCandidate]:
    """Grounded claim candidates for one document.

    Transport failures are retried within the backoff budget; exhausting
    it re-raises TransportError so the pipeline can mark the document
    extraction-failed and continue.
    """
    if CAP_CLAIMS not in backend.capabilities:
        raise ConfigError(f"backend {backend.name} cannot extract claims")
    if sentences is None:
        sentences = segment_sentences(doc.body, doc.id)
    return with_retries(
        lambda: backend.extract_claims(doc, sentences, mentions),
        max_attempts=max_attempts,
        backoff_base=backoff_base,
    )


def decompose_compound(candidate: RawClaimCandidate) -> list[RawClaimCandidate]:
    """Split a compound candidate into atomic ones.

    Atomic inputs come back unchanged. A candidate flagged compound that
    the splitter cannot decompose is returned with the flag cleared and an
    audit note — under-splitting is preferred over invented splits.
    """
    if not candidate.compound:
        return [candidate]
    text = candidate.candidate_text
    tables = rule_tables()
    verbs = tables.verb_positions(text)
    points = _split_points(text, verbs)
    if not points or not verbs:
        return [replace(candidate, compound=False, audit_note="undecomposable-compound")]
    subject_part = text[: verbs[0][0]].strip()
    if not subject_part:
        subject_part = candidate.subject_surface
    segment_starts = [verbs[0][0]] + [p[2] for p in points]
    segment_ends = [p[0] for p in points] + [len(text)]
    atoms: list[RawClaimCandidate] = []
    for seg_start, seg_end in zip(segment_starts, segment_ends):
        predicate = _clean_segment(text[seg_start:seg_end])
        if not predicate:
            continue
        atoms.append(
            replace(
                candidate,
                candidate_text=f"{subject_part} {predicate}",
                compound=False,
            )
        )
    if len(atoms) < 2:
        return [replace(candidate, compound=False, audit_note="undecomposable-compound")]
    return atoms


def _clean_segment(text: str) -> str:
    text = re.sub(r"\s+", " ", text).strip()
    text = re.sub(r"^(?:,|and|or|also)\s+", "", text, flags=re.IGNORECASE)
    return text.strip().rstrip(".!?,;").strip()


def enforce_grammar(
    candidate: RawClaimCandidate,
    backend: ExtractorBackend,
    doc: SourceDocument,
    sentences: Sequence[SentenceSpan],
    lexicon: Lexicon,
) -> tuple[FoodClaim | None, ClaimContext | None, ValidationReport | None, str | None]:
    """Turn an atomic candidate into a FoodClaim draft.

    Returns (claim, context, invariant report, rejection reason). Fields
    the text does not support stay absent — never invented. claim_text is
    the original source sentence (always a substring of the cleaned body);
    the atomic reading lives in the parsed grammar fields.
    """
    parse = backend.parse_grammar(candidate)
    if parse.subject_surface is None or not parse.subject_surface.strip():
        return None, None, None, "no-subject"
    canonical_name = lexicon.resolve(parse.subject_surface) or canonical_key(parse.subject_surface)
    entity_id = mint_identifier(IdentifierKind.ENTITY, canonical_key(canonical_name))

    refs = [s for s in sentences if s.index in candidate.sentence_refs]
    claim_text = parse.claim_text or " ".join(s.text for s in refs) or candidate.candidate_text
    raw_snippet = _snippet_window(doc.body, sentences, candidate.sentence_refs) or claim_text

    context = _build_context(parse.context_fields)
    claim_id = mint_identifier(
        IdentifierKind.CLAIM,
        canonical_key(f"{canonical_name}|{candidate.candidate_text}|{doc.id.value}"),
    )
    claim = FoodClaim(
        id=claim_id,
        claim_text=claim_text,
        claim_subject=ClaimSubject(entity_id=entity_id, surface=parse.subject_surface),
        claim_property=parse.claim_property,
        claim_effect=parse.claim_effect,
        claim_effect_type=parse.claim_effect_type,
        claim_mechanism=parse.claim_mechanism,
        claim_condition=parse.claim_condition,
        claim_intent=parse.claim_intent,
        claim_type=parse.claim_type,
        source_id=doc.id,
        context_id=context.id if context is not None else None,
        raw_snippet=raw_snippet,
        extraction_backend=backend.name,
        extracted_at=doc.retrieved_at,
        review_state=ReviewState.UNREVIEWED,
    )
    report = check_claim_invariants(claim)
    return claim, context, report, None


def _snippet_window(
    body: str, sentences: Sequence[SentenceSpan], refs: tuple[int, ...]
) -> str | None:
    if not refs or not sentences:
        return None
    by_index = {s.index: s for s in sentences}
    picked = [by_index[i] for i in refs if i in by_index]
    if not picked:
        return None
    first, last = min(p.index for p in picked), max(p.index for p in picked)
    start_span = by_index.get(first - 1, by_index[first])
    end_span = by_index.get(last + 1, by_index[last])
    return body[start_span.start : end_span.end]


def _build_context(fields: dict) -> ClaimContext | None:
    if not fields:
        return None
    geography = tuple(fields.get("geography", ()))
    culture = tuple(fields.get("culture", ()))
    temporal = fields.get("temporal")
    epistemic = fields.get("epistemic_frame")
    if not (geography or culture or temporal or epistemic):
        return None
    key = canonical_key(
        "|".join(
            [",".join(geography), ",".join(culture), str(temporal or ""), str(epistemic or "")]
        )
    )
    return ClaimContext(
        id=mint_identifier(IdentifierKind.CONTEXT, key),
        geography=geography,
        culture=culture,
        temporal=temporal,
        epistemic_frame=epistemic,
    )


def extract_entity_profile(
    doc: SourceDocument,
    canonical_name: str,
    backend: ExtractorBackend,
    audit: ExtractionAudit | None = None,
):
    """Dual profiles for one subject: strictly-from-text and inferred.

    The two profiles are constructed separately and never merged. A
    backend without the profiles capability yields two empty profiles and
    an audit note.
    """
    if CAP_PROFILES not in backend.capabilities:
        if audit is not None:
            audit.note(doc.id, f"backend {backend.name} has no profile capability")
        return EntityProfile(), EntityProfile()
    return backend.extract_profiles(doc, canonical_name)


@dataclass
class DocumentExtraction:
    """Everything the LIE stage produced for one document."""

    doc: SourceDocument
    claims: list[FoodClaim] = field(default_factory=list)
    entities: dict[str, FoodEntity] = field(default_factory=dict)
    contexts: dict[str, ClaimContext] = field(default_factory=dict)
    reports: list[ValidationReport] = field(default_factory=list)
    failed: bool = False


def extract_document(
    doc: SourceDocument,
    mentions: Sequence[MentionSpan],
    backend: ExtractorBackend,
    lexicon: Lexicon,
    audit: ExtractionAudit | None = None,
    sentences: Sequence[SentenceSpan] | None = None,
    max_attempts: int = 3,
    backoff_base: float = 0.5,
) -> DocumentExtraction:
    """Full LIE pass for one document: extract, decompose, enforce, profile."""
    audit = audit if audit is not None else ExtractionAudit()
    if sentences is None:
        sentences = segment_sentences(doc.body, doc.id)
    result = DocumentExtraction(doc=doc)
    try:
        candidates = extract_claims(
            doc, mentions, backend, sentences, max_attempts=max_attempts, backoff_base=backoff_base
        )
    except TransportError as exc:
        audit.note(doc.id, f"extraction-failed: {exc}")
        result.failed = True
        return result

    atomic: list[RawClaimCandidate] = []
    for candidate in candidates:
        for atom in decompose_compound(candidate):
            if atom.audit_note:
                audit.note(doc.id, f"{atom.audit_note}: {atom.candidate_text}")
            atomic.append(atom)

    seen_claims: set[str] = set()
    for candidate in atomic:
        claim, context, report, rejection = enforce_grammar(
            candidate, backend, doc, sentences, lexicon
        )
        if rejection is not None or claim is None:
            audit.reject(candidate, rejection or "no-claim")
            continue
        if claim.id.value in seen_claims:
            continue
        seen_claims.add(claim.id.value)
        result.claims.append(claim)
        result.reports.append(report)
        if context is not None:
            result.contexts.setdefault(context.id.value, context)
        subject = claim.claim_subject
        assert subject is not None
        if subject.entity_id.value not in result.entities:
            canonical_name = lexicon.resolve(subject.surface) or canonical_key(subject.surface)
            extracted, inferred = extract_entity_profile(doc, canonical_name, backend, audit)
            result.entities[subject.entity_id.value] = FoodEntity(
                id=subject.entity_id,
                canonical_name=canonical_name,
                classification=classify_entity(canonical_name),
                extracted_profile=extracted,
                inferred_profile=inferred,
            )
    return result
