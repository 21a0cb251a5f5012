"""FACT stage: locate validating sources, tag stance, enforce the schema.

This stage attributes and structures evidence; it never certifies truth.
validity_status only moves off "unverified" when linked evidence stances
allow it (or later, when a reviewer says so).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .backends import (
    CAP_STANCES,
    INLINE_CITATION_CONFIDENCE,
    ExtractorBackend,
    StanceCall,
    find_urls,
)
from .errors import ConfigError
from .ids import Identifier, IdentifierKind, canonical_key, mint_identifier
from .model import (
    DEFAULT_CONFIDENCE,
    ClaimTypeTag,
    FoodClaim,
    Medium,
    Platform,
    SourceDocument,
    Stance,
    ValidatingSource,
    ValidationReport,
    ValidityStatus,
    check_claim_invariants,
    check_validating_source_invariants,
    make_report,
)
from .preprocess import SentenceSpan, segment_sentences

_MEDIUM_PATTERNS: list[tuple[re.Pattern, Medium]] = [
    (re.compile(p, re.IGNORECASE), m)
    for p, m in [
        (r"\b(study|studies|trial|research|meta-analysis|journal|clinical|randomized|pubmed)\b", Medium.SCIENTIFIC_STUDY),
        (r"\b(dr\.|doctor|nutritionist|dietitian|expert|professor|cardiologist)\b", Medium.EXPERT_QUOTE),
        (r"\b(fda|fssai|who|icmr|regulation|guidelines?|advisory|ministry|authority)\b", Medium.REGULATORY_COMMENT),
        (r"\b(testimonial|testimony|swears by|vouch(es)? for)\b", Medium.TESTIMONY),
        (r"\b(worked for me|i (tried|take|drink|eat|felt)|my (experience|mother|grandmother|family))\b", Medium.ANECDOTE),
    ]
]

_SPEAKER = re.compile(
    r"\b(?:Dr\.?|Prof\.?) [A-Z][a-zA-Z]+(?: [A-Z][a-zA-Z]+)?|\baccording to ([A-Z][a-zA-Z]+(?: [A-Z][a-zA-Z]+)?)"
)

_ORGANIZATIONS = (
    "WHO", "FDA", "FSSAI", "ICMR", "AIIMS", "NIH", "Harvard", "Stanford",
    "Mayo Clinic", "Johns Hopkins", "Cochrane", "USDA", "EFSA",
)


def classify_stance(validity_text: str, backend: ExtractorBackend) -> StanceCall:
    """Total function: every non-empty text gets exactly one stance.

    Confidence is the matched rule's weight (stance-classification
    certainty, not source credibility); no rule firing means the weakest
    commitment, (question, 0.5).
    """
    if not validity_text.strip():
        raise ValueError("validity_text must be non-empty")
    if CAP_STANCES not in backend.capabilities:
        raise ConfigError(f"backend {backend.name} cannot classify stances")
    return backend.classify_stance(validity_text)


def classify_medium(text: str) -> Medium:
    for pattern, medium in _MEDIUM_PATTERNS:
        if pattern.search(text):
            return medium
    return Medium.ONLINE_DISCUSSION


def _find_speaker(text: str) -> str | None:
    match = _SPEAKER.search(text)
    if match:
        return match.group(1) or match.group(0)
    return None


def _find_organization(text: str) -> str | None:
    folded = text.casefold()
    for org in _ORGANIZATIONS:
        if re.search(r"\b" + re.escape(org.casefold()) + r"\b", folded):
            return org
    return None


def identify_validating_sources(
    doc: SourceDocument,
    claim: FoodClaim,
    backend: ExtractorBackend,
    sentences: Sequence[SentenceSpan] | None = None,
    claim_sentence_indices: set[int] | None = None,
) -> list[ValidatingSource]:
    """Evidence records for one claim, from the claim's own discussion.

    Scans the sentences after the claim's sentence (up to the next claim
    sentence) for stance-rule hits or hyperlinks, plus inline citations in
    the claim sentence itself. Zero results is a fine outcome — the claim
    simply stays unverified.
    """
    if sentences is None:
        sentences = segment_sentences(doc.body, doc.id)
    own_indices = _claim_sentence_indices(claim, sentences)
    if claim_sentence_indices is None:
        claim_sentence_indices = set()
    results: list[ValidatingSource] = []

    for index in sorted(own_indices):
        sentence = sentences[index]
        urls = find_urls(sentence.text)
        if urls:
            results.append(
                _build_validation(
                    claim,
                    sentence.text,
                    StanceCall(stance=Stance.SUPPORT, confidence=INLINE_CITATION_CONFIDENCE, rule="inline-citation"),
                    urls[0],
                )
            )

    start = max(own_indices) + 1 if own_indices else len(sentences)
    for sentence in sentences[start:]:
        if sentence.index in claim_sentence_indices and sentence.index not in own_indices:
            break
        urls = find_urls(sentence.text)
        call = backend.classify_stance(sentence.text)
        if not urls and _is_non_evidence(call):
            continue
        results.append(_build_validation(claim, sentence.text, call, urls[0] if urls else None))
    return results


def _is_non_evidence(call: StanceCall) -> bool:
    """The weakest-commitment default (question, <=0.5) means no stance
    signal fired; such sentences are commentary, not evidence."""
    return call.stance is Stance.QUESTION and (call.confidence or 0.0) <= 0.5


def _claim_sentence_indices(claim: FoodClaim, sentences: Sequence[SentenceSpan]) -> list[int]:
    return [s.index for s in sentences if s.text == claim.claim_text or claim.claim_text in s.text]


def _build_validation(
    claim: FoodClaim, text: str, call: StanceCall, url: str | None
) -> ValidatingSource:
    vs_id = mint_identifier(
        IdentifierKind.VALIDATION, canonical_key(f"{claim.id.value}|{text}")
    )
    return ValidatingSource(
        id=vs_id,
        claim_id=claim.id,
        stance=call.stance,
        validity_text=text,
        medium=classify_medium(text),
        speaker=_find_speaker(text),
        organization=_find_organization(text),
        source_url=url,
        confidence=call.confidence,
    )


def upgrade_validity(claim: FoodClaim, validations: Sequence[ValidatingSource]) -> FoodClaim:
    """Stance-consistent promotion off "unverified", never past what the
    evidence supports; challenged-and-supported claims stay unverified."""
    if claim.claim_validity_status is not ValidityStatus.UNVERIFIED:
        return claim
    linked = [v for v in validations if v.claim_id == claim.id]
    supports = any(v.stance in (Stance.SUPPORT, Stance.CLARIFY) for v in linked)
    challenges = any(v.stance is Stance.CHALLENGE for v in linked)
    if supports and not challenges:
        return replace(claim, claim_validity_status=ValidityStatus.TRUE_)
    if challenges and not supports:
        return replace(claim, claim_validity_status=ValidityStatus.FALSE_)
    return claim


# ── Batch schema validation ───────────────────────────────────────────


@dataclass
class BatchValidationResult:
    """Exhaustive, disjoint partition of one input batch."""

    accepted: list = field(default_factory=list)
    repaired: list = field(default_factory=list)
    flagged: list = field(default_factory=list)
    reports: list[ValidationReport] = field(default_factory=list)
    flag_reasons: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def surviving_claims(self) -> list[FoodClaim]:
        return [r for r in self.accepted + self.repaired if isinstance(r, FoodClaim)]

    def surviving_validations(self) -> list[ValidatingSource]:
        return [r for r in self.accepted + self.repaired if isinstance(r, ValidatingSource)]


def validate_schema(
    claims: Sequence[FoodClaim],
    validations: Sequence[ValidatingSource],
    platforms_by_source: Mapping[str, Platform] | None = None,
) -> BatchValidationResult:
    """Partition a batch into accepted / repaired / flagged.

    Repairs are limited to the documented default table: missing
    confidence -> 0.5, unsupported validity_status -> "unverified", empty
    claim_type -> {digital_influencer} when the source platform is a
    forum. Every repair lands in defaults_applied; flagged records carry
    machine-readable reasons and must not reach the graph.
    """
    platforms_by_source = platforms_by_source or {}
    result = BatchValidationResult()

    validations_by_claim: dict[str, list[ValidatingSource]] = {}
    for vs in validations:
        validations_by_claim.setdefault(vs.claim_id.value, []).append(vs)

    surviving_claim_ids: set[Identifier] = set()
    for claim in claims:
        repaired_claim = claim
        defaults: list[str] = []
        linked = validations_by_claim.get(claim.id.value, [])

        report = check_claim_invariants(repaired_claim, linked)
        codes = {v.code for v in report.violations}
        if "status-unsupported" in codes:
            repaired_claim = replace(
                repaired_claim, claim_validity_status=ValidityStatus.UNVERIFIED
            )
            defaults.append("claim_validity_status")
        if "empty-claim-type" in codes:
            platform = platforms_by_source.get(claim.source_id.value)
            if platform is Platform.FORUM:
                repaired_claim = replace(
                    repaired_claim, claim_type=frozenset({ClaimTypeTag.DIGITAL_INFLUENCER})
                )
                defaults.append("claim_type")

        final_report = check_claim_invariants(repaired_claim, linked)
        if not final_report.violations and not defaults:
            result.accepted.append(claim)
            result.reports.append(report)
        elif not final_report.violations and defaults:
            result.repaired.append(repaired_claim)
            result.reports.append(make_report(claim.id, report.violations, defaults))
            surviving_claim_ids.add(repaired_claim.id)
            continue
        else:
            result.flagged.append(claim)
            result.reports.append(final_report)
            result.flag_reasons[claim.id.value] = tuple(
                sorted({v.code for v in final_report.violations})
            )
            continue
        surviving_claim_ids.add(claim.id)

    for vs in validations:
        repaired_vs = vs
        defaults = []
        report = check_validating_source_invariants(repaired_vs, surviving_claim_ids)
        codes = {v.code for v in report.violations}
        if "missing-confidence" in codes:
            repaired_vs = replace(repaired_vs, confidence=DEFAULT_CONFIDENCE)
            defaults.append("confidence")
        final_report = check_validating_source_invariants(repaired_vs, surviving_claim_ids)
        if not final_report.violations and not defaults:
            result.accepted.append(vs)
            result.reports.append(report)
        elif not final_report.violations and defaults:
            result.repaired.append(repaired_vs)
            result.reports.append(make_report(vs.id, report.violations, defaults))
        else:
            result.flagged.append(vs)
            result.reports.append(final_report)
            result.flag_reasons[vs.id.value] = tuple(
                sorted({v.code for v in final_report.violations})
            )
    return result


def attribute_documents(
    docs: Sequence[SourceDocument],
    claims: Sequence[FoodClaim],
    backend: ExtractorBackend,
) -> tuple[list[ValidatingSource], list[FoodClaim]]:
    """Find evidence for every claim, then upgrade validity statuses.

    Returns (validations, claims-with-upgraded-status) in input order.
    """
    docs_by_id = {d.id.value: d for d in docs}
    claims_by_doc: dict[str, list[FoodClaim]] = {}
    for claim in claims:
        claims_by_doc.setdefault(claim.source_id.value, []).append(claim)

    validations: list[ValidatingSource] = []
    seen: set[str] = set()
    for doc_id, doc_claims in claims_by_doc.items():
        doc = docs_by_id.get(doc_id)
        if doc is None:
            continue
        sentences = segment_sentences(doc.body, doc.id)
        all_indices: set[int] = set()
        for claim in doc_claims:
            all_indices.update(_claim_sentence_indices(claim, sentences))
        for claim in doc_claims:
            for vs in identify_validating_sources(doc, claim, backend, sentences, all_indices):
                if vs.id.value in seen:
                    continue
                seen.add(vs.id.value)
                validations.append(vs)

    upgraded = [upgrade_validity(c, validations) for c in claims]
    return validations, upgraded
