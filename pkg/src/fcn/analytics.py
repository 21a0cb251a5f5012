"""Distributions, term frequencies, and the recall/URL-link evaluation.

Every distribution here must agree with a brute-force recount of the
curated JSONL — the tests enforce that equivalence, so keep these
implementations boring.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .backends import data_path
from .curation import EffectCategoryMap, normalize_phrase
from .errors import EvalInputError
from .graph import TripleStore
from .ids import Identifier
from .model import FoodClaim, FoodEntity, SourceDocument, ValidatingSource

_TOKEN = re.compile(r"[a-z0-9]+")


def load_stopwords() -> frozenset[str]:
    with data_path("stopwords.txt").open("r", encoding="utf-8") as fh:
        return frozenset(
            line.strip() for line in fh if line.strip() and not line.startswith("#")
        )


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.casefold())


# ── Distributions ─────────────────────────────────────────────────────


def _claims(store: TripleStore) -> list[FoodClaim]:
    return store.records("FoodClaim")


def _entity_names(store: TripleStore) -> dict[str, str]:
    return {e.id.value: e.canonical_name for e in store.records("FoodEntity")}


def effect_distribution(
    store: TripleStore, top_k: int | None = None
) -> tuple[list[tuple[str, str, int]], list[tuple[str, int]]]:
    """(subject, effect_type, count) rows and (effect_type, count) totals.

    Counts are exact; ties break lexicographically; top_k truncates the
    totals table only.
    """
    names = _entity_names(store)
    per_pair: dict[tuple[str, str], int] = {}
    per_type: dict[str, int] = {}
    for claim in _claims(store):
        subject = ""
        if claim.claim_subject is not None:
            subject = names.get(claim.claim_subject.entity_id.value, claim.claim_subject.surface)
        for effect_type in claim.claim_effect_type:
            per_pair[(subject, effect_type)] = per_pair.get((subject, effect_type), 0) + 1
            per_type[effect_type] = per_type.get(effect_type, 0) + 1
    pairs = sorted(per_pair.items(), key=lambda kv: (-kv[1], kv[0]))
    totals = sorted(per_type.items(), key=lambda kv: (-kv[1], kv[0]))
    if top_k is not None:
        totals = totals[:top_k]
    return (
        [(subject, effect_type, count) for (subject, effect_type), count in pairs],
        [(effect_type, count) for effect_type, count in totals],
    )


def category_distribution(
    store: TripleStore, category_map: EffectCategoryMap
) -> list[tuple[str, int]]:
    """Claims per broad category; a claim whose effect types span two
    categories contributes once to each."""
    counts: dict[str, int] = {}
    for claim in _claims(store):
        categories = {category_map.category_for(t)[0] for t in claim.claim_effect_type}
        for category in categories:
            counts[category] = counts.get(category, 0) + 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def validation_medium_distribution(store: TripleStore) -> list[tuple[str, int]]:
    counts: dict[str, int] = {}
    for vs in store.records("ValidatingSource"):
        counts[vs.medium.value] = counts.get(vs.medium.value, 0) + 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


_FIELD_SELECTORS = {
    "claim_text": lambda c: c.claim_text,
    "claim_effect": lambda c: c.claim_effect or "",
    "claim_property": lambda c: c.claim_property or "",
    "raw_snippet": lambda c: c.raw_snippet,
}


def term_frequency(
    store: TripleStore,
    field_selector: str = "claim_text",
    stopwords: frozenset[str] | None = None,
    top_k: int | None = None,
) -> list[tuple[str, int]]:
    """Ranked (term, count) list over a claim field, stopwords excluded.

    Plot-ready data for word clouds; no rendering here.
    """
    if field_selector not in _FIELD_SELECTORS:
        raise EvalInputError([field_selector])
    stopwords = stopwords if stopwords is not None else load_stopwords()
    select = _FIELD_SELECTORS[field_selector]
    counts: dict[str, int] = {}
    for claim in _claims(store):
        for token in tokenize(select(claim)):
            if token in stopwords:
                continue
            counts[token] = counts.get(token, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top_k] if top_k is not None else ranked


def distributions_report(store: TripleStore, category_map: EffectCategoryMap) -> dict:
    """The analytics block of the stats report, plot-ready."""
    pairs, totals = effect_distribution(store)
    return {
        "effect_types": [{"effect_type": t, "count": c} for t, c in totals],
        "subject_effect_types": [
            {"subject": s, "effect_type": t, "count": c} for s, t, c in pairs
        ],
        "categories": [
            {"category": cat, "count": c} for cat, c in category_distribution(store, category_map)
        ],
        "validation_mediums": [
            {"medium": m, "count": c} for m, c in validation_medium_distribution(store)
        ],
        "top_terms": [
            {"term": t, "count": c} for t, c in term_frequency(store, top_k=25)
        ],
    }


def distribution_csv(rows: Iterable[tuple], header: Sequence[str]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _csv_cell(value) -> str:
    text = str(value)
    if "," in text or '"' in text or "\n" in text:
        return '"' + text.replace('"', '""') + '"'
    return text


# ── Gold annotations and evaluation ───────────────────────────────────


@dataclass(frozen=True)
class GoldAnnotation:
    """Hand-written per-document truth for the recall evaluation."""

    doc_id: Identifier
    gold_claims: tuple[tuple[str, str], ...] = ()
    gold_entities: tuple[str, ...] = ()
    gold_urls: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gold_claims", tuple(dict.fromkeys(self.gold_claims)))
        object.__setattr__(self, "gold_entities", tuple(dict.fromkeys(self.gold_entities)))
        object.__setattr__(self, "gold_urls", tuple(dict.fromkeys(self.gold_urls)))

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id.value,
            "gold_claims": [{"subject": s, "effect": e} for s, e in self.gold_claims],
            "gold_entities": list(self.gold_entities),
            "gold_urls": list(self.gold_urls),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GoldAnnotation":
        return cls(
            doc_id=Identifier.from_string(data["doc_id"]),
            gold_claims=tuple((g["subject"], g["effect"]) for g in data.get("gold_claims", ())),
            gold_entities=tuple(data.get("gold_entities", ())),
            gold_urls=tuple(data.get("gold_urls", ())),
        )


@dataclass(frozen=True)
class MatcherConfig:
    jaccard_threshold: float = 0.5
    tokenizer: str = "word-lower"


@dataclass
class EvalMetrics:
    claim_recall: float = 0.0
    claims_found: int = 0
    claims_gold: int = 0
    entity_count: int = 0
    url_link_rate: float = 0.0
    urls_found: int = 0
    urls_gold: int = 0
    missed_claims: list[dict] = field(default_factory=list)
    matcher: MatcherConfig = field(default_factory=MatcherConfig)

    def to_dict(self) -> dict:
        return {
            "claim_recall": self.claim_recall,
            "claims_found": self.claims_found,
            "claims_gold": self.claims_gold,
            "entity_count": self.entity_count,
            "url_link_rate": self.url_link_rate,
            "urls_found": self.urls_found,
            "urls_gold": self.urls_gold,
            "missed_claims": list(self.missed_claims),
            "matcher": {
                "jaccard_threshold": self.matcher.jaccard_threshold,
                "tokenizer": self.matcher.tokenizer,
            },
        }


def _jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    sa, sb = set(a), set(b)
    if not sa and not sb:
        return 1.0
    union = sa | sb
    return len(sa & sb) / len(union) if union else 0.0


def _claim_match(
    gold_subject: str,
    gold_effect: str,
    claim: FoodClaim,
    entity_names: Mapping[str, str],
    config: MatcherConfig,
) -> bool:
    if claim.claim_subject is None:
        return False
    canonical = entity_names.get(
        claim.claim_subject.entity_id.value, claim.claim_subject.surface
    )
    if normalize_phrase(canonical) != normalize_phrase(gold_subject):
        return False
    gold_tokens = tokenize(gold_effect)
    candidates = [claim.claim_effect, claim.claim_property]
    if claim.claim_effect and claim.claim_condition:
        candidates.append(f"{claim.claim_effect} {claim.claim_condition}")
    for predicate in candidates:
        if predicate and _jaccard(tokenize(predicate), gold_tokens) >= config.jaccard_threshold:
            return True
    return False


def evaluate(
    extracted: Sequence[FoodClaim],
    gold: Sequence[GoldAnnotation],
    config: MatcherConfig = MatcherConfig(),
    entities: Sequence[FoodEntity] = (),
    validations: Sequence[ValidatingSource] = (),
    docs: Sequence[SourceDocument] = (),
    doc_ids: Iterable[str] | None = None,
) -> EvalMetrics:
    """Recall / URL-link metrics against gold annotations.

    A gold claim matches when some extracted claim from the same document
    has the same canonical subject and enough effect-text token overlap.
    Misses co-located (same sentence) with a matched gold sibling are
    tagged "claim-splitting" — the dominant failure class; misses whose
    subject never appears among the document's extracted claims are
    tagged "entity-resolution".
    """
    if doc_ids is not None:
        universe = set(doc_ids)
        orphans = {g.doc_id.value for g in gold} - universe
        if orphans:
            raise EvalInputError(orphans)

    entity_names = {e.id.value: e.canonical_name for e in entities}
    docs_by_id = {d.id.value: d for d in docs}
    claims_by_doc: dict[str, list[FoodClaim]] = {}
    for claim in extracted:
        claims_by_doc.setdefault(claim.source_id.value, []).append(claim)

    metrics = EvalMetrics(matcher=config)
    matched_gold: list[tuple[GoldAnnotation, str, str]] = []
    missed_gold: list[tuple[GoldAnnotation, str, str]] = []
    for annotation in gold:
        doc_claims = claims_by_doc.get(annotation.doc_id.value, [])
        for subject, effect in annotation.gold_claims:
            metrics.claims_gold += 1
            if any(
                _claim_match(subject, effect, claim, entity_names, config)
                for claim in doc_claims
            ):
                metrics.claims_found += 1
                matched_gold.append((annotation, subject, effect))
            else:
                missed_gold.append((annotation, subject, effect))

    for annotation, subject, effect in missed_gold:
        reason = "not-extracted"
        if _colocated_matched(annotation, subject, effect, matched_gold, docs_by_id):
            reason = "claim-splitting"
        else:
            doc_claims = claims_by_doc.get(annotation.doc_id.value, [])
            extracted_subjects = {
                normalize_phrase(
                    entity_names.get(c.claim_subject.entity_id.value, c.claim_subject.surface)
                )
                for c in doc_claims
                if c.claim_subject is not None
            }
            if normalize_phrase(subject) not in extracted_subjects:
                reason = "entity-resolution"
        metrics.missed_claims.append(
            {"doc_id": annotation.doc_id.value, "subject": subject, "effect": effect, "reason": reason}
        )

    metrics.claim_recall = (
        metrics.claims_found / metrics.claims_gold if metrics.claims_gold else 0.0
    )

    doc_of_claim = {c.id: c.source_id.value for c in extracted}
    captured_urls: dict[str, set[str]] = {}
    for vs in validations:
        if vs.source_url and vs.claim_id in doc_of_claim:
            captured_urls.setdefault(doc_of_claim[vs.claim_id], set()).add(vs.source_url)
    for annotation in gold:
        doc_urls = captured_urls.get(annotation.doc_id.value, set())
        for url in annotation.gold_urls:
            metrics.urls_gold += 1
            if url in doc_urls:
                metrics.urls_found += 1
    metrics.url_link_rate = metrics.urls_found / metrics.urls_gold if metrics.urls_gold else 0.0

    seen_entities = set()
    for claim in extracted:
        if claim.claim_subject is not None:
            name = entity_names.get(
                claim.claim_subject.entity_id.value, claim.claim_subject.surface
            )
            seen_entities.add(name.casefold())
    metrics.entity_count = len(seen_entities)
    return metrics


def _colocated_matched(
    annotation: GoldAnnotation,
    subject: str,
    effect: str,
    matched: list[tuple[GoldAnnotation, str, str]],
    docs_by_id: Mapping[str, SourceDocument],
) -> bool:
    """True when a matched gold sibling lives in the same sentence."""
    doc = docs_by_id.get(annotation.doc_id.value)
    if doc is None:
        return False
    sentence = _containing_sentence(doc.body, effect)
    if sentence is None:
        return False
    for other_annotation, other_subject, other_effect in matched:
        if other_annotation.doc_id != annotation.doc_id:
            continue
        if (other_subject, other_effect) == (subject, effect):
            continue
        other_sentence = _containing_sentence(doc.body, other_effect)
        if other_sentence is not None and other_sentence == sentence:
            return True
    return False


def _containing_sentence(body: str, fragment: str) -> str | None:
    from .preprocess import segment_sentences
    from .ids import IdentifierKind, mint_identifier

    probe = mint_identifier(IdentifierKind.DOCUMENT, "probe")
    fragment_cf = fragment.casefold()
    for span in segment_sentences(body, probe):
        if fragment_cf in span.text.casefold():
            return span.text
    return None
