"""Ontology types, closed enumerations, wire format, and invariant checkers.

Every record type is an immutable value object (frozen dataclass over
tuples/frozensets) so instances are safe to share across threads. The wire
format is one JSON object per record, snake_case field names matching the
dataclass fields, newline-delimited for batches; optional fields that are
absent are omitted from the JSON object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Sequence

from .errors import SchemaError, UnknownEnumError
from .ids import Identifier

# ── Closed enumerations ──────────────────────────────────────────────


class Platform(str, Enum):
    FORUM = "forum"
    BLOG = "blog"
    NEWS = "news"
    SCIENTIFIC = "scientific"
    PACKAGING = "packaging"
    OTHER = "other"


class CredibilityTier(str, Enum):
    FORMAL = "formal"
    SEMI_FORMAL = "semi_formal"
    INFORMAL = "informal"


class EntityClassification(str, Enum):
    RECIPE = "recipe"
    INGREDIENT = "ingredient"
    MEAL = "meal"
    NUTRIENT = "nutrient"
    OTHER = "other"


class ClaimIntent(str, Enum):
    FACT = "fact"
    MYTH = "myth"
    MISREPRESENTATION = "misrepresentation"
    MISINFORMATION = "misinformation"
    DISINFORMATION = "disinformation"
    MALINFORMATION = "malinformation"


class ClaimTypeTag(str, Enum):
    SCIENTIFIC_MEDICAL = "scientific_medical"
    CULTURAL_TRADITIONAL = "cultural_traditional"
    MORAL_POLITICAL = "moral_political"
    SUSTAINABILITY_REGULATORY = "sustainability_regulatory"
    AESTHETIC_SENSORY = "aesthetic_sensory"
    RELIGIOUS_RITUALISTIC = "religious_ritualistic"
    SOCIAL_SYMBOLIC = "social_symbolic"
    ORIGIN_AUTHENTICITY = "origin_authenticity"
    MARKETING_ADVERTISING = "marketing_advertising"
    DIGITAL_INFLUENCER = "digital_influencer"


class ValidityStatus(Enum):
    """Internal member names avoid the true/false reserved words; the wire
    format uses the literal strings "true" / "false" / "unverified"."""

    TRUE_ = "true"
    FALSE_ = "false"
    UNVERIFIED = "unverified"


class Stance(str, Enum):
    SUPPORT = "support"
    CHALLENGE = "challenge"
    REQUEST_EVIDENCE = "request_evidence"
    QUESTION = "question"
    CLARIFY = "clarify"


class Medium(str, Enum):
    SCIENTIFIC_STUDY = "scientific_study"
    EXPERT_QUOTE = "expert_quote"
    REGULATORY_COMMENT = "regulatory_comment"
    ANECDOTE = "anecdote"
    TESTIMONY = "testimony"
    ONLINE_DISCUSSION = "online_discussion"
    OTHER = "other"


class ReviewState(str, Enum):
    UNREVIEWED = "unreviewed"
    ACCEPTED = "accepted"
    EDITED = "edited"
    REJECTED = "rejected"


class ReportStatus(str, Enum):
    VALID = "valid"
    REPAIRED = "repaired"
    REJECTED = "rejected"


DEFAULT_CONFIDENCE = 0.5
DEFAULT_MECHANISM_CONNECTIVES = ("by", "via", "through")

# Stances that can back the respective coarse validity judgments.
SUPPORTING_STANCES = frozenset({Stance.SUPPORT, Stance.CLARIFY})
CHALLENGING_STANCES = frozenset({Stance.CHALLENGE})


def _parse_enum(cls, field_name: str, value: Any):
    try:
        return cls(value)
    except ValueError:
        raise UnknownEnumError(field_name, value)


def _ts_to_str(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def _ts_from_str(field_name: str, raw: Any) -> datetime:
    if not isinstance(raw, str):
        raise SchemaError(f"{field_name}: expected ISO timestamp string, got {raw!r}")
    try:
        return datetime.fromisoformat(raw.replace("Z", "+00:00")).astimezone(timezone.utc)
    except ValueError:
        raise SchemaError(f"{field_name}: bad timestamp {raw!r}")


def _ident(field_name: str, raw: Any) -> Identifier:
    if not isinstance(raw, str):
        raise SchemaError(f"{field_name}: expected identifier string, got {raw!r}")
    try:
        return Identifier.from_string(raw)
    except ValueError as exc:
        raise SchemaError(f"{field_name}: {exc}")


def _dedupe_casefold(values: Iterable[str]) -> tuple[str, ...]:
    """Dedupe under casefolding, then sort: list fields are set-like, and
    a canonical order keeps wire output and graph round-trips byte-stable."""
    seen: set[str] = set()
    out: list[str] = []
    for v in values:
        key = v.casefold()
        if key not in seen:
            seen.add(key)
            out.append(v)
    return tuple(sorted(out))


def _require(data: dict, *names: str) -> None:
    missing = [n for n in names if n not in data]
    if missing:
        raise SchemaError(f"missing required fields: {', '.join(missing)}")


# ── Source documents ─────────────────────────────────────────────────


@dataclass(frozen=True)
class SourceDocument:
    """One normalized input text; the Claim Source anchor for its claims."""

    id: Identifier
    platform: Platform
    retrieved_at: datetime
    body: str
    raw_body: str
    credibility_tier: CredibilityTier
    language_tag: str = "en"
    origin_url: str | None = None
    author: str | None = None
    published_at: datetime | None = None
    title: str | None = None
    primary_entity_id: Identifier | None = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "id": self.id.value,
            "platform": self.platform.value,
            "retrieved_at": _ts_to_str(self.retrieved_at),
            "body": self.body,
            "raw_body": self.raw_body,
            "credibility_tier": self.credibility_tier.value,
            "language_tag": self.language_tag,
        }
        if self.origin_url is not None:
            d["origin_url"] = self.origin_url
        if self.author is not None:
            d["author"] = self.author
        if self.published_at is not None:
            d["published_at"] = _ts_to_str(self.published_at)
        if self.title is not None:
            d["title"] = self.title
        if self.primary_entity_id is not None:
            d["primary_entity_id"] = self.primary_entity_id.value
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SourceDocument":
        _require(data, "id", "platform", "retrieved_at", "body", "raw_body", "credibility_tier")
        return cls(
            id=_ident("id", data["id"]),
            platform=_parse_enum(Platform, "platform", data["platform"]),
            retrieved_at=_ts_from_str("retrieved_at", data["retrieved_at"]),
            body=data["body"],
            raw_body=data["raw_body"],
            credibility_tier=_parse_enum(
                CredibilityTier, "credibility_tier", data["credibility_tier"]
            ),
            language_tag=data.get("language_tag", "en"),
            origin_url=data.get("origin_url"),
            author=data.get("author"),
            published_at=(
                _ts_from_str("published_at", data["published_at"])
                if data.get("published_at") is not None
                else None
            ),
            title=data.get("title"),
            primary_entity_id=(
                _ident("primary_entity_id", data["primary_entity_id"])
                if data.get("primary_entity_id") is not None
                else None
            ),
        )


# ── Food entities with dual profiles ─────────────────────────────────


@dataclass(frozen=True)
class EntityProfile:
    """Property profile of a food entity; list fields are deduplicated
    under casefolding at construction time."""

    category: str | None = None
    description: str | None = None
    group: str | None = None
    alternate_names: tuple[str, ...] = ()
    scientific_name: str | None = None
    nutritional_value: str | None = None
    regions_of_production: tuple[str, ...] = ()
    varieties: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("alternate_names", "regions_of_production", "varieties"):
            object.__setattr__(self, name, _dedupe_casefold(getattr(self, name)))

    def is_empty(self) -> bool:
        return self == EntityProfile()

    def to_dict(self) -> dict:
        d: dict[str, Any] = {}
        for name in ("category", "description", "group", "scientific_name", "nutritional_value"):
            value = getattr(self, name)
            if value is not None:
                d[name] = value
        for name in ("alternate_names", "regions_of_production", "varieties"):
            values = getattr(self, name)
            if values:
                d[name] = list(values)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "EntityProfile":
        return cls(
            category=data.get("category"),
            description=data.get("description"),
            group=data.get("group"),
            alternate_names=tuple(data.get("alternate_names", ())),
            scientific_name=data.get("scientific_name"),
            nutritional_value=data.get("nutritional_value"),
            regions_of_production=tuple(data.get("regions_of_production", ())),
            varieties=tuple(data.get("varieties", ())),
        )


@dataclass(frozen=True)
class FoodEntity:
    """A food item claims resolve to. The extracted and inferred profiles
    are the "2 sets of values": kept separate, never merged in place."""

    id: Identifier
    canonical_name: str
    classification: EntityClassification
    extracted_profile: EntityProfile = field(default_factory=EntityProfile)
    inferred_profile: EntityProfile = field(default_factory=EntityProfile)
    fkg_link: str | None = None

    def __post_init__(self):
        if not self.canonical_name:
            raise SchemaError("FoodEntity.canonical_name must be non-empty")

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "id": self.id.value,
            "canonical_name": self.canonical_name,
            "classification": self.classification.value,
            "extracted_profile": self.extracted_profile.to_dict(),
            "inferred_profile": self.inferred_profile.to_dict(),
        }
        if self.fkg_link is not None:
            d["fkg_link"] = self.fkg_link
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "FoodEntity":
        _require(data, "id", "canonical_name", "classification")
        return cls(
            id=_ident("id", data["id"]),
            canonical_name=data["canonical_name"],
            classification=_parse_enum(
                EntityClassification, "classification", data["classification"]
            ),
            extracted_profile=EntityProfile.from_dict(data.get("extracted_profile", {})),
            inferred_profile=EntityProfile.from_dict(data.get("inferred_profile", {})),
            fkg_link=data.get("fkg_link"),
        )


# ── Food claims ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class ClaimSubject:
    """The primary and singular entity a claim is about."""

    entity_id: Identifier
    surface: str

    def to_dict(self) -> dict:
        return {"entity_id": self.entity_id.value, "surface": self.surface}

    @classmethod
    def from_dict(cls, data: dict) -> "ClaimSubject":
        _require(data, "entity_id", "surface")
        return cls(entity_id=_ident("claim_subject.entity_id", data["entity_id"]), surface=data["surface"])


@dataclass(frozen=True)
class FoodClaim:
    id: Identifier
    claim_text: str
    claim_subject: ClaimSubject | None
    source_id: Identifier
    raw_snippet: str
    extraction_backend: str
    extracted_at: datetime
    claim_property: str | None = None
    claim_effect: str | None = None
    claim_effect_type: tuple[str, ...] = ()
    claim_mechanism: str | None = None
    claim_condition: str | None = None
    claim_intent: ClaimIntent = ClaimIntent.FACT
    claim_type: frozenset[ClaimTypeTag] = frozenset()
    claim_validity_status: ValidityStatus = ValidityStatus.UNVERIFIED
    context_id: Identifier | None = None
    review_state: ReviewState = ReviewState.UNREVIEWED
    merged_source_ids: tuple[Identifier, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "claim_effect_type", _dedupe_casefold(self.claim_effect_type))
        object.__setattr__(self, "claim_type", frozenset(self.claim_type))
        object.__setattr__(
            self, "merged_source_ids", tuple(sorted(set(self.merged_source_ids)))
        )

    def source_ids(self) -> tuple[Identifier, ...]:
        """Primary source first, then sources inherited through dedup."""
        return (self.source_id, *self.merged_source_ids)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "id": self.id.value,
            "claim_text": self.claim_text,
        }
        if self.claim_subject is not None:
            d["claim_subject"] = self.claim_subject.to_dict()
        if self.claim_property is not None:
            d["claim_property"] = self.claim_property
        if self.claim_effect is not None:
            d["claim_effect"] = self.claim_effect
        d["claim_effect_type"] = list(self.claim_effect_type)
        if self.claim_mechanism is not None:
            d["claim_mechanism"] = self.claim_mechanism
        if self.claim_condition is not None:
            d["claim_condition"] = self.claim_condition
        d["claim_intent"] = self.claim_intent.value
        d["claim_type"] = sorted(tag.value for tag in self.claim_type)
        d["claim_validity_status"] = self.claim_validity_status.value
        d["source_id"] = self.source_id.value
        if self.merged_source_ids:
            d["merged_source_ids"] = [i.value for i in self.merged_source_ids]
        if self.context_id is not None:
            d["context_id"] = self.context_id.value
        d["raw_snippet"] = self.raw_snippet
        d["extraction_backend"] = self.extraction_backend
        d["extracted_at"] = _ts_to_str(self.extracted_at)
        d["review_state"] = self.review_state.value
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "FoodClaim":
        _require(data, "id", "claim_text", "source_id", "raw_snippet",
                 "extraction_backend", "extracted_at")
        return cls(
            id=_ident("id", data["id"]),
            claim_text=data["claim_text"],
            claim_subject=(
                ClaimSubject.from_dict(data["claim_subject"])
                if data.get("claim_subject") is not None
                else None
            ),
            claim_property=data.get("claim_property"),
            claim_effect=data.get("claim_effect"),
            claim_effect_type=tuple(data.get("claim_effect_type", ())),
            claim_mechanism=data.get("claim_mechanism"),
            claim_condition=data.get("claim_condition"),
            claim_intent=_parse_enum(ClaimIntent, "claim_intent", data.get("claim_intent", "fact")),
            claim_type=frozenset(
                _parse_enum(ClaimTypeTag, "claim_type", tag) for tag in data.get("claim_type", ())
            ),
            claim_validity_status=_parse_enum(
                ValidityStatus, "claim_validity_status", data.get("claim_validity_status", "unverified")
            ),
            source_id=_ident("source_id", data["source_id"]),
            merged_source_ids=tuple(
                _ident("merged_source_ids", raw) for raw in data.get("merged_source_ids", ())
            ),
            context_id=(
                _ident("context_id", data["context_id"])
                if data.get("context_id") is not None
                else None
            ),
            raw_snippet=data["raw_snippet"],
            extraction_backend=data["extraction_backend"],
            extracted_at=_ts_from_str("extracted_at", data["extracted_at"]),
            review_state=_parse_enum(
                ReviewState, "review_state", data.get("review_state", "unreviewed")
            ),
        )


# ── Claim context and validating sources ─────────────────────────────


@dataclass(frozen=True)
class ClaimContext:
    """Geographic / cultural / temporal / epistemic setting of a claim."""

    id: Identifier
    geography: tuple[str, ...] = ()
    culture: tuple[str, ...] = ()
    temporal: str | None = None
    epistemic_frame: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "geography", _dedupe_casefold(self.geography))
        object.__setattr__(self, "culture", _dedupe_casefold(self.culture))

    def is_empty(self) -> bool:
        return not (self.geography or self.culture or self.temporal or self.epistemic_frame)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"id": self.id.value}
        if self.geography:
            d["geography"] = list(self.geography)
        if self.culture:
            d["culture"] = list(self.culture)
        if self.temporal is not None:
            d["temporal"] = self.temporal
        if self.epistemic_frame is not None:
            d["epistemic_frame"] = self.epistemic_frame
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ClaimContext":
        _require(data, "id")
        return cls(
            id=_ident("id", data["id"]),
            geography=tuple(data.get("geography", ())),
            culture=tuple(data.get("culture", ())),
            temporal=data.get("temporal"),
            epistemic_frame=data.get("epistemic_frame"),
        )


@dataclass(frozen=True)
class ValidatingSource:
    """Stance-tagged evidence record linked to exactly one claim.

    ``confidence`` may be None when a backend reported nothing; schema
    validation repairs it to the documented default of 0.5.
    """

    id: Identifier
    claim_id: Identifier
    stance: Stance
    validity_text: str
    medium: Medium
    speaker: str | None = None
    organization: str | None = None
    source_url: str | None = None
    confidence: float | None = DEFAULT_CONFIDENCE

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "id": self.id.value,
            "claim_id": self.claim_id.value,
            "stance": self.stance.value,
            "validity_text": self.validity_text,
            "medium": self.medium.value,
        }
        if self.speaker is not None:
            d["speaker"] = self.speaker
        if self.organization is not None:
            d["organization"] = self.organization
        if self.source_url is not None:
            d["source_url"] = self.source_url
        if self.confidence is not None:
            d["confidence"] = self.confidence
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ValidatingSource":
        _require(data, "id", "claim_id", "stance", "validity_text", "medium")
        return cls(
            id=_ident("id", data["id"]),
            claim_id=_ident("claim_id", data["claim_id"]),
            stance=_parse_enum(Stance, "stance", data["stance"]),
            validity_text=data["validity_text"],
            medium=_parse_enum(Medium, "medium", data["medium"]),
            speaker=data.get("speaker"),
            organization=data.get("organization"),
            source_url=data.get("source_url"),
            confidence=data.get("confidence"),
        )


# ── Validation reports ────────────────────────────────────────────────


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    field: str

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "field": self.field}

    @classmethod
    def from_dict(cls, data: dict) -> "Violation":
        return cls(code=data["code"], message=data["message"], field=data["field"])


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking one record. status is derived, never free:
    valid <=> no violations; repaired <=> every violation has a matching
    defaults_applied entry; rejected otherwise."""

    target_id: Identifier
    status: ReportStatus
    violations: tuple[Violation, ...] = ()
    defaults_applied: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "target_id": self.target_id.value,
            "status": self.status.value,
            "violations": [v.to_dict() for v in self.violations],
            "defaults_applied": list(self.defaults_applied),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ValidationReport":
        return cls(
            target_id=_ident("target_id", data["target_id"]),
            status=_parse_enum(ReportStatus, "status", data["status"]),
            violations=tuple(Violation.from_dict(v) for v in data.get("violations", ())),
            defaults_applied=tuple(data.get("defaults_applied", ())),
        )


def make_report(
    target_id: Identifier,
    violations: Sequence[Violation],
    defaults_applied: Sequence[str] = (),
) -> ValidationReport:
    if not violations:
        status = ReportStatus.VALID
    elif all(v.field in defaults_applied for v in violations):
        status = ReportStatus.REPAIRED
    else:
        status = ReportStatus.REJECTED
    return ValidationReport(
        target_id=target_id,
        status=status,
        violations=tuple(violations),
        defaults_applied=tuple(defaults_applied),
    )


# ── Invariant checkers (pure functions) ───────────────────────────────


def check_claim_invariants(
    claim: FoodClaim,
    validations: Sequence[ValidatingSource] | None = (),
    mechanism_connectives: Sequence[str] = DEFAULT_MECHANISM_CONNECTIVES,
) -> ValidationReport:
    """List every violated FoodClaim invariant. Pure; violations are data.

    ``validations=None`` skips the evidence-backed status checks (for
    callers that only know the record, not its evidence set).
    """
    violations: list[Violation] = []
    if not claim.claim_text.strip():
        violations.append(Violation("empty-claim-text", "claim_text is empty", "claim_text"))
    if claim.claim_subject is None or not claim.claim_subject.surface.strip():
        if claim.claim_effect is not None:
            violations.append(
                Violation(
                    "effect-without-subject",
                    "claim asserts an effect but resolves to no subject entity",
                    "claim_subject",
                )
            )
        else:
            violations.append(
                Violation("no-subject", "claim resolves to no subject entity", "claim_subject")
            )
    if claim.claim_property is None and claim.claim_effect is None:
        violations.append(
            Violation(
                "no-property-or-effect",
                "at least one of claim_property or claim_effect is required",
                "claim_effect",
            )
        )
    if claim.claim_effect is not None and not claim.claim_effect_type:
        violations.append(
            Violation(
                "effect-without-type",
                "claim_effect present but claim_effect_type is empty",
                "claim_effect_type",
            )
        )
    if not claim.claim_type:
        violations.append(
            Violation("empty-claim-type", "claim_type must hold at least one tag", "claim_type")
        )
    if validations is not None:
        linked = [v for v in validations if v.claim_id == claim.id]
        if claim.claim_validity_status is ValidityStatus.TRUE_:
            if not any(v.stance in SUPPORTING_STANCES for v in linked):
                violations.append(
                    Violation(
                        "status-unsupported",
                        'validity "true" requires at least one supporting or clarifying source',
                        "claim_validity_status",
                    )
                )
        elif claim.claim_validity_status is ValidityStatus.FALSE_:
            if not any(v.stance in CHALLENGING_STANCES for v in linked):
                violations.append(
                    Violation(
                        "status-unsupported",
                        'validity "false" requires at least one challenging source',
                        "claim_validity_status",
                    )
                )
    if claim.claim_mechanism is not None:
        first_word = claim.claim_mechanism.strip().casefold().split(" ", 1)[0]
        if first_word not in {c.casefold() for c in mechanism_connectives}:
            violations.append(
                Violation(
                    "mechanism-no-connective",
                    f"claim_mechanism must begin with one of {', '.join(mechanism_connectives)}",
                    "claim_mechanism",
                )
            )
    return make_report(claim.id, violations)


def check_validating_source_invariants(
    vs: ValidatingSource, known_claims: frozenset[Identifier] | set[Identifier]
) -> ValidationReport:
    violations: list[Violation] = []
    if vs.claim_id not in known_claims:
        violations.append(
            Violation(
                "dangling-claim-ref",
                f"claim_id {vs.claim_id.value} resolves to no known claim",
                "claim_id",
            )
        )
    if vs.confidence is None:
        violations.append(
            Violation("missing-confidence", "confidence was not reported", "confidence")
        )
    elif not 0.0 <= vs.confidence <= 1.0:
        violations.append(
            Violation(
                "confidence-out-of-range",
                f"confidence {vs.confidence} outside [0, 1]",
                "confidence",
            )
        )
    if not vs.validity_text.strip():
        violations.append(
            Violation("empty-validity-text", "validity_text is empty", "validity_text")
        )
    return make_report(vs.id, violations)


def check_context_invariants(ctx: ClaimContext) -> ValidationReport:
    violations: list[Violation] = []
    if ctx.is_empty():
        violations.append(
            Violation("empty-context", "an attached context must populate at least one field", "id")
        )
    return make_report(ctx.id, violations)


# ── JSONL wire helpers ────────────────────────────────────────────────

RECORD_TYPES: dict[str, type] = {
    "SourceDocument": SourceDocument,
    "FoodEntity": FoodEntity,
    "FoodClaim": FoodClaim,
    "ClaimContext": ClaimContext,
    "ValidatingSource": ValidatingSource,
}


def to_json_line(record) -> str:
    return json.dumps(record.to_dict(), ensure_ascii=False)


def write_jsonl(path: str | Path, records: Iterable) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(to_json_line(record))
            fh.write("\n")
            count += 1
    return count


def read_jsonl(path: str | Path, parse: Callable[[dict], Any]) -> Iterator:
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{line_no}: not valid JSON ({exc})")
            yield parse(data)
