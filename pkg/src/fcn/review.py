"""Human-in-the-loop review: queue, decisions, audit trail, calibration.

Rejected claims are tombstoned (excluded from default exports), never
deleted — traceability survives every decision. Every field change is
explained by exactly one immutable audit record, and replaying a decision
id is a no-op.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Mapping, Sequence

from .curation import EffectCategoryMap
from .errors import ReviewError, SchemaError
from .graph import TripleStore
from .ids import Identifier
from .model import (
    ClaimIntent,
    ClaimTypeTag,
    FoodClaim,
    ReviewState,
    ValidatingSource,
    ValidityStatus,
    _parse_enum,
    _ts_from_str,
    _ts_to_str,
)

# Grammar/intent/type/validity fields a reviewer may edit. Provenance
# fields (claim_text, source_id, raw_snippet, ...) are immutable.
EDITABLE_FIELDS = frozenset(
    {
        "claim_property",
        "claim_effect",
        "claim_effect_type",
        "claim_mechanism",
        "claim_condition",
        "claim_intent",
        "claim_type",
        "claim_validity_status",
    }
)

LOW_STANCE_CONFIDENCE = 0.6

PRIORITY_WEIGHTS = {
    "repaired-fields": 0.4,
    "low-confidence-stance": 0.3,
    "unknown-effect-type": 0.2,
    "flagged-history": 0.1,
}


class ReviewAction:
    ACCEPT = "accept"
    REJECT = "reject"
    EDIT = "edit"
    ALL = ("accept", "reject", "edit")


@dataclass(frozen=True)
class ReviewDecision:
    claim_id: Identifier
    action: str
    reviewer: str
    decided_at: datetime
    edited_fields: Mapping | None = None
    note: str | None = None
    decision_id: str = ""

    def __post_init__(self):
        if self.action not in ReviewAction.ALL:
            raise SchemaError(f"unknown review action: {self.action!r}")
        if self.action == ReviewAction.EDIT and not self.edited_fields:
            raise SchemaError("edit decisions require edited_fields")
        if self.action != ReviewAction.EDIT and self.edited_fields:
            raise SchemaError(f"{self.action} decisions must not carry edited_fields")
        if not self.decision_id:
            object.__setattr__(self, "decision_id", self._content_id())

    def _content_id(self) -> str:
        material = json.dumps(
            {
                "claim_id": self.claim_id.value,
                "action": self.action,
                "reviewer": self.reviewer,
                "decided_at": _ts_to_str(self.decided_at),
                "edited_fields": dict(self.edited_fields or {}),
                "note": self.note,
            },
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(material.encode("utf-8")).hexdigest()[:16]

    def to_dict(self) -> dict:
        d: dict = {
            "claim_id": self.claim_id.value,
            "action": self.action,
            "reviewer": self.reviewer,
            "decided_at": _ts_to_str(self.decided_at),
            "decision_id": self.decision_id,
        }
        if self.edited_fields:
            d["edited_fields"] = dict(self.edited_fields)
        if self.note is not None:
            d["note"] = self.note
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ReviewDecision":
        return cls(
            claim_id=Identifier.from_string(data["claim_id"]),
            action=data["action"],
            reviewer=data["reviewer"],
            decided_at=_ts_from_str("decided_at", data["decided_at"]),
            edited_fields=data.get("edited_fields"),
            note=data.get("note"),
            decision_id=data.get("decision_id", ""),
        )


@dataclass(frozen=True)
class ReviewQueueEntry:
    claim_id: Identifier
    priority: float
    reasons: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id.value,
            "priority": self.priority,
            "reasons": list(self.reasons),
        }


@dataclass(frozen=True)
class ClaimHistory:
    """Repair/flag history carried over from schema validation reports."""

    repaired_fields: tuple[str, ...] = ()
    was_flagged: bool = False


def enqueue_for_review(
    claim: FoodClaim,
    validations: Sequence[ValidatingSource] = (),
    history: ClaimHistory = ClaimHistory(),
    category_map: EffectCategoryMap | None = None,
) -> ReviewQueueEntry:
    """Priority = documented weighted feature sum, clamped to [0, 1].

    Deterministic from claim + validation features; reasons enumerate the
    fired features.
    """
    reasons: list[str] = []
    if history.repaired_fields:
        reasons.append("repaired-fields")
    linked = [v for v in validations if v.claim_id == claim.id]
    confidences = [v.confidence for v in linked if v.confidence is not None]
    if confidences and min(confidences) < LOW_STANCE_CONFIDENCE:
        reasons.append("low-confidence-stance")
    if category_map is not None and any(
        not category_map.category_for(t)[1] for t in claim.claim_effect_type
    ):
        reasons.append("unknown-effect-type")
    if history.was_flagged and history.repaired_fields:
        reasons.append("flagged-history")
    priority = min(1.0, sum(PRIORITY_WEIGHTS[r] for r in reasons))
    return ReviewQueueEntry(claim_id=claim.id, priority=round(priority, 6), reasons=tuple(reasons))


def build_queue(
    store: TripleStore,
    histories: Mapping[str, ClaimHistory] | None = None,
    category_map: EffectCategoryMap | None = None,
    limit: int | None = None,
) -> list[ReviewQueueEntry]:
    """Unreviewed claims, priority descending, id ascending on ties."""
    histories = histories or {}
    validations = store.records("ValidatingSource")
    entries = []
    for claim in store.records("FoodClaim"):
        if claim.review_state is not ReviewState.UNREVIEWED:
            continue
        entries.append(
            enqueue_for_review(
                claim,
                validations,
                histories.get(claim.id.value, ClaimHistory()),
                category_map,
            )
        )
    entries.sort(key=lambda e: (-e.priority, e.claim_id.value))
    return entries[:limit] if limit is not None else entries


# ── Applying decisions ────────────────────────────────────────────────


@dataclass(frozen=True)
class AuditRecord:
    decision_id: str
    claim_id: Identifier
    action: str
    reviewer: str
    decided_at: datetime
    extraction_backend: str
    changes: tuple[tuple[str, str, str], ...]  # (field, old, new) as wire strings
    note: str | None = None

    def to_dict(self) -> dict:
        d = {
            "decision_id": self.decision_id,
            "claim_id": self.claim_id.value,
            "action": self.action,
            "reviewer": self.reviewer,
            "decided_at": _ts_to_str(self.decided_at),
            "extraction_backend": self.extraction_backend,
            "changes": [{"field": f, "old": o, "new": n} for f, o, n in self.changes],
        }
        if self.note is not None:
            d["note"] = self.note
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "AuditRecord":
        return cls(
            decision_id=data["decision_id"],
            claim_id=Identifier.from_string(data["claim_id"]),
            action=data["action"],
            reviewer=data["reviewer"],
            decided_at=_ts_from_str("decided_at", data["decided_at"]),
            extraction_backend=data.get("extraction_backend", ""),
            changes=tuple((c["field"], c["old"], c["new"]) for c in data.get("changes", ())),
            note=data.get("note"),
        )


class AuditLog:
    """Append-only decision history; the store's single change explainer."""

    def __init__(self):
        self.records: list[AuditRecord] = []
        self._applied: set[str] = set()

    def seen(self, decision_id: str) -> bool:
        return decision_id in self._applied

    def append(self, record: AuditRecord) -> None:
        self.records.append(record)
        self._applied.add(record.decision_id)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict(), ensure_ascii=False) + "\n" for r in self.records)

    @classmethod
    def from_jsonl(cls, text: str) -> "AuditLog":
        log = cls()
        for line in text.splitlines():
            if line.strip():
                log.append(AuditRecord.from_dict(json.loads(line)))
        return log


def _apply_edits(claim: FoodClaim, edits: Mapping) -> tuple[FoodClaim, list[tuple[str, str, str]]]:
    changes: list[tuple[str, str, str]] = []
    updated = claim
    for field_name, raw in edits.items():
        if field_name not in EDITABLE_FIELDS:
            raise ReviewError(
                "immutable-field",
                f"{field_name} cannot be edited by review",
                field=field_name,
            )
        old_wire = claim.to_dict().get(field_name)
        if field_name == "claim_intent":
            value = _parse_enum(ClaimIntent, field_name, raw)
        elif field_name == "claim_validity_status":
            value = _parse_enum(ValidityStatus, field_name, raw)
        elif field_name == "claim_type":
            value = frozenset(_parse_enum(ClaimTypeTag, field_name, t) for t in raw)
        elif field_name == "claim_effect_type":
            value = tuple(raw)
        else:
            value = raw
        updated = replace(updated, **{field_name: value})
        new_wire = updated.to_dict().get(field_name)
        if old_wire != new_wire:
            changes.append((field_name, json.dumps(old_wire), json.dumps(new_wire)))
    return updated, changes


_STATE_FOR_ACTION = {
    ReviewAction.ACCEPT: ReviewState.ACCEPTED,
    ReviewAction.REJECT: ReviewState.REJECTED,
    ReviewAction.EDIT: ReviewState.EDITED,
}


def apply_review_decision(
    decision: ReviewDecision, store: TripleStore, audit: AuditLog
) -> tuple[FoodClaim, AuditRecord | None]:
    """Apply one decision atomically: claim updated, audit appended.

    Replaying an already-applied decision id changes nothing and returns
    the stored claim with no new audit record. Rejected claims stay in
    the store as tombstones.
    """
    claim = store.record(decision.claim_id)
    if claim is None or not isinstance(claim, FoodClaim):
        raise ReviewError("not-found", f"unknown claim: {decision.claim_id.value}")
    if audit.seen(decision.decision_id):
        return claim, None

    changes: list[tuple[str, str, str]] = []
    updated = claim
    if decision.action == ReviewAction.EDIT:
        updated, changes = _apply_edits(claim, decision.edited_fields or {})
    new_state = _STATE_FOR_ACTION[decision.action]
    if updated.review_state is not new_state:
        changes.append(
            ("review_state", json.dumps(updated.review_state.value), json.dumps(new_state.value))
        )
        updated = replace(updated, review_state=new_state)
    store.replace_record(updated)
    record = AuditRecord(
        decision_id=decision.decision_id,
        claim_id=claim.id,
        action=decision.action,
        reviewer=decision.reviewer,
        decided_at=decision.decided_at,
        extraction_backend=claim.extraction_backend,
        changes=tuple(changes),
        note=decision.note,
    )
    audit.append(record)
    return updated, record


# ── Calibration ───────────────────────────────────────────────────────


def calibration_report(audit: AuditLog) -> dict:
    """Per-backend, per-field correction rates with exact counts.

    rate = reviewed claims where the field was edited / reviewed claims,
    computed per extraction backend over distinct claims.
    """
    reviewed_by_backend: dict[str, set[str]] = {}
    edits_by_backend: dict[str, dict[str, set[str]]] = {}
    for record in audit.records:
        backend = record.extraction_backend or "unknown"
        reviewed_by_backend.setdefault(backend, set()).add(record.claim_id.value)
        for field_name, _, _ in record.changes:
            if field_name == "review_state":
                continue
            edits_by_backend.setdefault(backend, {}).setdefault(field_name, set()).add(
                record.claim_id.value
            )
    report: dict = {"backends": {}}
    for backend in sorted(reviewed_by_backend):
        reviewed = len(reviewed_by_backend[backend])
        fields = {}
        for field_name in sorted(edits_by_backend.get(backend, {})):
            edited = len(edits_by_backend[backend][field_name])
            fields[field_name] = {
                "edited_claims": edited,
                "correction_rate": edited / reviewed if reviewed else 0.0,
            }
        report["backends"][backend] = {"reviewed_claims": reviewed, "fields": fields}
    return report
