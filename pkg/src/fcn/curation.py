"""Post-processing: dedup, effect-type normalization, grouping, linking.

Dedup is deliberately conservative — claims mutate across modalities, so
only normalization-equal claims merge; a differing condition or mechanism
presence keeps records apart. Merging never loses provenance: the
survivor inherits every merged claim's source anchor and validating
sources are re-linked, not dropped.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .backends import data_path
from .errors import ConfigError
from .ids import Identifier
from .model import FoodClaim, FoodEntity, ValidatingSource

OTHER_CATEGORY = "Other"

_WS = re.compile(r"\s+")
_PUNCT = re.compile(r"[^\w\s]")


def normalize_phrase(text: str) -> str:
    """Casefold, strip punctuation, collapse whitespace, crude de-plural."""
    text = _PUNCT.sub(" ", text.casefold())
    words = []
    for word in _WS.split(text.strip()):
        if not word:
            continue
        if len(word) > 3 and word.endswith("ies"):
            word = word[:-3] + "y"
        elif len(word) > 4 and re.search(r"(?:x|ch|sh|ss|z|o)es$", word):
            word = word[:-2]
        elif len(word) > 3 and word.endswith("s") and not word.endswith(("ss", "us", "is")):
            word = word[:-1]
        words.append(word)
    return " ".join(words)


# ── Deduplication ─────────────────────────────────────────────────────


@dataclass(frozen=True)
class MergeLog:
    surviving_id: Identifier
    merged_ids: tuple[Identifier, ...]
    merge_key: str
    field_conflicts: tuple[tuple[str, str, tuple[str, ...]], ...] = ()

    def __post_init__(self):
        if not self.merged_ids:
            raise ValueError("MergeLog.merged_ids must be non-empty")
        if self.surviving_id in self.merged_ids:
            raise ValueError("survivor cannot appear among merged ids")

    def to_dict(self) -> dict:
        return {
            "surviving_id": self.surviving_id.value,
            "merged_ids": [i.value for i in self.merged_ids],
            "merge_key": self.merge_key,
            "field_conflicts": [
                {"field": f, "kept": kept, "dropped": list(dropped)}
                for f, kept, dropped in self.field_conflicts
            ],
        }


def merge_key(claim: FoodClaim) -> str:
    subject = claim.claim_subject.entity_id.value if claim.claim_subject else ""
    return "|".join(
        [
            subject,
            normalize_phrase(claim.claim_effect or ""),
            normalize_phrase(claim.claim_property or ""),
            normalize_phrase(claim.claim_condition or ""),
            "m" if claim.claim_mechanism is not None else "",
        ]
    )


def deduplicate(
    claims: Sequence[FoodClaim],
    validations: Sequence[ValidatingSource] = (),
) -> tuple[list[FoodClaim], list[ValidatingSource], list[MergeLog]]:
    """Merge normalization-equal claims; re-link their validating sources.

    The survivor is the earliest extracted_at (lowest id on ties) and
    additionally carries every merged claim's source anchor. Output order
    follows first appearance of each merge key, so dedup is a fixpoint:
    running it on its own output merges nothing.
    """
    groups: dict[str, list[FoodClaim]] = {}
    order: list[str] = []
    for claim in claims:
        key = merge_key(claim)
        if key not in groups:
            order.append(key)
        groups.setdefault(key, []).append(claim)

    survivors: list[FoodClaim] = []
    logs: list[MergeLog] = []
    remap: dict[str, Identifier] = {}
    for key in order:
        group = groups[key]
        if len(group) == 1:
            survivors.append(group[0])
            continue
        ranked = sorted(group, key=lambda c: (c.extracted_at, c.id.value))
        survivor, merged = ranked[0], ranked[1:]
        extra_sources: list[Identifier] = list(survivor.merged_source_ids)
        conflicts: list[tuple[str, str, tuple[str, ...]]] = []
        for other in merged:
            for source in other.source_ids():
                if source != survivor.source_id and source not in extra_sources:
                    extra_sources.append(source)
            remap[other.id.value] = survivor.id
            for field_name in ("claim_text", "claim_intent", "claim_validity_status"):
                kept = getattr(survivor, field_name)
                dropped = getattr(other, field_name)
                if kept != dropped:
                    conflicts.append(
                        (field_name, _as_str(kept), (_as_str(dropped),))
                    )
        survivors.append(replace(survivor, merged_source_ids=tuple(extra_sources)))
        logs.append(
            MergeLog(
                surviving_id=survivor.id,
                merged_ids=tuple(c.id for c in merged),
                merge_key=key,
                field_conflicts=tuple(conflicts),
            )
        )

    relinked: list[ValidatingSource] = []
    for vs in validations:
        target = remap.get(vs.claim_id.value)
        relinked.append(replace(vs, claim_id=target) if target is not None else vs)
    return survivors, relinked, logs


def _as_str(value) -> str:
    return value.value if hasattr(value, "value") and not isinstance(value, str) else str(value)


# ── Effect-type normalization and grouping ────────────────────────────


def load_synonym_table(path: str | Path | None = None) -> dict[str, str]:
    path = path or data_path("effect_synonyms.csv")
    table: dict[str, str] = {}
    with _open_table(path) as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#") or len(row) < 2:
                continue
            table[row[0].strip().casefold()] = row[1].strip()
    if not table:
        raise ConfigError(f"synonym table {path} is empty")
    return table


def normalize_effect_types(
    claim: FoodClaim, synonym_table: Mapping[str, str]
) -> tuple[FoodClaim, tuple[str, ...]]:
    """Replace effect types with canonical forms, collapsing duplicates.

    Unknown types pass through unchanged and are returned for reporting.
    The bundled table carries an identity row for every canonical type, so
    applying the result to the table again changes nothing.
    """
    unknown: list[str] = []
    normalized: list[str] = []
    for effect_type in claim.claim_effect_type:
        canonical = synonym_table.get(effect_type.casefold())
        if canonical is None:
            canonical = effect_type
            if effect_type not in unknown:
                unknown.append(effect_type)
        if canonical not in normalized:
            normalized.append(canonical)
    if tuple(normalized) == claim.claim_effect_type:
        return claim, tuple(unknown)
    return replace(claim, claim_effect_type=tuple(normalized)), tuple(unknown)


@dataclass(frozen=True)
class EffectCategoryMap:
    """Total mapping from canonical effect types to broad categories."""

    table: tuple[tuple[str, str], ...]

    def category_for(self, effect_type: str) -> tuple[str, bool]:
        """(category, known); unmapped types land in "Other"."""
        folded = effect_type.strip().casefold()
        for known_type, category in self.table:
            if known_type == folded:
                return category, True
        return OTHER_CATEGORY, False

    @classmethod
    def from_csv(cls, path: str | Path | None = None) -> "EffectCategoryMap":
        path = path or data_path("effect_categories.csv")
        rows: list[tuple[str, str]] = []
        with _open_table(path) as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#") or len(row) < 2:
                    continue
                rows.append((row[0].strip().casefold(), row[1].strip()))
        if not rows:
            raise ConfigError(f"category table {path} is empty")
        return cls(table=tuple(rows))


def group_effect_category(
    effect_type: str, category_map: EffectCategoryMap, misses: list[str] | None = None
) -> str:
    category, known = category_map.category_for(effect_type)
    if not known and misses is not None:
        misses.append(effect_type)
    return category


# ── FKG linking stub ──────────────────────────────────────────────────


def load_fkg_resolver(path: str | Path | None = None) -> dict[str, str]:
    path = path or data_path("fkg_links.csv")
    table: dict[str, str] = {}
    with _open_table(path) as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#") or len(row) < 2:
                continue
            table[row[0].strip().casefold()] = row[1].strip()
    return table


def link_to_fkg(
    entity: FoodEntity, resolver: Mapping[str, str], misses: list[str] | None = None
) -> FoodEntity:
    """Exact canonical-name lookup; no fuzzy matching, misses reported."""
    external = resolver.get(entity.canonical_name.casefold())
    if external is None:
        if misses is not None:
            misses.append(entity.canonical_name)
        return entity
    return replace(entity, fkg_link=external)


def _open_table(path):
    if hasattr(path, "open"):
        return path.open("r", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


# ── Batch driver ──────────────────────────────────────────────────────


@dataclass
class CurationResult:
    claims: list[FoodClaim] = field(default_factory=list)
    validations: list[ValidatingSource] = field(default_factory=list)
    entities: list[FoodEntity] = field(default_factory=list)
    merge_logs: list[MergeLog] = field(default_factory=list)
    unknown_effect_types: list[str] = field(default_factory=list)
    fkg_misses: list[str] = field(default_factory=list)


def curate(
    claims: Sequence[FoodClaim],
    validations: Sequence[ValidatingSource],
    entities: Iterable[FoodEntity],
    synonym_table: Mapping[str, str] | None = None,
    resolver: Mapping[str, str] | None = None,
) -> CurationResult:
    """Normalize effect types, dedup, and resolve FKG links, in that order."""
    synonym_table = synonym_table if synonym_table is not None else load_synonym_table()
    resolver = resolver if resolver is not None else load_fkg_resolver()
    result = CurationResult()
    normalized: list[FoodClaim] = []
    for claim in claims:
        claim, unknown = normalize_effect_types(claim, synonym_table)
        for effect_type in unknown:
            if effect_type not in result.unknown_effect_types:
                result.unknown_effect_types.append(effect_type)
        normalized.append(claim)
    result.claims, result.validations, result.merge_logs = deduplicate(normalized, validations)
    result.entities = [link_to_fkg(e, resolver, result.fkg_misses) for e in entities]
    return result
