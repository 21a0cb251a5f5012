"""Corpus intake: read dumps, apply domain filters, emit SourceDocuments.

Ingestion reads exported dumps only (JSONL, a directory of .txt files, or
a CSV table) — no fetching, no platform clients. Filtering keeps documents
whose cleaned body is long enough and that show a domain signal: a keyword
hit or an origin-URL pattern match.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterator, Sequence

from .errors import ConfigError
from .ids import IdentifierKind, canonical_key, mint_identifier
from .model import CredibilityTier, Platform, SourceDocument, _ts_from_str
from .preprocess import CleanupConfig, strip_markup

DEFAULT_MIN_BODY_CHARS = 1500

# Seed keyword heuristics; fully user-overridable via config.
DEFAULT_KEYWORDS = (
    "boosts immunity",
    "good for digestion",
    "aids digestion",
    "health benefit",
    "superfood",
    "cures",
    "prevents",
    "detox",
    "rich in antioxidants",
    "lowers blood pressure",
    "gut health",
    "improves memory",
    "weight loss",
    "anti-inflammatory",
    "boosts metabolism",
)

CREDIBILITY_BY_PLATFORM = {
    Platform.SCIENTIFIC: CredibilityTier.FORMAL,
    Platform.NEWS: CredibilityTier.SEMI_FORMAL,
    Platform.PACKAGING: CredibilityTier.SEMI_FORMAL,
    Platform.FORUM: CredibilityTier.INFORMAL,
    Platform.BLOG: CredibilityTier.INFORMAL,
    Platform.OTHER: CredibilityTier.INFORMAL,
}


class DumpFormat(str, Enum):
    JSONL_POSTS = "jsonl_posts"
    PLAIN_TEXT_DIR = "plain_text_dir"
    CSV_TABLE = "csv_table"


@dataclass(frozen=True)
class IngestConfig:
    keyword_heuristics: tuple[str, ...] = DEFAULT_KEYWORDS
    min_body_chars: int = DEFAULT_MIN_BODY_CHARS
    url_patterns: tuple[str, ...] = ()
    platform_hint: Platform = Platform.FORUM
    cleanup: CleanupConfig = CleanupConfig()

    def __post_init__(self):
        if self.min_body_chars < 0:
            raise ConfigError("min_body_chars must be >= 0")
        if not self.keyword_heuristics and not self.url_patterns:
            raise ConfigError("keyword filtering enabled with an empty keyword list")


@dataclass
class IngestStats:
    documents_seen: int = 0
    documents_kept: int = 0
    rejection_reasons: Counter = field(default_factory=Counter)

    @property
    def kept_fraction(self) -> float:
        return self.documents_kept / self.documents_seen if self.documents_seen else 0.0

    def record_kept(self) -> None:
        self.documents_seen += 1
        self.documents_kept += 1

    def record_rejection(self, reason: str) -> None:
        self.documents_seen += 1
        self.rejection_reasons[reason] += 1

    def to_dict(self) -> dict:
        return {
            "documents_seen": self.documents_seen,
            "documents_kept": self.documents_kept,
            "kept_fraction": self.kept_fraction,
            "rejection_reasons": dict(sorted(self.rejection_reasons.items())),
        }


# ── Dump loaders ──────────────────────────────────────────────────────


def load_dump(
    path: str | Path, format: DumpFormat, stats: IngestStats | None = None
) -> Iterator[dict]:
    """Lazily yield raw records from a dump.

    Malformed entries are counted into ``stats`` under "malformed" and
    skipped, never fatal; an unreadable path is a configuration error.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"input path does not exist: {path}")
    if format is DumpFormat.JSONL_POSTS:
        yield from _load_jsonl(path, stats)
    elif format is DumpFormat.PLAIN_TEXT_DIR:
        yield from _load_text_dir(path, stats)
    elif format is DumpFormat.CSV_TABLE:
        yield from _load_csv(path, stats)
    else:  # pragma: no cover - enum is closed
        raise ConfigError(f"unsupported dump format: {format}")


def _load_jsonl(path: Path, stats: IngestStats | None) -> Iterator[dict]:
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}")
    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("record is not an object")
            except ValueError:
                if stats is not None:
                    stats.record_rejection("malformed")
                continue
            yield record


def _load_text_dir(path: Path, stats: IngestStats | None) -> Iterator[dict]:
    if not path.is_dir():
        raise ConfigError(f"{path} is not a directory")
    for file in sorted(path.glob("*.txt")):
        try:
            text = file.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError):
            if stats is not None:
                stats.record_rejection("malformed")
            continue
        yield {"body": text, "title": file.stem}


def _load_csv(path: Path, stats: IngestStats | None) -> Iterator[dict]:
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}")
    with fh:
        reader = csv.DictReader(fh)
        for row in reader:
            if any(v is None for v in row.values()) or None in row:
                if stats is not None:
                    stats.record_rejection("malformed")
                continue
            yield {k: v for k, v in row.items() if v != ""}


# ── Filtering ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class FilterDecision:
    keep: bool
    reason: str | None = None
    matched_keywords: tuple[str, ...] = ()


def filter_candidate(doc: SourceDocument, cfg: IngestConfig) -> FilterDecision:
    """Keep iff body length exceeds the gate AND a domain signal fired.

    The length gate is strict (> min_body_chars, counted on the cleaned
    body); the domain signal is a casefolded keyword substring hit or an
    origin-URL pattern match. Pure: same (doc, cfg) -> same decision.
    """
    import re

    if len(doc.body) <= cfg.min_body_chars:
        return FilterDecision(keep=False, reason="too-short")
    body_cf = doc.body.casefold()
    matched = tuple(kw for kw in cfg.keyword_heuristics if kw.casefold() in body_cf)
    url_hit = False
    if doc.origin_url:
        for pattern in cfg.url_patterns:
            try:
                if re.search(pattern, doc.origin_url):
                    url_hit = True
                    break
            except re.error as exc:
                raise ConfigError(f"bad url_pattern {pattern!r}: {exc}")
    if matched or url_hit:
        return FilterDecision(keep=True, matched_keywords=matched)
    return FilterDecision(keep=False, reason="no-domain-signal")


# ── Normalization ─────────────────────────────────────────────────────

_BODY_KEYS = ("body", "text", "selftext", "content")
_URL_KEYS = ("origin_url", "url", "permalink", "link")


class RecordRejected(Exception):
    """Raised for a per-record problem; carries the rejection reason."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def normalize_document(
    record: dict,
    platform: Platform,
    cleanup: CleanupConfig = CleanupConfig(),
    default_retrieved_at: datetime | None = None,
) -> SourceDocument:
    """Build a SourceDocument from a raw dump record.

    The body is cleaned here so every later stage (including the length
    filter) sees the same text. Reply/comment lists are folded into the
    body, since replies are where counterclaims live. The identifier is
    minted from the origin URL (or the full raw text when there is none),
    so loading the same record twice yields the same document id.
    """
    raw_body = _first_str(record, _BODY_KEYS)
    if raw_body is None or not raw_body.strip():
        raise RecordRejected("empty-body")
    replies = record.get("replies") or record.get("comments") or ()
    if replies:
        raw_body = raw_body + "\n\n" + "\n\n".join(str(r) for r in replies)
    body = strip_markup(raw_body, cleanup)
    if not body:
        raise RecordRejected("empty-body")

    origin_url = _first_str(record, _URL_KEYS)
    title = record.get("title")
    now = datetime.now(timezone.utc)
    retrieved_raw = record.get("retrieved_at")
    if retrieved_raw is not None:
        retrieved_at = _parse_when("retrieved_at", retrieved_raw)
        if retrieved_at > now:
            raise RecordRejected("future-retrieved-at")
    else:
        retrieved_at = default_retrieved_at or now
    published_raw = record.get("published_at", record.get("created_utc"))
    published_at = _parse_when("published_at", published_raw) if published_raw is not None else None

    if record.get("platform"):
        try:
            platform = Platform(record["platform"])
        except ValueError:
            raise RecordRejected("malformed")

    key_material = origin_url if origin_url else f"{title or ''}|{raw_body}"
    doc_id = mint_identifier(IdentifierKind.DOCUMENT, canonical_key(key_material))
    return SourceDocument(
        id=doc_id,
        platform=platform,
        retrieved_at=retrieved_at,
        body=body,
        raw_body=raw_body,
        credibility_tier=CREDIBILITY_BY_PLATFORM[platform],
        language_tag=str(record.get("language", record.get("language_tag", "en"))),
        origin_url=origin_url,
        author=record.get("author"),
        published_at=published_at,
        title=title,
    )


def _first_str(record: dict, keys: Sequence[str]) -> str | None:
    for key in keys:
        value = record.get(key)
        if isinstance(value, str) and value.strip():
            return value
    return None


def _parse_when(field_name: str, raw: Any) -> datetime:
    if isinstance(raw, (int, float)):
        return datetime.fromtimestamp(raw, tz=timezone.utc)
    return _ts_from_str(field_name, raw)


def run_ingest(
    input_path: str | Path,
    format: DumpFormat,
    cfg: IngestConfig,
    default_retrieved_at: datetime | None = None,
) -> tuple[list[SourceDocument], IngestStats]:
    """Full Step-1 pass: load, normalize, filter; conservation holds:
    documents_seen == documents_kept + sum(rejection_reasons)."""
    stats = IngestStats()
    kept: list[SourceDocument] = []
    for record in load_dump(input_path, format, stats):
        try:
            doc = normalize_document(
                record, cfg.platform_hint, cfg.cleanup, default_retrieved_at
            )
        except RecordRejected as exc:
            stats.record_rejection(exc.reason)
            continue
        decision = filter_candidate(doc, cfg)
        if decision.keep:
            stats.record_kept()
            kept.append(doc)
        else:
            stats.record_rejection(decision.reason or "rejected")
    return kept, stats
