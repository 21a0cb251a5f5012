"""Text cleaning, sentence segmentation, and lexicon-based food mentions.

Everything here is a pure function: documents can be processed in parallel
without coordination. Segmentation is rule-based on purpose — deterministic,
testable, and dependency-light.
"""

from __future__ import annotations

import csv
import html
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError
from .ids import Identifier

# Social-media artifacts removed by default: user handles and sub/user links.
DEFAULT_ARTIFACT_PATTERNS = (
    r"(?<![\w@])@\w+",
    r"/?u/[A-Za-z0-9_-]+",
    r"/?r/[A-Za-z0-9_-]+",
)

_TAG = re.compile(r"</?[A-Za-z][^>]*>")
_WS = re.compile(r"\s+")
_QUOTE_LINE = re.compile(r"^\s*>.*$", re.MULTILINE)


@dataclass(frozen=True)
class CleanupConfig:
    strip_quotes: bool = True
    artifact_patterns: tuple[str, ...] = DEFAULT_ARTIFACT_PATTERNS


def strip_markup(text: str, config: CleanupConfig = CleanupConfig()) -> str:
    """Strip HTML tags and social artifacts, collapse whitespace, trim."""
    text = html.unescape(text)
    if config.strip_quotes:
        text = _QUOTE_LINE.sub(" ", text)
    text = _TAG.sub(" ", text)
    for pattern in config.artifact_patterns:
        text = re.sub(pattern, " ", text)
    return _WS.sub(" ", text).strip()


# ── Sentence segmentation ─────────────────────────────────────────────

# Words whose trailing period does not terminate a sentence.
DEFAULT_ABBREVIATIONS = frozenset(
    {
        "dr", "mr", "mrs", "ms", "prof", "st", "vs", "etc", "e.g", "i.e",
        "fig", "no", "inc", "ltd", "approx", "dept", "est", "ca", "cf",
    }
)

_BOUNDARY = re.compile(r"[.!?]+(?=\s+[A-Z0-9])")


@dataclass(frozen=True)
class SentenceSpan:
    """One sentence of a cleaned document body; text == body[start:end]."""

    doc_id: Identifier
    index: int
    start: int
    end: int
    text: str

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id.value,
            "index": self.index,
            "start": self.start,
            "end": self.end,
            "text": self.text,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SentenceSpan":
        return cls(
            doc_id=Identifier.from_string(data["doc_id"]),
            index=data["index"],
            start=data["start"],
            end=data["end"],
            text=data["text"],
        )


def _is_abbreviation(text: str, period_pos: int, abbreviations: frozenset[str]) -> bool:
    # Word immediately before the terminator, with any internal dots kept
    # so "e.g." matches the "e.g" entry.
    i = period_pos
    while i > 0 and (text[i - 1].isalnum() or text[i - 1] == "."):
        i -= 1
    word = text[i:period_pos].casefold().lstrip(".")
    return word in abbreviations


def segment_sentences(
    text: str,
    doc_id: Identifier,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> list[SentenceSpan]:
    """Split cleaned text into covering, ordered, non-overlapping spans.

    Splits after . ! ? followed by whitespace and a capital or digit,
    except when the terminated word is a known abbreviation. Text without
    any terminator becomes a single whole-text span.
    """
    spans: list[SentenceSpan] = []
    if not text.strip():
        return spans
    cut_points: list[int] = []
    for match in _BOUNDARY.finditer(text):
        if text[match.start()] == "." and _is_abbreviation(text, match.start(), abbreviations):
            continue
        cut_points.append(match.end())
    starts = [0] + cut_points
    ends = cut_points + [len(text)]
    index = 0
    for raw_start, raw_end in zip(starts, ends):
        start, end = raw_start, raw_end
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start >= end:
            continue
        spans.append(
            SentenceSpan(doc_id=doc_id, index=index, start=start, end=end, text=text[start:end])
        )
        index += 1
    return spans


# ── Food-mention detection ────────────────────────────────────────────


@dataclass(frozen=True)
class MentionSpan:
    """A lexicon hit inside one sentence; offsets are sentence-relative."""

    doc_id: Identifier
    sentence_index: int
    surface: str
    lexicon_key: str
    start: int
    end: int

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id.value,
            "sentence_index": self.sentence_index,
            "surface": self.surface,
            "lexicon_key": self.lexicon_key,
            "start": self.start,
            "end": self.end,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MentionSpan":
        return cls(
            doc_id=Identifier.from_string(data["doc_id"]),
            sentence_index=data["sentence_index"],
            surface=data["surface"],
            lexicon_key=data["lexicon_key"],
            start=data["start"],
            end=data["end"],
        )


class Lexicon:
    """Canonical food name -> aliases table with casefolded alias lookup."""

    def __init__(self, entries: Mapping[str, Iterable[str]]):
        self._aliases: dict[str, str] = {}
        self._names: dict[str, list[str]] = {}
        for canonical, aliases in entries.items():
            canon = canonical.strip()
            if not canon:
                continue
            alias_list = self._names.setdefault(canon, [])
            for alias in [canon, *aliases]:
                key = alias.strip().casefold()
                if not key:
                    continue
                if key not in self._aliases:
                    self._aliases[key] = canon
                if alias.strip() not in alias_list:
                    alias_list.append(alias.strip())
        if not self._aliases:
            raise ConfigError("lexicon is empty")
        # One pattern per alias: a combined alternation would drop overlapping
        # candidates that the longest-match rule needs to arbitrate.
        self._alias_patterns = [
            (re.compile(r"\b" + re.escape(alias) + r"\b", re.IGNORECASE), canon)
            for alias, canon in self._aliases.items()
        ]

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, canonical: str) -> bool:
        return canonical in self._names

    def canonical_names(self) -> list[str]:
        return sorted(self._names)

    def resolve(self, surface: str) -> str | None:
        return self._aliases.get(surface.strip().casefold())

    def find(self, text: str) -> list[tuple[int, int, str]]:
        """All non-overlapping hits, longest match wins, leftmost on ties."""
        candidates: list[tuple[int, int, str]] = []
        for pattern, canon in self._alias_patterns:
            for match in pattern.finditer(text):
                candidates.append((match.start(), match.end(), canon))
        chosen: list[tuple[int, int, str]] = []
        for start, end, canon in sorted(candidates, key=lambda c: (-(c[1] - c[0]), c[0])):
            if all(end <= s or start >= e for s, e, _ in chosen):
                chosen.append((start, end, canon))
        return sorted(chosen, key=lambda c: c[0])

    @classmethod
    def from_csv(cls, path: str | Path) -> "Lexicon":
        """Two-column table: canonical name, alias. Lines starting with #
        are comments; a row with one column declares a canonical name."""
        entries: dict[str, list[str]] = {}
        try:
            fh = open(path, "r", encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read lexicon {path}: {exc}")
        with fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                canonical = row[0].strip()
                if not canonical:
                    continue
                aliases = entries.setdefault(canonical, [])
                for alias in row[1:]:
                    if alias.strip():
                        aliases.append(alias.strip())
        return cls(entries)


def detect_food_mentions(
    sentences: Sequence[SentenceSpan], lexicon: Lexicon
) -> list[MentionSpan]:
    """Longest-match, casefolded, word-boundary lexicon matching.

    Overlapping hits resolve to the longest (leftmost on equal length);
    each mention carries its canonical lexicon key. Independent per
    sentence, so results are invariant to sentence order.
    """
    mentions: list[MentionSpan] = []
    for sentence in sentences:
        for start, end, canon in lexicon.find(sentence.text):
            mentions.append(
                MentionSpan(
                    doc_id=sentence.doc_id,
                    sentence_index=sentence.index,
                    surface=sentence.text[start:end],
                    lexicon_key=canon,
                    start=start,
                    end=end,
                )
            )
    return mentions
