"""Pluggable claim extractors.

Two backends ship with the package:

* ``rule`` — deterministic pattern extractor driven by the bundled data
  tables (lexicon subjects, verb frames, stance/intent/type keyword
  tables). Used for every CI test.
* ``remote`` — chat-completion HTTP client with few-shot prompts at
  temperature 0. Responses are recorded to replay transcripts keyed by a
  request hash, so test runs never touch the network.

Both expose the same capability surface; module-level pipeline code never
branches on the backend type.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from .errors import ConfigError, SchemaError, TransportError
from .ids import Identifier
from .model import (
    ClaimIntent,
    ClaimTypeTag,
    EntityClassification,
    EntityProfile,
    SourceDocument,
    Stance,
)
from .preprocess import Lexicon, MentionSpan, SentenceSpan

CAP_CLAIMS = "claims"
CAP_PROFILES = "profiles"
CAP_STANCES = "stances"

# Severity order for intent assignment when several patterns fire.
_INTENT_PRECEDENCE = [
    ClaimIntent.FACT,
    ClaimIntent.MYTH,
    ClaimIntent.MISREPRESENTATION,
    ClaimIntent.MISINFORMATION,
    ClaimIntent.DISINFORMATION,
    ClaimIntent.MALINFORMATION,
]

FALLBACK_EFFECT_TYPE = "health"
INLINE_CITATION_CONFIDENCE = 0.6

_URL = re.compile(r"https?://[^\s)\]>\"']+")
_MARKDOWN_LINK = re.compile(r"\[([^\]]+)\]\((https?://[^\s)]+)\)")
_VITAMIN_SUBJECT = re.compile(r"\bvitamin [a-z][0-9]{0,2}\b", re.IGNORECASE)
_MODAL_PREDICATE = re.compile(
    r"\b(should(?: not)?|must(?: not)?|cannot) (?:be )?\w+(?:\s|$)", re.IGNORECASE
)


@dataclass(frozen=True)
class RawClaimCandidate:
    """A grounded claim statement before grammar enforcement."""

    doc_id: Identifier
    sentence_refs: tuple[int, ...]
    candidate_text: str
    subject_surface: str
    compound: bool = False
    audit_note: str | None = None

    def to_dict(self) -> dict:
        d = {
            "doc_id": self.doc_id.value,
            "sentence_refs": list(self.sentence_refs),
            "candidate_text": self.candidate_text,
            "subject_surface": self.subject_surface,
            "compound": self.compound,
        }
        if self.audit_note is not None:
            d["audit_note"] = self.audit_note
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RawClaimCandidate":
        return cls(
            doc_id=Identifier.from_string(data["doc_id"]),
            sentence_refs=tuple(data["sentence_refs"]),
            candidate_text=data["candidate_text"],
            subject_surface=data["subject_surface"],
            compound=data.get("compound", False),
            audit_note=data.get("audit_note"),
        )


@dataclass(frozen=True)
class GrammarParse:
    """Backend output for one candidate: the claim-grammar reading."""

    subject_surface: str | None
    claim_property: str | None = None
    claim_effect: str | None = None
    claim_effect_type: tuple[str, ...] = ()
    claim_mechanism: str | None = None
    claim_condition: str | None = None
    claim_intent: ClaimIntent = ClaimIntent.FACT
    claim_type: frozenset[ClaimTypeTag] = frozenset()
    claim_text: str | None = None
    context_fields: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StanceCall:
    stance: Stance
    confidence: float
    rule: str | None = None


# ── Bundled rule tables ───────────────────────────────────────────────


def data_path(name: str):
    return resources.files("fcn.data").joinpath(name)


def _read_rows(name: str) -> list[list[str]]:
    rows = []
    with data_path(name).open("r", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            rows.append([cell.strip() for cell in row])
    return rows


def _read_lines(name: str) -> list[str]:
    out = []
    with data_path(name).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(line)
    return out


class RuleTables:
    """All data tables behind the rule backend, loaded once."""

    def __init__(self):
        self.claim_verbs: list[str] = _read_lines("claim_verbs.txt")
        self.property_patterns: list[re.Pattern] = [
            re.compile(p, re.IGNORECASE) for p in _read_lines("property_patterns.txt")
        ]
        self.condition_patterns: list[re.Pattern] = [
            re.compile(p, re.IGNORECASE) for p in _read_lines("condition_patterns.txt")
        ]
        self.effect_type_keywords: list[tuple[re.Pattern, str]] = [
            (re.compile(p, re.IGNORECASE), t) for p, t in _read_rows("effect_type_keywords.csv")
        ]
        self.claim_type_patterns: list[tuple[re.Pattern, ClaimTypeTag]] = [
            (re.compile(p, re.IGNORECASE), ClaimTypeTag(t))
            for p, t in _read_rows("claim_type_patterns.csv")
        ]
        self.intent_patterns: list[tuple[re.Pattern, ClaimIntent]] = [
            (re.compile(p, re.IGNORECASE), ClaimIntent(t))
            for p, t in _read_rows("intent_patterns.csv")
        ]
        self.stance_rules: list[tuple[re.Pattern, Stance, float]] = [
            (re.compile(p, re.IGNORECASE), Stance(s), float(w))
            for p, s, w in _read_rows("stance_rules.csv")
        ]
        self.context_patterns: list[tuple[re.Pattern, str, str]] = [
            (re.compile(p, re.IGNORECASE), f, v) for p, f, v in _read_rows("context_patterns.csv")
        ]
        self.entity_reference: dict[str, dict] = {}
        for row in _read_rows("entity_reference.csv"):
            name, classification, category, group, description, sci, nutrition, alts, regions, varieties = row
            self.entity_reference[name.casefold()] = {
                "classification": EntityClassification(classification),
                "category": category or None,
                "group": group or None,
                "description": description or None,
                "scientific_name": sci or None,
                "nutritional_value": nutrition or None,
                "alternate_names": tuple(a for a in alts.split(";") if a),
                "regions_of_production": tuple(r for r in regions.split(";") if r),
                "varieties": tuple(v for v in varieties.split(";") if v),
            }
        self._verb_pattern = re.compile(
            r"\b(?:" + "|".join(re.escape(v) for v in self.claim_verbs) + r")\b",
            re.IGNORECASE,
        )

    def verb_positions(self, text: str) -> list[tuple[int, int]]:
        return [(m.start(), m.end()) for m in self._verb_pattern.finditer(text)]

    def starts_with_verb(self, text: str) -> bool:
        return self._verb_pattern.match(text) is not None


_tables: RuleTables | None = None


def rule_tables() -> RuleTables:
    global _tables
    if _tables is None:
        _tables = RuleTables()
    return _tables


def bundled_lexicon() -> Lexicon:
    return Lexicon.from_csv(data_path("foods.csv"))


# ── Compound detection (shared by extraction and the atomicity check) ──


def detect_compound(text: str, tables: RuleTables | None = None) -> bool:
    """True iff a coordinating conjunction joins two claim verb phrases.

    The conjunction must be directly followed by a claim verb and preceded
    by an earlier claim verb that already has its own object tokens —
    exactly the shape the splitter can decompose. "Milk and fish should
    not be eaten together" has its conjunction between two noun phrases,
    so it is not compound.
    """
    tables = tables or rule_tables()
    verbs = tables.verb_positions(text)
    if len(verbs) < 2:
        return False
    return bool(_split_points(text, verbs))


def _split_points(text: str, verbs: list[tuple[int, int]]) -> list[tuple[int, int, int]]:
    """(conj_start, conj_end, following_verb_start) for decomposable joins."""
    points = []
    for match in re.finditer(r",?\s+\b(and|or)\b\s+", text, re.IGNORECASE):
        following = [v for v in verbs if v[0] >= match.end()]
        if not following:
            continue
        next_verb = following[0]
        # Conjunction must sit directly before the next verb phrase.
        if text[match.end() : next_verb[0]].strip():
            continue
        earlier = [v for v in verbs if v[1] <= match.start()]
        if not earlier:
            continue
        # The earlier verb needs its own object between it and the
        # conjunction, else this is shared-object coordination.
        if not text[earlier[-1][1] : match.start()].strip():
            continue
        points.append((match.start(), match.end(), next_verb[0]))
    return points


# ── Backend interface ─────────────────────────────────────────────────


class ExtractorBackend:
    """Deterministic extraction interface; see module docstring."""

    name: str = "base"
    capabilities: frozenset[str] = frozenset()

    def extract_claims(
        self,
        doc: SourceDocument,
        sentences: Sequence[SentenceSpan],
        mentions: Sequence[MentionSpan],
    ) -> list[RawClaimCandidate]:
        raise NotImplementedError

    def parse_grammar(self, candidate: RawClaimCandidate) -> GrammarParse:
        raise NotImplementedError

    def extract_profiles(
        self, doc: SourceDocument, canonical_name: str
    ) -> tuple[EntityProfile, EntityProfile]:
        raise NotImplementedError

    def classify_stance(self, validity_text: str) -> StanceCall:
        raise NotImplementedError


# ── Rule backend ──────────────────────────────────────────────────────


class RuleBackend(ExtractorBackend):
    name = "rule"
    capabilities = frozenset({CAP_CLAIMS, CAP_PROFILES, CAP_STANCES})

    def __init__(self, lexicon: Lexicon | None = None):
        self.lexicon = lexicon or bundled_lexicon()
        self.tables = rule_tables()

    # -- claims --

    def extract_claims(self, doc, sentences, mentions):
        by_sentence: dict[int, list[MentionSpan]] = {}
        for mention in mentions:
            by_sentence.setdefault(mention.sentence_index, []).append(mention)
        candidates: list[RawClaimCandidate] = []
        for sentence in sentences:
            sent_mentions = sorted(by_sentence.get(sentence.index, []), key=lambda m: m.start)
            subject = self._pick_subject(sentence.text, sent_mentions)
            if subject is None:
                continue
            if not self._has_claim_shape(sentence.text):
                continue
            candidates.append(
                RawClaimCandidate(
                    doc_id=doc.id,
                    sentence_refs=(sentence.index,),
                    candidate_text=sentence.text,
                    subject_surface=subject,
                    compound=detect_compound(sentence.text, self.tables),
                )
            )
        return candidates

    def _pick_subject(self, text: str, sent_mentions: list[MentionSpan]) -> str | None:
        verbs = self.tables.verb_positions(text)
        first_verb = verbs[0][0] if verbs else len(text)
        before = [m for m in sent_mentions if m.start < first_verb]
        if before:
            return before[0].surface
        if sent_mentions:
            return sent_mentions[0].surface
        match = _VITAMIN_SUBJECT.search(text)
        if match:
            return match.group(0)
        return None

    def _has_claim_shape(self, text: str) -> bool:
        if self.tables.verb_positions(text):
            return True
        if any(p.search(text) for p in self.tables.property_patterns):
            return True
        return bool(_MODAL_PREDICATE.search(text))

    # -- grammar --

    def parse_grammar(self, candidate: RawClaimCandidate) -> GrammarParse:
        text = candidate.candidate_text
        subject = candidate.subject_surface or None
        if subject and self.lexicon.resolve(subject) is None and not _VITAMIN_SUBJECT.match(subject):
            subject = None
        claim_property, claim_effect = self._split_property_effect(text)
        mechanism = None
        if claim_effect:
            claim_effect, mechanism = self._carve_mechanism(claim_effect)
        condition_scope = text if mechanism is None else text.replace(mechanism, " ")
        condition, claim_effect, claim_property = self._carve_condition(
            condition_scope, claim_effect, claim_property
        )
        effect_types: tuple[str, ...] = ()
        if claim_effect:
            effect_types = self._effect_types(claim_effect) or (FALLBACK_EFFECT_TYPE,)
        intents = [i for p, i in self.tables.intent_patterns if p.search(text)]
        intent = max(intents, key=_INTENT_PRECEDENCE.index) if intents else ClaimIntent.FACT
        tags = frozenset(t for p, t in self.tables.claim_type_patterns if p.search(text))
        context_fields: dict[str, object] = {}
        for pattern, fname, value in self.tables.context_patterns:
            if pattern.search(text):
                if fname in ("geography", "culture"):
                    context_fields.setdefault(fname, [])
                    if value not in context_fields[fname]:
                        context_fields[fname].append(value)
                else:
                    context_fields.setdefault(fname, value)
        return GrammarParse(
            subject_surface=subject,
            claim_property=claim_property,
            claim_effect=claim_effect,
            claim_effect_type=effect_types,
            claim_mechanism=mechanism,
            claim_condition=condition,
            claim_intent=intent,
            claim_type=tags,
            context_fields=context_fields,
        )

    def _split_property_effect(self, text: str) -> tuple[str | None, str | None]:
        # A property is stative ("what the subject has"); it often precedes
        # the effect, so look for it before the first action verb.
        verbs = self.tables.verb_positions(text)
        effect = None
        property_scope = text
        if verbs:
            effect = _trim_phrase(self._clause(text, verbs[0][0]))
            property_scope = text[: verbs[0][0]]
        else:
            modal = _MODAL_PREDICATE.search(text)
            if modal:
                effect = _trim_phrase(self._clause(text, modal.start()))
                property_scope = text[: modal.start()]
        claim_property = None
        for pattern in self.tables.property_patterns:
            match = pattern.search(property_scope)
            if match:
                prop = match.group("prop") if "prop" in pattern.groupindex else match.group(0)
                claim_property = _trim_phrase(prop)
                break
        return claim_property, effect

    def _clause(self, text: str, start: int) -> str:
        # Cut the phrase at clause punctuation, except before a
        # coordinated verb phrase the decomposer wants intact.
        rest = text[start:]
        for match in re.finditer(r"[,;:]", rest):
            tail = rest[match.end():]
            conj = re.match(r"\s*(?:and|or)\s+", tail, re.IGNORECASE)
            if conj and self.tables.starts_with_verb(tail[conj.end():]):
                continue
            return rest[: match.start()]
        return rest

    def _carve_mechanism(self, effect: str) -> tuple[str, str | None]:
        match = re.search(r"\b(by|via|through)\b\s+\S.*$", effect, re.IGNORECASE)
        if not match:
            return effect, None
        mechanism = _trim_phrase(match.group(0))
        remainder = _trim_phrase(effect[: match.start()])
        if not remainder:
            return effect, None
        return remainder, mechanism

    def _carve_condition(
        self, text: str, effect: str | None, prop: str | None
    ) -> tuple[str | None, str | None, str | None]:
        for pattern in self.tables.condition_patterns:
            match = pattern.search(text)
            if not match:
                continue
            condition = _trim_phrase(match.group(0))
            if effect and condition in effect:
                effect = _trim_phrase(effect.replace(condition, " "))
            if prop and condition in prop:
                prop = _trim_phrase(prop.replace(condition, " "))
            return condition, effect or None, prop or None
        return None, effect, prop

    def _effect_types(self, effect: str) -> tuple[str, ...]:
        hits: list[str] = []
        for pattern, effect_type in self.tables.effect_type_keywords:
            if pattern.search(effect) and effect_type not in hits:
                hits.append(effect_type)
        return tuple(hits)

    # -- profiles --

    def extract_profiles(self, doc, canonical_name):
        extracted = self._profile_from_text(doc.body, canonical_name)
        inferred = self._profile_from_reference(canonical_name)
        return extracted, inferred

    def _profile_from_text(self, body: str, name: str) -> EntityProfile:
        regions: list[str] = []
        for match in re.finditer(
            r"\b(?:[Gg]rown|[Cc]ultivated|[Pp]roduced|[Ff]armed)(?: mainly| primarily| widely)? in ((?:[A-Z][a-zA-Z]+)(?:(?:,| and) [A-Z][a-zA-Z]+)*)",
            body,
        ):
            for region in re.split(r",| and ", match.group(1)):
                if region.strip():
                    regions.append(region.strip())
        alternates: list[str] = []
        for match in re.finditer(
            r"\b(?:[Aa]lso (?:known as|called)|a\.k\.a\.) ([A-Za-z][A-Za-z -]*(?:, [A-Za-z][A-Za-z -]*)*)",
            body,
        ):
            for alt in match.group(1).split(","):
                if alt.strip():
                    alternates.append(alt.strip())
        sci = None
        sci_match = re.search(r"\(([A-Z][a-z]+ [a-z]+)\)", body)
        if sci_match:
            sci = sci_match.group(1)
        category = None
        description = None
        is_a = re.search(
            rf"\b{re.escape(name)} is an? ([a-z][a-z-]*)\b", body, re.IGNORECASE
        )
        if is_a:
            category = is_a.group(1)
            sentence_end = body.find(".", is_a.start())
            description = _trim_phrase(
                body[is_a.start() : sentence_end + 1 if sentence_end != -1 else len(body)]
            )
        nutrition = None
        nut_match = re.search(
            r"\b(?:rich|high) in ((?:[a-zA-Z0-9-]+)(?:(?:,| and) [a-zA-Z0-9-]+)*)", body
        )
        if nut_match:
            nutrition = _trim_phrase(nut_match.group(0))
        varieties: list[str] = []
        var_match = re.search(
            r"\bvarieties (?:such as|like|include) ([A-Za-z][A-Za-z -]*(?:(?:,| and) [A-Za-z][A-Za-z -]*)*)",
            body,
        )
        if var_match:
            for variety in re.split(r",| and ", var_match.group(1)):
                if variety.strip():
                    varieties.append(variety.strip())
        group = None
        group_match = re.search(r"belongs to the ([a-z][a-z ]+?) family", body, re.IGNORECASE)
        if group_match:
            group = group_match.group(1)
        return EntityProfile(
            category=category,
            description=description,
            group=group,
            alternate_names=tuple(alternates),
            scientific_name=sci,
            nutritional_value=nutrition,
            regions_of_production=tuple(regions),
            varieties=tuple(varieties),
        )

    def _profile_from_reference(self, name: str) -> EntityProfile:
        ref = self.tables.entity_reference.get(name.casefold())
        if ref is None:
            return EntityProfile()
        return EntityProfile(
            category=ref["category"],
            description=ref["description"],
            group=ref["group"],
            alternate_names=ref["alternate_names"],
            scientific_name=ref["scientific_name"],
            nutritional_value=ref["nutritional_value"],
            regions_of_production=ref["regions_of_production"],
            varieties=ref["varieties"],
        )

    def classify_entity(self, canonical_name: str) -> EntityClassification:
        return classify_entity(canonical_name, self.tables)

    # -- stances --

    def classify_stance(self, validity_text: str) -> StanceCall:
        if not validity_text.strip():
            raise ValueError("validity_text must be non-empty")
        best: StanceCall | None = None
        for pattern, stance, weight in self.tables.stance_rules:
            if pattern.search(validity_text) and (best is None or weight > best.confidence):
                best = StanceCall(stance=stance, confidence=weight, rule=pattern.pattern)
        if best is None:
            return StanceCall(stance=Stance.QUESTION, confidence=0.5, rule=None)
        return best


def classify_entity(canonical_name: str, tables: RuleTables | None = None) -> EntityClassification:
    """Recipe/ingredient/meal/nutrient call, from the reference table when
    it knows the name, else by shape heuristics."""
    tables = tables or rule_tables()
    ref = tables.entity_reference.get(canonical_name.casefold())
    if ref is not None:
        return ref["classification"]
    if _VITAMIN_SUBJECT.match(canonical_name):
        return EntityClassification.NUTRIENT
    if canonical_name.casefold() in {"breakfast", "lunch", "dinner", "brunch"}:
        return EntityClassification.MEAL
    return EntityClassification.INGREDIENT


def _trim_phrase(text: str) -> str:
    text = re.sub(r"\s+", " ", text).strip().strip(".!?,;:").strip()
    return re.sub(r"\s+(?:and|or|but)$", "", text, flags=re.IGNORECASE)


def find_urls(text: str) -> list[str]:
    """Markdown links, bare URLs, and footnote refs, in order of appearance."""
    urls: list[str] = []
    taken: list[tuple[int, int]] = []
    for match in _MARKDOWN_LINK.finditer(text):
        urls.append(match.group(2))
        taken.append(match.span())
    for match in _URL.finditer(text):
        if any(s <= match.start() < e for s, e in taken):
            continue
        urls.append(match.group(0).rstrip(".,;"))
    return urls


# ── Remote backend ────────────────────────────────────────────────────

ENV_API_BASE = "FCN_REMOTE_API_BASE"
ENV_API_KEY = "FCN_REMOTE_API_KEY"
ENV_MODEL = "FCN_REMOTE_MODEL"
ENV_TIMEOUT = "FCN_REMOTE_TIMEOUT"
ENV_TRANSCRIPTS = "FCN_TRANSCRIPT_DIR"


@dataclass(frozen=True)
class PromptTemplate:
    """Versioned few-shot prompt; a data file, not code."""

    id: str
    version: int
    instruction: str
    exemplars: tuple[tuple[str, str], ...]
    output_schema: str

    @classmethod
    def load(cls, name: str) -> "PromptTemplate":
        with data_path(f"prompts/{name}.json").open("r", encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(
            id=raw["id"],
            version=raw["version"],
            instruction=raw["instruction"],
            exemplars=tuple((e["input"], json.dumps(e["output"], ensure_ascii=False)) for e in raw["exemplars"]),
            output_schema=raw["output_schema"],
        )

    def render(self, user_input: str) -> list[dict]:
        messages = [{"role": "system", "content": f"{self.instruction}\n\nOutput schema:\n{self.output_schema}"}]
        for exemplar_in, exemplar_out in self.exemplars:
            messages.append({"role": "user", "content": exemplar_in})
            messages.append({"role": "assistant", "content": exemplar_out})
        messages.append({"role": "user", "content": user_input})
        return messages


@dataclass(frozen=True)
class RemoteConfig:
    api_base: str = "https://api.example.com/v1"
    api_key: str = ""
    model: str = "deterministic-extractor"
    timeout: float = 30.0
    transcript_dir: str | None = None
    mode: str = "replay"  # replay | record | auto
    max_attempts: int = 3
    backoff_base: float = 0.5
    max_in_flight: int = 4
    tokens_per_minute: int | None = None

    @classmethod
    def from_env(cls, **overrides) -> "RemoteConfig":
        values = dict(
            api_base=os.environ.get(ENV_API_BASE, cls.api_base),
            api_key=os.environ.get(ENV_API_KEY, ""),
            model=os.environ.get(ENV_MODEL, cls.model),
            timeout=float(os.environ.get(ENV_TIMEOUT, cls.timeout)),
            transcript_dir=os.environ.get(ENV_TRANSCRIPTS),
        )
        values.update(overrides)
        return cls(**values)


class TranscriptStore:
    """Replayable request/response pairs keyed by a request hash."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    @staticmethod
    def request_key(payload: dict) -> str:
        canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:24]

    def path_for(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def load(self, key: str) -> dict | None:
        path = self.path_for(key)
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)["response"]

    def save(self, key: str, payload: dict, response: dict) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        with open(self.path_for(key), "w", encoding="utf-8") as fh:
            json.dump({"request": payload, "response": response}, fh, ensure_ascii=False, indent=1)


class TokenBudget:
    """Sliding-window tokens-per-minute limiter for the remote transport.

    Token counts are a chars/4 estimate of the request payload; acquire
    blocks until the trailing-minute total fits the budget. Clock and
    sleep are injectable so tests never wait on wall time.
    """

    def __init__(self, tokens_per_minute: int, clock=time.monotonic, sleep=time.sleep):
        if tokens_per_minute <= 0:
            raise ConfigError("tokens_per_minute must be positive")
        self.tokens_per_minute = tokens_per_minute
        self._clock = clock
        self._sleep = sleep
        self._spent: list[tuple[float, int]] = []
        self._lock = threading.Lock()

    def _trailing_total(self, now: float) -> int:
        self._spent = [(at, n) for at, n in self._spent if now - at < 60.0]
        return sum(n for _, n in self._spent)

    def acquire(self, tokens: int) -> None:
        while True:
            with self._lock:
                now = self._clock()
                if self._trailing_total(now) + tokens <= self.tokens_per_minute:
                    self._spent.append((now, tokens))
                    return
                oldest = self._spent[0][0]
                wait = max(60.0 - (now - oldest), 0.01)
            self._sleep(wait)

    @staticmethod
    def estimate(payload: dict) -> int:
        return max(len(json.dumps(payload)) // 4, 1)


class RemoteBackend(ExtractorBackend):
    """Chat-completion extractor with transcript record/replay.

    Deterministic given identical inputs and configuration: temperature is
    pinned to 0 and every response is served from (or recorded to) the
    transcript store. Live transport respects an in-flight request cap
    and an optional token/minute budget; replays bypass both.
    """

    capabilities = frozenset({CAP_CLAIMS, CAP_PROFILES, CAP_STANCES})

    def __init__(self, config: RemoteConfig | None = None):
        self.config = config or RemoteConfig.from_env()
        if self.config.transcript_dir is None and self.config.mode != "record":
            raise ConfigError("remote backend needs a transcript directory outside record mode")
        self.transcripts = (
            TranscriptStore(self.config.transcript_dir) if self.config.transcript_dir else None
        )
        self.name = f"remote:{self.config.model}"
        self._claims_template = PromptTemplate.load("claims_v1")
        self._profiles_template = PromptTemplate.load("profiles_v1")
        self._stances_template = PromptTemplate.load("stances_v1")
        self._grammar_cache: dict[str, GrammarParse] = {}
        self._gate = threading.Semaphore(max(self.config.max_in_flight, 1))
        self.budget = (
            TokenBudget(self.config.tokens_per_minute)
            if self.config.tokens_per_minute
            else None
        )

    # -- transport --

    def _complete(self, template: PromptTemplate, user_input: str) -> str:
        payload = {
            "model": self.config.model,
            "temperature": 0,
            "messages": template.render(user_input),
        }
        key = TranscriptStore.request_key(payload)
        if self.transcripts is not None and self.config.mode in ("replay", "auto"):
            response = self.transcripts.load(key)
            if response is not None:
                return response["choices"][0]["message"]["content"]
            if self.config.mode == "replay":
                raise TransportError(f"no transcript for request {key}")
        if self.budget is not None:
            self.budget.acquire(TokenBudget.estimate(payload))
        with self._gate:
            response = self._post(payload)
        if self.transcripts is not None:
            self.transcripts.save(key, payload, response)
        return response["choices"][0]["message"]["content"]

    def _post(self, payload: dict) -> dict:
        import requests

        try:
            http_response = requests.post(
                f"{self.config.api_base.rstrip('/')}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {self.config.api_key}"},
                timeout=self.config.timeout,
            )
            http_response.raise_for_status()
            return http_response.json()
        except requests.RequestException as exc:
            raise TransportError(str(exc))

    def _complete_json(self, template: PromptTemplate, user_input: str):
        """Parse the completion as JSON; one reformat retry, then reject."""
        raw = self._complete(template, user_input)
        try:
            return json.loads(raw)
        except json.JSONDecodeError:
            retry_input = (
                f"{user_input}\n\nYour previous answer was not valid JSON. "
                "Answer again with only a JSON document matching the schema."
            )
            raw = self._complete(template, retry_input)
            try:
                return json.loads(raw)
            except json.JSONDecodeError:
                raise SchemaError("malformed-llm-output")

    # -- capabilities --

    def extract_claims(self, doc, sentences, mentions):
        body = json.dumps(
            {
                "body": doc.body,
                "sentences": [{"index": s.index, "text": s.text} for s in sentences],
                "mentions": [{"sentence": m.sentence_index, "surface": m.surface} for m in mentions],
            },
            ensure_ascii=False,
        )
        parsed = self._complete_json(self._claims_template, body)
        if not isinstance(parsed, list):
            raise SchemaError("malformed-llm-output")
        candidates = []
        for item in parsed:
            candidate = RawClaimCandidate(
                doc_id=doc.id,
                sentence_refs=tuple(item.get("sentence_refs", ())),
                candidate_text=item["candidate_text"],
                subject_surface=item.get("subject_surface", ""),
                compound=bool(item.get("compound", False)),
            )
            self._grammar_cache[candidate.candidate_text] = _grammar_from_wire(item)
            candidates.append(candidate)
        return candidates

    def parse_grammar(self, candidate: RawClaimCandidate) -> GrammarParse:
        cached = self._grammar_cache.get(candidate.candidate_text)
        if cached is not None:
            return cached
        parsed = self._complete_json(self._claims_template, candidate.candidate_text)
        if isinstance(parsed, list):
            if not parsed:
                return GrammarParse(subject_surface=None)
            parsed = parsed[0]
        return _grammar_from_wire(parsed)

    def extract_profiles(self, doc, canonical_name):
        body = json.dumps({"subject": canonical_name, "body": doc.body}, ensure_ascii=False)
        parsed = self._complete_json(self._profiles_template, body)
        return (
            EntityProfile.from_dict(parsed.get("extracted_profile", {})),
            EntityProfile.from_dict(parsed.get("inferred_profile", {})),
        )

    def classify_stance(self, validity_text: str) -> StanceCall:
        parsed = self._complete_json(self._stances_template, validity_text)
        stance = Stance(parsed["stance"])
        confidence = parsed.get("confidence")
        return StanceCall(
            stance=stance,
            confidence=float(confidence) if confidence is not None else 0.5,
            rule="remote",
        )


def _grammar_from_wire(item: dict) -> GrammarParse:
    return GrammarParse(
        subject_surface=item.get("subject_surface") or None,
        claim_property=item.get("claim_property"),
        claim_effect=item.get("claim_effect"),
        claim_effect_type=tuple(item.get("claim_effect_type", ())),
        claim_mechanism=item.get("claim_mechanism"),
        claim_condition=item.get("claim_condition"),
        claim_intent=ClaimIntent(item.get("claim_intent", "fact")),
        claim_type=frozenset(ClaimTypeTag(t) for t in item.get("claim_type", ())),
        claim_text=item.get("claim_text"),
        context_fields=dict(item.get("context", {})),
    )


def with_retries(call, max_attempts: int = 3, backoff_base: float = 0.5):
    """Run a backend call with a bounded backoff budget.

    Raises the last TransportError once the budget is exhausted; callers
    mark the document extraction-failed and continue.
    """
    last: TransportError | None = None
    for attempt in range(max_attempts):
        try:
            return call()
        except TransportError as exc:
            last = exc
            if attempt < max_attempts - 1 and backoff_base > 0:
                time.sleep(backoff_base * (2**attempt))
    assert last is not None
    raise last
