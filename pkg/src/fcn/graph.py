"""Embedded triple store with N-Triples / Turtle export.

Records map to triples through one field table, so to_triples and
from_triples cannot drift apart: every populated wire field becomes at
least one triple and comes back on the return trip. The store is an
in-memory set with snapshot-to-disk (the snapshot is the canonical
N-Triples export); serialization orders triples lexicographically so
exports are byte-stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import QueryError, SchemaError
from .ids import Identifier
from .model import (
    ClaimContext,
    FoodClaim,
    FoodEntity,
    SourceDocument,
    ValidatingSource,
    check_claim_invariants,
    check_validating_source_invariants,
)

DEFAULT_NAMESPACE = "https://fcn.example.org/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
XSD = "http://www.w3.org/2001/XMLSchema#"
XSD_STRING = XSD + "string"
XSD_DATETIME = XSD + "dateTime"
XSD_DOUBLE = XSD + "double"


@dataclass(frozen=True, order=True)
class Literal:
    value: str
    datatype: str = XSD_STRING


@dataclass(frozen=True, order=True)
class Triple:
    subject: str
    predicate: str
    object: "str | Literal"


@dataclass(frozen=True)
class Vocabulary:
    """The published FCN term set under a configurable namespace."""

    namespace: str = DEFAULT_NAMESPACE

    @property
    def vocab_base(self) -> str:
        return self.namespace + "vocab#"

    @property
    def id_base(self) -> str:
        return self.namespace + "id/"

    def term(self, name: str) -> str:
        return self.vocab_base + name

    def iri_for(self, identifier: Identifier | str) -> str:
        value = identifier.value if isinstance(identifier, Identifier) else identifier
        return self.id_base + value

    def identifier_from(self, iri: str) -> Identifier:
        if not iri.startswith(self.id_base):
            raise SchemaError(f"IRI outside the instance namespace: {iri}")
        return Identifier.from_string(iri[len(self.id_base):])


# Field kinds drive both directions of the record<->triple mapping.
_STR, _IDENT, _DATETIME, _FLOAT, _LIST_STR, _LIST_IDENT = range(6)

# (wire path, vocabulary term, kind); nested paths flatten profile fields.
_FIELD_SPECS: dict[str, list[tuple[tuple[str, ...], str, int]]] = {
    "ClaimSource": [
        (("origin_url",), "originUrl", _STR),
        (("platform",), "platform", _STR),
        (("author",), "author", _STR),
        (("retrieved_at",), "retrievedAt", _DATETIME),
        (("published_at",), "publishedAt", _DATETIME),
        (("title",), "title", _STR),
        (("body",), "body", _STR),
        (("raw_body",), "rawBody", _STR),
        (("language_tag",), "languageTag", _STR),
        (("credibility_tier",), "credibilityTier", _STR),
        (("primary_entity_id",), "primaryEntity", _IDENT),
    ],
    "FoodEntity": [
        (("canonical_name",), "canonicalName", _STR),
        (("classification",), "classification", _STR),
        (("fkg_link",), "fkgLink", _STR),
        (("extracted_profile", "category"), "extractedCategory", _STR),
        (("extracted_profile", "description"), "extractedDescription", _STR),
        (("extracted_profile", "group"), "extractedGroup", _STR),
        (("extracted_profile", "alternate_names"), "extractedAlternateName", _LIST_STR),
        (("extracted_profile", "scientific_name"), "extractedScientificName", _STR),
        (("extracted_profile", "nutritional_value"), "extractedNutritionalValue", _STR),
        (("extracted_profile", "regions_of_production"), "extractedRegionOfProduction", _LIST_STR),
        (("extracted_profile", "varieties"), "extractedVariety", _LIST_STR),
        (("inferred_profile", "category"), "inferredCategory", _STR),
        (("inferred_profile", "description"), "inferredDescription", _STR),
        (("inferred_profile", "group"), "inferredGroup", _STR),
        (("inferred_profile", "alternate_names"), "inferredAlternateName", _LIST_STR),
        (("inferred_profile", "scientific_name"), "inferredScientificName", _STR),
        (("inferred_profile", "nutritional_value"), "inferredNutritionalValue", _STR),
        (("inferred_profile", "regions_of_production"), "inferredRegionOfProduction", _LIST_STR),
        (("inferred_profile", "varieties"), "inferredVariety", _LIST_STR),
    ],
    "FoodClaim": [
        (("claim_text",), "claimText", _STR),
        (("claim_subject", "entity_id"), "claimSubject", _IDENT),
        (("claim_subject", "surface"), "claimSubjectSurface", _STR),
        (("claim_property",), "claimProperty", _STR),
        (("claim_effect",), "claimEffect", _STR),
        (("claim_effect_type",), "claimEffectType", _LIST_STR),
        (("claim_mechanism",), "claimMechanism", _STR),
        (("claim_condition",), "claimCondition", _STR),
        (("claim_intent",), "claimIntent", _STR),
        (("claim_type",), "claimType", _LIST_STR),
        (("claim_validity_status",), "claimValidityStatus", _STR),
        (("source_id",), "claimSource", _IDENT),
        (("merged_source_ids",), "mergedClaimSource", _LIST_IDENT),
        (("context_id",), "claimContext", _IDENT),
        (("raw_snippet",), "rawSnippet", _STR),
        (("extraction_backend",), "extractionBackend", _STR),
        (("extracted_at",), "extractedAt", _DATETIME),
        (("review_state",), "reviewState", _STR),
    ],
    "ClaimContext": [
        (("geography",), "geography", _LIST_STR),
        (("culture",), "culture", _LIST_STR),
        (("temporal",), "temporal", _STR),
        (("epistemic_frame",), "epistemicFrame", _STR),
    ],
    "ValidatingSource": [
        (("claim_id",), "validatesClaim", _IDENT),
        (("stance",), "stance", _STR),
        (("validity_text",), "validityText", _STR),
        (("medium",), "medium", _STR),
        (("speaker",), "speaker", _STR),
        (("organization",), "organization", _STR),
        (("source_url",), "sourceUrl", _STR),
        (("confidence",), "confidence", _FLOAT),
    ],
}

_CLASS_FOR_TYPE = {
    SourceDocument: "ClaimSource",
    FoodEntity: "FoodEntity",
    FoodClaim: "FoodClaim",
    ClaimContext: "ClaimContext",
    ValidatingSource: "ValidatingSource",
}

_TYPE_FOR_CLASS = {
    "ClaimSource": SourceDocument,
    "FoodEntity": FoodEntity,
    "FoodClaim": FoodClaim,
    "ClaimContext": ClaimContext,
    "ValidatingSource": ValidatingSource,
}

GRAPH_CLASSES = tuple(sorted(_TYPE_FOR_CLASS))


def vocabulary_terms() -> dict[str, list[str]]:
    """The published term list, one entry per ontology field, per class."""
    return {cls: [term for _, term, _ in specs] for cls, specs in _FIELD_SPECS.items()}


def _dig(data: Mapping, path: tuple[str, ...]):
    current: Any = data
    for part in path:
        if not isinstance(current, Mapping) or part not in current:
            return None
        current = current[part]
    return current


def to_triples(record, vocab: Vocabulary | None = None) -> list[Triple]:
    """Lossless mapping of one schema-valid record into triples.

    Every populated field yields at least one triple, list fields one per
    element, plus the class-membership triple. Unvalidated records are
    rejected — validate before ingesting.
    """
    vocab = vocab or Vocabulary()
    class_name = _CLASS_FOR_TYPE.get(type(record))
    if class_name is None:
        raise SchemaError(f"not a graph record type: {type(record).__name__}")
    _reject_invalid(record)
    data = record.to_dict()
    subject = vocab.iri_for(data["id"])
    triples = [Triple(subject, RDF_TYPE, vocab.term(class_name))]
    for path, term, kind in _FIELD_SPECS[class_name]:
        value = _dig(data, path)
        if value is None or value == [] or value == "":
            continue
        predicate = vocab.term(term)
        if kind == _STR:
            triples.append(Triple(subject, predicate, Literal(str(value))))
        elif kind == _IDENT:
            triples.append(Triple(subject, predicate, vocab.iri_for(value)))
        elif kind == _DATETIME:
            triples.append(Triple(subject, predicate, Literal(str(value), XSD_DATETIME)))
        elif kind == _FLOAT:
            triples.append(Triple(subject, predicate, Literal(repr(float(value)), XSD_DOUBLE)))
        elif kind == _LIST_STR:
            for item in value:
                triples.append(Triple(subject, predicate, Literal(str(item))))
        elif kind == _LIST_IDENT:
            for item in value:
                triples.append(Triple(subject, predicate, vocab.iri_for(item)))
    return triples


def _reject_invalid(record) -> None:
    if isinstance(record, FoodClaim):
        report = check_claim_invariants(record, validations=None)
        if report.violations:
            codes = ", ".join(v.code for v in report.violations)
            raise SchemaError(f"unvalidated claim {record.id.value}: {codes}")
    elif isinstance(record, ValidatingSource):
        report = check_validating_source_invariants(record, {record.claim_id})
        if report.violations:
            codes = ", ".join(v.code for v in report.violations)
            raise SchemaError(f"unvalidated validation {record.id.value}: {codes}")


def from_triples(triples: Iterable[Triple], vocab: Vocabulary | None = None):
    """Rebuild the record(s) described by a triple set.

    Returns one record when the set describes a single subject, else a
    list ordered by identifier.
    """
    vocab = vocab or Vocabulary()
    by_subject: dict[str, list[Triple]] = {}
    for triple in triples:
        by_subject.setdefault(triple.subject, []).append(triple)
    records = []
    for subject in sorted(by_subject):
        record = _record_from_subject(subject, by_subject[subject], vocab)
        if record is not None:
            records.append(record)
    if len(records) == 1:
        return records[0]
    return records


def _record_from_subject(subject: str, triples: list[Triple], vocab: Vocabulary):
    class_name = None
    for triple in triples:
        if triple.predicate == RDF_TYPE and isinstance(triple.object, str):
            name = triple.object[len(vocab.vocab_base):] if triple.object.startswith(vocab.vocab_base) else None
            if name in _TYPE_FOR_CLASS:
                class_name = name
                break
    if class_name is None:
        return None
    by_predicate: dict[str, list] = {}
    for triple in triples:
        if triple.predicate != RDF_TYPE:
            by_predicate.setdefault(triple.predicate, []).append(triple.object)

    data: dict[str, Any] = {"id": vocab.identifier_from(subject).value}
    for path, term, kind in _FIELD_SPECS[class_name]:
        objects = by_predicate.get(vocab.term(term))
        if not objects:
            continue
        if kind in (_LIST_STR, _LIST_IDENT):
            if kind == _LIST_STR:
                values = sorted(o.value for o in objects if isinstance(o, Literal))
            else:
                values = sorted(
                    vocab.identifier_from(o).value for o in objects if isinstance(o, str)
                )
            _plant(data, path, values)
        else:
            obj = objects[0]
            if kind == _IDENT:
                _plant(data, path, vocab.identifier_from(obj).value)
            elif kind == _FLOAT:
                _plant(data, path, float(obj.value))
            else:
                _plant(data, path, obj.value)
    return _TYPE_FOR_CLASS[class_name].from_dict(data)


def _plant(data: dict, path: tuple[str, ...], value) -> None:
    current = data
    for part in path[:-1]:
        current = current.setdefault(part, {})
    current[path[-1]] = value


# ── Statistics ────────────────────────────────────────────────────────


@dataclass
class GraphStats:
    node_count: int = 0
    edge_count: int = 0
    per_class: dict = field(default_factory=dict)
    per_predicate: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "per_class": dict(sorted(self.per_class.items())),
            "per_predicate": dict(sorted(self.per_predicate.items())),
        }


# ── The store ─────────────────────────────────────────────────────────


class TripleStore:
    """Single-writer, multi-reader embedded store with set semantics."""

    def __init__(self, vocab: Vocabulary | None = None):
        self.vocab = vocab or Vocabulary()
        self._triples: set[Triple] = set()

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def triples(self) -> list[Triple]:
        return sorted(self._triples, key=_triple_sort_key)

    def ingest(self, triples: Iterable[Triple]) -> GraphStats:
        """Add triples; re-ingesting is a no-op. Returns the stats delta
        (only newly added edges/nodes/classes count)."""
        incoming = set(triples)
        fresh = incoming - self._triples
        nodes_before = self._nodes()
        staged = self._triples | fresh
        delta = GraphStats()
        delta.edge_count = len(fresh)
        nodes_after = _nodes_of(staged)
        delta.node_count = len(nodes_after - nodes_before)
        for triple in fresh:
            if triple.predicate == RDF_TYPE and isinstance(triple.object, str):
                name = self._class_name(triple.object)
                if name:
                    delta.per_class[name] = delta.per_class.get(name, 0) + 1
            term = self._term_name(triple.predicate)
            delta.per_predicate[term] = delta.per_predicate.get(term, 0) + 1
        self._triples = staged
        return delta

    def _class_name(self, iri: str) -> str | None:
        if iri.startswith(self.vocab.vocab_base):
            name = iri[len(self.vocab.vocab_base):]
            if name in _TYPE_FOR_CLASS:
                return name
        return None

    def _term_name(self, predicate: str) -> str:
        if predicate == RDF_TYPE:
            return "rdf:type"
        if predicate.startswith(self.vocab.vocab_base):
            return predicate[len(self.vocab.vocab_base):]
        return predicate

    def _nodes(self) -> set[str]:
        return _nodes_of(self._triples)

    def stats(self) -> GraphStats:
        stats = GraphStats()
        stats.edge_count = len(self._triples)
        stats.node_count = len(self._nodes())
        for triple in self._triples:
            if triple.predicate == RDF_TYPE and isinstance(triple.object, str):
                name = self._class_name(triple.object)
                if name:
                    stats.per_class[name] = stats.per_class.get(name, 0) + 1
            term = self._term_name(triple.predicate)
            stats.per_predicate[term] = stats.per_predicate.get(term, 0) + 1
        for name in GRAPH_CLASSES:
            stats.per_class.setdefault(name, 0)
        return stats

    # -- record materialization --

    def records(self, class_name: str | None = None) -> list:
        by_subject: dict[str, list[Triple]] = {}
        for triple in self._triples:
            by_subject.setdefault(triple.subject, []).append(triple)
        records = []
        for subject in sorted(by_subject):
            record = _record_from_subject(subject, by_subject[subject], self.vocab)
            if record is None:
                continue
            if class_name and _CLASS_FOR_TYPE[type(record)] != class_name:
                continue
            records.append(record)
        return records

    def record(self, identifier: Identifier | str):
        subject = self.vocab.iri_for(identifier)
        triples = [t for t in self._triples if t.subject == subject]
        if not triples:
            return None
        return _record_from_subject(subject, triples, self.vocab)

    def replace_record(self, record) -> None:
        """Swap every triple of one subject for the record's fresh set."""
        subject = self.vocab.iri_for(record.to_dict()["id"])
        self._triples = {t for t in self._triples if t.subject != subject}
        self._triples.update(to_triples(record, self.vocab))

    def query(self, pattern: Mapping[str, str]) -> list:
        """Exact-match conjunctive filtering, materialized to records,
        ordered by identifier. Unknown filter keys raise QueryError."""
        known = {"class", "subject_entity", "effect_type", "stance", "validity_status", "claim_type"}
        unknown = set(pattern) - known
        if unknown:
            raise QueryError(f"unknown filter keys: {', '.join(sorted(unknown))}")
        if "class" in pattern and pattern["class"] not in _TYPE_FOR_CLASS:
            raise QueryError(f"unknown class: {pattern['class']}")
        results = []
        for record in self.records(pattern.get("class")):
            if _matches(record, pattern):
                results.append(record)
        results.sort(key=lambda r: r.to_dict()["id"])
        return results

    def check_referential_closure(self) -> list[str]:
        """ValidatingSource claim refs that lack an in-store class triple."""
        claim_subjects = {
            t.subject
            for t in self._triples
            if t.predicate == RDF_TYPE and t.object == self.vocab.term("FoodClaim")
        }
        missing = []
        validates = self.vocab.term("validatesClaim")
        for triple in self._triples:
            if triple.predicate == validates and triple.object not in claim_subjects:
                missing.append(f"{triple.subject} -> {triple.object}")
        return sorted(missing)

    # -- serialization --

    def serialize(self, format: str = "ntriples") -> str:
        if format == "ntriples":
            return serialize_ntriples(self.triples())
        if format == "turtle":
            return serialize_turtle(self.triples(), self.vocab)
        raise QueryError(f"unknown serialization format: {format}")

    def save(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(self.serialize("ntriples"), encoding="utf-8")
        tmp.replace(path)

    @classmethod
    def load(cls, path: str | Path, vocab: Vocabulary | None = None) -> "TripleStore":
        store = cls(vocab)
        text = Path(path).read_text(encoding="utf-8")
        store.ingest(parse_ntriples(text))
        return store


def _nodes_of(triples: set[Triple]) -> set[str]:
    nodes: set[str] = set()
    for t in triples:
        nodes.add(t.subject)
        if isinstance(t.object, str):
            nodes.add(t.object)
    return nodes


def _matches(record, pattern: Mapping[str, str]) -> bool:
    for key, wanted in pattern.items():
        if key == "class":
            continue
        if key == "subject_entity":
            if not isinstance(record, FoodClaim) or record.claim_subject is None:
                return False
            if record.claim_subject.entity_id.value != wanted:
                return False
        elif key == "effect_type":
            if not isinstance(record, FoodClaim) or wanted not in record.claim_effect_type:
                return False
        elif key == "stance":
            if not isinstance(record, ValidatingSource) or record.stance.value != wanted:
                return False
        elif key == "validity_status":
            if not isinstance(record, FoodClaim) or record.claim_validity_status.value != wanted:
                return False
        elif key == "claim_type":
            if not isinstance(record, FoodClaim):
                return False
            if wanted not in {t.value for t in record.claim_type}:
                return False
    return True


def _triple_sort_key(triple: Triple) -> tuple[str, str, str]:
    return (triple.subject, triple.predicate, _object_key(triple.object))


def _object_key(obj) -> str:
    if isinstance(obj, Literal):
        return f'"{obj.value}"^^{obj.datatype}'
    return f"<{obj}>"


# ── N-Triples ─────────────────────────────────────────────────────────

_NT_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_literal(value: str) -> str:
    out = []
    for ch in value:
        out.append(_NT_ESCAPES.get(ch, ch))
    return "".join(out)


def _unescape_literal(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\" and i + 1 < len(value):
            nxt = value[i + 1]
            mapped = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
            if nxt == "u" and i + 6 <= len(value):
                out.append(chr(int(value[i + 2 : i + 6], 16)))
                i += 6
                continue
            if nxt == "U" and i + 10 <= len(value):
                out.append(chr(int(value[i + 2 : i + 10], 16)))
                i += 10
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def _render_object_nt(obj) -> str:
    if isinstance(obj, Literal):
        rendered = f'"{_escape_literal(obj.value)}"'
        if obj.datatype != XSD_STRING:
            rendered += f"^^<{obj.datatype}>"
        return rendered
    return f"<{obj}>"


def serialize_ntriples(triples: Sequence[Triple]) -> str:
    lines = [
        f"<{t.subject}> <{t.predicate}> {_render_object_nt(t.object)} ."
        for t in sorted(triples, key=_triple_sort_key)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_ntriples(text: str) -> list[Triple]:
    triples = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        triples.append(_parse_nt_line(line, line_no))
    return triples


def _parse_nt_line(line: str, line_no: int) -> Triple:
    pos = 0

    def fail(msg: str):
        raise SchemaError(f"N-Triples line {line_no}: {msg}")

    def skip_ws():
        nonlocal pos
        while pos < len(line) and line[pos] in " \t":
            pos += 1

    def read_iri() -> str:
        nonlocal pos
        if pos >= len(line) or line[pos] != "<":
            fail(f"expected IRI at column {pos}")
        end = line.find(">", pos)
        if end == -1:
            fail("unterminated IRI")
        iri = line[pos + 1 : end]
        pos = end + 1
        return iri

    subject = read_iri()
    skip_ws()
    predicate = read_iri()
    skip_ws()
    obj: str | Literal
    if pos < len(line) and line[pos] == "<":
        obj = read_iri()
    elif pos < len(line) and line[pos] == '"':
        end = pos + 1
        while end < len(line):
            if line[end] == "\\":
                end += 2
                continue
            if line[end] == '"':
                break
            end += 1
        if end >= len(line):
            fail("unterminated literal")
        raw = line[pos + 1 : end]
        pos = end + 1
        datatype = XSD_STRING
        if line[pos : pos + 2] == "^^":
            pos += 2
            datatype = read_iri()
        obj = Literal(_unescape_literal(raw), datatype)
    else:
        fail(f"expected object at column {pos}")
    skip_ws()
    if pos >= len(line) or line[pos] != ".":
        fail("missing terminating period")
    return Triple(subject, predicate, obj)


# ── Turtle ────────────────────────────────────────────────────────────


def serialize_turtle(triples: Sequence[Triple], vocab: Vocabulary) -> str:
    prefixes = {
        "fcn": vocab.vocab_base,
        "fcnid": vocab.id_base,
        "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
        "xsd": XSD,
    }
    lines = [f"@prefix {name}: <{iri}> ." for name, iri in prefixes.items()]
    if triples:
        lines.append("")

    def shorten(iri: str) -> str:
        for name, base in prefixes.items():
            if iri.startswith(base) and _PN_LOCAL.fullmatch(iri[len(base):]):
                return f"{name}:{iri[len(base):]}"
        return f"<{iri}>"

    def render_object(obj) -> str:
        if isinstance(obj, Literal):
            rendered = f'"{_escape_literal(obj.value)}"'
            if obj.datatype != XSD_STRING:
                rendered += f"^^{shorten(obj.datatype)}"
            return rendered
        return shorten(obj)

    by_subject: dict[str, list[Triple]] = {}
    for triple in triples:
        by_subject.setdefault(triple.subject, []).append(triple)
    blocks = []
    for subject in sorted(by_subject):
        group = by_subject[subject]
        predicates: dict[str, list] = {}
        for triple in group:
            predicates.setdefault(triple.predicate, []).append(triple.object)
        ordered = sorted(predicates, key=lambda p: (p != RDF_TYPE, p))
        parts = []
        for predicate in ordered:
            shown = "a" if predicate == RDF_TYPE else shorten(predicate)
            objects = ", ".join(
                render_object(o) for o in sorted(predicates[predicate], key=_object_key)
            )
            parts.append(f"    {shown} {objects}")
        blocks.append(f"{shorten(subject)}\n" + " ;\n".join(parts) + " .")
    lines.extend(blocks)
    return "\n".join(lines) + "\n"


_PN_LOCAL = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.-]*")


def parse_turtle(text: str) -> list[Triple]:
    """Parse the Turtle subset this package emits."""
    tokens = _tokenize_turtle(text)
    prefixes: dict[str, str] = {}
    triples: list[Triple] = []
    i = 0

    def resolve(token: str) -> str:
        if token.startswith("<"):
            return token[1:-1]
        if token == "a":
            return RDF_TYPE
        name, _, local = token.partition(":")
        if name not in prefixes:
            raise SchemaError(f"unknown prefix in {token!r}")
        return prefixes[name] + local

    def resolve_object(token: str):
        if token.startswith('"'):
            value, _, datatype = token[1:].rpartition('"')
            datatype = datatype[2:] if datatype.startswith("^^") else ""
            dt_iri = XSD_STRING
            if datatype:
                dt_iri = resolve(datatype)
            return Literal(_unescape_literal(value), dt_iri)
        return resolve(token)

    while i < len(tokens):
        token = tokens[i]
        if token == "@prefix":
            name = tokens[i + 1].rstrip(":")
            prefixes[name] = tokens[i + 2][1:-1]
            if tokens[i + 3] != ".":
                raise SchemaError("@prefix line missing period")
            i += 4
            continue
        subject = resolve(token)
        i += 1
        while True:
            predicate = resolve(tokens[i])
            i += 1
            while True:
                triples.append(Triple(subject, predicate, resolve_object(tokens[i])))
                i += 1
                if tokens[i] == ",":
                    i += 1
                    continue
                break
            if tokens[i] == ";":
                i += 1
                continue
            if tokens[i] == ".":
                i += 1
                break
            raise SchemaError(f"unexpected token {tokens[i]!r}")
    return triples


def _tokenize_turtle(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in " \t\n\r":
            i += 1
            continue
        if ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch == "<":
            end = text.find(">", i)
            if end == -1:
                raise SchemaError("unterminated IRI")
            tokens.append(text[i : end + 1])
            i = end + 1
            continue
        if ch == '"':
            end = i + 1
            while end < len(text):
                if text[end] == "\\":
                    end += 2
                    continue
                if text[end] == '"':
                    break
                end += 1
            if end >= len(text):
                raise SchemaError("unterminated literal")
            token = text[i : end + 1]
            i = end + 1
            if text[i : i + 2] == "^^":
                start = i
                i += 2
                if text[i] == "<":
                    close = text.find(">", i)
                    i = close + 1
                else:
                    while i < len(text) and text[i] not in " \t\n\r;,.":
                        i += 1
                token += text[start:i]
            tokens.append(token)
            continue
        if ch in ";,.":
            tokens.append(ch)
            i += 1
            continue
        start = i
        while i < len(text) and text[i] not in " \t\n\r;,":
            # A period terminates a statement only when followed by
            # whitespace/end; prefixed names may contain dots.
            if text[i] == "." and (i + 1 >= len(text) or text[i + 1] in " \t\n\r"):
                break
            i += 1
        tokens.append(text[start:i])
    return tokens


# ── Batch ingestion of wire records ───────────────────────────────────


def ingest_records(store: TripleStore, records: Iterable) -> GraphStats:
    batch: list[Triple] = []
    for record in records:
        batch.extend(to_triples(record, store.vocab))
    return store.ingest(batch)


def export_claimreview(store: TripleStore):
    """Interop hook for the schema.org ClaimReview format.

    Deliberately unimplemented: the mapping is planned but not specified,
    so this raises rather than emitting a lossy approximation.
    """
    raise NotImplementedError(
        "ClaimReview export is a planned interoperability hook; "
        "use ntriples/turtle/jsonl exports instead"
    )
