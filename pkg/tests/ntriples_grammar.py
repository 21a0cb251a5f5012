"""Standalone N-Triples acceptor written from the W3C EBNF productions.

Shares no code with fcn.graph — this is the independent side of the
serializer/parser dual route. Each grammar production below is a direct
regex transliteration of the published EBNF (N-Triples, RDF 1.1):

    ntriplesDoc ::= triple? (EOL triple)* EOL?
    triple      ::= subject predicate object '.'
    subject     ::= IRIREF | BLANK_NODE_LABEL
    predicate   ::= IRIREF
    object      ::= IRIREF | BLANK_NODE_LABEL | literal
    literal     ::= STRING_LITERAL_QUOTE ('^^' IRIREF | LANGTAG)?
"""

from __future__ import annotations

import re

# IRIREF ::= '<' ([^#x00-#x20<>"{}|^`\] | UCHAR)* '>'
_UCHAR = r"(?:\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})"
_IRIREF = rf"<(?:[^\x00-\x20<>\"{{}}|^`\\]|{_UCHAR})*>"

# ECHAR ::= '\' [tbnrf"'\]
_ECHAR = r"\\[tbnrf\"'\\]"

# STRING_LITERAL_QUOTE ::= '"' ([^#x22#x5C#xA#xD] | ECHAR | UCHAR)* '"'
_STRING = rf'"(?:[^\x22\x5C\x0A\x0D]|{_ECHAR}|{_UCHAR})*"'

# LANGTAG ::= '@' [a-zA-Z]+ ('-' [a-zA-Z0-9]+)*
_LANGTAG = r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*"

# BLANK_NODE_LABEL (simplified to the PN_CHARS subset used in practice)
_BNODE = r"_:[A-Za-z0-9][A-Za-z0-9._-]*"

_LITERAL = rf"{_STRING}(?:\^\^{_IRIREF}|{_LANGTAG})?"
_SUBJECT = rf"(?:{_IRIREF}|{_BNODE})"
_OBJECT = rf"(?:{_IRIREF}|{_BNODE}|{_LITERAL})"

_TRIPLE = re.compile(
    rf"^[ \t]*{_SUBJECT}[ \t]+{_IRIREF}[ \t]+{_OBJECT}[ \t]*\.[ \t]*$"
)
_COMMENT = re.compile(r"^[ \t]*(#.*)?$")


def accept_ntriples(document: str) -> list[str]:
    """Return the list of grammar violations (empty = accepted)."""
    violations = []
    for line_no, line in enumerate(document.split("\n"), start=1):
        if _COMMENT.match(line):
            continue
        if not _TRIPLE.match(line):
            violations.append(f"line {line_no}: not a valid triple: {line[:120]!r}")
    return violations


def count_triples(document: str) -> int:
    return sum(
        1
        for line in document.split("\n")
        if not _COMMENT.match(line) and _TRIPLE.match(line)
    )
