"""Deterministic, content-addressed identifiers for all graph records.

An identifier is minted from (kind, canonical key): the same pair always
yields the same value, on any machine, so re-running a pipeline is
idempotent. The kind is encoded as a prefix, which keeps values unique
across kinds and makes them self-describing in exports.
"""

from __future__ import annotations

import base64
import hashlib
import re
from dataclasses import dataclass
from enum import Enum


class IdentifierKind(str, Enum):
    ENTITY = "entity"
    CLAIM = "claim"
    SOURCE = "source"
    CONTEXT = "context"
    VALIDATION = "validation"
    DOCUMENT = "document"


_HASH_CHARS = 16  # 80 bits of sha256, plenty at corpus scale
_WS = re.compile(r"\s+")


def canonical_key(text: str) -> str:
    """Casefold and collapse whitespace; the canonical form fed to minting."""
    return _WS.sub(" ", text).strip().casefold()


@dataclass(frozen=True, order=True)
class Identifier:
    kind: IdentifierKind
    value: str

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_string(cls, value: str) -> "Identifier":
        prefix = value.split("-", 1)[0]
        try:
            kind = IdentifierKind(prefix)
        except ValueError:
            raise ValueError(f"identifier has no known kind prefix: {value!r}")
        return cls(kind=kind, value=value)


def mint_identifier(kind: IdentifierKind, canonical: str) -> Identifier:
    """Mint the persistent identifier for a canonicalized key.

    The key must already be canonical (see ``canonical_key``); an empty key
    is a caller bug and raises.
    """
    if not canonical:
        raise ValueError("cannot mint an identifier from an empty key")
    digest = hashlib.sha256(f"{kind.value}|{canonical}".encode("utf-8")).digest()
    tag = base64.b32encode(digest).decode("ascii").lower().rstrip("=")[:_HASH_CHARS]
    return Identifier(kind=kind, value=f"{kind.value}-{tag}")
