"""Exception types shared across the pipeline."""


class SchemaError(ValueError):
    """A record does not fit the wire format."""


class UnknownEnumError(SchemaError):
    """A closed enumeration received a value outside its set."""

    def __init__(self, field: str, value: object):
        super().__init__(f"{field}: unknown value {value!r}")
        self.field = field
        self.value = value


class ConfigError(RuntimeError):
    """Unusable configuration: missing file, empty lexicon, bad pattern."""


class QueryError(ValueError):
    """A graph query used an unknown filter key."""


class EvalInputError(ValueError):
    """Gold annotations reference documents outside the evaluated corpus."""

    def __init__(self, orphans):
        self.orphans = sorted(orphans)
        super().__init__(f"gold doc_ids missing from corpus: {', '.join(self.orphans)}")


class ReviewError(ValueError):
    """A review decision is invalid (immutable field edit, unknown claim)."""

    def __init__(self, code: str, message: str, field: str | None = None):
        super().__init__(message)
        self.code = code
        self.field = field


class TransportError(RuntimeError):
    """A remote extractor call failed; retryable up to the backoff budget."""
