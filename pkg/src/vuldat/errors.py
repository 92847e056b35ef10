"""Exception hierarchy shared across the pipeline.

Split by failure domain so the CLI can map them onto its exit-code
contract: usage/configuration problems exit 1, data problems exit 2,
backend transport problems exit 3.
"""


class VuldatError(Exception):
    """Base class for all vuldat errors."""


class ConfigurationError(VuldatError):
    """Bad run configuration: unknown format tag, model mismatch, bad flag combos."""


class DataError(VuldatError):
    """Invalid or inconsistent data encountered at runtime."""


class ParseError(DataError):
    """A feed document could not be parsed.

    ``offset`` is the character offset into the document when the
    underlying parser reports one, else None.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)
        self.offset = offset


class ValidationError(DataError):
    """A record or snapshot violates its declared invariants."""


class SchemaVersionError(DataError):
    """Persisted artifact carries an unsupported schema version."""


class CorruptStoreError(DataError):
    """Embedding store files are inconsistent (header/payload mismatch, truncation)."""


class ConsistencyError(DataError):
    """Two artifacts that must describe the same data set do not."""


class DegenerateInputError(DataError):
    """Numerically meaningless input, e.g. cosine of a zero vector."""


class TransportError(VuldatError):
    """Remote embedding backend unreachable or misbehaving.

    Carries how many attempts were made so callers can report retry state.
    """

    def __init__(self, message: str, attempts: int = 1):
        super().__init__(f"{message} (after {attempts} attempt{'s' if attempts != 1 else ''})")
        self.attempts = attempts


class ProtocolError(TransportError):
    """Remote backend answered, but the payload violates the wire contract."""
