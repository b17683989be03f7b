"""Exception types shared across the toolkit.

Grouped by the layer that raises them; all inherit from WebPerceptError so
callers can catch the whole family at once.
"""

from __future__ import annotations


class WebPerceptError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(WebPerceptError):
    """A configuration file or value is invalid."""


# --- HTML ingestion ---------------------------------------------------------


class EncodingError(WebPerceptError):
    """Input bytes declare a charset that cannot be decoded at all."""


# --- DOM transduction -------------------------------------------------------


class EmptyTask(WebPerceptError):
    """Lexical scoring was requested but the task yields no keywords."""


class SummarizerError(WebPerceptError):
    """A summarizer implementation failed or violated its contract."""


class AbbreviationSyntaxError(WebPerceptError):
    """Malformed compact-encoding abbreviation.

    ``position`` is the 0-based character offset of the offending input.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


# --- Thing Description parsing ----------------------------------------------


class JsonError(WebPerceptError):
    """Input document is not syntactically valid JSON."""


class TdError(WebPerceptError):
    """Thing Description cannot be turned into a usable catalog."""


class IdMismatch(WebPerceptError):
    """Catalog diff attempted across two different thing ids."""


class UnresolvableHref(WebPerceptError):
    """Relative form href with no base or fetch origin to resolve against."""


# --- Networking -------------------------------------------------------------


class NetworkError(WebPerceptError):
    """Connection failed, was refused, or timed out."""


class ProtocolError(WebPerceptError):
    """The peer answered, but outside the expected contract."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class BodyTooLarge(WebPerceptError):
    """Response body exceeded the configured byte limit."""


class UnsupportedScheme(WebPerceptError):
    """URL scheme is outside the http/https subset this client speaks."""


# --- Protocol interactions --------------------------------------------------


class NoSuchAffordance(WebPerceptError):
    """Named property/action/event does not exist in the catalog."""


class NoSupportedBinding(WebPerceptError):
    """Affordance is cataloged but exposes no http(s) form for the verb."""


class SchemaMismatch(WebPerceptError):
    """Value does not satisfy the declared data schema."""

    def __init__(self, expected: str, observed: str, path: str = ""):
        detail = f"expected {expected}, observed {observed}"
        if path:
            detail += f" at {path}"
        super().__init__(detail)
        self.expected = expected
        self.observed = observed
        self.path = path


class ReadOnly(WebPerceptError):
    """Write attempted on a read-only property."""


class WriteOnly(WebPerceptError):
    """Read attempted on a write-only property."""


class UnsupportedOperation(WebPerceptError):
    """Operation is recognized in the data model but has no transport."""


# --- Cognitive map ----------------------------------------------------------


class MissingOrigin(WebPerceptError):
    """Percept carries no origin key to file it under."""


class SchemaVersionMismatch(WebPerceptError):
    """Persisted map file uses a schema version this build cannot read."""


class CorruptFile(WebPerceptError):
    """Persisted map file is unreadable.

    ``offset`` is the approximate character offset where decoding failed.
    """

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


# --- Simulated environment --------------------------------------------------


class PortUnavailable(WebPerceptError):
    """Requested listen port is already taken."""
