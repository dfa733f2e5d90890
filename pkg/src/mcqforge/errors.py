"""Exception hierarchy shared across the pipeline."""


class McqForgeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(McqForgeError):
    """Input file is not syntactically valid (carries a location hint)."""


class SchemaError(McqForgeError):
    """Input file parsed but a required field is missing or malformed."""


class ValidationError(McqForgeError):
    """An argument violates an operation's contract."""


class VocabError(McqForgeError):
    """Vocabulary or merges file is inconsistent."""


class TokenizerError(McqForgeError):
    """Text cannot be encoded with the loaded vocabulary."""


class DecodeError(McqForgeError):
    """A token id is unknown to the vocabulary."""


class ConfigError(McqForgeError):
    """A configuration value is out of range or inconsistent."""


class SamplingError(McqForgeError):
    """No token is selectable after filtering the distribution."""


class GenerationError(McqForgeError):
    """The generation loop failed (backend failure or empty output)."""


class MaxRetriesExceeded(GenerationError):
    """Retry budget exhausted; carries the partial distractor set."""

    def __init__(self, message: str, partial: list[str] | None = None):
        super().__init__(message)
        self.partial = list(partial or [])


class ReplayError(McqForgeError):
    """A scripted backend ran out of canned entries."""


class BackendError(McqForgeError):
    """Remote backend failure; carries the number of attempts made."""

    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class BackendTimeout(BackendError):
    """The backend did not answer within the configured timeout."""


class BackendStatusError(BackendError):
    """The backend answered with a non-2xx status."""

    def __init__(self, message: str, status: int, attempts: int = 1):
        super().__init__(message, attempts)
        self.status = status


class BackendProtocolError(BackendError):
    """The backend answered 2xx but the body does not match the protocol."""


class PlanningError(McqForgeError):
    """An assignment plan cannot be built from the given pools."""


class DegenerateDistributionError(McqForgeError):
    """All ratings fall into a single category; kappa is undefined."""


class DuplicateRatingError(McqForgeError):
    """A second rating for the same (assessor, item) pair was submitted."""
