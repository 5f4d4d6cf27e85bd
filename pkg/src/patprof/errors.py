"""Exception hierarchy shared across the package."""


class PatprofError(Exception):
    """Base class for all errors raised by patprof."""


class ConfigError(PatprofError):
    """Malformed atom configuration or invalid parameters."""


class IngestError(PatprofError):
    """The input dataset could not be read."""


class LearningCapacityError(PatprofError):
    """The learner exceeded its state budget."""


class DescribesError(PatprofError, ValueError):
    """A pattern was asked to score a string it does not describe."""


class StaleCacheError(PatprofError):
    """A hierarchy cache does not belong to the current dataset or universe."""


class OracleLimitError(PatprofError):
    """A brute-force oracle was called outside its supported limits."""
