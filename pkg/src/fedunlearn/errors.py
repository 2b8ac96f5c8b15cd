"""Exception types shared across the package."""


class FedUnlearnError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(FedUnlearnError, ValueError):
    """Shape or length mismatch between arrays that must agree."""


class InputError(FedUnlearnError, ValueError):
    """A value outside an operation's documented domain."""


class UsageError(FedUnlearnError, TypeError):
    """An API called with an inconsistent combination of arguments."""


class DegenerateFeatureError(FedUnlearnError, ValueError):
    """A feature vector has collapsed to (near-)zero norm."""


class ParseError(FedUnlearnError, ValueError):
    """Malformed external input (CSV row or config key); message names the location."""


class PartitionError(FedUnlearnError, RuntimeError):
    """Client partitioning could not produce the requested non-empty clients."""


class ConfigError(FedUnlearnError, ValueError):
    """Invalid or inconsistent run configuration."""


class IsolationError(FedUnlearnError, RuntimeError):
    """A retain-only phase was asked to touch the target client's data."""
