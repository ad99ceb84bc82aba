"""Exception types raised by the parseid engine."""


class ParseidError(Exception):
    """Base class for all parseid errors."""


class IngestError(ParseidError):
    """An image/mask pair could not be turned into a PersonImage.

    Raised for undecodable files, image/mask dimension mismatches, label
    values outside the LIP range, and masks without any person pixels.
    The message always names the offending path(s).
    """


class StoreError(ParseidError):
    """Feature store I/O or consistency failure."""


class VersionConflictError(StoreError):
    """Record extractor_version differs from the store's configured version."""


class ConfigError(ParseidError):
    """Invalid weights/engine configuration."""


class QueryError(ParseidError):
    """Invalid attribute query (duplicate class, unknown preset, bad color)."""
