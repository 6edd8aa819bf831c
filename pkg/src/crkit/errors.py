"""Exception types shared across the toolkit.

Error class names follow the operation contracts; everything derives from
CrkitError so callers can catch toolkit failures in one clause.
"""


class CrkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(CrkitError):
    """Invalid configuration (bad ranges, thresholds, weights, flags)."""


class FormatError(CrkitError):
    """Input text does not match the expected export format."""


class VersionError(CrkitError):
    """Project document has an unknown format marker or schema version."""


class IntegrityError(CrkitError):
    """Project document is corrupt (unparseable, checksum mismatch, bad data)."""


class IoError(CrkitError):
    """File could not be read or written."""


class EmptyCohort(CrkitError):
    """No cited reference (or no citing-year column) exists for the requested year."""


class EmptyMatrix(CrkitError):
    """Citation matrix has a zero grand total."""


class ZeroExpected(CrkitError):
    """An expected cell count is zero (all-zero row or column survived pruning)."""


class EmptyInput(CrkitError):
    """An operation that needs at least one value received none."""


class StaleProposal(CrkitError):
    """A merge proposal references a cited reference that no longer exists."""


class NotFound(CrkitError):
    """Unknown session or cited-reference id."""


class BadQuery(CrkitError):
    """Malformed query parameter (unknown sort column, bad filter term)."""


class EmptyHistory(CrkitError):
    """Undo requested on a dataset with no recorded mutations."""
