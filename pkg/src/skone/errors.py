"""Exception taxonomy shared by all modules.

Every failure mode a caller can act on gets its own class; the CLI maps
them onto distinct exit codes.
"""


class SkoneError(Exception):
    """Base class for all library errors."""


class FieldSyntaxError(SkoneError):
    """Malformed field/element/algebra expression."""


class UnsupportedTower(SkoneError):
    """The operation is not defined (or not certified) over this tower."""


class PrecisionExhausted(SkoneError):
    """A p-adic or Laurent computation ran out of certified digits/terms."""


class InconsistentConstruction(SkoneError):
    """Build-time invariant violated (bad root adjunction, wrong characteristic...)."""


class NonInvertibleElement(SkoneError):
    """Inverse of zero or of a zero divisor was requested."""


class Undecided(SkoneError):
    """The decision procedure cannot certify an answer; never guess instead."""
