"""Exception types shared across the package."""


class IgsymError(Exception):
    """Base class for package-specific failures."""


class InvalidInput(IgsymError):
    """Raised when an argument violates a documented precondition.

    Covers non-finite entries, shape mismatches, non-normalized directions,
    out-of-range indices and malformed configuration values.
    """


class EmptyAlgebra(IgsymError):
    """Raised when an operation needs symmetry generators but none exist.

    The algebra constructors themselves do not raise this; they return a basis
    with zero generators (full-rank weight matrices simply have no nontrivial
    continuous symmetry). Samplers and attacks raise it because they cannot
    produce an element out of nothing.
    """
