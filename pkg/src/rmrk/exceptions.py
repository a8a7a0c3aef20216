"""Exception hierarchy shared across the package."""


class RmrkError(Exception):
    """Base class for all rmrk errors."""


class OracleFailure(RmrkError):
    """An oracle (SVD, LMO, prox) could not produce a usable answer."""


class NonConvergence(OracleFailure):
    """An iterative kernel hit its iteration cap before reaching tolerance."""


class DimensionTooLarge(RmrkError):
    """A dense factorization was requested above the supported size guard."""


class ParseError(RmrkError):
    """A file or config did not match its documented format."""


class InvalidConstants(RmrkError):
    """Schedule or recursion constants violate their preconditions."""


class DegenerateInstance(RmrkError):
    """A generated instance has a zero ball radius and cannot be solved."""


class InfeasibleStart(RmrkError):
    """The starting point is outside the domain of a regularizer."""
