class VerificationError(Exception):
    """Base exception for verification errors"""
    pass


class InvalidLevelError(VerificationError):
    """Raised when a torsion level is not a positive integer"""
    pass


class BasisMismatchError(VerificationError):
    """Raised when complex multiplication is applied on an incompatible period basis"""
    pass


class IncompatibleLevelError(VerificationError):
    """Raised when a point or translation does not live in the requested torsion level"""
    pass


class PointSyntaxError(VerificationError):
    """Raised when a textual torsion point cannot be parsed"""
    pass


class InvalidActionSpecError(VerificationError):
    """Raised when a group action specification is malformed"""
    pass


class PreconditionError(VerificationError):
    """Raised when an operation is called outside its hypotheses"""
    pass


class EnumerationLimitError(VerificationError):
    """Raised when an exhaustive enumeration exceeds the configured cap"""
    pass


class NonDivisibleIndexError(VerificationError):
    """Raised when the index d does not divide n+1"""
    pass


class LatticeError(VerificationError):
    """Base exception for lattice computations"""
    pass


class DegenerateLatticeError(LatticeError):
    """Raised when a Gram matrix has zero determinant"""
    pass


class LatticeInputError(LatticeError):
    """Raised when a Gram matrix or basis cannot be read or is not symmetric"""
    pass


class MukaiDimensionError(LatticeError):
    """Raised when a Mukai vector does not match the Neron-Severi model"""
    pass
