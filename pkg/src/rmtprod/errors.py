"""Exception hierarchy shared by all modules."""


class RMTError(Exception):
    """Base class for every error raised by rmtprod."""


class SpecValidationError(RMTError, ValueError):
    """An ensemble, source or experiment description violates its invariants."""


class NotHermitian(RMTError, ValueError):
    pass


class PairingFailure(RMTError, ValueError):
    """A spectrum that should be Kramers degenerate does not pair up."""


class UnrealizableParameters(RMTError, ValueError):
    """No integer truncation size reproduces the requested Jacobi exponent."""


class ChainDiverged(RMTError, FloatingPointError):
    pass


class DimensionMismatch(RMTError, ValueError):
    pass


class DegenerateGrid(RMTError, ValueError):
    """An analytic reference value vanishes on the comparison grid."""


class PoleOnContour(RMTError, ValueError):
    pass


class CoincidentMasses(RMTError, ValueError):
    pass


class NonConvergent(RMTError, ArithmeticError):
    pass


class UnsupportedMassCount(RMTError, ValueError):
    pass


class UnsupportedBeta(RMTError, NotImplementedError):
    pass
