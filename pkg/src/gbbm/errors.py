"""Exception types shared across the package."""


class GbbmError(Exception):
    """Base class for all package-specific errors."""


class RangeError(GbbmError):
    """A mode index or family parameter falls outside the representable band."""


class SymmetryError(GbbmError):
    """Supplied coefficients violate the Hermitian (real-field) convention."""


class DomainError(GbbmError):
    """Operands live on incompatible domains."""


class AliasError(GbbmError):
    """The domain's padding cannot support the requested alias-free product."""


class ContractionError(GbbmError):
    """Fixed-point iteration is expanding instead of contracting."""


class ConvergenceError(GbbmError):
    """Iteration cap reached before the stopping tolerance."""


class BlowupError(GbbmError):
    """A non-finite coefficient appeared during time marching."""

    def __init__(self, time):
        super().__init__(f"non-finite coefficient at t={time}")
        self.time = time


class GronwallViolation(GbbmError):
    """The regular component escaped its predicted exponential envelope."""

    def __init__(self, time, norm, bound):
        super().__init__(
            f"H^1 norm {norm:.6g} exceeded bound {bound:.6g} at t={time}"
        )
        self.time = time
        self.norm = norm
        self.bound = bound


class UnsupportedError(GbbmError):
    """Requested nonlinearity power is outside the implemented set."""


class FitError(GbbmError):
    """Log-log fit received nonpositive values or too few points."""
