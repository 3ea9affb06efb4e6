"""Exception types shared across the package."""


class MeanFieldError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(MeanFieldError, ValueError):
    """Shapes or tensor-factor dimensions do not fit together."""


class DimensionCapError(DimensionError):
    """A tensor product would exceed the configured dimension cap."""


class FactorIndexError(MeanFieldError, IndexError):
    """A tensor-factor index is out of range."""


class ContractViolation(MeanFieldError, ValueError):
    """An input breaks a documented precondition (non-Hermitian, unsorted, ...)."""


class DensityViolation(MeanFieldError, ValueError):
    """A matrix failed density-matrix validation.

    ``violations`` holds ``(invariant, magnitude)`` pairs, where invariant is
    one of ``"hermiticity"``, ``"positivity"``, ``"trace"``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        detail = ", ".join(f"{name} off by {mag:.3g}" for name, mag in self.violations)
        super().__init__(f"not a density matrix: {detail}")


class MembershipError(MeanFieldError, ValueError):
    """The query lies outside the compatible set, so no witness exists."""


class ConstructionError(MeanFieldError, RuntimeError):
    """A witness was built but failed its own verification."""


class LPError(MeanFieldError, RuntimeError):
    """The simplex solver met a malformed problem."""
