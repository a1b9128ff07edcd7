"""Exception and warning types shared across the package."""


class RydCavityError(Exception):
    """Base class for all package errors."""


class DomainError(RydCavityError, ValueError):
    """An argument lies outside the mathematical or physical domain."""


class PreconditionError(RydCavityError, ValueError):
    """A documented precondition of an operation does not hold."""


class ContractViolation(PreconditionError):
    """Input violates a structural contract (e.g. a non-symmetric matrix)."""


class DegeneracyError(RydCavityError, ArithmeticError):
    """Perturbation series hits a (near-)degenerate intermediate state."""

    def __init__(self, target, other, gap):
        self.target = target
        self.other = other
        self.gap = gap
        super().__init__(
            f"near-degenerate states {target!r} and {other!r} (energy gap {gap:.3e})"
        )


class ConfigError(RydCavityError, ValueError):
    """Malformed or incomplete configuration."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class PerturbativeWarning(UserWarning):
    """Detunings are not large compared with the couplings."""


class DegenerateDetuningWarning(UserWarning):
    """A detuning vanishes and a derived quantity degenerates."""


class ConvergenceWarning(RuntimeWarning):
    """A quantity is evaluated where its defining expression diverges."""
