"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a formula."""


class ConfigurationError(ValueError):
    """Inconsistent or invalid parameter set / run configuration."""


class NumericError(RuntimeError):
    """A numerical procedure failed (root bracket, integrator, ...)."""


class StepRejected(NumericError):
    """Time step exceeds the explicit stability limit."""


class FitError(ValueError):
    """A least-squares fit could not be performed or is degenerate."""
