"""Exception types shared across the solvers."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NumericalFailure(RuntimeError):
    """A linear system or iteration could not be solved reliably."""


class NotPositiveDefinite(NumericalFailure):
    pass


class Infeasible(NumericalFailure):
    """Bound constraints admit no schedule with the required total."""
