"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A caller-supplied parameter violates an operation's precondition."""


class CapacityError(RuntimeError):
    """A requested object would exceed the configured memory budget.

    ``dimension`` is the offending size and ``limit`` the budget it was checked
    against; ``feasible`` optionally describes the largest parameter that fits.
    """

    def __init__(self, message, dimension=None, limit=None, feasible=None):
        super().__init__(message)
        self.dimension = dimension
        self.limit = limit
        self.feasible = feasible


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, estimate, residual, iterations):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations


class DegenerateGramError(ValueError):
    """The permutation-vector Gram matrix is singular or badly conditioned."""
