"""Exception types shared across the library."""


class SeqgapError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatch(SeqgapError, ValueError):
    """Operands have incompatible shapes."""


class NotSymmetric(SeqgapError, ValueError):
    """Matrix asymmetry exceeds tolerance where symmetry is required."""


class IndefiniteMatrix(SeqgapError, ValueError):
    """Matrix has an eigenvalue below the negative tolerance band."""


class InvalidDimensions(SeqgapError, ValueError):
    """Problem sizes violate a structural constraint (e.g. 2n < m)."""


class InvalidGeometry(SeqgapError, ValueError):
    """Point family violates containment or separation requirements."""


class UnsupportedGeometry(SeqgapError, ValueError):
    """Closed-form geometric computation is not available for this family."""


class InconsistentObservation(SeqgapError, ValueError):
    """Observation lies off the affine support of every mixture component."""


class BudgetExceeded(SeqgapError, RuntimeError):
    """A query was attempted past the session's information budget."""


class ProtocolViolation(SeqgapError, RuntimeError):
    """Session used in a way its mode forbids (e.g. adaptive queries in a
    non-adaptive session, or registering after reveal)."""


class Infeasible(SeqgapError, ValueError):
    """No feasible point exists within tolerance (e.g. y outside range(N))."""


class DomainError(SeqgapError, ValueError):
    """Argument outside the documented domain of the operation."""


class NotConvergedWarning(UserWarning):
    """Iterative solver hit its cap; best iterate returned."""
