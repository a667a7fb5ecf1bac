"""Exception hierarchy shared by all scalecalc modules."""


class ScaleCalcError(Exception):
    """Base class for every error raised by scalecalc."""


class OutOfDomain(ScaleCalcError, IndexError):
    """A stencil or integration range reaches outside the available nodes."""


class NonUniformShift(ScaleCalcError, ValueError):
    """A step h is not an integer multiple of the grid spacing."""


class FitDegenerate(ScaleCalcError, ValueError):
    """Too few h levels to extract a scale limit or a convergence slope."""


class InsufficientResolution(ScaleCalcError, ValueError):
    pass


class ParameterOutOfRange(ScaleCalcError, ValueError):
    pass


class GridMismatch(ScaleCalcError, ValueError):
    """Two grid functions that must share a grid do not."""


class BoundaryNotZero(ScaleCalcError, ValueError):
    pass


class ArityMismatch(ScaleCalcError, TypeError):
    """The Lagrangian's arity does not fit the requested Euler-Lagrange variant."""


class VariationClassViolation(ScaleCalcError, ValueError):
    """A variation does not satisfy the endpoint conditions of its class."""


class NondegeneracyFailure(ScaleCalcError):
    """The trajectory is an extremal of the constraint functional."""


class ConstraintViolated(ScaleCalcError, ValueError):
    pass


class SingularSystem(ScaleCalcError):
    pass


class BoundaryIncomplete(ScaleCalcError, ValueError):
    pass


class ConfigInvalid(ScaleCalcError, ValueError):
    """Bad CLI flags or config file; carries a line/field diagnostic."""
