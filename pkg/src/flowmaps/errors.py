"""Exception types raised by candidate construction, evaluation and checks."""


class FlowmapsError(Exception):
    """Base class for all library errors."""


class IntegrationWindowExceeded(FlowmapsError):
    """Time outside the validity window of an ODE-backed coefficient matrix."""


class SingularTransform(FlowmapsError):
    """Column-mixing matrix is singular or too ill-conditioned to invert."""


class ConstraintClassMismatch(FlowmapsError):
    """A check was requested for a basis of the wrong constraint class."""


class GridOutsideDomain(FlowmapsError):
    """A verification sample left the candidate's declared domain box."""


class Degenerate(FlowmapsError):
    """A required coefficient function vanishes on the requested window."""


class DegenerateStretch(Degenerate):
    """The columnar stretch factor vanishes (or its ODE load is undefined)."""


class InvalidStratification(FlowmapsError):
    """Constants violate the sign condition required for a real frequency."""


class SingularWindow(FlowmapsError):
    """The time window contains a singular time of an explicit solution."""


class InvalidClock(FlowmapsError):
    """The clock function must be strictly increasing on the window."""


class LostRegularity(FlowmapsError):
    """An angular rate that must stay away from zero vanished."""


class ComplexBranch(FlowmapsError):
    """A discriminant went negative; the quadrature branch turns complex."""


class QuadratureBreakdown(FlowmapsError):
    """A quadrature formula's denominator vanished on the window."""


class NonFiniteIntegrand(FlowmapsError):
    """An accumulator integrand returned NaN or infinity."""


class NotLinearMap(FlowmapsError):
    """Eulerian velocity requested for a map that is not linear in labels."""


class EmptyCurve(FlowmapsError):
    """A density level is not attained on the given seed line."""


class StepCollapse(FlowmapsError):
    """Integrator step size collapsed without a registered event firing."""
