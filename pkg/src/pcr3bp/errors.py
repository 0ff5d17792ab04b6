"""Exception types shared across the toolkit."""


class Pcr3bpError(Exception):
    """Base class for all toolkit errors."""


class DomainError(Pcr3bpError):
    """A field was evaluated where it is undefined (at a primary, or outside the Hill region)."""


class SingularityApproachError(Pcr3bpError):
    """A trajectory came closer than the guard radius to one of the primaries."""


class StepFailureError(Pcr3bpError):
    """The adaptive integrator could not meet its error tolerance."""


class ReturnNotFoundError(Pcr3bpError):
    """No phase-space return below the requested radius exists in the search window."""


class NotPeriodicError(Pcr3bpError):
    """Period detection found no return below the periodicity threshold."""


class IrregularOrbitError(Pcr3bpError):
    """The orbit's speed drops below the regularity floor somewhere along one period."""


class PointOnCurveError(Pcr3bpError):
    """A winding-number query point lies on (or too close to) the curve itself."""


class WindingMismatchError(Pcr3bpError):
    """The curve does not wind the requested number of times about the lifting center."""


class NonSimpleLiftingError(Pcr3bpError):
    """The candidate lifting is not a simple curve; the input is not n-simple about the center."""


class UnclassifiableOrbitError(Pcr3bpError):
    """The orbit is neither simple nor n-simple about any of the candidate centers."""


class QuadratureError(Pcr3bpError):
    """The area quadrature failed to produce a trustworthy value."""


class RegionExitsHillRegionError(QuadratureError):
    """A quadrature node inside the region has 2*omega - C < 0."""


class ExtrapolationUnstableError(QuadratureError):
    """Excision-radius extrapolation did not converge."""


class CriticalValueError(Pcr3bpError):
    """The Jacobi constant coincides with the critical value of the triangular points."""


class SchemaError(Pcr3bpError):
    """An orbit document does not conform to the JSON schema."""
