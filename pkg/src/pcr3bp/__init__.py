"""Rotating-frame PCR3BP toolkit: periodic orbits and the period-area identity."""

from . import curvegeom, dynamics, errors, integrate, periodarea, periodicity
from .curvegeom import ClosedPolyline, LiftedCurve, lift, polyline_from_orbit, push_forward
from .dynamics import (
    InertialState,
    MassParameter,
    RotatingState,
    effective_potential,
    field_sample,
    hill_test,
    inertial_from_rotating,
    jacobi_constant,
    lagrange_triangular,
    rotating_from_inertial,
    vector_field,
)
from .integrate import IntegratorConfig, Trajectory, first_return, propagate
from .periodarea import (
    AreaIntegralResult,
    QuadratureConfig,
    TheoremCase,
    VerificationReport,
    area_integral,
    boundary_integral,
    classify_case,
    l4_direction_analysis,
    lemma22_limit_check,
    reconstruct_theta,
    verify,
)
from .periodicity import ClosedOrbit, detect_period, refine_orbit

__version__ = "0.1.0"
