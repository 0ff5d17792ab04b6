"""Closed-form rotating-frame fields of the planar circular restricted three-body problem.

Units are the standard dimensionless ones: the primaries sit fixed at
(-mu, 0) and (1 - mu, 0), their separation is 1, and they revolve with
period 2*pi in the inertial frame.  The heavy primary has mass 1 - mu,
the light one mu <= 1/2.  All functions here are pure and, where it makes
sense, accept arrays of points with shape (..., 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "MassParameter",
    "RotatingState",
    "InertialState",
    "FieldSample",
    "LagrangeTriangularPoint",
    "primary_positions",
    "primary_distances",
    "effective_potential",
    "omega_gradient",
    "omega_laplacian",
    "vector_field",
    "eom_rhs",
    "jacobi_constant",
    "jacobi_values",
    "hill_margin",
    "hill_test",
    "speed_field",
    "log_speed_gradient",
    "log_speed_laplacian",
    "field_sample",
    "rotating_from_inertial",
    "inertial_from_rotating",
    "lagrange_triangular",
]

# Closer than this to a primary counts as "at" it.
_AT_PRIMARY = 1e-12


@dataclass(frozen=True)
class MassParameter:
    """Mass ratio of the light primary, 0 < mu <= 1/2."""

    mu: float

    def __post_init__(self) -> None:
        mu = float(self.mu)
        if not (math.isfinite(mu) and 0.0 < mu <= 0.5):
            raise ValueError(f"mass parameter must satisfy 0 < mu <= 1/2, got {self.mu}")
        object.__setattr__(self, "mu", mu)

    @property
    def primary1(self) -> np.ndarray:
        """Position (-mu, 0) of the heavy primary."""
        return np.array([-self.mu, 0.0])

    @property
    def primary2(self) -> np.ndarray:
        """Position (1 - mu, 0) of the light primary."""
        return np.array([1.0 - self.mu, 0.0])


def _mu_value(mu) -> float:
    if isinstance(mu, MassParameter):
        return mu.mu
    mu = float(mu)
    if not (math.isfinite(mu) and 0.0 < mu <= 0.5):
        raise ValueError(f"mass parameter must satisfy 0 < mu <= 1/2, got {mu}")
    return mu


def primary_positions(mu) -> tuple[np.ndarray, np.ndarray]:
    """Rotating-frame positions of the heavy and light primaries."""
    mu = _mu_value(mu)
    return np.array([-mu, 0.0]), np.array([1.0 - mu, 0.0])


@dataclass(frozen=True)
class RotatingState:
    """Phase-space point in the rotating (synodic) frame."""

    y1: float
    y2: float
    v1: float
    v2: float
    t: float = 0.0

    def __post_init__(self) -> None:
        for name in ("y1", "y2", "v1", "v2", "t"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"RotatingState.{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @property
    def position(self) -> np.ndarray:
        return np.array([self.y1, self.y2])

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.v1, self.v2])

    def array(self) -> np.ndarray:
        """State as the flat vector (y1, y2, v1, v2)."""
        return np.array([self.y1, self.y2, self.v1, self.v2])

    @classmethod
    def from_array(cls, x, t: float = 0.0) -> "RotatingState":
        x = np.asarray(x, dtype=float)
        return cls(x[0], x[1], x[2], x[3], t)


@dataclass(frozen=True)
class InertialState:
    """Phase-space point in the inertial frame."""

    x1: float
    x2: float
    u1: float
    u2: float
    t: float = 0.0

    def __post_init__(self) -> None:
        for name in ("x1", "x2", "u1", "u2", "t"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"InertialState.{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x1, self.x2])

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.u1, self.u2])


@dataclass(frozen=True)
class FieldSample:
    """Local values of the speed field f = sqrt(2*omega - C) and its logarithmic derivatives."""

    omega: float
    r1: float
    r2: float
    f: float
    grad_ln_f: np.ndarray
    delta_ln_f: float


@dataclass(frozen=True)
class LagrangeTriangularPoint:
    """Triangular equilibrium point, at unit distance from both primaries."""

    which: str
    position: np.ndarray
    c0: float


def _split(y) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != 2:
        raise ValueError(f"expected points with shape (..., 2), got {y.shape}")
    return y[..., 0], y[..., 1]


def primary_distances(y, mu) -> tuple[np.ndarray, np.ndarray]:
    """Distances r1, r2 from the point(s) y to the heavy and light primary."""
    mu = _mu_value(mu)
    y1, y2 = _split(y)
    r1 = np.hypot(y1 + mu, y2)
    r2 = np.hypot(y1 + mu - 1.0, y2)
    return r1, r2


def _check_clear(r1, r2) -> None:
    if np.any(np.minimum(r1, r2) < _AT_PRIMARY):
        raise DomainError("point coincides with a primary")


def effective_potential(y, mu, check: bool = True):
    """Effective potential omega = |y|^2/2 + (1-mu)/r1 + mu/r2."""
    mu = _mu_value(mu)
    y1, y2 = _split(y)
    r1, r2 = primary_distances(y, mu)
    if check:
        _check_clear(r1, r2)
    return 0.5 * (y1 * y1 + y2 * y2) + (1.0 - mu) / r1 + mu / r2


def omega_gradient(y, mu, check: bool = True) -> np.ndarray:
    """Analytic gradient of the effective potential, shape (..., 2)."""
    mu = _mu_value(mu)
    y1, y2 = _split(y)
    a = y1 + mu
    b = a - 1.0
    r1, r2 = primary_distances(y, mu)
    if check:
        _check_clear(r1, r2)
    k1 = (1.0 - mu) / r1**3
    k2 = mu / r2**3
    g1 = y1 - a * k1 - b * k2
    g2 = y2 * (1.0 - k1 - k2)
    return np.stack([g1, g2], axis=-1)


def omega_laplacian(y, mu, check: bool = True):
    """Analytic Laplacian of omega: 2 + (1-mu)/r1^3 + mu/r2^3 (planar kernel 1/r has Laplacian 1/r^3)."""
    mu = _mu_value(mu)
    r1, r2 = primary_distances(y, mu)
    if check:
        _check_clear(r1, r2)
    return 2.0 + (1.0 - mu) / r1**3 + mu / r2**3


def vector_field(s: RotatingState, mu) -> np.ndarray:
    """Right-hand side (v1, v2, dOmega/dy1 + 2 v2, dOmega/dy2 - 2 v1) of the rotating-frame flow."""
    g = omega_gradient(s.position, mu)
    return np.array([s.v1, s.v2, g[0] + 2.0 * s.v2, g[1] - 2.0 * s.v1])


def eom_rhs(t, x, mu):
    """Flat equations-of-motion callback for ODE solvers; x = (y1, y2, v1, v2).

    Scalar math on purpose: this sits in the integrator's inner loop.
    """
    y1 = x[0]
    y2 = x[1]
    v1 = x[2]
    v2 = x[3]
    a = y1 + mu
    b = a - 1.0
    r1sq = a * a + y2 * y2
    r2sq = b * b + y2 * y2
    if r1sq < _AT_PRIMARY**2 or r2sq < _AT_PRIMARY**2:
        raise DomainError("trajectory reached a primary")
    k1 = (1.0 - mu) / (r1sq * math.sqrt(r1sq))
    k2 = mu / (r2sq * math.sqrt(r2sq))
    g1 = y1 - a * k1 - b * k2
    g2 = y2 * (1.0 - k1 - k2)
    return (v1, v2, g1 + 2.0 * v2, g2 - 2.0 * v1)


def jacobi_constant(s: RotatingState, mu) -> float:
    """Jacobi integral C = 2*omega - (v1^2 + v2^2)."""
    omega = effective_potential(s.position, mu)
    return float(2.0 * omega - (s.v1 * s.v1 + s.v2 * s.v2))


def jacobi_values(states, mu) -> np.ndarray:
    """Jacobi integral for an array of flat states with shape (..., 4)."""
    states = np.asarray(states, dtype=float)
    omega = effective_potential(states[..., :2], mu)
    return 2.0 * omega - states[..., 2] ** 2 - states[..., 3] ** 2


def hill_margin(y, mu, C, check: bool = True):
    """Margin g = 2*omega - C; the Hill region is where g >= 0."""
    return 2.0 * effective_potential(y, mu, check=check) - C


def hill_test(y, mu, C):
    """Hill-region membership: 2*omega - C >= 0, with the primaries themselves excluded."""
    mu = _mu_value(mu)
    r1, r2 = primary_distances(y, mu)
    clear = np.minimum(r1, r2) >= _AT_PRIMARY
    with np.errstate(divide="ignore"):
        margin = np.where(clear, 2.0 * effective_potential(y, mu, check=False) - C, -np.inf)
    result = (margin >= 0.0) & clear
    if result.ndim == 0:
        return bool(result)
    return result


def speed_field(y, mu, C, check: bool = True):
    """Speed field f = sqrt(2*omega - C); a trajectory's speed at y equals f(y)."""
    g = hill_margin(y, mu, C, check=check)
    if check and np.any(g <= 0.0):
        raise DomainError("point outside the Hill region: 2*omega - C <= 0")
    return np.sqrt(g)


def log_speed_gradient(y, mu, C, check: bool = True) -> np.ndarray:
    """Gradient of ln f, equal to grad(omega) / (2*omega - C)."""
    g = hill_margin(y, mu, C, check=check)
    if check and np.any(g <= 0.0):
        raise DomainError("point outside the Hill region: 2*omega - C <= 0")
    return omega_gradient(y, mu, check=False) / g[..., None]


def log_speed_laplacian(y, mu, C, check: bool = True):
    """Laplacian of ln f in closed form.

    With g = 2*omega - C:  lap(ln f) = lap(g)/(2 g) - |grad g|^2/(2 g^2)
                                      = lap(omega)/g - 2 |grad omega|^2 / g^2.
    """
    g = hill_margin(y, mu, C, check=check)
    if check and np.any(g <= 0.0):
        raise DomainError("point outside the Hill region: 2*omega - C <= 0")
    grad = omega_gradient(y, mu, check=False)
    grad_sq = np.sum(grad * grad, axis=-1)
    return omega_laplacian(y, mu, check=False) / g - 2.0 * grad_sq / g**2


def field_sample(y, mu, C) -> FieldSample:
    """Sample omega, r1, r2, f, grad(ln f) and lap(ln f) at a single point of the Hill region."""
    y = np.asarray(y, dtype=float)
    if y.shape != (2,):
        raise ValueError("field_sample expects a single point of shape (2,)")
    r1, r2 = primary_distances(y, mu)
    _check_clear(r1, r2)
    omega = effective_potential(y, mu, check=False)
    g = 2.0 * omega - C
    if g <= 0.0:
        raise DomainError(f"2*omega - C = {g} <= 0: speed field undefined here")
    grad = omega_gradient(y, mu, check=False)
    return FieldSample(
        omega=float(omega),
        r1=float(r1),
        r2=float(r2),
        f=float(np.sqrt(g)),
        grad_ln_f=grad / g,
        delta_ln_f=float(omega_laplacian(y, mu, check=False) / g - 2.0 * np.dot(grad, grad) / g**2),
    )


def rotating_from_inertial(s: InertialState) -> RotatingState:
    """Rotate an inertial state into the synodic frame.

    Positions rotate by -t; velocities pick up the frame terms, so that
    v = R(-t) u + (y2, -y1).
    """
    c, sn = math.cos(s.t), math.sin(s.t)
    y1 = s.x1 * c + s.x2 * sn
    y2 = -s.x1 * sn + s.x2 * c
    v1 = s.u1 * c + s.u2 * sn + y2
    v2 = -s.u1 * sn + s.u2 * c - y1
    return RotatingState(y1, y2, v1, v2, s.t)


def inertial_from_rotating(s: RotatingState) -> InertialState:
    """Inverse of :func:`rotating_from_inertial`."""
    c, sn = math.cos(s.t), math.sin(s.t)
    x1 = s.y1 * c - s.y2 * sn
    x2 = s.y1 * sn + s.y2 * c
    p1 = s.v1 - s.y2
    p2 = s.v2 + s.y1
    u1 = p1 * c - p2 * sn
    u2 = p1 * sn + p2 * c
    return InertialState(x1, x2, u1, u2, s.t)


def lagrange_triangular(mu, which: str = "L4") -> LagrangeTriangularPoint:
    """Triangular equilibrium L4 or L5 and the critical Jacobi value c0 = 3 - mu + mu^2.

    The point sits at (1/2 - mu, +-sqrt(3)/2): unit distance from both
    primaries, which is what forces 2*omega = c0 there.
    """
    mu = _mu_value(mu)
    if which not in ("L4", "L5"):
        raise ValueError(f"which must be 'L4' or 'L5', got {which!r}")
    sign = 1.0 if which == "L4" else -1.0
    position = np.array([0.5 - mu, sign * math.sqrt(3.0) / 2.0])
    return LagrangeTriangularPoint(which=which, position=position, c0=3.0 - mu + mu * mu)
