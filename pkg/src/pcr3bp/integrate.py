"""High-order adaptive propagation of the rotating-frame flow, with dense output.

The integrator is scipy's DOP853 (explicit Runge-Kutta of order 8 with an
embedded error estimate and free 7th-order dense output), driven at tight
tolerances.  A guard event aborts propagation when a trajectory approaches
either primary closer than 1e-6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from . import dynamics
from .dynamics import RotatingState
from .errors import ReturnNotFoundError, SingularityApproachError, StepFailureError

__all__ = ["IntegratorConfig", "Trajectory", "propagate", "first_return"]

SINGULARITY_RADIUS = 1e-6


@dataclass(frozen=True)
class IntegratorConfig:
    """Error tolerances and output density for :func:`propagate`."""

    rel_tol: float = 1e-12
    abs_tol: float = 1e-12
    max_step: float = math.inf
    dense_samples_per_period: int = 4096

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_tol"):
            value = getattr(self, name)
            if not 0.0 < value <= 1e-3:
                raise ValueError(f"{name} must lie in (0, 1e-3], got {value}")
        if self.max_step <= 0.0:
            raise ValueError("max_step must be positive")
        if self.dense_samples_per_period < 256:
            raise ValueError("dense_samples_per_period must be at least 256")


@dataclass(frozen=True)
class Trajectory:
    """A propagated solution: regular samples plus a dense-output interpolant.

    ``ts`` is monotone (increasing for forward propagation) and ``states``
    holds the flat (y1, y2, v1, v2) rows.  ``c`` is the Jacobi integral of
    the initial state; conservation along the samples is a quality check,
    see :meth:`jacobi_drift`.
    """

    mu: float
    c: float
    ts: np.ndarray
    states: np.ndarray
    interpolant: object

    def state_at(self, t):
        """Dense-output state(s) at scalar or array times, shape (4,) or (n, 4)."""
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.interpolant(t))
        return out if t.ndim == 0 else out.T

    @property
    def t0(self) -> float:
        return float(self.ts[0])

    @property
    def t1(self) -> float:
        return float(self.ts[-1])

    def endpoint(self) -> RotatingState:
        return RotatingState.from_array(self.states[-1], t=self.t1)

    def jacobi_drift(self) -> float:
        """Max deviation of the Jacobi integral from its initial value over the samples."""
        return float(np.max(np.abs(dynamics.jacobi_values(self.states, self.mu) - self.c)))


def _guard_event(offset: float):
    def event(t, x, mu):
        return math.hypot(x[0] + offset, x[1]) - SINGULARITY_RADIUS

    return event


def propagate(s0: RotatingState, mu, t_end: float, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Propagate ``s0`` to ``t_end`` (forward or backward) and return a dense Trajectory."""
    cfg = cfg or IntegratorConfig()
    mu = dynamics._mu_value(mu)
    if t_end == s0.t:
        raise ValueError("t_end must differ from the initial epoch")
    r1, r2 = dynamics.primary_distances(s0.position, mu)
    if min(r1, r2) <= SINGULARITY_RADIUS:
        raise SingularityApproachError("initial state is inside the singularity guard radius")

    event1 = _guard_event(mu)
    event2 = _guard_event(mu - 1.0)
    event1.terminal = True
    event2.terminal = True

    kwargs = {}
    if math.isfinite(cfg.max_step):
        kwargs["max_step"] = cfg.max_step
    sol = solve_ivp(
        dynamics.eom_rhs,
        (s0.t, t_end),
        s0.array(),
        method="DOP853",
        args=(mu,),
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        dense_output=True,
        events=(event1, event2),
        **kwargs,
    )
    if sol.status == 1:
        t_hit = min(float(te[0]) for te in sol.t_events if len(te))
        raise SingularityApproachError(
            f"trajectory came within {SINGULARITY_RADIUS} of a primary at t = {t_hit}"
        )
    if not sol.success:
        raise StepFailureError(f"integration failed: {sol.message}")

    n = max(257, cfg.dense_samples_per_period + 1)
    ts = np.linspace(s0.t, t_end, n)
    states = sol.sol(ts).T
    return Trajectory(mu=mu, c=dynamics.jacobi_constant(s0, mu), ts=ts, states=states, interpolant=sol.sol)


def _phase_rate_bound(traj: Trajectory) -> float:
    """Upper bound on |d/dt state| along the trajectory samples (Lipschitz rate of the return distance)."""
    pos = traj.states[:, :2]
    vel = traj.states[:, 2:]
    grad = dynamics.omega_gradient(pos, traj.mu)
    acc1 = grad[:, 0] + 2.0 * vel[:, 1]
    acc2 = grad[:, 1] - 2.0 * vel[:, 0]
    rate = np.sqrt(vel[:, 0] ** 2 + vel[:, 1] ** 2 + acc1**2 + acc2**2)
    return float(np.max(rate))


def first_return(
    s0: RotatingState,
    mu,
    window: tuple[float, float],
    radius: float = 1e-3,
    cfg: IntegratorConfig | None = None,
    trajectory: Trajectory | None = None,
) -> tuple[float, float]:
    """Earliest local minimum of the phase-space distance from ``s0`` below ``radius``.

    ``window`` is the (a, b) interval of elapsed time after ``s0.t`` to
    search.  The distance is the plain Euclidean norm on (y1, y2, v1, v2).
    Candidate minima are bracketed on a grid fine enough (from a Lipschitz
    bound on the flow) to catch every dip below ``radius``, then polished by
    bounded scalar minimization to 1e-12 in t.  Returns ``(t_star, residual)``
    with ``t_star`` measured as elapsed time.

    A precomputed ``trajectory`` covering the window may be supplied to avoid
    re-propagation.
    """
    cfg = cfg or IntegratorConfig()
    a, b = float(window[0]), float(window[1])
    if not (0.0 < a < b):
        raise ValueError(f"window must satisfy 0 < a < b, got ({a}, {b})")
    if radius <= 0.0:
        raise ValueError("radius must be positive")

    traj = trajectory
    if traj is None or traj.t1 < s0.t + b:
        traj = propagate(s0, mu, s0.t + b, cfg)
    ref = s0.array()

    rate = _phase_rate_bound(traj)
    step = radius / (2.0 * max(rate, 1e-12))
    n = int(np.clip(math.ceil((b - a) / step), 2048, 2_000_000))
    ts = np.linspace(s0.t + a, s0.t + b, n + 1)
    dist = np.linalg.norm(traj.state_at(ts) - ref, axis=1)

    interior = np.arange(1, n)
    is_min = (
        (dist[interior] <= dist[interior - 1])
        & (dist[interior] <= dist[interior + 1])
        & ((dist[interior] < dist[interior - 1]) | (dist[interior] < dist[interior + 1]))
        & (dist[interior] < radius)
    )
    candidates = interior[is_min]

    def objective(t: float) -> float:
        return float(np.linalg.norm(np.asarray(traj.interpolant(t)) - ref))

    def polish(t: float, t_lo: float, t_hi: float) -> float:
        # Newton on g(t) = (s - ref) . ds/dt = 0; the bounded minimizer stalls
        # at ~sqrt(eps) relative accuracy, this takes t* the rest of the way.
        h = 1e-7
        for _ in range(12):
            s = np.asarray(traj.interpolant(t))
            ds = np.asarray(dynamics.eom_rhs(t, s, mu))
            dds = (
                np.asarray(dynamics.eom_rhs(t, s + h * ds, mu))
                - np.asarray(dynamics.eom_rhs(t, s - h * ds, mu))
            ) / (2.0 * h)
            diff = s - ref
            grad = float(diff @ ds)
            curv = float(ds @ ds + diff @ dds)
            if curv <= 0.0:
                break
            t_new = min(max(t - grad / curv, t_lo), t_hi)
            if abs(t_new - t) < 1e-13:
                t = t_new
                break
            t = t_new
        return t

    for i in candidates:
        res = minimize_scalar(
            objective,
            bounds=(ts[i - 1], ts[i + 1]),
            method="bounded",
            options={"xatol": 1e-13},
        )
        t_star = polish(float(res.x), float(ts[i - 1]), float(ts[i + 1]))
        value = objective(t_star)
        if value >= float(res.fun):
            t_star, value = float(res.x), float(res.fun)
        if value < radius and s0.t + a <= t_star <= s0.t + b:
            return t_star - s0.t, value
    raise ReturnNotFoundError(
        f"no phase-space return below radius {radius} in window ({a}, {b})"
    )
