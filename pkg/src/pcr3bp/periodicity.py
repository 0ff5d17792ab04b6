"""Period detection and shooting refinement for near-periodic initial conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics, integrate
from .dynamics import RotatingState
from .errors import IrregularOrbitError, NotPeriodicError, ReturnNotFoundError
from .integrate import IntegratorConfig, Trajectory

__all__ = [
    "PERIODICITY_THRESHOLD",
    "RefinementInfo",
    "ClosedOrbit",
    "detect_period",
    "refine_orbit",
]

PERIODICITY_THRESHOLD = 1e-3
_REGULARITY_FLOOR = 1e-9
_DEFAULT_SCAN = (0.1, 50.0)


@dataclass(frozen=True)
class RefinementInfo:
    """Bookkeeping of a Newton shooting run."""

    iterations: int
    converged: bool
    initial_residual: float
    final_residual: float
    jacobi_before: float
    jacobi_after: float


@dataclass(frozen=True)
class ClosedOrbit:
    """A detected periodic solution over one period.

    ``trajectory`` spans [0, period] (in elapsed time from the initial
    epoch) with dense output; ``closure_residual`` is the phase-space
    distance between the endpoint and the initial state.
    """

    mu: float
    c: float
    period: float
    trajectory: Trajectory
    closure_residual: float
    min_speed: float
    initial_state: RotatingState
    refinement: RefinementInfo | None = None

    def state_at(self, t):
        return self.trajectory.state_at(self.initial_state.t + np.asarray(t, dtype=float))

    def sample(self, n: int | None = None, endpoint: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Uniform samples over one period: (elapsed times, flat states)."""
        if n is None:
            n = len(self.trajectory.ts) - 1
        ts = np.linspace(0.0, self.period, n + 1 if endpoint else n, endpoint=endpoint)
        return ts, self.state_at(ts)


def _build_orbit(
    s0: RotatingState,
    mu: float,
    period: float,
    cfg: IntegratorConfig,
    refinement: RefinementInfo | None = None,
) -> ClosedOrbit:
    traj = integrate.propagate(s0, mu, s0.t + period, cfg)
    closure = float(np.linalg.norm(traj.state_at(s0.t + period) - s0.array()))
    speeds = np.hypot(traj.states[:, 2], traj.states[:, 3])
    min_speed = float(np.min(speeds))
    if min_speed < _REGULARITY_FLOOR:
        raise IrregularOrbitError(
            f"orbit speed drops to {min_speed:.3e} (< {_REGULARITY_FLOOR}); not a regular orbit"
        )
    return ClosedOrbit(
        mu=traj.mu,
        c=traj.c,
        period=float(period),
        trajectory=traj,
        closure_residual=closure,
        min_speed=min_speed,
        initial_state=s0,
        refinement=refinement,
    )


def detect_period(
    s0: RotatingState,
    mu,
    hint: tuple[float, float] | None = None,
    cfg: IntegratorConfig | None = None,
    threshold: float = PERIODICITY_THRESHOLD,
) -> ClosedOrbit:
    """Find the first return of ``s0`` to itself and package one period as a ClosedOrbit.

    Searches the ``hint`` window when given, otherwise scans (0.1, 50).
    Raises NotPeriodicError when no return falls below ``threshold`` and
    IrregularOrbitError when the speed vanishes along the detected orbit
    (an equilibrium initial state is reported as not periodic).
    """
    cfg = cfg or IntegratorConfig()
    mu = dynamics._mu_value(mu)

    field = dynamics.vector_field(s0, mu)
    if np.linalg.norm(field) < _REGULARITY_FLOOR:
        raise NotPeriodicError("initial state is an equilibrium; no positive-period return exists")

    window = hint if hint is not None else _DEFAULT_SCAN
    try:
        period, residual = integrate.first_return(s0, mu, window, radius=threshold, cfg=cfg)
    except ReturnNotFoundError as exc:
        raise NotPeriodicError(str(exc)) from exc
    return _build_orbit(s0, mu, period, cfg)


def refine_orbit(
    s0: RotatingState,
    mu,
    period0: float,
    cfg: IntegratorConfig | None = None,
    target: float = 1e-10,
    max_iterations: int = 50,
) -> ClosedOrbit:
    """Damped Newton shooting on (initial state, period) to tighten orbit closure.

    All four state components and the period are free; each step takes the
    smallest-norm least-squares correction of the finite-difference shooting
    Jacobian, halving the step until the closure residual decreases.  Returns
    the best iterate found (flagged unconverged if the target is not met).
    """
    cfg = cfg or IntegratorConfig()
    mu = dynamics._mu_value(mu)
    if period0 <= 0.0:
        raise ValueError("period0 must be positive")

    def closure_map(x: np.ndarray) -> np.ndarray:
        state = RotatingState.from_array(x[:4], t=s0.t)
        traj = integrate.propagate(state, mu, s0.t + x[4], cfg)
        return traj.state_at(s0.t + x[4]) - x[:4]

    x = np.append(s0.array(), float(period0))
    f = closure_map(x)
    residual = float(np.linalg.norm(f))
    initial_residual = residual
    if initial_residual > 1e-2:
        raise ValueError(
            f"(state, period) must close to within 1e-2 before refinement, residual is {initial_residual:.3e}"
        )
    jacobi_before = dynamics.jacobi_constant(s0, mu)

    best_x, best_f, best_res = x.copy(), f.copy(), residual
    iterations = 0
    while best_res > target and iterations < max_iterations:
        iterations += 1
        jac = np.empty((4, 5))
        for j in range(5):
            h = 1e-7 * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += h
            jac[:, j] = (closure_map(xp) - f) / h
        step, *_ = np.linalg.lstsq(jac, -f, rcond=None)

        improved = False
        alpha = 1.0
        while alpha >= 1.0 / 64.0:
            x_new = x + alpha * step
            if x_new[4] > 0.0:
                f_new = closure_map(x_new)
                res_new = float(np.linalg.norm(f_new))
                if res_new < best_res:
                    x, f, residual = x_new, f_new, res_new
                    best_x, best_f, best_res = x.copy(), f.copy(), res_new
                    improved = True
                    break
            alpha *= 0.5
        if not improved:
            break

    refined_state = RotatingState.from_array(best_x[:4], t=s0.t)
    info = RefinementInfo(
        iterations=iterations,
        converged=bool(best_res <= target),
        initial_residual=initial_residual,
        final_residual=best_res,
        jacobi_before=jacobi_before,
        jacobi_after=dynamics.jacobi_constant(refined_state, mu),
    )
    return _build_orbit(refined_state, mu, float(best_x[4]), cfg, refinement=info)
