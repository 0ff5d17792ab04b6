"""The period-area theorem engine.

For a periodic rotating-frame orbit with period T and Jacobi constant C,
2T = sign * (k*pi + I) where I is the integral of the Laplacian of
ln f (f = sqrt(2*omega - C)) over the region enclosed by the orbit (or by
its nth-root lifting), k is an integer fixed by the enclosure class and
covering index, and sign is +1 for clockwise traversal, -1 for
counterclockwise.  This module reconstructs the velocity-direction angle
theta(t), evaluates both sides of the identity, classifies which case
applies, and runs the direction analysis near the triangular points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import curvegeom, dynamics
from .curvegeom import ClosedPolyline, LiftedCurve
from .errors import (
    CriticalValueError,
    ExtrapolationUnstableError,
    IrregularOrbitError,
    NonSimpleLiftingError,
    PointOnCurveError,
    QuadratureError,
    RegionExitsHillRegionError,
    UnclassifiableOrbitError,
    WindingMismatchError,
)

__all__ = [
    "ThetaProfile",
    "TheoremCase",
    "QuadratureConfig",
    "QuadratureDiagnostics",
    "AreaIntegralResult",
    "VerificationReport",
    "TriangularPointReport",
    "DirectionAnalysis",
    "reconstruct_theta",
    "boundary_integral",
    "boundary_integral_direct",
    "area_integral",
    "lemma22_limit_check",
    "classify_case",
    "verify",
    "l4_direction_analysis",
]

_REGULARITY_FLOOR = 1e-9


# ---------------------------------------------------------------------------
# theta reconstruction and the boundary side of the identity


@dataclass(frozen=True)
class ThetaProfile:
    """Unwrapped velocity-direction angle along one period.

    ``total_change`` is theta(T) - theta(0); for a closed regular orbit it
    is an integer multiple of 2*pi.  ``ode_rms_residual`` measures how well
    the profile satisfies  dtheta/dt = -2 + f_y2 cos(theta) - f_y1 sin(theta)
    (numerical derivative against the analytic right-hand side) and
    ``speed_mismatch`` how well |velocity| matches f(position).
    """

    times: np.ndarray
    theta: np.ndarray
    total_change: float
    ode_rms_residual: float
    speed_mismatch: float


def reconstruct_theta(orbit, n: int | None = None) -> ThetaProfile:
    """Reconstruct theta(t) = atan2(v2, v1), unwrapped along dense samples."""
    ts, states = orbit.sample(n, endpoint=True)
    v1, v2 = states[:, 2], states[:, 3]
    speeds = np.hypot(v1, v2)
    if np.min(speeds) < _REGULARITY_FLOOR:
        raise IrregularOrbitError(f"orbit speed drops to {np.min(speeds):.3e}; theta is undefined")

    theta = np.unwrap(np.arctan2(v2, v1))
    positions = states[:, :2]
    f = dynamics.speed_field(positions, orbit.mu, orbit.c)
    speed_mismatch = float(np.max(np.abs(speeds - f)))

    grad_f = dynamics.omega_gradient(positions, orbit.mu) / f[:, None]
    rhs = -2.0 + grad_f[:, 1] * np.cos(theta) - grad_f[:, 0] * np.sin(theta)
    dt = ts[1] - ts[0]
    # 4th-order central differences on the interior
    i = np.arange(2, len(ts) - 2)
    dtheta = (-theta[i + 2] + 8.0 * theta[i + 1] - 8.0 * theta[i - 1] + theta[i - 2]) / (12.0 * dt)
    rms = float(np.sqrt(np.mean((dtheta - rhs[i]) ** 2)))

    return ThetaProfile(
        times=ts,
        theta=theta,
        total_change=float(theta[-1] - theta[0]),
        ode_rms_residual=rms,
        speed_mismatch=speed_mismatch,
    )


def boundary_integral(orbit, profile: ThetaProfile | None = None) -> float:
    """Outward flux of grad(ln f) through the orbit (the boundary side of Stokes).

    Along the orbit ds = f dt, so the flux collapses to the exact theta form
    integral of (dtheta/dt + 2) dt = total_change + 2T for clockwise orbits,
    negated for counterclockwise ones (outward normal flips).
    """
    profile = profile or reconstruct_theta(orbit)
    two_t = 2.0 * orbit.period
    if profile.total_change < 0.0:
        return profile.total_change + two_t
    return -profile.total_change - two_t


def boundary_integral_direct(orbit, profile: ThetaProfile | None = None) -> float:
    """Flux of grad(ln f) computed by direct quadrature of grad(f) . n dt along the curve."""
    profile = profile or reconstruct_theta(orbit)
    ts, states = orbit.sample(len(profile.times) - 1, endpoint=True)
    positions = states[:, :2]
    f = dynamics.speed_field(positions, orbit.mu, orbit.c)
    grad_f = dynamics.omega_gradient(positions, orbit.mu) / f[:, None]
    integrand = grad_f[:, 1] * np.cos(profile.theta) - grad_f[:, 0] * np.sin(profile.theta)
    sign = 1.0 if profile.total_change < 0.0 else -1.0
    return float(sign * np.trapz(integrand, ts))


# ---------------------------------------------------------------------------
# quadrature configuration and results


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for the adaptive area quadrature.

    ``epsilon_schedule`` is the decreasing sequence of excision radii about
    enclosed singular centers; ``None`` picks a geometric schedule scaled to
    the region (largest radius at most a third of the clearance around each
    center), which keeps the radius-to-zero extrapolation in its linear
    regime for regions of any size.
    """

    epsilon_schedule: tuple[float, ...] | None = None
    cell_tolerance: float = 1e-6
    max_depth: int = 24
    mask_subdiv: int = 12
    gauss_low: int = 4
    gauss_high: int = 8
    phi_samples: int = 512
    rho_nodes: int = 24
    max_cells: int = 500_000

    def __post_init__(self) -> None:
        if self.epsilon_schedule is not None:
            eps = tuple(float(e) for e in self.epsilon_schedule)
            if len(eps) < 1 or any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
                raise ValueError("epsilon_schedule must be strictly decreasing")
            if eps[-1] < 1e-5:
                raise ValueError("smallest excision radius must be >= 1e-5")
            object.__setattr__(self, "epsilon_schedule", eps)
        if not 0.0 < self.cell_tolerance <= 1e-2:
            raise ValueError("cell_tolerance must lie in (0, 1e-2]")
        if self.max_depth < 4 or self.mask_subdiv < 4:
            raise ValueError("max_depth and mask_subdiv must be at least 4")


@dataclass(frozen=True)
class QuadratureDiagnostics:
    """What the adaptive quadrature actually did."""

    interior_cells: int
    boundary_cells: int
    field_evaluations: int
    max_depth_reached: int
    epsilons: tuple[float, ...]
    epsilon_values: tuple[float, ...]
    gauss_error: float
    mask_error: float
    polar_error: float
    extrapolation_error: float


@dataclass(frozen=True)
class AreaIntegralResult:
    value: float
    error_estimate: float
    diagnostics: QuadratureDiagnostics


def _auto_schedule(r_seed: float) -> tuple[float, ...]:
    eps_max = min(1e-2, r_seed / 3.0)
    schedule = [eps_max / 4.0**k for k in range(4)]
    schedule = [e for e in schedule if e >= 1e-5]
    while len(schedule) < 2:
        schedule.append(max(1e-5, schedule[-1] / 2.0))
    return tuple(schedule)


# ---------------------------------------------------------------------------
# geometry helpers for the quadtree


def _points_in_polygon(points: np.ndarray, vertices: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Crossing-number point-in-polygon test (even-odd rule), vectorized and chunked."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return np.zeros(0, dtype=bool)
    x1, y1 = vertices[:, 0], vertices[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    dy = y2 - y1
    inside = np.empty(pts.shape[0], dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for s in range(0, pts.shape[0], chunk):
            px = pts[s : s + chunk, 0:1]
            py = pts[s : s + chunk, 1:2]
            straddle = (y1 <= py) != (y2 <= py)
            xi = x1 + (py - y1) / dy * (x2 - x1)
            crossing = straddle & (xi > px)
            inside[s : s + chunk] = (np.count_nonzero(crossing, axis=1) % 2).astype(bool)
    return inside


def _segments_cross_rect(a: np.ndarray, b: np.ndarray, cx: float, cy: float, h: float) -> np.ndarray:
    """Which segments a->b meet the closed square of half-size h centered at (cx, cy)."""
    d = b - a
    t0 = np.zeros(a.shape[0])
    t1 = np.ones(a.shape[0])
    ok = np.ones(a.shape[0], dtype=bool)
    for axis, lo, hi in ((0, cx - h, cx + h), (1, cy - h, cy + h)):
        p = a[:, axis]
        dd = d[:, axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            tlo = (lo - p) / dd
            thi = (hi - p) / dd
        t_enter = np.where(dd >= 0.0, tlo, thi)
        t_exit = np.where(dd >= 0.0, thi, tlo)
        parallel = dd == 0.0
        t0 = np.where(parallel, t0, np.maximum(t0, t_enter))
        t1 = np.where(parallel, t1, np.minimum(t1, t_exit))
        ok &= np.where(parallel, (p >= lo) & (p <= hi), True)
    return ok & (t0 <= t1)


class _RegionField:
    """Wraps the integrand with evaluation counting."""

    def __init__(self, func):
        self._func = func
        self.evaluations = 0

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        self.evaluations += pts.shape[0]
        return self._func(pts)


def _quadtree_integral(V: np.ndarray, centers: list[np.ndarray], radii: list[float], F, cfg: QuadratureConfig):
    """Adaptive cell quadrature over (interior of polygon V) minus the disks of ``radii``.

    Cells fully inside use nested tensor Gauss rules with h-refinement;
    cells cut by the polygon or a disk boundary subdivide until the masked
    midpoint estimate is below cell_tolerance, then integrate membership-
    masked samples (winding-parity point tests against the polyline).
    """
    A_edges, B_edges = V, np.roll(V, -1, axis=0)
    centers_arr = np.asarray(centers, dtype=float).reshape(-1, 2)
    radii_arr = np.asarray(radii, dtype=float)

    lo = V.min(axis=0)
    hi = V.max(axis=0)
    mid = (lo + hi) / 2.0
    h0 = float(np.max(hi - lo)) * 0.5000001 + 1e-12

    xg_hi, wg_hi = leggauss(cfg.gauss_high)
    xg_lo, wg_lo = leggauss(cfg.gauss_low)
    off_hi = np.stack(np.meshgrid(xg_hi, xg_hi, indexing="ij"), axis=-1).reshape(-1, 2)
    wts_hi = np.outer(wg_hi, wg_hi).reshape(-1)
    off_lo = np.stack(np.meshgrid(xg_lo, xg_lo, indexing="ij"), axis=-1).reshape(-1, 2)
    wts_lo = np.outer(wg_lo, wg_lo).reshape(-1)
    K = cfg.mask_subdiv
    u = (np.arange(K) + 0.5) / K * 2.0 - 1.0
    off_probe = np.stack(np.meshgrid(u, u, indexing="ij"), axis=-1).reshape(-1, 2)

    cells = mid[None, :].copy()
    cand: list[np.ndarray] = [np.arange(V.shape[0])]
    h = h0
    depth = 0

    value = 0.0
    gauss_err = 0.0
    mask_err_sq = 0.0
    n_interior = 0
    n_boundary = 0
    n_cells_total = 0
    max_depth_reached = 0

    while cells.shape[0] > 0:
        n = cells.shape[0]
        n_cells_total += n
        if n_cells_total > cfg.max_cells:
            raise QuadratureError(f"quadtree exceeded {cfg.max_cells} cells; region too demanding")
        max_depth_reached = depth

        if centers_arr.shape[0]:
            dx = np.abs(cells[:, 0:1] - centers_arr[None, :, 0])
            dy = np.abs(cells[:, 1:2] - centers_arr[None, :, 1])
            dmin = np.hypot(np.maximum(dx - h, 0.0), np.maximum(dy - h, 0.0))
            dmax = np.hypot(dx + h, dy + h)
            dropped = np.any(dmax <= radii_arr[None, :], axis=1)
            circle_cut = np.any((dmin < radii_arr[None, :]) & (radii_arr[None, :] < dmax), axis=1)
        else:
            dropped = np.zeros(n, dtype=bool)
            circle_cut = np.zeros(n, dtype=bool)

        crossing: list[np.ndarray] = [np.empty(0, dtype=int)] * n
        has_edge = np.zeros(n, dtype=bool)
        for i in range(n):
            if dropped[i] or cand[i].size == 0:
                continue
            c = cand[i]
            mask = _segments_cross_rect(A_edges[c], B_edges[c], cells[i, 0], cells[i, 1], h)
            if np.any(mask):
                crossing[i] = c[mask]
                has_edge[i] = True

        boundaryish = (~dropped) & (has_edge | circle_cut)
        uniform = (~dropped) & (~boundaryish)

        next_cells = []
        next_cand = []

        # --- uniform cells: wholly in or out; keep the interior ones
        uni_idx = np.nonzero(uniform)[0]
        if uni_idx.size:
            inside = _points_in_polygon(cells[uni_idx], V)
            interior_idx = uni_idx[inside]
        else:
            interior_idx = np.empty(0, dtype=int)

        if interior_idx.size:
            ctr = cells[interior_idx]
            pts_hi = (ctr[:, None, :] + h * off_hi[None, :, :]).reshape(-1, 2)
            vals_hi = F(pts_hi).reshape(len(interior_idx), -1)
            I_hi = h * h * vals_hi @ wts_hi
            pts_lo = (ctr[:, None, :] + h * off_lo[None, :, :]).reshape(-1, 2)
            vals_lo = F(pts_lo).reshape(len(interior_idx), -1)
            I_lo = h * h * vals_lo @ wts_lo
            err = np.abs(I_hi - I_lo)
            accept = (err <= cfg.cell_tolerance) | (depth >= cfg.max_depth)
            value += float(np.sum(I_hi[accept]))
            gauss_err += float(np.sum(err[accept]))
            n_interior += int(np.count_nonzero(accept))
            for i in interior_idx[~accept]:
                for sx in (-0.5, 0.5):
                    for sy in (-0.5, 0.5):
                        next_cells.append(cells[i] + np.array([sx * h, sy * h]))
                        next_cand.append(np.empty(0, dtype=int))

        # --- boundary cells: masked midpoint probes, subdivide while too coarse
        bnd_idx = np.nonzero(boundaryish)[0]
        if bnd_idx.size:
            ctr = cells[bnd_idx]
            center_in = _points_in_polygon(ctr, V)
            probes = ctr[:, None, :] + h * off_probe[None, :, :]
            member = np.empty((len(bnd_idx), off_probe.shape[0]), dtype=bool)
            for row, i in enumerate(bnd_idx):
                member[row] = _parity_from_anchor(
                    ctr[row], bool(center_in[row]), probes[row], A_edges, B_edges, crossing[i]
                )
            probes = probes.reshape(-1, 2)
            member = member.reshape(-1)
            for c_pt, r0 in zip(centers_arr, radii_arr):
                member &= np.hypot(probes[:, 0] - c_pt[0], probes[:, 1] - c_pt[1]) >= r0
            vals = np.zeros(probes.shape[0])
            if np.any(member):
                vals[member] = F(probes[member])
            vals = vals.reshape(len(bnd_idx), -1)
            member = member.reshape(len(bnd_idx), -1)

            cell_int = np.sum(vals, axis=1) * (4.0 * h * h / (K * K))
            amax = np.max(np.abs(vals), axis=1)
            # integrand scale estimate must not be zero just because probes missed
            # a thin sliver: fall back on values at the crossing edges' vertices
            for row, i in enumerate(bnd_idx):
                if amax[row] == 0.0 and crossing[i].size:
                    vtx = V[crossing[i][:16]]
                    amax[row] = float(np.max(np.abs(F(vtx))))
            e_mask = 6.0 * amax * h * h / K
            leaf = (e_mask <= cfg.cell_tolerance) | (depth >= cfg.max_depth)
            has_any = np.any(member, axis=1) | np.array([crossing[i].size > 0 for i in bnd_idx])
            leaf |= ~has_any

            for row, i in enumerate(bnd_idx):
                if leaf[row]:
                    value += float(cell_int[row])
                    mask_err_sq += float(e_mask[row]) ** 2
                    n_boundary += 1
                else:
                    c = crossing[i] if crossing[i].size else cand[i]
                    for sx in (-0.5, 0.5):
                        for sy in (-0.5, 0.5):
                            child = cells[i] + np.array([sx * h, sy * h])
                            if c.size:
                                keep = _segments_overlap_box(A_edges[c], B_edges[c], child, h / 2.0)
                                next_cand.append(c[keep])
                            else:
                                next_cand.append(c)
                            next_cells.append(child)

        cells = np.asarray(next_cells, dtype=float).reshape(-1, 2)
        cand = next_cand
        h /= 2.0
        depth += 1

    stats = {
        "interior_cells": n_interior,
        "boundary_cells": n_boundary,
        "max_depth_reached": max_depth_reached,
    }
    return value, gauss_err, math.sqrt(mask_err_sq), stats


def _parity_from_anchor(
    anchor: np.ndarray,
    anchor_inside: bool,
    points: np.ndarray,
    A_edges: np.ndarray,
    B_edges: np.ndarray,
    local_edges: np.ndarray,
) -> np.ndarray:
    """Membership of in-cell points from the cell anchor's parity.

    The segments anchor -> point stay inside the cell, so only the edges
    crossing the cell (``local_edges``) can cross them; counting those
    crossings flips the anchor's even-odd parity.
    """
    if local_edges.size == 0:
        return np.full(points.shape[0], anchor_inside)
    a = A_edges[local_edges]
    b = B_edges[local_edges]
    rel = points - anchor
    da = np.cross(rel[:, None, :], (a - anchor)[None, :, :])
    db = np.cross(rel[:, None, :], (b - anchor)[None, :, :])
    e = b - a
    oc = np.cross(e, anchor - a)
    op = np.cross(e[None, :, :], points[:, None, :] - a[None, :, :])
    crossings = np.count_nonzero((da * db < 0.0) & (oc[None, :] * op < 0.0), axis=1)
    flip = (crossings % 2).astype(bool)
    return flip != anchor_inside


def _segments_overlap_box(a: np.ndarray, b: np.ndarray, center: np.ndarray, h: float) -> np.ndarray:
    """Cheap bounding-box prefilter for candidate inheritance."""
    pad = h * 1e-9 + 1e-300
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return (
        (lo[:, 0] <= center[0] + h + pad)
        & (hi[:, 0] >= center[0] - h - pad)
        & (lo[:, 1] <= center[1] + h + pad)
        & (hi[:, 1] >= center[1] - h - pad)
    )


def _polar_disk_part(F, center: np.ndarray, r_in: float, r_out: float, nphi: int, nrho: int) -> float:
    """Integral of F over the annulus r_in <= rho <= r_out about ``center``.

    Periodic trapezoid in angle, panelled Gauss in radius; the radial
    integrand F*rho stays smooth down to rho -> 0, which is what makes the
    excision-radius extrapolation clean.
    """
    n_panels = max(1, math.ceil(math.log(r_out / r_in) / math.log(4.0)))
    edges = r_in * (r_out / r_in) ** (np.arange(n_panels + 1) / n_panels)
    xg, wg = leggauss(nrho)
    phi = (np.arange(nphi) + 0.5) * (2.0 * np.pi / nphi)
    ring = np.stack([np.cos(phi), np.sin(phi)], axis=-1)

    total = 0.0
    for ra, rb in zip(edges[:-1], edges[1:]):
        rho = 0.5 * (ra + rb) + 0.5 * (rb - ra) * xg
        w = 0.5 * (rb - ra) * wg
        pts = center[None, None, :] + rho[:, None, None] * ring[None, :, :]
        vals = F(pts.reshape(-1, 2)).reshape(nrho, nphi)
        ring_means = vals.mean(axis=1) * (2.0 * np.pi)
        total += float(np.sum(w * rho * ring_means))
    return total


# The radial integrand F*rho is bounded down to the singular center (the
# excised-disk content vanishes like pi*G*eps/(a + G*eps), linear only below
# the crossover scale a/G, which for a light primary can undercut the 1e-5
# excision floor).  The limit is therefore taken by integrating the radial
# boundary layer on geometric panels down to this floor rather than by
# polynomial extrapolation across the crossover.
_DEEP_RHO = 1e-9


def _integrate_region(
    region: ClosedPolyline,
    F,
    excised: list[np.ndarray],
    forbidden: list[np.ndarray],
    cfg: QuadratureConfig,
) -> AreaIntegralResult:
    V = region.vertices
    field = _RegionField(F)

    radii: list[float] = []
    a_edges, b_edges = region.edges()
    for c in excised:
        if curvegeom.winding_number(region, c) == 0:
            raise ValueError(f"excised center {c} is not strictly inside the region")
        d_poly = float(np.min(curvegeom._point_segment_distance(c, a_edges, b_edges)))
        d_other = math.inf
        for p in list(excised) + list(forbidden):
            sep = float(np.linalg.norm(np.asarray(p) - c))
            if sep > 1e-9:
                d_other = min(d_other, sep)
        r0 = min(0.95 * d_poly, 0.45 * d_other, 0.45)
        if r0 <= 3e-5:
            raise QuadratureError(f"no room to excise about {c}: clearance {d_poly:.3e}")
        radii.append(r0)

    if excised:
        schedule = cfg.epsilon_schedule or _auto_schedule(min(radii))
        if schedule[0] >= min(radii):
            raise ValueError(
                f"largest excision radius {schedule[0]} does not fit inside the region "
                f"(seed radius {min(radii):.3e}); shrink the schedule or leave it automatic"
            )
    else:
        schedule = ()

    qt_value, gauss_err, mask_err, stats = _quadtree_integral(V, excised, radii, field, cfg)
    mask_err *= 3.0

    if not excised:
        diag = QuadratureDiagnostics(
            interior_cells=stats["interior_cells"],
            boundary_cells=stats["boundary_cells"],
            field_evaluations=field.evaluations,
            max_depth_reached=stats["max_depth_reached"],
            epsilons=(),
            epsilon_values=(),
            gauss_error=gauss_err,
            mask_error=mask_err,
            polar_error=0.0,
            extrapolation_error=0.0,
        )
        return AreaIntegralResult(value=qt_value, error_estimate=gauss_err + mask_err, diagnostics=diag)

    eps = np.asarray(schedule, dtype=float)
    centers_f = [np.asarray(c, dtype=float) for c in excised]

    # the excision-radius-to-zero limit, taken through the radial boundary layer
    value = qt_value
    polar_err = 0.0
    for c, r0 in zip(centers_f, radii):
        fine = _polar_disk_part(field, c, _DEEP_RHO, r0, cfg.phi_samples, cfg.rho_nodes)
        coarse = _polar_disk_part(field, c, _DEEP_RHO, r0, cfg.phi_samples // 2, max(8, cfg.rho_nodes // 2))
        value += fine
        polar_err += abs(fine - coarse)

    # the excised integrals along the schedule, plus the decomposition
    # cross-check: A(eps) + (disk content below eps) must reproduce the limit
    vals = np.empty(len(eps))
    spread = 0.0
    for k, e in enumerate(eps):
        total = qt_value
        recon = qt_value
        for c, r0 in zip(centers_f, radii):
            annulus = _polar_disk_part(field, c, e, r0, cfg.phi_samples, cfg.rho_nodes)
            deficit = _polar_disk_part(field, c, _DEEP_RHO, e, cfg.phi_samples, cfg.rho_nodes)
            total += annulus
            recon += annulus + deficit
        vals[k] = total
        spread = max(spread, abs(recon - value))
    if spread > max(100.0 * cfg.cell_tolerance, 1e-4 * abs(value)):
        raise ExtrapolationUnstableError(
            f"excision-radius decompositions disagree by {spread:.3e}; "
            "the singular limit is not trustworthy at this configuration"
        )

    diag = QuadratureDiagnostics(
        interior_cells=stats["interior_cells"],
        boundary_cells=stats["boundary_cells"],
        field_evaluations=field.evaluations,
        max_depth_reached=stats["max_depth_reached"],
        epsilons=tuple(float(e) for e in eps),
        epsilon_values=tuple(float(v) for v in vals),
        gauss_error=gauss_err,
        mask_error=mask_err,
        polar_error=polar_err,
        extrapolation_error=spread,
    )
    return AreaIntegralResult(
        value=value,
        error_estimate=gauss_err + mask_err + polar_err + spread,
        diagnostics=diag,
    )


def _plain_integrand(mu: float, C: float):
    def F(pts: np.ndarray) -> np.ndarray:
        g = dynamics.hill_margin(pts, mu, C, check=False)
        if np.any(g <= 0.0):
            raise RegionExitsHillRegionError(
                "quadrature node with 2*omega - C <= 0: region exits the Hill region"
            )
        grad = dynamics.omega_gradient(pts, mu, check=False)
        grad_sq = np.sum(grad * grad, axis=-1)
        return dynamics.omega_laplacian(pts, mu, check=False) / g - 2.0 * grad_sq / g**2

    return F


def _lifted_integrand(mu: float, C: float, center: np.ndarray, n: int):
    """Integrand of the lifted identity: lap(ln f) pulled back through the nth-power map.

    For the conformal map phi(z) = center + (z - center)^n,
    lap(ln f o phi)(z) = lap(ln f)(phi(z)) * |phi'(z)|^2 with
    |phi'(z)|^2 = n^2 |z - center|^(2(n-1)).
    """
    plain = _plain_integrand(mu, C)
    cz = complex(center[0], center[1])

    def F(pts: np.ndarray) -> np.ndarray:
        z = pts[:, 0] + 1j * pts[:, 1] - cz
        w = z**n + cz
        image = np.stack([w.real, w.imag], axis=-1)
        jac = float(n) ** 2 * np.abs(z) ** (2 * (n - 1))
        return plain(image) * jac

    return F


def area_integral(region: ClosedPolyline, mu, C, excised=(), cfg: QuadratureConfig | None = None) -> AreaIntegralResult:
    """Adaptive quadrature of lap(ln f) over the region bounded by a simple closed polyline.

    ``excised`` lists the primary centers strictly inside the region; the
    integral is evaluated with each surrounded by a shrinking excision disk
    and extrapolated to zero excision radius (the improper-integral value).
    """
    cfg = cfg or QuadratureConfig()
    mu = dynamics._mu_value(mu)
    excised_pts = [np.asarray(c, dtype=float) for c in excised]

    forbidden = []
    for p in dynamics.primary_positions(mu):
        if not any(np.linalg.norm(p - c) < 1e-9 for c in excised_pts):
            forbidden.append(p)
            try:
                w = curvegeom.winding_number(region, p)
            except PointOnCurveError as exc:
                raise RegionExitsHillRegionError(f"region boundary passes through primary {p}") from exc
            if w != 0:
                raise RegionExitsHillRegionError(
                    f"primary at {p} lies inside the region but is not excised"
                )
    return _integrate_region(region, _plain_integrand(mu, C), excised_pts, forbidden, cfg)


# ---------------------------------------------------------------------------
# Lemma-style excision limit check


def lemma22_limit_check(mu, C, primary, epsilons, n_samples: int = 720) -> list[tuple[float, float]]:
    """Circle averages of eps * grad(ln f) . n about a primary, with n the inward normal.

    The averages approach 1/2 as the circle radius shrinks, at first order
    in the radius; this is the excision constant behind the k*pi terms.
    """
    mu = dynamics._mu_value(mu)
    primary = np.asarray(primary, dtype=float)
    t = (np.arange(n_samples) + 0.5) * (2.0 * np.pi / n_samples)
    ring = np.stack([np.cos(t), np.sin(t)], axis=-1)
    rows = []
    for eps in epsilons:
        pts = primary[None, :] + float(eps) * ring
        grad_ln_f = dynamics.log_speed_gradient(pts, mu, C)
        vals = float(eps) * np.sum(grad_ln_f * (-ring), axis=-1)
        rows.append((float(eps), float(np.mean(vals))))
    return rows


# ---------------------------------------------------------------------------
# classification


_CASE_K_TABLE = {
    "simple-clear": lambda n: 2,
    "simple-one-primary": lambda n: 1,
    "simple-both-primaries": lambda n: 0,
    "n-simple-primary": lambda n: n,
    "n-simple-general": lambda n: 2 * n,
}


@dataclass(frozen=True)
class TheoremCase:
    """Which version of the period-area identity applies to an orbit.

    ``k`` always comes out of the one formula k = 2n - m (n the covering
    index, m the primary encirclements counted with multiplicity); the
    per-case table is asserted on construction as a cross-check.
    """

    covering_index: int
    enclosed_primaries: tuple[tuple[str, int], ...]
    orientation: str
    k: int
    sign: int
    theorem_id: str
    center: np.ndarray | None = None
    center_kind: str | None = None

    def __post_init__(self) -> None:
        if self.sign not in (-1, 1) or (self.sign == 1) != (self.orientation == "clockwise"):
            raise ValueError("sign must be +1 for clockwise and -1 for counterclockwise")
        if self.k != 2 * self.covering_index - self.singular_multiplicity:
            raise ValueError("k does not satisfy k = 2n - (primary encirclements)")
        expected = _CASE_K_TABLE[self.theorem_id](self.covering_index)
        if self.k != expected:
            raise ValueError(f"k = {self.k} disagrees with the {self.theorem_id} case (expected {expected})")

    @property
    def singular_multiplicity(self) -> int:
        """Total primary encirclements, counted with multiplicity."""
        return sum(m for _, m in self.enclosed_primaries)


_SIMPLE_IDS = {0: "simple-clear", 1: "simple-one-primary", 2: "simple-both-primaries"}


def _classify_with_geometry(orbit, extra_centers=(), samples: int | None = None):
    pl = curvegeom.polyline_from_orbit(orbit, samples)
    p1, p2 = dynamics.primary_positions(orbit.mu)
    w1 = curvegeom.winding_number(pl, p1)
    w2 = curvegeom.winding_number(pl, p2)
    clockwise = curvegeom.signed_area(pl) < 0.0

    if curvegeom.is_simple(pl):
        if abs(w1) > 1 or abs(w2) > 1:
            raise UnclassifiableOrbitError(
                f"simple curve with winding numbers ({w1}, {w2}); geometry is inconsistent"
            )
        enclosed = tuple(
            (name, abs(w)) for name, w in (("primary1", w1), ("primary2", w2)) if w != 0
        )
        m = abs(w1) + abs(w2)
        case = TheoremCase(
            covering_index=1,
            enclosed_primaries=enclosed,
            orientation="clockwise" if clockwise else "counterclockwise",
            k=2 - m,
            sign=1 if clockwise else -1,
            theorem_id=_SIMPLE_IDS[m],
        )
        return case, pl, None

    candidates = [(p1, "primary1"), (p2, "primary2")] + [
        (np.asarray(c, dtype=float), "general") for c in extra_centers
    ]
    for center, kind in candidates:
        try:
            wc = curvegeom.winding_number(pl, center)
        except PointOnCurveError:
            continue
        n = abs(wc)
        if n < 2:
            continue
        if kind == "primary1" and w2 != 0:
            continue
        if kind == "primary2" and w1 != 0:
            continue
        if kind == "general" and (w1 != 0 or w2 != 0):
            continue
        try:
            lifted = curvegeom.lift(pl, center, n)
        except (NonSimpleLiftingError, WindingMismatchError, ValueError):
            continue
        if kind == "general":
            enclosed: tuple = ()
            theorem_id = "n-simple-general"
        else:
            enclosed = ((kind, n),)
            theorem_id = "n-simple-primary"
        m = sum(mult for _, mult in enclosed)
        case = TheoremCase(
            covering_index=n,
            enclosed_primaries=enclosed,
            orientation="clockwise" if wc < 0 else "counterclockwise",
            k=2 * n - m,
            sign=1 if wc < 0 else -1,
            theorem_id=theorem_id,
            center=center,
            center_kind=kind,
        )
        return case, pl, lifted
    raise UnclassifiableOrbitError(
        "orbit is neither simple nor n-simple about a primary "
        "(supply extra_centers to try general lifting points)"
    )


def classify_case(orbit, extra_centers=(), samples: int | None = None) -> TheoremCase:
    """Select which enclosure/orientation case of the period-area identity applies."""
    case, _, _ = _classify_with_geometry(orbit, extra_centers, samples)
    return case


# ---------------------------------------------------------------------------
# full verification


@dataclass(frozen=True)
class VerificationReport:
    """Both sides of 2T = sign*(k*pi + I) plus the Stokes cross-check."""

    mu: float
    jacobi: float
    period: float
    closure_residual: float
    case: TheoremCase
    two_t: float
    theta_total_change: float
    theta_ode_rms: float
    boundary_integral: float
    boundary_integral_direct: float
    k_pi_term: float
    singular_correction: float
    area_integral: float
    area_error_estimate: float
    residual_identity: float
    residual_stokes: float
    diagnostics: QuadratureDiagnostics | None
    boundary_only: bool = False
    quadrature_failure: str | None = None


def verify(
    orbit,
    cfg: QuadratureConfig | None = None,
    extra_centers=(),
    samples: int | None = None,
    auto_refine: bool = True,
) -> VerificationReport:
    """Run the full period-area verification on a closed orbit.

    Orbits with closure residual above 1e-8 are first tightened by Newton
    shooting (the theta bookkeeping needs the endpoint velocities to match
    to ~1e-9).  If the area quadrature fails, a boundary-only report is
    returned with the failure recorded.
    """
    cfg = cfg or QuadratureConfig()
    if auto_refine and orbit.closure_residual > 1e-8:
        from .periodicity import refine_orbit

        orbit = refine_orbit(orbit.initial_state, orbit.mu, orbit.period)

    case, pl, lifted = _classify_with_geometry(orbit, extra_centers, samples)
    profile = reconstruct_theta(orbit, samples)
    flux = boundary_integral(orbit, profile)
    flux_direct = boundary_integral_direct(orbit, profile)
    two_t = 2.0 * orbit.period
    k_pi = case.k * math.pi
    singular = case.singular_multiplicity * math.pi

    area_value = math.nan
    area_err = math.nan
    diag = None
    failure = None
    try:
        if lifted is None:
            p1, p2 = dynamics.primary_positions(orbit.mu)
            excised = [p1 if name == "primary1" else p2 for name, _ in case.enclosed_primaries]
            result = area_integral(pl, orbit.mu, orbit.c, excised, cfg)
        else:
            center = case.center
            n = case.covering_index
            F = _lifted_integrand(orbit.mu, orbit.c, center, n)
            excised = [center] if case.center_kind in ("primary1", "primary2") else []
            forbidden = _lift_forbidden_points(orbit.mu, center, n, lifted.beta)
            result = _integrate_region(lifted.beta, F, excised, forbidden, cfg)
        area_value = result.value
        area_err = result.error_estimate
        diag = result.diagnostics
    except QuadratureError as exc:
        failure = str(exc)

    if failure is None:
        residual_identity = abs(two_t - case.sign * (k_pi + area_value))
        residual_stokes = abs(flux + singular - area_value)
    else:
        residual_identity = math.nan
        residual_stokes = math.nan

    return VerificationReport(
        mu=orbit.mu,
        jacobi=orbit.c,
        period=orbit.period,
        closure_residual=orbit.closure_residual,
        case=case,
        two_t=two_t,
        theta_total_change=profile.total_change,
        theta_ode_rms=profile.ode_rms_residual,
        boundary_integral=flux,
        boundary_integral_direct=flux_direct,
        k_pi_term=k_pi,
        singular_correction=singular,
        area_integral=area_value,
        area_error_estimate=area_err,
        residual_identity=residual_identity,
        residual_stokes=residual_stokes,
        diagnostics=diag,
        boundary_only=failure is not None,
        quadrature_failure=failure,
    )


def _lift_forbidden_points(mu: float, center: np.ndarray, n: int, beta: ClosedPolyline) -> list[np.ndarray]:
    """Preimages of the primaries under the nth-power map; none may sit inside the lifted region."""
    forbidden: list[np.ndarray] = []
    cz = complex(center[0], center[1])
    for p in dynamics.primary_positions(mu):
        d = complex(p[0], p[1]) - cz
        if abs(d) < 1e-12:
            continue
        r = abs(d) ** (1.0 / n)
        base = math.atan2(d.imag, d.real)
        for k in range(n):
            ang = (base + 2.0 * math.pi * k) / n
            pre = np.array([center[0] + r * math.cos(ang), center[1] + r * math.sin(ang)])
            forbidden.append(pre)
            try:
                if curvegeom.winding_number(beta, pre) != 0:
                    raise RegionExitsHillRegionError(
                        f"a preimage of primary {p} lies inside the lifted region"
                    )
            except PointOnCurveError as exc:
                raise RegionExitsHillRegionError(
                    f"lifted region boundary passes through a preimage of primary {p}"
                ) from exc
    return forbidden


# ---------------------------------------------------------------------------
# direction analysis near the triangular points


@dataclass(frozen=True)
class TriangularPointReport:
    """Sign analysis of lap(ln f) on disks about L4 or L5."""

    which: str
    position: np.ndarray
    c0: float
    jacobi: float
    regime: str
    radii: tuple[float, ...]
    disk_extrema: tuple[float, ...]
    chosen_radius: float | None
    verdict: str
    delta_ln_f_center: float | None


@dataclass(frozen=True)
class DirectionAnalysis:
    l4: TriangularPointReport
    l5: TriangularPointReport


_DEFAULT_RADII = (0.2, 0.1, 0.05, 0.02, 0.01, 0.005)


def _disk_offsets(n_radial: int = 24, n_angular: int = 48) -> np.ndarray:
    r = (np.arange(n_radial) + 1.0) / n_radial
    t = (np.arange(n_angular) + 0.5) * (2.0 * np.pi / n_angular)
    grid = (r[:, None, None] * np.stack([np.cos(t), np.sin(t)], axis=-1)[None, :, :]).reshape(-1, 2)
    return np.vstack([[0.0, 0.0], grid])


def l4_direction_analysis(mu, C, radii=None) -> DirectionAnalysis:
    """Orientation constraint for periodic orbits near the triangular points.

    For C below the critical value c0 = 3 - mu + mu^2, lap(ln f) is strictly
    positive on a disk about L4/L5; a counterclockwise periodic orbit inside
    that disk would force 2T = -(2n*pi + positive) < 0, so any such orbit is
    clockwise.  For C above c0 a neighborhood is outside the Hill region and
    carries no orbit at all.  L5 mirrors L4 through the y2 -> -y2 symmetry.
    """
    mu = dynamics._mu_value(mu)
    C = float(C)
    radii = tuple(float(r) for r in (radii if radii is not None else _DEFAULT_RADII))
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    radii = tuple(sorted(radii, reverse=True))

    c0 = 3.0 - mu + mu * mu
    if abs(C - c0) < 1e-12:
        raise CriticalValueError(f"C = {C} coincides with the critical value c0 = {c0}")

    offsets = _disk_offsets()
    reports = {}
    for which in ("L4", "L5"):
        point = dynamics.lagrange_triangular(mu, which)
        flip = 1.0 if which == "L4" else -1.0
        local = offsets * np.array([1.0, flip])
        if C > c0:
            extrema = []
            chosen = None
            for r in radii:
                pts = point.position[None, :] + r * local
                margin_max = float(np.max(dynamics.hill_margin(pts, mu, C, check=False)))
                extrema.append(margin_max)
                if chosen is None and margin_max < 0.0:
                    chosen = r
            reports[which] = TriangularPointReport(
                which=which,
                position=point.position,
                c0=c0,
                jacobi=C,
                regime="supercritical",
                radii=radii,
                disk_extrema=tuple(extrema),
                chosen_radius=chosen,
                verdict="no orbit: neighborhood outside the Hill region",
                delta_ln_f_center=None,
            )
        else:
            extrema = []
            chosen = None
            for r in radii:
                pts = point.position[None, :] + r * local
                g = dynamics.hill_margin(pts, mu, C, check=False)
                if np.any(g <= 0.0):
                    extrema.append(-math.inf)
                    continue
                grad = dynamics.omega_gradient(pts, mu, check=False)
                lap = dynamics.omega_laplacian(pts, mu, check=False)
                vals = lap / g - 2.0 * np.sum(grad * grad, axis=-1) / g**2
                vmin = float(np.min(vals))
                extrema.append(vmin)
                if chosen is None and vmin > 0.0:
                    chosen = r
            reports[which] = TriangularPointReport(
                which=which,
                position=point.position,
                c0=c0,
                jacobi=C,
                regime="subcritical",
                radii=radii,
                disk_extrema=tuple(extrema),
                chosen_radius=chosen,
                verdict=(
                    "clockwise only: lap(ln f) > 0 on the disk"
                    if chosen is not None
                    else "inconclusive at the radii tried"
                ),
                delta_ln_f_center=3.0 / (c0 - C),
            )
    return DirectionAnalysis(l4=reports["L4"], l5=reports["L5"])
