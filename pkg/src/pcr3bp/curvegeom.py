"""Geometry of closed planar curves sampled from orbits.

Orientation, signed area, winding numbers, simplicity testing and the
conformal nth-root lifting of curves that wind n times about a center.
A ClosedPolyline stores its vertices only; the closing edge from the last
vertex back to the first is implicit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonSimpleLiftingError, PointOnCurveError, WindingMismatchError

__all__ = [
    "ClosedPolyline",
    "WindingProfile",
    "LiftedCurve",
    "polyline_from_orbit",
    "signed_area",
    "winding_number",
    "turning_number",
    "orientation",
    "winding_profile",
    "is_simple",
    "push_forward",
    "lift",
]

SIMPLICITY_TOLERANCE = 1e-10
_ON_CURVE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ClosedPolyline:
    """Discretized closed curve: ordered vertices, implicit closing edge, optional time stamps."""

    vertices: np.ndarray
    times: np.ndarray | None = None

    def __post_init__(self) -> None:
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError(f"vertices must have shape (m, 2), got {v.shape}")
        if v.shape[0] < 16:
            raise ValueError(f"a closed polyline needs at least 16 vertices, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        if np.any(np.all(v == np.roll(v, -1, axis=0), axis=1)[:-1]):
            raise ValueError("consecutive vertices must be distinct")
        if np.all(v[0] == v[-1]):
            raise ValueError("do not repeat the first vertex at the end; the closing edge is implicit")
        object.__setattr__(self, "vertices", v)
        if self.times is not None:
            t = np.asarray(self.times, dtype=float)
            if t.shape != (v.shape[0],):
                raise ValueError("times must have one entry per vertex")
            object.__setattr__(self, "times", t)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge start and end points, including the closing edge."""
        v = self.vertices
        return v, np.roll(v, -1, axis=0)

    def reversed(self) -> "ClosedPolyline":
        times = None if self.times is None else self.times[::-1].copy()
        return ClosedPolyline(self.vertices[::-1].copy(), times)


@dataclass(frozen=True)
class WindingProfile:
    """Enclosure data of a closed curve relative to the two primaries."""

    w_primary1: int
    w_primary2: int
    turning: int
    orientation: str


@dataclass(frozen=True)
class LiftedCurve:
    """nth-root lifting of a curve about ``center``.

    ``beta`` is the simple preimage; pushing it forward through
    w -> center + (w - center)**n reproduces the original curve.
    ``q`` and ``gamma`` are the radial and unwrapped angular profiles of
    the original curve about the center.
    """

    center: np.ndarray
    n: int
    beta: ClosedPolyline
    q: np.ndarray
    gamma: np.ndarray
    roundtrip_error: float


def polyline_from_orbit(orbit, n: int | None = None) -> ClosedPolyline:
    """Sample one period of a ClosedOrbit into a polyline (endpoint excluded)."""
    ts, states = orbit.sample(n, endpoint=False)
    return ClosedPolyline(states[:, :2].copy(), ts.copy())


def signed_area(c: ClosedPolyline) -> float:
    """Shoelace area; positive iff the curve runs counterclockwise."""
    x, y = c.vertices[:, 0], c.vertices[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return float(0.5 * np.sum(x * yn - xn * y))


def _angle_sum(rel: np.ndarray) -> float:
    """Sum of signed turn angles between consecutive vectors (closing turn included)."""
    nxt = np.roll(rel, -1, axis=0)
    cross = rel[:, 0] * nxt[:, 1] - rel[:, 1] * nxt[:, 0]
    dot = rel[:, 0] * nxt[:, 0] + rel[:, 1] * nxt[:, 1]
    return float(np.sum(np.arctan2(cross, dot)))


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from point p to segments a->b (vectorized over segments)."""
    ab = b - a
    ap = p - a
    denom = np.sum(ab * ab, axis=-1)
    t = np.clip(np.divide(np.sum(ap * ab, axis=-1), denom, out=np.zeros_like(denom), where=denom > 0), 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.linalg.norm(p - closest, axis=-1)


def winding_number(c: ClosedPolyline, p) -> int:
    """Signed number of revolutions of the curve about the point p."""
    p = np.asarray(p, dtype=float)
    a, b = c.edges()
    if np.min(_point_segment_distance(p, a, b)) <= _ON_CURVE_TOLERANCE:
        raise PointOnCurveError(f"point {p} lies on the curve")
    total = _angle_sum(c.vertices - p)
    w = total / (2.0 * np.pi)
    w_int = int(np.rint(w))
    if abs(w - w_int) > 1e-6:
        raise PointOnCurveError(f"winding number about {p} did not settle to an integer: {w}")
    return w_int


def turning_number(c: ClosedPolyline) -> int:
    """Signed number of revolutions of the edge direction along the curve."""
    a, b = c.edges()
    total = _angle_sum(b - a)
    return int(np.rint(total / (2.0 * np.pi)))


def orientation(c: ClosedPolyline) -> str:
    return "counterclockwise" if signed_area(c) > 0.0 else "clockwise"


def winding_profile(c: ClosedPolyline, mu) -> WindingProfile:
    """Winding numbers about both primaries plus turning number and orientation."""
    from . import dynamics

    p1, p2 = dynamics.primary_positions(mu)
    return WindingProfile(
        w_primary1=winding_number(c, p1),
        w_primary2=winding_number(c, p2),
        turning=turning_number(c),
        orientation=orientation(c),
    )


def _segment_pair_distance(a1, b1, a2, b2) -> np.ndarray:
    """Min distance between segment pairs a1->b1 and a2->b2 (vectorized)."""
    return np.minimum.reduce(
        [
            _point_segment_distance_many(a2, a1, b1),
            _point_segment_distance_many(b2, a1, b1),
            _point_segment_distance_many(a1, a2, b2),
            _point_segment_distance_many(b1, a2, b2),
        ]
    )


def _point_segment_distance_many(p, a, b) -> np.ndarray:
    ab = b - a
    ap = p - a
    denom = np.sum(ab * ab, axis=-1)
    t = np.clip(np.divide(np.sum(ap * ab, axis=-1), denom, out=np.zeros_like(denom), where=denom > 0), 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.linalg.norm(p - closest, axis=-1)


def is_simple(c: ClosedPolyline, eps: float = SIMPLICITY_TOLERANCE) -> bool:
    """True iff no two non-adjacent edges intersect or pass within ``eps`` of each other.

    Pairwise sweep with bounding-box prefiltering, blocked for vectorization,
    with early exit on the first intersection.
    """
    a, b = c.edges()
    m = c.n_vertices
    e = b - a
    lengths = np.linalg.norm(e, axis=1)

    lo = np.minimum(a, b) - eps
    hi = np.maximum(a, b) + eps

    block = 256
    idx = np.arange(m)
    for start in range(0, m, block):
        rows = idx[start : min(start + block, m)]
        # unordered non-adjacent pairs: j >= i + 2, excluding the wrap pair (0, m-1)
        pair_ok = idx[None, :] >= rows[:, None] + 2
        if start == 0:
            pair_ok[0, m - 1] = False
        box = (
            (lo[rows, None, 0] <= hi[None, :, 0])
            & (lo[None, :, 0] <= hi[rows, None, 0])
            & (lo[rows, None, 1] <= hi[None, :, 1])
            & (lo[None, :, 1] <= hi[rows, None, 1])
        )
        ii, jj = np.nonzero(pair_ok & box)
        if ii.size == 0:
            continue
        ii = rows[ii]

        e1, e2 = e[ii], e[jj]
        d1 = np.cross(e1, a[jj] - a[ii])
        d2 = np.cross(e1, b[jj] - a[ii])
        d3 = np.cross(e2, a[ii] - a[jj])
        d4 = np.cross(e2, b[ii] - a[jj])
        if np.any((d1 * d2 < 0.0) & (d3 * d4 < 0.0)):
            return False

        l1 = np.maximum(lengths[ii], 1e-300)
        l2 = np.maximum(lengths[jj], 1e-300)
        grazing = (
            (np.minimum(np.abs(d1), np.abs(d2)) <= eps * l1)
            | (np.minimum(np.abs(d3), np.abs(d4)) <= eps * l2)
        )
        if np.any(grazing):
            k = np.nonzero(grazing)[0]
            dist = _segment_pair_distance(a[ii[k]], b[ii[k]], a[jj[k]], b[jj[k]])
            if np.any(dist <= eps):
                return False
    return True


def push_forward(obj, center, n: int):
    """Image under the complex nth-power map about ``center``: z -> center + (z - center)**n."""
    center = np.asarray(center, dtype=float)
    if isinstance(obj, ClosedPolyline):
        return ClosedPolyline(push_forward(obj.vertices, center, n), obj.times)
    pts = np.asarray(obj, dtype=float)
    z = (pts[..., 0] - center[0]) + 1j * (pts[..., 1] - center[1])
    w = z**n
    return np.stack([center[0] + w.real, center[1] + w.imag], axis=-1)


def lift(c: ClosedPolyline, center, n: int) -> LiftedCurve:
    """nth-root lifting of a curve winding n times about ``center``.

    Unwraps the angular profile gamma(t) of the curve about the center and
    builds beta(t) = center + q**(1/n) * (cos(gamma/n), sin(gamma/n)) with
    the principal positive real root.  The result must be simple (otherwise
    the input is not n-simple) and must push forward back onto the input
    to 1e-9.
    """
    center = np.asarray(center, dtype=float)
    n = int(n)
    if n < 1:
        raise ValueError("covering index n must be a positive integer")

    w = winding_number(c, center)
    if abs(w) != n:
        raise WindingMismatchError(f"curve winds {w} times about {center}, expected +-{n}")

    rel = c.vertices - center
    q = np.hypot(rel[:, 0], rel[:, 1])
    gamma = np.unwrap(np.arctan2(rel[:, 1], rel[:, 0]))
    steps = np.abs(np.diff(gamma))
    if steps.size and np.max(steps) >= np.pi / 2.0:
        raise ValueError(
            "consecutive samples subtend >= pi/2 about the center; "
            "resample the curve more densely before lifting"
        )

    if n == 1:
        beta = ClosedPolyline(c.vertices.copy(), None if c.times is None else c.times.copy())
        return LiftedCurve(center=center, n=1, beta=beta, q=q, gamma=gamma, roundtrip_error=0.0)

    root = q ** (1.0 / n)
    phase = gamma / n
    beta_vertices = np.stack(
        [center[0] + root * np.cos(phase), center[1] + root * np.sin(phase)], axis=-1
    )
    beta = ClosedPolyline(beta_vertices, None if c.times is None else c.times.copy())

    roundtrip = push_forward(beta_vertices, center, n)
    roundtrip_error = float(np.max(np.linalg.norm(roundtrip - c.vertices, axis=1)))
    if roundtrip_error > 1e-9:
        raise NonSimpleLiftingError(
            f"lifting does not push forward onto the curve (max error {roundtrip_error:.3e})"
        )
    if not is_simple(beta):
        raise NonSimpleLiftingError(
            f"the {n}th-root preimage about {center} self-intersects; curve is not {n}-simple"
        )
    return LiftedCurve(center=center, n=n, beta=beta, q=q, gamma=gamma, roundtrip_error=roundtrip_error)
