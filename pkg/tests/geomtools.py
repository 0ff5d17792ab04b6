"""Small polyline builders used across test modules."""

from __future__ import annotations

import numpy as np

from pcr3bp.curvegeom import ClosedPolyline


def densify(corners: np.ndarray, per_edge: int = 5) -> ClosedPolyline:
    """Closed polyline through the given corners with collinear points added on each edge."""
    corners = np.asarray(corners, dtype=float)
    pts = []
    for a, b in zip(corners, np.roll(corners, -1, axis=0)):
        for k in range(per_edge):
            pts.append(a + (b - a) * k / per_edge)
    return ClosedPolyline(np.asarray(pts))


def square(ccw: bool = True, per_edge: int = 5) -> ClosedPolyline:
    corners = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    if not ccw:
        corners = corners[::-1]
    return densify(corners, per_edge)


def bowtie(per_edge: int = 5) -> ClosedPolyline:
    corners = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    return densify(corners, per_edge)


def circle(center=(0.0, 0.0), radius: float = 1.0, n: int = 1000, ccw: bool = True, loops: int = 1) -> ClosedPolyline:
    t = np.linspace(0.0, 2.0 * np.pi * loops, n, endpoint=False)
    if not ccw:
        t = -t
    center = np.asarray(center, dtype=float)
    pts = center + radius * np.stack([np.cos(t), np.sin(t)], axis=-1)
    return ClosedPolyline(pts, t)


def fourier_loop(rng: np.random.Generator, center, base_radius: float, n: int = 2048):
    """Random smooth star-shaped loop r(s) = R(1 + sum a_k cos(k s + phase)); returns
    (polyline, positions, unnormalized outward normals * ds) sampled at n points."""
    center = np.asarray(center, dtype=float)
    ks = np.array([1, 2, 3])
    amps = base_radius * rng.uniform(0.02, 0.08, size=3)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=3)
    s = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    r = base_radius + np.sum(amps[:, None] * np.cos(ks[:, None] * s[None, :] + phases[:, None]), axis=0)
    dr = -np.sum(amps[:, None] * ks[:, None] * np.sin(ks[:, None] * s[None, :] + phases[:, None]), axis=0)
    cos_s, sin_s = np.cos(s), np.sin(s)
    pts = center + np.stack([r * cos_s, r * sin_s], axis=-1)
    tangent = np.stack([dr * cos_s - r * sin_s, dr * sin_s + r * cos_s], axis=-1)
    # counterclockwise curve: outward normal is the tangent rotated by -90 degrees
    normal_ds = np.stack([tangent[:, 1], -tangent[:, 0]], axis=-1)
    return ClosedPolyline(pts, s), pts, normal_ds
