"""Static SVG plots of orbits, primaries, triangular points and Hill regions."""

from __future__ import annotations

import numpy as np

from . import dynamics

__all__ = ["save_orbit_svg", "save_states_svg", "save_lift_svg"]


def _axes_setup():
    import matplotlib

    matplotlib.use("Agg", force=False)
    matplotlib.rcParams["svg.hashsalt"] = "pcr3bp"
    import matplotlib.pyplot as plt

    return plt


def _draw_markers(ax, mu: float) -> None:
    p1, p2 = dynamics.primary_positions(mu)
    ax.plot(*p1, marker="o", ms=7, color="#d4a017", ls="none", label="heavy primary")
    ax.plot(*p2, marker="o", ms=4, color="#b0552d", ls="none", label="light primary")
    for which in ("L4", "L5"):
        point = dynamics.lagrange_triangular(mu, which)
        ax.plot(*point.position, marker="+", ms=8, color="0.4", ls="none")
        ax.annotate(which, point.position, textcoords="offset points", xytext=(4, 4), fontsize=8, color="0.4")


def _shade_forbidden(ax, mu: float, C: float, xlim, ylim) -> None:
    xs = np.linspace(*xlim, 400)
    ys = np.linspace(*ylim, 400)
    X, Y = np.meshgrid(xs, ys)
    pts = np.stack([X, Y], axis=-1)
    margin = dynamics.hill_margin(pts, mu, C, check=False)
    ax.contourf(X, Y, margin, levels=[-np.inf, 0.0], colors=["0.88"])


def save_orbit_svg(path, orbit, hill_shading: bool = True, title: str | None = None) -> None:
    """Orbit over one period with primaries, triangular points and forbidden-region shading."""
    _, states = orbit.sample(2048, endpoint=True)
    save_states_svg(path, orbit.mu, orbit.c, states, hill_shading=hill_shading, title=title)


def save_states_svg(path, mu, C, states, hill_shading: bool = True, title: str | None = None) -> None:
    """Trajectory plot with primaries, triangular points and forbidden-region shading."""
    plt = _axes_setup()
    states = np.asarray(states, dtype=float)
    xs, ys = states[:, 0], states[:, 1]
    span = max(xs.max() - xs.min(), ys.max() - ys.min())
    pad = 0.35 * span + 1e-3
    xlim = (xs.min() - pad, xs.max() + pad)
    ylim = (ys.min() - pad, ys.max() + pad)

    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    if hill_shading:
        _shade_forbidden(ax, mu, C, xlim, ylim)
    ax.plot(xs, ys, lw=1.0, color="#1f4e79")
    ax.plot(xs[0], ys[0], marker=".", color="#1f4e79", ms=6)
    _draw_markers(ax, mu)
    ax.set_xlim(*xlim)
    ax.set_ylim(*ylim)
    ax.set_aspect("equal")
    ax.set_xlabel("y1")
    ax.set_ylabel("y2")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def save_lift_svg(path, orbit, lifted, title: str | None = None) -> None:
    """Orbit and its nth-root lifting side by side."""
    plt = _axes_setup()
    _, states = orbit.sample(2048, endpoint=True)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.8))
    ax1.plot(states[:, 0], states[:, 1], lw=0.9, color="#1f4e79")
    _draw_markers(ax1, orbit.mu)
    ax1.set_title("orbit (winds %d times about the center)" % abs(lifted.n), fontsize=9)

    beta = lifted.beta.vertices
    ax2.plot(
        np.append(beta[:, 0], beta[0, 0]), np.append(beta[:, 1], beta[0, 1]), lw=0.9, color="#7a1f2b"
    )
    ax2.plot(*lifted.center, marker="x", ms=7, color="0.3", ls="none")
    ax2.set_title(f"{lifted.n}th-root lifting (simple)", fontsize=9)
    for ax in (ax1, ax2):
        ax.set_aspect("equal")
        ax.set_xlabel("y1")
        ax.set_ylabel("y2")
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
