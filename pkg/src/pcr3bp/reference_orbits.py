"""Reference periodic orbits of the Sun-Jupiter system (mu ~ 9.53875e-4).

The initial conditions are published values for four qualitatively different
periodic solutions; the quoted Jacobi constants pin the mass ratio actually
used to full precision, 9.5387535e-4 (its 6-significant-figure rounding is
the familiar 9.53875e-4).  With the full-precision ratio the first two
orbits close to ~1e-11 and the last two to ~1e-4 over one period.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import RotatingState

__all__ = ["SUN_JUPITER_MU", "SUN_JUPITER_MU_ROUNDED", "REFERENCE_ORBITS", "ReferenceOrbit"]

SUN_JUPITER_MU = 0.00095387535
SUN_JUPITER_MU_ROUNDED = 0.000953875


@dataclass(frozen=True)
class ReferenceOrbit:
    """Initial condition plus a search window bracketing the known period."""

    label: str
    initial_state: RotatingState
    hint: tuple[float, float]
    mu: float = SUN_JUPITER_MU


REFERENCE_ORBITS: dict[int, ReferenceOrbit] = {
    1: ReferenceOrbit(
        label="simple clockwise loop near the leading triangular point",
        initial_state=RotatingState(
            0.487957127501505, 0.84849821703225, -0.036041155996589, 0.02072666577125
        ),
        hint=(5.0, 8.0),
    ),
    2: ReferenceOrbit(
        label="tight counterclockwise loop about the light primary",
        initial_state=RotatingState(1.01159848498974, 0.0, 0.0, 0.26384566980412),
        hint=(0.1, 0.5),
    ),
    3: ReferenceOrbit(
        label="wide clockwise loop enclosing both primaries",
        initial_state=RotatingState(
            1.285278846123773, 3.401751107285172, 3.892316782809678, -1.47062858674288
        ),
        hint=(4.5, 6.5),
    ),
    4: ReferenceOrbit(
        label="threefold counterclockwise loop about the heavy primary",
        initial_state=RotatingState(
            0.3964805517652452, -0.07419606744562268, 0.2120527494053103, 1.133143493746107
        ),
        hint=(5.0, 8.0),
    ),
}
