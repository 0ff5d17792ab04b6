"""Shared fixtures: the four reference orbits and their verification reports.

Detection and verification are expensive enough that everything is computed
once per session and reused across test modules.
"""

from __future__ import annotations

import numpy as np
import pytest

from pcr3bp import detect_period, refine_orbit, verify
from pcr3bp.reference_orbits import REFERENCE_ORBITS, SUN_JUPITER_MU

# periods and Jacobi constants as published for the four reference orbits
QUOTED = {
    1: {"T": 6.3036094149426, "C": 2.9986240063314, "area": 6.32403},
    2: {"T": 0.30139544664015, "C": 3.0790227765880, "area": -3.74433},
    3: {"T": 5.4912835927302, "C": -3.5390576031917, "area": 10.9823},
    4: {"T": 6.2849221865548, "C": 3.7789562336238, "area": -21.9944},
}


@pytest.fixture(scope="session")
def mu():
    return SUN_JUPITER_MU


@pytest.fixture(scope="session")
def example_orbits():
    """Detected (not refined) orbits for the four reference initial conditions."""
    orbits = {}
    for i, ref in REFERENCE_ORBITS.items():
        orbits[i] = detect_period(ref.initial_state, ref.mu, hint=ref.hint)
    return orbits


@pytest.fixture(scope="session")
def refined_orbits(example_orbits):
    """Shooting-refined versions (identity bookkeeping needs tight closure)."""
    refined = {}
    for i, orbit in example_orbits.items():
        if orbit.closure_residual > 1e-8:
            refined[i] = refine_orbit(orbit.initial_state, orbit.mu, orbit.period)
        else:
            refined[i] = orbit
    return refined


@pytest.fixture(scope="session")
def example_reports(example_orbits):
    """Full verification reports for the four reference orbits."""
    return {i: verify(orbit) for i, orbit in example_orbits.items()}
