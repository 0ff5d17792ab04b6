"""Field-level checks: closed forms against finite differences and published values."""

import math

import numpy as np
import pytest

from pcr3bp import dynamics
from pcr3bp.dynamics import (
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
from pcr3bp.errors import DomainError
from pcr3bp.reference_orbits import REFERENCE_ORBITS, SUN_JUPITER_MU


def fd_gradient(f, y, h=1e-5):
    g = np.zeros(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        g[i] = (f(y + e) - f(y - e)) / (2 * h)
    return g


def fd_laplacian(f, y, h):
    return (f(y + [h, 0]) + f(y - [h, 0]) + f(y + [0, h]) + f(y - [0, h]) - 4 * f(y)) / h**2


def fd_laplacian_richardson(f, y, h=1e-4):
    coarse = fd_laplacian(f, y, h)
    fine = fd_laplacian(f, y, h / 2)
    return (4 * fine - coarse) / 3


def random_hill_points(mu, C, rng, count, box=2.0, margin=0.05):
    pts = []
    while len(pts) < count:
        y = rng.uniform(-box, box, size=2)
        r1, r2 = dynamics.primary_distances(y, mu)
        if min(r1, r2) < margin:
            continue
        if dynamics.hill_margin(y, mu, C, check=False) > margin:
            pts.append(y)
    return np.asarray(pts)


class TestMassParameter:
    def test_primary_positions(self):
        mp = MassParameter(0.01)
        assert np.allclose(mp.primary1, [-0.01, 0.0])
        assert np.allclose(mp.primary2, [0.99, 0.0])

    @pytest.mark.parametrize("bad", [0.0, -0.1, 0.50001, float("nan")])
    def test_rejects_bad_ratio(self, bad):
        with pytest.raises(ValueError):
            MassParameter(bad)


class TestEffectivePotential:
    def test_symmetric_midpoint(self):
        # equal masses at distance 1/2 each: 0 + (1/2)/(1/2) + (1/2)/(1/2)
        assert effective_potential([0.0, 0.0], 0.5) == pytest.approx(2.0, abs=1e-15)

    def test_triangular_point_value(self, mu):
        L4 = lagrange_triangular(mu)
        assert 2 * effective_potential(L4.position, mu) == pytest.approx(L4.c0, abs=1e-14)

    def test_example1_jacobi_from_potential(self, mu):
        s = REFERENCE_ORBITS[1].initial_state
        omega = effective_potential(s.position, mu)
        assert 2 * omega - s.v1**2 - s.v2**2 == pytest.approx(2.9986240063314, abs=1e-9)

    def test_raises_at_primary(self, mu):
        with pytest.raises(DomainError):
            effective_potential([-mu, 0.0], mu)

    def test_gradient_matches_finite_differences(self, mu):
        rng = np.random.default_rng(7)
        pts = random_hill_points(mu, 3.0, rng, 20)
        for y in pts:
            exact = dynamics.omega_gradient(y, mu)
            approx = fd_gradient(lambda p: effective_potential(p, mu), y)
            assert np.allclose(exact, approx, rtol=1e-7, atol=1e-7)


class TestVectorField:
    def test_equilibrium_at_triangular_point(self, mu):
        L4 = lagrange_triangular(mu)
        s = RotatingState(L4.position[0], L4.position[1], 0.0, 0.0)
        assert np.linalg.norm(vector_field(s, mu)) < 1e-12

    def test_zero_velocity_acceleration_is_potential_gradient(self, mu):
        rng = np.random.default_rng(11)
        for y in random_hill_points(mu, 3.0, rng, 5):
            s = RotatingState(y[0], y[1], 0.0, 0.0)
            f = vector_field(s, mu)
            assert f[0] == 0.0 and f[1] == 0.0
            assert np.allclose(f[2:], dynamics.omega_gradient(y, mu))

    def test_rhs_matches_vector_field(self, mu):
        s = RotatingState(0.3, -0.2, 0.1, 0.4)
        assert np.allclose(dynamics.eom_rhs(0.0, s.array(), mu), vector_field(s, mu))


class TestJacobi:
    def test_example_values(self, mu):
        quoted = {1: 2.9986240063314, 2: 3.0790227765880, 3: -3.5390576031917, 4: 3.7789562336238}
        for i, ref in REFERENCE_ORBITS.items():
            assert jacobi_constant(ref.initial_state, mu) == pytest.approx(quoted[i], abs=1e-9)

    def test_zero_velocity_gives_twice_potential(self, mu):
        y = np.array([0.7, 0.4])
        s = RotatingState(y[0], y[1], 0.0, 0.0)
        assert jacobi_constant(s, mu) == 2 * effective_potential(y, mu)

    def test_reflection_symmetry_exact(self, mu):
        rng = np.random.default_rng(3)
        for _ in range(20):
            y1, y2, v1, v2 = rng.uniform(-1.5, 1.5, size=4)
            a = RotatingState(y1, y2, v1, v2)
            b = RotatingState(y1, -y2, -v1, v2)
            assert jacobi_constant(a, mu) == jacobi_constant(b, mu)


class TestHillRegion:
    def test_primaries_excluded(self, mu):
        assert not hill_test([-mu, 0.0], mu, 3.0)
        assert not hill_test([1 - mu, 0.0], mu, 3.0)

    def test_triangular_point_membership_switches_at_critical_value(self, mu):
        L4 = lagrange_triangular(mu)
        assert hill_test(L4.position, mu, L4.c0 - 0.01)
        assert not hill_test(L4.position, mu, L4.c0 + 0.01)
        # and a whole neighborhood is excluded above the critical value
        ring = L4.position + 1e-3 * np.stack(
            [np.cos(np.linspace(0, 2 * np.pi, 32)), np.sin(np.linspace(0, 2 * np.pi, 32))], axis=-1
        )
        assert not np.any(hill_test(ring, mu, L4.c0 + 0.01))

    def test_monotone_in_jacobi_constant(self, mu):
        rng = np.random.default_rng(5)
        pts = rng.uniform(-2, 2, size=(50, 2))
        for C_low, C_high in [(2.0, 3.0), (-1.0, 3.5)]:
            members_high = hill_test(pts, mu, C_high)
            members_low = hill_test(pts, mu, C_low)
            assert np.all(members_low[members_high])


class TestFieldSample:
    def test_triangular_point_closed_form(self, mu):
        L4 = lagrange_triangular(mu)
        for C in (2.9, 2.5, 1.0, -2.0):
            sample = field_sample(L4.position, mu, C)
            assert sample.delta_ln_f == pytest.approx(3.0 / (3.0 + mu**2 - mu - C), rel=1e-12)
            assert sample.r1 == pytest.approx(1.0, abs=1e-15)
            assert sample.r2 == pytest.approx(1.0, abs=1e-15)

    def test_laplacian_matches_finite_differences(self, mu):
        rng = np.random.default_rng(13)
        C = 2.9
        pts = random_hill_points(mu, C, rng, 50)
        for y in pts:
            sample = field_sample(y, mu, C)
            oracle = fd_laplacian_richardson(
                lambda p: math.log(dynamics.speed_field(p, mu, C)), y, h=1e-4
            )
            assert sample.delta_ln_f == pytest.approx(oracle, rel=1e-5, abs=1e-7)

    def test_gradient_of_log_speed_matches_finite_differences(self, mu):
        rng = np.random.default_rng(17)
        C = 2.9
        for y in random_hill_points(mu, C, rng, 20):
            sample = field_sample(y, mu, C)
            oracle = fd_gradient(lambda p: math.log(dynamics.speed_field(p, mu, C)), y)
            assert np.allclose(sample.grad_ln_f, oracle, rtol=1e-6, atol=1e-8)

    def test_far_field_is_nearly_harmonic(self, mu):
        for angle in np.linspace(0, 2 * np.pi, 8, endpoint=False):
            y = 100.0 * np.array([np.cos(angle), np.sin(angle)])
            assert abs(field_sample(y, mu, 3.0).delta_ln_f) < 1e-3

    def test_speed_squared_reconstruction(self, mu):
        s = REFERENCE_ORBITS[1].initial_state
        C = jacobi_constant(s, mu)
        sample = field_sample(s.position, mu, C)
        assert sample.f**2 == pytest.approx(s.v1**2 + s.v2**2, rel=1e-12)

    def test_raises_outside_hill_region(self, mu):
        L4 = lagrange_triangular(mu)
        with pytest.raises(DomainError):
            field_sample(L4.position, mu, L4.c0 + 0.01)


class TestFrameTransforms:
    def test_zero_epoch_velocity_relation(self):
        s = InertialState(0.3, 0.7, -0.2, 0.5, t=0.0)
        r = rotating_from_inertial(s)
        assert (r.y1, r.y2) == (s.x1, s.x2)
        assert r.v1 == pytest.approx(s.u1 + r.y2)
        assert r.v2 == pytest.approx(s.u2 - r.y1)

    def test_corotating_circle_is_fixed_point(self):
        for t in np.linspace(0.0, 7.0, 15):
            s = InertialState(math.cos(t), math.sin(t), -math.sin(t), math.cos(t), t=t)
            r = rotating_from_inertial(s)
            assert (r.y1, r.y2) == pytest.approx((1.0, 0.0), abs=1e-14)
            assert (r.v1, r.v2) == pytest.approx((0.0, 0.0), abs=1e-14)

    def test_roundtrip_identity(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            vals = rng.uniform(-2, 2, size=4)
            t = rng.uniform(-10, 10)
            s = RotatingState(*vals, t=t)
            back = rotating_from_inertial(inertial_from_rotating(s))
            assert np.allclose(back.array(), s.array(), atol=1e-14)
            assert back.t == s.t


class TestLagrangeTriangular:
    def test_unit_distances_and_critical_value(self, mu):
        for which in ("L4", "L5"):
            point = lagrange_triangular(mu, which)
            r1, r2 = dynamics.primary_distances(point.position, mu)
            assert r1 == pytest.approx(1.0, abs=1e-12)
            assert r2 == pytest.approx(1.0, abs=1e-12)
            assert 2 * effective_potential(point.position, mu) == pytest.approx(point.c0, abs=1e-12)
            assert np.linalg.norm(dynamics.omega_gradient(point.position, mu)) < 1e-12

    def test_equal_masses_symmetric(self):
        L4 = lagrange_triangular(0.5)
        assert L4.position == pytest.approx([0.0, math.sqrt(3) / 2], abs=1e-15)

    def test_l5_is_reflection(self, mu):
        L4 = lagrange_triangular(mu, "L4")
        L5 = lagrange_triangular(mu, "L5")
        assert L5.position[0] == L4.position[0]
        assert L5.position[1] == -L4.position[1]
