"""Propagation quality: closure of the reference orbits, conservation, dense output."""

import numpy as np
import pytest

from conftest import QUOTED
from pcr3bp import dynamics
from pcr3bp.dynamics import RotatingState, lagrange_triangular
from pcr3bp.errors import ReturnNotFoundError, SingularityApproachError
from pcr3bp.integrate import IntegratorConfig, first_return, propagate
from pcr3bp.reference_orbits import REFERENCE_ORBITS


class TestPropagate:
    def test_example1_closes_over_quoted_period(self, mu):
        s = REFERENCE_ORBITS[1].initial_state
        traj = propagate(s, mu, QUOTED[1]["T"])
        assert np.linalg.norm(traj.state_at(QUOTED[1]["T"]) - s.array()) < 1e-8

    def test_example3_closes_over_quoted_period(self, mu):
        s = REFERENCE_ORBITS[3].initial_state
        traj = propagate(s, mu, QUOTED[3]["T"])
        assert np.linalg.norm(traj.state_at(QUOTED[3]["T"]) - s.array()) < 1e-4

    def test_triangular_equilibrium_stays_put(self, mu):
        L4 = lagrange_triangular(mu)
        s = RotatingState(L4.position[0], L4.position[1], 0.0, 0.0)
        traj = propagate(s, mu, 10.0)
        drift = np.max(np.linalg.norm(traj.states - s.array(), axis=1))
        assert drift < 1e-10

    def test_jacobi_drift_below_1e9_on_all_examples(self, example_orbits):
        for i, orbit in example_orbits.items():
            assert orbit.trajectory.jacobi_drift() < 1e-9, f"example {i}"

    def test_dense_output_reproduces_samples(self, mu):
        s = REFERENCE_ORBITS[1].initial_state
        traj = propagate(s, mu, 3.0)
        again = traj.state_at(traj.ts)
        assert np.max(np.abs(again - traj.states)) < 1e-12

    def test_reversibility_symmetry(self, mu):
        s = REFERENCE_ORBITS[1].initial_state
        forward = propagate(s, mu, 2.5)
        mirrored = RotatingState(s.y1, -s.y2, -s.v1, s.v2)
        backward = propagate(mirrored, mu, -2.5)
        ts = np.linspace(0.0, 2.5, 50)
        fwd = forward.state_at(ts)
        bwd = backward.state_at(-ts)
        mirror = bwd * np.array([1.0, -1.0, -1.0, 1.0])
        assert np.max(np.abs(fwd - mirror)) < 1e-9

    def test_closure_improves_with_tolerance(self, mu):
        s = REFERENCE_ORBITS[1].initial_state
        T = QUOTED[1]["T"]
        residuals = []
        for tol in (1e-6, 5e-7, 2.5e-7):
            cfg = IntegratorConfig(rel_tol=tol, abs_tol=tol)
            traj = propagate(s, mu, T, cfg)
            residuals.append(np.linalg.norm(traj.state_at(T) - s.array()))
        # monotone within a factor of 10 per halving, and better overall
        assert residuals[1] <= 10 * residuals[0]
        assert residuals[2] <= 10 * residuals[1]
        assert residuals[2] < residuals[0]

    def test_singularity_guard_trips(self, mu):
        s = RotatingState(0.1, 0.0, -1.0, 0.0)  # aimed straight at the heavy primary
        with pytest.raises(SingularityApproachError):
            propagate(s, mu, 2.0)

    def test_rejects_empty_interval(self, mu):
        with pytest.raises(ValueError):
            propagate(REFERENCE_ORBITS[1].initial_state, mu, 0.0)


class TestIntegratorConfig:
    @pytest.mark.parametrize("kwargs", [{"rel_tol": 0.0}, {"abs_tol": 2e-3}, {"dense_samples_per_period": 100}])
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(ValueError):
            IntegratorConfig(**kwargs)


class TestFirstReturn:
    def test_example2_return_in_stated_window(self, mu):
        s = REFERENCE_ORBITS[2].initial_state
        t_star, residual = first_return(s, mu, (0.1, 0.5))
        assert t_star == pytest.approx(QUOTED[2]["T"], abs=1e-6)
        assert residual < 1e-8

    def test_example4_return_in_stated_window(self, mu):
        s = REFERENCE_ORBITS[4].initial_state
        t_star, residual = first_return(s, mu, (5.0, 8.0))
        assert t_star == pytest.approx(QUOTED[4]["T"], abs=1e-4)

    def test_window_around_known_period_recovers_it(self, mu, example_orbits):
        orbit = example_orbits[1]
        T = orbit.period
        t_star, _ = first_return(orbit.initial_state, mu, (T - 0.2, T + 0.2))
        assert t_star == pytest.approx(T, abs=1e-9)

    def test_not_found_when_no_return(self, mu):
        s = REFERENCE_ORBITS[1].initial_state
        with pytest.raises(ReturnNotFoundError):
            first_return(s, mu, (0.5, 2.0), radius=1e-6)

    def test_rejects_bad_window(self, mu):
        with pytest.raises(ValueError):
            first_return(REFERENCE_ORBITS[1].initial_state, mu, (-1.0, 2.0))


class TestTrajectory:
    def test_samples_strictly_increasing(self, example_orbits):
        ts = example_orbits[1].trajectory.ts
        assert np.all(np.diff(ts) > 0)

    def test_speed_equals_speed_field(self, mu, example_orbits):
        # |velocity| must equal f(position) pointwise (definition of the Jacobi constant)
        for orbit in example_orbits.values():
            states = orbit.trajectory.states
            speeds = np.hypot(states[:, 2], states[:, 3])
            f = dynamics.speed_field(states[:, :2], mu, orbit.c)
            assert np.max(np.abs(speeds - f)) < 1e-9
