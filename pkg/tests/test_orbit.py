"""Fourier orbit profiles: fitting, collocation refinement, reuse as history.

The reference orbit (3 nodes, K = 1.05, mu = 0.075, tau = 9.5) is pinned by
its refined period; the refinement is seeded from a handful of dominant
coefficients, so the test exercises the whole Gauss-Newton path.
"""

import numpy as np
import pytest

from pllbif import (
    InvalidParamError,
    ModelKind,
    NetworkParams,
    NotPeriodicError,
    OrbitProfile,
    Trajectory,
    fit_profile,
    integrate,
    refine_orbit,
    symmetry_classify,
    SymmetryTag,
)

P3 = NetworkParams(3, 1.05, 0.075, delay=9.5)
REF_PERIOD = 24.189514576278501


def seed_profile(period=24.2, harmonics=4):
    """Coarse truncation of the reference orbit, a Gauss-Newton basin member."""
    a = np.zeros((3, harmonics + 1))
    b = np.zeros((3, harmonics + 1))
    a[0, 0], a[0, 1], a[0, 2] = -0.8726, -0.2613, -0.0133
    a[1, 0], a[1, 1], a[1, 2] = -0.8726, +0.2613, -0.0133
    a[2, 0], a[2, 2] = -0.8860, -0.00268
    b[0, 2], b[0, 3] = 0.00778, 0.00049
    b[1, 2], b[1, 3] = 0.00778, -0.00049
    b[2, 2] = 0.00249
    return OrbitProfile(ModelKind.FULL_PHASE, P3, period, a, b)


@pytest.fixture(scope="module")
def refined():
    return refine_orbit(seed_profile(), harmonics=10)


def test_refined_period_and_residual(refined):
    assert refined.period == pytest.approx(REF_PERIOD, abs=1e-8)
    assert refined.residual_norm() < 1e-10
    # the orbit did not collapse to the nearby equilibrium
    amp1 = np.hypot(refined.cos_coeffs[:, 1], refined.sin_coeffs[:, 1])
    assert amp1[0] == pytest.approx(0.261349005, abs=1e-6)
    assert amp1[1] == pytest.approx(amp1[0], abs=1e-9)


def test_refined_orbit_has_pair_swap_structure(refined):
    # node 2 equals node 1 advanced half a period: odd harmonics flip sign
    for mat in (refined.cos_coeffs, refined.sin_coeffs):
        flipped = mat[0].copy()
        flipped[1::2] *= -1.0
        assert np.max(np.abs(mat[1] - flipped)) < 1e-9
        # node 3 runs at twice the base frequency: odd harmonics vanish
        assert np.max(np.abs(mat[2, 1::2])) < 1e-9


def test_refinement_recovers_from_a_nudged_period(refined):
    nudged = OrbitProfile(
        refined.kind,
        refined.params,
        refined.period + 2e-3,
        refined.cos_coeffs,
        refined.sin_coeffs,
    )
    again = refine_orbit(nudged)
    assert again.period == pytest.approx(REF_PERIOD, abs=1e-8)


def test_velocities_differentiate_positions(refined):
    ts = np.linspace(0.0, refined.period, 17)
    eps = 1e-6
    fd = (refined.positions(ts + eps) - refined.positions(ts - eps)) / (2 * eps)
    assert np.max(np.abs(refined.velocities(ts) - fd)) < 1e-6


def test_profile_state_interleaves(refined):
    s = refined.state()
    assert s.shape == (6,)
    assert np.allclose(s[0::2], refined.positions([0.0])[0])
    assert np.allclose(s[1::2], refined.velocities([0.0])[0])


def test_with_harmonics_pads_and_truncates(refined):
    wide = refined.with_harmonics(14)
    assert wide.harmonics == 14
    assert np.all(wide.cos_coeffs[:, 11:] == 0.0)
    back = wide.with_harmonics(10)
    assert np.allclose(back.cos_coeffs, refined.cos_coeffs)
    # dropping real content raises the model residual
    narrow = refined.with_harmonics(2)
    assert narrow.residual_norm() > refined.residual_norm()


def test_profile_serves_as_history(refined):
    # short continuation from the profile keeps the symmetry class
    traj = integrate(ModelKind.FULL_PHASE, P3, refined, 90.0, step=9.5 / 100)
    cls = symmetry_classify(traj, refined.period)
    assert cls.tag is SymmetryTag.Z2_SPATIO_TEMPORAL
    assert cls.pair == (1, 2)


def test_fit_profile_recovers_synthetic_coefficients(refined):
    # exact series samples, packaged as a trajectory
    step = 0.05
    times = np.arange(int(60.0 / step) + 1) * step
    states = np.zeros((len(times), 6))
    states[:, 0::2] = refined.positions(times)
    states[:, 1::2] = refined.velocities(times)
    derivs = np.zeros_like(states)
    traj = Trajectory(ModelKind.FULL_PHASE, P3, times, states, derivs, states[0], step)
    fit = fit_profile(traj, (0.0, 60.0), harmonics=6)
    assert fit.period == pytest.approx(REF_PERIOD, rel=2e-4)
    amp1 = np.hypot(fit.cos_coeffs[0, 1], fit.sin_coeffs[0, 1])
    assert amp1 == pytest.approx(0.261349, abs=1e-3)


def test_fit_profile_window_validation(refined):
    step = 0.05
    times = np.arange(201) * step
    states = np.zeros((len(times), 6))
    traj = Trajectory(ModelKind.FULL_PHASE, P3, times, states, np.zeros_like(states), states[0], step)
    with pytest.raises(InvalidParamError):
        fit_profile(traj, (5.0, 5.0))
    with pytest.raises(NotPeriodicError):
        fit_profile(traj, (0.0, 10.0), harmonics=40)  # too few samples


def test_refine_rejects_hopeless_seed():
    # a far-off candidate whose Gauss-Newton stalls must not be reported
    a = np.zeros((3, 3))
    b = np.zeros((3, 3))
    a[:, 1] = 2.5
    junk = OrbitProfile(ModelKind.FULL_PHASE, P3, 5.0, a, b)
    with pytest.raises(NotPeriodicError):
        refine_orbit(junk, max_iter=4)
