"""Unit tests for heating-rate calibration fits."""

import numpy as np
import pytest

from ioncodesign.calibration import (
    CalibrationCurve,
    fit_c2,
    fit_phase_damping,
    simulate_calibration,
)
from ioncodesign.motional_noise import return_probability


def analytic_curve(c2, phi_grid=None, tau_grid=None):
    if phi_grid is None:
        phi_grid = np.linspace(0.5, 2 * np.pi, 6)
    if tau_grid is None:
        tau_grid = np.linspace(0.0, 60.0, 9)
    p = np.array([[return_probability(phi, c2 * tau) for tau in tau_grid]
                  for phi in phi_grid])
    return CalibrationCurve(phi_grid, tau_grid, p, shots=10**9)


def test_fit_recovers_exactly_from_analytic_data():
    c2 = 0.02
    fit = fit_c2(analytic_curve(c2))
    assert fit["c2_hat"] == pytest.approx(c2, rel=1e-4)
    assert fit["residual"] < 1e-10


def test_fit_recovers_within_tolerance_from_shots():
    c2 = 0.02
    curve = simulate_calibration(np.linspace(0.5, 2 * np.pi, 8),
                                 np.linspace(0.0, 60.0, 13),
                                 c2_true=c2, shots=10000, seed=0)
    fit = fit_c2(curve)
    assert fit["c2_hat"] == pytest.approx(c2, rel=0.05)


def test_zero_noise_data_fits_zero_rate():
    curve = analytic_curve(0.0)
    fit = fit_c2(curve)
    assert fit["c2_hat"] == pytest.approx(0.0, abs=1e-6)


def test_model_discrimination_against_phase_damping():
    curve = simulate_calibration(np.linspace(0.5, 2 * np.pi, 8),
                                 np.linspace(0.0, 60.0, 13),
                                 c2_true=0.02, shots=10000, seed=1)
    heating = fit_c2(curve)
    damping = fit_phase_damping(curve)
    assert heating["residual"] < damping["residual"]


def test_csv_round_trip(tmp_path):
    curve = simulate_calibration(np.linspace(0.5, 4.0, 4), np.linspace(0.0, 30.0, 5),
                                 c2_true=0.01, shots=500, seed=2)
    path = tmp_path / "cal.csv"
    curve.to_csv(path)
    loaded = CalibrationCurve.from_csv(path)
    assert np.array_equal(loaded.phi_in, curve.phi_in)
    assert np.array_equal(loaded.tau, curve.tau)
    assert np.array_equal(loaded.p_return, curve.p_return)
    assert loaded.shots == curve.shots


def test_simulate_calibration_is_seed_deterministic():
    args = (np.linspace(0.5, 4.0, 3), np.linspace(0.0, 20.0, 4), 0.02, 200)
    a = simulate_calibration(*args, seed=7)
    b = simulate_calibration(*args, seed=7)
    c = simulate_calibration(*args, seed=8)
    assert np.array_equal(a.p_return, b.p_return)
    assert not np.array_equal(a.p_return, c.p_return)


def test_validation_errors():
    with pytest.raises(ValueError):
        CalibrationCurve(np.array([1.0]), np.array([1.0]),
                         np.array([[1.5]]), shots=10)
    with pytest.raises(ValueError):
        CalibrationCurve(np.array([1.0]), np.array([1.0, 2.0]),
                         np.array([[0.5]]), shots=10)
    single_tau = CalibrationCurve(np.array([1.0]), np.array([5.0]),
                                  np.array([[0.5]]), shots=10)
    with pytest.raises(ValueError):
        fit_c2(single_tau)
    zero_phi = CalibrationCurve(np.array([0.0]), np.array([0.0, 5.0]),
                                np.array([[1.0, 1.0]]), shots=10)
    with pytest.raises(ValueError):
        fit_c2(zero_phi)
    with pytest.raises(ValueError):
        simulate_calibration(np.array([1.0]), np.array([1.0]), 0.02, shots=0)
