"""Synthetic return-probability experiments and heating-rate fitting.

The protocol: prepare two qubits in the all-down state, wait tau, apply
an XX gate with input angle phi_in, and measure the return probability.
Sweeping (phi_in, tau) traces out curves whose shape pins down the
heating rate c2.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .motional_noise import return_probability


@dataclass
class CalibrationCurve:
    phi_in: np.ndarray  # rad
    tau: np.ndarray  # ms
    p_return: np.ndarray  # shape (len(phi_in), len(tau)), in [0, 1]
    shots: int

    def __post_init__(self):
        self.phi_in = np.asarray(self.phi_in, dtype=float)
        self.tau = np.asarray(self.tau, dtype=float)
        self.p_return = np.asarray(self.p_return, dtype=float)
        if self.p_return.shape != (self.phi_in.size, self.tau.size):
            raise ValueError("p_return must be (n_phi, n_tau)")
        if np.any((self.p_return < 0) | (self.p_return > 1)):
            raise ValueError("probabilities must lie in [0, 1]")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["phi_in", "tau_ms", "p_return", "shots"])
            for i, phi in enumerate(self.phi_in):
                for j, tau in enumerate(self.tau):
                    writer.writerow([repr(float(phi)), repr(float(tau)),
                                     repr(float(self.p_return[i, j])), self.shots])

    @classmethod
    def from_csv(cls, path) -> "CalibrationCurve":
        rows = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                rows.append((float(row["phi_in"]), float(row["tau_ms"]),
                             float(row["p_return"]), int(row["shots"])))
        phis = sorted({r[0] for r in rows})
        taus = sorted({r[1] for r in rows})
        p = np.full((len(phis), len(taus)), np.nan)
        for phi, tau, prob, shots in rows:
            p[phis.index(phi), taus.index(tau)] = prob
        if np.any(np.isnan(p)):
            raise ValueError("calibration CSV does not cover the full grid")
        return cls(np.array(phis), np.array(taus), p, rows[0][3])


def simulate_calibration(phi_grid, tau_grid, c2_true: float, shots: int,
                         seed: int = 0) -> CalibrationCurve:
    """Finite-shot synthetic calibration data at a known heating rate.

    Per (phi_in, tau) point: one independent single-time displacement
    sample per shot (the exponential marginal of the diffusion), a noisy
    XX angle, and a Bernoulli draw from the return probability
    cos^2(phi/4) of that realized angle.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    phi_grid = np.asarray(phi_grid, dtype=float)
    tau_grid = np.asarray(tau_grid, dtype=float)
    rng = np.random.default_rng(seed)
    p = np.empty((phi_grid.size, tau_grid.size))
    for i, phi_in in enumerate(phi_grid):
        for j, tau in enumerate(tau_grid):
            lam = c2_true * tau
            u = rng.exponential(lam, shots) if lam > 0 else np.zeros(shots)
            prob = np.cos(phi_in * np.exp(-u) / 4.0) ** 2
            outcomes = rng.random(shots) < prob
            p[i, j] = outcomes.mean()
    return CalibrationCurve(phi_grid, tau_grid, p, shots)


def _model_residual(curve: CalibrationCurve, c2: float) -> float:
    total = 0.0
    for i, phi_in in enumerate(curve.phi_in):
        pred = np.array([return_probability(phi_in, c2 * tau) for tau in curve.tau])
        total += float(np.sum((curve.p_return[i] - pred) ** 2))
    return total


def fit_c2(curve: CalibrationCurve, c2_max: float = 10.0) -> dict:
    """Least-squares heating-rate estimate pooling all grid points.

    A log-spaced coarse scan brackets the minimum, then a bounded
    scalar minimization refines it. Returns {"c2_hat", "residual"}.
    """
    if curve.tau.size < 2:
        raise ValueError("need at least 2 distinct tau values")
    if np.all(curve.phi_in == 0):
        raise ValueError("all phi_in are zero; c2 is unidentifiable")
    grid = np.concatenate(([0.0], np.geomspace(1e-6, c2_max, 60)))
    losses = np.array([_model_residual(curve, c2) for c2 in grid])
    k = int(np.argmin(losses))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    if hi > lo:
        res = minimize_scalar(lambda c2: _model_residual(curve, c2),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        candidates = [(float(res.x), float(res.fun))]
    else:
        candidates = []
    candidates.append((float(grid[k]), float(losses[k])))
    c2_hat, residual = min(candidates, key=lambda c: c[1])
    return {"c2_hat": c2_hat, "residual": residual}


def _phase_damping_residual(curve: CalibrationCurve, gamma: float) -> float:
    """Best-fit residual of P = 1/2 + 1/2 exp(-Gamma tau) cos(phi_in/2 + delta)
    with one phase offset delta per input angle."""
    decay = np.exp(-gamma * curve.tau)
    total = 0.0
    for i, phi_in in enumerate(curve.phi_in):
        y = curve.p_return[i] - 0.5
        # y ~ decay * (A cos(phi/2) cos d - A sin(phi/2) sin d), amplitude fixed 1/2:
        # optimize delta on a grid + refine (objective is smooth and 2pi-periodic)
        deltas = np.linspace(-np.pi, np.pi, 181)
        preds = 0.5 * decay[None, :] * np.cos(phi_in / 2.0 + deltas[:, None])
        losses = np.sum((y[None, :] - preds) ** 2, axis=1)
        k = int(np.argmin(losses))
        res = minimize_scalar(
            lambda d: float(np.sum((y - 0.5 * decay * np.cos(phi_in / 2.0 + d)) ** 2)),
            bounds=(deltas[max(k - 1, 0)], deltas[min(k + 1, deltas.size - 1)]),
            method="bounded", options={"xatol": 1e-8})
        total += min(float(res.fun), float(losses[k]))
    return total


def fit_phase_damping(curve: CalibrationCurve, gamma_max: float = 10.0) -> dict:
    """Reference fit of the phase-damping model, for model discrimination."""
    grid = np.concatenate(([0.0], np.geomspace(1e-6, gamma_max, 60)))
    losses = np.array([_phase_damping_residual(curve, g) for g in grid])
    k = int(np.argmin(losses))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(lambda g: _phase_damping_residual(curve, g),
                          bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    if res.fun < losses[k]:
        return {"gamma_hat": float(res.x), "residual": float(res.fun)}
    return {"gamma_hat": float(grid[k]), "residual": float(losses[k])}
