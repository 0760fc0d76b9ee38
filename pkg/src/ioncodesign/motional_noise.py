"""Correlated motional-heating noise model for laser-driven gates.

The phonon coherent-state amplitude performs a two-dimensional random
walk; a gate applied at experiment time tau picks up the dimensionless
displacement u = (a_osc/a_laser)^2 |alpha(tau)|^2 and imparts the angle
phi = phi_in * exp(-u). Everything here is parametrized by the single
latent variable lambda = c2 * tau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MAX_SERIES_TERMS = 500
_SERIES_Z_LIMIT = 150.0  # beyond this, double-precision series cancellation bites


@dataclass(frozen=True)
class NoiseParams:
    c2: float  # heating rate constant, 1/ms
    seed: int = 0
    correlated: bool = True

    def __post_init__(self):
        if self.c2 < 0:
            raise ValueError("c2 must be non-negative")


@dataclass
class MotionalTrajectory:
    """Dimensionless displacement u sampled at gate start times."""

    times: np.ndarray  # ms
    u: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.times.shape != self.u.shape:
            raise ValueError("times and u must have the same length")


@dataclass(frozen=True)
class AngleDistribution:
    phi_in: float
    lam: float  # c2 * tau

    def __post_init__(self):
        if self.lam < 0 or self.phi_in < 0:
            raise ValueError("lambda and phi_in must be non-negative")


def sample_trajectory(times, params: NoiseParams,
                      rng: np.random.Generator | None = None) -> MotionalTrajectory:
    """One diffusion path of u(tau) over the given gate start times.

    The scaled amplitude z(tau) is an exact two-dimensional Wiener
    process from z(0) = 0 with E|z(tau)|^2 = c2 * tau (Gaussian
    increments, no discretization error). With correlated=False every
    u is drawn independently from Exponential(mean c2 * tau), which is
    the single-time marginal of the correlated process.
    """
    times = np.asarray(times, dtype=float)
    if times.size and (np.any(np.diff(times) < 0) or times[0] < 0):
        raise ValueError("times must be sorted ascending and non-negative")
    if rng is None:
        rng = np.random.default_rng(params.seed)
    if params.c2 == 0.0 or times.size == 0:
        return MotionalTrajectory(times, np.zeros_like(times))
    if not params.correlated:
        u = rng.exponential(np.maximum(params.c2 * times, 1e-300))
        u[times == 0.0] = 0.0
        return MotionalTrajectory(times, u)
    dtau = np.diff(np.concatenate(([0.0], times)))
    scale = np.sqrt(params.c2 * dtau / 2.0)
    steps = (rng.standard_normal(times.size) + 1j * rng.standard_normal(times.size)) * scale
    z = np.cumsum(steps)
    return MotionalTrajectory(times, np.abs(z) ** 2)


def sample_u_pairs(tau: float, delta: float, c2: float, n_samples: int,
                   rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (u(tau), u(tau+delta)) draws along independent paths."""
    z1 = (rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples)) \
        * np.sqrt(c2 * tau / 2.0)
    step = (rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples)) \
        * np.sqrt(c2 * delta / 2.0)
    z2 = z1 + step
    return np.abs(z1) ** 2, np.abs(z2) ** 2


def noisy_angle(phi_in, u):
    """Angle actually imparted: phi_in * exp(-u)."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("u must be non-negative")
    return phi_in * np.exp(-u)


def angle_pdf(dist: AngleDistribution, phi):
    """Density of the imparted angle on (0, phi_in); zero outside."""
    if dist.lam == 0:
        raise ValueError("lambda=0 is a delta distribution; callers must branch")
    phi = np.asarray(phi, dtype=float)
    inside = (phi > 0) & (phi < dist.phi_in)
    out = np.zeros_like(phi)
    p = phi[inside]
    out[inside] = (p / dist.phi_in) ** (1.0 / dist.lam) / (dist.lam * p)
    return out if out.ndim else float(out)


def angle_moments(dist: AngleDistribution) -> dict:
    """Mean, typical (geometric-mean) angle, and variance."""
    lam, phi_in = dist.lam, dist.phi_in
    mean = phi_in / (1.0 + lam)
    typical = phi_in * np.exp(-lam)
    variance = phi_in**2 * lam**2 / ((1.0 + 2.0 * lam) * (1.0 + lam) ** 2)
    return {"mean": mean, "typical": typical, "variance": variance}


def angle_correlation(tau: float, delta: float, c2: float) -> float:
    """Correlation of the angles of two gates applied delta apart."""
    if tau <= 0 or delta < 0:
        raise ValueError("need tau > 0 and delta >= 0")
    a, b = c2 * tau, c2 * (tau + delta)
    d = c2 * delta
    return (tau / (tau + delta)) * np.sqrt((1 + 2 * a) * (1 + 2 * b)) \
        / (1 + 2 * a + d + a * d)


def short_time_pdf(dist: AngleDistribution, phi):
    """Exponential-tail approximation of the angle density near phi_in."""
    if dist.lam == 0:
        raise ValueError("lambda=0 is a delta distribution; callers must branch")
    phi = np.asarray(phi, dtype=float)
    scale = dist.lam * dist.phi_in
    out = np.where(phi < dist.phi_in, np.exp(-(dist.phi_in - phi) / scale) / scale, 0.0)
    return out if out.ndim else float(out)


def hyp1f2(a: float, b1: float, b2: float, z):
    """Generalized hypergeometric 1F2 by direct series summation.

    Entire in z, so the series always converges; terms are accumulated
    until they fall below 1e-16 of the running sum. Accepts scalar or
    array z (a, b1, b2 are scalars). For large negative z the alternating
    terms cancel catastrophically in double precision, so those entries
    are evaluated in arbitrary precision instead.
    """
    for b in (b1, b2):
        if b <= 0 and b == int(b):
            raise ValueError("b parameters must not be non-positive integers")
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > _SERIES_Z_LIMIT):
        import mpmath

        flat = np.atleast_1d(z).astype(float)
        out = np.array([float(mpmath.hyper([a], [b1, b2], zz)) for zz in flat])
        return out.reshape(z.shape) if z.ndim else float(out[0])
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(_MAX_SERIES_TERMS):
        term = term * ((a + k) / ((b1 + k) * (b2 + k))) * z / (k + 1.0)
        total = total + term
        if np.all(np.abs(term) < 1e-16 * np.maximum(np.abs(total), 1e-300)):
            break
    else:
        raise RuntimeError("1F2 series did not converge")
    return total if total.ndim else float(total)


def return_probability(phi_in, lam: float):
    """Average probability of returning to |down,down> after a noisy XX gate."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    phi_in = np.asarray(phi_in, dtype=float)
    base = np.cos(phi_in / 4.0) ** 2
    if lam == 0:
        return base if base.ndim else float(base)
    correction = (phi_in**2 * lam / (8.0 + 16.0 * lam)) \
        * hyp1f2(1.0 + 0.5 / lam, 1.5, 2.0 + 0.5 / lam, -(phi_in**2) / 16.0)
    out = base + correction
    return out if out.ndim else float(out)


def markovian_noise_to_signal(r: int, lam: float) -> dict:
    """Relative angle noise of an r-step sequence if gates were independent."""
    if r < 1:
        raise ValueError("r must be at least 1")
    beta = lam**2 / (1.0 + 2.0 * lam)
    return {"beta": beta, "eta": np.sqrt(beta) / r}
