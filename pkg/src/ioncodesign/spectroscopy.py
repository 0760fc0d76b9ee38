"""Magnetization response, damped-Fourier spectra, and fidelity metrics.

The response function S(t) is the infinite-temperature autocorrelation
of the total magnetization, computed from the computational basis
states with positive magnetization. Its damped Fourier transform is the
spectrum; Hellinger distance between normalized spectra and the
trace fidelity between noisy and exact evolutions are the two error
metrics used to score circuits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .feedforward import FeedforwardTable, correct_circuit
from .hamiltonian import ExactEvolver, SpinHamiltonian
from .motional_noise import NoiseParams, sample_trajectory
from .spinsim import CompiledCircuit, sz_tot_diagonal
from .trotter import GateTiming, TimedCircuit, build_trotter_circuit


@dataclass
class ResponseSeries:
    times: np.ndarray  # ms, uniform grid from 0
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")


@dataclass
class Spectrum:
    omega: np.ndarray  # rad/ms
    a_raw: np.ndarray
    a_norm: np.ndarray  # non-negative, sums (x d_omega / 2pi) to 1
    gamma: float  # broadening, rad/ms


@dataclass
class FidelityTrace:
    times: np.ndarray
    fidelity: np.ndarray
    f_int: float


def positive_magnetization_states(n_spins: int) -> list[tuple[int, float]]:
    """(basis index, m) for computational states with m > 0."""
    diag = sz_tot_diagonal(n_spins)
    return [(int(i), float(m)) for i, m in enumerate(diag) if m > 0]


def response_function(evolve, n_spins: int, times) -> ResponseSeries:
    """S(t) = 2 sum_{j: m_j > 0} (m_j / 2^N) <z_j(t)| S^z_tot |z_j(t)>.

    `evolve(columns, t)` must map a (2^N, k) batch of initial basis
    states to the evolved batch; it may average internally over noise
    realizations by returning per-state expectation weights instead.
    """
    times = np.asarray(times, dtype=float)
    dim = 2**n_spins
    states = positive_magnetization_states(n_spins)
    columns = np.zeros((dim, len(states)), dtype=complex)
    for k, (idx, _) in enumerate(states):
        columns[idx, k] = 1.0
    weights = np.array([m for _, m in states]) / dim
    diag = sz_tot_diagonal(n_spins)
    values = np.empty(times.size)
    for it, t in enumerate(times):
        evolved = evolve(columns, t)
        expect = np.real(np.einsum("d,dk->k", diag, np.abs(evolved) ** 2))
        values[it] = 2.0 * float(weights @ expect)
    return ResponseSeries(times, values)


def exact_response(ham: SpinHamiltonian, times) -> ResponseSeries:
    evolver = ExactEvolver(ham)
    return response_function(lambda cols, t: evolver.evolve(cols, t), ham.n_spins, times)


class TrotterEvolver:
    """Trotterized evolution with optional motional noise and feedforward.

    For noisy evolution the expectation in the response function is
    averaged over n_runs diffusion paths; within one run all initial
    states share the same path. Seeds derive deterministically from
    (seed, run index, time index).
    """

    def __init__(self, ham: SpinHamiltonian, r: int, timing: GateTiming = GateTiming(),
                 noise: NoiseParams | None = None, feedforward: bool = False,
                 n_runs: int = 1, table: FeedforwardTable | None = None):
        if r < 1:
            raise ValueError("r must be at least 1")
        self.ham = ham
        self.r = r
        self.timing = timing
        self.noise = noise
        self.feedforward = feedforward
        self.n_runs = n_runs
        self.table = table if table is not None else FeedforwardTable()
        self._time_index = {}
        self._circuit_cache: dict[float, tuple[TimedCircuit, CompiledCircuit]] = {}

    def circuit_for(self, t: float) -> TimedCircuit:
        return self._prepared(t)[0]

    def _prepared(self, t: float) -> tuple[TimedCircuit, CompiledCircuit]:
        """Circuit and its application plan, cached per sample time."""
        key = float(t)
        if key not in self._circuit_cache:
            circuit = build_trotter_circuit(self.ham, t, self.r, self.timing)
            if self.feedforward and self.noise is not None and self.noise.c2 > 0:
                circuit = correct_circuit(circuit, self.noise.c2, self.table)
            self._circuit_cache[key] = (circuit, CompiledCircuit(circuit))
        return self._circuit_cache[key]

    def evolve(self, columns: np.ndarray, run: int, t: float) -> np.ndarray:
        circuit, compiled = self._prepared(t)
        angles = self.realized_angles(circuit, run, t)
        return compiled.apply(columns, angles)

    def realized_angles(self, circuit: TimedCircuit, run: int, t: float) -> list[float]:
        """Noisy angle realization for one run; nominal if noiseless."""
        if self.noise is None or self.noise.c2 == 0:
            return [g.spec.angle for g in circuit.gates]
        it = self._time_index.setdefault(float(t), len(self._time_index))
        seed_seq = np.random.SeedSequence(entropy=self.noise.seed, spawn_key=(run, it))
        rng = np.random.default_rng(seed_seq)
        traj = sample_trajectory(circuit.gate_times(), self.noise, rng=rng)
        damp = np.exp(-traj.u)
        return [g.spec.angle * damp[m] if g.noisy else g.spec.angle
                for m, g in enumerate(circuit.gates)]


def noiseless_response(ham: SpinHamiltonian, times, r: int,
                       timing: GateTiming = GateTiming()) -> ResponseSeries:
    ev = TrotterEvolver(ham, r, timing)
    return response_function(lambda cols, t: ev.evolve(cols, 0, t), ham.n_spins, times)


def noisy_response(ham: SpinHamiltonian, times, r: int, noise: NoiseParams,
                   timing: GateTiming = GateTiming(), feedforward: bool = False,
                   n_runs: int = 1, table: FeedforwardTable | None = None) -> ResponseSeries:
    """Run-averaged noisy response: mean of S(t) over diffusion paths."""
    ev = TrotterEvolver(ham, r, timing, noise, feedforward, n_runs, table)
    times = np.asarray(times, dtype=float)
    total = np.zeros(times.size)
    for run in range(n_runs):
        series = response_function(lambda cols, t, run=run: ev.evolve(cols, run, t),
                                   ham.n_spins, times)
        total += series.values
    return ResponseSeries(times, total / max(n_runs, 1))


def spectrum(series: ResponseSeries, gamma: float, omega_grid) -> Spectrum:
    """Damped Fourier transform with trapezoidal weights, then a clipped
    and normalized copy suitable for Hellinger comparisons."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    omega_grid = np.asarray(omega_grid, dtype=float)
    t = series.times
    weights = np.full(t.size, 1.0)
    weights[0] = weights[-1] = 0.5
    dt = t[1] - t[0] if t.size > 1 else 0.0
    damped = weights * np.exp(-gamma * t) * series.values * dt
    a_raw = np.real(np.exp(1j * np.outer(omega_grid, t)) @ damped)
    clipped = np.clip(a_raw, 0.0, None)
    d_omega = omega_grid[1] - omega_grid[0] if omega_grid.size > 1 else 1.0
    mass = clipped.sum() * d_omega / (2.0 * np.pi)
    if mass <= 0:
        raise ValueError("spectrum has no positive weight; cannot normalize")
    return Spectrum(omega_grid, a_raw, clipped / mass, gamma)


def hellinger(a: Spectrum, b: Spectrum) -> float:
    """Hellinger distance between two normalized spectra on one grid."""
    if a.omega.shape != b.omega.shape or not np.allclose(a.omega, b.omega):
        raise ValueError("spectra must share the same frequency grid")
    d_omega = a.omega[1] - a.omega[0] if a.omega.size > 1 else 1.0
    d2 = 0.5 * np.sum((np.sqrt(a.a_norm) - np.sqrt(b.a_norm)) ** 2) * d_omega / (2.0 * np.pi)
    return float(np.sqrt(min(max(d2, 0.0), 1.0)))


def fidelity_trace(ham: SpinHamiltonian, times, r: int,
                   timing: GateTiming = GateTiming(),
                   noise: NoiseParams | None = None, feedforward: bool = False,
                   n_runs: int = 1, table: FeedforwardTable | None = None) -> FidelityTrace:
    """F(t) = |Tr(U1(t)^dag U(t)) / 2^N|^2 averaged over noise runs."""
    times = np.asarray(times, dtype=float)
    ev = TrotterEvolver(ham, r, timing, noise, feedforward, n_runs, table)
    exact = ExactEvolver(ham)
    dim = 2**ham.n_spins
    runs = n_runs if (noise is not None and noise.c2 > 0) else 1
    fid = np.zeros(times.size)
    eye = np.eye(dim, dtype=complex)
    for it, t in enumerate(times):
        target = exact.unitary(t)
        acc = 0.0
        for run in range(runs):
            u1 = ev.evolve(eye, run, t)
            acc += abs(np.trace(u1.conj().T @ target) / dim) ** 2
        fid[it] = acc / runs
    if times.size > 1 and times[-1] > times[0]:
        f_int = float(np.trapezoid(fid, times) / (times[-1] - times[0]))
    else:
        f_int = float(fid[0])
    return FidelityTrace(times, fid, f_int)


def lorentzian_pair_spectra(centers, gamma: float, omega_grid) -> list[Spectrum]:
    """Analytic Lorentzian spectra on a grid (testing and benchmarks)."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    out = []
    for c in centers:
        raw = gamma / (gamma**2 + (omega_grid - c) ** 2)
        d_omega = omega_grid[1] - omega_grid[0]
        out.append(Spectrum(omega_grid, raw, raw / (raw.sum() * d_omega / (2 * np.pi)), gamma))
    return out
