"""First-order Trotter circuit for the Heisenberg model with gate timing.

Each Trotter step applies, in order: an XX layer, then an XX layer
conjugated by R^z(+-pi) to realize the YY interactions, then an XX layer
plus field rotations conjugated by R^y(+-pi) to realize ZZ and the
transverse field. Note the fixed conjugation rotations must be +-pi
under the convention R^a(phi) = exp(-i S^a phi / 2) for the axis change
x -> y (or x -> z) to come out right.

Gates are scheduled serially: gate m starts at tau_0 + m * t_g.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import ExactEvolver, SpinHamiltonian
from .spinsim import GateSpec, UnitaryMatrix, circuit_unitary


@dataclass(frozen=True)
class GateTiming:
    """Serial gate schedule: every gate occupies its own t_g slot."""

    t_g: float = 0.01  # ms per gate
    tau_0: float = 0.0  # experiment time when the first gate starts, ms
    noisy_gate_kinds: frozenset = frozenset({"XX"})

    def __post_init__(self):
        if self.t_g <= 0:
            raise ValueError("t_g must be positive")
        object.__setattr__(self, "noisy_gate_kinds", frozenset(self.noisy_gate_kinds))


@dataclass(frozen=True)
class TimedGate:
    spec: GateSpec
    start_time: float  # ms
    noisy: bool

    @property
    def nominal_angle(self) -> float:
        return self.spec.angle


@dataclass
class TimedCircuit:
    n_qubits: int
    gates: tuple[TimedGate, ...]
    total_duration: float

    def gate_times(self) -> np.ndarray:
        return np.array([g.start_time for g in self.gates])

    def dump_jsonl(self, path) -> None:
        """One gate per line: kind, sites, angle, start time, noisy flag."""
        with open(path, "w") as fh:
            for g in self.gates:
                fh.write(json.dumps({
                    "kind": g.spec.kind,
                    "sites": list(g.spec.sites),
                    "angle": g.spec.angle,
                    "start_time_ms": g.start_time,
                    "noisy": g.noisy,
                }) + "\n")


def trotter_step_layers(ham: SpinHamiltonian, dt: float) -> list[GateSpec]:
    """Gate list of one first-order step, in application order."""
    n = ham.n_spins
    pairs = ham.coupled_pairs()
    # The Hamiltonian sums couplings over unique pairs, so one step needs
    # exp(-i J_ij S_i^a S_j^a dt) per pair and axis: XX angle is J_ij * dt.
    xx_layer = [GateSpec("XX", (i, j), ham.J[i, j] * dt) for i, j in pairs]
    gates: list[GateSpec] = []
    gates += xx_layer
    gates += [GateSpec("RZ", (i,), np.pi) for i in range(n)]
    gates += xx_layer
    gates += [GateSpec("RZ", (i,), -np.pi) for i in range(n)]
    gates += [GateSpec("RY", (i,), np.pi) for i in range(n)]
    gates += xx_layer
    gates += [GateSpec("RZ", (i,), -2.0 * ham.h[i] * dt) for i in range(n)]
    gates += [GateSpec("RY", (i,), -np.pi) for i in range(n)]
    return gates


def build_trotter_circuit(ham: SpinHamiltonian, t: float, r: int,
                          timing: GateTiming = GateTiming()) -> TimedCircuit:
    """r repetitions of the first-order step approximating exp(-iHt)."""
    if r < 1:
        raise ValueError("r must be at least 1")
    if t < 0:
        raise ValueError("t must be non-negative")
    step = trotter_step_layers(ham, t / r)
    gates = []
    m = 0
    for _ in range(r):
        for spec in step:
            gates.append(TimedGate(
                spec=spec,
                start_time=timing.tau_0 + m * timing.t_g,
                noisy=spec.kind in timing.noisy_gate_kinds,
            ))
            m += 1
    duration = (gates[-1].start_time + timing.t_g) if gates else timing.tau_0
    return TimedCircuit(ham.n_spins, tuple(gates), duration)


def trotter_error(ham: SpinHamiltonian, t: float, r: int,
                  timing: GateTiming = GateTiming()) -> float:
    """Spectral norm of (noiseless circuit unitary - exact unitary)."""
    circuit = build_trotter_circuit(ham, t, r, timing)
    approx = circuit_unitary(circuit).entries
    exact = ExactEvolver(ham).unitary(t)
    return float(np.linalg.norm(approx - exact, ord=2))


def gate_counts(circuit: TimedCircuit) -> dict:
    """Total, two-qubit, and single-qubit gate counts."""
    two = sum(1 for g in circuit.gates if g.spec.kind == "XX")
    total = len(circuit.gates)
    return {"total": total, "two_qubit": two, "single_qubit": total - two}
