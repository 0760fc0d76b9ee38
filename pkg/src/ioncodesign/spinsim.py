"""Dense statevector and unitary-matrix engine for small spin-1/2 registers.

Conventions used throughout the package:

* Site 0 is the most significant bit of the computational basis index.
* Bit 1 means spin-up (+1/2 eigenvalue of S^z), bit 0 means spin-down,
  so basis index 0 is the all-down state.
* Spin operators are S^a = sigma^a / 2, rotations are R^a(phi) =
  exp(-i S^a phi / 2) and the entangling gate is
  XX(phi) = exp(-i S^x_i S^x_j phi).

Global phase is not an observable here; comparisons against exact
evolution go through |Tr| or density matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 12

# Pauli matrices in the (down, up) local basis ordering fixed above.
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
_SIGMA = {"X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}

ROTATION_KINDS = ("RX", "RY", "RZ")
GATE_KINDS = ROTATION_KINDS + ("XX",)


@dataclass(frozen=True)
class GateSpec:
    """One gate: a single-qubit rotation or the two-qubit XX gate."""

    kind: str
    sites: tuple[int, ...]
    angle: float

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "sites", tuple(self.sites))
        n_sites = 2 if self.kind == "XX" else 1
        if len(self.sites) != n_sites:
            raise ValueError(f"{self.kind} takes {n_sites} site(s), got {self.sites}")
        if self.kind == "XX" and self.sites[0] == self.sites[1]:
            raise ValueError("XX sites must be distinct")
        if any(s < 0 for s in self.sites):
            raise ValueError("site indices must be non-negative")


@dataclass
class StateVector:
    """Normalized pure state of n_qubits spins."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise ValueError("amplitude length must be 2**n_qubits")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class UnitaryMatrix:
    """Dense unitary on the full register Hilbert space."""

    dim: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError("entries must be dim x dim")


def basis_state(n_qubits: int, bits) -> StateVector:
    """Computational basis state with the given bit pattern (site 0 = MSB)."""
    bits = list(bits)
    if len(bits) != n_qubits:
        raise ValueError(f"expected {n_qubits} bits, got {len(bits)}")
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        index = (index << 1) | b
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


def gate_kernel(gate: GateSpec) -> np.ndarray:
    """2x2 or 4x4 matrix of the gate on its own sites.

    Every generator G in the gate set squares to the identity, so the
    kernel is cos(phi/4) I - i sin(phi/4) G with G a Pauli (rotations)
    or sigma^x (x) sigma^x (the XX gate).
    """
    theta = gate.angle / 4.0
    if gate.kind == "XX":
        gen = np.kron(SIGMA_X, SIGMA_X)
    else:
        gen = _SIGMA[gate.kind[1]]
    eye = np.eye(gen.shape[0], dtype=complex)
    return np.cos(theta) * eye - 1j * np.sin(theta) * gen


def apply_kernel(array: np.ndarray, kernel: np.ndarray, sites, n_qubits: int) -> np.ndarray:
    """Apply a local kernel to the leading 2**n index of `array`.

    `array` may carry arbitrary trailing axes (columns of a unitary,
    a batch of statevectors); they are untouched.
    """
    sites = list(sites)
    k = len(sites)
    tail = array.shape[1:]
    tensor = array.reshape((2,) * n_qubits + tail)
    tensor = np.moveaxis(tensor, sites, range(k))
    moved_shape = tensor.shape
    tensor = kernel @ tensor.reshape(2**k, -1)
    tensor = np.moveaxis(tensor.reshape(moved_shape), range(k), sites)
    return tensor.reshape((2**n_qubits,) + tail)


def apply_gate(state: StateVector, gate: GateSpec) -> StateVector:
    """Return the state with the gate applied on its target sites."""
    if any(s >= state.n_qubits for s in gate.sites):
        raise ValueError("gate site index out of range")
    amps = apply_kernel(state.amplitudes, gate_kernel(gate), gate.sites, state.n_qubits)
    return StateVector(state.n_qubits, amps)


def sz_tot_diagonal(n_qubits: int) -> np.ndarray:
    """Diagonal of S^z_tot in the computational basis."""
    idx = np.arange(2**n_qubits)
    popcount = np.zeros(2**n_qubits, dtype=float)
    for s in range(n_qubits):
        popcount += (idx >> s) & 1
    return popcount - n_qubits / 2.0


def expect_sz_tot(state: StateVector) -> float:
    """Expectation value of the total S^z operator."""
    diag = sz_tot_diagonal(state.n_qubits)
    return float(np.real(np.sum(diag * np.abs(state.amplitudes) ** 2)))


def gate_matrix(gate: GateSpec, n_qubits: int) -> UnitaryMatrix:
    """Full 2**n x 2**n embedding of the gate."""
    if n_qubits > MAX_QUBITS:
        raise ResourceWarning(f"n_qubits={n_qubits} exceeds supported maximum {MAX_QUBITS}")
    if any(s >= n_qubits for s in gate.sites):
        raise ValueError("gate site index out of range")
    dim = 2**n_qubits
    entries = apply_kernel(np.eye(dim, dtype=complex), gate_kernel(gate), gate.sites, n_qubits)
    return UnitaryMatrix(dim, entries)


class CompiledCircuit:
    """Per-gate application plan reusable across angle realizations.

    Every gate in the set is cos(phi/4) I - i sin(phi/4) G with G^2 = I,
    so for small registers the full-dimension generator of each gate is
    precomputed once and each application costs one dense matmul. For
    larger registers the local-kernel embedding is used instead.
    """

    _FULL_GENERATOR_MAX_DIM = 64

    def __init__(self, circuit):
        self.n_qubits = circuit.n_qubits
        self.dim = 2**circuit.n_qubits
        self._use_full = self.dim <= self._FULL_GENERATOR_MAX_DIM
        self._plan = []
        cache: dict[tuple, np.ndarray] = {}
        for gate in circuit.gates:
            kind, sites = gate.spec.kind, gate.spec.sites
            key = (kind, sites)
            if key not in cache:
                gen = np.kron(SIGMA_X, SIGMA_X) if kind == "XX" else _SIGMA[kind[1]]
                if self._use_full:
                    gen = apply_kernel(np.eye(self.dim, dtype=complex), gen, sites, self.n_qubits)
                cache[key] = gen
            self._plan.append((cache[key], sites))

    def apply(self, array: np.ndarray, angles) -> np.ndarray:
        out = np.asarray(array, dtype=complex)
        if self._use_full:
            for (gen, _), angle in zip(self._plan, angles):
                theta = angle / 4.0
                out = np.cos(theta) * out - (1j * np.sin(theta)) * (gen @ out)
            return out
        eyes = {2: np.eye(2, dtype=complex), 4: np.eye(4, dtype=complex)}
        for (gen, sites), angle in zip(self._plan, angles):
            theta = angle / 4.0
            kernel = np.cos(theta) * eyes[gen.shape[0]] - 1j * np.sin(theta) * gen
            out = apply_kernel(out, kernel, sites, self.n_qubits)
        return out


def circuit_unitary(circuit, realized_angles=None) -> UnitaryMatrix:
    """Ordered product of the circuit's gates; gates[0] acts first.

    `realized_angles` optionally maps gate index -> angle (or is a full
    sequence of angles); unlisted gates use their nominal angle.
    """
    dim = 2**circuit.n_qubits
    angles = _resolve_angles(circuit, realized_angles)
    unitary = CompiledCircuit(circuit).apply(np.eye(dim, dtype=complex), angles)
    return UnitaryMatrix(dim, unitary)


def evolve_columns(circuit, columns: np.ndarray, realized_angles=None,
                   compiled: "CompiledCircuit | None" = None) -> np.ndarray:
    """Run the circuit on a (2**n, m) batch of statevector columns."""
    angles = _resolve_angles(circuit, realized_angles)
    if compiled is None:
        compiled = CompiledCircuit(circuit)
    return compiled.apply(columns, angles)


def _resolve_angles(circuit, realized_angles):
    m = len(circuit.gates)
    nominal = [g.nominal_angle for g in circuit.gates]
    if realized_angles is None:
        return nominal
    if isinstance(realized_angles, dict):
        for idx in realized_angles:
            if not 0 <= idx < m:
                raise ValueError(f"realized angle index {idx} out of range")
        return [realized_angles.get(i, nominal[i]) for i in range(m)]
    realized = list(realized_angles)
    if len(realized) != m:
        raise ValueError(f"need {m} realized angles, got {len(realized)}")
    return realized
