"""Heisenberg Hamiltonian construction and exact time evolution.

Units: hbar = 1, couplings J and fields h in rad/ms, time in ms.
Exact evolution goes through a Hermitian eigendecomposition and serves
as the brute-force oracle for every Trotter and noise comparison.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .spinsim import SIGMA_X, SIGMA_Y, SIGMA_Z, StateVector, UnitaryMatrix, apply_kernel


@dataclass
class SpinHamiltonian:
    """H = sum_{i<j} J_ij S_i . S_j + sum_i h_i S_i^x."""

    n_spins: int
    J: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        self.J = np.asarray(self.J, dtype=float)
        self.h = np.asarray(self.h, dtype=float)
        n = self.n_spins
        if self.J.shape != (n, n):
            raise ValueError("J must be n x n")
        if self.h.shape != (n,):
            raise ValueError("h must have length n")
        if not np.allclose(self.J, self.J.T):
            raise ValueError("J must be symmetric")
        if np.any(np.diag(self.J) != 0.0):
            raise ValueError("J must have zero diagonal")

    def coupled_pairs(self) -> list[tuple[int, int]]:
        """Unique pairs (i < j) with J_ij != 0."""
        n = self.n_spins
        return [(i, j) for i in range(n) for j in range(i + 1, n) if self.J[i, j] != 0.0]

    def to_dict(self) -> dict:
        return {"n": self.n_spins, "J": self.J.tolist(), "h": self.h.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "SpinHamiltonian":
        return cls(int(data["n"]), np.asarray(data["J"]), np.asarray(data["h"]))

    @classmethod
    def from_json(cls, path) -> "SpinHamiltonian":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _site_operator(sigma: np.ndarray, site: int, n: int) -> np.ndarray:
    dim = 2**n
    return apply_kernel(np.eye(dim, dtype=complex), sigma, [site], n)


def hamiltonian_matrix(ham: SpinHamiltonian) -> np.ndarray:
    """Dense 2**n x 2**n Hermitian matrix of the Hamiltonian."""
    n = ham.n_spins
    dim = 2**n
    sx = [_site_operator(SIGMA_X / 2.0, i, n) for i in range(n)]
    sy = [_site_operator(SIGMA_Y / 2.0, i, n) for i in range(n)]
    sz = [_site_operator(SIGMA_Z / 2.0, i, n) for i in range(n)]
    matrix = np.zeros((dim, dim), dtype=complex)
    for i, j in ham.coupled_pairs():
        matrix += ham.J[i, j] * (sx[i] @ sx[j] + sy[i] @ sy[j] + sz[i] @ sz[j])
    for i in range(n):
        if ham.h[i] != 0.0:
            matrix += ham.h[i] * sx[i]
    return matrix


class ExactEvolver:
    """Caches the eigendecomposition so exp(-iHt) is cheap per time."""

    def __init__(self, ham: SpinHamiltonian):
        self.ham = ham
        matrix = hamiltonian_matrix(ham)
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(matrix)

    def unitary(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * self.eigenvalues * t)
        return (self.eigenvectors * phases) @ self.eigenvectors.conj().T

    def evolve(self, amplitudes: np.ndarray, t: float) -> np.ndarray:
        coeff = self.eigenvectors.conj().T @ amplitudes
        return self.eigenvectors @ (np.exp(-1j * self.eigenvalues * t)[:, None] * coeff
                                    if amplitudes.ndim > 1
                                    else np.exp(-1j * self.eigenvalues * t) * coeff)


def exact_unitary(ham: SpinHamiltonian, t: float) -> UnitaryMatrix:
    """exp(-iHt) via Hermitian eigendecomposition."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return UnitaryMatrix(2**ham.n_spins, ExactEvolver(ham).unitary(t))


def exact_evolve(ham: SpinHamiltonian, t: float, state: StateVector) -> StateVector:
    """Exact time evolution of a statevector."""
    if t < 0:
        raise ValueError("t must be non-negative")
    amps = ExactEvolver(ham).evolve(state.amplitudes, t)
    return StateVector(state.n_qubits, amps)
