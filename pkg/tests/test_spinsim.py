"""Unit tests for the dense statevector engine."""

import numpy as np
import pytest

from ioncodesign.spinsim import (
    CompiledCircuit,
    GateSpec,
    StateVector,
    apply_gate,
    apply_kernel,
    basis_state,
    circuit_unitary,
    evolve_columns,
    expect_sz_tot,
    gate_kernel,
    gate_matrix,
    sz_tot_diagonal,
)
from ioncodesign.hamiltonian import SpinHamiltonian
from ioncodesign.trotter import build_trotter_circuit


def random_instance(n, seed=0):
    rng = np.random.default_rng(seed)
    J = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            J[i, j] = J[j, i] = rng.uniform(-1, 1)
    return SpinHamiltonian(n, J, rng.uniform(-5, 5, n))


def test_basis_state_site0_is_msb():
    state = basis_state(3, [1, 0, 0])
    assert np.argmax(np.abs(state.amplitudes)) == 4
    state = basis_state(3, [0, 0, 1])
    assert np.argmax(np.abs(state.amplitudes)) == 1


def test_sz_tot_diagonal_counts_ups():
    diag = sz_tot_diagonal(2)
    # index 0 = all down, index 3 = all up
    assert np.allclose(diag, [-1.0, 0.0, 0.0, 1.0])
    up = basis_state(2, [1, 1])
    down = basis_state(2, [0, 0])
    assert expect_sz_tot(up) == pytest.approx(1.0)
    assert expect_sz_tot(down) == pytest.approx(-1.0)


def test_gate_kernels_are_unitary_and_special():
    for spec in [GateSpec("RX", (0,), 0.7), GateSpec("RY", (0,), -2.3),
                 GateSpec("RZ", (0,), np.pi), GateSpec("XX", (0, 1), 1.9)]:
        k = gate_kernel(spec)
        assert np.allclose(k @ k.conj().T, np.eye(k.shape[0]), atol=1e-14)


def test_rotation_convention_rz():
    # R^z(phi) = exp(-i S^z phi / 2): a full phi = 2pi rotation gives
    # phases exp(-+ i pi / 2) on the up/down components.
    k = gate_kernel(GateSpec("RZ", (0,), 2 * np.pi))
    # basis order (down, up); S^z = diag(-1/2, +1/2)
    assert np.allclose(k, np.diag([np.exp(1j * np.pi / 2), np.exp(-1j * np.pi / 2)]))


def test_xx_gate_on_all_down():
    # XX(phi)|00> = cos(phi/4)|00> - i sin(phi/4)|11>
    phi = 1.3
    state = apply_gate(basis_state(2, [0, 0]), GateSpec("XX", (0, 1), phi))
    expected = np.zeros(4, dtype=complex)
    expected[0] = np.cos(phi / 4)
    expected[3] = -1j * np.sin(phi / 4)
    assert np.allclose(state.amplitudes, expected)


def test_apply_kernel_matches_kron_embedding():
    rng = np.random.default_rng(1)
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    spec = GateSpec("RY", (1,), 0.9)
    k = gate_kernel(spec)
    full = np.kron(np.kron(np.eye(2), k), np.eye(2))
    out = apply_kernel(psi, k, (1,), 3)
    assert np.allclose(out, full @ psi)


def test_apply_kernel_two_site_nonadjacent():
    rng = np.random.default_rng(2)
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    spec = GateSpec("XX", (0, 2), 0.8)
    full = gate_matrix(spec, 3).entries
    assert np.allclose(apply_kernel(psi, gate_kernel(spec), (0, 2), 3), full @ psi)


def test_gate_matrix_site_order_matters_not_for_xx():
    a = gate_matrix(GateSpec("XX", (0, 2), 0.8), 3).entries
    b = gate_matrix(GateSpec("XX", (2, 0), 0.8), 3).entries
    assert np.allclose(a, b)


def test_circuit_unitary_matches_explicit_product():
    ham = random_instance(3, seed=5)
    circuit = build_trotter_circuit(ham, 0.7, 2)
    u = circuit_unitary(circuit).entries
    ref = np.eye(8, dtype=complex)
    for g in circuit.gates:
        ref = gate_matrix(g.spec, 3).entries @ ref
    assert np.allclose(u, ref, atol=1e-12)
    assert np.allclose(u @ u.conj().T, np.eye(8), atol=1e-12)


def test_compiled_circuit_matches_naive_with_realized_angles():
    ham = random_instance(4, seed=7)
    circuit = build_trotter_circuit(ham, 1.1, 3)
    rng = np.random.default_rng(3)
    angles = [g.spec.angle * rng.uniform(0.9, 1.0) for g in circuit.gates]
    ref = np.eye(16, dtype=complex)
    for g, a in zip(circuit.gates, angles):
        spec = GateSpec(g.spec.kind, g.spec.sites, a)
        ref = gate_matrix(spec, 4).entries @ ref
    out = evolve_columns(circuit, np.eye(16, dtype=complex), angles)
    assert np.allclose(out, ref, atol=1e-12)
    compiled = CompiledCircuit(circuit)
    assert np.allclose(compiled.apply(np.eye(16, dtype=complex), angles), ref, atol=1e-12)


def test_realized_angles_dict_override():
    ham = random_instance(2, seed=9)
    circuit = build_trotter_circuit(ham, 0.5, 1)
    nominal = circuit_unitary(circuit).entries
    overridden = circuit_unitary(circuit, {0: circuit.gates[0].spec.angle}).entries
    assert np.allclose(nominal, overridden)
    with pytest.raises(ValueError):
        circuit_unitary(circuit, {len(circuit.gates): 0.0})
    with pytest.raises(ValueError):
        circuit_unitary(circuit, [0.0])


def test_gate_spec_validation():
    with pytest.raises(ValueError):
        GateSpec("RQ", (0,), 1.0)
    with pytest.raises(ValueError):
        GateSpec("XX", (1, 1), 1.0)
    with pytest.raises(ValueError):
        GateSpec("RX", (0, 1), 1.0)
    with pytest.raises(ValueError):
        GateSpec("XX", (-1, 0), 1.0)


def test_statevector_shape_check():
    with pytest.raises(ValueError):
        StateVector(2, np.zeros(3))
