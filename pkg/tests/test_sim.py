"""Simulator checks: gate application, circuits, expectations, gradients.

Derived expectations come from independent dense oracles (scipy expm and
explicit matrix products), never from the code path under test.
"""

import numpy as np
import pytest
from scipy.linalg import expm

from symmqvar.paulis import PauliSum, dense_matrix
from symmqvar.sim import (
    Circuit,
    Gate,
    StateVector,
    apply_gate,
    circuit_unitary,
    expectation,
    finite_difference_gradient,
    gradient_adjoint,
    rotation_matrix,
    run_circuit,
    value_and_gradient,
)

from conftest import random_circuit

X = np.array([[0, 1], [1, 0]], dtype=complex)


# -- apply_gate --------------------------------------------------------------


def test_z_rotation_on_zero_is_global_phase():
    gen = PauliSum.single(1, "Z", 0, 0.5)
    gate = Gate.parametrized(gen, 0)
    theta = 0.731
    out = apply_gate(StateVector.zero(1), gate, [theta])
    assert np.allclose(out.amplitudes, [np.exp(-1j * theta / 2), 0.0])


def test_fixed_x_flips_basis_state():
    out = apply_gate(StateVector.zero(1), Gate.fixed(X, (0,)))
    assert np.allclose(out.amplitudes, [0.0, 1.0])


def test_xx_rotation_matches_dense_expm_oracle():
    theta = np.pi / 2
    gate = Gate.parametrized(PauliSum.from_word("XX"), 0)
    out = apply_gate(StateVector.zero(2), gate, [theta])
    assert np.allclose(out.amplitudes, [0, 0, 0, -1j])
    oracle = expm(-1j * theta * dense_matrix(PauliSum.from_word("XX"))) @ np.eye(4)[:, 0]
    assert np.allclose(out.amplitudes, oracle)


def test_noncommuting_generator_uses_dense_exponential():
    gen = PauliSum(2, {"XI": 0.7, "ZI": 0.4, "IY": 0.2, "ZZ": 0.9})
    assert not gen.terms_commute()
    gate = Gate.parametrized(gen, 0)
    theta = 1.234
    out = apply_gate(StateVector.plus(2), gate, [theta])
    oracle = expm(-1j * theta * dense_matrix(gen)) @ StateVector.plus(2).amplitudes
    assert np.allclose(out.amplitudes, oracle, atol=1e-12)


def test_noncommuting_generator_too_wide_rejected():
    gen = PauliSum(5)
    gen.add_term("XXXXX", 1.0)
    gen.add_term("ZIIII", 1.0)
    with pytest.raises(ValueError):
        Gate.parametrized(gen, 0)


def test_nonunitary_fixed_matrix_rejected():
    with pytest.raises(ValueError):
        Gate.fixed(np.array([[1, 0], [0, 2]]), (0,))


# -- run_circuit -------------------------------------------------------------


def test_empty_circuit_keeps_initial_state():
    out = run_circuit(Circuit(2, [], 0), [])
    assert np.allclose(out.amplitudes, StateVector.zero(2).amplitudes)


def test_double_x_is_identity():
    gates = [Gate.fixed(X, (0,)), Gate.fixed(X, (0,))]
    out = run_circuit(Circuit(1, gates, 0), [])
    assert np.allclose(out.amplitudes, [1.0, 0.0])


def test_qaoa_layer_at_zero_angles_preserves_plus():
    from symmqvar.vqe import AnsatzSpec, build_ansatz

    circuit, initial = build_ansatz(AnsatzSpec("QAOA", 2, 1))
    out = run_circuit(circuit, [0.0, 0.0], initial=initial)
    assert np.allclose(out.amplitudes, StateVector.plus(2).amplitudes)


def test_param_length_mismatch():
    c = Circuit(1, [Gate.parametrized(PauliSum.from_word("X"), 0)], 1)
    with pytest.raises(ValueError):
        run_circuit(c, [0.1, 0.2])


def test_qubit_out_of_range_rejected():
    with pytest.raises(ValueError):
        Circuit(1, [Gate.fixed(X, (1,))], 0)


def test_norm_preserved_over_random_circuits():
    # 100 seeds, 20 gates, n <= 6; checked after every gate application
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        c = random_circuit(rng, n, 20)
        out = run_circuit(c, rng.uniform(0, 2 * np.pi, c.param_count), check_norm=True)
        assert abs(out.norm_sq() - 1.0) < 1e-10


def test_run_circuit_matches_dense_matrix_product():
    # amplitude-wise agreement with multiplying dense gate matrices, n <= 4
    for seed in range(20):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(1, 5))
        c = random_circuit(rng, n, 8)
        params = rng.uniform(0, 2 * np.pi, c.param_count)
        u = circuit_unitary(c, params)
        dense_out = u @ StateVector.zero(n).amplitudes
        out = run_circuit(c, params)
        assert np.allclose(out.amplitudes, dense_out, atol=1e-10)
        assert np.allclose(u @ u.conj().T, np.eye(1 << n), atol=1e-10)


# -- expectation -------------------------------------------------------------


def test_expectation_plus_z_is_zero():
    assert abs(expectation(StateVector.plus(1), PauliSum.from_word("Z"))) < 1e-12


def test_expectation_zero_z_is_one():
    assert expectation(StateVector.zero(1), PauliSum.from_word("Z")) == pytest.approx(1.0)


def test_expectation_tfim_on_plus_state():
    from symmqvar.vqe import build_hamiltonian

    h = build_hamiltonian("tfim", 4, g=1.0)
    state = StateVector.plus(4)
    val = expectation(state, h.op)
    assert val == pytest.approx(-4.0, abs=1e-10)
    # dense oracle
    dense = dense_matrix(h.op)
    psi = state.amplitudes
    assert val == pytest.approx(float(np.real(psi.conj() @ dense @ psi)), abs=1e-12)


def test_expectation_dimension_mismatch():
    with pytest.raises(ValueError):
        expectation(StateVector.zero(2), PauliSum.from_word("Z"))


# -- gradients ---------------------------------------------------------------


def test_gradient_at_cos_extremum_is_zero():
    gen = PauliSum.single(1, "X", 0, 0.5)
    c = Circuit(1, [Gate.parametrized(gen, 0)], 1)
    grad = gradient_adjoint(c, [0.0], PauliSum.from_word("Z"))
    assert abs(grad[0]) < 1e-12


def test_gradient_matches_minus_sin():
    # <Z> = cos(theta) for R_X(theta); derivative oracle: d cos = -sin
    gen = PauliSum.single(1, "X", 0, 0.5)
    c = Circuit(1, [Gate.parametrized(gen, 0)], 1)
    val, grad = value_and_gradient(c, [np.pi / 2], PauliSum.from_word("Z"))
    assert val == pytest.approx(0.0, abs=1e-12)
    assert grad[0] == pytest.approx(-1.0, abs=1e-10)
    fd = finite_difference_gradient(c, [np.pi / 2], PauliSum.from_word("Z"))
    assert grad[0] == pytest.approx(fd[0], abs=1e-8)


def test_shared_slot_accumulates_per_gate_contributions():
    gen = PauliSum.single(1, "X", 0, 0.5)
    shared = Circuit(1, [Gate.parametrized(gen, 0), Gate.parametrized(gen, 0)], 1)
    theta = 0.4
    grad = gradient_adjoint(shared, [theta], PauliSum.from_word("Z"))
    # finite-difference oracle on the shared angle
    fd = finite_difference_gradient(shared, [theta], PauliSum.from_word("Z"))
    assert grad[0] == pytest.approx(fd[0], rel=1e-6)
    # equals the sum of the two per-gate gradients of the unshared circuit
    split = Circuit(1, [Gate.parametrized(gen, 0), Gate.parametrized(gen, 1)], 2)
    fd_split = finite_difference_gradient(split, [theta, theta], PauliSum.from_word("Z"))
    assert grad[0] == pytest.approx(fd_split.sum(), rel=1e-6)


def test_adjoint_matches_finite_differences_on_random_circuits():
    # relative error < 1e-6 componentwise (absolute floor keeps flat
    # directions well-posed)
    for seed in range(25):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(1, 6))
        c = random_circuit(rng, n, 10, shared=True)
        params = rng.uniform(0, 2 * np.pi, c.param_count)
        obs = PauliSum(n)
        for q in range(n):
            obs.add_term("I" * q + "Z" + "I" * (n - q - 1), rng.normal())
        adj = gradient_adjoint(c, params, obs)
        fd = finite_difference_gradient(c, params, obs)
        err = np.abs(adj - fd) / np.maximum(1.0, np.abs(fd))
        assert err.max() < 1e-6


def test_fixed_gates_contribute_zero_gradient():
    gates = [Gate.fixed(X, (0,)), Gate.parametrized(PauliSum.single(1, "Z", 0, 0.5), 0)]
    c = Circuit(1, gates, 1)
    grad = gradient_adjoint(c, [0.3], PauliSum.from_word("X"))
    fd = finite_difference_gradient(c, [0.3], PauliSum.from_word("X"))
    assert grad[0] == pytest.approx(fd[0], abs=1e-8)
