import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftvqe.circuit import ParamCircuit, ParamGate
from ftvqe.models import (
    ModelSpec,
    build_ansatz,
    build_hamiltonian,
    exact_ground_energy,
    initial_circuit,
    initial_state,
    tfim_free_fermion_energy,
)
from ftvqe.statevector import DOUBLE, PAULI, apply_circuit, expectation

X, Y, Z, I2 = PAULI["X"], PAULI["Y"], PAULI["Z"], PAULI["I"]


def test_tfim_two_sites():
    h = build_hamiltonian(ModelSpec("TFIM", 2, 1.0)).to_dense()
    ref = -2 * np.kron(Z, Z) - np.kron(X, I2) - np.kron(I2, X)
    assert np.allclose(h, ref)


def test_xxz_two_sites():
    h = build_hamiltonian(ModelSpec("XXZ", 2, 1.0)).to_dense()
    ref = 2 * (np.kron(X, X) + np.kron(Y, Y) + np.kron(Z, Z))
    assert np.allclose(h, ref)


@pytest.mark.parametrize("n", [2, 3, 6, 16])
def test_term_counts(n):
    assert len(build_hamiltonian(ModelSpec("TFIM", n))) == 2 * n
    if n % 2 == 0:
        assert len(build_hamiltonian(ModelSpec("XXZ", n))) == 3 * n
    assert len(build_hamiltonian(ModelSpec("TFIM", 16))) == 32


def test_coefficients():
    h = build_hamiltonian(ModelSpec("TFIM", 4, coupling=0.7))
    coeffs = sorted(c for c, _ in h.terms)
    assert coeffs == [-1.0] * 4 + [-0.7] * 4
    h = build_hamiltonian(ModelSpec("XXZ", 4, coupling=0.3))
    assert sorted(c for c, _ in h.terms) == [0.3] * 4 + [1.0] * 8


def test_invalid_specs():
    with pytest.raises(ValueError):
        ModelSpec("XXZ", 5)
    with pytest.raises(ValueError):
        ModelSpec("TFIM", 1)
    with pytest.raises(ValueError):
        ModelSpec("HUBBARD", 4)
    with pytest.raises(ValueError):
        ModelSpec("TFIM", 4, layers=0)


def test_ansatz_sizes():
    a = build_ansatz(ModelSpec("TFIM", 16, layers=8))
    assert a.n_params == 16
    assert a.lowered().rotation_count == 256
    a = build_ansatz(ModelSpec("XXZ", 12, layers=36))
    assert a.n_params == 144
    assert a.lowered().rotation_count == 1296
    a = build_ansatz(ModelSpec("TFIM", 4, layers=2))
    assert a.n_params == 4
    assert a.rotation_count == 16


@settings(max_examples=20)
@given(st.sampled_from(["TFIM", "XXZ"]), st.integers(1, 4).map(lambda x: 2 * x), st.integers(1, 5))
def test_ansatz_counts_property(model, n, layers):
    a = build_ansatz(ModelSpec(model, n, layers=layers))
    per_layer = 2 if model == "TFIM" else 4
    assert a.n_params == per_layer * layers
    rot_per_layer = 2 * n if model == "TFIM" else 3 * n
    assert a.rotation_count == rot_per_layer * layers
    assert a.lowered().rotation_count == rot_per_layer * layers


def test_tfim_initial_state():
    s = initial_state(ModelSpec("TFIM", 2))
    assert np.allclose(s.amps, [0.5] * 4)


def test_xxz_initial_state_is_singlet():
    s = initial_state(ModelSpec("XXZ", 2))
    a = 1 / math.sqrt(2)
    assert np.allclose(s.amps, [0, a, -a, 0])


def test_xxz_four_sites_product_of_singlets():
    s = initial_state(ModelSpec("XXZ", 4))
    singlet = np.array([0, 1, -1, 0]) / math.sqrt(2)
    assert np.allclose(s.amps, np.kron(singlet, singlet))
    ztot = sum(np.kron(np.kron(np.eye(1 << q), Z), np.eye(1 << (3 - q))) for q in range(4))
    assert abs(np.vdot(s.amps, ztot @ s.amps)) < 1e-14


def test_initial_state_minimizes_field_term():
    n = 4
    s = initial_state(ModelSpec("TFIM", n))
    field = build_hamiltonian(ModelSpec("TFIM", n))
    from ftvqe.statevector import PauliSum

    xs = PauliSum(n, tuple((c, w) for c, w in field.terms if "Z" not in w))
    assert expectation(s, xs) == pytest.approx(-n)


def brute_ground(h_dense):
    return np.linalg.eigvalsh(h_dense)[0]


def test_ground_energy_small():
    ref = brute_ground(-2 * np.kron(Z, Z) - np.kron(X, I2) - np.kron(I2, X))
    assert exact_ground_energy(ModelSpec("TFIM", 2)) == pytest.approx(ref, abs=1e-12)
    # 4-site Heisenberg ring: known value -8 (in Pauli units)
    assert exact_ground_energy(ModelSpec("XXZ", 4)) == pytest.approx(-8.0, abs=1e-10)


@pytest.mark.parametrize("n,g", [(2, 1.0), (4, 1.0), (6, 0.5), (8, 1.3)])
def test_free_fermions_match_dense(n, g):
    assert tfim_free_fermion_energy(n, g) == pytest.approx(exact_ground_energy(ModelSpec("TFIM", n, g)), abs=1e-9)


def test_free_fermions_match_iterative_16():
    e = exact_ground_energy(ModelSpec("TFIM", 16, 1.0))
    assert abs(e - tfim_free_fermion_energy(16, 1.0)) <= 1e-8


@pytest.mark.parametrize("spec", [ModelSpec("TFIM", 8), ModelSpec("XXZ", 10, 0.5), ModelSpec("TFIM", 12, 0.8)])
def test_iterative_matches_dense(spec):
    assert abs(exact_ground_energy(spec, "dense") - exact_ground_energy(spec, "iterative")) <= 1e-9


def test_exact_energy_limits():
    with pytest.raises(ValueError):
        exact_ground_energy(ModelSpec("TFIM", 21))
    with pytest.raises(ValueError):
        exact_ground_energy(ModelSpec("TFIM", 4), method="qr")


@pytest.mark.parametrize("model", ["TFIM", "XXZ"])
def test_zero_parameters_give_initial_energy(model):
    spec = ModelSpec(model, 4, layers=2)
    a = build_ansatz(spec)
    h = build_hamiltonian(spec)
    s0 = initial_state(spec)
    s = apply_circuit(s0, a, [0.0] * a.n_params)
    direct = np.vdot(s0.amps, h.to_dense() @ s0.amps).real
    assert expectation(s, h) == pytest.approx(direct, abs=1e-12)


def translate(c: ParamCircuit, shift: int) -> ParamCircuit:
    n = c.n_qubits
    gates = [ParamGate(g.kind, tuple((q + shift) % n for q in g.qubits), g.param_id, g.fixed_angle, g.scale) for g in c.gates]
    return ParamCircuit(n, gates, c.n_params)


@pytest.mark.parametrize("model,shift", [("TFIM", 1), ("TFIM", 3), ("XXZ", 2)])
def test_translation_invariance(model, shift):
    spec = ModelSpec(model, 6, coupling=0.9, layers=2)
    a = build_ansatz(spec)
    prep = initial_circuit(spec)
    h = build_hamiltonian(spec)
    theta = np.random.default_rng(5).uniform(-3, 3, a.n_params)

    def energy(prep_c, ans):
        s = apply_circuit(apply_circuit(DOUBLE.zero_state(6), prep_c), ans, theta)
        return expectation(s, h)

    e0 = energy(prep, a)
    e1 = energy(translate(prep, shift), translate(a, shift))
    assert abs(e0 - e1) <= 1e-12
