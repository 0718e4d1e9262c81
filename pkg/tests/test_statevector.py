import math
from functools import reduce

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftvqe.circuit import CliffordTCircuit, ParamCircuit, transpile
from ftvqe.statevector import (
    DOUBLE,
    PAULI,
    PauliSum,
    StateVector,
    apply_circuit,
    circuit_unitary,
    expectation,
    rotation_matrix,
    set_precision,
)

H1 = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def dense(n, ops):
    """kron of single-qubit operators, qubit 0 leftmost."""
    return reduce(np.kron, [ops.get(q, np.eye(2)) for q in range(n)])


def test_x_flips_qubit():
    s = apply_circuit(DOUBLE.zero_state(1), ParamCircuit(1).add("X", 0))
    assert np.allclose(s.amps, [0, 1])


def test_hh_is_identity():
    s = apply_circuit(DOUBLE.zero_state(1), ParamCircuit(1).add("H", 0).add("H", 0))
    assert np.allclose(s.amps, [1, 0])


def test_qubit_zero_is_most_significant():
    s = apply_circuit(DOUBLE.zero_state(3), ParamCircuit(3).add("X", 0))
    assert np.argmax(abs(s.amps)) == 0b100


def test_cnot_convention():
    c = ParamCircuit(2).add("X", 0).add("CNOT", 0, 1)
    s = apply_circuit(DOUBLE.zero_state(2), c)
    assert np.allclose(s.amps, [0, 0, 0, 1])


def test_pauli_expectations():
    zero = DOUBLE.zero_state(1)
    assert expectation(zero, PauliSum(1, ((1.0, "Z"),))) == pytest.approx(1.0)
    plus = apply_circuit(zero, ParamCircuit(1).add("H", 0))
    assert expectation(plus, PauliSum(1, ((1.0, "X"),))) == pytest.approx(1.0)
    assert expectation(plus, PauliSum(1, ((1.0, "Z"),))) == pytest.approx(0.0, abs=1e-15)


def test_tfim_product_state_matches_dense():
    n = 4
    terms = [(-1.0, "".join("Z" if q in (i, (i + 1) % n) else "I" for q in range(n))) for i in range(n)]
    terms += [(-1.0, "".join("X" if q == i else "I" for q in range(n))) for i in range(n)]
    h = PauliSum(n, tuple(terms))
    rng = np.random.default_rng(0)
    c = ParamCircuit(n)
    for q in range(n):
        c.add("RY", q, angle=float(rng.uniform(0, math.pi)))
    s = apply_circuit(DOUBLE.zero_state(n), c)
    ref = np.vdot(s.amps, h.to_dense() @ s.amps).real
    assert expectation(s, h) == pytest.approx(ref, abs=1e-12)


@settings(max_examples=20)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_pauli_apply_matches_dense(n, seed):
    rng = np.random.default_rng(seed)
    words = ["".join(rng.choice(list("IXYZ"), n)) for _ in range(5)]
    h = PauliSum(n, tuple((float(rng.normal()), w) for w in words))
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    assert np.allclose(h.apply(psi), h.to_dense() @ psi)


@pytest.mark.parametrize("kind,p", [("RZ", "Z"), ("RX", "X"), ("RY", "Y")])
def test_rotation_matrices(kind, p):
    from scipy.linalg import expm

    assert np.allclose(rotation_matrix(kind, 0.77), expm(-0.5j * 0.77 * PAULI[p]))


def test_transpiled_rz_on_plus_state():
    c = ParamCircuit(1).add("H", 0).add("RZ", 0, angle=0.3)
    ft = transpile(c, [], 6)
    exact = apply_circuit(DOUBLE.zero_state(1), c).amps
    approx = apply_circuit(DOUBLE.zero_state(1), ft).amps
    assert np.linalg.norm(exact - approx) <= 1e-6


def test_gate_fusion_matches_unfused():
    rng = np.random.default_rng(3)
    c = ParamCircuit(3)
    for _ in range(30):
        k = rng.choice(["H", "S", "RX", "RZ", "CNOT"])
        if k == "CNOT":
            a, b = rng.choice(3, 2, replace=False)
            c.add("CNOT", int(a), int(b))
        elif k in ("H", "S"):
            c.add(str(k), int(rng.integers(3)))
        else:
            c.add(str(k), int(rng.integers(3)), angle=float(rng.uniform(-3, 3)))
    u = circuit_unitary(c)  # gate by gate
    s = apply_circuit(DOUBLE.zero_state(3), c)  # fused
    assert np.allclose(u[:, 0], s.amps, atol=1e-13)
    assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-12)


def test_extended_matches_double():
    c = ParamCircuit(3).add("H", 0).add("CNOT", 0, 1).add("RX", 2, angle=0.4).add("RY", 1, angle=-1.3)
    c.add("ZZ", 0, 2, angle=0.9).add("S", 2).add("XX", 1, 2, angle=0.25)
    h = PauliSum(3, ((1.0, "ZZI"), (0.5, "XIX"), (-0.7, "IYY")))
    ed = expectation(apply_circuit(DOUBLE.zero_state(3), c), h)
    eng = set_precision(16)
    em = expectation(apply_circuit(eng.zero_state(3), c), h)
    assert isinstance(em, mpmath.mpf)
    assert abs(float(em) - ed) < 1e-13


def test_extended_precision_is_more_accurate():
    # a long Clifford+T circuit: error growth shows at low precision
    ct = CliffordTCircuit(2)
    rng = np.random.default_rng(1)
    for _ in range(400):
        ct.gates.append((str(rng.choice(["H", "T", "S"])), (int(rng.integers(2)),)))
        ct.gates.append(("CNOT", (0, 1)))
    h = PauliSum(2, ((1.0, "ZI"), (1.0, "XX")))
    ref = expectation(apply_circuit(set_precision(40).zero_state(2), ct), h)
    lo = expectation(apply_circuit(set_precision(7).zero_state(2), ct), h)
    mid = expectation(apply_circuit(set_precision(20).zero_state(2), ct), h)
    assert abs(mid - ref) < 1e-17
    assert 1e-12 < abs(lo - ref) < 1e-3


def test_clifford_amplitudes_exact_at_extended_precision():
    c = CliffordTCircuit(2, [("H", (0,)), ("CNOT", (0, 1)), ("T", (1,))], phase_w=3)
    with mpmath.workdps(30):
        s = apply_circuit(set_precision(30).zero_state(2), c)
        w = mpmath.expjpi(mpmath.mpf(3) / 4)
        r = 1 / mpmath.sqrt(2)
        assert abs(s.amps[0] - w * r) < mpmath.mpf(10) ** -28
        assert abs(s.amps[3] - w * r * mpmath.expjpi(mpmath.mpf(1) / 4)) < mpmath.mpf(10) ** -28


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_norm_preserved(seed):
    rng = np.random.default_rng(seed)
    c = ParamCircuit(3)
    for _ in range(20):
        q = int(rng.integers(3))
        c.add(str(rng.choice(["RX", "RY", "RZ"])), q, angle=float(rng.uniform(-4, 4)))
        c.add("CNOT", q, (q + 1) % 3)
    assert apply_circuit(DOUBLE.zero_state(3), c).norm() == pytest.approx(1.0, abs=1e-13)
    assert apply_circuit(set_precision(12).zero_state(3), c).norm() == pytest.approx(1.0, abs=1e-10)


def test_imaginary_residue_detected():
    class Broken(PauliSum):
        def apply(self, psi):
            return 1j * psi

    with pytest.raises(ArithmeticError, match="imaginary"):
        expectation(DOUBLE.zero_state(1), Broken(1, ((1.0, "Z"),)))


def test_size_mismatch_and_bad_words():
    with pytest.raises(ValueError):
        apply_circuit(DOUBLE.zero_state(2), ParamCircuit(3))
    with pytest.raises(ValueError):
        PauliSum(2, ((1.0, "XQ"),))
    with pytest.raises(ValueError):
        expectation(DOUBLE.zero_state(2), PauliSum(1, ((1.0, "Z"),)))
    with pytest.raises(ValueError):
        set_precision(2)


def test_statevector_conversion():
    eng = set_precision(10)
    s = eng.from_numpy(np.array([0, 1j]))
    assert isinstance(s, StateVector)
    assert np.allclose(s.to_numpy(), [0, 1j])
