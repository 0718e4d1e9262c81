"""Statevector simulation at double or configurable extended precision.

Qubit 0 is the most significant bit of the basis index, so dense operators
are built as kron(op_0, op_1, ...).  The double backend runs on numpy and
fuses consecutive single-qubit gates; the extended backend uses mpmath
complex numbers at ``p`` significant digits and rounds after every gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Sequence

import mpmath
import numpy as np

from .circuit import CliffordTCircuit, ParamCircuit

_INV_SQRT2 = 1 / math.sqrt(2)
_W = np.exp(1j * np.pi / 4)

FIXED_1Q = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, _W]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
}
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def rotation_matrix(kind: str, t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    if kind == "RZ":
        return np.array([[complex(c, -s), 0], [0, complex(c, s)]])
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    raise ValueError(f"not a single-qubit rotation: {kind}")


# ---------------------------------------------------------------------------
# Pauli sums


@dataclass(frozen=True)
class PauliSum:
    n_qubits: int
    terms: tuple[tuple[float, str], ...]

    def __post_init__(self) -> None:
        terms = tuple((float(c), w.upper()) for c, w in self.terms)
        for _, w in terms:
            if len(w) != self.n_qubits or set(w) - set("IXYZ"):
                raise ValueError(f"bad Pauli word {w!r} for {self.n_qubits} qubits")
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    def to_dense(self) -> np.ndarray:
        if self.n_qubits > 14:
            raise ValueError("dense matrices limited to 14 qubits")
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for c, w in self.terms:
            out += c * reduce(np.kron, (PAULI[p] for p in w))
        return out

    def masks(self):
        """Per term: (coefficient, x-mask, z-mask, number of Y factors)."""
        n = self.n_qubits
        out = []
        for c, w in self.terms:
            xm = zm = 0
            for q, p in enumerate(w):
                bit = 1 << (n - 1 - q)
                if p in "XY":
                    xm |= bit
                if p in "ZY":
                    zm |= bit
            out.append((c, xm, zm, w.count("Y")))
        return out

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """H @ psi without building H."""
        idx = np.arange(1 << self.n_qubits)
        out = np.zeros_like(psi)
        for c, xm, zm, ny in self.masks():
            sign = 1 - 2 * (_popcount(idx & zm) & 1)
            # P|i> = i^ny (-1)^{popcount(i & z)} |i ^ x>
            out[idx ^ xm] += (c * (1j**ny)) * sign * psi
        return out

    def max_abs_eigen_bound(self) -> float:
        return sum(abs(c) for c, _ in self.terms)


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.int64)
    count = np.zeros_like(a)
    while np.any(a):
        count += a & 1
        a >>= 1
    return count


# ---------------------------------------------------------------------------
# state and engine


@dataclass
class StateVector:
    n_qubits: int
    amps: object  # numpy array (double) or list of mpc (extended)
    precision: int | None = None

    def copy(self) -> StateVector:
        amps = self.amps.copy() if isinstance(self.amps, np.ndarray) else list(self.amps)
        return StateVector(self.n_qubits, amps, self.precision)

    def to_numpy(self) -> np.ndarray:
        if isinstance(self.amps, np.ndarray):
            return self.amps
        return np.array([complex(a) for a in self.amps])

    def norm(self) -> float:
        if isinstance(self.amps, np.ndarray):
            return float(np.linalg.norm(self.amps))
        with mpmath.workdps(self.precision):
            return float(mpmath.sqrt(mpmath.fsum(abs(a) ** 2 for a in self.amps)))


@dataclass(frozen=True)
class Engine:
    """Simulation backend; precision None means numpy double precision."""

    precision: int | None = None

    def zero_state(self, n: int) -> StateVector:
        if self.precision is None:
            amps = np.zeros(1 << n, dtype=complex)
            amps[0] = 1
            return StateVector(n, amps)
        with mpmath.workdps(self.precision):
            amps = [mpmath.mpc(0)] * (1 << n)
            amps[0] = mpmath.mpc(1)
        return StateVector(n, amps, self.precision)

    def from_numpy(self, amps: np.ndarray) -> StateVector:
        n = int(round(math.log2(len(amps))))
        if self.precision is None:
            return StateVector(n, np.asarray(amps, dtype=complex).copy())
        with mpmath.workdps(self.precision):
            return StateVector(n, [mpmath.mpc(complex(a)) for a in amps], self.precision)

    def apply(self, s: StateVector, c, theta: Sequence[float] | None = None) -> StateVector:
        return apply_circuit(s, c, theta)

    def expectation(self, s: StateVector, h: PauliSum) -> float:
        return expectation(s, h)


def set_precision(p: int | None) -> Engine:
    """Engine computing with p significant decimal digits (None: double)."""
    if p is not None and p < 4:
        raise ValueError("precision must be at least 4 digits")
    return Engine(p)


DOUBLE = Engine(None)


def apply_circuit(s: StateVector, c, theta: Sequence[float] | None = None) -> StateVector:
    """Apply a ParamCircuit (with ``theta``) or a CliffordTCircuit; returns a new state."""
    if c.n_qubits != s.n_qubits:
        raise ValueError(f"circuit has {c.n_qubits} qubits, state has {s.n_qubits}")
    ops = _program(c, theta)
    if s.precision is None:
        return StateVector(s.n_qubits, _run_numpy(s.amps, s.n_qubits, ops, fuse=True))
    return StateVector(s.n_qubits, _run_mp(s.amps, s.n_qubits, ops, s.precision), s.precision)


def _program(c, theta):
    """Circuit as a flat list of ('1q', q, name, angle) / ('cx', c, t) / ('phase', w)."""
    ops = []
    if isinstance(c, ParamCircuit):
        if c.n_params and (theta is None or len(theta) != c.n_params):
            raise ValueError(f"circuit needs {c.n_params} parameters")
        for g in c.lowered().gates:
            if g.kind == "CNOT":
                ops.append(("cx", *g.qubits))
            elif g.kind == "PHASE_W":
                ops.append(("phase", 1))
            elif g.is_rotation:
                ops.append(("1q", g.qubits[0], g.kind, g.angle(theta)))
            else:
                ops.append(("1q", g.qubits[0], g.kind, None))
    elif isinstance(c, CliffordTCircuit):
        # runs of single-qubit gates on one qubit become a single "word" op
        for kind, qs in c.gates:
            if kind == "CNOT":
                ops.append(("cx", *qs))
            elif ops and ops[-1][0] == "word" and ops[-1][1] == qs[0]:
                ops[-1] = ("word", qs[0], ops[-1][2] + kind)
            else:
                ops.append(("word", qs[0], kind))
        if c.phase_w:
            ops.append(("phase", c.phase_w))
    else:
        raise TypeError(f"cannot apply {type(c).__name__}")
    return ops


def _matrix(name: str, angle) -> np.ndarray:
    return FIXED_1Q[name] if angle is None else rotation_matrix(name, angle)


def _run_numpy(amps: np.ndarray, n: int, ops, fuse: bool) -> np.ndarray:
    psi = np.array(amps, dtype=complex, copy=True)
    pending: dict[int, np.ndarray] = {}

    def flush(q):
        m = pending.pop(q, None)
        if m is not None:
            _apply_1q(psi, n, q, m)

    for op in ops:
        if op[0] in ("1q", "word"):
            if op[0] == "word":
                q, m = op[1], _word_matrix(op[2])
            else:
                _, q, name, angle = op
                m = _matrix(name, angle)
            if fuse:
                pending[q] = m @ pending[q] if q in pending else m
            else:
                _apply_1q(psi, n, q, m)
        elif op[0] == "cx":
            flush(op[1])
            flush(op[2])
            _apply_cx(psi, n, op[1], op[2])
        else:
            psi *= _W ** op[1]
    for q in list(pending):
        flush(q)
    return psi


@lru_cache(maxsize=65536)
def _word_matrix(word: str) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for g in word:
        m = FIXED_1Q[g] @ m
    m.setflags(write=False)
    return m


def _apply_1q(psi: np.ndarray, n: int, q: int, m: np.ndarray) -> None:
    v = psi.reshape(1 << q, 2, -1)
    v[:] = np.matmul(m, v)


def _apply_cx(psi: np.ndarray, n: int, c: int, t: int) -> None:
    v = psi.reshape((2,) * n + psi.shape[1:])
    i0 = [slice(None)] * v.ndim
    i1 = [slice(None)] * v.ndim
    i0[c] = i1[c] = 1
    i0[t], i1[t] = 0, 1
    i0, i1 = tuple(i0), tuple(i1)
    tmp = v[i0].copy()
    v[i0] = v[i1]
    v[i1] = tmp


def circuit_unitary(c, theta: Sequence[float] | None = None) -> np.ndarray:
    """Dense unitary of a circuit (columns are images of basis states)."""
    n = c.n_qubits
    if n > 12:
        raise ValueError("dense unitaries limited to 12 qubits")
    ops = _program(c, theta)
    return _run_numpy(np.eye(1 << n, dtype=complex), n, ops, fuse=False)


# extended precision ---------------------------------------------------------


class _MpConstants:
    def __init__(self, p: int) -> None:
        with mpmath.workdps(p + 5):
            self.r = 1 / mpmath.sqrt(2)
            self.w = mpmath.mpc(self.r, self.r)
            self.i = mpmath.mpc(0, 1)

    def rotation(self, name: str, t: float):
        c, s = mpmath.cos(mpmath.mpf(t) / 2), mpmath.sin(mpmath.mpf(t) / 2)
        if name == "RZ":
            return ((mpmath.mpc(c, -s), 0), (0, mpmath.mpc(c, s)))
        if name == "RX":
            return ((c, mpmath.mpc(0, -s)), (mpmath.mpc(0, -s), c))
        return ((c, -s), (s, c))


def _run_mp(amps, n: int, ops, p: int):
    psi = list(amps)
    k = _MpConstants(p)
    with mpmath.workdps(p):
        expanded = []
        for op in ops:
            if op[0] == "word":
                expanded.extend(("1q", op[1], g, None) for g in op[2])
            else:
                expanded.append(op)
        for op in expanded:
            if op[0] == "1q":
                _, q, name, angle = op
                bit = 1 << (n - 1 - q)
                if angle is not None:
                    with mpmath.workdps(p + 5):
                        (m00, m01), (m10, m11) = k.rotation(name, angle)
                for i0 in range(len(psi)):
                    if i0 & bit:
                        continue
                    i1 = i0 | bit
                    a, b = psi[i0], psi[i1]
                    if name == "H":
                        psi[i0], psi[i1] = k.r * (a + b), k.r * (a - b)
                    elif name == "S":
                        psi[i1] = k.i * b
                    elif name == "T":
                        psi[i1] = k.w * b
                    elif name == "X":
                        psi[i0], psi[i1] = b, a
                    else:
                        psi[i0], psi[i1] = m00 * a + m01 * b, m10 * a + m11 * b
            elif op[0] == "cx":
                cb, tb = 1 << (n - 1 - op[1]), 1 << (n - 1 - op[2])
                for i in range(len(psi)):
                    if i & cb and not i & tb:
                        j = i | tb
                        psi[i], psi[j] = psi[j], psi[i]
            else:
                with mpmath.workdps(p + 5):
                    ph = mpmath.expjpi(mpmath.mpf(op[1]) / 4)
                psi = [ph * a for a in psi]
    return psi


# expectations -----------------------------------------------------------------


def expectation(s: StateVector, h: PauliSum) -> float:
    """Sum_i c_i <s|P_i|s>, asserting the imaginary residue is negligible."""
    if h.n_qubits != s.n_qubits:
        raise ValueError("Hamiltonian and state sizes differ")
    if s.precision is None:
        psi = s.amps
        total = complex(np.vdot(psi, h.apply(psi)))
        unit = np.finfo(float).eps / 2
    else:
        total = _expectation_mp(s, h)
        unit = 10.0 ** (1 - s.precision) / 2
    threshold = 1e6 * unit * len(h) * max(1.0, abs(total.real))
    if abs(total.imag) > threshold:
        raise ArithmeticError(f"expectation has imaginary part {total.imag:.3e}")
    return float(total.real) if s.precision is None else total.real


def _expectation_mp(s: StateVector, h: PauliSum):
    psi = s.amps
    with mpmath.workdps(s.precision):
        acc = mpmath.mpc(0)
        for c, xm, zm, ny in h.masks():
            phase = mpmath.mpc(1j) ** ny
            term = mpmath.mpc(0)
            for i, a in enumerate(psi):
                sgn = -1 if bin(i & zm).count("1") & 1 else 1
                term += mpmath.conj(psi[i ^ xm]) * a * sgn
            acc += c * phase * term
        return acc
