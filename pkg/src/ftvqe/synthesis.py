"""Approximate synthesis of z-rotations over Clifford+T.

``synthesize`` finds a word U with ||R_z(theta) - U|| <= 10^-d where
R_z(theta) = diag(exp(-i theta/2), exp(i theta/2)).  For increasing
denominator exponent k it walks the candidates u for the top-left entry,
solves t^dagger t = 2^k - u^dagger u, and converts
U = [[u, -t^dagger], [t, u^dagger]] / sqrt2^k into a word exactly.
"""

from __future__ import annotations

import math
import os
import random
import threading
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np

from .diophantine import solve_norm_equation
from .exact import exact_synthesize, t_count, word_to_matrix
from .grid import CapLattice
from .rings import UnitaryDOmega, ZRootTwo

FOUR_PI = 4 * math.pi
HALF_PI = math.pi / 2
MULTIPLE_TOL = 1e-12

# the norm-equation solver gets a small factoring budget per candidate: hard
# instances are skipped, since an easier candidate is usually close by
NORM_ATTEMPTS = 4
NORM_STEPS = 4096
# cap points tried per denominator exponent; a level this full always holds
# solvable candidates, so the limit only bites for near-axis targets
CANDIDATE_LIMIT = 2_000


@dataclass(frozen=True)
class SynthesisRequest:
    theta: float
    digits: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.digits < 1:
            raise ValueError("digits must be a positive integer")

    @property
    def reduced_theta(self) -> float:
        return math.fmod(self.theta, FOUR_PI) % FOUR_PI


@dataclass(frozen=True)
class SynthesisResult:
    theta: float
    digits: int
    word: str
    achieved_error: mpmath.mpf
    t_count: int
    candidate_trials: int = 0
    k_final: int = 0
    seed: int = 0


def rz_error(word: str, theta, digits: int):
    """||R_z(theta) - M(word)|| evaluated at d + 15 decimal digits."""
    with mpmath.workdps(digits + 15):
        return _rz_error_matrix(word_to_matrix(word), mpmath.mpf(theta))


def _rz_error_matrix(u: UnitaryDOmega, theta):
    # M - R_z = [[a, -conj(b)], [b, conj(a)]] * (scalar) when M is in SU(2);
    # use the full 2x2 norm so global phases are not assumed away
    m = u.to_mpmath()
    z0 = mpmath.expj(-theta / 2)
    diff = m - mpmath.matrix([[z0, 0], [0, mpmath.conj(z0)]])
    return _opnorm2(diff)


def _opnorm2(m):
    """Largest singular value of a 2x2 mpmath matrix."""
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    fro = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2
    det = abs(a * d - b * c)
    disc = fro * fro - 4 * det * det
    disc = disc if disc > 0 else mpmath.mpf(0)
    return mpmath.sqrt((fro + mpmath.sqrt(disc)) / 2)


def _multiple_of_half_pi(theta: float) -> int | None:
    j = round(theta / HALF_PI)
    if abs(theta - j * HALF_PI) < MULTIPLE_TOL:
        return j
    return None


def half_pi_word(j: int) -> str:
    """Exact word for R_z(j*pi/2) = (omega^7 S)^j."""
    return "S" * (j % 4) + "W" * ((7 * j) % 8)


def k_cap(digits: int) -> int:
    return int(4 * math.log2(10**digits)) + 64


def synthesize(req: SynthesisRequest) -> SynthesisResult:
    """Clifford+T word within 10^-digits of R_z(theta) in operator norm."""
    theta = req.reduced_theta
    d = req.digits
    j = _multiple_of_half_pi(theta)
    if j is None and abs(theta - FOUR_PI) < MULTIPLE_TOL:
        j = 0
    if j is not None:
        word = half_pi_word(j)
        err = rz_error(word, theta, d)
        # near-multiples only qualify while the exact word still meets the bound
        if err <= mpmath.mpf(10) ** (-d):
            return SynthesisResult(req.theta, d, word, err, 0, 0, 0, req.seed)

    rng = random.Random(req.seed)
    # search a slightly smaller cap so rounding never pushes a result over the bound
    eps = mpmath.mpf(10) ** (-d) * (1 - mpmath.mpf(10) ** -6)
    lattice = CapLattice(theta, eps)
    k = _start_k(lattice)
    trials = 0
    first = True
    while k <= k_cap(d):
        cands = lattice.candidates(k, skip_divisible=not first, limit=CANDIDATE_LIMIT)
        first = False
        for z in cands:
            trials += 1
            xi = ZRootTwo(1 << k, 0) - z.abs2()
            t = solve_norm_equation(xi, rng, NORM_ATTEMPTS, NORM_STEPS)
            if t is None:
                continue
            u = UnitaryDOmega(z, -t.adj(), t, z.adj(), k)
            word = exact_synthesize(u)
            err = rz_error(word, theta, d)
            if err > mpmath.mpf(10) ** (-d):
                raise ArithmeticError("synthesized word violates the error bound")
            return SynthesisResult(req.theta, d, word, err, t_count(word), trials, k, req.seed)
        k += 1
    raise RuntimeError("synthesis budget exceeded")


def _start_k(lattice: CapLattice) -> int:
    k = 0
    while lattice.expected_count(k + 1) < 0.05:
        k += 1
    return k


def axis_word(axis: str, z_word: str) -> str:
    """Conjugate a z-rotation word into an x- or y-rotation word."""
    axis = axis.upper()
    if axis == "Z":
        return z_word
    if axis == "X":
        return "H" + z_word + "H"
    if axis == "Y":
        # R_y = S H R_z H S^dagger, applied right to left; S^dagger = SSS exactly
        return "SSSH" + z_word + "HS"
    raise ValueError(f"unknown rotation axis {axis!r}")


def synthesize_axis(axis: str, req: SynthesisRequest, cache: SynthesisCache | None = None) -> str:
    res = cache.synthesize(req) if cache is not None else synthesize(req)
    return axis_word(axis, res.word)


# ---------------------------------------------------------------------------
# cache


def cache_key(theta: float, digits: int) -> tuple[str, int]:
    return f"{math.fmod(theta, FOUR_PI) % FOUR_PI:.12f}", digits


@dataclass
class SynthesisCache:
    """Synthesis results keyed by (theta to 12 decimals, d), optionally on disk.

    Lookups re-check the error bound against the caller's exact theta, so a
    hit is only used when it is still sound for that angle.
    """

    path: Path | None = None
    _table: dict = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)
    hits: int = 0
    misses: int = 0

    def __post_init__(self) -> None:
        if self.path is not None:
            self.path = Path(self.path)
            if self.path.exists():
                self._load()

    def _load(self) -> None:
        for line in self.path.read_text().splitlines():
            parts = line.split()
            if len(parts) != 5:
                continue
            th, d, word, err, tc = parts
            word = "" if word == "-" else word
            self._table.setdefault((th, int(d)), (word, mpmath.mpf(err), int(tc)))

    def __len__(self) -> int:
        return len(self._table)

    def get(self, theta: float, digits: int) -> SynthesisResult | None:
        key = cache_key(theta, digits)
        with self._lock:
            rec = self._table.get(key)
        if rec is None:
            return None
        word, err, tc = rec
        # the key rounds theta; allow for the rounding in the bound
        slack = abs(float(key[0]) - math.fmod(theta, FOUR_PI) % FOUR_PI) / 2
        if err + slack > 10.0 ** (-digits):
            return None
        return SynthesisResult(theta, digits, word, err, tc)

    def put(self, res: SynthesisResult) -> bool:
        """Insert if absent; returns True when this call stored the record."""
        key = cache_key(res.theta, res.digits)
        with self._lock:
            if key in self._table:
                return False
            self._table[key] = (res.word, res.achieved_error, res.t_count)
            if self.path is not None:
                with open(self.path, "a") as fh:
                    fh.write(
                        f"{key[0]} {key[1]} {res.word or '-'} "
                        f"{mpmath.nstr(res.achieved_error, 6)} {res.t_count}\n"
                    )
                    fh.flush()
                    os.fsync(fh.fileno())
            return True

    def synthesize(self, req: SynthesisRequest) -> SynthesisResult:
        hit = self.get(req.theta, req.digits)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        res = synthesize(req)
        self.put(res)
        return res


# ---------------------------------------------------------------------------
# Euler angles


@dataclass(frozen=True)
class EulerZXZ:
    theta1: float
    phi: float
    theta2: float

    def matrix(self) -> np.ndarray:
        s, dl = (self.theta1 + self.theta2) / 2, (self.theta1 - self.theta2) / 2
        c, sn = math.cos(self.phi / 2), math.sin(self.phi / 2)
        return np.array(
            [
                [np.exp(-1j * s) * c, -1j * np.exp(1j * dl) * sn],
                [-1j * np.exp(-1j * dl) * sn, np.exp(1j * s) * c],
            ]
        )


def euler_zxz(u) -> EulerZXZ:
    """ZXZ angles of a 2x2 unitary, after dividing out a global phase.

    Accepts numpy or mpmath matrices; mpmath input keeps its precision.
    In the gimbal case (phi = 0 or pi) all z-rotation goes to theta1.
    """
    if isinstance(u, mpmath.matrix):
        a, b, c, d = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
        lib = mpmath
    else:
        u = np.asarray(u, dtype=complex)
        a, b, c, d = (complex(x) for x in u.ravel())
        lib = None
    if lib is mpmath:
        ph = mpmath.sqrt(a * d - b * c)
        a, c = a / ph, c / ph
        phi = 2 * mpmath.atan2(abs(c), abs(a))
        tiny = mpmath.mpf(10) ** (-mpmath.mp.dps + 3)
        sigma = -mpmath.arg(a) if abs(a) > tiny else mpmath.mpf(0)
        delta = -mpmath.arg(1j * c) if abs(c) > tiny else mpmath.mpf(0)
    else:
        ph = np.sqrt(a * d - b * c)
        a, c = a / ph, c / ph
        phi = 2 * math.atan2(abs(c), abs(a))
        sigma = -np.angle(a) if abs(a) > 1e-13 else 0.0
        delta = -np.angle(1j * c) if abs(c) > 1e-13 else 0.0
    if abs(c) <= (1e-13 if lib is None else mpmath.mpf(10) ** (-mpmath.mp.dps + 3)):
        return EulerZXZ(float(2 * sigma), float(phi), 0.0)
    if abs(a) <= (1e-13 if lib is None else mpmath.mpf(10) ** (-mpmath.mp.dps + 3)):
        return EulerZXZ(float(2 * delta), float(phi), 0.0)
    return EulerZXZ(float(sigma + delta), float(phi), float(sigma - delta))


def angle_diff(x: float, y: float, period: float = 2 * math.pi) -> float:
    """|x - y| reduced to the nearest representative modulo ``period``."""
    r = math.fmod(x - y, period)
    if r > period / 2:
        r -= period
    elif r < -period / 2:
        r += period
    return abs(r)


def euler_errors(theta: float, digits: int, seed: int = 0, cache: SynthesisCache | None = None):
    """(|theta1 + theta2 - theta| mod 2pi, |phi|) for the synthesized word."""
    req = SynthesisRequest(theta, digits, seed)
    res = cache.synthesize(req) if cache is not None else synthesize(req)
    with mpmath.workdps(digits + 15):
        e = euler_zxz(word_to_matrix(res.word).to_mpmath())
    return angle_diff(e.theta1 + e.theta2, theta), abs(e.phi)
