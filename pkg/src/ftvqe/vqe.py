"""Variational energy minimization with parameterized or Clifford+T circuits.

In FT mode every rotation is replaced by its synthesized word at the current
digit accuracy d.  Parameter-shift gradients append the exact words for
R(+-pi/2) to the shifted gate, so they add no T gates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circuit import CliffordTCircuit, ParamCircuit, t_count
from .models import ModelSpec, build_ansatz, build_hamiltonian, exact_ground_energy, initial_circuit
from .statevector import DOUBLE, Engine, PauliSum, StateVector, apply_circuit, expectation
from .synthesis import SynthesisCache, SynthesisRequest, axis_word, half_pi_word

MODES = ("RZ", "FT")
GRADIENTS = ("FINITE_DIFF", "PARAM_SHIFT")


@dataclass
class VQEConfig:
    mode: str = "RZ"
    gradient: str = "PARAM_SHIFT"
    digits: int | None = None  # fixed d; None with adaptive=True
    adaptive: bool = False
    d_start: int = 3
    d_max: int = 8
    fd_step: float = 0.1
    stop_tol: float = 1e-14
    max_iterations: int = 500
    seed: int = 0
    precision: int | None = None

    def __post_init__(self) -> None:
        self.mode = self.mode.upper()
        self.gradient = self.gradient.upper()
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.gradient not in GRADIENTS:
            raise ValueError(f"gradient must be one of {GRADIENTS}")
        if self.mode == "FT" and not self.adaptive and self.digits is None:
            raise ValueError("FT mode needs a fixed digits value or adaptive=True")
        if self.adaptive and not 1 <= self.d_start <= self.d_max:
            raise ValueError("need 1 <= d_start <= d_max")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")

    @property
    def initial_digits(self) -> int | None:
        if self.mode == "RZ":
            return None
        return self.d_start if self.adaptive else self.digits


@dataclass
class TraceRecord:
    step: int
    energy: float
    energy_error: float
    d: int | None
    t_count_step: int
    t_count_cumulative: int
    grad_norm: float
    d_incremented: bool = False
    note: str = ""


@dataclass
class VQETrace:
    records: list[TraceRecord] = field(default_factory=list)
    params: np.ndarray | None = None
    status: str = "running"
    exact_energy: float | None = None

    def append(self, rec: TraceRecord) -> None:
        if self.records and rec.step <= self.records[-1].step:
            raise ValueError("trace steps must increase")
        self.records.append(rec)

    @property
    def final_energy(self) -> float:
        return self.records[-1].energy

    CSV_FIELDS = ("step", "energy", "energy_error", "d", "t_count_step", "t_count_cumulative", "grad_norm", "d_incremented")

    def csv_rows(self) -> list[list]:
        rows = []
        for r in self.records:
            rows.append(
                [r.step, f"{r.energy:.15e}", f"{r.energy_error:.6e}", "" if r.d is None else r.d,
                 r.t_count_step, r.t_count_cumulative, f"{r.grad_norm:.6e}", int(r.d_incremented)]
            )
        return rows

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.CSV_FIELDS)
        w.writerows(self.csv_rows())


# ---------------------------------------------------------------------------
# energy evaluation


class Problem:
    """Ansatz, Hamiltonian and initial state bundled with a synthesis cache.

    Counts circuit evaluations and the T gates they consume.
    """

    def __init__(
        self,
        ansatz: ParamCircuit,
        hamiltonian: PauliSum,
        prep: ParamCircuit | None = None,
        engine: Engine = DOUBLE,
        cache: SynthesisCache | None = None,
        seed: int = 0,
    ) -> None:
        self.ansatz = ansatz
        self.lowered = ansatz.lowered()
        self.h = hamiltonian
        self.engine = engine
        self.cache = cache if cache is not None else SynthesisCache()
        self.seed = seed
        s0 = engine.zero_state(ansatz.n_qubits)
        self.state0 = apply_circuit(s0, prep) if prep is not None else s0
        self._words: dict[tuple[float, int], str] = {}
        self.evaluations = 0
        self.t_consumed = 0
        # rotation ordinal -> (param_id, scale, axis)
        self.rotations = [
            (g.param_id, g.scale, g.kind[1]) for g in self.lowered.gates if g.is_rotation
        ]

    @classmethod
    def from_spec(cls, spec: ModelSpec, engine: Engine = DOUBLE, cache: SynthesisCache | None = None, seed: int = 0) -> Problem:
        return cls(build_ansatz(spec), build_hamiltonian(spec), initial_circuit(spec), engine, cache, seed)

    @property
    def n_params(self) -> int:
        return self.ansatz.n_params

    def ft_circuit(self, theta: Sequence[float], d: int, shifts: dict[int, int] | None = None) -> CliffordTCircuit:
        """Clifford+T circuit; ``shifts`` maps a rotation ordinal to +-1 (a +-pi/2 shift)."""
        shifts = shifts or {}
        out = CliffordTCircuit(self.ansatz.n_qubits)
        r = 0
        for g in self.lowered.gates:
            if g.is_rotation:
                word = axis_word(g.kind[1], self._z_word(g.angle(theta), d))
                if r in shifts:
                    word += axis_word(g.kind[1], half_pi_word(shifts[r]))
                out.rotation_words.append((len(out.gates), word))
                out.append_word(word, g.qubits[0])
                r += 1
            elif g.kind == "PHASE_W":
                out.phase_w = (out.phase_w + 1) % 8
            else:
                out.gates.append((g.kind, g.qubits))
        return out

    def _z_word(self, angle: float, d: int) -> str:
        key = (angle, d)
        word = self._words.get(key)
        if word is None:
            word = self.cache.synthesize(SynthesisRequest(angle, d, self.seed)).word
            self._words[key] = word
        return word

    def _rz_circuit(self, theta, shifts: dict[int, int] | None) -> ParamCircuit:
        if not shifts:
            return self.lowered
        gates, r = [], 0
        for g in self.lowered.gates:
            if g.is_rotation:
                if r in shifts:
                    g = type(g)(g.kind, g.qubits, None, g.angle(theta) + shifts[r] * math.pi / 2)
                r += 1
            gates.append(g)
        return ParamCircuit(self.lowered.n_qubits, gates, self.lowered.n_params)

    def energy(self, theta: Sequence[float], d: int | None, shifts: dict[int, int] | None = None):
        """Energy in RZ mode (d is None) or FT mode at digit accuracy d."""
        self.evaluations += 1
        if d is None:
            s = apply_circuit(self.state0, self._rz_circuit(theta, shifts), theta)
        else:
            c = self.ft_circuit(theta, d, shifts)
            self.t_consumed += t_count(c)
            s = apply_circuit(self.state0, c)
        return expectation(s, self.h)

    def t_count(self, theta: Sequence[float], d: int | None) -> int:
        return 0 if d is None else t_count(self.ft_circuit(theta, d))

    def grad_parameter_shift(self, theta: Sequence[float], d: int | None) -> np.ndarray:
        """Product-rule parameter shift: sum over gates sharing a parameter."""
        grad = np.zeros(self.n_params)
        for r, (pid, scale, _) in enumerate(self.rotations):
            if pid is None:
                continue
            plus = self.energy(theta, d, {r: 1})
            minus = self.energy(theta, d, {r: -1})
            grad[pid] += scale * float(plus - minus) / 2
        return grad

    def grad_finite_difference(self, theta: Sequence[float], d: int | None, step: float) -> np.ndarray:
        """Central differences; in FT mode both shifted points are freshly synthesized."""
        theta = np.asarray(theta, dtype=float)
        grad = np.zeros(self.n_params)
        for mu in range(self.n_params):
            e = np.zeros(self.n_params)
            e[mu] = step / 2
            grad[mu] = float(self.energy(theta + e, d) - self.energy(theta - e, d)) / step
        return grad

    def gradient(self, theta, d, cfg: VQEConfig) -> np.ndarray:
        if cfg.gradient == "PARAM_SHIFT":
            return self.grad_parameter_shift(theta, d)
        return self.grad_finite_difference(theta, d, cfg.fd_step)


def energy(c: ParamCircuit, theta, h: PauliSum, cfg: VQEConfig, prep: ParamCircuit | None = None, d: int | None = None) -> float:
    """One-shot energy of ``c`` at ``theta`` (convenience wrapper around Problem)."""
    p = Problem(c, h, prep, Engine(cfg.precision), seed=cfg.seed)
    return p.energy(theta, d if d is not None else cfg.initial_digits)


# ---------------------------------------------------------------------------
# BFGS


@dataclass
class _LineResult:
    ok: bool
    alpha: float
    theta: np.ndarray
    energy: float


def _line_search(f: Callable, theta, e0: float, g0, p, alpha0: float = 1.0, c1: float = 1e-4, max_halvings: int = 30) -> _LineResult:
    """Backtracking line search with the Armijo sufficient-decrease test."""
    slope = float(g0 @ p)
    if slope >= 0:
        return _LineResult(False, 0.0, theta, e0)
    alpha = alpha0
    for _ in range(max_halvings):
        cand = theta + alpha * p
        e = float(f(cand))
        if e <= e0 + c1 * alpha * slope:
            return _LineResult(True, alpha, cand, e)
        alpha /= 2
    return _LineResult(False, 0.0, theta, e0)


def minimize(
    spec: ModelSpec | Problem,
    cfg: VQEConfig,
    exact_energy: float | None = None,
    theta0: Sequence[float] | None = None,
    callback: Callable[[TraceRecord], None] | None = None,
) -> VQETrace:
    """BFGS (inverse-Hessian form) with optional adaptive digit accuracy.

    A stop event is either |E_new - E_old| < stop_tol or a line search that
    cannot decrease the energy even along the steepest-descent direction.  In
    adaptive FT mode a stop event below d_max raises d by one; otherwise the
    run ends.
    """
    prob = spec if isinstance(spec, Problem) else Problem.from_spec(spec, Engine(cfg.precision), seed=cfg.seed)
    if exact_energy is None and isinstance(spec, ModelSpec):
        exact_energy = exact_ground_energy(spec)
    rng = np.random.default_rng(cfg.seed)
    theta = np.asarray(theta0, dtype=float) if theta0 is not None else rng.uniform(0, 2 * math.pi, prob.n_params)
    d = cfg.initial_digits
    trace = VQETrace(exact_energy=exact_energy)
    n = prob.n_params
    hinv = np.eye(n)

    def f(x):
        return float(prob.energy(x, d))

    def err(e):
        return abs(e - exact_energy) if exact_energy is not None else float("nan")

    t_before = prob.t_consumed
    e = f(theta)
    g = prob.gradient(theta, d, cfg)
    step = 0
    rec = TraceRecord(0, e, err(e), d, prob.t_consumed - t_before, prob.t_consumed, float(np.linalg.norm(g)))
    trace.append(rec)
    if callback:
        callback(rec)

    while step < cfg.max_iterations:
        step += 1
        t_before = prob.t_consumed
        note = ""
        p = -hinv @ g
        ls = _line_search(f, theta, e, g, p)
        if not ls.ok:
            # fall back to steepest descent with halving
            hinv = np.eye(n)
            ls = _line_search(f, theta, e, g, -g)
            note = "steepest-descent"
        stop_event = False
        if ls.ok:
            g_new = prob.gradient(ls.theta, d, cfg)
            s, y = ls.theta - theta, g_new - g
            sy = float(s @ y)
            if sy > 1e-16 * float(np.linalg.norm(s) * np.linalg.norm(y)) and sy > 0:
                rho = 1.0 / sy
                eye = np.eye(n)
                hinv = (eye - rho * np.outer(s, y)) @ hinv @ (eye - rho * np.outer(y, s)) + rho * np.outer(s, s)
            stop_event = abs(ls.energy - e) < cfg.stop_tol
            theta, e, g = ls.theta, ls.energy, g_new
        else:
            stop_event = True
            note = "line-search-failed"
        incremented = False
        if stop_event:
            if cfg.mode == "FT" and cfg.adaptive and d < cfg.d_max:
                d += 1
                incremented = True
                e = f(theta)
                g = prob.gradient(theta, d, cfg)
            else:
                trace.status = "converged" if ls.ok else "stalled"
        rec = TraceRecord(step, e, err(e), d, prob.t_consumed - t_before, prob.t_consumed, float(np.linalg.norm(g)), incremented, note)
        trace.append(rec)
        if callback:
            callback(rec)
        if trace.status != "running":
            break
    else:
        trace.status = "max-iterations"
    trace.params = theta
    return trace
