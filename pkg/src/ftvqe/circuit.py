"""Parameterized circuits, lowering to Clifford+T, and T-count/T-depth metrics.

Rotation conventions (all exact, checked against dense exponentials in tests):

* RZ(t) = exp(-i t Z/2), RX(t) = exp(-i t X/2), RY(t) = exp(-i t Y/2)
* ZZ(t) = exp(+i t/2 Z⊗Z), and likewise XX, YY

A gate's effective angle is ``scale * theta[param_id]`` or ``fixed_angle``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .synthesis import SynthesisCache, SynthesisRequest, axis_word, synthesize

ROTATIONS_1Q = ("RZ", "RX", "RY")
ROTATIONS_2Q = ("ZZ", "XX", "YY")
ROTATIONS = ROTATIONS_1Q + ROTATIONS_2Q
CLIFFORDS = ("H", "S", "X", "CNOT", "PHASE_W")
KINDS = ROTATIONS + CLIFFORDS
_ARITY = {**{k: 1 for k in ROTATIONS_1Q}, **{k: 2 for k in ROTATIONS_2Q}, "H": 1, "S": 1, "X": 1, "CNOT": 2, "PHASE_W": 0}


@dataclass(frozen=True)
class ParamGate:
    kind: str
    qubits: tuple[int, ...]
    param_id: int | None = None
    fixed_angle: float | None = None
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if len(self.qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("repeated qubit index")
        if self.kind in ROTATIONS:
            if (self.param_id is None) == (self.fixed_angle is None):
                raise ValueError("rotation needs exactly one of param_id / fixed_angle")
        elif self.param_id is not None or self.fixed_angle is not None:
            raise ValueError(f"{self.kind} takes no angle")

    @property
    def is_rotation(self) -> bool:
        return self.kind in ROTATIONS

    def angle(self, theta: Sequence[float]) -> float:
        if self.fixed_angle is not None:
            return self.fixed_angle
        return self.scale * theta[self.param_id]

    def to_text(self) -> str:
        parts = [self.kind, *map(str, self.qubits)]
        if self.param_id is not None:
            parts.append(f"@{self.param_id}" + (f"*{self.scale!r}" if self.scale != 1.0 else ""))
        elif self.fixed_angle is not None:
            parts.append(f"={self.fixed_angle!r}")
        return " ".join(parts)

    @classmethod
    def from_text(cls, line: str) -> ParamGate:
        kind, *rest = line.split()
        qubits, pid, fixed, scale = [], None, None, 1.0
        for tok in rest:
            if tok.startswith("@"):
                ref, _, sc = tok[1:].partition("*")
                pid = int(ref)
                scale = float(sc) if sc else 1.0
            elif tok.startswith("="):
                fixed = float(tok[1:])
            else:
                qubits.append(int(tok))
        return cls(kind, tuple(qubits), pid, fixed, scale)


@dataclass
class ParamCircuit:
    n_qubits: int
    gates: list[ParamGate] = field(default_factory=list)
    n_params: int = 0

    def validate(self) -> None:
        used = set()
        for g in self.gates:
            if any(q < 0 or q >= self.n_qubits for q in g.qubits):
                raise ValueError(f"qubit index out of range in {g.to_text()}")
            if g.param_id is not None:
                if not 0 <= g.param_id < self.n_params:
                    raise ValueError(f"param_id out of range in {g.to_text()}")
                used.add(g.param_id)
        if used != set(range(self.n_params)):
            raise ValueError("every parameter must be used by at least one gate")

    def add(self, kind: str, *qubits: int, param: int | None = None, angle: float | None = None, scale: float = 1.0) -> ParamCircuit:
        self.gates.append(ParamGate(kind, qubits, param, angle, scale))
        return self

    @property
    def rotation_count(self) -> int:
        return sum(g.is_rotation for g in self.gates)

    def lowered(self) -> ParamCircuit:
        """Same circuit with every two-qubit rotation lowered to CNOTs and RZ."""
        out: list[ParamGate] = []
        for g in self.gates:
            out.extend(lower_two_qubit(g) if g.kind in ROTATIONS_2Q else [g])
        return ParamCircuit(self.n_qubits, out, self.n_params)

    def to_text(self) -> str:
        head = f"qubits={self.n_qubits} params={self.n_params}"
        return "\n".join([head, *(g.to_text() for g in self.gates)]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> ParamCircuit:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        head = dict(tok.split("=") for tok in lines[0].split())
        c = cls(int(head["qubits"]), [ParamGate.from_text(ln) for ln in lines[1:]], int(head["params"]))
        c.validate()
        return c


def lower_two_qubit(g: ParamGate) -> list[ParamGate]:
    """Lower ZZ/XX/YY into CNOT, RZ and Clifford basis changes."""
    if g.kind not in ROTATIONS_2Q:
        raise ValueError(f"cannot lower {g.kind}: not a two-qubit rotation")
    a, b = g.qubits
    # CNOT (1 ⊗ RZ(x)) CNOT = exp(-i x/2 Z⊗Z), so x = -t gives exp(+i t/2 Z⊗Z)
    core = [
        ParamGate("CNOT", (a, b)),
        ParamGate("RZ", (b,), g.param_id, None if g.fixed_angle is None else -g.fixed_angle, -g.scale if g.param_id is not None else 1.0),
        ParamGate("CNOT", (a, b)),
    ]
    if g.kind == "ZZ":
        return core
    if g.kind == "XX":
        hh = [ParamGate("H", (a,)), ParamGate("H", (b,))]
        return hh + core + hh
    # Y = S H Z H S^dagger; S^dagger = SSS exactly
    pre = [ParamGate("S", (q,)) for q in (a, b) for _ in range(3)] + [ParamGate("H", (a,)), ParamGate("H", (b,))]
    post = [ParamGate("H", (a,)), ParamGate("H", (b,)), ParamGate("S", (a,)), ParamGate("S", (b,))]
    return pre + core + post


@dataclass
class CliffordTCircuit:
    """Gates over {H, S, T, X, CNOT} plus a global phase omega^phase_w.

    ``rotation_words`` keeps, per synthesized rotation, (gate index, axis word)
    for metrics and diagnostics.
    """

    n_qubits: int
    gates: list[tuple[str, tuple[int, ...]]] = field(default_factory=list)
    phase_w: int = 0
    rotation_words: list[tuple[int, str]] = field(default_factory=list)

    def append_word(self, word: str, q: int) -> None:
        for s in word:
            if s == "W":
                self.phase_w = (self.phase_w + 1) % 8
            else:
                self.gates.append((s, (q,)))

    @property
    def t_count(self) -> int:
        return t_count(self)

    @property
    def t_depth(self) -> int:
        return t_depth(self)

    def to_text(self) -> str:
        lines = [f"qubits={self.n_qubits}", f"phase_w={self.phase_w}"]
        lines += [" ".join([k, *map(str, qs)]) for k, qs in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> CliffordTCircuit:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        n = int(lines[0].split("=")[1])
        w = int(lines[1].split("=")[1])
        gates = []
        for ln in lines[2:]:
            k, *qs = ln.split()
            gates.append((k, tuple(map(int, qs))))
        return cls(n, gates, w)


def t_count(c: CliffordTCircuit) -> int:
    return sum(1 for k, _ in c.gates if k == "T")


def t_depth(c: CliffordTCircuit) -> int:
    """ASAP makespan where T costs 1, Cliffords 0, and CNOT syncs both qubits."""
    clock = [0] * c.n_qubits
    for kind, qs in c.gates:
        if kind == "T":
            clock[qs[0]] += 1
        elif kind == "CNOT":
            t = max(clock[qs[0]], clock[qs[1]])
            clock[qs[0]] = clock[qs[1]] = t
    return max(clock, default=0)


def _synth_job(args):
    theta, d, seed = args
    return synthesize(SynthesisRequest(theta, d, seed))


def synthesize_angles(
    angles: Iterable[float], digits: int, cache: SynthesisCache | None = None, workers: int = 1, seed: int = 0
) -> SynthesisCache:
    """Make sure every angle has a cached word at ``digits``; returns the cache."""
    cache = cache if cache is not None else SynthesisCache()
    todo = []
    seen = set()
    for a in angles:
        if cache.get(a, digits) is None and a not in seen:
            seen.add(a)
            todo.append(a)
    if workers > 1 and len(todo) > 4:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_synth_job, [(a, digits, seed) for a in todo]):
                cache.put(res)
    else:
        for a in todo:
            cache.synthesize(SynthesisRequest(a, digits, seed))
    return cache


def transpile(
    c: ParamCircuit,
    theta: Sequence[float],
    digits: int,
    cache: SynthesisCache | None = None,
    workers: int = 1,
    seed: int = 0,
) -> CliffordTCircuit:
    """Replace every rotation with its Clifford+T word at accuracy 10^-digits."""
    if len(theta) != c.n_params:
        raise ValueError(f"expected {c.n_params} parameters, got {len(theta)}")
    low = c.lowered()
    angles = [g.angle(theta) for g in low.gates if g.is_rotation]
    cache = synthesize_angles(angles, digits, cache, workers, seed)
    out = CliffordTCircuit(c.n_qubits)
    for g in low.gates:
        if g.is_rotation:
            res = cache.synthesize(SynthesisRequest(g.angle(theta), digits, seed))
            word = axis_word(g.kind[1], res.word)
            out.rotation_words.append((len(out.gates), word))
            out.append_word(word, g.qubits[0])
        elif g.kind == "PHASE_W":
            out.phase_w = (out.phase_w + 1) % 8
        else:
            out.gates.append((g.kind, g.qubits))
    return out


def with_fixed_angles(c: ParamCircuit, theta: Sequence[float]) -> ParamCircuit:
    """Bind parameters: every rotation gets its numeric angle as fixed_angle."""
    gates = [replace(g, param_id=None, fixed_angle=g.angle(theta), scale=1.0) if g.param_id is not None else g for g in c.gates]
    return ParamCircuit(c.n_qubits, gates, 0)
