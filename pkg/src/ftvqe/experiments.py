"""Experiment pipelines behind the CLI subcommands and the acceptance suite."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .circuit import synthesize_angles, t_depth, transpile
from .models import ModelSpec, build_ansatz
from .statevector import set_precision
from .synthesis import SynthesisCache, SynthesisRequest, euler_errors, synthesize
from .vqe import Problem, VQEConfig, minimize


def theta_grid(points: int, upper: float = math.pi) -> list[float]:
    """``points`` uniform angles on [0, upper], both ends included."""
    if points < 2:
        return [0.0]
    return [upper * i / (points - 1) for i in range(points)]


def sweep_synth(digits: Iterable[int], points: int, seed: int = 0, cache: SynthesisCache | None = None):
    """Rows (theta, d, t_count, error); raises if any word misses its bound."""
    rows = []
    for d in digits:
        for th in theta_grid(points):
            req = SynthesisRequest(th, d, seed)
            res = cache.synthesize(req) if cache is not None else synthesize(req)
            if res.achieved_error > mpmath.mpf(10) ** (-d):
                raise ArithmeticError(f"bound violated at theta={th}, d={d}")
            rows.append((th, d, res.t_count, res.achieved_error))
    return rows


def mean_t_counts(rows) -> dict[int, float]:
    by_d: dict[int, list[int]] = {}
    for _, d, tc, _ in rows:
        by_d.setdefault(d, []).append(tc)
    return {d: statistics.mean(v) for d, v in by_d.items()}


def optimized_params(spec: ModelSpec, seed: int = 0, max_iterations: int = 500) -> np.ndarray:
    """Converged parameters from an RZ-mode (parameterized-circuit) run."""
    trace = minimize(spec, VQEConfig(mode="RZ", seed=seed, max_iterations=max_iterations))
    return trace.params


def random_params(spec: ModelSpec, seed: int = 0) -> np.ndarray:
    n = build_ansatz(spec).n_params
    return np.random.default_rng(seed).uniform(0, 2 * math.pi, n)


@dataclass
class FixedAngleRow:
    d: int
    energy_diff: float
    t_count: int
    t_depth: int
    rotations: int


def fixed_angle(
    spec: ModelSpec,
    theta: Sequence[float],
    digits: Iterable[int],
    cache: SynthesisCache | None = None,
    workers: int = 1,
    seed: int = 0,
    energies: bool = True,
) -> list[FixedAngleRow]:
    """|E_FT - E_RZ| and resources of the transpiled ansatz, per digit accuracy."""
    cache = cache if cache is not None else SynthesisCache()
    ansatz = build_ansatz(spec)
    prob = Problem.from_spec(spec, cache=cache, seed=seed) if energies else None
    e_rz = prob.energy(theta, None) if energies else float("nan")
    rows = []
    for d in digits:
        ft = transpile(ansatz, theta, d, cache=cache, workers=workers, seed=seed)
        diff = abs(prob.energy(theta, d) - e_rz) if energies else float("nan")
        rows.append(FixedAngleRow(d, diff, ft.t_count, t_depth(ft), len(ft.rotation_words)))
    return rows


def euler_sweep(thetas: Iterable[float], digits: Iterable[int], seed: int = 0, cache: SynthesisCache | None = None):
    """Rows (theta, d, |theta1 + theta2 - theta|, |phi|)."""
    rows = []
    for d in digits:
        for th in thetas:
            dz, phi = euler_errors(th, d, seed, cache)
            rows.append((th, d, dz, phi))
    return rows


def precision_study(
    spec: ModelSpec,
    theta: Sequence[float],
    p_list: Iterable[int | None],
    digits: Iterable[int],
    cache: SynthesisCache | None = None,
    seed: int = 0,
):
    """Rows (p, d, |E_FT - E_RZ|) with both energies computed at precision p."""
    cache = cache if cache is not None else SynthesisCache()
    digits = list(digits)
    rows = []
    synthesize_angles(
        [g.angle(theta) for g in build_ansatz(spec).lowered().gates if g.is_rotation],
        max(digits),
        cache,
    )
    for p in p_list:
        prob = Problem.from_spec(spec, set_precision(p), cache=cache, seed=seed)
        e_rz = prob.energy(theta, None)
        for d in digits:
            rows.append((p, d, abs(prob.energy(theta, d) - e_rz)))
    return rows


def floor_analysis(values: Sequence[float]) -> tuple[int | None, float]:
    """(d*, floor) for a curve indexed from d = 1.

    d* is the first d whose successor is not smaller; the floor is the median
    of the values beyond d*.  Without a plateau d* is None and the floor is
    the last value.
    """
    vals = [float(v) for v in values]
    for i in range(len(vals) - 1):
        if vals[i + 1] >= vals[i]:
            tail = vals[i + 1 :]
            return i + 1, statistics.median(tail)
    return None, vals[-1]
