"""Command-line entry point: ``ftvqe <subcommand> [options]``.

Every command writes CSV (or, for ``synth``, key/value lines) preceded by a
provenance header of ``#``-prefixed lines holding the fully resolved
configuration.  Settings come from built-in defaults, then an optional
``--config`` YAML file with flat dotted keys, then command-line flags.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

import mpmath
import numpy as np
import yaml

from . import experiments as ex
from .models import ModelSpec, exact_ground_energy
from .synthesis import SynthesisCache, SynthesisRequest, axis_word, rz_error
from .vqe import Problem, VQEConfig, minimize

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2

COMMON = {
    "run.seed": 0,
    "run.threads": 1,
    "run.out": "-",
    "run.precision": None,
    "run.cache": None,
}
MODEL = {
    "model.name": "TFIM",
    "model.n": 4,
    "model.coupling": 1.0,
    "model.layers": 2,
}
DEFAULTS: dict[str, dict[str, Any]] = {
    "synth": {"synth.theta": 0.0, "synth.digits": 4, "synth.axis": "Z"},
    "sweep-synth": {"sweep.digits": [2, 3, 4, 5, 6, 7, 8], "sweep.grid_points": 100},
    "fixed-angle": {**MODEL, "fixed.digits": [1, 2, 3, 4, 5, 6, 7, 8], "fixed.params": "vqe", "fixed.energies": True},
    "vqe": {
        **MODEL,
        "vqe.mode": "RZ",
        "vqe.gradient": "PARAM_SHIFT",
        "vqe.digits": None,
        "vqe.adaptive": False,
        "vqe.d_start": 3,
        "vqe.d_max": 8,
        "vqe.fd_step": 0.1,
        "vqe.stop_tol": 1e-14,
        "vqe.max_iterations": 500,
        "vqe.params_out": None,
    },
    "euler": {"euler.theta": [], "euler.count": 100, "euler.digits": [2, 3, 4, 5, 6, 7, 8]},
    "precision-study": {
        **MODEL,
        "precision.p_list": [7, 20],
        "precision.digits": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
        "precision.params": "vqe",
    },
}


class UsageError(Exception):
    pass


class VerificationError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _float_list(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    s = str(text).lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


# flag name -> (config key, converter)
FLAGS = {
    "seed": ("run.seed", int),
    "threads": ("run.threads", int),
    "out": ("run.out", str),
    "precision": ("run.precision", int),
    "cache": ("run.cache", str),
    "theta": ("synth.theta", float),
    "axis": ("synth.axis", str),
    "model": ("model.name", str),
    "n": ("model.n", int),
    "coupling": ("model.coupling", float),
    "layers": ("model.layers", int),
    "mode": ("vqe.mode", str),
    "gradient": ("vqe.gradient", str),
    "adaptive": ("vqe.adaptive", _bool),
    "d_start": ("vqe.d_start", int),
    "d_max": ("vqe.d_max", int),
    "fd_step": ("vqe.fd_step", float),
    "stop_tol": ("vqe.stop_tol", float),
    "max_iterations": ("vqe.max_iterations", int),
    "params_out": ("vqe.params_out", str),
    "grid_points": ("sweep.grid_points", int),
    "params": (None, str),
    "count": ("euler.count", int),
    "thetas": ("euler.theta", _float_list),
    "p_list": ("precision.p_list", _int_list),
    "energies": ("fixed.energies", _bool),
}

LIST_KEYS = {
    "sweep.digits": _int_list,
    "fixed.digits": _int_list,
    "euler.digits": _int_list,
    "precision.digits": _int_list,
    "precision.p_list": _int_list,
    "euler.theta": _float_list,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftvqe", description="Fault-tolerant VQE workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML file with flat dotted keys")
        p.add_argument("--seed", help="RNG seed")
        p.add_argument("--threads", help="worker processes for synthesis")
        p.add_argument("--out", help="output file ('-' for stdout)")
        p.add_argument("--precision", help="extended precision in decimal digits")
        p.add_argument("--cache", help="synthesis cache file")

    def model(p):
        p.add_argument("--model", help="TFIM or XXZ")
        p.add_argument("--n", help="number of qubits")
        p.add_argument("--coupling", help="g (TFIM) or Delta (XXZ)")
        p.add_argument("--layers", help="ansatz layers")

    p = sub.add_parser("synth", help="synthesize one rotation")
    common(p)
    p.add_argument("--theta")
    p.add_argument("--digits")
    p.add_argument("--axis")

    p = sub.add_parser("sweep-synth", help="T-count and error over a theta grid")
    common(p)
    p.add_argument("--digits", help="list, e.g. 2,3,4 or 2..8")
    p.add_argument("--grid-points", dest="grid_points")

    p = sub.add_parser("fixed-angle", help="FT vs RZ energy at fixed parameters")
    common(p)
    model(p)
    p.add_argument("--digits")
    p.add_argument("--params", help="'vqe', 'random' or a file with one angle per line")
    p.add_argument("--energies", help="compute energies (false: resource counts only)")

    p = sub.add_parser("vqe", help="run a VQE minimization")
    common(p)
    model(p)
    p.add_argument("--mode")
    p.add_argument("--gradient")
    p.add_argument("--digits")
    p.add_argument("--adaptive")
    p.add_argument("--d-start", dest="d_start")
    p.add_argument("--d-max", dest="d_max")
    p.add_argument("--fd-step", dest="fd_step")
    p.add_argument("--stop-tol", dest="stop_tol")
    p.add_argument("--max-iterations", dest="max_iterations")
    p.add_argument("--params-out", dest="params_out", help="write final parameters here")

    p = sub.add_parser("euler", help="Euler-angle errors of synthesized rotations")
    common(p)
    p.add_argument("--thetas", help="comma-separated angles (default: random)")
    p.add_argument("--count", help="number of random angles when --thetas is absent")
    p.add_argument("--digits")

    p = sub.add_parser("precision-study", help="FT vs RZ energy at several emulator precisions")
    common(p)
    model(p)
    p.add_argument("--p-list", dest="p_list", help="precisions in digits, e.g. 7,20")
    p.add_argument("--digits")
    p.add_argument("--params")
    return parser


_DIGIT_KEYS = {
    "synth": ("synth.digits", int),
    "sweep-synth": ("sweep.digits", _int_list),
    "fixed-angle": ("fixed.digits", _int_list),
    "vqe": ("vqe.digits", int),
    "euler": ("euler.digits", _int_list),
    "precision-study": ("precision.digits", _int_list),
}
_PARAM_KEYS = {"fixed-angle": "fixed.params", "precision-study": "precision.params"}


def resolve_config(command: str, args: argparse.Namespace) -> dict[str, Any]:
    cfg = {**COMMON, **DEFAULTS[command]}
    if getattr(args, "config", None):
        try:
            loaded = yaml.safe_load(Path(args.config).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must be a mapping of dotted keys")
        for key, value in loaded.items():
            if key not in cfg:
                raise UsageError(f"unknown config key {key!r} for {command}")
            conv = LIST_KEYS.get(key)
            if conv is not None and not isinstance(value, list):
                value = conv(value)
            cfg[key] = value
    for name, raw in vars(args).items():
        if raw is None or name in ("command", "config"):
            continue
        try:
            if name == "digits":
                key, conv = _DIGIT_KEYS[command]
            elif name == "params":
                key, conv = _PARAM_KEYS[command], str
            else:
                key, conv = FLAGS[name]
            cfg[key] = conv(raw)
        except (ValueError, UsageError) as exc:
            raise UsageError(f"bad value for --{name}: {raw!r}") from exc
    return cfg


def _code_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def provenance(command: str, cfg: dict[str, Any]) -> str:
    lines = [f"# ftvqe {command}", f"# version = {_code_version()}"]
    lines += [f"# {k} = {cfg[k]!r}" for k in sorted(cfg)]
    return "\n".join(lines) + "\n"


def _spec(cfg) -> ModelSpec:
    try:
        return ModelSpec(cfg["model.name"], int(cfg["model.n"]), float(cfg["model.coupling"]), int(cfg["model.layers"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _cache(cfg) -> SynthesisCache:
    return SynthesisCache(cfg["run.cache"]) if cfg["run.cache"] else SynthesisCache()


def _load_params(source: str, spec: ModelSpec, seed: int) -> np.ndarray:
    if source == "vqe":
        return ex.optimized_params(spec, seed)
    if source == "random":
        return ex.random_params(spec, seed)
    try:
        values = [float(x) for x in Path(source).read_text().split()]
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read parameters from {source!r}: {exc}") from exc
    return np.array(values)


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _e(x) -> str:
    return mpmath.nstr(mpmath.mpf(x), 6, min_fixed=1, max_fixed=0)


# ---------------------------------------------------------------------------
# commands; each returns the body text and raises VerificationError on failure


def cmd_synth(cfg) -> str:
    theta, d = float(cfg["synth.theta"]), int(cfg["synth.digits"])
    if d < 1:
        raise UsageError("digits must be positive")
    cache = _cache(cfg)
    res = cache.synthesize(SynthesisRequest(theta, d, int(cfg["run.seed"])))
    axis = str(cfg["synth.axis"]).upper()
    if axis not in "XYZ" or len(axis) != 1:
        raise UsageError(f"axis must be X, Y or Z, not {axis!r}")
    word = axis_word(axis, res.word)
    # independent re-check from the word itself
    err = rz_error(res.word, theta, d)
    ok = err <= mpmath.mpf(10) ** (-d)
    lines = [
        f"theta,{theta!r}",
        f"digits,{d}",
        f"axis,{axis}",
        f"word,{word}",
        f"t_count,{word.count('T')}",
        f"achieved_error,{_e(err)}",
        f"k_final,{res.k_final}",
        f"candidate_trials,{res.candidate_trials}",
        f"verified,{int(ok)}",
    ]
    body = "\n".join(lines) + "\n"
    if not ok:
        raise VerificationError(body)
    return body


def cmd_sweep_synth(cfg) -> str:
    try:
        rows = ex.sweep_synth(cfg["sweep.digits"], int(cfg["sweep.grid_points"]), int(cfg["run.seed"]), _cache(cfg))
    except ArithmeticError as exc:
        raise VerificationError(str(exc)) from exc
    return _csv(["theta", "d", "t_count", "error"], [(f"{t:.12f}", d, tc, _e(e)) for t, d, tc, e in rows])


def cmd_fixed_angle(cfg) -> str:
    spec = _spec(cfg)
    seed = int(cfg["run.seed"])
    theta = _load_params(cfg["fixed.params"], spec, seed)
    rows = ex.fixed_angle(
        spec, theta, cfg["fixed.digits"], _cache(cfg), int(cfg["run.threads"]), seed, _bool(cfg["fixed.energies"])
    )
    return _csv(
        ["d", "energy_diff", "t_count", "t_depth", "rotations"],
        [(r.d, f"{r.energy_diff:.6e}", r.t_count, r.t_depth, r.rotations) for r in rows],
    )


def cmd_vqe(cfg) -> str:
    spec = _spec(cfg)
    try:
        vcfg = VQEConfig(
            mode=cfg["vqe.mode"],
            gradient=cfg["vqe.gradient"],
            digits=None if cfg["vqe.digits"] is None else int(cfg["vqe.digits"]),
            adaptive=_bool(cfg["vqe.adaptive"]),
            d_start=int(cfg["vqe.d_start"]),
            d_max=int(cfg["vqe.d_max"]),
            fd_step=float(cfg["vqe.fd_step"]),
            stop_tol=float(cfg["vqe.stop_tol"]),
            max_iterations=int(cfg["vqe.max_iterations"]),
            seed=int(cfg["run.seed"]),
            precision=cfg["run.precision"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    prob = Problem.from_spec(spec, cache=_cache(cfg), seed=vcfg.seed)
    trace = minimize(prob, vcfg, exact_energy=exact_ground_energy(spec))
    if cfg["vqe.params_out"]:
        Path(cfg["vqe.params_out"]).write_text("".join(f"{float(x)!r}\n" for x in trace.params))
    buf = io.StringIO()
    buf.write(f"# status = {trace.status}\n# exact_energy = {trace.exact_energy!r}\n")
    trace.write_csv(buf)
    return buf.getvalue()


def cmd_euler(cfg) -> str:
    seed = int(cfg["run.seed"])
    thetas = list(cfg["euler.theta"])
    if not thetas:
        rng = np.random.default_rng(seed)
        thetas = [float(x) for x in rng.uniform(0, 2 * math.pi, int(cfg["euler.count"]))]
    rows = ex.euler_sweep(thetas, cfg["euler.digits"], seed, _cache(cfg))
    bad = [r for r in rows if r[2] > 10 * 10.0 ** (-r[1]) or r[3] > 10 * 10.0 ** (-r[1])]
    body = _csv(["theta", "d", "dz_error", "phi_error"], [(f"{t:.12f}", d, f"{a:.6e}", f"{b:.6e}") for t, d, a, b in rows])
    if bad:
        raise VerificationError(body)
    return body


def cmd_precision_study(cfg) -> str:
    spec = _spec(cfg)
    seed = int(cfg["run.seed"])
    theta = _load_params(cfg["precision.params"], spec, seed)
    p_list = [None if p in (0, None) else int(p) for p in cfg["precision.p_list"]]
    rows = ex.precision_study(spec, theta, p_list, cfg["precision.digits"], _cache(cfg), seed)
    return _csv(["p", "d", "energy_diff"], [("double" if p is None else p, d, _e(v)) for p, d, v in rows])


COMMANDS = {
    "synth": cmd_synth,
    "sweep-synth": cmd_sweep_synth,
    "fixed-angle": cmd_fixed_angle,
    "vqe": cmd_vqe,
    "euler": cmd_euler,
    "precision-study": cmd_precision_study,
}


def _emit(cfg, text: str) -> None:
    out = cfg["run.out"]
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = resolve_config(args.command, args)
        head = provenance(args.command, cfg)
        body = COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        _emit(cfg, head + str(exc))
        print("error: verification failed", file=sys.stderr)
        return EXIT_VERIFY
    _emit(cfg, head + body)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
