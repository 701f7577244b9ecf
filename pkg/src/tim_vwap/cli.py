"""Command-line entry point: `tim-vwap run <config> --out <dir>` and `tim-vwap validate <config>`.

The config is a JSON object; see README.md for the schema. Exit codes: 0 ok,
2 config error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import closed_form, discrete, quadrature
from .errors import DomainError, NumericalFailure
from .kernel import PowerLaw, Exponential, kernel_from_dict, kernel_to_dict

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3
QUAD_N_ENV = "TIM_VWAP_QUAD_N"
DEFAULT_QUAD_N = 1000
DEFAULT_CLOSED_FORM_CELLS = 200
MODES = ("closed-form", "quadrature", "discrete")
BENCHMARKS = ("vwap", "twap", "is", "target-close")
KNOWN_KEYS = {
    "mode", "kernel", "x0", "T", "N", "tau", "k", "benchmark", "gamma", "drift", "sigma",
    "volume", "constraints", "include_own_volume", "cost_discretization", "propagator", "sweep",
}


class ConfigError(ValueError):
    def __init__(self, diagnostics: list[str]):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = diagnostics


def fmt(x: float) -> str:
    """Locale-independent 12-significant-digit formatting used for every CSV number."""
    return format(float(x), ".12g")


@dataclass
class ScenarioConfig:
    mode: str
    kernel: dict
    x0: float
    benchmark: dict
    T: float | None = None
    N: int | None = None
    tau: float | None = None
    k: float = 1.0
    gamma: float = 0.0
    drift: Any = 0.0
    sigma: Any = 0.01
    volume: Any = 1.0
    constraints: dict = field(default_factory=dict)
    include_own_volume: bool = False
    cost_discretization: bool = False
    propagator: str = "point"
    sweep: dict | None = None
    base_dir: Path = Path(".")

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path = Path(".")) -> "ScenarioConfig":
        diags = validate(raw, base_dir)
        if diags:
            raise ConfigError(diags)
        keys = {k: raw[k] for k in KNOWN_KEYS if k in raw}
        keys.setdefault("benchmark", {"type": "vwap"})
        return cls(base_dir=base_dir, **keys)


def load_config(path: str | Path) -> tuple[dict, Path]:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError([f"config: file not found: {path}"])
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config: invalid JSON ({exc})"])
    if not isinstance(raw, dict):
        raise ConfigError(["config: top level must be a JSON object"])
    return raw, path.parent


# --- validation -----------------------------------------------------------------


def _num(raw, key, diags, *, positive=False, nonneg=False, required=False, integer=False):
    if key not in raw:
        if required:
            diags.append(f"{key}: required field missing")
        return None
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        diags.append(f"{key}: must be a finite number, got {v!r}")
        return None
    if integer and int(v) != v:
        diags.append(f"{key}: must be an integer, got {v!r}")
        return None
    if positive and not v > 0:
        diags.append(f"{key}: must be > 0, got {v!r}")
        return None
    if nonneg and v < 0:
        diags.append(f"{key}: must be >= 0, got {v!r}")
        return None
    return v


def _vector_or_scalar(raw, key, n, diags, *, positive=False):
    if key not in raw:
        return
    v = raw[key]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        if positive and not v > 0:
            diags.append(f"{key}: must be > 0, got {v!r}")
        return
    if not isinstance(v, list) or not all(isinstance(e, (int, float)) and not isinstance(e, bool) for e in v):
        diags.append(f"{key}: must be a number or a list of numbers")
        return
    if n is not None and len(v) != n:
        diags.append(f"{key}: list length {len(v)} does not match N={n}")
    if positive and any(e <= 0 for e in v):
        diags.append(f"{key}: all entries must be > 0")


def _load_sigma(spec, n, base_dir: Path) -> np.ndarray:
    if isinstance(spec, (int, float)):
        return float(spec) * np.eye(n)
    if isinstance(spec, dict):
        path = Path(spec["file"])
        if not path.is_absolute():
            path = base_dir / path
        return np.loadtxt(path, delimiter=",", ndmin=2)
    return np.asarray(spec, dtype=float)


def _validate_sigma(raw, n, base_dir, diags):
    if "sigma" not in raw:
        return
    s = raw["sigma"]
    if isinstance(s, dict):
        if set(s) != {"file"} or not isinstance(s["file"], str):
            diags.append('sigma: file form must be {"file": "<path to CSV matrix>"}')
            return
    elif isinstance(s, (int, float)) and not isinstance(s, bool):
        if not s > 0:
            diags.append(f"sigma: diagonal variance must be > 0, got {s!r}")
        return
    elif not isinstance(s, list):
        diags.append("sigma: must be a diagonal variance, a matrix, or {\"file\": ...}")
        return
    if n is None:
        return
    try:
        m = _load_sigma(s, n, base_dir)
    except (OSError, ValueError, TypeError) as exc:
        diags.append(f"sigma: cannot read matrix ({exc})")
        return
    if m.shape != (n, n):
        diags.append(f"sigma: matrix shape {m.shape} does not match N={n}")
    elif not np.allclose(m, m.T):
        diags.append("sigma: matrix must be symmetric")
    else:
        try:
            np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            diags.append("sigma: matrix must be positive definite")


def validate(raw: dict, base_dir: Path = Path(".")) -> list[str]:
    """All configuration problems found, without running any solver."""
    diags: list[str] = []
    if not isinstance(raw, dict):
        return ["config: top level must be a JSON object"]
    for key in sorted(set(raw) - KNOWN_KEYS):
        diags.append(f"{key}: unknown field")

    mode = raw.get("mode")
    if mode not in MODES:
        diags.append(f"mode: must be one of {list(MODES)}, got {mode!r}")
    kernel = None
    if "kernel" not in raw:
        diags.append("kernel: required field missing")
    elif not isinstance(raw["kernel"], dict):
        diags.append("kernel: must be an object with a 'type' field")
    else:
        try:
            kernel = kernel_from_dict(raw["kernel"])
        except (DomainError, TypeError, ValueError, KeyError) as exc:
            diags.append(f"kernel: {exc}")

    x0 = _num(raw, "x0", diags, required=True)
    if x0 is not None and x0 == 0:
        diags.append("x0: must be non-zero")
    _num(raw, "k", diags, positive=True)
    gamma = _num(raw, "gamma", diags, nonneg=True)
    T = _num(raw, "T", diags, positive=True)
    N = _num(raw, "N", diags, positive=True, integer=True)
    tau = _num(raw, "tau", diags, positive=True)
    N = int(N) if N is not None else None

    bench = raw.get("benchmark", {"type": "vwap"})
    btype = None
    if not isinstance(bench, dict):
        diags.append("benchmark: must be an object")
        bench = {}
    else:
        btype = bench.get("type")
        if btype not in BENCHMARKS:
            diags.append(f"benchmark.type: must be one of {list(BENCHMARKS)}, got {btype!r}")
        for key in sorted(set(bench) - {"type", "window", "window_time"}):
            diags.append(f"benchmark.{key}: unknown field")
        if btype in ("is", "target-close") and ("window" in bench or "window_time" in bench):
            diags.append(f"benchmark.window: not allowed for benchmark type {btype!r}")

    for key in ("include_own_volume", "cost_discretization"):
        if key in raw and not isinstance(raw[key], bool):
            diags.append(f"{key}: must be true or false")
    cons = raw.get("constraints", {})
    if not isinstance(cons, dict):
        diags.append("constraints: must be an object")
        cons = {}
    else:
        for key in sorted(set(cons) - {"nonneg", "max_speed"}):
            diags.append(f"constraints.{key}: unknown field")
        if "nonneg" in cons and not isinstance(cons["nonneg"], bool):
            diags.append("constraints.nonneg: must be true or false")
        if "max_speed" in cons:
            _num(cons, "max_speed", diags, positive=True)
            diags[:] = [d.replace("max_speed:", "constraints.max_speed:", 1) for d in diags]

    if mode == "discrete":
        _validate_discrete(raw, diags, kernel, x0, gamma, T, N, tau, bench, btype, cons, base_dir)
    elif mode in ("quadrature", "closed-form"):
        _validate_continuous(raw, diags, mode, kernel, T, N, gamma, bench, btype, cons)

    sweep = raw.get("sweep")
    if sweep is not None:
        if not isinstance(sweep, dict) or set(sweep) != {"parameter", "values"}:
            diags.append('sweep: must be {"parameter": "<dotted.path>", "values": [...]}')
        elif not isinstance(sweep["values"], list) or not sweep["values"]:
            diags.append("sweep.values: must be a non-empty list")
        elif not isinstance(sweep["parameter"], str) or sweep["parameter"].split(".")[0] not in KNOWN_KEYS - {"sweep"}:
            diags.append(f"sweep.parameter: unknown parameter {sweep.get('parameter')!r}")
        else:
            for i, value in enumerate(sweep["values"]):
                trial = apply_override(raw, sweep["parameter"], value)
                trial.pop("sweep")
                for d in validate(trial, base_dir):
                    diags.append(f"sweep.values[{i}]: {d}")
    return diags


def _validate_discrete(raw, diags, kernel, x0, gamma, T, N, tau, bench, btype, cons, base_dir):
    if N is None:
        if "N" not in raw:
            diags.append("N: required for discrete mode")
        return
    if T is not None and tau is not None and not math.isclose(T, N * tau, rel_tol=1e-12):
        diags.append(f"T: inconsistent with N*tau ({T} != {N}*{tau})")
    prop = raw.get("propagator", "point")
    if prop not in ("point", "cell-average"):
        diags.append(f"propagator: must be 'point' or 'cell-average', got {prop!r}")
    elif kernel is not None and prop == "point" and not kernel.finite_at_zero:
        diags.append("kernel: power-law kernel is singular at lag 0; use regularized-power-law "
                     "or set propagator to 'cell-average'")
    if "window" in bench:
        w = bench["window"]
        if not (isinstance(w, list) and len(w) == 2 and all(isinstance(e, int) and not isinstance(e, bool) for e in w)):
            diags.append("benchmark.window: must be [l1, l2] bucket indices (integers)")
        else:
            l1, l2 = w
            if l1 > l2:
                diags.append(f"benchmark.window: l1 > l2 ({l1} > {l2})")
            if l1 < 1 or l2 > N:
                diags.append(f"benchmark.window: must lie within [1, {N}], got [{l1}, {l2}]")
    if "window_time" in bench:
        horizon = T if T is not None else N * (tau if tau is not None else 1.0)
        _check_time_window(bench["window_time"], horizon, "benchmark.window_time", diags)
        if "window" in bench:
            diags.append("benchmark: give either window or window_time, not both")
    _vector_or_scalar(raw, "drift", N, diags)
    _vector_or_scalar(raw, "volume", N, diags, positive=True)
    volume = raw.get("volume", 1.0)
    flat_volume = not isinstance(volume, list) or len(set(volume)) <= 1
    if btype == "twap" and not flat_volume:
        diags.append("volume: twap benchmark requires a flat volume profile")
    if raw.get("include_own_volume"):
        if not flat_volume:
            diags.append("include_own_volume: requires a flat volume profile")
        if btype not in ("vwap", "twap"):
            diags.append("include_own_volume: requires a vwap/twap benchmark window")
    _validate_sigma(raw, N, base_dir, diags)
    if "max_speed" in cons and x0 is not None and isinstance(cons["max_speed"], (int, float)) \
            and cons["max_speed"] > 0 and cons["max_speed"] * N < abs(x0):
        diags.append(f"constraints.max_speed: {cons['max_speed']} * N cannot reach x0={x0}")
    if cons.get("nonneg") is True and x0 is not None and x0 < 0:
        diags.append("constraints.nonneg: incompatible with a negative x0")


def _check_time_window(w, horizon, name, diags):
    if not (isinstance(w, list) and len(w) == 2 and all(isinstance(e, (int, float)) and not isinstance(e, bool) for e in w)):
        diags.append(f"{name}: must be [T1, T2]")
        return
    T1, T2 = w
    if T1 > T2:
        diags.append(f"{name}: T1 > T2 ({T1} > {T2})")
    if T1 < 0 or T2 > horizon:
        diags.append(f"{name}: must lie within [0, {horizon}], got [{T1}, {T2}]")


def _validate_continuous(raw, diags, mode, kernel, T, N, gamma, bench, btype, cons):
    horizon = T if T is not None else 1.0
    for key in ("tau", "drift", "sigma", "include_own_volume", "cost_discretization", "propagator"):
        if key in raw:
            diags.append(f"{key}: only used in discrete mode")
    if cons:
        diags.append("constraints: only supported in discrete mode")
    if gamma:
        diags.append("gamma: continuous modes are risk neutral; use discrete mode for gamma > 0")
    if "window_time" in bench:
        diags.append("benchmark.window_time: use benchmark.window (times) in continuous modes")
    if "window" in bench:
        _check_time_window(bench["window"], horizon, "benchmark.window", diags)
        w = bench["window"]
        if isinstance(w, list) and len(w) == 2 and w[0] == w[1]:
            diags.append("benchmark.window: zero-length window; use benchmark type 'is' or 'target-close'")
    if mode == "quadrature":
        if N is not None and N < 4:
            diags.append(f"N: quadrature needs N >= 4, got {N}")
        n_eff = N if N is not None else _env_quad_n(diags)
        _vector_or_scalar(raw, "volume", n_eff, diags, positive=True)
        volume = raw.get("volume", 1.0)
        if btype == "twap" and isinstance(volume, list) and len(set(volume)) > 1:
            diags.append("volume: twap benchmark requires a flat volume profile")
        return
    # closed-form
    if "volume" in raw and isinstance(raw["volume"], list):
        diags.append("volume: closed-form solutions assume flat volume")
    if kernel is None:
        return
    full = "window" not in bench or (isinstance(bench["window"], list) and list(bench["window"]) == [0, horizon])
    if btype in ("vwap", "twap"):
        if not full:
            diags.append("benchmark.window: closed forms exist only for the full window [0, T]; use quadrature")
        if not isinstance(kernel, (Exponential, PowerLaw)):
            diags.append("kernel: closed-form VWAP needs an exponential or power-law kernel")
    elif btype in ("is", "target-close") and not isinstance(kernel, PowerLaw):
        diags.append(f"kernel: closed-form {btype} is available for the power-law kernel only")
    if N is not None and N < 1:
        diags.append("N: must be >= 1")


def _env_quad_n(diags=None) -> int:
    value = os.environ.get(QUAD_N_ENV)
    if value is None:
        return DEFAULT_QUAD_N
    try:
        n = int(value)
        if n < 4:
            raise ValueError
        return n
    except ValueError:
        if diags is not None:
            diags.append(f"{QUAD_N_ENV}: must be an integer >= 4, got {value!r}")
        return DEFAULT_QUAD_N


def apply_override(raw: dict, path: str, value) -> dict:
    """Deep copy of `raw` with the dotted `path` set to `value`."""
    out = copy.deepcopy(raw)
    node = out
    parts = path.split(".")
    for p in parts[:-1]:
        node = node.setdefault(p, {})
    node[parts[-1]] = value
    return out


# --- solving --------------------------------------------------------------------


@dataclass
class Outcome:
    rows: list[tuple[float, float, int]]  # (index_or_time, rate_or_shares, impulse_flag)
    report: dict
    total: float


def _clean(v):
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_clean(x) for x in v]
    return v


def solve(cfg: ScenarioConfig) -> Outcome:
    if cfg.mode == "discrete":
        return _solve_discrete(cfg)
    if cfg.mode == "quadrature":
        return _solve_quadrature(cfg)
    return _solve_closed_form(cfg)


def _discrete_grid(cfg):
    N = int(cfg.N)
    if cfg.tau is not None:
        tau = float(cfg.tau)
    elif cfg.T is not None:
        tau = float(cfg.T) / N
    else:
        tau = 1.0
    return N, tau


def _discrete_window(cfg, N, tau):
    b = cfg.benchmark
    btype = b.get("type", "vwap")
    if btype == "is":
        return "is"
    if btype == "target-close":
        return discrete.BenchmarkWindow(N, N)
    if "window" in b:
        return discrete.BenchmarkWindow(*b["window"])
    if "window_time" in b:
        return discrete.BenchmarkWindow.from_times(*b["window_time"], N * tau, N)
    return discrete.BenchmarkWindow(1, N)


def build_model(cfg: ScenarioConfig) -> discrete.MarketModel:
    N, tau = _discrete_grid(cfg)
    mu = np.broadcast_to(np.asarray(cfg.drift, dtype=float), (N,))
    volume = np.broadcast_to(np.asarray(cfg.volume, dtype=float), (N,))
    if cfg.benchmark.get("type") == "twap":
        volume = np.ones(N)
    return discrete.MarketModel(float(cfg.k), tau, N, mu, _load_sigma(cfg.sigma, N, cfg.base_dir), volume)


def _solve_discrete(cfg):
    model = build_model(cfg)
    N, tau = model.N, model.tau
    kernel = kernel_from_dict(cfg.kernel)
    window = _discrete_window(cfg, N, tau)
    propagator = None
    if cfg.propagator == "cell-average":
        propagator = quadrature.cell_average_propagator(kernel, N, tau)
    spec = discrete.build_qp(
        model, kernel, window, float(cfg.gamma), float(cfg.x0),
        cost_discretization=cfg.cost_discretization, own_volume=cfg.include_own_volume,
        propagator=propagator,
    )
    lower = upper = None
    if cfg.constraints.get("nonneg"):
        lower = np.zeros(N) if cfg.x0 > 0 else None
    if "max_speed" in cfg.constraints:
        m = float(cfg.constraints["max_speed"])
        upper = np.full(N, m)
        lower = np.maximum(lower, -m) if lower is not None else np.full(N, -m)
    if lower is None and upper is None:
        rep = discrete.solve_equality(spec)
        solver = "equality-kkt"
    else:
        rep = discrete.solve_bounded(spec, lower, upper)
        solver = "active-set"
    x = rep.schedule
    rows = [(i + 1, float(v), 0) for i, v in enumerate(x)]
    window_desc = window if isinstance(window, str) else [window.l1, window.l2]
    report = {
        "mode": "discrete",
        "objective": rep.objective,
        "multiplier": rep.multiplier,
        "expected_excess_profit": rep.expected_excess_profit,
        "utility": rep.utility,
        "kkt_residual": rep.kkt_residual,
        "total": float(x.sum()),
        "solver": {
            "name": solver,
            "iterations": rep.iterations,
            "active_set": [i + 1 for i in rep.active_set],
            "N": N,
            "tau": tau,
            "window": window_desc,
            "qp_constant": spec.constant,
            "propagator": cfg.propagator,
            "cost_discretization": cfg.cost_discretization,
            "include_own_volume": cfg.include_own_volume,
        },
    }
    return Outcome(rows, report, float(x.sum()))


def _solve_quadrature(cfg):
    kernel = kernel_from_dict(cfg.kernel)
    T = float(cfg.T) if cfg.T is not None else 1.0
    N = int(cfg.N) if cfg.N is not None else _env_quad_n()
    btype = cfg.benchmark.get("type", "vwap")
    if btype in ("is", "target-close"):
        eta = btype
    else:
        T1, T2 = cfg.benchmark.get("window", [0.0, T])
        volume = None
        if isinstance(cfg.volume, list) and btype == "vwap":
            volume = cfg.volume
        eta = quadrature.window_eta(T, N, float(T1), float(T2), volume)
    spec = quadrature.IntegralEquationSpec(kernel, T, float(cfg.x0), N, eta)
    sol = quadrature.solve_optimal_velocity(spec)
    rows = [(float(t), float(v), 0) for t, v in zip(sol.grid, sol.velocity)]
    report = {
        "mode": "quadrature",
        "objective": None,
        "multiplier": sol.lam,
        "expected_excess_profit": None,
        "utility": None,
        "kkt_residual": sol.residual,
        "total": sol.mass,
        "solver": {"name": "product-integration", "N": N, "T": T, "tau": spec.tau,
                   "kernel": kernel_to_dict(kernel), "benchmark": btype},
    }
    return Outcome(rows, report, sol.mass)


def _solve_closed_form(cfg):
    kernel = kernel_from_dict(cfg.kernel)
    T = float(cfg.T) if cfg.T is not None else 1.0
    x0 = float(cfg.x0)
    n = int(cfg.N) if cfg.N is not None else DEFAULT_CLOSED_FORM_CELLS
    btype = cfg.benchmark.get("type", "vwap")
    extra = {}
    if btype in ("vwap", "twap"):
        if isinstance(kernel, Exponential):
            sched = closed_form.vwap_exponential_schedule(x0, T, kernel.rho)
        else:
            sched = closed_form.vwap_powerlaw_schedule(x0, T, kernel.kappa)
            extra["sign_change_time"] = closed_form.sign_change_time(x0, T, kernel.kappa)
    elif btype == "is":
        sched = closed_form.is_powerlaw_schedule(x0, T, kernel.kappa)
    else:
        sched = closed_form.target_close_decomposition(x0, T, kernel)
    t, avg = sched.cell_averages(n)
    h = T / n
    rows = []
    if sched.initial_impulse:
        rows.append((0.0, sched.initial_impulse, 1))
    rows += [(float(a), float(b), 0) for a, b in zip(t, avg)]
    if sched.terminal_impulse:
        rows.append((T, sched.terminal_impulse, 1))
    total = float(avg.sum() * h + sched.initial_mass + sched.terminal_mass)
    report = {
        "mode": "closed-form",
        "objective": None,
        "multiplier": None,
        "expected_excess_profit": None,
        "utility": None,
        "kkt_residual": None,
        "total": total,
        "solver": {"name": "closed-form", "cells": n, "T": T, "kernel": kernel_to_dict(kernel),
                   "benchmark": btype, "initial_impulse": sched.initial_impulse,
                   "terminal_impulse": sched.terminal_impulse, **extra},
    }
    return Outcome(rows, report, total)


# --- output ---------------------------------------------------------------------


def write_schedule(path: Path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index_or_time", "rate_or_shares", "impulse_flag"])
        for a, b, flag in rows:
            w.writerow([fmt(a), fmt(b), flag])


def schedule_mass(path: Path, T_over_cells: float | None = None) -> float:
    """Executed shares implied by a schedule.csv (impulse rows count half their coefficient)."""
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    report = json.loads((path.parent / "report.json").read_text())
    mode = report["mode"]
    vals = [(float(r["index_or_time"]), float(r["rate_or_shares"]), int(r["impulse_flag"])) for r in rows]
    if mode == "discrete":
        return sum(v for _, v, _ in vals)
    if mode == "quadrature":
        return sum(v for _, v, _ in vals) * report["solver"]["tau"]
    h = report["solver"]["T"] / report["solver"]["cells"]
    return sum(0.5 * v if f else v * h for _, v, f in vals)


_SWEEP_SCALARS = ("objective", "multiplier", "expected_excess_profit", "utility", "kkt_residual", "total")


def run(raw: dict, out_dir: str | Path, base_dir: Path = Path(".")) -> int:
    """Solve the scenario (and its sweep) and write schedule.csv, report.json and sweep.csv."""
    try:
        cfg = ScenarioConfig.from_dict(raw, base_dir)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(f"config error: {d}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(out_dir)
    try:
        outcome = solve(cfg)
        sweep_rows = []
        if cfg.sweep:
            param = cfg.sweep["parameter"]
            for value in cfg.sweep["values"]:
                trial = apply_override(raw, param, value)
                trial.pop("sweep")
                res = solve(ScenarioConfig.from_dict(trial, base_dir))
                log.info("sweep %s=%s done", param, value)
                sweep_rows.append((value, res))
    except (NumericalFailure, DomainError, NotImplementedError) as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    out.mkdir(parents=True, exist_ok=True)
    write_schedule(out / "schedule.csv", outcome.rows)
    report = dict(outcome.report)
    report["config"] = raw
    (out / "report.json").write_text(json.dumps(_clean(report), indent=2, sort_keys=True) + "\n")
    if sweep_rows:
        width = max(len(res.rows) for _, res in sweep_rows)
        with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["parameter", "value", *_SWEEP_SCALARS, *(f"s{i}" for i in range(width))])
            for value, res in sweep_rows:
                scalars = ["" if res.report.get(k) is None else fmt(res.report[k]) for k in _SWEEP_SCALARS]
                sched = [fmt(r[1]) for r in res.rows] + [""] * (width - len(res.rows))
                w.writerow([cfg.sweep["parameter"], json.dumps(value), *scalars, *sched])
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="tim-vwap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="solve a scenario and write output files")
    p_run.add_argument("config")
    p_run.add_argument("--out", required=True, help="output directory")
    p_val = sub.add_parser("validate", help="check a scenario config without solving")
    p_val.add_argument("config")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    try:
        raw, base_dir = load_config(args.config)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(f"config error: {d}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        diags = validate(raw, base_dir)
        for d in diags:
            print(d)
        if not diags:
            print("ok")
        return EXIT_CONFIG if diags else EXIT_OK
    return run(raw, args.out, base_dir)


if __name__ == "__main__":
    sys.exit(main())
