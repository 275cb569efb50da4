"""Command-line front end.

    swapengine <command> [--config FILE] [parameter flags] [--axis SPEC ...]

Commands: moments, sweep, pdist, charfn, mc-validate, tur-scan, max-work,
finite-time. Output is CSV (header row, 17 significant digits) or one JSON
object ``{"config": ..., "rows": [...], "summary": ...}``.

Exit codes: 0 success, 1 validation failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np

from . import analysis, finite_time, spectral, tpm
from .engine import (
    ConventionWarning,
    EngineParams,
    Regime,
    RegimeWarning,
    classify_regime,
    mean_occupation_inverse,
)

COMMANDS = ("moments", "sweep", "pdist", "charfn", "mc-validate", "tur-scan", "max-work", "finite-time")

PARAM_KEYS = (
    "d",
    "omega_a",
    "omega_b",
    "omega_ratio",
    "beta_a",
    "beta_b",
    "t_a",
    "t_b",
    "bw_a",
    "bw_b",
    "n_a",
    "n_b",
    "theta",
    "theta_pi",
    "alpha",
    "alpha_a",
    "alpha_b",
    "tau_q",
    "tau_w",
    "alpha_tau",
    "tb_over_ta",
    "lam",
    "mu",
)
# keys that describe the same quantity in different ways
_ALIASES = {
    "omega_b": ("omega_b", "omega_ratio"),
    "beta_a": ("beta_a", "t_a", "bw_a", "n_a"),
    "beta_b": ("beta_b", "t_b", "bw_b", "n_b"),
    "theta": ("theta", "theta_pi"),
}
RUN_KEYS = ("command", "format", "output", "jobs", "seed", "samples", "mode", "axis", "override", "threshold")

ENGINE_COLUMNS = ["d", "omega_a", "omega_b", "beta_a", "beta_b", "theta"]

EXIT_OK, EXIT_FAIL, EXIT_BAD_INPUT = 0, 1, 2


class ConfigError(ValueError):
    """Bad user input (exit code 2)."""


# ------------------------------------------------------------------ config

def parse_number(text) -> float:
    """Float parser that also accepts fractions ('1/3') and 'inf'."""
    if isinstance(text, (int, float)):
        return float(text)
    text = str(text).strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {text!r}") from None


def _norm_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


@dataclass
class Axis:
    name: str
    values: list | None = None
    lo: float | None = None
    hi: float | None = None
    points: int | None = None
    log: bool = False

    @classmethod
    def parse(cls, spec: str) -> "Axis":
        """``name=v1,v2,...`` or ``name:min:max:points[:log|lin]``."""
        spec = spec.strip()
        if "=" in spec:
            name, _, rest = spec.partition("=")
            vals = [v.strip() for v in rest.split(",") if v.strip()]
            if not vals:
                raise ConfigError(f"axis {spec!r} lists no values")
            axis = cls(_norm_key(name), values=vals)
        else:
            parts = spec.split(":")
            if len(parts) not in (4, 5):
                raise ConfigError(f"axis spec {spec!r} is not name:min:max:points[:log]")
            scale = parts[4].strip().lower() if len(parts) == 5 else "lin"
            if scale not in ("lin", "log"):
                raise ConfigError(f"axis scale must be lin or log, got {scale!r}")
            try:
                points = int(parts[3])
            except ValueError:
                raise ConfigError(f"axis points must be an integer in {spec!r}") from None
            axis = cls(_norm_key(parts[0]), lo=parse_number(parts[1]), hi=parse_number(parts[2]), points=points, log=scale == "log")
        axis.validate()
        return axis

    def validate(self):
        if self.name not in PARAM_KEYS:
            raise ConfigError(f"unknown axis parameter {self.name!r}")
        if self.values is None:
            if self.points is None or self.points < 2:
                raise ConfigError(f"axis {self.name}: points must be >= 2")
            if self.lo == self.hi:
                raise ConfigError(f"axis {self.name}: range collapses to a single point")
            if self.log and (self.lo <= 0 or self.hi <= 0):
                raise ConfigError(f"axis {self.name}: log axis needs positive limits")

    def grid(self) -> list:
        if self.values is not None:
            return list(self.values)
        if self.log:
            return list(np.geomspace(self.lo, self.hi, self.points))
        return list(np.linspace(self.lo, self.hi, self.points))

    def spec(self) -> str:
        if self.values is not None:
            return f"{self.name}=" + ",".join(str(v) for v in self.values)
        return f"{self.name}:{self.lo!r}:{self.hi!r}:{self.points}:{'log' if self.log else 'lin'}"


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)
    axes: list = field(default_factory=list)
    format: str = ""
    output: str = "-"
    jobs: int = 1
    seed: int = 20240601
    samples: int = 1_000_000
    mode: str = "power"
    overrides: dict = field(default_factory=dict)
    threshold: float = 5.0

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "values": dict(self.values),
            "axes": [a.spec() for a in self.axes],
            "format": self.format,
            "output": self.output,
            "jobs": self.jobs,
            "seed": self.seed,
            "samples": self.samples,
            "mode": self.mode,
            "overrides": dict(self.overrides),
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        data["axes"] = [Axis.parse(s) for s in data.get("axes", [])]
        return cls(**data)


def read_config_file(path) -> list[tuple[str, str]]:
    """``key = value`` lines, ``#`` starts a comment. Returns pairs in order."""
    pairs = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        pairs.append((_norm_key(key), value.strip()))
    return pairs


def _default_jobs() -> int:
    raw = os.environ.get("QO_JOBS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"QO_JOBS must be an integer, got {raw!r}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    file_pairs = read_config_file(args.config) if args.config else []
    settings: dict = {}
    values: dict = {}
    axes: dict = {}
    overrides: dict = {}
    for key, value in file_pairs:
        if key == "axis":
            ax = Axis.parse(value)
            if ax.name in axes:
                raise ConfigError(f"axis {ax.name!r} given twice")
            axes[ax.name] = ax
        elif key == "override":
            k, _, v = value.partition("=")
            overrides[_norm_key(k)] = v.strip()
        elif key in PARAM_KEYS:
            values[key] = value
        elif key in RUN_KEYS:
            settings[key] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")

    flag_axes: dict = {}
    for spec in args.axis or []:
        ax = Axis.parse(spec)
        if ax.name in flag_axes:
            raise ConfigError(f"axis {ax.name!r} given twice")
        flag_axes[ax.name] = ax
    axes.update(flag_axes)
    for key in PARAM_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    for spec in args.override or []:
        k, _, v = spec.partition("=")
        overrides[_norm_key(k)] = v.strip()
    for key in ("format", "output", "jobs", "seed", "samples", "mode", "threshold"):
        v = getattr(args, key, None)
        if v is not None:
            settings[key] = v

    command = args.command or settings.get("command")
    if command is None:
        raise ConfigError("no command given (positional or 'command = ...' in the config file)")
    if args.command and settings.get("command") and settings["command"] != args.command:
        raise ConfigError(f"config file is for {settings['command']!r}, not {args.command!r}")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")

    try:
        jobs = int(settings["jobs"]) if "jobs" in settings else _default_jobs()
        seed = int(settings.get("seed", 20240601))
        samples = int(float(settings.get("samples", 1_000_000)))
        threshold = float(settings.get("threshold", 5.0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    fmt = settings.get("format") or ("json" if command in ("moments", "mc-validate") else "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    for name in axes:
        # a swept parameter replaces the fixed value and its aliases
        group = next((g for g in _ALIASES.values() if name in g), (name,))
        for alias in group:
            values.pop(alias, None)
    return RunConfig(
        command=command,
        values=values,
        axes=list(axes.values()),
        format=fmt,
        output=settings.get("output", "-"),
        jobs=max(1, jobs),
        seed=seed,
        samples=samples,
        mode=settings.get("mode", "power"),
        overrides=overrides,
        threshold=threshold,
    )


# -------------------------------------------------------- parameter builds

def _pick(values: dict, target: str):
    present = [k for k in _ALIASES[target] if k in values]
    if len(present) > 1:
        raise ConfigError(f"conflicting parameters {present} all set {target}")
    return present[0] if present else None


def _require(values: dict, key: str) -> float:
    if key not in values:
        raise ConfigError(f"missing parameter {key!r}")
    return parse_number(values[key])


def build_params(values: dict) -> EngineParams:
    """EngineParams from raw (string or numeric) parameter values."""
    d_raw = _require(values, "d")
    if d_raw != int(d_raw):
        raise ConfigError(f"d must be an integer, got {values['d']!r}")
    d = int(d_raw)
    if d < 2:
        raise ConfigError("invalid parameters: d must be >= 2")
    omega_a = parse_number(values.get("omega_a", 1.0))

    key = _pick(values, "omega_b")
    if key is None:
        raise ConfigError("missing parameter 'omega_b' (or 'omega_ratio')")
    omega_b = parse_number(values[key]) * (omega_a if key == "omega_ratio" else 1.0)

    def beta(target, omega, suffix):
        key = _pick(values, target)
        if key is None:
            raise ConfigError(f"missing parameter {target!r} (or t_{suffix}, bw_{suffix}, n_{suffix})")
        v = parse_number(values[key])
        if key.startswith("beta"):
            return v
        if key.startswith("t_"):
            return 1 / v
        if key.startswith("bw"):
            return v / omega
        try:
            return mean_occupation_inverse(v, d) / omega
        except ValueError as exc:
            raise ConfigError(f"invalid parameters: {exc}") from None

    beta_a = beta("beta_a", omega_a, "a")
    beta_b = beta("beta_b", omega_b, "b")
    key = _pick(values, "theta")
    if key is None:
        raise ConfigError("missing parameter 'theta' (or 'theta_pi')")
    theta = parse_number(values[key]) * (math.pi if key == "theta_pi" else 1.0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConventionWarning)
            return EngineParams(d, omega_a, omega_b, beta_a, beta_b, theta)
    except ValueError as exc:
        raise ConfigError(f"invalid parameters: {exc}") from None


def _rates(values: dict) -> tuple[float, float]:
    alpha = values.get("alpha")
    a = parse_number(values.get("alpha_a", alpha if alpha is not None else 1.0))
    b = parse_number(values.get("alpha_b", alpha if alpha is not None else 1.0))
    if not (a > 0 and b > 0):
        raise ConfigError("relaxation rates must be positive")
    return a, b


def _grid_points(cfg: RunConfig):
    names = [a.name for a in cfg.axes]
    for combo in product(*(a.grid() for a in cfg.axes)):
        point = dict(cfg.values)
        point.update(zip(names, combo))
        yield point


def _axis_values(cfg: RunConfig, point: dict) -> dict:
    out = {}
    for a in cfg.axes:
        v = point[a.name]
        out[a.name] = parse_number(v)
    return out


def _engine_columns(p: EngineParams) -> dict:
    return {k: getattr(p, k) for k in ENGINE_COLUMNS}


# ---------------------------------------------------------------- commands

def _moment_row(p: EngineParams) -> dict:
    ms = spectral.moment_set(p)
    regime = classify_regime(p)
    row = _engine_columns(p)
    row["regime"] = regime.value
    row.update(ms.as_dict())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        row["efficiency"] = 1 - p.omega_b / p.omega_a if regime is Regime.HEAT_ENGINE else None
        row["cop"] = p.omega_b / (p.omega_a - p.omega_b) if regime is Regime.REFRIGERATOR else None
    if ms.mean_w != 0 and ms.entropy_production > 0:
        tur = analysis.tur_bound_check(p)
        row.update(tur_lhs=tur.lhs, tur_rhs=tur.rhs, tur_ratio=tur.ratio, standard_violation=tur.standard_violation)
    else:
        row.update(tur_lhs=None, tur_rhs=None, tur_ratio=None, standard_violation=None)
    return row


def cmd_moments(cfg: RunConfig):
    if cfg.axes:
        raise ConfigError("moments takes no axes; use sweep")
    row = _moment_row(build_params(cfg.values))
    return [row], {"regime": row["regime"]}


def _sweep_point(args):
    cfg, point = args
    row = _axis_values(cfg, point)
    row.update(_moment_row(build_params(point)))
    return row


def _pool_map(fn, items, jobs):
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def cmd_sweep(cfg: RunConfig):
    if not 1 <= len(cfg.axes) <= 2:
        raise ConfigError("sweep needs one or two axes")
    rows = _pool_map(_sweep_point, [(cfg, p) for p in _grid_points(cfg)], cfg.jobs)
    return rows, {"points": len(rows)}


def _pdist_point(args):
    cfg, point = args
    p = build_params(point)
    dist = spectral.joint_distribution(p)
    head = _axis_values(cfg, point)
    slope = p.x_b - p.x_a
    rows = []
    for k, prob in zip(dist.support.tolist(), dist.prob.tolist()):
        if p.sin2 == 0 and k != 0:
            continue
        mirror = dist.p(-k)
        with np.errstate(divide="ignore"):
            log_ratio = math.log(prob / mirror) if prob > spectral.PROB_FLOOR and mirror > spectral.PROB_FLOOR else None
        row = dict(head)
        row.update(
            n=k,
            work=float(-k * (p.omega_a - p.omega_b)),
            heat_hot=float(k * p.omega_a),
            probability=prob,
            ft_log_ratio=log_ratio,
            ft_expected=slope * k,
        )
        rows.append(row)
    total = float(dist.prob.sum())
    footer = dict(head)
    footer.update(n="sum", work=None, heat_hot=None, probability=total, ft_log_ratio=None, ft_expected=None)
    rows.append(footer)
    return rows, total


def cmd_pdist(cfg: RunConfig):
    if len(cfg.axes) > 1:
        raise ConfigError("pdist takes at most one axis")
    results = _pool_map(_pdist_point, [(cfg, p) for p in _grid_points(cfg)], cfg.jobs)
    rows = [r for part, _ in results for r in part]
    return rows, {"total_probability": [t for _, t in results]}


def cmd_charfn(cfg: RunConfig):
    if not cfg.axes:
        raise ConfigError("charfn needs a lam and/or mu axis")
    rows = []
    for point in _grid_points(cfg):
        lam = parse_number(point.get("lam", 0.0))
        mu = parse_number(point.get("mu", 0.0))
        p = build_params(point)
        chi = complex(spectral.characteristic_function(p, lam, mu))
        row = _axis_values(cfg, point)
        row.update(lam=lam, mu=mu, xi=(p.omega_a - p.omega_b) * lam - p.omega_a * mu, re=chi.real, im=chi.imag, abs=abs(chi))
        rows.append(row)
    return rows, {"points": len(rows)}


def mc_validate(sample_params: EngineParams, exact_params: EngineParams, count: int, seed: int, jobs=1, threshold=5.0):
    """Compare Monte Carlo TPM samples against the closed forms; rows + summary."""
    stats = tpm.sample(sample_params, count, seed, jobs=jobs)
    dist = spectral.joint_distribution(exact_params)
    ms = spectral.moment_set(exact_params)
    rows = []
    z_lattice = stats.lattice_z_scores(dist.prob)
    hist = stats.histogram / count
    for k, p_exact, p_hat, z in zip(dist.support.tolist(), dist.prob.tolist(), hist.tolist(), z_lattice.tolist()):
        se = math.sqrt(p_exact * (1 - p_exact) / count)
        rows.append({"check": f"p(n={k})", "exact": p_exact, "estimate": p_hat, "stderr": se, "z": z})
    exact_moments = {
        "W": ms.mean_w,
        "Q_H": ms.mean_qh,
        "Q_C": ms.mean_qc,
        "W^2": spectral.moments_from_chi(exact_params, 2, 0),
        "Q_H^2": spectral.moments_from_chi(exact_params, 0, 2),
        "W*Q_H": spectral.moments_from_chi(exact_params, 1, 1),
        "Sigma": ms.entropy_production,
        "exp(-Sigma)": 1.0,
    }
    for name, exact in exact_moments.items():
        est, se = stats.estimate(name)
        diff = est - exact
        z = diff / se if se > 0 else (0.0 if abs(diff) <= 1e-12 * max(1.0, abs(exact)) else math.inf)
        rows.append({"check": f"<{name}>", "exact": exact, "estimate": est, "stderr": se, "z": z})
    for row in rows:
        row["pass"] = abs(row["z"]) <= threshold
    passed = all(r["pass"] for r in rows) and stats.off_antidiagonal_count == 0
    jar, jar_se = stats.estimate("exp(-Sigma)")
    summary = {
        "passed": passed,
        "threshold": threshold,
        "max_abs_z": max(abs(r["z"]) for r in rows),
        "samples": count,
        "seed": seed,
        "jarzynski": jar,
        "jarzynski_stderr": jar_se,
        "off_antidiagonal_count": stats.off_antidiagonal_count,
    }
    return rows, summary


def cmd_mc_validate(cfg: RunConfig):
    if cfg.axes:
        raise ConfigError("mc-validate takes no axes")
    if cfg.samples < 10_000:
        raise ConfigError("mc-validate needs at least 10^4 samples")
    sample_params = build_params(cfg.values)
    exact_values = dict(cfg.values)
    for key in cfg.overrides:
        if key not in PARAM_KEYS:
            raise ConfigError(f"unknown override {key!r}")
        for group in _ALIASES.values():
            if key in group:
                for alias in group:
                    exact_values.pop(alias, None)
    exact_values.update(cfg.overrides)
    exact_params = build_params(exact_values)
    return mc_validate(sample_params, exact_params, cfg.samples, cfg.seed, cfg.jobs, cfg.threshold)


def _tur_rows(args):
    d, theta, head, xs, ys = args
    rows = []
    for row in analysis.iter_tur_grid(d, theta, xs, ys):
        for y, snr, sigma, ratio in zip(row["y"].tolist(), row["snr"].tolist(), row["sigma"].tolist(), row["ratio"].tolist()):
            if y == row["x"]:
                continue
            r = dict(head)
            r.update(bw_a=row["x"], bw_b=y, snr=snr, sigma_half=sigma / 2, ratio=ratio, violation=ratio < 2)
            rows.append(r)
    return rows


def cmd_tur_scan(cfg: RunConfig):
    axes = {a.name: a for a in cfg.axes}
    if "bw_a" not in axes or "bw_b" not in axes:
        raise ConfigError("tur-scan needs bw_a and bw_b axes")
    extra = [a for a in cfg.axes if a.name not in ("bw_a", "bw_b")]
    if any(a.name not in ("d", "theta", "theta_pi") for a in extra):
        raise ConfigError("tur-scan only sweeps bw_a, bw_b, d and theta/theta_pi")
    xs = [parse_number(v) for v in axes["bw_a"].grid()]
    ys = [parse_number(v) for v in axes["bw_b"].grid()]
    tasks, summary = [], []
    for combo in product(*(a.grid() for a in extra)):
        point = dict(cfg.values)
        point.update(zip([a.name for a in extra], combo))
        d = int(_require(point, "d"))
        key = _pick(point, "theta")
        if key is None:
            raise ConfigError("missing parameter 'theta' (or 'theta_pi')")
        theta = parse_number(point[key]) * (math.pi if key == "theta_pi" else 1.0)
        head = {"d": d, "theta": theta}
        for xi in range(0, len(xs), 8):
            tasks.append((d, theta, head, xs[xi:xi + 8], ys))
        res = analysis.tur_scan(d, theta, xs, ys)
        summary.append({"d": d, "theta": theta, "violations": res.violation_count, "min_ratio": res.min_ratio,
                        "bound_failures": res.bound_failures})
    rows = [r for part in _pool_map(_tur_rows, tasks, cfg.jobs) for r in part]
    return rows, {"scans": summary}


def _max_work_point(args):
    cfg, point = args
    d = int(_require(point, "d"))
    r = _require(point, "tb_over_ta")
    key = _pick(point, "theta")
    theta = math.pi / 2 if key is None else parse_number(point[key]) * (math.pi if key == "theta_pi" else 1.0)
    res = analysis.efficiency_at_max_work(d, r, theta)
    row = _axis_values(cfg, point)
    row.update(d=d, tb_over_ta=r, theta=theta, eta_m=res.eta_m, eta_ca=res.eta_ca, eta_c=res.eta_c,
               x_opt=res.x_opt, work_max=res.work_max, converged=res.converged, at_bound=res.at_bound)
    return row


def cmd_max_work(cfg: RunConfig):
    rows = _pool_map(_max_work_point, [(cfg, p) for p in _grid_points(cfg)], cfg.jobs)
    return rows, {"unconverged": sum(1 for r in rows if not r["converged"])}


def cmd_finite_time(cfg: RunConfig):
    if cfg.mode == "power":
        names = {a.name for a in cfg.axes}
        if "tau_q" not in names:
            raise ConfigError("finite-time power mode needs a tau_q axis")
        rows = []
        optima = {}
        for point in _grid_points(cfg):
            a, b = _rates(point)
            tau_q = parse_number(point["tau_q"])
            tau_w = parse_number(point.get("tau_w", 0.0))
            row = _axis_values(cfg, point)
            row.update(alpha_a=a, alpha_b=b, tau_q=tau_q, tau_w=tau_w,
                       power_scaled=finite_time.scaled_power(a, b, tau_q, tau_w))
            rows.append(row)
            if (a, b, tau_w) not in optima:
                opt = finite_time.optimal_scaled_power(a, b, tau_w)
                optima[(a, b, tau_w)] = {"alpha_a": a, "alpha_b": b, "tau_w": tau_w, "tau_q_opt": opt.tau_q,
                                         "power_opt": opt.power_scaled, "boundary": opt.boundary}
        return rows, {"optima": list(optima.values())}
    if cfg.mode == "snr":
        rows = []
        for point in _grid_points(cfg):
            a, b = _rates(point)
            alpha_tau = parse_number(point.get("alpha_tau", math.inf))
            tau_q = alpha_tau / min(a, b) if "alpha_tau" in point else parse_number(point.get("tau_q", math.inf))
            point = dict(point)
            point.setdefault("theta_pi", "1/2") if "theta" not in point else None
            p = build_params(point)
            try:
                ftp = finite_time.FiniteTimeParams(p, a, b, tau_q)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            state = finite_time.steady_state(ftp)
            inv = finite_time.steady_inverse_snr(ftp)
            row = _axis_values(cfg, point)
            row.update(alpha_tau=alpha_tau, tau_q=tau_q, n_a_star=state.n_a_star, n_b_star=state.n_b_star,
                       beta_a_star=state.beta_a_star, beta_b_star=state.beta_b_star, inverse_snr=inv, snr=1 / inv)
            rows.append(row)
        return rows, {"points": len(rows)}
    raise ConfigError(f"finite-time mode must be power or snr, got {cfg.mode!r}")


HANDLERS = {
    "moments": cmd_moments,
    "sweep": cmd_sweep,
    "pdist": cmd_pdist,
    "charfn": cmd_charfn,
    "mc-validate": cmd_mc_validate,
    "tur-scan": cmd_tur_scan,
    "max-work": cmd_max_work,
    "finite-time": cmd_finite_time,
}


# ------------------------------------------------------------------ output

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def write_csv(rows: list, stream) -> None:
    columns: list = []
    for row in rows:
        for k in row:
            if k not in columns:
                columns.append(k)
    writer = csv.writer(stream, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])


def render(cfg: RunConfig, rows: list, summary) -> str:
    if cfg.format == "json":
        return json.dumps(_jsonable({"config": cfg.to_dict(), "rows": rows, "summary": summary}), indent=1) + "\n"
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def run(cfg: RunConfig) -> tuple[list, object, int]:
    rows, summary = HANDLERS[cfg.command](cfg)
    code = EXIT_OK
    if cfg.command == "mc-validate" and not summary["passed"]:
        code = EXIT_FAIL
    return rows, summary, code


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swapengine", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", nargs="?", choices=COMMANDS)
    parser.add_argument("--config", help="key = value file; flags override it")
    parser.add_argument("--axis", action="append", help="name:min:max:points[:log] or name=v1,v2,...")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--output", "-o", help="output path (default stdout)")
    parser.add_argument("--jobs", type=int, help="worker processes (default $QO_JOBS or 1)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--samples", type=float)
    parser.add_argument("--mode", choices=("power", "snr"), help="finite-time output")
    parser.add_argument("--threshold", type=float, help="mc-validate z-score limit (default 5)")
    parser.add_argument("--override", action="append", help="mc-validate: KEY=VALUE for the closed-form side only")
    for key in PARAM_KEYS:
        parser.add_argument("--" + key.replace("_", "-"), dest=key)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = build_config(args)
        rows, summary, code = run(cfg)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"swapengine: error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    text = render(cfg, rows, summary)
    if cfg.output in ("-", ""):
        sys.stdout.write(text)
    else:
        Path(cfg.output).write_text(text, encoding="utf-8", newline="")
    return code


if __name__ == "__main__":
    sys.exit(main())
