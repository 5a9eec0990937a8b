"""Command line front end.

Configuration is an INI file (see ``README.md`` for the schema)::

    [model]
    kind = reset
    g = 1.6e-3
    p_c = 1e-2
    p_h = 1.1e-3
    T_c = 0
    T_h = inf

    [sweep]
    outer = T_h log 0.1 1000 20
    optimize = true

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .analytics import SweepRecord, steady_report
from .models import COUPLING_NAMES, PARAM_TYPES, make_params
from .optimize import (
    COUPLING_BOUNDS, DEFAULT_GRID_POINTS, T_H_CAP, OptimizationProblem, maximize_concurrence,
    threshold_hot_temperature,
)
from .steady import RESIDUAL_TOL, SteadyStateError, StepSizeTooLarge
from .verify import run_verification

OUTPUT_DIR_ENV = "THERMOENT_OUTPUT_DIR"

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

SECTIONS = {
    "model": None,  # keys checked against the model's fields
    "sweep": {"outer", "inner", "optimize"},
    "optimize": {"bounds", "grid_points"},
    "threshold": {"t_c", "t_h_cap"},
    "output": {"path"},
    "tolerances": {"residual"},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Axis:
    """A sweep axis: ``linear``/``log`` ranges or an explicit ``values`` list."""

    name: str
    scale: str
    lo: float
    hi: float
    points: int
    explicit: tuple = ()

    def values(self):
        if self.scale == "values":
            return list(self.explicit)
        if self.points == 1:
            return [self.lo]
        if self.scale == "log":
            return list(np.logspace(math.log10(self.lo), math.log10(self.hi), self.points))
        return list(np.linspace(self.lo, self.hi, self.points))


@dataclass
class RunConfig:
    kind: str
    model: dict
    outer: Axis | None = None
    inner: Axis | None = None
    optimize: bool = False
    bounds: tuple = COUPLING_BOUNDS
    grid_points: int = DEFAULT_GRID_POINTS
    threshold_T_c: Axis | None = None
    T_h_cap: float = T_H_CAP
    output: str | None = None
    residual_tol: float = RESIDUAL_TOL


def _number(text, key):
    token = text.strip().lower()
    if token in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        value = float(token)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}")
    if math.isnan(value):
        raise ConfigError(f"{key}: NaN is not allowed")
    return value


def _bool(text, key):
    token = text.strip().lower()
    if token in ("1", "true", "yes", "on"):
        return True
    if token in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _axis(text, key, valid_names, name=None):
    parts = text.split()
    if name is not None:
        parts = [name] + parts
    if len(parts) >= 2 and parts[1] == "values":
        pname, vals = parts[0], [_number(v, key) for v in parts[2:]]
        if pname not in valid_names:
            raise ConfigError(f"{key}: unknown sweep parameter {pname!r}")
        if not vals:
            raise ConfigError(f"{key}: an axis needs at least one point")
        if not all(math.isfinite(v) for v in vals):
            raise ConfigError(f"{key}: sweep values must be finite")
        return Axis(pname, "values", min(vals), max(vals), len(vals), tuple(vals))
    if len(parts) != 5:
        raise ConfigError(f"{key}: expected 'name scale min max points' or "
                          f"'name values v1 v2 ...', got {text!r}")
    pname, scale, lo, hi, pts = parts
    if pname not in valid_names:
        raise ConfigError(f"{key}: unknown sweep parameter {pname!r}")
    if scale not in ("linear", "log"):
        raise ConfigError(f"{key}: scale must be 'linear', 'log' or 'values', got {scale!r}")
    lo, hi = _number(lo, key), _number(hi, key)
    try:
        n = int(pts)
    except ValueError:
        raise ConfigError(f"{key}: points must be an integer, got {pts!r}")
    if n < 1:
        raise ConfigError(f"{key}: an axis needs at least one point")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ConfigError(f"{key}: need finite min <= max")
    if scale == "log" and lo <= 0:
        raise ConfigError(f"{key}: log axis needs a positive minimum")
    return Axis(pname, scale, lo, hi, n)


def _model_fields(kind):
    return [f.name for f in fields(PARAM_TYPES[kind])]


def parse_config(text: str) -> RunConfig:
    """Parse and validate an INI configuration. Raises ``ConfigError``."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}")
    for section in cp.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        allowed = SECTIONS[section]
        if allowed is not None:
            for key in cp[section]:
                if key.lower() not in allowed:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
    if "model" not in cp:
        raise ConfigError("missing [model] section")
    m = dict(cp["model"])
    kind = m.pop("kind", None)
    if kind not in PARAM_TYPES:
        raise ConfigError(f"[model] kind must be one of {sorted(PARAM_TYPES)}, got {kind!r}")
    valid = _model_fields(kind)
    model = {}
    for key, value in m.items():
        if key not in valid:
            raise ConfigError(f"unknown key {key!r} in [model] for kind {kind!r}")
        model[key] = _number(value, key)
        if kind == "flux" and key in ("T_c", "T_h") and math.isinf(model[key]):
            raise ConfigError("flux model does not accept infinite temperatures")
    cfg = RunConfig(kind=kind, model=model)

    if "sweep" in cp:
        s = {k.lower(): v for k, v in cp["sweep"].items()}
        if "outer" in s:
            cfg.outer = _axis(s["outer"], "sweep.outer", valid)
        if "inner" in s:
            cfg.inner = _axis(s["inner"], "sweep.inner", valid)
        if "optimize" in s:
            cfg.optimize = _bool(s["optimize"], "sweep.optimize")
    if "optimize" in cp:
        o = {k.lower(): v for k, v in cp["optimize"].items()}
        if "bounds" in o:
            parts = o["bounds"].split()
            if len(parts) != 2:
                raise ConfigError("optimize.bounds: expected 'lower upper'")
            lo, hi = (_number(x, "optimize.bounds") for x in parts)
            if not 0 < lo <= hi < math.inf:
                raise ConfigError("optimize.bounds: need 0 < lower <= upper")
            cfg.bounds = (lo, hi)
        if "grid_points" in o:
            try:
                cfg.grid_points = int(o["grid_points"])
            except ValueError:
                raise ConfigError("optimize.grid_points must be an integer")
            if cfg.grid_points < 1:
                raise ConfigError("optimize.grid_points must be >= 1")
    if "threshold" in cp:
        t = {k.lower(): v for k, v in cp["threshold"].items()}
        if "t_c" in t:
            cfg.threshold_T_c = _axis(t["t_c"], "threshold.T_c", ["T_c"], name="T_c")
        if "t_h_cap" in t:
            cfg.T_h_cap = _number(t["t_h_cap"], "threshold.T_h_cap")
            if not 0 < cfg.T_h_cap < math.inf:
                raise ConfigError("threshold.T_h_cap must be positive and finite")
    if "output" in cp and "path" in cp["output"]:
        cfg.output = cp["output"]["path"].strip()
    if "tolerances" in cp and "residual" in cp["tolerances"]:
        cfg.residual_tol = _number(cp["tolerances"]["residual"], "tolerances.residual")
    return cfg


def _complete_params(cfg: RunConfig, overrides: dict, require_couplings=True):
    values = dict(cfg.model)
    values.update(overrides)
    missing = [f for f in ("T_c", "T_h") if f not in values]
    if require_couplings:
        missing += [c for c in COUPLING_NAMES[cfg.kind] if c not in values]
    if missing:
        raise ConfigError(f"[model] is missing {', '.join(missing)}")
    try:
        return make_params(cfg.kind, **values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model parameters: {exc}")


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    if path is None:
        sys.stdout.write(buf.getvalue())
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def _resolve_output(cfg, cli_output):
    path = cli_output or cfg.output
    if path is None:
        return None
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if out_dir and not os.path.isabs(path):
        path = os.path.join(out_dir, path)
    return path


# sweep work items are module-level so they can be shipped to worker processes
def _sweep_point(args):
    kind, values, optimize, bounds, grid_points, residual_tol = args
    if optimize:
        fixed = {k: v for k, v in values.items() if k not in COUPLING_NAMES[kind]}
        free = {name: tuple(bounds) for name in COUPLING_NAMES[kind]}
        result = maximize_concurrence(OptimizationProblem(kind, fixed, free, grid_points=grid_points))
        params = result.params
    else:
        params = make_params(kind, **values)
    return steady_report(params, residual_tol=residual_tol)


def _threshold_point(args):
    kind, T_c, U, E, bounds, cap = args
    return threshold_hot_temperature(kind, T_c, U=U, E=E, bounds=bounds, T_h_cap=cap)


def _map(fn, items, workers):
    if workers and workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def cmd_steady(cfg: RunConfig, output=None):
    params = _complete_params(cfg, {})
    rec = steady_report(params, residual_tol=cfg.residual_tol)
    from .models import build_liouvillian
    from .steady import solve_steady
    rho = solve_steady(build_liouvillian(params), residual_tol=cfg.residual_tol).state.mat
    print("density matrix (real part):")
    print(np.array2string(rho.real, precision=10, suppress_small=False))
    print("density matrix (imaginary part):")
    print(np.array2string(rho.imag, precision=10, suppress_small=False))
    for name, value in zip(SweepRecord.columns(), rec.as_tuple()):
        print(f"{name} = {_fmt(value)}")
    if output:
        write_csv(output, SweepRecord.columns(), [rec.as_tuple()])
    return rec


def sweep_points(cfg: RunConfig):
    if cfg.outer is None:
        raise ConfigError("[sweep] needs an 'outer' axis")
    outer = cfg.outer.values()
    inner = cfg.inner.values() if cfg.inner else [None]
    points = []
    for a in outer:
        for b in inner:
            over = {cfg.outer.name: float(a)}
            if b is not None:
                over[cfg.inner.name] = float(b)
            # validate every point before computing anything
            probe = dict(over)
            if cfg.optimize:
                probe.update({c: cfg.bounds[0] for c in COUPLING_NAMES[cfg.kind]})
            _complete_params(cfg, probe)
            points.append({**cfg.model, **over})
    return points


def cmd_sweep(cfg: RunConfig, output=None, workers=1):
    points = sweep_points(cfg)
    items = [(cfg.kind, p, cfg.optimize, cfg.bounds, cfg.grid_points, cfg.residual_tol)
             for p in points]
    records = _map(_sweep_point, items, workers)
    write_csv(output, SweepRecord.columns(), [r.as_tuple() for r in records])
    return records


def cmd_threshold(cfg: RunConfig, output=None, workers=1):
    if cfg.threshold_T_c is None:
        raise ConfigError("[threshold] needs a 'T_c' axis")
    U = cfg.model.get("U", 0.0) if cfg.kind == "dot" else None
    E = cfg.model.get("E", 1.0)
    items = [(cfg.kind, float(T_c), U, E, cfg.bounds, cfg.T_h_cap)
             for T_c in cfg.threshold_T_c.values()]
    results = _map(_threshold_point, items, workers)
    rows = [(cfg.kind, 0.0 if U is None else U, item[1], "unreachable" if th is None else th)
            for item, th in zip(items, results)]
    write_csv(output, ["model", "U", "T_c", "T_h_threshold"], rows)
    return rows


def cmd_optimize(cfg: RunConfig, output=None):
    fixed = {k: v for k, v in cfg.model.items() if k not in COUPLING_NAMES[cfg.kind]}
    if "T_c" not in fixed or "T_h" not in fixed:
        raise ConfigError("[model] needs T_c and T_h for optimize")
    free = {name: tuple(cfg.bounds) for name in COUPLING_NAMES[cfg.kind]}
    try:
        prob = OptimizationProblem(cfg.kind, fixed, free, grid_points=cfg.grid_points)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))
    result = maximize_concurrence(prob)
    print(f"best concurrence = {_fmt(result.best_value)}")
    for name, value in result.best_point.items():
        print(f"{name} = {_fmt(value)}")
    print(f"evaluations = {result.evaluations}")
    if result.all_grid_zero:
        print("note: no grid point was entangled", file=sys.stderr)
    rec = steady_report(result.params, residual_tol=cfg.residual_tol)
    if output:
        write_csv(output, SweepRecord.columns() + ["evaluations"],
                  [rec.as_tuple() + (result.evaluations,)])
    return result


def cmd_verify(tolerance=None):
    results = run_verification(tolerance)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} check groups passed")
    return ok


def build_parser():
    ap = argparse.ArgumentParser(prog="thermoent",
                                 description="Steady-state entanglement of a two-qubit thermal machine")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("steady", "sweep", "threshold", "optimize", "verify"):
        p = sub.add_parser(name)
        if name != "verify":
            p.add_argument("--config", required=True, help="INI configuration file")
            p.add_argument("--output", help="CSV output path (overrides [output] path)")
        if name in ("sweep", "threshold"):
            p.add_argument("--workers", type=int, default=1)
        p.add_argument("--tolerance", type=float,
                       help="residual bound for solves; for verify, replaces every check bound")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return EXIT_OK if cmd_verify(args.tolerance) else EXIT_VERIFY
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        if args.tolerance is not None:
            if not args.tolerance > 0:
                raise ConfigError("--tolerance must be positive")
            cfg.residual_tol = args.tolerance
        if getattr(args, "workers", 1) < 1:
            raise ConfigError("--workers must be >= 1")
        output = _resolve_output(cfg, args.output)
        if args.command == "steady":
            cmd_steady(cfg, output)
        elif args.command == "sweep":
            cmd_sweep(cfg, output, args.workers)
        elif args.command == "threshold":
            cmd_threshold(cfg, output, args.workers)
        elif args.command == "optimize":
            cmd_optimize(cfg, output)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SteadyStateError, StepSizeTooLarge, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
