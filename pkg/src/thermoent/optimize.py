"""Maximizing steady-state concurrence and locating entanglement thresholds.

The objective is the raw Wootters quantity ``lambda1 - lambda2 - lambda3 -
lambda4`` (the concurrence before clipping at zero). It has the same maximizer
wherever the concurrence is positive, but stays informative on the regions
where the clipped value is flat at zero.

Search strategy: a log-spaced grid over the free parameters, then Nelder-Mead
in log10 coordinates started from the best grid point. Everything is
deterministic.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .analytics import concurrence
from .models import COUPLING_NAMES, PARAM_TYPES, build_liouvillian, make_params
from .steady import solve_steady, steady_density

DETECTION_THRESHOLD = 1e-6
COUPLING_BOUNDS = (1e-6, 1e-2)
DEFAULT_GRID_POINTS = 8
T_H_CAP = 1e6


@dataclass(frozen=True)
class OptimizationProblem:
    """Concurrence maximization over a box of (log-scaled) free parameters.

    ``fixed`` holds every model field that is not optimized; ``free`` maps
    parameter names to ``(lower, upper)`` bounds, both positive.
    """

    kind: str
    fixed: dict
    free: dict
    grid_points: int = DEFAULT_GRID_POINTS
    rel_tol: float = 1e-4
    max_evals: int = 10_000
    starts: int = 1

    def __post_init__(self):
        if self.kind not in PARAM_TYPES:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if not self.free:
            raise ValueError("at least one free parameter is required")
        overlap = set(self.fixed) & set(self.free)
        if overlap:
            raise ValueError(f"parameters both fixed and free: {sorted(overlap)}")
        for name, (lo, hi) in self.free.items():
            if not 0 < lo <= hi:
                raise ValueError(f"bounds for {name} must satisfy 0 < lower <= upper, "
                                 f"got ({lo}, {hi})")
        if self.grid_points < 1:
            raise ValueError("grid_points must be >= 1")
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        # fail early on missing or unknown names
        self.params_at({k: lo for k, (lo, _) in self.free.items()})

    @classmethod
    def couplings(cls, kind, T_c, T_h, *, U=None, E=1.0, bounds=COUPLING_BOUNDS, **kw):
        """Optimize ``g`` and both bath rates at fixed temperatures."""
        fixed = {"E": E, "T_c": T_c, "T_h": T_h}
        if kind == "dot":
            fixed["U"] = 0.0 if U is None else U
        free = {name: tuple(bounds) for name in COUPLING_NAMES[kind]}
        return cls(kind, fixed, free, **kw)

    @property
    def names(self):
        return tuple(self.free)

    def params_at(self, values):
        return make_params(self.kind, **self.fixed, **dict(values))

    def log_bounds(self):
        lo = np.log10([b[0] for b in self.free.values()])
        hi = np.log10([b[1] for b in self.free.values()])
        return lo, hi


@dataclass
class OptimizationResult:
    best_value: float
    best_point: dict
    best_raw: float
    evaluations: int
    all_grid_zero: bool
    problem: OptimizationProblem = field(repr=False)
    trace: list | None = field(default=None, repr=False)

    @property
    def entangled(self) -> bool:
        return self.best_value > DETECTION_THRESHOLD

    @property
    def params(self):
        return self.problem.params_at(self.best_point)


def raw_concurrence(params) -> float:
    """Unclipped concurrence of the steady state of ``params``."""
    rho = steady_density(build_liouvillian(params))
    return concurrence(rho, fast=True).raw


class _Objective:
    def __init__(self, problem, keep_trace):
        self.problem = problem
        self.names = problem.names
        self.lo, self.hi = problem.log_bounds()
        self.calls = 0
        self.trace = [] if keep_trace else None

    def __call__(self, y):
        y = np.clip(y, self.lo, self.hi)
        point = dict(zip(self.names, 10.0 ** y))
        self.calls += 1
        value = raw_concurrence(self.problem.params_at(point))
        if self.trace is not None:
            self.trace.append((point, value))
        return value


def _grid(lo, hi, n):
    if n == 1 or lo == hi:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, n)


def _initial_simplex(y0, lo, hi, steps):
    pts = [y0]
    for i, step in enumerate(steps):
        y = y0.copy()
        # step toward the interior
        y[i] = y0[i] + step if y0[i] + step <= hi[i] else y0[i] - step
        pts.append(y)
    return np.array(pts)


def maximize_concurrence(problem: OptimizationProblem, keep_trace: bool = False) -> OptimizationResult:
    """Grid scan followed by Nelder-Mead refinement from the best grid point.

    Refinement stops when the simplex diameter drops below ``rel_tol``
    (relative, i.e. in log coordinates) or after ``max_evals`` evaluations.
    Because the steady state only depends on ratios of ``g`` and the rates,
    the final couplings are pushed up to their upper bounds when that leaves
    the objective unchanged, which picks the fastest-relaxing representative.
    """
    obj = _Objective(problem, keep_trace)
    lo, hi = obj.lo, obj.hi
    axes = [_grid(l, h, problem.grid_points) for l, h in zip(lo, hi)]
    grid_y = [np.array(y) for y in itertools.product(*axes)]
    grid_v = np.array([obj(y) for y in grid_y])
    # stable sort: ties keep lexicographic grid order
    order = np.argsort(-grid_v, kind="stable")
    best_y, best_v = grid_y[order[0]], grid_v[order[0]]
    all_grid_zero = best_v <= 0.0

    if np.any(hi > lo):
        spacing = np.array([(a[1] - a[0]) if len(a) > 1 else 0.1 for a in axes])
        steps = np.where(hi > lo, np.maximum(0.5 * spacing, 1e-3), 0.0)
        for k in order[:problem.starts]:
            budget = problem.max_evals - obj.calls
            if budget <= 0:
                break
            y0 = grid_y[k]
            res = minimize(
                lambda y: -obj(y), y0, method="Nelder-Mead",
                bounds=list(zip(lo, hi)),
                options={
                    "initial_simplex": _initial_simplex(y0, lo, hi, steps),
                    "xatol": math.log10(1 + problem.rel_tol),
                    "fatol": math.inf,
                    "maxfev": budget,
                },
            )
            if -res.fun > best_v:
                best_y, best_v = np.clip(res.x, lo, hi), -res.fun

    coupling = [i for i, n in enumerate(obj.names) if n in COUPLING_NAMES[problem.kind]]
    if len(coupling) == 3:
        shift = min(hi[i] - best_y[i] for i in coupling)
        if shift > 0:
            y = best_y.copy()
            y[coupling] += shift
            v = obj(y)
            if v >= best_v - 1e-12:
                best_y, best_v = y, v

    point = {n: float(x) for n, x in zip(obj.names, 10.0 ** np.clip(best_y, lo, hi))}
    # report through the checked solver so steady_report reproduces the value
    raw = concurrence(solve_steady(build_liouvillian(problem.params_at(point))).state).raw
    return OptimizationResult(
        best_value=max(0.0, float(raw)),
        best_point=point,
        best_raw=float(raw),
        evaluations=obj.calls,
        all_grid_zero=all_grid_zero,
        problem=problem,
        trace=obj.trace,
    )


def _hot_offsets(T_c, cap, points, E):
    # probes T_h = T_c + d with d log-spaced, dense just above T_c
    lo = 1e-2 * max(T_c, E)
    return np.logspace(math.log10(lo), math.log10(max(cap - T_c, 10 * lo)), points)


def maximize_over_hot_temperature(kind, T_c, *, U=None, E=1.0, T_h_cap=T_H_CAP,
                                  points=12, bounds=COUPLING_BOUNDS, grid_points=DEFAULT_GRID_POINTS,
                                  T_h_values=None) -> OptimizationResult:
    """Best concurrence over couplings and the hot temperature ``T_h > T_c``.

    Each candidate ``T_h`` gets a coupling optimization; the best one is then
    polished with ``T_h`` released as a free parameter between its neighbours.
    """
    if T_h_values is None:
        T_h_values = T_c + _hot_offsets(T_c, T_h_cap, points, E)
    T_h_values = np.asarray(sorted(T_h_values), dtype=float)
    results = [
        maximize_concurrence(OptimizationProblem.couplings(
            kind, T_c, float(T_h), U=U, E=E, bounds=bounds, grid_points=grid_points))
        for T_h in T_h_values
    ]
    raws = [r.best_raw for r in results]
    j = int(np.argmax(raws))
    best = results[j]
    lo_T = T_h_values[j - 1] if j > 0 else T_h_values[j]
    hi_T = T_h_values[j + 1] if j + 1 < len(T_h_values) else T_h_values[j]
    if hi_T > lo_T:
        fixed = {"E": E, "T_c": T_c}
        if kind == "dot":
            fixed["U"] = 0.0 if U is None else U
        free = {name: tuple(bounds) for name in COUPLING_NAMES[kind]}
        free["T_h"] = (float(lo_T), float(hi_T))
        polished = maximize_concurrence(OptimizationProblem(kind, fixed, free, grid_points=3))
        if polished.best_raw > best.best_raw:
            best = polished
    return best


def threshold_hot_temperature(kind, T_c, *, U=None, E=1.0, T_h_cap=T_H_CAP, tol=1e-3,
                              detect=DETECTION_THRESHOLD, bounds=COUPLING_BOUNDS,
                              grid_points=DEFAULT_GRID_POINTS, probes=24):
    """Smallest ``T_h`` at which optimized concurrence exceeds ``detect``.

    Returns ``None`` when no ``T_h`` up to ``T_h_cap`` gives entanglement. The
    entangled set need not extend to ``T_h_cap`` (the dot model peaks at finite
    ``T_h``), so probes run upward from ``T_c`` and the first entangled probe
    is bisected against its predecessor to within ``tol``.
    """
    if not T_c >= 0:
        raise ValueError(f"T_c must be >= 0, got {T_c}")

    def entangled(T_h):
        prob = OptimizationProblem.couplings(kind, T_c, T_h, U=U, E=E, bounds=bounds,
                                             grid_points=grid_points)
        return maximize_concurrence(prob).best_value > detect

    offsets = np.logspace(math.log10(tol), math.log10(max(T_h_cap - T_c, 10 * tol)), probes)
    prev = T_c
    for d in offsets:
        T_h = T_c + float(d)
        if entangled(T_h):
            lo, hi = prev, T_h
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if entangled(mid):
                    hi = mid
                else:
                    lo = mid
            return hi
        prev = T_h
    return None


def critical_cold_temperature(kind, U=None, *, E=1.0, tol=5e-3, detect=DETECTION_THRESHOLD,
                              T_h_cap=T_H_CAP, bounds=COUPLING_BOUNDS, start=0.5,
                              T_c_max=1e4):
    """Largest ``T_c`` for which some ``T_h`` and couplings give entanglement.

    The bracket is grown by doubling from ``start`` and then bisected to ``tol``.
    """
    def entangled(T_c):
        best = maximize_over_hot_temperature(kind, T_c, U=U, E=E, T_h_cap=T_h_cap,
                                             bounds=bounds)
        return best.best_value > detect

    if not entangled(0.0):
        return 0.0
    lo, hi = 0.0, start * E
    while entangled(hi):
        lo, hi = hi, 2 * hi
        if hi > T_c_max:
            return math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if entangled(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
