"""Built-in oracle checks, shared by ``thermoent verify`` and the test suite."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytics import concurrence, concurrence_closed_form, heat_current
from .core import devectorize, vectorize
from .models import (
    DotParams, FluxParams, ResetParams, build_liouvillian, dot_rates, flux_rates,
)
from .steady import analytic_reset_steady, solve_steady

SEED = 20150601
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    samples: int

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name:<28} worst={self.worst:.3e}  "
                f"tol={self.tolerance:.1e}  n={self.samples}")


def random_reset_params(rng, n, lo=1e-4, hi=1e-2):
    """Log-uniform couplings in ``[lo, hi]``; temperatures in [0, 2] with some 0 and inf."""
    out = []
    for _ in range(n):
        g, pc, ph = 10 ** rng.uniform(math.log10(lo), math.log10(hi), 3)
        T_c, T_h = _temperatures(rng, allow_inf=True)
        out.append(ResetParams(g, pc, ph, T_c, T_h))
    return out


def _temperatures(rng, allow_inf):
    T = rng.uniform(0.0, 2.0, 2)
    u = rng.uniform()
    if u < 0.05:
        T[0] = 0.0
    elif allow_inf and u > 0.95:
        T[1] = math.inf
    return float(min(T)), float(max(T))


def random_lindblad_params(rng, kind, n, equilibrium=False):
    out = []
    for _ in range(n):
        g, gc, gh = 10 ** rng.uniform(-4, -2, 3)
        T_c, T_h = _temperatures(rng, allow_inf=False)
        if T_c == 0.0:
            T_c = 0.05
        if equilibrium:
            T_h = T_c
        if kind == "flux":
            out.append(FluxParams(g, gc, gh, T_c, T_h))
        else:
            out.append(DotParams(g, gc, gh, T_c, T_h, U=float(rng.choice([0.0, 20.0, 300.0]))))
    return out


def check_steady_oracle(n=200, tol=1e-10, rng=None):
    rng = rng or np.random.default_rng(SEED)
    worst = 0.0
    for p in random_reset_params(rng, n):
        num = solve_steady(build_liouvillian(p)).state.mat
        worst = max(worst, float(np.max(np.abs(num - analytic_reset_steady(p).mat))))
    return CheckResult("steady state vs closed form", worst <= tol, worst, tol, n)


def check_closed_form_concurrence(n=200, tol=1e-10, rng=None):
    rng = rng or np.random.default_rng(SEED + 1)
    worst = 0.0
    for p in random_reset_params(rng, n):
        err = abs(concurrence(analytic_reset_steady(p)).value - concurrence_closed_form(p).value)
        worst = max(worst, err)
    return CheckResult("closed-form concurrence", worst <= tol, worst, tol, n)


def check_detailed_balance(n=100, tol=1e-12, rng=None):
    rng = rng or np.random.default_rng(SEED + 2)
    worst = 0.0
    count = 0
    for kind in ("flux", "dot"):
        for p in random_lindblad_params(rng, kind, n):
            jumps = flux_rates(p) if kind == "flux" else dot_rates(p)
            energies = (p.E, p.E, p.E, p.E) if kind == "flux" else (p.E, p.E, p.E + p.U, p.E + p.U)
            temps = (p.T_h, p.T_c, p.T_h, p.T_c)
            for i in range(4):
                up, down = jumps[i].rate, jumps[i + 4].rate
                target = math.exp(-energies[i] / temps[i])
                if min(up, target) < _TINY:
                    # subnormal range: no relative precision left, compare absolutely
                    err = abs(up / down - target)
                else:
                    err = abs(up / down / target - 1.0)
                worst = max(worst, err)
                count += 1
    return CheckResult("detailed balance", worst <= tol, worst, tol, count)


def check_equilibrium_separability(n=100, tol=1e-8, rng=None):
    rng = rng or np.random.default_rng(SEED + 3)
    params = [ResetParams(p.g, p.p_c, p.p_h, p.T_c, p.T_c)
              for p in random_reset_params(rng, n)]
    params += random_lindblad_params(rng, "flux", n, equilibrium=True)
    params += random_lindblad_params(rng, "dot", n, equilibrium=True)
    worst = 0.0
    for p in params:
        worst = max(worst, concurrence(solve_steady(build_liouvillian(p)).state).value)
    return CheckResult("equilibrium separability", worst <= tol, worst, tol, len(params))


def check_trace_preservation(n=50, tol=1e-12, rng=None):
    rng = rng or np.random.default_rng(SEED + 4)
    params = random_reset_params(rng, n) + random_lindblad_params(rng, "flux", n) \
        + random_lindblad_params(rng, "dot", n)
    worst = 0.0
    for p in params:
        L = build_liouvillian(p)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        out = devectorize(L.generator @ vectorize(rho))
        worst = max(worst, abs(np.trace(out)), float(np.max(np.abs(out - out.conj().T))))
    return CheckResult("trace and hermiticity", worst <= tol, worst, tol, len(params))


def check_energy_balance(n=200, tol=1e-10, rng=None):
    rng = rng or np.random.default_rng(SEED + 5)
    worst = 0.0
    for p in random_reset_params(rng, n):
        rho = solve_steady(build_liouvillian(p)).state
        worst = max(worst, abs(heat_current(rho, p, "cold") + heat_current(rho, p, "hot")))
    return CheckResult("reset energy balance", worst <= tol, worst, tol, n)


CHECKS = (
    check_steady_oracle,
    check_closed_form_concurrence,
    check_detailed_balance,
    check_equilibrium_separability,
    check_trace_preservation,
    check_energy_balance,
)


def run_verification(tolerance=None):
    """Run every check; ``tolerance`` replaces each check's own bound."""
    kw = {} if tolerance is None else {"tol": tolerance}
    return [check(**kw) for check in CHECKS]
