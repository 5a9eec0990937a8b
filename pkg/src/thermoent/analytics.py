"""Concurrence, purity and heat currents of two-qubit states."""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, field, fields

import numpy as np

from .core import SIGMA_Y, kron, partial_trace, thermal_state
from .models import BATHS, Liouvillian, ResetParams, build_h0, build_liouvillian
from .steady import solve_steady

YY = kron(SIGMA_Y, SIGMA_Y)
X_STATE_TOL = 1e-10


@dataclass(frozen=True)
class ConcurrenceBreakdown:
    value: float
    raw: float
    method: str
    components: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return self.value


def spin_flip(rho) -> np.ndarray:
    """``(sy x sy) rho* (sy x sy)``."""
    rho = np.asarray(rho, dtype=complex)
    return YY @ rho.conj() @ YY


def _factor(rho):
    """``A`` with ``rho = A A^+``.

    Cholesky keeps relative accuracy on the tiny populations of graded states;
    rank-deficient input falls back to the eigen-decomposition square root.
    """
    try:
        return np.linalg.cholesky(rho)
    except np.linalg.LinAlgError:
        w, V = np.linalg.eigh(rho)
        return V * np.sqrt(np.clip(w, 0.0, None))


def wootters_lambdas(rho) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho @ spin_flip(rho)``, descending.

    With ``rho = A A^+`` these are the singular values of ``A^T (sy x sy) A``,
    which avoids squaring and then square-rooting small values.
    """
    rho = np.asarray(rho, dtype=complex)
    A = _factor(0.5 * (rho + rho.conj().T))
    lam = np.linalg.svd(A.T @ YY @ A, compute_uv=False)
    if not np.all(np.isfinite(lam)):
        raise np.linalg.LinAlgError("non-finite singular values in concurrence")
    return lam


def is_x_state(rho, tol: float = X_STATE_TOL) -> bool:
    m = np.abs(np.asarray(rho))
    mask = np.ones((4, 4), dtype=bool)
    mask[np.diag_indices(4)] = False
    for i, j in ((0, 3), (3, 0), (1, 2), (2, 1)):
        mask[i, j] = False
    return bool(np.all(m[mask] <= tol))


def x_state_concurrence(rho, tol: float = X_STATE_TOL) -> ConcurrenceBreakdown:
    rho = np.asarray(rho, dtype=complex)
    if not is_x_state(rho, tol):
        raise ValueError("state is not an X-state; use the general concurrence")
    d = rho.diagonal().real.clip(0.0)
    a = abs(rho[1, 2]) - math.sqrt(d[0] * d[3])
    b = abs(rho[0, 3]) - math.sqrt(d[1] * d[2])
    raw = 2 * max(a, b)
    return ConcurrenceBreakdown(max(0.0, raw), raw, "x-state")


def concurrence(rho, fast: bool = False) -> ConcurrenceBreakdown:
    """Wootters concurrence.

    With ``fast=True`` the X-state formula is used when the sparsity pattern
    allows it; otherwise the general route is taken.
    """
    if fast and is_x_state(rho):
        return x_state_concurrence(rho)
    lam = wootters_lambdas(rho)
    raw = float(lam[0] - lam[1:].sum())
    return ConcurrenceBreakdown(min(1.0, max(0.0, raw)), raw, "general-wootters",
                                {"lambdas": lam})


def concurrence_closed_form(p: ResetParams) -> ConcurrenceBreakdown:
    """Concurrence of the reset-model steady state straight from its parameters.

    ``f`` is the ``|01>,|10>`` coherence magnitude and ``h`` the ``|00>``
    population, so this is the X-state formula ``2 (f - sqrt(h h'))``.
    """
    r_c = thermal_state(p.E, p.T_c)[0, 0].real
    r_h = thermal_state(p.E, p.T_h)[0, 0].real
    pc, ph, g = p.p_c, p.p_h, p.g
    gamma = 1.0 / (2 * g**2 + pc * ph)

    def h(a, b):
        return gamma * (pc * ph * a * b + 2 * g**2 * ((pc * a + ph * b) / (pc + ph)) ** 2)

    f = gamma * g * pc * ph / (pc + ph) * abs(r_c - r_h)
    h1 = h(r_c, r_h)
    h2 = h(1 - r_c, 1 - r_h)
    raw = 2.0 * (f - math.sqrt(h1 * h2))
    return ConcurrenceBreakdown(max(0.0, raw), raw, "closed-form-eq6",
                                {"f": f, "h": h1, "h_complement": h2})


def purity(rho) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.vdot(rho.conj().T, rho)))


def _check_bath(bath):
    if bath not in BATHS:
        raise ValueError(f"bath must be one of {BATHS}, got {bath!r}")


def heat_current_from_generator(rho, L: Liouvillian, bath: str, E: float) -> float:
    """``-Tr(H0 D_k(rho))``: energy per unit time leaving the qubits into ``bath``."""
    _check_bath(bath)
    return -float(np.trace(build_h0(E) @ L.apply_bath(rho, bath)).real)


def heat_current(rho, params, bath: str, liouvillian: Liouvillian | None = None) -> float:
    """Heat flowing from qubit ``bath`` into its reservoir (positive = out of the qubit).

    Reset model: ``p_k E <1|(rho_k - tau_k)|1>``. Lindblad models: computed
    from the bath's dissipator and the free Hamiltonian.
    """
    _check_bath(bath)
    if isinstance(params, ResetParams):
        if bath == "cold":
            reduced = partial_trace(rho, "second")
            rate, T = params.p_c, params.T_c
        else:
            reduced = partial_trace(rho, "first")
            rate, T = params.p_h, params.T_h
        tau = thermal_state(params.E, T)
        return float(rate * params.E * (reduced[1, 1] - tau[1, 1]).real)
    L = liouvillian if liouvillian is not None else build_liouvillian(params)
    return heat_current_from_generator(rho, L, bath, params.E)


@dataclass(frozen=True)
class SweepRecord:
    model: str
    E: float
    g: float
    rate_c: float
    rate_h: float
    T_c: float
    T_h: float
    U: float
    concurrence: float
    purity: float
    Q_c: float
    Q_h: float
    residual: float
    uniqueness_gap: float

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def as_tuple(self):
        return astuple(self)


def steady_report(params, **solver_kw) -> SweepRecord:
    """Solve the steady state of ``params`` and collect the figures of merit."""
    L = build_liouvillian(params)
    res = solve_steady(L, **solver_kw)
    rho = res.state
    g, rate_c, rate_h = params.couplings
    return SweepRecord(
        model=params.kind,
        E=params.E,
        g=g,
        rate_c=rate_c,
        rate_h=rate_h,
        T_c=params.T_c,
        T_h=params.T_h,
        U=getattr(params, "U", 0.0),
        concurrence=concurrence(rho).value,
        purity=purity(rho),
        Q_c=heat_current(rho, params, "cold", L),
        Q_h=heat_current(rho, params, "hot", L),
        residual=res.residual,
        uniqueness_gap=res.uniqueness_gap,
    )
