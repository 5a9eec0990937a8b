"""Steady states (numerical and closed form) and transient integration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DensityMatrix, devectorize, kron, ketbra, thermal_state, vectorize
from .models import Liouvillian, ResetParams

RESIDUAL_TOL = 1e-10
GAP_TOL = 1e-8

_TRACE_ROW = vectorize(np.eye(4, dtype=complex))


class SteadyStateError(RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NonUniqueSteadyState(SteadyStateError):
    pass


class NoConvergence(SteadyStateError):
    pass


class StepSizeTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class SteadyStateResult:
    state: DensityMatrix
    residual: float
    uniqueness_gap: float
    info: dict = field(default_factory=dict, compare=False)


def _generator(L):
    return L.generator if isinstance(L, Liouvillian) else np.asarray(L, dtype=complex)


def steady_density(A) -> np.ndarray:
    """Unit-trace null vector of ``A`` as a Hermitian 4x4 array, unvalidated.

    Cheap path for objective functions: the ``<0|.|0>`` population equation is
    redundant (the generator annihilates the trace) and is swapped for the
    trace condition. Use ``solve_steady`` for checked results.
    """
    B = np.array(_generator(A), dtype=complex)
    B[0] = _TRACE_ROW
    rhs = np.zeros(B.shape[0], dtype=complex)
    rhs[0] = 1.0
    try:
        v = np.linalg.solve(B, rhs)
    except np.linalg.LinAlgError:
        stacked = np.vstack([_generator(A), _TRACE_ROW[None, :]])
        rhs = np.zeros(stacked.shape[0], dtype=complex)
        rhs[-1] = 1.0
        v = np.linalg.lstsq(stacked, rhs, rcond=None)[0]
    rho = devectorize(v)
    return 0.5 * (rho + rho.conj().T)


def solve_steady(L, *, residual_tol=RESIDUAL_TOL, gap_tol=GAP_TOL, herm_tol=1e-10,
                 psd_tol=1e-8) -> SteadyStateResult:
    """Null vector of the generator, normalized to unit trace.

    Solves ``[L; tr] v = [0; 1]`` by SVD least squares. The second-smallest
    singular value of ``L`` is reported as the uniqueness gap; a gap below
    ``gap_tol`` means a degenerate null space and raises ``NonUniqueSteadyState``.
    """
    A = _generator(L)
    n = A.shape[0]
    stacked = np.vstack([A, _TRACE_ROW[None, :]])
    rhs = np.zeros(n + 1, dtype=complex)
    rhs[-1] = 1.0
    try:
        v, _, rank, _ = np.linalg.lstsq(stacked, rhs, rcond=None)
        sv = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"linear solve failed: {exc}") from exc
    gap = float(sv[-2])
    diag = {"rank": int(rank), "singular_values": sv}
    if gap < gap_tol:
        raise NonUniqueSteadyState(
            f"null space is degenerate (second-smallest singular value {gap:.3e})", diag)
    rho = devectorize(v)
    herm_err = float(np.max(np.abs(rho - rho.conj().T)))
    if not np.isfinite(herm_err) or herm_err > herm_tol:
        raise NoConvergence(f"steady state not Hermitian (deviation {herm_err:.3e})", diag)
    rho = 0.5 * (rho + rho.conj().T)
    residual = float(np.linalg.norm(A @ vectorize(rho)))
    diag["hermiticity_error"] = herm_err
    if residual > residual_tol:
        raise NoConvergence(f"residual {residual:.3e} exceeds {residual_tol:.1e}", diag)
    try:
        state = DensityMatrix(rho, herm_tol=herm_tol, trace_tol=1e-10, psd_tol=psd_tol)
    except ValueError as exc:
        raise NoConvergence(f"steady state is not a valid density matrix: {exc}", diag) from exc
    return SteadyStateResult(state, residual, gap, diag)


# i|01><10| - i|10><01|
Y_COHERENCE = 1j * ketbra("01", "10") - 1j * ketbra("10", "01")


def analytic_reset_steady(p: ResetParams) -> DensityMatrix:
    """Closed-form steady state of the reset model."""
    tau_c = thermal_state(p.E, p.T_c)
    tau_h = thermal_state(p.E, p.T_h)
    r_c, r_h = tau_c[0, 0].real, tau_h[0, 0].real
    pc, ph, g = p.p_c, p.p_h, p.g
    gamma = 1.0 / (2 * g**2 + pc * ph)
    mix = (pc * tau_c + ph * tau_h)
    rho = gamma * (
        pc * ph * kron(tau_c, tau_h)
        + 2 * g**2 / (pc + ph) ** 2 * kron(mix, mix)
        + g * pc * ph * (r_c - r_h) / (pc + ph) * Y_COHERENCE
    )
    return DensityMatrix(rho)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: list

    def __len__(self):
        return len(self.states)

    @property
    def final(self) -> DensityMatrix:
        return self.states[-1]


def rk4_propagator(A: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for ``dv/dt = A v``, written as a matrix."""
    hA = h * A
    eye = np.eye(A.shape[0], dtype=complex)
    return eye + hA @ (eye + hA @ (eye / 2 + hA @ (eye / 6 + hA / 24)))


def evolve(rho0, L, t_final: float, dt: float, *, every: int = 1,
           drift_tol: float = 1e-8) -> Trajectory:
    """Fixed-step RK4 integration of ``d vec(rho)/dt = L vec(rho)``.

    The step is ``t_final / ceil(t_final / dt)`` (never larger than ``dt``).
    No renormalization is applied: trace or Hermiticity drift beyond
    ``drift_tol``, or growth of the purity above 1, raises ``StepSizeTooLarge``.
    Every ``every``-th state is kept, plus the final one.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_final >= 0:
        raise ValueError(f"t_final must be >= 0, got {t_final}")
    A = _generator(L)
    nsteps = max(1, math.ceil(t_final / dt - 1e-12)) if t_final > 0 else 0
    h = t_final / nsteps if nsteps else 0.0
    M = rk4_propagator(A, h)
    radius = np.max(np.abs(np.linalg.eigvals(M)))
    if radius > 1 + 1e-12:
        raise StepSizeTooLarge(f"RK4 step {h:.3g} is unstable (spectral radius {radius:.6f})")

    def snapshot(v):
        return DensityMatrix(devectorize(v), herm_tol=drift_tol, trace_tol=drift_tol,
                             psd_tol=drift_tol)

    v = vectorize(np.asarray(rho0, dtype=complex)).copy()
    times = [0.0]
    states = [snapshot(v)]
    idx = np.arange(4) * 5
    for step in range(1, nsteps + 1):
        v = M @ v
        tr_err = abs(v[idx].sum() - 1.0)
        rho = devectorize(v)
        herm_err = np.max(np.abs(rho - rho.conj().T))
        purity = np.vdot(v, v).real
        if tr_err > drift_tol or herm_err > drift_tol or purity > 1 + drift_tol:
            raise StepSizeTooLarge(
                f"drift at t={step * h:.6g}: trace {tr_err:.2e}, hermiticity {herm_err:.2e}, "
                f"purity {purity:.6f}")
        if step % every == 0 or step == nsteps:
            times.append(step * h)
            states.append(snapshot(v))
    return Trajectory(np.array(times), states)
