"""Small fixed-size linear algebra and two-qubit state helpers.

Basis ordering is ``|00>, |01>, |10>, |11>`` with the first label the cold
qubit. Matrices are plain ``numpy`` complex arrays; vectorization is
column-stacking, so that ``vec(A @ rho @ B) == kron(B.T, A) @ vec(rho)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

INF = math.inf

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# raising operator |1><0|
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
PROJ0 = np.diag([1.0, 0.0]).astype(complex)
PROJ1 = np.diag([0.0, 1.0]).astype(complex)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def ket(label: str) -> np.ndarray:
    """Computational basis ket, e.g. ``ket("01")``."""
    index = int(label, 2)
    v = np.zeros(2 ** len(label), dtype=complex)
    v[index] = 1.0
    return v


def ketbra(a: str, b: str) -> np.ndarray:
    return np.outer(ket(a), ket(b).conj())


def _kron2(a, b):
    # broadcasting is several times faster than np.kron at these sizes
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(
        a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])


def kron(*ops) -> np.ndarray:
    """Kronecker product of any number of matrices, left to right."""
    return reduce(_kron2, [np.atleast_2d(np.asarray(op, dtype=complex)) for op in ops])


def dagger(a) -> np.ndarray:
    return np.asarray(a).conj().T


def allclose(a, b, atol: float) -> bool:
    """Entrywise comparison with an explicit absolute tolerance."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.max(np.abs(a - b), initial=0.0) <= atol)


class DensityMatrix:
    """Validated, immutable two-qubit density matrix.

    The checks are Hermiticity, unit trace and positivity, each with an
    overridable tolerance. ``mat`` is a read-only copy of the input.
    """

    __slots__ = ("_mat",)

    def __init__(self, mat, *, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL,
                 psd_tol=PSD_TOL):
        m = np.array(mat, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix has non-finite entries")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > herm_tol:
            raise ValueError(f"not Hermitian (max deviation {herm_err:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace is {tr:.15g}, expected 1")
        lam_min = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
        if lam_min < -psd_tol:
            raise ValueError(f"not positive semidefinite (min eigenvalue {lam_min:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "_mat", m)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def mat(self) -> np.ndarray:
        return self._mat

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._mat.copy() if copy else self._mat
        return self._mat.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(\n{np.array2string(self._mat, precision=6)})"

    @classmethod
    def from_ket(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    def is_close(self, other, atol: float = 1e-10) -> bool:
        return allclose(self._mat, np.asarray(other), atol)


@dataclass(frozen=True)
class ThermalQubit:
    """Qubit in equilibrium with a bath at ``temperature``.

    ``r`` is the ground-state population ``1 / (1 + exp(-E/T))``.
    """

    r: float
    temperature: float
    energy: float

    @property
    def state(self) -> np.ndarray:
        return np.diag([self.r, 1.0 - self.r]).astype(complex)


def ground_population(E: float, T: float) -> float:
    if E <= 0:
        raise ValueError(f"energy must be positive, got {E}")
    if T < 0 or math.isnan(T):
        raise ValueError(f"temperature must be >= 0, got {T}")
    if T == 0:
        return 1.0
    if math.isinf(T):
        return 0.5
    return 1.0 / (1.0 + math.exp(-E / T))


def thermal_qubit(E: float, T: float) -> ThermalQubit:
    return ThermalQubit(r=ground_population(E, T), temperature=T, energy=E)


def thermal_state(E: float, T: float) -> np.ndarray:
    """``tau = r|0><0| + (1-r)|1><1|`` as a 2x2 array."""
    return thermal_qubit(E, T).state


def _ptrace(m: np.ndarray, subsystem: str) -> np.ndarray:
    t = np.asarray(m).reshape(2, 2, 2, 2)
    if subsystem == "first":
        return np.einsum("ijik->jk", t)
    if subsystem == "second":
        return np.einsum("ijkj->ik", t)
    raise ValueError(f"subsystem must be 'first' or 'second', got {subsystem!r}")


def partial_trace(rho, subsystem: str) -> np.ndarray:
    """Trace out ``subsystem`` ("first" = cold, "second" = hot).

    ``partial_trace(kron(a, b), "second")`` returns ``a``.
    """
    return _ptrace(np.asarray(rho, dtype=complex), subsystem)


def vectorize(m) -> np.ndarray:
    """Column-stacking vectorization of a square matrix."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m.reshape(-1, order="F")


def devectorize(v) -> np.ndarray:
    v = np.asarray(v)
    n = math.isqrt(v.size)
    if v.ndim != 1 or n * n != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape(n, n, order="F")


def eigenvalues(m, hermitian: bool = False) -> np.ndarray:
    """All eigenvalues of a small square matrix, with multiplicity.

    Raises ``numpy.linalg.LinAlgError`` rather than returning non-finite values.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    vals = np.linalg.eigvalsh(m) if hermitian else np.linalg.eigvals(m)
    if not np.all(np.isfinite(vals)):
        raise np.linalg.LinAlgError("eigenvalue computation produced non-finite values")
    return vals


def trace_distance(a, b) -> float:
    d = np.asarray(a) - np.asarray(b)
    return 0.5 * float(np.sum(np.abs(eigenvalues(0.5 * (d + d.conj().T), hermitian=True))))
