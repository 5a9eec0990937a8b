"""Hamiltonians, jump terms and Liouvillians for the three bath models.

* ``reset``: each qubit is replaced by its bath's thermal state at rate ``p_k``.
* ``flux``: Lindblad dissipation with Bose-Einstein rates (flux qubits).
* ``dot``: Lindblad dissipation with Fermi-Dirac rates plus an inter-dot
  Coulomb energy ``U`` on ``|11>`` (double quantum dot).

Generators act on column-stacked density matrices.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import (
    I2, I4, PROJ0, PROJ1, SIGMA_PLUS, _ptrace, dagger, devectorize, ketbra, kron,
    thermal_state, vectorize,
)

PERTURBATIVE_LIMIT = 1e-2
BATHS = ("cold", "hot")


def _check_common(E, g, rates, T_c, T_h):
    if not E > 0:
        raise ValueError(f"E must be positive, got {E}")
    if g < 0 or math.isnan(g):
        raise ValueError(f"g must be >= 0, got {g}")
    for name, value in rates.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    for name, T in (("T_c", T_c), ("T_h", T_h)):
        if not T >= 0:
            raise ValueError(f"{name} must be >= 0, got {T}")


@dataclass(frozen=True)
class ResetParams:
    g: float
    p_c: float
    p_h: float
    T_c: float
    T_h: float
    E: float = 1.0

    kind = "reset"

    def __post_init__(self):
        _check_common(self.E, self.g, {"p_c": self.p_c, "p_h": self.p_h}, self.T_c, self.T_h)

    @property
    def couplings(self):
        return (self.g, self.p_c, self.p_h)

    @property
    def perturbative(self) -> bool:
        """True inside the regime g, p_c, p_h <= 1e-2 E."""
        return max(self.couplings) <= PERTURBATIVE_LIMIT * self.E


@dataclass(frozen=True)
class FluxParams:
    g: float
    gamma_c: float
    gamma_h: float
    T_c: float
    T_h: float
    E: float = 1.0

    kind = "flux"

    def __post_init__(self):
        _check_common(self.E, self.g, {"gamma_c": self.gamma_c, "gamma_h": self.gamma_h},
                      self.T_c, self.T_h)

    @property
    def couplings(self):
        return (self.g, self.gamma_c, self.gamma_h)

    @property
    def perturbative(self) -> bool:
        return max(self.couplings) <= PERTURBATIVE_LIMIT * self.E


@dataclass(frozen=True)
class DotParams:
    g: float
    gamma_c: float
    gamma_h: float
    T_c: float
    T_h: float
    U: float = 0.0
    E: float = 1.0

    kind = "dot"

    def __post_init__(self):
        _check_common(self.E, self.g, {"gamma_c": self.gamma_c, "gamma_h": self.gamma_h},
                      self.T_c, self.T_h)
        if not self.U >= 0:
            raise ValueError(f"U must be >= 0, got {self.U}")

    @property
    def couplings(self):
        return (self.g, self.gamma_c, self.gamma_h)

    @property
    def perturbative(self) -> bool:
        return max(self.couplings) <= PERTURBATIVE_LIMIT * self.E


PARAM_TYPES = {"reset": ResetParams, "flux": FluxParams, "dot": DotParams}
# names of the (g, cold rate, hot rate) coupling triple per model
COUPLING_NAMES = {
    "reset": ("g", "p_c", "p_h"),
    "flux": ("g", "gamma_c", "gamma_h"),
    "dot": ("g", "gamma_c", "gamma_h"),
}


def make_params(kind: str, **values):
    try:
        cls = PARAM_TYPES[kind]
    except KeyError:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {sorted(PARAM_TYPES)}")
    return cls(**values)


def replace(params, **changes):
    return dataclasses.replace(params, **changes)


@dataclass(frozen=True)
class JumpTerm:
    operator: np.ndarray
    rate: float
    bath: str = "cold"

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError(f"jump rate must be >= 0, got {self.rate}")
        if self.bath not in BATHS:
            raise ValueError(f"bath must be one of {BATHS}, got {self.bath!r}")


@dataclass(frozen=True)
class Liouvillian:
    """16x16 generator plus the per-bath dissipative pieces.

    ``bath_split[k]`` is the part of ``generator`` due to bath ``k`` alone,
    which is what the heat currents are computed from.
    """

    generator: np.ndarray
    model_tag: str
    bath_split: dict = field(default_factory=dict)

    def __post_init__(self):
        self.generator.setflags(write=False)
        for m in self.bath_split.values():
            m.setflags(write=False)

    def apply(self, rho) -> np.ndarray:
        return devectorize(self.generator @ vectorize(np.asarray(rho, dtype=complex)))

    def apply_bath(self, rho, bath: str) -> np.ndarray:
        if bath not in self.bath_split:
            raise ValueError(f"unknown bath {bath!r}; expected one of {BATHS}")
        return devectorize(self.bath_split[bath] @ vectorize(np.asarray(rho, dtype=complex)))


# -- Hamiltonians -----------------------------------------------------------

def build_h0(E: float) -> np.ndarray:
    """Free Hamiltonian ``E(|1><1| x 1 + 1 x |1><1|)`` = diag(0, E, E, 2E)."""
    if not E > 0:
        raise ValueError(f"E must be positive, got {E}")
    return E * (kron(PROJ1, I2) + kron(I2, PROJ1))


def build_hint(g: float) -> np.ndarray:
    """Energy-conserving exchange ``g(|10><01| + |01><10|)``."""
    return g * (ketbra("10", "01") + ketbra("01", "10"))


def build_hdot(E: float, g: float, U: float) -> np.ndarray:
    if not U >= 0:
        raise ValueError(f"U must be >= 0, got {U}")
    return build_h0(E) + build_hint(g) + U * ketbra("11", "11")


# -- superoperators (column stacking) ---------------------------------------

def spre(a) -> np.ndarray:
    """Left multiplication ``rho -> a rho``."""
    return kron(I4, a)


def spost(b) -> np.ndarray:
    """Right multiplication ``rho -> rho b``."""
    return kron(np.asarray(b).T, I4)


def commutator_generator(H) -> np.ndarray:
    """Generator of ``d rho/dt = i[rho, H]``."""
    return 1j * (spost(H) - spre(H))


def dissipator(J, rate: float = 1.0) -> np.ndarray:
    """``rate * (J rho J^+ - {J^+ J, rho}/2)`` as a matrix."""
    J = np.asarray(J, dtype=complex)
    JdJ = dagger(J) @ J
    return rate * (kron(J.conj(), J) - 0.5 * spre(JdJ) - 0.5 * spost(JdJ))


@lru_cache(maxsize=128)
def _cached_dissipator(key: bytes) -> np.ndarray:
    D = dissipator(np.frombuffer(key, dtype=complex).reshape(4, 4))
    D.setflags(write=False)
    return D


def superoperator(fn, dim: int = 4) -> np.ndarray:
    """Matrix of a linear map on ``dim x dim`` matrices, built column by column."""
    cols = []
    for k in range(dim * dim):
        e = np.zeros(dim * dim, dtype=complex)
        e[k] = 1.0
        cols.append(vectorize(fn(devectorize(e))))
    return np.array(cols).T


_COMM_H0 = commutator_generator(build_h0(1.0))
_COMM_HINT = commutator_generator(build_hint(1.0))
_COMM_U = commutator_generator(ketbra("11", "11"))


def _hamiltonian_generator(E, g, U=0.0) -> np.ndarray:
    # i[rho, H] is linear in (E, g, U)
    out = E * _COMM_H0 + g * _COMM_HINT
    if U:
        out = out + U * _COMM_U
    return out


# -- reset model ------------------------------------------------------------

@lru_cache(maxsize=None)
def _reset_map(bath: str, level: int) -> np.ndarray:
    # reset channel onto the pure level |level><level|; thermal maps are mixtures
    proj = (PROJ0, PROJ1)[level]
    if bath == "cold":
        M = superoperator(lambda m: kron(proj, _ptrace(m, "first")))
    else:
        M = superoperator(lambda m: kron(_ptrace(m, "second"), proj))
    M.setflags(write=False)
    return M


def reset_maps(p: ResetParams):
    """Superoperators of the two reset channels.

    ``Phi_c(rho) = tau_c x Tr_c(rho)`` and ``Phi_h(rho) = Tr_h(rho) x tau_h``.
    """
    r_c = thermal_state(p.E, p.T_c)[0, 0].real
    r_h = thermal_state(p.E, p.T_h)[0, 0].real
    phi_c = r_c * _reset_map("cold", 0) + (1 - r_c) * _reset_map("cold", 1)
    phi_h = r_h * _reset_map("hot", 0) + (1 - r_h) * _reset_map("hot", 1)
    return phi_c, phi_h


def reset_liouvillian(p: ResetParams) -> Liouvillian:
    phi_c, phi_h = reset_maps(p)
    eye = np.eye(16, dtype=complex)
    cold = p.p_c * (phi_c - eye)
    hot = p.p_h * (phi_h - eye)
    gen = _hamiltonian_generator(p.E, p.g) + cold + hot
    return Liouvillian(gen, "reset", {"cold": cold, "hot": hot})


# -- Lindblad models --------------------------------------------------------

def bose_einstein(E: float, T: float):
    """Return ``(n_B, 1 + n_B)`` for transition energy ``E`` at temperature ``T``."""
    if T == 0:
        return 0.0, 1.0
    if math.isinf(T):
        raise ValueError("Bose-Einstein occupation diverges at infinite temperature; "
                         "use a large finite T")
    x = E / T
    # 1/(e^x - 1) without overflow for large x
    q = math.exp(-x)
    n = q / -math.expm1(-x)
    return n, 1.0 / -math.expm1(-x)


def fermi_dirac(E: float, T: float):
    """Return ``(n_F, 1 - n_F)``; both bounded, ``T = inf`` gives 1/2."""
    if T == 0:
        return 0.0, 1.0
    if math.isinf(T):
        return 0.5, 0.5
    q = math.exp(-E / T)
    return q / (1.0 + q), 1.0 / (1.0 + q)


# four conditional raising processes; the conjugates lower
JUMP_OPERATORS = (
    kron(PROJ0, SIGMA_PLUS),  # hot qubit excited, cold empty
    kron(SIGMA_PLUS, PROJ0),  # cold qubit excited, hot empty
    kron(PROJ1, SIGMA_PLUS),  # hot qubit excited, cold occupied
    kron(SIGMA_PLUS, PROJ1),  # cold qubit excited, hot occupied
)
JUMP_BATHS = ("hot", "cold", "hot", "cold")


def _jump_terms(occupations, gammas):
    terms = []
    for J, bath, (up, _) in zip(JUMP_OPERATORS, JUMP_BATHS, occupations):
        terms.append(JumpTerm(J, gammas[bath] * up, bath))
    for J, bath, (_, down) in zip(JUMP_OPERATORS, JUMP_BATHS, occupations):
        terms.append(JumpTerm(dagger(J), gammas[bath] * down, bath))
    return terms


def flux_rates(p: FluxParams) -> list[JumpTerm]:
    """Eight jump terms with Bose-Einstein rates.

    Absorption ``Gamma_k n_B(E, T_k)``, emission ``Gamma_k (1 + n_B(E, T_k))``;
    the first four terms raise, the last four are their conjugates.
    """
    temps = {"cold": p.T_c, "hot": p.T_h}
    occ = [bose_einstein(p.E, temps[b]) for b in JUMP_BATHS]
    return _jump_terms(occ, {"cold": p.gamma_c, "hot": p.gamma_h})


DOT_ENERGIES = ("shifted", "gap")


def dot_rates(p: DotParams, energies: str = "shifted") -> list[JumpTerm]:
    """Eight jump terms with Fermi-Dirac rates.

    Filling a dot while the other one is empty costs ``E``; filling it while the
    other is occupied costs ``E + U``, and by default (``"shifted"``) that is the
    energy the Fermi function is evaluated at for those two processes.
    ``energies="gap"`` evaluates every rate at ``E`` instead.
    """
    if energies not in DOT_ENERGIES:
        raise ValueError(f"energies must be one of {DOT_ENERGIES}, got {energies!r}")
    temps = {"cold": p.T_c, "hot": p.T_h}
    shift = p.U if energies == "shifted" else 0.0
    energies = (p.E, p.E, p.E + shift, p.E + shift)
    occ = [fermi_dirac(e, temps[b]) for e, b in zip(energies, JUMP_BATHS)]
    return _jump_terms(occ, {"cold": p.gamma_c, "hot": p.gamma_h})


def _assemble(comm, jumps, bath_assignment, model_tag) -> Liouvillian:
    if bath_assignment is None:
        bath_assignment = [j.bath for j in jumps]
    if len(bath_assignment) != len(jumps):
        raise ValueError("bath_assignment must have one label per jump")
    split = {b: np.zeros((16, 16), dtype=complex) for b in BATHS}
    for jump, bath in zip(jumps, bath_assignment):
        if bath not in split:
            raise ValueError(f"unknown bath {bath!r}")
        if jump.rate:
            op = np.ascontiguousarray(jump.operator, dtype=complex)
            split[bath] += jump.rate * _cached_dissipator(op.tobytes())
    return Liouvillian(comm + split["cold"] + split["hot"], model_tag, split)


def lindblad_liouvillian(H, jumps, bath_assignment=None, model_tag="lindblad") -> Liouvillian:
    """Generator of ``i[rho, H] + sum_i rate_i (J_i rho J_i^+ - {J_i^+ J_i, rho}/2)``.

    Jumps are grouped into ``bath_split`` by ``bath_assignment`` (defaults to
    each term's own ``bath``).
    """
    H = np.asarray(H, dtype=complex)
    if np.max(np.abs(H - dagger(H))) > 1e-10:
        raise ValueError("Hamiltonian is not Hermitian")
    return _assemble(commutator_generator(H), jumps, bath_assignment, model_tag)


def flux_liouvillian(p: FluxParams, form: str = "four") -> Liouvillian:
    """Flux-qubit generator.

    ``form="four"`` uses the four conditional jump operators (default);
    ``form="two"`` uses the local operators ``s+ x 1`` and ``1 x s+``.
    """
    comm = _hamiltonian_generator(p.E, p.g)
    if form == "four":
        return _assemble(comm, flux_rates(p), None, "flux")
    if form == "two":
        n_c, m_c = bose_einstein(p.E, p.T_c)
        n_h, m_h = bose_einstein(p.E, p.T_h)
        Jc = kron(SIGMA_PLUS, I2)
        Jh = kron(I2, SIGMA_PLUS)
        jumps = [
            JumpTerm(Jc, p.gamma_c * n_c, "cold"),
            JumpTerm(dagger(Jc), p.gamma_c * m_c, "cold"),
            JumpTerm(Jh, p.gamma_h * n_h, "hot"),
            JumpTerm(dagger(Jh), p.gamma_h * m_h, "hot"),
        ]
        return _assemble(comm, jumps, None, "flux-two")
    raise ValueError(f"form must be 'four' or 'two', got {form!r}")


def dot_liouvillian(p: DotParams, energies: str = "shifted") -> Liouvillian:
    if not p.U >= 0:
        raise ValueError(f"U must be >= 0, got {p.U}")
    return _assemble(_hamiltonian_generator(p.E, p.g, p.U), dot_rates(p, energies), None, "dot")


def build_liouvillian(params) -> Liouvillian:
    if isinstance(params, ResetParams):
        return reset_liouvillian(params)
    if isinstance(params, FluxParams):
        return flux_liouvillian(params)
    if isinstance(params, DotParams):
        return dot_liouvillian(params)
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def hamiltonian(params) -> np.ndarray:
    if isinstance(params, DotParams):
        return build_hdot(params.E, params.g, params.U)
    return build_h0(params.E) + build_hint(params.g)
