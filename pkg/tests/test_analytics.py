import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from thermoent.analytics import (
    SweepRecord, concurrence, concurrence_closed_form, heat_current, heat_current_from_generator,
    is_x_state, purity, steady_report, wootters_lambdas, x_state_concurrence,
)
from thermoent.core import I4, INF, DensityMatrix, ket, kron, thermal_state
from thermoent.models import DotParams, FluxParams, ResetParams, build_liouvillian
from thermoent.steady import analytic_reset_steady, solve_steady
from thermoent.verify import random_lindblad_params, random_reset_params

from conftest import random_density, random_unitary2

PHI_PLUS = (ket("00") + ket("11")) / math.sqrt(2)
log_rate = st.floats(-4, -2).map(lambda x: 10.0**x)
temps = st.one_of(st.just(0.0), st.just(INF), st.floats(0.01, 20.0))


def test_bell_state_maximal():
    c = concurrence(DensityMatrix.from_ket(PHI_PLUS))
    assert_allclose(c.value, 1.0, atol=1e-12)
    assert c.method == "general-wootters"


def test_product_state_zero():
    prod = kron(np.diag([0.7, 0.3]), np.array([[0.5, 0.2j], [-0.2j, 0.5]]))
    assert concurrence(prod).value <= 1e-12


@pytest.mark.parametrize("p", [0.0, 1 / 3, 2 / 3, 1.0])
def test_werner_states(p):
    rho = p * np.outer(PHI_PLUS, PHI_PLUS) + (1 - p) * I4 / 4
    assert_allclose(concurrence(rho).value, max(0.0, (3 * p - 1) / 2), atol=1e-10)


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_local_unitary_invariance(seed, rank):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, rank)
    U = kron(random_unitary2(rng), random_unitary2(rng))
    c0 = concurrence(rho).value
    c1 = concurrence(U @ rho @ U.conj().T).value
    assert abs(c0 - c1) <= 1e-9
    assert 0.0 <= c0 <= 1.0


def test_lambdas_sorted_descending(rng):
    lam = wootters_lambdas(random_density(rng))
    assert np.all(np.diff(lam) <= 0)


def test_closed_form_equilibrium_zero():
    c = concurrence_closed_form(ResetParams(1.6e-3, 1e-2, 1.1e-3, 0.4, 0.4))
    assert c.value == 0.0
    assert c.components["f"] == 0.0


def test_closed_form_published_optimum():
    c = concurrence_closed_form(ResetParams(1.6e-3, 1e-2, 1.1e-3, 0.0, INF))
    assert abs(c.value - 0.054) <= 0.005
    assert c.method == "closed-form-eq6"


@given(log_rate, log_rate, log_rate, temps, temps)
def test_closed_form_matches_wootters(g, pc, ph, Tc, Th):
    p = ResetParams(g, pc, ph, Tc, Th)
    assert abs(concurrence(analytic_reset_steady(p)).value - concurrence_closed_form(p).value) <= 1e-10


def test_x_state_path_matches_general():
    rng = np.random.default_rng(2)
    params = (random_reset_params(rng, 40) + random_lindblad_params(rng, "flux", 40)
              + random_lindblad_params(rng, "dot", 40))
    for p in params:
        rho = solve_steady(build_liouvillian(p)).state.mat
        fast = concurrence(rho, fast=True)
        assert fast.method == "x-state"
        assert abs(fast.raw - concurrence(rho).raw) <= 1e-10


def test_x_state_guard(rng):
    rho = random_density(rng)
    assert not is_x_state(rho)
    assert concurrence(rho, fast=True).method == "general-wootters"
    with pytest.raises(ValueError):
        x_state_concurrence(rho)


def test_purity_values():
    assert_allclose(purity(DensityMatrix.from_ket(PHI_PLUS)), 1.0, atol=1e-15)
    assert_allclose(purity(I4 / 4), 0.25, atol=1e-15)
    prod = kron(thermal_state(1.0, 0.0), thermal_state(1.0, INF))
    assert_allclose(purity(prod), 0.5, atol=1e-15)


@given(st.integers(0, 2**32 - 1))
def test_purity_bounds(seed):
    p = purity(random_density(np.random.default_rng(seed)))
    assert 0.25 - 1e-12 <= p <= 1 + 1e-12


@given(st.integers(0, 2**32 - 1), log_rate, log_rate, log_rate, temps, temps)
def test_reset_heat_definitions_agree(seed, g, pc, ph, Tc, Th):
    p = ResetParams(g, pc, ph, Tc, Th)
    L = build_liouvillian(p)
    rho = random_density(np.random.default_rng(seed))
    for bath in ("cold", "hot"):
        assert abs(heat_current(rho, p, bath) - heat_current_from_generator(rho, L, bath, 1.0)) <= 1e-12


@pytest.mark.parametrize("p", [
    ResetParams(1e-3, 2e-3, 5e-3, 0.7, 0.7),
    FluxParams(1e-3, 2e-3, 5e-3, 0.7, 0.7),
    DotParams(1e-3, 2e-3, 5e-3, 0.7, 0.7, U=20.0),
    ResetParams(0.0, 2e-3, 5e-3, 0.1, 3.0),
    FluxParams(0.0, 2e-3, 5e-3, 0.1, 3.0),
])
def test_heat_vanishes_without_flow(p):
    rho = solve_steady(build_liouvillian(p)).state
    for bath in ("cold", "hot"):
        assert abs(heat_current(rho, p, bath)) <= 1e-14


def test_heat_rejects_bad_bath():
    p = ResetParams(1e-3, 2e-3, 5e-3, 0.1, 1.0)
    with pytest.raises(ValueError):
        heat_current(I4 / 4, p, "warm")


def test_reset_energy_balance_and_direction():
    rng = np.random.default_rng(9)
    for p in random_reset_params(rng, 100):
        rec = steady_report(p)
        assert abs(rec.Q_c + rec.Q_h) <= 1e-10
        if p.T_h > p.T_c and rec.concurrence > 0:
            assert rec.Q_c > 0


def test_lindblad_heat_balance_is_reported():
    # measured rather than asserted to vanish
    rec = steady_report(DotParams(2e-3, 1e-2, 2e-3, 0.0, 50.0, U=20.0))
    assert math.isfinite(rec.Q_c + rec.Q_h)
    assert rec.Q_c > 0


def test_steady_report_consistency():
    p = FluxParams(1.5e-3, 1e-2, 2e-3, 0.05, 200.0)
    rec = steady_report(p)
    res = solve_steady(build_liouvillian(p))
    assert rec.concurrence == concurrence(res.state).value
    assert rec.purity == purity(res.state)
    assert rec.Q_c == heat_current(res.state, p, "cold")
    assert rec.residual == res.residual and rec.uniqueness_gap == res.uniqueness_gap
    assert (rec.model, rec.g, rec.rate_c, rec.rate_h, rec.T_h) == ("flux", 1.5e-3, 1e-2, 2e-3, 200.0)
    assert SweepRecord.columns()[-6:] == ["concurrence", "purity", "Q_c", "Q_h", "residual",
                                          "uniqueness_gap"]


def test_steady_report_cases():
    eq = steady_report(ResetParams(1e-3, 1e-2, 1e-3, 0.5, 0.5))
    assert eq.concurrence == 0.0 and abs(eq.Q_c) <= 1e-15 and abs(eq.Q_h) <= 1e-15
    best = steady_report(ResetParams(1.6e-3, 1e-2, 1.1e-3, 0.0, INF))
    assert abs(best.concurrence - 0.054) <= 0.005
