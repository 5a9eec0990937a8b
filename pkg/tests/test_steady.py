import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from thermoent.analytics import concurrence, is_x_state, purity
from thermoent.core import INF, kron, thermal_state, trace_distance, vectorize
from thermoent.models import (
    DotParams, FluxParams, ResetParams, build_h0, build_hint, build_liouvillian,
    commutator_generator,
)
from thermoent.steady import (
    NoConvergence, NonUniqueSteadyState, StepSizeTooLarge, analytic_reset_steady, evolve,
    solve_steady, steady_density,
)
from thermoent.verify import random_lindblad_params, random_reset_params

from conftest import random_density

log_rate = st.floats(-4, -2).map(lambda x: 10.0**x)
temps = st.one_of(st.just(0.0), st.just(INF), st.floats(0.01, 20.0))


def test_uncoupled_reset_is_product_state():
    p = ResetParams(0.0, 4e-3, 2e-3, 0.3, 1.7)
    res = solve_steady(build_liouvillian(p))
    expect = kron(thermal_state(1.0, 0.3), thermal_state(1.0, 1.7))
    assert_allclose(res.state.mat, expect, atol=1e-12)
    assert_allclose(analytic_reset_steady(p).mat, expect, atol=1e-15)


def test_solve_matches_closed_form_random_draws():
    rng = np.random.default_rng(7)
    for p in random_reset_params(rng, 200):
        res = solve_steady(build_liouvillian(p))
        assert np.max(np.abs(res.state.mat - analytic_reset_steady(p).mat)) <= 1e-10
        assert res.residual <= 1e-10
        assert res.uniqueness_gap > 1e-8


@given(log_rate, log_rate, log_rate, temps)
def test_closed_form_equilibrium_is_product(g, pc, ph, T):
    tau = thermal_state(1.0, T)
    assert_allclose(analytic_reset_steady(ResetParams(g, pc, ph, T, T)).mat, kron(tau, tau), atol=1e-15)


@given(log_rate, log_rate, log_rate, temps, temps)
def test_closed_form_is_a_state(g, pc, ph, Tc, Th):
    rho = analytic_reset_steady(ResetParams(g, pc, ph, Tc, Th)).mat
    vals = np.linalg.eigvalsh(rho)
    assert vals.min() >= -1e-12 and vals.max() <= 1 + 1e-12
    assert abs(np.trace(rho) - 1) <= 1e-12


def test_closed_form_small_g_limit():
    p = ResetParams(1e-9, 1e-2, 1e-3, 0.0, 2.0)
    expect = kron(thermal_state(1.0, 0.0), thermal_state(1.0, 2.0))
    assert_allclose(analytic_reset_steady(p).mat, expect, atol=1e-6)


def test_flux_equilibrium_separable():
    rng = np.random.default_rng(3)
    for p in random_lindblad_params(rng, "flux", 20, equilibrium=True):
        assert concurrence(solve_steady(build_liouvillian(p)).state).value <= 1e-8


@pytest.mark.parametrize("kind", ["flux", "dot"])
def test_lindblad_steady_states_are_x_states(kind):
    rng = np.random.default_rng(11)
    for p in random_lindblad_params(rng, kind, 30):
        assert is_x_state(solve_steady(build_liouvillian(p)).state.mat, tol=1e-10)


def test_degenerate_null_space_flagged():
    L = commutator_generator(build_h0(1.0) + build_hint(1e-3))
    with pytest.raises(NonUniqueSteadyState) as info:
        solve_steady(L)
    assert "singular_values" in info.value.diagnostics


def test_residual_bound_enforced():
    L = build_liouvillian(ResetParams(1e-3, 1e-3, 1e-3, 0.0, 1.0))
    with pytest.raises(NoConvergence):
        solve_steady(L, residual_tol=-1.0)


def test_fast_solve_agrees_with_checked_solve():
    rng = np.random.default_rng(5)
    params = (random_reset_params(rng, 10) + random_lindblad_params(rng, "flux", 10)
              + random_lindblad_params(rng, "dot", 10))
    for p in params:
        L = build_liouvillian(p)
        assert_allclose(steady_density(L), solve_steady(L).state.mat, atol=1e-10)


def test_evolve_zero_generator_constant(rng):
    rho = random_density(rng)
    tr = evolve(rho, np.zeros((16, 16)), 5.0, 0.5)
    for s in tr.states:
        assert_allclose(s.mat, rho, atol=0)
    assert len(tr) == 11 and tr.times[-1] == 5.0


def test_evolve_unitary_preserves_purity(rng):
    rho = random_density(rng, rank=2)
    L = commutator_generator(build_h0(1.0) + build_hint(0.3))
    tr = evolve(rho, L, 20.0, 0.01)
    pur = np.array([purity(s) for s in tr.states])
    assert np.max(np.abs(pur - purity(rho))) <= 1e-8


def test_evolve_reset_converges_monotonically():
    p = ResetParams(1.6e-3, 1e-2, 1.1e-3, 0.0, INF)
    L = build_liouvillian(p)
    target = solve_steady(L).state.mat
    rho0 = kron(thermal_state(1.0, 0.0), thermal_state(1.0, INF))
    tr = evolve(rho0, L, 100 / min(p.p_c, p.p_h), 0.5, every=400)
    d = np.array([trace_distance(s.mat, target) for s in tr.states])
    assert d[-1] <= 1e-6
    above_floor = d[1:] > 1e-10
    assert np.all(np.diff(d)[above_floor] <= 0)


def test_evolve_step_too_large():
    L = build_liouvillian(ResetParams(1e-3, 1e-2, 1e-2, 0.0, 1.0))
    rho0 = np.eye(4) / 4
    with pytest.raises(StepSizeTooLarge):
        evolve(rho0, L, 100.0, 5.0)


def test_evolve_argument_checks():
    with pytest.raises(ValueError):
        evolve(np.eye(4) / 4, np.zeros((16, 16)), 1.0, 0.0)
    with pytest.raises(ValueError):
        evolve(np.eye(4) / 4, np.zeros((16, 16)), -1.0, 0.1)


def test_steady_vector_in_null_space():
    p = DotParams(2e-3, 1e-2, 3e-3, 0.5, 40.0, U=20.0)
    L = build_liouvillian(p)
    rho = solve_steady(L).state.mat
    assert np.linalg.norm(L.generator @ vectorize(rho)) <= 1e-10
