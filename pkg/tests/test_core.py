import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from thermoent.core import (
    I2, I4, INF, PROJ1, SIGMA_X, DensityMatrix, devectorize, eigenvalues, ket, kron,
    partial_trace, thermal_qubit, thermal_state, trace_distance, vectorize,
)
from thermoent.analytics import spin_flip
from thermoent.models import ResetParams
from thermoent.steady import analytic_reset_steady

from conftest import random_density

temps = st.one_of(st.just(0.0), st.just(INF), st.floats(1e-3, 50.0))


def test_kron_identity_and_projector():
    assert_array_equal(kron(I2, I2), I4)
    assert_array_equal(kron(PROJ1, I2), np.diag([0, 0, 1, 1]))


def test_kron_swaps_01_to_10():
    out = kron(SIGMA_X, SIGMA_X) @ ket("01")
    assert_array_equal(out, ket("10"))


def test_kron_matches_hand_expansion(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    expect = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    expect[2 * i + k, 2 * j + l] = a[i, j] * b[k, l]
    assert_allclose(kron(a, b), expect, atol=1e-15)


def test_kron_associative_bilinear(rng):
    a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
    assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)
    assert_allclose(kron(a + 2 * c, b), kron(a, b) + 2 * kron(c, b), atol=1e-12)
    assert_allclose(kron(a, 3j * b), 3j * kron(a, b), atol=1e-12)


def test_partial_trace_product_and_bell():
    tc, th = thermal_state(1.0, 0.3), thermal_state(1.0, 2.0)
    assert_allclose(partial_trace(kron(tc, th), "second"), tc, atol=1e-15)
    assert_allclose(partial_trace(kron(tc, th), "first"), th, atol=1e-15)
    bell = DensityMatrix.from_ket((ket("00") + ket("11")) / math.sqrt(2))
    assert_allclose(partial_trace(bell, "first"), I2 / 2, atol=1e-15)


def test_partial_trace_index_sum_on_steady_state():
    rho = analytic_reset_steady(ResetParams(2e-3, 1e-2, 1e-3, 0.1, 5.0)).mat
    first = np.zeros((2, 2), dtype=complex)
    second = np.zeros((2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            for k in range(2):
                first[a, b] += rho[2 * k + a, 2 * k + b]
                second[a, b] += rho[2 * a + k, 2 * b + k]
    assert_allclose(partial_trace(rho, "first"), first, atol=1e-15)
    assert_allclose(partial_trace(rho, "second"), second, atol=1e-15)


def test_partial_trace_rejects_unknown_subsystem():
    with pytest.raises(ValueError):
        partial_trace(I4 / 4, "cold")


@given(st.integers(0, 2**32 - 1))
def test_partial_trace_of_products(seed):
    rng = np.random.default_rng(seed)
    r = random_density(rng)
    rho, sigma = partial_trace(r, "second"), partial_trace(r, "first")
    assert_allclose(partial_trace(kron(rho, sigma), "first"), sigma, atol=1e-12)
    for side in ("first", "second"):
        assert abs(np.trace(partial_trace(r, side)) - 1) <= 1e-12


def test_thermal_qubit_limits():
    assert thermal_qubit(1.0, 0.0).r == 1.0
    assert thermal_qubit(1.0, INF).r == 0.5
    assert_allclose(thermal_qubit(1.0, 1.0).r, 1 / (1 + math.exp(-1)), rtol=1e-15)


@pytest.mark.parametrize("E,T", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1), (1.0, math.nan)])
def test_thermal_qubit_rejects(E, T):
    with pytest.raises(ValueError):
        thermal_qubit(E, T)


@given(temps)
def test_thermal_population_range(T):
    r = thermal_qubit(1.0, T).r
    assert 0.5 <= r <= 1.0
    assert_allclose(np.trace(thermal_state(1.0, T)), 1.0, atol=1e-15)


def test_vectorize_identity_has_four_ones():
    v = vectorize(I4)
    assert np.count_nonzero(v) == 4 and set(v[v != 0]) == {1}


@given(st.integers(0, 2**32 - 1))
def test_vectorize_round_trip_exact(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert_array_equal(devectorize(vectorize(m)), m)


@given(st.integers(0, 2**32 - 1))
def test_vectorize_column_stacking_identity(seed):
    rng = np.random.default_rng(seed)
    A, rho, B = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
    # brute-force column stack of A rho B
    prod = A @ rho @ B
    stacked = np.array([prod[i, j] for j in range(4) for i in range(4)])
    assert_allclose(vectorize(prod), stacked, atol=0, rtol=0)
    assert_allclose(np.kron(B.T, A) @ vectorize(rho), stacked, atol=1e-12)


def test_vectorize_dimension_errors():
    with pytest.raises(ValueError):
        vectorize(np.zeros((4, 3)))
    with pytest.raises(ValueError):
        devectorize(np.zeros(15))


def test_eigenvalues_known_spectra():
    assert_allclose(np.sort(eigenvalues(np.diag([4.0, 2, 3, 1])).real), [1, 2, 3, 4], atol=1e-10)
    xx = eigenvalues(kron(SIGMA_X, SIGMA_X))
    assert_allclose(np.sort(xx.real), [-1, -1, 1, 1], atol=1e-10)
    assert_allclose(xx.imag, 0, atol=1e-10)


def test_eigenvalues_random_hermitian(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = a + a.conj().T
    vals = eigenvalues(H)
    assert_allclose(vals.imag, 0, atol=1e-10)
    assert_allclose(vals.sum(), np.trace(H), atol=1e-10)


def test_eigenvalues_rotated_spectrum(rng):
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    spectrum = np.array([0.1, -2.0, 3.5, 7.25])
    vals = eigenvalues(q @ np.diag(spectrum) @ q.conj().T, hermitian=True)
    assert_allclose(np.sort(vals), np.sort(spectrum), atol=1e-10)


def test_eigenvalues_non_finite_raises():
    with pytest.raises(np.linalg.LinAlgError):
        eigenvalues(np.full((4, 4), np.inf))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_rho_rho_tilde_spectrum_nonnegative(seed, rank):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, rank)
    vals = eigenvalues(rho @ spin_flip(rho))
    assert np.all(np.abs(vals.imag) <= 1e-10)
    assert np.all(vals.real >= -1e-10)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4))  # trace 4
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5, 0, 0]))
    bad = np.eye(4) / 4 + 1e-3 * np.eye(4, k=1)
    with pytest.raises(ValueError):
        DensityMatrix(bad)
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2) / 2)
    # looser tolerance accepts a slightly negative eigenvalue
    DensityMatrix(np.diag([0.5 + 1e-9, 0.5, 0, -1e-9]), psd_tol=1e-8)


def test_density_matrix_is_immutable():
    rho = DensityMatrix(I4 / 4)
    with pytest.raises(ValueError):
        rho.mat[0, 0] = 1
    with pytest.raises(AttributeError):
        rho.extra = 1


def test_trace_distance():
    a = DensityMatrix.from_ket(ket("00")).mat
    b = DensityMatrix.from_ket(ket("11")).mat
    assert_allclose(trace_distance(a, b), 1.0, atol=1e-15)
    assert trace_distance(a, a) == 0.0
