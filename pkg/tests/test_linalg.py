import cmath

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from soc.errors import ConvergenceFailure, DomainViolation, NonSquare, SpectralPoint
from soc.linalg import (
    BUILTIN_FUNCTIONS,
    HoloFunction,
    SpectrumSet,
    as_matrix,
    classical_spectral_mapping_check,
    complex_from_json,
    complex_to_json,
    eigenvalues,
    holo_apply,
    matrix_from_json,
    matrix_to_json,
    min_singular_shift,
    nullspace,
    poly_apply,
    poly_compose,
    poly_eval,
    polynomial,
    quotient_projection,
    rank,
    resolvent,
    resolvent_identity_check,
    row_reduce,
    schur,
)

from gen import cmat, rand_diagonalizable

seeds = st.integers(0, 2**32 - 1)
small_floats = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def oracle_spectrum(m, tol=1e-8):
    return SpectrumSet(tuple(np.linalg.eigvals(np.asarray(m, dtype=complex))), tol)


# --- SpectrumSet ---------------------------------------------------------

def test_spectrum_set_is_a_multiset():
    assert SpectrumSet((0, 0, 1)) != SpectrumSet((0, 1, 1))
    assert SpectrumSet((1, 0, 0)) == SpectrumSet((0, 0, 1))
    assert SpectrumSet((0, 1)).set_equal(SpectrumSet((0, 0, 1)))


def test_spectrum_set_tolerance_and_containment():
    a = SpectrumSet((0, 1), 1e-6)
    assert a == SpectrumSet((1e-7, 1 - 1e-7))
    assert not a.matches(SpectrumSet((1e-5, 1)), 1e-6)
    big = SpectrumSet((0, 1, 6, 2j))
    assert big.contains(SpectrumSet((6, 0)))
    assert not big.contains(SpectrumSet((6, 6)))


def test_greedy_failure_falls_back_to_assignment():
    # greedy pairs 0.2 with its nearest 0.5 and strands 0.6
    a = SpectrumSet((0.2, 0.6), 0.5)
    b = SpectrumSet((0.5, -0.25), 0.5)
    assert not a.matches(b, fallback=False)
    assert a.matches(b)


def test_spectrum_set_rejects_bad_input():
    with pytest.raises(ValueError):
        SpectrumSet((float("nan"),))
    with pytest.raises(ValueError):
        SpectrumSet((1,), 0.0)


@given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False), max_size=8), seeds)
def test_spectrum_set_order_invariance_and_json(vals, seed):
    rng = np.random.default_rng(seed)
    s = SpectrumSet(tuple(vals))
    shuffled = SpectrumSet(tuple(rng.permutation(np.array(vals, dtype=complex))) if vals else ())
    assert s == shuffled
    assert SpectrumSet.from_json(s.to_json()).values == s.values
    assert s.dedup().set_equal(s)
    assert s.distance(shuffled) <= 1e-12


@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_json_round_trip_is_exact(z):
    assert complex_from_json(complex_to_json(z)) == z


def test_matrix_json_and_validation():
    m = np.array([[1 + 2j, 3], [0.1, -4j]])
    assert np.array_equal(matrix_from_json(matrix_to_json(m)), m)
    with pytest.raises(ValueError):
        as_matrix(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        as_matrix([[1, np.inf]])
    with pytest.raises(NonSquare):
        eigenvalues(np.ones((2, 3)))


# --- Schur and eigenvalues -------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 12))
def test_schur_factorization(seed, n):
    a = cmat(np.random.default_rng(seed), n, n)
    t, z = schur(a)
    assert np.allclose(np.tril(t, -1), 0, atol=1e-12 * max(1, np.linalg.norm(a)))
    assert np.allclose(z.conj().T @ z, np.eye(n), atol=1e-12)
    assert np.linalg.norm(z @ t @ z.conj().T - a) <= 1e-11 * np.linalg.norm(a)


@settings(max_examples=80, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 7), st.just(7)), elements=small_floats))
def test_eigenvalues_backward_stable(rows):
    # defective inputs only pin eigenvalues to eps**(1/k), so test backward error and the trace
    n = rows.shape[0]
    a = rows[:, :n]
    ours = eigenvalues(a)
    scale = max(n * float(np.abs(a).max()), np.finfo(float).tiny)  # Frobenius norm underflows
    assert len(ours) == n
    assert abs(sum(ours.values) - np.trace(a)) <= 1e-12 * n * scale
    for lam in ours:
        assert min_singular_shift(a, lam) <= 1e-10 * scale


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 12))
def test_eigenvalues_match_lapack_on_generic_input(seed, n):
    a = cmat(np.random.default_rng(seed), n, n)
    assert eigenvalues(a).matches(oracle_spectrum(a), 1e-9 * np.linalg.norm(a))


def test_eigenvalues_of_real_matrix_are_conjugate_closed():
    a = np.random.default_rng(4).normal(size=(9, 9))
    s = eigenvalues(a)
    assert s.matches(s.map(lambda z: z.conjugate()), 1e-10)


def test_tiny_and_huge_scales():
    for c in (4.5e-296, 1e-200, 1e200):
        a = c * np.array([[1.0, 2.0], [3.0, 4.0]])
        ref = oracle_spectrum(a)
        assert eigenvalues(a).matches(ref, 1e-12 * c * 6)


def test_permuted_triangular_is_exact():
    a = np.array([[0, 0, 0, 0], [1, 0, 0, 0], [1, 4, 0, 0], [0, 0, 1, 0.0]])
    assert eigenvalues(a).values == (0j,) * 4
    t, z = schur(a)
    assert np.allclose(z @ t @ z.conj().T, a) and not np.any(np.tril(t, -1))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 10))
def test_eigenvalues_are_singular_points(seed, n):
    a = cmat(np.random.default_rng(seed), n, n)
    for lam in eigenvalues(a):
        assert min_singular_shift(a, lam) <= 1e-10 * max(1, np.linalg.norm(a))


def test_eigenvalue_oracles():
    assert eigenvalues(np.eye(3)) == SpectrumSet((1, 1, 1))
    assert eigenvalues([[0, 1], [-1, 0]]) == SpectrumSet((1j, -1j))
    jordan = np.diag([2.0] * 4) + np.eye(4, k=1)
    assert eigenvalues(jordan, 1e-3) == SpectrumSet((2, 2, 2, 2))
    upper = np.triu(np.arange(1, 17).reshape(4, 4)).astype(float)
    assert eigenvalues(upper, 1e-15).values == SpectrumSet((1, 6, 11, 16)).values


def test_graded_matrix_is_balanced():
    d = np.diag(10.0 ** np.arange(-6, 6, 2))
    a = d @ cmat(np.random.default_rng(3), 6, 6) @ np.linalg.inv(d)
    assert eigenvalues(a, 1e-6).matches(oracle_spectrum(a), 1e-6 * np.abs(np.linalg.eigvals(a)).max())


def test_sweep_cap_raises():
    a = cmat(np.random.default_rng(0), 8, 8)
    with pytest.raises(ConvergenceFailure):
        schur(a, max_sweeps=1)


# --- resolvent ---------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 8))
def test_resolvent_inverts_shift(seed, n):
    rng = np.random.default_rng(seed)
    a = cmat(rng, n, n)
    z = complex(*(3 * rng.normal(size=2)))
    if min(abs(z - v) for v in np.linalg.eigvals(a)) < 1e-3:
        return
    r = resolvent(a, z)
    assert np.allclose(r @ (z * np.eye(n) - a), np.eye(n), atol=1e-8 * np.linalg.cond(r))
    w = z + 0.5
    if min(abs(w - v) for v in np.linalg.eigvals(a)) > 1e-3:
        assert resolvent_identity_check(a, z, w, 1e-8 * max(1, np.linalg.norm(r)) ** 2)


def test_resolvent_rejects_spectrum():
    with pytest.raises(SpectralPoint):
        resolvent(np.diag([1.0, 2.0]), 2.0)
    resolvent(np.diag([1.0, 2.0]), 2.001)


# --- polynomials and holomorphic calculus ------------------------------------

@given(st.lists(st.complex_numbers(max_magnitude=5), min_size=1, max_size=5),
       st.lists(st.complex_numbers(max_magnitude=5), min_size=1, max_size=4),
       st.complex_numbers(max_magnitude=2))
def test_poly_compose_evaluates_as_composition(outer, inner, z):
    lhs = poly_eval(poly_compose(outer, inner), z)
    rhs = poly_eval(outer, poly_eval(inner, z))
    assert abs(lhs - rhs) <= 1e-9 * max(1, abs(rhs))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6), st.lists(st.complex_numbers(max_magnitude=3), min_size=1, max_size=6))
def test_poly_apply_matches_powers(seed, n, coeffs):
    a = cmat(np.random.default_rng(seed), n, n, 0.5)
    ref = sum(c * np.linalg.matrix_power(a, k) for k, c in enumerate(coeffs))
    assert np.allclose(poly_apply(a, coeffs), ref, atol=1e-9 * max(1, np.linalg.norm(ref)))


@pytest.mark.parametrize("name, oracle", [("exp", sla.expm), ("sin", sla.sinm), ("cos", sla.cosm)])
@pytest.mark.parametrize("seed", range(5))
def test_entire_functions_against_scipy(name, oracle, seed):
    a = cmat(np.random.default_rng(seed), 6, 6, 0.7)
    ref = oracle(a)
    assert np.linalg.norm(holo_apply(a, BUILTIN_FUNCTIONS[name]) - ref) <= 1e-9 * np.linalg.norm(ref)


@pytest.mark.parametrize("seed", range(5))
def test_log_and_sqrt_against_scipy(seed):
    rng = np.random.default_rng(seed)
    a = cmat(rng, 5, 5, 0.3) + 3 * np.eye(5)
    assert np.allclose(holo_apply(a, BUILTIN_FUNCTIONS["log"]), sla.logm(a), atol=1e-9)
    s = holo_apply(a, BUILTIN_FUNCTIONS["sqrt"])
    assert np.allclose(s @ s, a, atol=1e-9)


def test_clustered_and_defective_inputs():
    # a Jordan block and a close eigenvalue pair force multi-eigenvalue clusters
    j = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.05]])
    assert np.allclose(holo_apply(j, BUILTIN_FUNCTIONS["exp"]), sla.expm(j), atol=1e-10)
    inv = holo_apply(j, BUILTIN_FUNCTIONS["inv"])
    assert np.allclose(inv @ j, np.eye(3), atol=1e-10)


def test_domain_violation():
    with pytest.raises(DomainViolation):
        holo_apply(np.diag([1.0, -1.0]), BUILTIN_FUNCTIONS["log"])
    with pytest.raises(DomainViolation):
        holo_apply(np.zeros((2, 2)), BUILTIN_FUNCTIONS["inv"])
    custom = HoloFunction("recip_shift", lambda z: 1 / (z - 2), lambda z: abs(z - 2))
    assert np.allclose(holo_apply(np.eye(2), custom), -np.eye(2))


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 8), st.sampled_from(["exp", "sin", "cos"]))
def test_spectral_mapping_for_entire_functions(seed, n, name):
    a, _ = rand_diagonalizable(np.random.default_rng(seed), n)
    a = a / max(1.0, np.abs(np.linalg.eigvals(a)).max())
    assert classical_spectral_mapping_check(a, BUILTIN_FUNCTIONS[name], 1e-7)


def test_polynomial_matches_poly_apply():
    a = cmat(np.random.default_rng(9), 4, 4)
    cs = (1, -2j, 0.5, 3)
    assert np.allclose(holo_apply(a, polynomial(cs)), poly_apply(a, cs), atol=1e-8 * np.linalg.norm(poly_apply(a, cs)))
    assert cmath.isclose(polynomial(cs)(2), poly_eval(cs, 2))


# --- elimination ---------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 7), st.integers(1, 7), st.integers(0, 7))
def test_rank_and_nullspace_against_svd(seed, r, c, k):
    rng = np.random.default_rng(seed)
    k = min(k, r, c)
    a = cmat(rng, r, k) @ cmat(rng, k, c) if k else np.zeros((r, c), dtype=complex)
    assert rank(a) == np.linalg.matrix_rank(a) == k
    ns = nullspace(a)
    assert ns.shape == (c, c - k)
    assert np.allclose(a @ ns, 0, atol=1e-9 * max(1, np.linalg.norm(a)))


def test_row_reduce_oracle():
    r, piv = row_reduce([[0, 2, 4], [1, 1, 1], [2, 4, 6]])
    assert piv == [0, 1]
    assert np.allclose(r, [[1, 0, -1], [0, 1, 2]])
    assert row_reduce(np.zeros((2, 2)))[1] == []


def test_quotient_projection_kills_generators():
    g = np.array([[1, 0], [1, 1], [0, 1], [0, 0]], dtype=complex)
    q = quotient_projection(g, 4)
    assert q.shape == (2, 4)
    assert np.allclose(q @ g, 0)
    assert quotient_projection(np.zeros((3, 0)), 3).shape == (3, 3)
    assert quotient_projection(np.zeros((0, 2)), 0).shape == (0, 0)
