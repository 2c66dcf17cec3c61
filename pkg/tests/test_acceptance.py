"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""
import time

import numpy as np

from soc import basechange as bc
from soc.algebra import (
    block_algebra,
    block_operator,
    network_algebra,
    nogo_witness_pair,
    poly_calculus,
    trivial_algebra,
)
from soc.linalg import (
    SpectrumSet,
    eigenvalues,
    poly_apply,
    poly_eval,
    resolvent,
    resolvent_identity_residual,
)
from soc.operad import Digraph, Edge, matrix_block_operad, trivial_operad
from soc.spectral import (
    analytic_spectrum,
    decompose,
    naive_spectrum,
    operadic_spectrum,
    residue,
    witness_quality,
)

import conftest
from gen import (
    diagonal_only,
    rand_algebra,
    rand_diagonalizable,
    rand_partial,
    rand_trivial,
)

ALPHA = np.array([[0, 1], [0, 0]], dtype=complex)
BETA = np.array([[0, 0], [1, 0]], dtype=complex)


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_matrix_block_interaction():
    t0 = time.perf_counter()
    z = np.zeros((2, 2))
    a = block_algebra(z, ALPHA, BETA, z)
    inter = analytic_spectrum(a).interaction_at("1")
    contains = inter.contains(SpectrumSet((0, 1)), 1e-10)
    eig = eigenvalues(block_operator(a), 1e-8)
    eig_ok = eig.matches(SpectrumSet((-1, 0, 0, 1)), 1e-8)
    dt = time.perf_counter() - t0
    record(1, contains and eig_ok and dt < 1.0,
           f"interaction at 1 = {inter.values}, block eigenvalues = {eig.values}, {dt:.3f}s")


def test_criterion_2_network_two_cycle():
    t0 = time.perf_counter()
    g = Digraph(("1", "2"), (Edge("1", "2", 2.0, "alpha"), Edge("2", "1", 3.0, "beta")))
    an = analytic_spectrum(network_algebra(g))
    exact = an.interaction.values == (6,)
    empty = all(len(s) == 0 for s in an.per_color.values()) and an.missing_distinguished == ("1", "2")
    dt = time.perf_counter() - t0
    record(2, exact and empty and dt < 1.0,
           f"interaction = {an.interaction.values}, per-color sizes = "
           f"{[len(s) for s in an.per_color.values()]}, {dt:.3f}s")


def test_criterion_3_recovery():
    rng = np.random.default_rng(3)
    worst_res, worst_cond, bad = 0.0, 0.0, 0
    for _ in range(50):
        a = rand_trivial(rng, 16)
        s = operadic_spectrum(a)
        cond, resid = witness_quality(s.witness["recovery"])
        worst_res, worst_cond = max(worst_res, resid), max(worst_cond, cond)
        bad += not (s.total_dimension == a.total_dimension and np.isfinite(cond) and resid < 1e-9)
    record(3, bad == 0, f"50 algebras, failures {bad}, worst cond {worst_cond:.2e}, worst residual {worst_res:.1e}")


def test_criterion_4_nogo_separation():
    a, b = nogo_witness_pair()
    na, nb = naive_spectrum(a), naive_spectrum(b)
    same = all(na[c] == nb[c] and na[c].set_equal(SpectrumSet((1,))) for c in a.operad.colors)
    sa, sb = operadic_spectrum(a), operadic_spectrum(b)
    da, db = sa.decomposition, sb.decomposition
    rank_pi = int(np.linalg.matrix_rank(b.structure["theta"]))
    expected_cross = rank_pi * residue(b.operad).summands["1"]
    ok = same and da.cross_dimension == 0 and db.cross_dimension == expected_cross and \
        sa.total_dimension != sb.total_dimension
    record(4, ok, f"naive equal {same}, totals {sa.total_dimension} vs {sb.total_dimension}, "
                  f"cross {da.cross_dimension} vs {db.cross_dimension}")


def test_criterion_5_residue_values():
    t, m = residue(trivial_operad()).total_dimension, residue(matrix_block_operad()).total_dimension
    record(5, (t, m) == (1, 2), f"trivial {t}, matrix-block {m}")


def constructor_algebras():
    """One algebra per built-in constructor, all data real so complexification applies."""
    rng = np.random.default_rng(6)
    r = lambda *s: rng.normal(size=s)
    g = Digraph(("u", "v", "w"), (Edge("u", "v", 2.0, "e1"), Edge("v", "w", -1.5, "e2"),
                                  Edge("w", "u", 0.5, "e3"), Edge("u", "u", 1.0, "lu"),
                                  Edge("v", "v", -2.0, "lv"), Edge("w", "w", 3.0, "lw")))
    a, b = nogo_witness_pair()
    base = {
        "trivial": trivial_algebra(r(3, 3)),
        "block": block_algebra(r(2, 2), r(2, 3), r(3, 2), r(3, 3)),
        "network": network_algebra(g),
        "nogo-A": a,
        "nogo-B": b,
    }
    base["poly_calculus"] = poly_calculus(base["block"], [0.5, -1.0, 2.0])
    return base


def test_criterion_6_base_change_matrix():
    t0 = time.perf_counter()
    coeffs = [0.5, -1.0, 2.0]
    failures, worst, count = [], 0.0, 0
    for name, a in constructor_algebras().items():
        for fname in ("identity", "complexification", "forgetful"):
            f = bc.get_functor(fname)
            reports = [bc.check_residue_transport(a.operad, f), bc.check_hochschild_transport(a, f),
                       bc.check_spectrum_transport(a, f), bc.check_spectral_mapping(a, coeffs, functor=f)]
            for rep in reports:
                count += 1
                dev = rep.max_deviation
                worst = max(worst, dev)
                if not (rep.passed and dev < 1e-9):
                    failures.append(f"{name}/{fname}/{rep.check}")
    dt = time.perf_counter() - t0
    record(6, not failures and dt < 30.0,
           f"{count} checks, failures {failures or 0}, max deviation {worst:.1e}, {dt:.2f}s")


def test_criterion_7_classical_spectral_mapping():
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        m, lam = rand_diagonalizable(rng, n)
        deg = int(rng.integers(0, 6))
        cs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        lhs = eigenvalues(poly_apply(m, cs), 1e-7)
        rhs = SpectrumSet(tuple(poly_eval(cs, z) for z in lam), 1e-7)
        bad += not lhs.matches(rhs, 1e-7)
    record(7, bad == 0, f"100 matrices, failures {bad}")


def test_criterion_8_decomposition_corollaries():
    rng = np.random.default_rng(8)
    vanish_bad = 0
    for _ in range(200):
        d = decompose(diagonal_only(rand_algebra(rng)))
        vanish_bad += d.cross_dimension != 0
    iso_bad, iso_cases = 0, 0
    for _ in range(200):
        a = rand_partial(rng)
        d = decompose(a)
        for c in a.operad.colors:
            if a.operad.endo_dim(c) == 0:
                iso_cases += 1
                iso_bad += d.local[c] != 0
    record(8, vanish_bad == 0 and iso_bad == 0 and iso_cases > 0,
           f"vanishing failures {vanish_bad}/200, isolation failures {iso_bad} over {iso_cases} unit-less colors")


def test_criterion_9_reconstruction_consistency():
    rng = np.random.default_rng(9)
    algebras = list(constructor_algebras().values()) + [rand_algebra(rng) for _ in range(100)]
    bad = sum(operadic_spectrum(a).total_dimension != decompose(a).total for a in algebras)
    record(9, bad == 0, f"{len(algebras)} algebras, mismatches {bad}")


def test_criterion_10_resolvent_identity():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        spec = np.array(eigenvalues(m).values)
        pts = []
        while len(pts) < 2:
            z = complex(*rng.normal(scale=3, size=2))
            if np.min(np.abs(spec - z)) > 0.1:
                pts.append(z)
        z, w = pts
        worst = max(worst, resolvent_identity_residual(resolvent(m, z), resolvent(m, w), z, w))
    record(10, worst < 1e-8, f"100 triples, worst residual {worst:.1e}")


if __name__ == "__main__":
    import sys

    code = 0
    for name, fn in sorted(((k, v) for k, v in dict(globals()).items() if k.startswith("test_criterion_")),
                           key=lambda kv: int(kv[0].split("_")[2])):
        try:
            fn()
        except AssertionError:
            code = 1
    sys.exit(code)
