"""Fixed-N Fock sector: builder, closed forms, disorder sweep."""

import math

import gmpy2
from gmpy2 import mpfr
import pytest

from skinbench import mpcore, linalg, models, manybody
from skinbench.errors import DimensionTooLarge


def test_basis_enumeration():
    b = manybody.fock_basis(4, 2)
    assert b.states == [0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]
    assert b.index[0b0110] == 2
    assert len(manybody.fock_basis(10, 5).states) == 252


def test_basis_guards():
    with pytest.raises(DimensionTooLarge):
        manybody.fock_basis(17, 2)
    with pytest.raises(ValueError):
        manybody.fock_basis(4, 5)


def test_single_particle_sector_matches_chain_builder():
    ctx = mpcore.PrecisionContext(25)
    spec = manybody.ManyBodySpec(5, 1, J=1.0, gamma=0.6, U_int=0.9)
    H = manybody.build_interacting(spec, ctx)
    h = models.build(models.ModelSpec("hn", 5, J=1.0, gamma=0.6), ctx)
    # basis states 1<<i are already site-ordered, U never acts on one particle
    for i in range(5):
        for j in range(5):
            assert H[i, j] == h[i, j]


def test_reciprocal_interacting_matrix_is_hermitian():
    ctx = mpcore.PrecisionContext(25)
    H = manybody.build_interacting(manybody.ManyBodySpec(5, 2, J=1.0, gamma=0.0, U_int=1.3), ctx)
    Hd = mpcore.conj_transpose(H)
    assert mpcore.max_abs(H - Hd, ctx) == 0


# frozen from an independent mpmath diagonalization at 45 dps:
# L = 4, N = 2, J = 1, gamma = 0.5, U_int = 0.7
MB42_RE = [
    '-1.7637244587363751558590281908017',
    '-0.58407708461347023130795882743837',
    '0.27157400977805893448887307522066',
    '0.69999999999999995559107901499374',
    '1.2840770846134701868990378424321',
    '2.1921504489583161769612341305748',
]
MBPBC_RE = [
    '-1.6744686214383357753900645605778',
    '-1.6744686214383357753900645605778',
    '0.69999999999999995559107901499374',
    '0.69999999999999995559107901499374',
    '2.3744686214383357309811435755715',
    '2.3744686214383357309811435755715',
]
MBPBC_IM = '0.98791355856088725527642698554589'


def test_open_interacting_spectrum_matches_oracle():
    ctx = mpcore.PrecisionContext(30)
    spec = manybody.ManyBodySpec(4, 2, J=1.0, gamma=0.5, U_int=0.7)
    H = manybody.build_interacting(spec, ctx)
    res = linalg.eig(H, ctx)
    with ctx.gmp():
        tol = mpfr(10) ** (-25)
        assert max(abs(v.imag) for v in res.eigenvalues) < tol
        for got, want in zip(res.eigenvalues, MB42_RE):
            assert abs(got.real - mpfr(want)) < tol


def test_ring_interacting_spectrum_matches_oracle():
    ctx = mpcore.PrecisionContext(30)
    spec = manybody.ManyBodySpec(4, 2, J=1.0, gamma=0.5, U_int=0.7, bc="pbc")
    H = manybody.build_interacting(spec, ctx)
    res = linalg.eig(H, ctx)
    with ctx.gmp():
        tol = mpfr(10) ** (-24)
        for got, want in zip(res.eigenvalues, MBPBC_RE):
            assert abs(got.real - mpfr(want)) < tol
        ims = sorted(abs(v.imag) for v in res.eigenvalues)
        assert ims[0] < tol and ims[1] < tol
        for v in ims[2:]:
            assert abs(v - mpfr(MBPBC_IM)) < tol
        # complex eigenvalues come in conjugate pairs
        assert abs(sum(v.imag for v in res.eigenvalues)) < tol


def test_weight_span_is_product_rule():
    for L in range(2, 9):
        for N in range(1, L):
            assert manybody.weight_span(L, N) == N * (L - N)
    assert manybody.weight_span(10, 5) == 25


def test_condition_closed_form():
    spec = manybody.ManyBodySpec(4, 2, J=1.0, gamma=0.5, U_int=0.7)
    r = math.sqrt(1.5 / 0.5)
    assert abs(manybody.interacting_condition_closed_form(spec) - r ** 4) < 1e-12
    with pytest.raises(ValueError):
        manybody.interacting_condition_closed_form(
            manybody.ManyBodySpec(4, 2, J=1.0, gamma=1.0))


def test_similarity_weight_hermitizes_open_chain():
    ctx = mpcore.PrecisionContext(40)
    spec = manybody.ManyBodySpec(4, 2, J=1.0, gamma=0.5, U_int=0.7)
    basis = manybody.fock_basis(4, 2)
    H = manybody.build_interacting(spec, ctx)
    with ctx.gmp():
        r = gmpy2.sqrt((1 + mpfr(0.5)) / (1 - mpfr(0.5)))
        w = [sum(j for j in range(4) if (s >> j) & 1) for s in basis.states]
        dim = len(basis.states)
        Hs = mpcore.zeros(dim, dim, ctx)
        for i in range(dim):
            for j in range(dim):
                Hs[i, j] = H[i, j] * r ** (w[j] - w[i])
        dev = mpcore.max_abs(Hs - mpcore.conj_transpose(Hs), ctx)
        assert dev < mpfr(10) ** (-35)


def test_open_spectrum_stable_across_precision():
    # working precision well above the condition number leaves the
    # spectrum unchanged, and it stays real
    specs = manybody.ManyBodySpec(6, 3, J=1.0, gamma=0.8, U_int=1.0)
    vals = {}
    for digits in (30, 60):
        ctx = mpcore.PrecisionContext(digits)
        H = manybody.build_interacting(specs, ctx)
        res = linalg.eig(H, ctx)
        with ctx.gmp():
            assert max(abs(v.imag) for v in res.eigenvalues) < mpfr(10) ** (-20)
        vals[digits] = [v.real for v in res.eigenvalues]
    with mpcore.PrecisionContext(60).gmp():
        for a, b in zip(vals[30], vals[60]):
            assert abs(a - b) < mpfr(10) ** (-21)


def test_propagator_norm_grows():
    ctx = mpcore.PrecisionContext(25)
    spec = manybody.ManyBodySpec(4, 2, J=1.0, gamma=0.5, U_int=0.7)
    out = manybody.mb_propagator_norm(spec, 0.5, 1.0, ctx)
    assert len(out) == 3
    assert float(out[-1][1]) > 0


def test_disorder_sweep_deterministic_and_consistent():
    ctx = mpcore.PrecisionContext(25)
    s1, m1 = manybody.disorder_condition_sweep(1.0, 0.9, [0.5], [4, 6], 3, 7, ctx)
    s2, m2 = manybody.disorder_condition_sweep(1.0, 0.9, [0.5], [4, 6], 3, 7, ctx)
    assert s1 == s2 and m1 == m2
    assert len(s1) == 6 and len(m1) == 2
    for cell in m1:
        logs = [r["log10_cond"] for r in s1 if r["L"] == cell["L"]]
        mean = sum(logs) / len(logs)
        assert abs(cell["mean_log10_cond"] - mean) < 1e-12
        var = sum((x - mean) ** 2 for x in logs) / (len(logs) - 1)
        assert abs(cell["stderr"] - math.sqrt(var / len(logs))) < 1e-12


def test_disorder_cells_reproduce_in_any_subset():
    ctx = mpcore.PrecisionContext(25)
    s_pair, _ = manybody.disorder_condition_sweep(1.0, 0.9, [0.5], [4, 6], 2, 7, ctx)
    s_solo, _ = manybody.disorder_condition_sweep(1.0, 0.9, [0.5], [6], 2, 7, ctx)
    assert [r for r in s_pair if r["L"] == 6] == s_solo
