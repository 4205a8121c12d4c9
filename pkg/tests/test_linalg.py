"""Eigensolvers, Schur forms, singular values, perturbation theory."""

import gmpy2
from gmpy2 import mpfr, mpc
import pytest

from skinbench import mpcore, linalg, models
from skinbench.errors import NotHermitian, InfiniteCondition


def _asym_hop(L, J, g, ctx):
    spec = models.ModelSpec("hn", L, J=J, gamma=g, bc="obc")
    return models.build(spec, ctx)


def test_hessenberg_structure_and_similarity():
    ctx = mpcore.PrecisionContext(40)
    A = mpcore.from_list([[1, 2, 3, 0.5], [4, -1, 0, 1], [2, 2, 2, 2], [0.5, 1, -3, 0]], ctx)
    H, Q, D = linalg.hessenberg(A.copy(), ctx)
    with ctx.gmp():
        tol = mpfr(10) ** (-34)
        for i in range(4):
            for j in range(4):
                if i > j + 1:
                    assert H[i, j] == 0
        dev = mpcore.max_abs(mpcore.conj_transpose(Q) @ Q - mpcore.eye(4, ctx), ctx)
        assert dev < tol
        recon = Q @ H @ mpcore.conj_transpose(Q)
        assert mpcore.max_abs(recon - A, ctx) < tol
        for i in range(4):
            assert D[i, i] == 1


def test_hessenberg_balance_powers_of_two():
    ctx = mpcore.PrecisionContext(40)
    A = mpcore.from_list([[1, 1024, 0], [0.001, 2, 4096], [0, 0.002, 3]], ctx)
    H, Q, D = linalg.hessenberg(A.copy(), ctx, balance=True)
    with ctx.gmp():
        for i in range(3):
            e = gmpy2.log2(D[i, i])
            assert e == int(e)
        Dinv = mpcore.eye(3, ctx)
        for i in range(3):
            Dinv[i, i] = 1 / D[i, i]
        recon = D @ Q @ H @ mpcore.conj_transpose(Q) @ Dinv
        assert mpcore.max_abs(recon - A, ctx) < mpfr(10) ** (-33)


def test_schur_complex_shifted_triangular():
    ctx = mpcore.PrecisionContext(35)
    A = mpcore.from_list([[1 + 1j, 2, 0], [0.5, -1, 1j], [0.25, 1, 2 - 0.5j]], ctx)
    form = linalg.schur_qr(A.copy(), ctx)
    with ctx.gmp():
        tol = mpfr(10) ** (-29)
        for i in range(3):
            for j in range(i):
                assert form.T[i, j] == 0
        Z = form.Z
        dev = mpcore.max_abs(mpcore.conj_transpose(Z) @ Z - mpcore.eye(3, ctx), ctx)
        assert dev < tol
        recon = Z @ form.T @ mpcore.conj_transpose(Z)
        assert mpcore.max_abs(recon - A, ctx) < tol


# frozen closed-form eigenvalues for the L=8, gamma=0.8 open chain
HN8_EVALS = ['-1.1276311449430899495829702083234', '-0.91925333174277355152498545940298',
             '-0.59999999999999994078810535332498', '-0.20837781320031639805798474892041',
             '0.20837781320031639805798474892041', '0.59999999999999994078810535332498',
             '0.91925333174277355152498545940298', '1.1276311449430899495829702083234']


def test_eig_open_chain_matches_closed_form():
    ctx = mpcore.PrecisionContext(30)
    H = _asym_hop(8, 1.0, 0.8, ctx)
    res = linalg.eig(H, ctx)
    with ctx.gmp():
        # cond(V) ~ 3^7, so expect ~7 decades eaten out of 30
        tol = mpfr(10) ** (-18)
        for got, want in zip(res.eigenvalues, HN8_EVALS):
            assert abs(got - mpfr(want)) < tol


def test_eig_sorted_and_residuals_small():
    ctx = mpcore.PrecisionContext(30)
    H = _asym_hop(8, 1.0, 0.8, ctx)
    res = linalg.eig(H, ctx)
    with ctx.gmp():
        keys = [( (v.real, v.imag) if isinstance(v, type(mpc(0))) else (v, mpfr(0)) )
                for v in res.eigenvalues]
        assert keys == sorted(keys)
        for r in res.residuals:
            assert r < mpfr(10) ** (-20)
        # right vectors have unit norm
        V = res.right_vectors
        for k in range(8):
            nrm = gmpy2.sqrt(sum(gmpy2.norm(V[i, k]) for i in range(8)))
            assert abs(nrm - 1) < mpfr(10) ** (-25)


def test_eig_trace_invariant_complex_matrix():
    ctx = mpcore.PrecisionContext(35)
    A = mpcore.from_list([[1 + 1j, 2, -0.5], [0.5j, -1, 1], [2, 1j, 0.25]], ctx)
    res = linalg.eig(A, ctx)
    with ctx.gmp():
        tr = A[0, 0] + A[1, 1] + A[2, 2]
        s = sum(res.eigenvalues)
        assert abs(s - tr) < mpfr(10) ** (-30)
        for r in res.residuals:
            assert r < mpfr(10) ** (-28)


# frozen from an independent mpmath eigh at 45 dps
HERM4_EVALS = ['-2.0037586543225620358889100295779', '0.23062643412868412699631391202618',
               '1.5547872786330428205977232877609', '2.7183449415608350882948728297909']


def _herm4(ctx):
    # the 0.3/0.4 entries are built from decimal strings, matching the oracle
    with ctx.gmp():
        a = mpc(mpfr("-0.3"), mpfr("0.4"))
        return mpcore.from_list(
            [[2, 0.5 + 0.25j, 0, -1j],
             [0.5 - 0.25j, -1, 1.5, 0],
             [0, 1.5, 0.5, a],
             [1j, 0, a.conjugate(), 1]], ctx)


def test_eig_hermitian_matches_oracle():
    ctx = mpcore.PrecisionContext(35)
    A = _herm4(ctx)
    vals, V = linalg.eig_hermitian(A, ctx)
    with ctx.gmp():
        tol = mpfr(10) ** (-30)
        for got, want in zip(vals, HERM4_EVALS):
            assert abs(got - mpfr(want)) < tol
        dev = mpcore.max_abs(mpcore.conj_transpose(V) @ V - mpcore.eye(4, ctx), ctx)
        assert dev < tol
        lam = mpcore.zeros(4, 4, ctx)
        for i in range(4):
            lam[i, i] = vals[i]
        assert mpcore.max_abs(A @ V - V @ lam, ctx) < tol
        assert list(vals) == sorted(vals)


def test_eig_hermitian_rejects_non_hermitian():
    ctx = mpcore.PrecisionContext(30)
    A = mpcore.from_list([[1, 2], [3, 4]], ctx)
    with pytest.raises(NotHermitian):
        linalg.eig_hermitian(A, ctx)


# frozen from an independent mpmath svd at 45 dps
SV4_MIN = '0.55034637538519437822142149652648'
SV4_MAX = '3.9692342690943080919856960778926'
SV4_COND = '7.2122474983435493715793983616086'


def _m4(ctx):
    return mpcore.from_list([["1.0", "2.0", "0", "-0.5"],
                             ["0.25", "-1.0", "3.0", "0"],
                             ["0", "0.5", "-2.0", "1.5"],
                             ["1.0", "0", "0.75", "0.1"]], ctx)


def test_extreme_singular_values_match_oracle():
    ctx = mpcore.PrecisionContext(30)
    A = _m4(ctx)
    smax, smin = linalg.extreme_singular_values(A, ctx)
    with ctx.gmp():
        assert abs(smax / mpfr(SV4_MAX) - 1) < mpfr(10) ** (-11)
        assert abs(smin / mpfr(SV4_MIN) - 1) < mpfr(10) ** (-11)


def test_extreme_singular_values_max_only():
    ctx = mpcore.PrecisionContext(30)
    A = _m4(ctx)
    smax, smin = linalg.extreme_singular_values(A, ctx, want="max")
    assert smin is None
    with ctx.gmp():
        assert abs(smax / mpfr(SV4_MAX) - 1) < mpfr(10) ** (-11)


def test_condition_number_matches_oracle():
    ctx = mpcore.PrecisionContext(30)
    A = _m4(ctx)
    c = linalg.condition_number(A, ctx)
    with ctx.gmp():
        assert abs(c / mpfr(SV4_COND) - 1) < mpfr(10) ** (-10)


def test_condition_number_singular_raises():
    ctx = mpcore.PrecisionContext(30)
    A = mpcore.from_list([[1, 2], [2, 4]], ctx)
    with pytest.raises(InfiniteCondition):
        linalg.condition_number(A, ctx)


def test_condition_grows_exponentially_with_length():
    # eigenvector condition number of the open chain ~ r^(L-1), r = 3 here
    ctx = mpcore.PrecisionContext(40)
    logs = []
    with ctx.gmp():
        for L in (6, 9, 12):
            H = _asym_hop(L, 1.0, 0.8, ctx)
            res = linalg.eig(H, ctx)
            c = linalg.condition_number(res.right_vectors, ctx)
            logs.append(float(gmpy2.log10(c)))
    slope = (logs[2] - logs[0]) / 6.0
    assert abs(slope - 0.477) < 0.03


# frozen finite-difference derivative from mpmath at 45 dps
SHIFT6_FD = '-0.83845901924806961694276515737594'
HN6_EVAL0 = '-1.5605238552448021759742914089079'


def test_first_order_eigenshift_matches_derivative():
    ctx = mpcore.PrecisionContext(40)
    H = _asym_hop(6, 1.0, 0.5, ctx)
    Delta = mpcore.zeros(6, 6, ctx)
    with ctx.gmp():
        Delta[0, 5] = mpfr(1)
    shift, overlap = linalg.first_order_eigenshift(H, Delta, 0, ctx)
    with ctx.gmp():
        res = linalg.eig(H, ctx)
        assert abs(res.eigenvalues[0] - mpfr(HN6_EVAL0)) < mpfr(10) ** (-30)
        # the oracle is a one-sided difference at eps = 1e-25; its own error
        # is eps times the eigenvalue curvature, a few 1e-21 here
        assert abs(shift - mpfr(SHIFT6_FD)) < mpfr(10) ** (-19)
        assert 0 < overlap <= 1


def test_real_unshifted_lab_converges_at_high_precision():
    ctx = mpcore.PrecisionContext(30)
    H = _asym_hop(8, 1.0, 0.8, ctx)
    form = linalg.schur_qr(H.copy(), ctx, mode="real_unshifted", max_iters=600)
    assert sum(form.block_sizes) == 8
    assert form.block_sizes == [1] * 8
    with ctx.gmp():
        Z = form.Z
        tol = mpfr(10) ** (-24)
        dev = mpcore.max_abs(mpcore.conj_transpose(Z) @ Z - mpcore.eye(8, ctx), ctx)
        assert dev < tol
        recon = Z @ form.T @ mpcore.conj_transpose(Z)
        assert mpcore.max_abs(recon - H, ctx) < tol
        assert len(form.denominator_trace) <= 600
        assert all(v > 0 for v in form.denominator_trace)


def test_real_unshifted_rejects_complex_input():
    ctx = mpcore.PrecisionContext(30)
    A = mpcore.from_list([[1j, 0], [0, 1]], ctx)
    with pytest.raises(ValueError):
        linalg.schur_qr(A, ctx, mode="real_unshifted", max_iters=10)


def test_real_unshifted_symmetric_input_all_single_blocks():
    ctx = mpcore.PrecisionContext(30)
    A = mpcore.from_list([[2, 1, 0], [1, 3, 1], [0, 1, 4]], ctx)
    form = linalg.schur_qr(A, ctx, mode="real_unshifted", max_iters=400)
    assert form.block_sizes == [1, 1, 1]
