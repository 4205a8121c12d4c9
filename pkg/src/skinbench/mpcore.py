"""Arbitrary-precision complex matrix arithmetic on top of gmpy2 (MPFR/MPC).

Matrices are dense numpy object arrays holding gmpy2.mpfr / gmpy2.mpc scalars.
Every operation takes a PrecisionContext and runs inside the corresponding
gmpy2 context so that all intermediate rounding happens at the working
precision. The user-facing knob is decimal significant digits P; the binary
significand width is bits = max(53, ceil(P*log2(10))), and a separate
double-emulation mode pins bits = 53.
"""

import math

import numpy as np
import gmpy2
from gmpy2 import mpfr, mpc

from .errors import SingularMatrix


class PrecisionContext:
    """Working precision: decimal digits P and the derived binary width."""

    def __init__(self, digits, double_emulation=False):
        if digits < 1:
            raise ValueError("digits must be a positive integer")
        self.digits = int(digits)
        self.double_emulation = bool(double_emulation)
        if double_emulation:
            self.bits = 53
        else:
            self.bits = max(53, math.ceil(self.digits * math.log2(10)))

    def __repr__(self):
        tag = ", double_emulation=True" if self.double_emulation else ""
        return "PrecisionContext(digits=%d%s)  # %d bits" % (self.digits, tag, self.bits)

    def gmp(self):
        """gmpy2 context manager for this precision (round-to-nearest)."""
        return gmpy2.context(precision=self.bits)

    @property
    def eps(self):
        """Unit roundoff 2^(1-bits)."""
        with self.gmp():
            return mpfr(2) ** (1 - self.bits)


def with_precision(digits):
    return PrecisionContext(digits)


def double_equivalent():
    """53-bit significand context emulating hardware double."""
    return PrecisionContext(16, double_emulation=True)


# ---------------------------------------------------------------------------
# constructors and conversions

def zeros(m, n, ctx):
    with ctx.gmp():
        A = np.empty((m, n), dtype=object)
        A[:, :] = mpfr(0)
        return A.copy()


def eye(n, ctx):
    A = zeros(n, n, ctx)
    with ctx.gmp():
        for i in range(n):
            A[i, i] = mpfr(1)
    return A


def from_list(rows, ctx):
    """Build a matrix from nested lists of python numbers / strings / gmpy2 scalars."""
    with ctx.gmp():
        m = len(rows)
        n = len(rows[0])
        A = np.empty((m, n), dtype=object)
        for i in range(m):
            for j in range(n):
                A[i, j] = to_scalar(rows[i][j], ctx)
        return A


def to_scalar(x, ctx):
    with ctx.gmp():
        if isinstance(x, (type(mpfr(0)), type(mpc(0)))):
            return +x  # re-round at this context
        if isinstance(x, complex):
            return mpc(mpfr(x.real), mpfr(x.imag))
        if isinstance(x, str):
            return mpfr(x)
        return mpfr(x)


def to_complex128(A):
    """Lossy conversion to a numpy complex128 array (for reporting only)."""
    out = np.empty(A.shape, dtype=complex)
    flat_in = A.ravel()
    flat_out = out.ravel()
    for k in range(flat_in.size):
        x = flat_in[k]
        if isinstance(x, type(mpc(0))):
            flat_out[k] = complex(float(x.real), float(x.imag))
        else:
            flat_out[k] = complex(float(x), 0.0)
    return out


def format_scalar(x, sig):
    """Scientific-notation string with sig significant digits.

    gmpy2's digits() is used directly because format() on mpfr does not
    honor large precision fields reliably.
    """
    if isinstance(x, type(mpc(0))):
        raise TypeError("format_scalar takes a real scalar")
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    ds, exp, _ = gmpy2.digits(x, 10, sig)
    neg = ds.startswith("-")
    if neg:
        ds = ds[1:]
    mant = ds[0] + "." + ds[1:] if len(ds) > 1 else ds[0]
    s = "%s%se%+03d" % ("-" if neg else "", mant, exp - 1)
    return s


# ---------------------------------------------------------------------------
# elementwise helpers (callers are expected to hold the gmp context already
# when composing many of these; each helper also works standalone)

def _conj(x):
    return x.conjugate()


def conj_transpose(A):
    return np.conjugate(A.T).copy()


def frobenius_norm(A, ctx):
    with ctx.gmp():
        s = mpfr(0)
        for x in A.ravel():
            s += gmpy2.norm(x) if isinstance(x, type(mpc(0))) else x * x
        return gmpy2.sqrt(s)


def max_abs(A, ctx):
    with ctx.gmp():
        m = mpfr(0)
        for x in A.ravel():
            a = abs(x)
            if a > m:
                m = a
        return m


def matmul(A, B, ctx):
    with ctx.gmp():
        return A @ B


# ---------------------------------------------------------------------------
# Householder QR

def householder_qr(A, ctx):
    """Economy QR with real non-negative R diagonal.

    Q is m x n with orthonormal columns, R is n x n upper triangular. The
    reflector phase is chosen away from cancellation; a final column-phase
    pass makes every R[k,k] real and non-negative so the factorization is
    deterministic. A zero column yields R[k,k] = 0 and a deterministic
    completing column in Q (the lowest-index unit vector orthogonal to the
    columns already fixed).
    """
    with ctx.gmp():
        m, n = A.shape
        if m < n:
            raise ValueError("householder_qr needs rows >= cols")
        R = A.astype(object).copy()
        vs = []  # (k, v, beta) reflectors, or (k, None, None) for skipped columns
        tiny = mpfr(10) ** (-(2 * ctx.digits))
        col_scale = max_abs(A, ctx)
        zero_col_thresh = col_scale * tiny
        for k in range(n):
            x = R[k:, k].copy()
            normx2 = mpfr(0)
            for xv in x:
                normx2 += gmpy2.norm(xv) if isinstance(xv, type(mpc(0))) else xv * xv
            normx = gmpy2.sqrt(normx2)
            if normx <= zero_col_thresh:
                # structurally zero column: record no reflector, pin R entry to 0
                vs.append((k, None, None))
                R[k:, k] = mpfr(0)
                continue
            x0 = x[0]
            a0 = abs(x0)
            if a0 == 0:
                phase = mpfr(1)
            else:
                phase = x0 / a0
            v = x
            v[0] = x0 + phase * normx
            vv = mpfr(0)
            for xv in v:
                vv += gmpy2.norm(xv) if isinstance(xv, type(mpc(0))) else xv * xv
            beta = 2 / vv
            w = np.conjugate(v)
            S = (beta * w) @ R[k:, k:]
            R[k:, k:] = R[k:, k:] - np.outer(v, S)
            R[k + 1:, k] = mpfr(0)
            vs.append((k, v, beta))
        # accumulate Q by applying reflectors to the leading n columns of I
        Q = np.empty((m, n), dtype=object)
        Q[:, :] = mpfr(0)
        for i in range(n):
            Q[i, i] = mpfr(1)
        completing = []
        for k, v, beta in reversed(vs):
            if v is None:
                completing.append(k)
                continue
            w = np.conjugate(v)
            S = (beta * w) @ Q[k:, :]
            Q[k:, :] = Q[k:, :] - np.outer(v, S)
        # deterministic completing columns for zero input columns
        for k in completing:
            # pick the lowest unit vector, orthogonalize against all other columns
            for cand in range(m):
                col = np.empty(m, dtype=object)
                col[:] = mpfr(0)
                col[cand] = mpfr(1)
                for j in range(n):
                    if j == k:
                        continue
                    ov = np.conjugate(Q[:, j]) @ col
                    col = col - ov * Q[:, j]
                nrm2 = mpfr(0)
                for xv in col:
                    nrm2 += gmpy2.norm(xv) if isinstance(xv, type(mpc(0))) else xv * xv
                nrm = gmpy2.sqrt(nrm2)
                if nrm > mpfr("0.5"):
                    Q[:, k] = col / nrm
                    break
        R = R[:n, :].copy()
        # phase pass: make R diagonal real non-negative
        for k in range(n):
            d = R[k, k]
            a = abs(d)
            if a == 0:
                continue
            ph = d / a
            R[k, k:] = np.conjugate(ph) * R[k, k:]
            R[k, k] = a
            Q[:, k] = ph * Q[:, k]
        return Q, R


# ---------------------------------------------------------------------------
# LU with partial pivoting

def lu_factor(A, ctx):
    """Returns (LU, piv, scale). Raises SingularMatrix on pivot underflow."""
    with ctx.gmp():
        n = A.shape[0]
        LU = A.astype(object).copy()
        piv = list(range(n))
        scale = max_abs(A, ctx)
        if scale == 0:
            raise SingularMatrix("zero matrix")
        thresh = scale * (mpfr(10) ** (-(2 * ctx.digits)))
        for k in range(n):
            p = k
            best = abs(LU[k, k])
            for i in range(k + 1, n):
                a = abs(LU[i, k])
                if a > best:
                    best = a
                    p = i
            if best <= thresh:
                raise SingularMatrix("pivot %d below 10^-2P * norm" % k)
            if p != k:
                LU[[k, p], :] = LU[[p, k], :]
                piv[k], piv[p] = piv[p], piv[k]
            inv = 1 / LU[k, k]
            for i in range(k + 1, n):
                f = LU[i, k] * inv
                LU[i, k] = f
                LU[i, k + 1:] = LU[i, k + 1:] - f * LU[k, k + 1:]
        return LU, piv, scale


def lu_apply(LU, piv, B, ctx):
    """Solve with prepared factors."""
    with ctx.gmp():
        n = LU.shape[0]
        onecol = B.ndim == 1
        Bm = B.reshape(n, -1) if onecol else B
        X = np.empty_like(Bm)
        for j in range(Bm.shape[1]):
            X[:, j] = Bm[piv, j]
        for k in range(n):
            for i in range(k + 1, n):
                X[i, :] = X[i, :] - LU[i, k] * X[k, :]
        for k in range(n - 1, -1, -1):
            X[k, :] = X[k, :] / LU[k, k]
            for i in range(k):
                X[i, :] = X[i, :] - LU[i, k] * X[k, :]
        return X.reshape(B.shape) if onecol else X


def lu_apply_adjoint(LU, piv, B, ctx):
    """Solve A^dagger X = B reusing the factors of A (P A = L U)."""
    with ctx.gmp():
        n = LU.shape[0]
        onecol = B.ndim == 1
        Bm = B.reshape(n, -1) if onecol else B
        X = Bm.astype(object).copy()
        # A^H = U^H L^H P: forward solve on U^H, back solve on L^H, unpermute.
        for k in range(n):
            X[k, :] = X[k, :] / _conj(LU[k, k])
            for i in range(k + 1, n):
                X[i, :] = X[i, :] - _conj(LU[k, i]) * X[k, :]
        for k in range(n - 1, -1, -1):
            for i in range(k + 1, n):
                X[k, :] = X[k, :] - _conj(LU[i, k]) * X[i, :]
        out = np.empty_like(X)
        for j in range(X.shape[1]):
            for i in range(n):
                out[piv[i], j] = X[i, j]
        return out.reshape(B.shape) if onecol else out


def lu_solve(A, B, ctx):
    LU, piv, _ = lu_factor(A, ctx)
    return lu_apply(LU, piv, B, ctx)


# ---------------------------------------------------------------------------
# matrix exponential

def matrix_exp(A, ctx):
    """exp(A) by scaling and squaring with a Taylor series.

    A is scaled by 2^-s so the scaled norm is at most 1/2, terms are summed
    until the term norm drops below 10^-(P+10), then the result is squared
    s times. Deliberately independent of any eigendecomposition.
    """
    with ctx.gmp():
        n = A.shape[0]
        nrm = frobenius_norm(A, ctx)
        s = 0
        half = mpfr("0.5")
        while nrm > half:
            nrm = nrm / 2
            s += 1
        As = A / (mpfr(2) ** s) if s else A.astype(object).copy()
        E = eye(n, ctx)
        term = eye(n, ctx)
        cutoff = mpfr(10) ** (-(ctx.digits + 10))
        k = 1
        while True:
            term = (term @ As) / k
            E = E + term
            if frobenius_norm(term, ctx) < cutoff:
                break
            k += 1
            if k > 1000:
                break
        for _ in range(s):
            E = E @ E
        return E
