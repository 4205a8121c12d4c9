"""Eigenstructure machinery at working precision.

Hessenberg reduction, a complex single-shift (Wilkinson) QR eigensolver with
deflation tied to the working significand, a cyclic-Jacobi Hermitian solver,
extreme singular values by power/inverse-power iteration, condition numbers,
first-order eigenvalue perturbation, and the unshifted real QR-RQ iteration
lab with its small-denominator diagnostic.
"""

import numpy as np
import gmpy2
from gmpy2 import mpfr, mpc

from . import mpcore
from .errors import (NoConvergence, NotHermitian, InfiniteCondition,
                     VanishingOverlap, SingularMatrix)


class SpectrumResult:
    def __init__(self, eigenvalues, right_vectors, residuals):
        self.eigenvalues = eigenvalues
        self.right_vectors = right_vectors
        self.residuals = residuals


class SchurForm:
    def __init__(self, T, Z, block_sizes, denominator_trace=None):
        self.T = T
        self.Z = Z
        self.block_sizes = block_sizes
        self.denominator_trace = denominator_trace


def _abs2(x):
    return gmpy2.norm(x) if isinstance(x, type(mpc(0))) else x * x


# ---------------------------------------------------------------------------
# balancing and Hessenberg reduction

def _balance(A, ctx):
    """Parlett-Reinsch norm equilibration by powers of 2 (no permutations)."""
    with ctx.gmp():
        n = A.shape[0]
        B = A.astype(object).copy()
        D = mpcore.eye(n, ctx)
        radix = mpfr(2)
        done = False
        passes = 0
        while not done and passes < 50:
            done = True
            passes += 1
            for i in range(n):
                c = mpfr(0)
                r = mpfr(0)
                for j in range(n):
                    if j != i:
                        c += abs(B[j, i])
                        r += abs(B[i, j])
                if c == 0 or r == 0:
                    continue
                f = mpfr(1)
                s = c + r
                while c < r / radix:
                    c *= radix
                    r /= radix
                    f *= radix
                while c >= r * radix:
                    c /= radix
                    r *= radix
                    f /= radix
                if (c + r) < mpfr("0.95") * s:
                    done = False
                    D[i, i] = D[i, i] * f
                    B[i, :] = B[i, :] / f
                    B[:, i] = B[:, i] * f
        return B, D


def hessenberg(A, ctx, balance=False):
    """Reduce to upper Hessenberg: A = D Q H Q^dagger D^-1 (D = I if no balance)."""
    with ctx.gmp():
        n = A.shape[0]
        if balance:
            B, D = _balance(A, ctx)
        else:
            B = A.astype(object).copy()
            D = mpcore.eye(n, ctx)
        H = B
        Q = mpcore.eye(n, ctx)
        for k in range(n - 2):
            x = H[k + 1:, k].copy()
            normx2 = mpfr(0)
            for xv in x:
                normx2 += _abs2(xv)
            normx = gmpy2.sqrt(normx2)
            if normx == 0:
                continue
            # skip when already negligible relative to the local diagonal
            off2 = mpfr(0)
            for xv in x[1:]:
                off2 += _abs2(xv)
            if gmpy2.sqrt(off2) <= (abs(H[k, k]) + abs(H[k + 1, k + 1])) * (mpfr(2) ** (1 - ctx.bits)):
                continue
            x0 = x[0]
            a0 = abs(x0)
            phase = x0 / a0 if a0 != 0 else mpfr(1)
            v = x
            v[0] = x0 + phase * normx
            vv = mpfr(0)
            for xv in v:
                vv += _abs2(xv)
            beta = 2 / vv
            w = np.conjugate(v)
            S = (beta * w) @ H[k + 1:, :]
            H[k + 1:, :] = H[k + 1:, :] - np.outer(v, S)
            S = H[:, k + 1:] @ (beta * v)
            H[:, k + 1:] = H[:, k + 1:] - np.outer(S, w)
            S = Q[:, k + 1:] @ (beta * v)
            Q[:, k + 1:] = Q[:, k + 1:] - np.outer(S, w)
            H[k + 2:, k] = mpfr(0)
        return H, Q, D


# ---------------------------------------------------------------------------
# complex single-shift QR

def _givens(f, g):
    """Rotation [[c, s], [-conj(s), c]] with c real zeroing the second entry."""
    if g == 0:
        return mpfr(1), mpfr(0)
    d = gmpy2.sqrt(_abs2(f) + _abs2(g))
    af = abs(f)
    if af == 0:
        # rotate g straight up
        c = mpfr(0)
        s = np.conjugate(g) / d
        return c, s
    c = af / d
    s = (f / af) * np.conjugate(g) / d
    return c, s


def schur_qr(A, ctx, mode="complex_shifted", max_iters=None):
    if mode == "complex_shifted":
        return _schur_complex_shifted(A, ctx, max_iters)
    if mode == "real_unshifted":
        return _schur_real_unshifted(A, ctx, max_iters or 1)
    raise ValueError("unknown mode %r" % mode)


def _schur_complex_shifted(A, ctx, max_iters=None):
    with ctx.gmp():
        n = A.shape[0]
        T, Z, _ = hessenberg(A, ctx, balance=False)
        u = mpfr(2) ** (1 - ctx.bits)
        budget = max_iters if max_iters else 30 * n * max(1, ctx.digits // 16)
        steps = 0
        hi = n - 1
        stagnant = 0
        last_hi = hi
        while hi > 0:
            # deflate converged subdiagonals at the active corner
            while hi > 0 and abs(T[hi, hi - 1]) <= u * (abs(T[hi - 1, hi - 1]) + abs(T[hi, hi])):
                T[hi, hi - 1] = mpfr(0)
                hi -= 1
            if hi == 0:
                break
            if hi != last_hi:
                stagnant = 0
                last_hi = hi
            # find the start of the active irreducible block
            lo = hi
            while lo > 0 and abs(T[lo, lo - 1]) > u * (abs(T[lo - 1, lo - 1]) + abs(T[lo, lo])):
                lo -= 1
            steps += 1
            stagnant += 1
            if steps > budget:
                raise NoConvergence("QR sweep budget exhausted",
                                    context={"n": n, "digits": ctx.digits, "active": (lo, hi)})
            if stagnant % 12 == 0:
                mu = T[hi, hi] + mpfr("1.5") * abs(T[hi, hi - 1])
            else:
                # Wilkinson shift from the trailing 2x2
                a = T[hi - 1, hi - 1]
                b = T[hi - 1, hi]
                c = T[hi, hi - 1]
                d = T[hi, hi]
                tr2 = (a + d) / 2
                det = a * d - b * c
                disc = gmpy2.sqrt(mpc(tr2 * tr2 - det))
                m1 = tr2 + disc
                m2 = tr2 - disc
                mu = m1 if abs(m1 - d) < abs(m2 - d) else m2
            # implicit single shift via explicit first-column rotation chain
            for i in range(lo, hi + 1):
                T[i, i] = T[i, i] - mu
            rots = []
            for k in range(lo, hi):
                c, s = _givens(T[k, k], T[k + 1, k])
                rots.append((k, c, s))
                p = T[k, max(lo, k - 1):].copy()
                q = T[k + 1, max(lo, k - 1):].copy()
                T[k, max(lo, k - 1):] = c * p + s * q
                T[k + 1, max(lo, k - 1):] = -np.conjugate(s) * p + c * q
            for (k, c, s) in rots:
                p = T[:min(hi, k + 2) + 1, k].copy()
                q = T[:min(hi, k + 2) + 1, k + 1].copy()
                T[:min(hi, k + 2) + 1, k] = c * p + np.conjugate(s) * q
                T[:min(hi, k + 2) + 1, k + 1] = -s * p + c * q
                p = Z[:, k].copy()
                q = Z[:, k + 1].copy()
                Z[:, k] = c * p + np.conjugate(s) * q
                Z[:, k + 1] = -s * p + c * q
            for i in range(lo, hi + 1):
                T[i, i] = T[i, i] + mu
        for i in range(1, n):
            T[i, :i] = mpfr(0)
        return SchurForm(T, Z, [1] * n)


# ---------------------------------------------------------------------------
# unshifted real QR-RQ lab (reproduces the double-precision iteration study)

def _schur_real_unshifted(A, ctx, iters):
    """Exactly `iters` QR-RQ steps on a real Hessenberg matrix.

    Each reflector is 2-local because the iterate stays Hessenberg. The
    reflector sign follows Wilkinson (away from cancellation); a column is
    skipped (no reflection) when its subdiagonal is already negligible
    against the neighboring diagonal scale. Per QR call the minimum applied
    v^T v is recorded; calls with no applied reflection record +inf.
    """
    with ctx.gmp():
        n = A.shape[0]
        for x in A.ravel():
            if isinstance(x, type(mpc(0))):
                raise ValueError("real_unshifted requires a real matrix")
        H = A.astype(object).copy()
        # reduce to Hessenberg first if the input is not already banded
        needs = False
        for i in range(2, n):
            for j in range(i - 1):
                if H[i, j] != 0:
                    needs = True
                    break
            if needs:
                break
        Z = mpcore.eye(n, ctx)
        if needs:
            H, Z, _ = hessenberg(A, ctx, balance=False)
        u = mpfr(2) ** (1 - ctx.bits)
        inf = mpfr("inf")
        trace = []
        for _ in range(iters):
            refl = []  # (k, v0, v1, beta)
            call_min = inf
            for k in range(n - 1):
                x0 = H[k, k]
                x1 = H[k + 1, k]
                nxt = abs(H[k + 1, k + 1])
                if abs(x1) <= u * (abs(x0) + nxt):
                    H[k + 1, k] = mpfr(0)
                    continue
                nrm = gmpy2.sqrt(x0 * x0 + x1 * x1)
                v0 = x0 + nrm if x0 >= 0 else x0 - nrm
                v1 = x1
                vv = v0 * v0 + v1 * v1
                if vv < call_min:
                    call_min = vv
                beta = 2 / vv
                refl.append((k, v0, v1, beta))
                # left-apply to rows k, k+1
                p = H[k, k:].copy()
                q = H[k + 1, k:].copy()
                a = beta * (v0 * p + v1 * q)
                H[k, k:] = p - v0 * a
                H[k + 1, k:] = q - v1 * a
                H[k + 1, k] = mpfr(0)
            # right-apply the same reflectors: A <- R Q, and accumulate Z
            for (k, v0, v1, beta) in refl:
                top = min(n, k + 2)
                p = H[:top, k].copy()
                q = H[:top, k + 1].copy()
                a = beta * (v0 * p + v1 * q)
                H[:top, k] = p - a * v0
                H[:top, k + 1] = q - a * v1
                p = Z[:, k].copy()
                q = Z[:, k + 1].copy()
                a = beta * (v0 * p + v1 * q)
                Z[:, k] = p - a * v0
                Z[:, k + 1] = q - a * v1
            trace.append(call_min)
        blocks = _classify_blocks(H, ctx)
        return SchurForm(H, Z, blocks, denominator_trace=trace)


def _classify_blocks(H, ctx):
    """Block sizes of a real Hessenberg iterate.

    Cut at negligible subdiagonals, then eigendecompose each irreducible
    chain; eigenvalues leaving the real axis beyond sqrt(u) of the local
    scale count as conjugate pairs, i.e. 2x2 blocks.
    """
    with ctx.gmp():
        n = H.shape[0]
        u = mpfr(2) ** (1 - ctx.bits)
        cuts = [0]
        for i in range(1, n):
            if abs(H[i, i - 1]) <= u * (abs(H[i - 1, i - 1]) + abs(H[i, i])):
                cuts.append(i)
        cuts.append(n)
        blocks = []
        for a, b in zip(cuts[:-1], cuts[1:]):
            m = b - a
            if m == 1:
                blocks.append(1)
                continue
            seg = H[a:b, a:b].astype(object).copy()
            scale = mpcore.max_abs(seg, ctx)
            if scale == 0:
                scale = mpfr(1)
            tol = gmpy2.sqrt(u) * scale
            sub = _schur_complex_shifted(seg, ctx)
            ims = sorted(float(sub.T[i, i].imag) if isinstance(sub.T[i, i], type(mpc(0))) else 0.0
                         for i in range(m))
            npos = sum(1 for im in ims if im > float(tol))
            nneg = sum(1 for im in ims if im < -float(tol))
            pairs = min(npos, nneg)
            blocks.extend([2] * pairs)
            blocks.extend([1] * (m - 2 * pairs))
        return blocks


def householder_denominator_trace(A, ctx, iters=1):
    """Min v^T v per QR call over `iters` QR-RQ steps (inf when none applied)."""
    form = _schur_real_unshifted(A, ctx, iters)
    return form.denominator_trace


# ---------------------------------------------------------------------------
# eigensolvers

def _phase_fix(v, ctx):
    with ctx.gmp():
        big = 0
        biga = mpfr(-1)
        for i in range(v.shape[0]):
            a = abs(v[i])
            if a > biga:
                biga = a
                big = i
        if biga == 0:
            return v
        ph = v[big] / biga
        return np.conjugate(ph) * v


def eig(A, ctx, max_iters=None):
    """Full spectrum with right eigenvectors and per-pair residuals."""
    with ctx.gmp():
        n = A.shape[0]
        form = _schur_complex_shifted(A, ctx, max_iters)
        T, Z = form.T, form.Z
        u = mpfr(2) ** (1 - ctx.bits)
        vals = []
        vecs = mpcore.zeros(n, n, ctx)
        resids = []
        scale = mpcore.max_abs(T, ctx)
        for k in range(n):
            lam = T[k, k]
            y = np.empty(k + 1, dtype=object)
            y[:] = mpfr(0)
            y[k] = mpfr(1)
            for j in range(k - 1, -1, -1):
                s = T[j, j + 1:k + 1] @ y[j + 1:k + 1]
                d = T[j, j] - lam
                if abs(d) < u * scale:
                    d = u * scale
                y[j] = -s / d
            v = Z[:, :k + 1] @ y
            nrm2 = mpfr(0)
            for xv in v:
                nrm2 += _abs2(xv)
            v = v / gmpy2.sqrt(nrm2)
            v = _phase_fix(v, ctx)
            r = A @ v - lam * v
            rn = mpfr(0)
            for xv in r:
                rn += _abs2(xv)
            vals.append(lam)
            vecs[:, k] = v
            resids.append(gmpy2.sqrt(rn))
        order = sorted(range(n), key=lambda i: (vals[i].real if isinstance(vals[i], type(mpc(0))) else vals[i],
                                                vals[i].imag if isinstance(vals[i], type(mpc(0))) else mpfr(0)))
        vals = [vals[i] for i in order]
        resids = [resids[i] for i in order]
        vecs = vecs[:, order].copy()
        return SpectrumResult(vals, vecs, resids)


def eig_hermitian(A, ctx, max_sweeps=60):
    """Cyclic Jacobi for (numerically) Hermitian matrices."""
    with ctx.gmp():
        n = A.shape[0]
        nrm = mpcore.frobenius_norm(A, ctx)
        dev = mpcore.frobenius_norm(A - mpcore.conj_transpose(A), ctx)
        if nrm > 0 and dev > (mpfr(10) ** (-(ctx.digits - 6))) * nrm:
            raise NotHermitian("deviation %.3g of norm" % float(dev / nrm))
        B = (A + mpcore.conj_transpose(A)) / 2
        V = mpcore.eye(n, ctx)
        tol = (mpfr(10) ** (-(ctx.digits + 2))) * (nrm if nrm > 0 else mpfr(1))
        for _ in range(max_sweeps):
            off = mpfr(0)
            for p in range(n - 1):
                for q in range(p + 1, n):
                    off += _abs2(B[p, q])
            if gmpy2.sqrt(2 * off) <= tol:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = B[p, q]
                    a = abs(apq)
                    if a <= tol / n:
                        continue
                    app = B[p, p].real if isinstance(B[p, p], type(mpc(0))) else B[p, p]
                    aqq = B[q, q].real if isinstance(B[q, q], type(mpc(0))) else B[q, q]
                    # factor the phase of B[p,q] out, then a real Jacobi angle
                    w = np.conjugate(apq) / a
                    tau = (aqq - app) / (2 * a)
                    t = 1 / (abs(tau) + gmpy2.sqrt(1 + tau * tau))
                    if tau < 0:
                        t = -t
                    c = 1 / gmpy2.sqrt(1 + t * t)
                    s = t * c
                    wbar = np.conjugate(w)
                    bp = B[p, :].copy()
                    bq = B[q, :].copy()
                    B[p, :] = c * bp - (s * wbar) * bq
                    B[q, :] = s * bp + (c * wbar) * bq
                    bp = B[:, p].copy()
                    bq = B[:, q].copy()
                    B[:, p] = c * bp - (s * w) * bq
                    B[:, q] = s * bp + (c * w) * bq
                    vp = V[:, p].copy()
                    vq = V[:, q].copy()
                    V[:, p] = c * vp - (s * w) * vq
                    V[:, q] = s * vp + (c * w) * vq
        vals = []
        for i in range(n):
            d = B[i, i]
            vals.append(d.real if isinstance(d, type(mpc(0))) else d)
        order = sorted(range(n), key=lambda i: vals[i])
        vals = [vals[i] for i in order]
        V = V[:, order].copy()
        return vals, V


# ---------------------------------------------------------------------------
# singular values and condition numbers

def extreme_singular_values(A, ctx, rel_tol=None, max_iter=5000, want="both"):
    """(smax, smin) by power iteration on A^H A and inverse power via LU on A.

    want = "max" or "min" skips the other side (returned as None).
    """
    with ctx.gmp():
        n = A.shape[0]
        if rel_tol is None:
            rel_tol = mpfr(10) ** (-12)
        AH = mpcore.conj_transpose(A)
        x = np.empty(n, dtype=object)
        for i in range(n):
            x[i] = mpfr(1) + mpfr(i) / (7 * n + 3)  # deterministic, not axis-aligned
        smax = None
        if want in ("both", "max"):
            lam_old = mpfr(0)
            smax = mpfr(0)
            for _ in range(max_iter):
                y = AH @ (A @ x)
                lam = mpfr(0)
                for i in range(n):
                    lam += (np.conjugate(x[i]) * y[i]).real if isinstance(y[i], type(mpc(0))) else x[i] * y[i]
                nrm2 = mpfr(0)
                for xv in y:
                    nrm2 += _abs2(xv)
                nrm = gmpy2.sqrt(nrm2)
                if nrm == 0:
                    return (mpfr(0), mpfr(0)) if want == "both" else (mpfr(0), None)
                x = y / nrm
                if lam > 0 and abs(lam - lam_old) <= rel_tol * lam:
                    smax = gmpy2.sqrt(lam)
                    break
                lam_old = lam
            else:
                smax = gmpy2.sqrt(abs(lam_old))
            if want == "max":
                return smax, None
        try:
            LU, piv, _ = mpcore.lu_factor(A, ctx)
        except SingularMatrix:
            vals, _ = eig_hermitian(AH @ A, ctx)
            lo = vals[0]
            if lo < 0:
                lo = mpfr(0)
            return smax, gmpy2.sqrt(lo)
        for i in range(n):
            x[i] = mpfr(1) + mpfr((i * i) % (3 * n + 1)) / (5 * n + 2)
        lam_old = mpfr(0)
        smin = mpfr(0)
        for _ in range(max_iter):
            z = mpcore.lu_apply_adjoint(LU, piv, x, ctx)
            y = mpcore.lu_apply(LU, piv, z, ctx)
            lam = mpfr(0)
            for i in range(n):
                lam += (np.conjugate(x[i]) * y[i]).real if isinstance(y[i], type(mpc(0))) else x[i] * y[i]
            nrm2 = mpfr(0)
            for xv in y:
                nrm2 += _abs2(xv)
            nrm = gmpy2.sqrt(nrm2)
            if nrm == 0:
                break
            x = y / nrm
            if lam > 0 and abs(lam - lam_old) <= rel_tol * lam:
                smin = 1 / gmpy2.sqrt(lam)
                break
            lam_old = lam
        else:
            smin = 1 / gmpy2.sqrt(abs(lam_old)) if lam_old > 0 else mpfr(0)
        return smax, smin


def condition_number(V, ctx):
    with ctx.gmp():
        smax, smin = extreme_singular_values(V, ctx)
        if smin == 0:
            raise InfiniteCondition("smin underflowed at working precision")
        return smax / smin


def first_order_eigenshift(H, Delta, j, ctx):
    """First-order eigenvalue shift <L|Delta|R>/<L|R> for eigenpair j.

    Returns (shift, overlap_magnitude). Left vectors come from diagonalizing
    H^dagger rather than inverting the right-vector matrix.
    """
    with ctx.gmp():
        right = eig(H, ctx)
        lam = right.eigenvalues[j]
        left = eig(mpcore.conj_transpose(H), ctx)
        best = None
        bestd = None
        for i, muc in enumerate(left.eigenvalues):
            d = abs(np.conjugate(muc) - lam)
            if bestd is None or d < bestd:
                bestd = d
                best = i
        w = left.right_vectors[:, best]
        v = right.right_vectors[:, j]
        wH = np.conjugate(w)
        overlap = wH @ v
        ov = abs(overlap)
        if ov < mpfr(10) ** (-(2 * ctx.digits)):
            raise VanishingOverlap("left-right overlap %.3g" % float(ov))
        shift = (wH @ (Delta @ v)) / overlap
        return shift, ov
