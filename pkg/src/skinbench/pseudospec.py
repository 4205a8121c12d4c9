"""Pseudospectrum tools: resolvent-norm grids and perturbed eigenvalue clouds.

The grid stores log10 of smin(zI - H) point by point; the cloud diagonalizes
H + Delta for random Delta with norm below epsilon. Both definitions of the
epsilon-pseudospectrum can then be compared, and the Bauer-Fike sandwich
dist/cond <= smin <= dist is checked against a closed-form condition number.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import gmpy2
from gmpy2 import mpfr, mpc

from . import mpcore, linalg
from ._rng import Xorshift64Star
from .errors import NoConvergence

SENTINEL = mpfr(-10) ** 6


def thread_count():
    try:
        return max(1, int(os.environ.get("SKINBENCH_THREADS", "1")))
    except ValueError:
        return 1


class GridSpec:
    def __init__(self, re_min, re_max, im_min, im_max, nx, ny):
        if not (re_min < re_max and im_min < im_max):
            raise ValueError("grid bounds must be increasing")
        if nx < 2 or ny < 2:
            raise ValueError("grid needs at least 2 points per axis")
        self.re_min = float(re_min)
        self.re_max = float(re_max)
        self.im_min = float(im_min)
        self.im_max = float(im_max)
        self.nx = int(nx)
        self.ny = int(ny)

    def points(self):
        """Row-major (iy outer, ix inner) grid coordinates as floats."""
        dx = (self.re_max - self.re_min) / (self.nx - 1)
        dy = (self.im_max - self.im_min) / (self.ny - 1)
        for iy in range(self.ny):
            for ix in range(self.nx):
                yield iy, ix, self.re_min + ix * dx, self.im_min + iy * dy


class PseudospectrumGrid:
    def __init__(self, grid, log10_smin, spectrum):
        self.grid = grid
        self.log10_smin = log10_smin
        self.spectrum = spectrum


class PerturbedCloud:
    def __init__(self, values, seed, n_samples):
        self.values = values    # list of (sample_index, eigenvalue)
        self.seed = seed
        self.n_samples = n_samples


def _smin_at(H, re, im, ctx):
    with ctx.gmp():
        n = H.shape[0]
        A = -H.astype(object)
        z = mpc(mpfr(re), mpfr(im))
        for i in range(n):
            A[i, i] = A[i, i] + z
        _, smin = linalg.extreme_singular_values(A, ctx, want="min")
        if smin == 0:
            return SENTINEL
        return gmpy2.log10(smin)


def resolvent_norm_grid(H, grid, ctx):
    """log10 smin(zI - H) over the grid, row-major; -1e6 marks exact hits."""
    with ctx.gmp():
        form = linalg.schur_qr(H.astype(object).copy(), ctx)
        vals = sorted((form.T[i, i] for i in range(H.shape[0])),
                      key=lambda v: (v.real, v.imag) if isinstance(v, type(mpc(0))) else (v, 0))
    pts = list(grid.points())
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda p: _smin_at(H, p[2], p[3], ctx), pts))
    else:
        results = [_smin_at(H, p[2], p[3], ctx) for p in pts]
    rows = [[None] * grid.nx for _ in range(grid.ny)]
    for (iy, ix, _, _), v in zip(pts, results):
        rows[iy][ix] = v
    return PseudospectrumGrid(grid, rows, vals)


def sandwich_check(pg, cond, digits, spectrum=None):
    """Verify dist/cond - tol <= smin <= dist + tol at every grid point.

    Returns (ok, worst_lower_margin, worst_upper_margin); margins are the
    most negative slack seen on each side (>= 0 means the side held).
    """
    spec = pg.spectrum if spectrum is None else spectrum
    tol = mpfr(10) ** (-(digits - 6))
    lo_margin = mpfr("inf")
    hi_margin = mpfr("inf")
    for iy, ix, re, im in pg.grid.points():
        z = mpc(mpfr(re), mpfr(im))
        dist = min(abs(z - v) for v in spec)
        v = pg.log10_smin[iy][ix]
        smin = mpfr(0) if v == SENTINEL else mpfr(10) ** v
        lo = smin - (dist / cond - tol)
        hi = (dist + tol) - smin
        if lo < lo_margin:
            lo_margin = lo
        if hi < hi_margin:
            hi_margin = hi
    return (lo_margin >= 0 and hi_margin >= 0), lo_margin, hi_margin


def perturbed_eigencloud(H, epsilon, n_samples, seed, ctx):
    """Eigenvalues of H + Delta for n_samples random Delta, ||Delta|| < epsilon.

    Delta is a complex Gaussian matrix rescaled so its largest singular value
    is epsilon * u with u drawn uniform in (0,1) first, then the entries.
    """
    n = H.shape[0]
    rng = Xorshift64Star(seed)
    out = []
    for s in range(n_samples):
        u = rng.uniform()
        while u == 0.0:
            u = rng.uniform()
        G = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                a, b = rng.normal_pair()
                G[i, j] = complex(a, b)
        smax = float(np.linalg.norm(G, 2))
        scale = epsilon * u / smax
        with ctx.gmp():
            D = mpcore.zeros(n, n, ctx)
            for i in range(n):
                for j in range(n):
                    D[i, j] = mpc(mpfr(G[i, j].real) * mpfr(scale),
                                  mpfr(G[i, j].imag) * mpfr(scale))
            try:
                res = linalg.eig(H + D, ctx)
            except NoConvergence as e:
                raise NoConvergence(str(e), context={"sample": s}) from e
        for v in res.eigenvalues:
            out.append((s, v))
    return PerturbedCloud(out, seed, n_samples)
