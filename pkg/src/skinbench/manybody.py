"""Fock-space branch: the interacting non-reciprocal chain and disorder sweeps.

Spinless fermions on L sites with asymmetric hoppings, nearest-neighbor
interaction U_int, exact diagonalization in the fixed-N sector, the r^(N(L-N))
condition-number closed form from the diagonal similarity weight, and the
disorder-averaged condition-number table.
"""

import math

import gmpy2
from gmpy2 import mpfr

from . import mpcore, linalg, models, gaussdyn
from ._rng import cell_seed
from .errors import DimensionTooLarge, NoConvergence

MAX_SITES = 16


class FockBasis:
    def __init__(self, L, N, states):
        self.L = L
        self.N = N
        self.states = states
        self.index = {s: i for i, s in enumerate(states)}


class ManyBodySpec:
    def __init__(self, L, N, J=1.0, gamma=0.0, U_int=0.0, bc="obc"):
        if bc not in ("obc", "pbc"):
            raise ValueError("unknown bc %r" % bc)
        self.L = int(L)
        self.N = int(N)
        self.J = float(J)
        self.gamma = float(gamma)
        self.U_int = float(U_int)
        self.bc = bc

    def to_dict(self):
        return {"model": "interacting_hn", "L": self.L, "N": self.N,
                "J": self.J, "gamma": self.gamma, "U_int": self.U_int,
                "bc": self.bc}


def fock_basis(L, N):
    """All L-bit patterns with N set bits, ascending (bit i = site i+1)."""
    if L > MAX_SITES:
        raise DimensionTooLarge("L = %d exceeds the %d-site guard" % (L, MAX_SITES))
    if not (0 <= N <= L):
        raise ValueError("need 0 <= N <= L")
    states = [s for s in range(1 << L) if bin(s).count("1") == N]
    return FockBasis(L, N, states)


def build_interacting(spec, ctx):
    """Dense N-sector matrix with fermionic signs from site-ascending ordering."""
    basis = fock_basis(spec.L, spec.N)
    L, N = spec.L, spec.N
    dim = len(basis.states)
    with ctx.gmp():
        J = mpfr(spec.J)
        g = mpfr(spec.gamma)
        U = mpfr(spec.U_int)
        fwd = J + g   # c^dag_{j+1} c_j
        bwd = J - g   # c^dag_j c_{j+1}
        H = mpcore.zeros(dim, dim, ctx)
        for col, s in enumerate(basis.states):
            pairs = 0
            for i in range(L - 1):
                if (s >> i) & 1 and (s >> (i + 1)) & 1:
                    pairs += 1
            if spec.bc == "pbc" and L > 2:
                if (s >> (L - 1)) & 1 and s & 1:
                    pairs += 1
            if pairs:
                H[col, col] = H[col, col] + U * pairs
            for i in range(L - 1):
                occ_i = (s >> i) & 1
                occ_j = (s >> (i + 1)) & 1
                if occ_i and not occ_j:
                    t = s ^ (1 << i) ^ (1 << (i + 1))
                    H[basis.index[t], col] = H[basis.index[t], col] + fwd
                elif occ_j and not occ_i:
                    t = s ^ (1 << i) ^ (1 << (i + 1))
                    H[basis.index[t], col] = H[basis.index[t], col] + bwd
            if spec.bc == "pbc" and L > 2:
                # wrap hop crosses the whole occupied string
                occ_1 = s & 1
                occ_L = (s >> (L - 1)) & 1
                sign = -1 if (N - occ_1 - occ_L) % 2 else 1
                if occ_L and not occ_1:
                    t = s ^ (1 << (L - 1)) ^ 1
                    H[basis.index[t], col] = H[basis.index[t], col] + sign * fwd
                elif occ_1 and not occ_L:
                    t = s ^ (1 << (L - 1)) ^ 1
                    H[basis.index[t], col] = H[basis.index[t], col] + sign * bwd
        return H


def weight_span(L, N):
    """Brute-force max - min of sum(j * n_j) over the (L, N) basis."""
    lo = None
    hi = None
    for s in fock_basis(L, N).states:
        w = sum(j + 1 for j in range(L) if (s >> j) & 1)
        if lo is None or w < lo:
            lo = w
        if hi is None or w > hi:
            hi = w
    return hi - lo


def interacting_condition_closed_form(spec):
    """cond of the diagonal similarity weight in the N sector: r^(N(L-N))."""
    if abs(spec.gamma) >= spec.J:
        raise ValueError("closed form needs |gamma| < J")
    r = math.sqrt((spec.J + spec.gamma) / (spec.J - spec.gamma))
    delta = spec.N * (spec.L - spec.N)
    return r ** delta


def mb_propagator_norm(spec, dt, t_max, ctx):
    H = build_interacting(spec, ctx)
    return gaussdyn.propagator_norm_series(H, dt, t_max, ctx)


def disorder_condition_sweep(J, gamma, W_list, L_list, n_samples, seed, ctx):
    """Mean log10 cond of the eigenvector matrix per (W, L) cell.

    Per-sample seeds derive from the run seed and the cell labels, so any
    subset of cells reproduces the same matrices. Returns (samples, summary).
    """
    samples = []
    summary = []
    for W in W_list:
        for L in L_list:
            logs = []
            for k in range(n_samples):
                sd = cell_seed(seed, float(W), int(L), k)
                spec = models.ModelSpec("disordered_hn", L, J=J, gamma=gamma,
                                        W=W, seed=sd)
                H = models.build(spec, ctx)
                try:
                    res = linalg.eig(H, ctx)
                    c = linalg.condition_number(res.right_vectors, ctx)
                except NoConvergence as e:
                    raise NoConvergence(str(e), context={"W": W, "L": L, "sample": k}) from e
                with ctx.gmp():
                    lg = float(gmpy2.log10(c))
                samples.append({"W": W, "L": L, "sample": k, "log10_cond": lg})
                logs.append(lg)
            mean = sum(logs) / len(logs)
            if len(logs) > 1:
                var = sum((x - mean) ** 2 for x in logs) / (len(logs) - 1)
                stderr = math.sqrt(var / len(logs))
            else:
                stderr = 0.0
            summary.append({"W": W, "L": L, "mean_log10_cond": mean, "stderr": stderr})
    return samples, summary
