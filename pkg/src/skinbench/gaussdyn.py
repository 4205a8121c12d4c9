"""Free-fermion Gaussian-state evolution under a non-Hermitian Hamiltonian.

The state is the orbital matrix U of a Slater determinant. One time step
multiplies U by exp(-i h dt) and re-orthonormalizes by QR, accumulating the
discarded normalization in log_norm. Observables (density, currents,
half-chain entropy) come from the correlation matrix C_{i,j} = [U U^dagger]_{j,i}.
"""

import numpy as np
import gmpy2
from gmpy2 import mpfr, mpc

from . import mpcore, linalg, models
from .errors import DegenerateOrbitals, InsufficientWindow


class GaussianState:
    def __init__(self, U, t, log_norm, n_chains=1):
        self.U = U
        self.t = t
        self.log_norm = log_norm
        self.n_chains = n_chains


class ObservableSeries:
    def __init__(self, n_chains=1):
        self.n_chains = n_chains
        self.times = []
        self.density = []
        self.local_current = []
        self.total_current = []
        self.entropy = []
        self.log_propagator_norm = []


class SteadyStateMetrics:
    def __init__(self, middle_width, edge_densities, mean_abs_current,
                 mean_current, mean_density):
        self.middle_width = middle_width
        self.edge_densities = edge_densities
        self.mean_abs_current = mean_abs_current
        self.mean_current = mean_current
        self.mean_density = mean_density


def neel_init(spec, ctx):
    """Alternating-occupation product state as an orbital matrix."""
    if spec.L % 2 != 0:
        raise ValueError("alternating initial state needs even L")
    with ctx.gmp():
        L = spec.L
        if spec.variant == "shn":
            # chain A holds odd sites, chain B even sites; rows interleaved
            U = mpcore.zeros(2 * L, L, ctx)
            col = 0
            for j in range(1, L + 1):
                if j % 2 == 1:
                    U[2 * (j - 1), col] = mpfr(1)
                    col += 1
            for j in range(1, L + 1):
                if j % 2 == 0:
                    U[2 * (j - 1) + 1, col] = mpfr(1)
                    col += 1
            return GaussianState(U, mpfr(0), mpfr(0), n_chains=2)
        U = mpcore.zeros(L, L // 2, ctx)
        for col, j in enumerate(range(2, L + 1, 2)):
            U[j - 1, col] = mpfr(1)
        return GaussianState(U, mpfr(0), mpfr(0), n_chains=1)


def evolve_step(state, h, dt, ctx, propagator=None):
    """One step: U <- qr(exp(-i h dt) U).Q, discarded norm accumulated."""
    with ctx.gmp():
        if propagator is None:
            propagator = mpcore.matrix_exp(mpc(0, -mpfr(dt)) * h, ctx)
        M = propagator @ state.U
        Q, R = mpcore.householder_qr(M, ctx)
        floor = mpfr(10) ** (-(2 * ctx.digits))
        inc = mpfr(0)
        t_new = state.t + mpfr(dt)
        for k in range(R.shape[0]):
            rkk = R[k, k]
            if rkk < floor:
                raise DegenerateOrbitals("orbital %d collapsed (R_kk = %s)"
                                         % (k, mpcore.format_scalar(rkk, 3)), t=float(t_new))
            inc += gmpy2.log(rkk)
        return GaussianState(Q, t_new, state.log_norm + inc, state.n_chains)


def correlation_matrix(state):
    """C with C_{i,j} = [U U^dagger]_{j,i}."""
    U = state.U
    return np.conjugate(U) @ U.T


def _chain_rows(state):
    m = state.U.shape[0]
    if state.n_chains == 2:
        return [list(range(0, m, 2)), list(range(1, m, 2))]
    return [list(range(m))]


def measure(state, ctx):
    """(density, per-chain local currents, per-chain total current, entropy)."""
    with ctx.gmp():
        U = state.U
        m, N = U.shape
        Uc = np.conjugate(U)
        density = []
        for j in range(m):
            density.append((U[j, :] @ Uc[j, :]).real)
        chains = _chain_rows(state)
        local = []
        total = []
        for rows in chains:
            cur = []
            tot = mpfr(0)
            for a, b in zip(rows[:-1], rows[1:]):
                # C_{a,b} = <c^dag_a c_b>; I = (i/2)(C_{a,b} - C_{b,a}) with J = 1
                cab = U[b, :] @ Uc[a, :]
                ij = (mpc(0, 1) * (cab - np.conjugate(cab)) / 2).real
                cur.append(ij)
                tot += ij
            local.append(cur)
            total.append(tot)
        half = m // 2
        Uh = U[:half, :]
        B = np.conjugate(Uh) @ Uh.T
        lams, _ = linalg.eig_hermitian(B, ctx)
        P = ctx.digits
        tol = mpfr(10) ** (-(P - 6))
        clamp_lo = mpfr(10) ** (-P)
        clamp_hi = 1 - clamp_lo
        S = mpfr(0)
        for lam in lams:
            if lam <= tol or lam >= 1 - tol:
                continue
            if lam < clamp_lo:
                lam = clamp_lo
            elif lam > clamp_hi:
                lam = clamp_hi
            S += -(lam * gmpy2.log(lam) + (1 - lam) * gmpy2.log(1 - lam))
        return density, local, total, S


def run_evolution(spec, dt, t_max, ctx, record_every=1):
    """Step the alternating initial state to t_max, sampling observables."""
    with ctx.gmp():
        h = models.build(spec, ctx)
        state = neel_init(spec, ctx)
        propagator = mpcore.matrix_exp(mpc(0, -mpfr(dt)) * h, ctx)
        series = ObservableSeries(n_chains=state.n_chains)
        nsteps = int(round(float(t_max) / float(dt)))

        def record(st):
            density, local, total, S = measure(st, ctx)
            series.times.append(st.t)
            series.density.append(density)
            series.local_current.append(local)
            series.total_current.append(total)
            series.entropy.append(S)
            series.log_propagator_norm.append(st.log_norm)

        record(state)
        for k in range(1, nsteps + 1):
            state = evolve_step(state, h, dt, ctx, propagator=propagator)
            if k % record_every == 0 or k == nsteps:
                record(state)
        return series


def steady_state_metrics(series, window):
    """Late-window averages: middle-region width, edge densities, currents."""
    t0 = float(series.times[0])
    t1 = float(series.times[-1])
    if t1 - t0 < float(window) - 1e-9:
        raise InsufficientWindow("series spans %.3f, window needs %.3f" % (t1 - t0, float(window)))
    cut = t1 - float(window) - 1e-9
    idx = [i for i, t in enumerate(series.times) if float(t) >= cut]
    nt = len(idx)
    m = len(series.density[0])
    mean_density = [sum(series.density[i][j] for i in idx) / nt for j in range(m)]
    n_chains = series.n_chains
    if n_chains == 2:
        rows_per_chain = [list(range(0, m, 2)), list(range(1, m, 2))]
    else:
        rows_per_chain = [list(range(m))]
    middle = []
    edges = []
    for rows in rows_per_chain:
        nbar = [mean_density[r] for r in rows]
        middle.append(sum(1 for x in nbar if mpfr("0.05") < x < mpfr("0.95")))
        edges.append((nbar[0], nbar[-1]))
    mean_abs = []
    mean_cur = []
    for c in range(n_chains):
        vals = [series.total_current[i][c] for i in idx]
        mean_abs.append(sum(abs(v) for v in vals) / nt)
        mean_cur.append(sum(vals) / nt)
    if n_chains == 1:
        return SteadyStateMetrics(middle[0], edges[0], mean_abs[0], mean_cur[0], mean_density)
    return SteadyStateMetrics(middle, edges, mean_abs, mean_cur, mean_density)


def propagator_norm_series(h, dt, t_max, ctx):
    """(t, log ||exp(-i h t)||) series with per-step rescaling by smax."""
    with ctx.gmp():
        n = h.shape[0]
        expd = mpcore.matrix_exp(mpc(0, -mpfr(dt)) * h, ctx)
        M = mpcore.eye(n, ctx)
        log_acc = mpfr(0)
        out = [(mpfr(0), mpfr(0))]
        nsteps = int(round(float(t_max) / float(dt)))
        for k in range(1, nsteps + 1):
            M = expd @ M
            s, _ = linalg.extreme_singular_values(M, ctx, want="max")
            out.append((mpfr(k) * mpfr(dt), log_acc + gmpy2.log(s)))
            M = M / s
            log_acc += gmpy2.log(s)
        return out
