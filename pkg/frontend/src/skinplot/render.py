"""Rendering of plot jobs with matplotlib."""

import math

import matplotlib
matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "skinplot"
import matplotlib.pyplot as plt
import numpy as np

from .jobs import SchemaMismatch, read_table, density_columns
from .marching import contour_lines


def render(job):
    """Render the job and write its output image. Returns the path."""
    header, rows = read_table(job.input_csv, job.kind)
    fig = plt.figure(figsize=(6.4, 4.8))
    try:
        _DRAW[job.kind](fig, header, rows, job.options)
        fig.tight_layout()
        kwargs = {}
        if str(job.output_image).endswith(".svg"):
            kwargs["metadata"] = {"Date": None}
        fig.savefig(job.output_image, **kwargs)
    finally:
        plt.close(fig)
    return job.output_image


def _col(header, name):
    return header.index(name)


def _density_block(header, rows):
    it = _col(header, "t")
    cols = density_columns(header)
    if not cols:
        raise SchemaMismatch("missing column family 'n_*'")
    rows = sorted(rows, key=lambda r: r[it])
    t = np.array([r[it] for r in rows])
    dens = np.array([[r[c] for c in cols] for r in rows])
    return t, dens


def _draw_density_heatmap(fig, header, rows, options):
    t, dens = _density_block(header, rows)
    ax = fig.add_subplot(111)
    nsite = dens.shape[1]
    im = ax.imshow(dens.T, aspect="auto", origin="lower",
                   extent=(t[0], t[-1], 0.5, nsite + 0.5),
                   cmap="viridis", vmin=0.0, vmax=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("site")
    fig.colorbar(im, ax=ax, label="occupation")


def _draw_steady_profile(fig, header, rows, options):
    t, dens = _density_block(header, rows)
    window = options.get("window")
    if window is None:
        window = 0.25 * (t[-1] - t[0])
    mask = t >= t[-1] - window - 1e-12
    prof = dens[mask].mean(axis=0)
    sites = np.arange(1, dens.shape[1] + 1)
    ax = fig.add_subplot(111)
    ax.plot(sites, prof, "o-", ms=4)
    ax.set_xlabel("site")
    ax.set_ylabel("mean occupation")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(True, alpha=0.3)


def grid_from_rows(header, rows):
    """Rebuild the (xs, ys, Z) grid from flat re, im, value rows."""
    ire = _col(header, "re")
    iim = _col(header, "im")
    iv = _col(header, "log10_smin")
    xs = sorted({r[ire] for r in rows})
    ys = sorted({r[iim] for r in rows})
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    Z = [[math.nan] * len(xs) for _ in ys]
    for r in rows:
        Z[yi[r[iim]]][xi[r[ire]]] = r[iv]
    return xs, ys, Z


def _decade_levels(Z, requested):
    if requested:
        return list(requested)
    vals = [v for row in Z for v in row if not math.isnan(v)]
    lo, hi = min(vals), max(vals)
    levels = [k for k in range(math.ceil(lo), math.floor(hi) + 1)]
    if not levels:
        levels = [0.5 * (lo + hi)]
    return levels


def _draw_pseudo_contour(fig, header, rows, options):
    xs, ys, Z = grid_from_rows(header, rows)
    if len(xs) < 2 or len(ys) < 2:
        raise SchemaMismatch("grid needs at least two distinct re and im values")
    levels = _decade_levels(Z, options.get("levels"))
    ax = fig.add_subplot(111)
    cmap = plt.get_cmap("viridis")
    lo, hi = min(levels), max(levels)
    span = (hi - lo) or 1.0
    for lev in levels:
        color = cmap((lev - lo) / span)
        for line in contour_lines(xs, ys, Z, lev):
            px = [p[0] for p in line]
            py = [p[1] for p in line]
            ax.plot(px, py, color=color, lw=1.0)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title("log10 smin decades %g..%g" % (lo, hi))


def _draw_wavefunction_log(fig, header, rows, options):
    isite = _col(header, "site")
    iidx = _col(header, "index")
    iabs = _col(header, "abs_psi")
    groups = {}
    for r in rows:
        groups.setdefault(int(r[iidx]), []).append((r[isite], r[iabs]))
    ax = fig.add_subplot(111)
    env = {}
    for idx in sorted(groups):
        pts = sorted(groups[idx])
        s = [p[0] for p in pts]
        a = [p[1] if p[1] > 0 else math.nan for p in pts]
        ax.semilogy(s, a, lw=0.7, alpha=0.5)
        for site, val in pts:
            if val > 0 and val > env.get(site, 0.0):
                env[site] = val
    # reference exponential through the envelope peak
    fit_pts = [(s, math.log(v)) for s, v in sorted(env.items()) if v > 1e-300]
    if len(fit_pts) >= 2:
        slope = _lsq_slope(fit_pts)
        xi = options.get("xi")
        if xi:
            slope = math.copysign(1.0 / xi, slope if slope else 1.0)
        s_peak, v_peak = max(env.items(), key=lambda kv: kv[1])
        s_all = sorted(env)
        ref = [v_peak * math.exp(slope * (s - s_peak)) for s in s_all]
        ax.semilogy(s_all, ref, "k--", lw=1.2,
                    label="exp slope %.3f per site" % slope)
        ax.legend(loc="best")
    ax.set_xlabel("site")
    ax.set_ylabel("|psi|")
    ax.grid(True, which="both", alpha=0.3)


def _lsq_slope(pairs):
    n = len(pairs)
    mx = sum(p[0] for p in pairs) / n
    my = sum(p[1] for p in pairs) / n
    num = sum((p[0] - mx) * (p[1] - my) for p in pairs)
    den = sum((p[0] - mx) ** 2 for p in pairs)
    return num / den if den else 0.0


def _draw_norm_growth(fig, header, rows, options):
    it = _col(header, "t")
    inorm = _col(header, "log_norm")
    rows = sorted(rows, key=lambda r: r[it])
    t = [r[it] for r in rows]
    y = [r[inorm] / math.log(10.0) for r in rows]
    ax = fig.add_subplot(111)
    ax.plot(t, y, ".-", ms=3)
    ax.set_xlabel("t")
    ax.set_ylabel("log10 propagator norm")
    ax.grid(True, alpha=0.3)


def _draw_spectrum_scatter(fig, header, rows, options):
    ire = _col(header, "re")
    iim = _col(header, "im")
    ax = fig.add_subplot(111)
    ax.scatter([r[ire] for r in rows], [r[iim] for r in rows],
               s=12, edgecolors="none")
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_aspect("equal", adjustable="datalim")


_DRAW = {
    "density_heatmap": _draw_density_heatmap,
    "steady_profile": _draw_steady_profile,
    "pseudo_contour": _draw_pseudo_contour,
    "wavefunction_log": _draw_wavefunction_log,
    "norm_growth": _draw_norm_growth,
    "spectrum_scatter": _draw_spectrum_scatter,
}
