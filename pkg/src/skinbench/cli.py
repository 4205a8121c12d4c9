"""Batch command-line front end.

Each subcommand parses flags (optionally merged over a JSON config file),
runs one computation, and writes CSV artifacts plus a manifest.json that
records every effective parameter, named seeds, output hashes and wall time.
Re-running with --replay manifest.json reproduces the CSV files byte for byte.
"""

import argparse
import hashlib
import json
import math
import os
import sys
import time

import gmpy2
from gmpy2 import mpfr, mpc

from . import mpcore, linalg, models, pseudospec, gaussdyn, manybody
from .errors import SkinbenchError, FitFailure

TOOL_VERSION = "0.1.0"


# ---------------------------------------------------------------------------
# small helpers

def _fmt(x, digits):
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return mpcore.format_scalar(x, digits + 2)


def _write_csv(out_dir, name, header, rows, digits):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x, digits) for x in row))
    data = ("\n".join(lines) + "\n").encode("ascii")
    path = os.path.join(out_dir, name)
    tmp = os.path.join(out_dir, "." + name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(data)
    os.replace(tmp, path)
    return name, hashlib.sha256(data).hexdigest()


def _write_json(out_dir, name, obj):
    data = (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("ascii")
    path = os.path.join(out_dir, name)
    tmp = os.path.join(out_dir, "." + name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(data)
    os.replace(tmp, path)
    return name, hashlib.sha256(data).hexdigest()


def _re_im(v):
    if isinstance(v, type(mpc(0))):
        return v.real, v.imag
    return v, mpfr(0)


def _ctx(cfg):
    return mpcore.PrecisionContext(cfg["digits"], double_emulation=cfg["double_emulation"])


def _model_spec(cfg):
    return models.ModelSpec(cfg["model"], cfg["L"], J=cfg["J"], gamma=cfg["gamma"],
                            delta=cfg.get("delta"), W=cfg.get("W"),
                            seed=cfg.get("seed"), bc=cfg["bc"])


def _int_list(text):
    return [int(x) for x in str(text).split(",") if x != ""]


def _float_list(text):
    return [float(x) for x in str(text).split(",") if x != ""]


# ---------------------------------------------------------------------------
# per-command defaults and runners; every key lands in the manifest

_MODEL_KEYS = {"model": "hn", "L": 20, "J": 1.0, "gamma": 0.0, "delta": None,
               "W": None, "seed": None, "bc": "obc"}
_CTX_KEYS = {"digits": 16, "double_emulation": False}

DEFAULTS = {
    "spectrum": dict(_MODEL_KEYS, **_CTX_KEYS, max_iters=None),
    "wavefunctions": dict(_MODEL_KEYS, **_CTX_KEYS),
    "pseudo": dict(_MODEL_KEYS, **_CTX_KEYS, re_min=-2.5, re_max=2.5,
                   im_min=-1.5, im_max=1.5, nx=201, ny=201),
    "cloud": dict(_MODEL_KEYS, **_CTX_KEYS, epsilon=1e-6, n_samples=20, cloud_seed=1),
    "cond": dict(_MODEL_KEYS, **_CTX_KEYS, L_list=None),
    "evolve": dict(_MODEL_KEYS, **_CTX_KEYS, dt=0.05, t_max=40.0,
                   record_every=1, window=None),
    "norms": dict(_MODEL_KEYS, **_CTX_KEYS, dt=0.05, t_max=25.0),
    "qrlab": dict(L=40, J=1.0, gamma=0.8, iters=4000, **_CTX_KEYS),
    "manybody": dict(L=10, N=5, J=1.0, gamma=0.8, U_int=1.0, bc="obc",
                     **_CTX_KEYS, norms=False, dt=0.25, t_max=15.0),
    "disorder": dict(J=1.0, gamma=0.9, W_list="0.5", L_list="8,12",
                     n_samples=10, seed=1, **_CTX_KEYS),
    "audit": dict(_MODEL_KEYS, **_CTX_KEYS, L_probe="6,8,10,12", L_target=40,
                  interacting=False, U_int=1.0),
}


def _run_spectrum(cfg, out_dir):
    ctx = _ctx(cfg)
    spec = _model_spec(cfg)
    H = models.build(spec, ctx)
    with ctx.gmp():
        res = linalg.eig(H, ctx, max_iters=cfg["max_iters"])
        rows = []
        for v, r in zip(res.eigenvalues, res.residuals):
            re, im = _re_im(v)
            rows.append((re, im, r))
    out = [_write_csv(out_dir, "eigenvalues.csv", ["re", "im", "residual"], rows, cfg["digits"])]
    return out, {}, {}


def _run_wavefunctions(cfg, out_dir):
    ctx = _ctx(cfg)
    spec = _model_spec(cfg)
    H = models.build(spec, ctx)
    extra = {}
    with ctx.gmp():
        res = linalg.eig(H, ctx)
        m = H.shape[0]
        rows = []
        for k in range(m):
            for j in range(m):
                rows.append((j + 1, k, abs(res.right_vectors[j, k])))
        try:
            extra["localization_length"] = float(models.localization_length(spec, ctx))
        except SkinbenchError:
            pass
    out = [_write_csv(out_dir, "wavefunctions.csv", ["site", "index", "abs_psi"],
                      rows, cfg["digits"])]
    return out, {}, extra


def _run_pseudo(cfg, out_dir):
    ctx = _ctx(cfg)
    spec = _model_spec(cfg)
    H = models.build(spec, ctx)
    grid = pseudospec.GridSpec(cfg["re_min"], cfg["re_max"], cfg["im_min"],
                               cfg["im_max"], cfg["nx"], cfg["ny"])
    pg = pseudospec.resolvent_norm_grid(H, grid, ctx)
    with ctx.gmp():
        rows = []
        for iy, ix, re, im in grid.points():
            rows.append((mpfr(re), mpfr(im), pg.log10_smin[iy][ix]))
        spec_rows = [(_re_im(v)) for v in pg.spectrum]
        extra = {}
        try:
            cond = models.exact_condition_number(spec, ctx)
            exact = models.exact_spectrum(spec, ctx)
            ok, lo, hi = pseudospec.sandwich_check(pg, cond, ctx.digits, spectrum=exact)
            extra["sandwich"] = {"holds": bool(ok), "lower_margin": float(lo),
                                 "upper_margin": float(hi)}
        except SkinbenchError:
            pass
    out = [_write_csv(out_dir, "grid.csv", ["re", "im", "log10_smin"], rows, cfg["digits"]),
           _write_csv(out_dir, "spectrum.csv", ["re", "im"], spec_rows, cfg["digits"])]
    return out, {}, extra


def _run_cloud(cfg, out_dir):
    ctx = _ctx(cfg)
    spec = _model_spec(cfg)
    H = models.build(spec, ctx)
    cl = pseudospec.perturbed_eigencloud(H, cfg["epsilon"], cfg["n_samples"],
                                         cfg["cloud_seed"], ctx)
    with ctx.gmp():
        rows = []
        for s, v in cl.values:
            re, im = _re_im(v)
            rows.append((s, re, im))
    out = [_write_csv(out_dir, "cloud.csv", ["sample", "re", "im"], rows, cfg["digits"])]
    return out, {"cloud": cfg["cloud_seed"]}, {}


def _run_cond(cfg, out_dir):
    ctx = _ctx(cfg)
    L_values = _int_list(cfg["L_list"]) if cfg["L_list"] else [cfg["L"]]
    rows = []
    for L in L_values:
        c2 = dict(cfg)
        c2["L"] = L
        spec = _model_spec(c2)
        H = models.build(spec, ctx)
        with ctx.gmp():
            res = linalg.eig(H, ctx)
            c = linalg.condition_number(res.right_vectors, ctx)
            lg = gmpy2.log10(c)
            try:
                ex = gmpy2.log10(models.exact_condition_number(spec, ctx))
            except SkinbenchError:
                ex = ""
            rows.append((L, lg, ex))
    out = [_write_csv(out_dir, "cond.csv", ["L", "log10_cond", "log10_cond_exact"],
                      rows, cfg["digits"])]
    return out, {}, {}


def _run_evolve(cfg, out_dir):
    ctx = _ctx(cfg)
    spec = _model_spec(cfg)
    series = gaussdyn.run_evolution(spec, cfg["dt"], cfg["t_max"], ctx,
                                    record_every=cfg["record_every"])
    window = cfg["window"] if cfg["window"] is not None else cfg["t_max"] / 4.0
    met = gaussdyn.steady_state_metrics(series, window)
    m = len(series.density[0])
    header = ["t"] + ["n_%d" % (j + 1) for j in range(m)]
    if series.n_chains == 2:
        header += ["I_A", "I_B"]
    else:
        header += ["I_total"]
    header += ["S", "log_norm"]
    rows = []
    for i in range(len(series.times)):
        row = [series.times[i]] + list(series.density[i]) + list(series.total_current[i])
        row += [series.entropy[i], series.log_propagator_norm[i]]
        rows.append(row)
    if series.n_chains == 2:
        metrics = {"middle_width": list(met.middle_width),
                   "edge_densities": [[float(a), float(b)] for a, b in met.edge_densities],
                   "mean_abs_current": [float(x) for x in met.mean_abs_current],
                   "mean_current": [float(x) for x in met.mean_current],
                   "window": window}
    else:
        metrics = {"middle_width": met.middle_width,
                   "edge_densities": [float(met.edge_densities[0]), float(met.edge_densities[1])],
                   "mean_abs_current": float(met.mean_abs_current),
                   "mean_current": float(met.mean_current),
                   "window": window}
    out = [_write_csv(out_dir, "series.csv", header, rows, cfg["digits"]),
           _write_json(out_dir, "metrics.json", metrics)]
    return out, {}, {"metrics": metrics}


def _run_norms(cfg, out_dir):
    ctx = _ctx(cfg)
    spec = _model_spec(cfg)
    H = models.build(spec, ctx)
    series = gaussdyn.propagator_norm_series(H, cfg["dt"], cfg["t_max"], ctx)
    rows = [(t, v) for t, v in series]
    out = [_write_csv(out_dir, "norms.csv", ["t", "log_norm"], rows, cfg["digits"])]
    return out, {}, {}


def _run_qrlab(cfg, out_dir):
    ctx = _ctx(cfg)
    spec = models.ModelSpec("hn", cfg["L"], J=cfg["J"], gamma=cfg["gamma"], bc="obc")
    H = models.build(spec, ctx)
    form = linalg.schur_qr(H, ctx, mode="real_unshifted", max_iters=cfg["iters"])
    brows = [(i, b) for i, b in enumerate(form.block_sizes)]
    trows = [(i + 1, v) for i, v in enumerate(form.denominator_trace)]
    finite = [v for v in form.denominator_trace if gmpy2.is_finite(v)]
    extra = {"blocks_of_size_2": sum(1 for b in form.block_sizes if b == 2),
             "min_denominator": float(min(finite)) if finite else None}
    out = [_write_csv(out_dir, "blocks.csv", ["index", "size"], brows, cfg["digits"]),
           _write_csv(out_dir, "trace.csv", ["iteration", "min_vtv"], trows, cfg["digits"])]
    return out, {}, extra


def _run_manybody(cfg, out_dir):
    ctx = _ctx(cfg)
    mspec = manybody.ManyBodySpec(cfg["L"], cfg["N"], J=cfg["J"],
                                  gamma=cfg["gamma"], U_int=cfg["U_int"], bc=cfg["bc"])
    H = manybody.build_interacting(mspec, ctx)
    with ctx.gmp():
        res = linalg.eig(H, ctx)
        rows = []
        mx = mpfr(0)
        for v, r in zip(res.eigenvalues, res.residuals):
            re, im = _re_im(v)
            if abs(im) > mx:
                mx = abs(im)
            rows.append((re, im, r))
        extra = {"dimension": len(res.eigenvalues),
                 "max_abs_imag": float(mx),
                 "delta": mspec.N * (mspec.L - mspec.N),
                 "log10_cond_closed_form":
                     math.log10(manybody.interacting_condition_closed_form(mspec))
                     if abs(mspec.gamma) < mspec.J else None}
    out = [_write_csv(out_dir, "mb_eigenvalues.csv", ["re", "im", "residual"],
                      rows, cfg["digits"])]
    if cfg["norms"]:
        series = manybody.mb_propagator_norm(mspec, cfg["dt"], cfg["t_max"], ctx)
        out.append(_write_csv(out_dir, "mb_norms.csv", ["t", "log_norm"],
                              [(t, v) for t, v in series], cfg["digits"]))
    return out, {}, extra


def _run_disorder(cfg, out_dir):
    ctx = _ctx(cfg)
    W_list = _float_list(cfg["W_list"])
    L_list = _int_list(cfg["L_list"])
    samples, summary = manybody.disorder_condition_sweep(
        cfg["J"], cfg["gamma"], W_list, L_list, cfg["n_samples"], cfg["seed"], ctx)
    srows = [(r["W"], r["L"], r["sample"], r["log10_cond"]) for r in samples]
    arows = [(r["W"], r["L"], r["mean_log10_cond"], r["stderr"]) for r in summary]
    out = [_write_csv(out_dir, "samples.csv", ["W", "L", "sample", "log10_cond"],
                      srows, cfg["digits"]),
           _write_csv(out_dir, "summary.csv", ["W", "L", "mean_log10_cond", "stderr"],
                      arows, cfg["digits"])]
    return out, {"disorder": cfg["seed"]}, {}


def audit_precision(spec, L_probe, L_target, ctx, interacting=False, U_int=1.0):
    """Fit log10 cond against L (or L^2) on small probes, extrapolate, add 20.

    Returns (recommended_digits, details). FitFailure for under 3 probes or a
    fit residual above one decade.
    """
    if len(L_probe) < 3:
        raise FitFailure("need at least 3 probe sizes, got %d" % len(L_probe))
    xs = []
    ys = []
    for L in L_probe:
        if interacting:
            mspec = manybody.ManyBodySpec(L, L // 2, J=spec.J, gamma=spec.gamma,
                                          U_int=U_int, bc=spec.bc)
            H = manybody.build_interacting(mspec, ctx)
            x = float(L) ** 2
        else:
            s2 = models.ModelSpec(spec.variant, L, J=spec.J, gamma=spec.gamma,
                                  delta=spec.delta, W=spec.W, seed=spec.seed, bc=spec.bc)
            H = models.build(s2, ctx)
            x = float(L)
        with ctx.gmp():
            res = linalg.eig(H, ctx)
            c = linalg.condition_number(res.right_vectors, ctx)
            xs.append(x)
            ys.append(float(gmpy2.log10(c)))
    n = len(xs)
    sx = sum(xs)
    sy = sum(ys)
    sxx = sum(x * x for x in xs)
    sxy = sum(x * y for x, y in zip(xs, ys))
    denom = n * sxx - sx * sx
    a = (n * sxy - sx * sy) / denom
    b = (sy - a * sx) / n
    resid = max(abs(y - (a * x + b)) for x, y in zip(xs, ys))
    if resid > 1.0:
        raise FitFailure("fit residual %.3f decades exceeds 1" % resid)
    xt = float(L_target) ** 2 if interacting else float(L_target)
    N = max(0, math.ceil(a * xt + b))
    details = {"probes": [{"L": L, "log10_cond": y} for L, y in zip(L_probe, ys)],
               "slope": a, "intercept": b, "max_residual": resid,
               "extrapolated_decades": N, "recommended_digits": N + 20}
    return N + 20, details


def _run_audit(cfg, out_dir):
    ctx = _ctx(cfg)
    spec = _model_spec(cfg)
    P, details = audit_precision(spec, _int_list(cfg["L_probe"]), cfg["L_target"],
                                 ctx, interacting=cfg["interacting"], U_int=cfg["U_int"])
    out = [_write_json(out_dir, "audit.json", details)]
    print("recommended digits: %d" % P)
    return out, {}, {"recommended_digits": P}


RUNNERS = {
    "spectrum": _run_spectrum,
    "wavefunctions": _run_wavefunctions,
    "pseudo": _run_pseudo,
    "cloud": _run_cloud,
    "cond": _run_cond,
    "evolve": _run_evolve,
    "norms": _run_norms,
    "qrlab": _run_qrlab,
    "manybody": _run_manybody,
    "disorder": _run_disorder,
    "audit": _run_audit,
}


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def _build_parser():
    p = argparse.ArgumentParser(prog="skinbench")
    p.add_argument("--replay", help="manifest.json from a previous run")
    p.add_argument("--out", default=None)
    sub = p.add_subparsers(dest="command")
    for name, defaults in DEFAULTS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--out", default=None)
        sp.add_argument("--config", default=None)
        for key, val in defaults.items():
            flag = "--" + key.replace("_", "-")
            if isinstance(val, bool):
                sp.add_argument(flag, dest=key, action="store_true", default=None)
            elif isinstance(val, int) and not isinstance(val, bool):
                sp.add_argument(flag, dest=key, type=int, default=None)
            elif isinstance(val, float):
                sp.add_argument(flag, dest=key, type=float, default=None)
            else:
                sp.add_argument(flag, dest=key, default=None)
    return p


def _merge_config(command, args):
    cfg = dict(DEFAULTS[command])
    if getattr(args, "config", None):
        with open(args.config) as f:
            file_cfg = json.load(f)
        for k, v in file_cfg.items():
            if k in cfg:
                cfg[k] = v
    for key in DEFAULTS[command]:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    # normalize numeric types that may arrive as strings from flags
    for k in ("L", "N", "seed", "n_samples", "record_every", "nx", "ny",
              "iters", "L_target", "max_iters", "cloud_seed", "digits"):
        if k in cfg and cfg[k] is not None and not isinstance(cfg[k], bool):
            cfg[k] = int(cfg[k])
    for k in ("J", "gamma", "delta", "W", "epsilon", "dt", "t_max", "window",
              "re_min", "re_max", "im_min", "im_max", "U_int"):
        if k in cfg and cfg[k] is not None:
            cfg[k] = float(cfg[k])
    return cfg


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


def _execute(command, cfg, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.time()
    try:
        outputs, seeds, extra = RUNNERS[command](cfg, out_dir)
    except SkinbenchError as e:
        ectx = getattr(e, "context", None)
        if ectx is None:
            ectx = getattr(e, "t", None)
        manifest = {
            "command": command,
            "config": cfg,
            "precision_digits": cfg.get("digits"),
            "seeds": {},
            "tool_version": TOOL_VERSION,
            "wall_time_seconds": round(time.time() - t0, 3),
            "outputs": [],
            "error": {"type": type(e).__name__, "message": str(e),
                      "context": _jsonable(ectx)},
        }
        _write_json(out_dir, "manifest.json", manifest)
        print("numerical failure: %s: %s" % (type(e).__name__, e), file=sys.stderr)
        return 3
    manifest = {
        "command": command,
        "config": cfg,
        "precision_digits": cfg.get("digits"),
        "seeds": seeds,
        "tool_version": TOOL_VERSION,
        "wall_time_seconds": round(time.time() - t0, 3),
        "outputs": [{"name": n, "sha256": h} for n, h in outputs],
    }
    manifest.update(extra)
    _write_json(out_dir, "manifest.json", manifest)
    return 0


def dispatch(argv):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.replay:
        try:
            with open(args.replay) as f:
                manifest = json.load(f)
            command = manifest["command"]
            cfg = dict(DEFAULTS[command])
            cfg.update(manifest["config"])
        except (OSError, KeyError, ValueError) as e:
            print("bad replay manifest: %s" % e, file=sys.stderr)
            return 2
        return _execute(command, cfg, args.out or ".")
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = _merge_config(args.command, args)
    except (OSError, ValueError) as e:
        print("bad configuration: %s" % e, file=sys.stderr)
        return 2
    try:
        _model_sanity(args.command, cfg)
    except ValueError as e:
        print("bad configuration: %s" % e, file=sys.stderr)
        return 2
    return _execute(args.command, cfg, args.out or ".")


def _model_sanity(command, cfg):
    if "model" in cfg and cfg["model"] not in ("hn", "shn", "disordered_hn"):
        raise ValueError("unknown model %r" % cfg["model"])
    if "bc" in cfg and cfg["bc"] not in ("obc", "pbc"):
        raise ValueError("unknown bc %r" % cfg["bc"])
    if cfg.get("model") == "shn" and cfg.get("delta") is None:
        raise ValueError("shn needs --delta")
    if cfg.get("model") == "disordered_hn" and (cfg.get("W") is None or cfg.get("seed") is None):
        raise ValueError("disordered_hn needs --W and --seed")
    if "digits" in cfg and cfg["digits"] < 1:
        raise ValueError("digits must be positive")


def main():
    try:
        code = dispatch(sys.argv[1:])
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else 2
    sys.exit(code)


if __name__ == "__main__":
    main()
