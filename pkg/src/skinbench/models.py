"""Lattice model builders and their closed-form references.

Builders produce dense single-particle matrices for the non-reciprocal chain
(asymmetric hoppings J+gamma and J-gamma), its symplectic two-chain variant,
and the disordered chain. The exact_* functions give the closed-form spectra,
wavefunctions and condition numbers used as oracles by everything else.
"""

import json
import numpy as np
import gmpy2
from gmpy2 import mpfr, mpc

from . import mpcore
from ._rng import Xorshift64Star
from .errors import NoClosedForm, ExceptionalBoundary


class ModelSpec:
    """Declarative model description with a canonical JSON encoding."""

    def __init__(self, variant, L, J=1.0, gamma=0.0, delta=None, W=None,
                 seed=None, bc="obc"):
        if variant not in ("hn", "shn", "disordered_hn"):
            raise ValueError("unknown variant %r" % variant)
        if bc not in ("obc", "pbc"):
            raise ValueError("unknown bc %r" % bc)
        if variant == "shn" and delta is None:
            raise ValueError("shn needs delta")
        if variant == "disordered_hn" and (W is None or seed is None):
            raise ValueError("disordered_hn needs W and seed")
        self.variant = variant
        self.L = int(L)
        self.J = float(J)
        self.gamma = float(gamma)
        self.delta = None if delta is None else float(delta)
        self.W = None if W is None else float(W)
        self.seed = None if seed is None else int(seed)
        self.bc = bc

    def dimension(self):
        return 2 * self.L if self.variant == "shn" else self.L

    def to_dict(self):
        d = {"model": self.variant, "L": self.L, "J": self.J,
             "gamma": self.gamma, "bc": self.bc}
        if self.variant == "shn":
            d["delta"] = self.delta
        if self.variant == "disordered_hn":
            d["W"] = self.W
            d["seed"] = self.seed
        return d

    def canonical_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d):
        return cls(d["model"], d["L"], J=d.get("J", 1.0), gamma=d.get("gamma", 0.0),
                   delta=d.get("delta"), W=d.get("W"), seed=d.get("seed"),
                   bc=d.get("bc", "obc"))


class AnalyticalReference:
    def __init__(self, spectrum=None, wavefunctions=None,
                 localization_length=None, condition_number=None):
        self.spectrum = spectrum
        self.wavefunctions = wavefunctions
        self.localization_length = localization_length
        self.condition_number = condition_number


def build(spec, ctx):
    if spec.L < 2:
        raise ValueError("L must be at least 2")
    with ctx.gmp():
        J = mpfr(spec.J)
        g = mpfr(spec.gamma)
        if spec.variant in ("hn", "disordered_hn"):
            L = spec.L
            H = mpcore.zeros(L, L, ctx)
            for i in range(L - 1):
                H[i + 1, i] = J + g   # hop i -> i+1
                H[i, i + 1] = J - g
            if spec.bc == "pbc":
                H[0, L - 1] = J + g   # wrap hop L -> 1
                H[L - 1, 0] = J - g
            if spec.variant == "disordered_hn":
                rng = Xorshift64Star(spec.seed)
                for i in range(L):
                    H[i, i] = H[i, i] + mpfr(rng.uniform_symmetric(spec.W))
            return H
        # symplectic chain: 2x2 hopping blocks, rows interleaved per cell
        L = spec.L
        d = mpfr(spec.delta)
        H = mpcore.zeros(2 * L, 2 * L, ctx)
        TR = np.array([[J + g, mpc(0, -d)], [mpc(0, -d), J - g]], dtype=object)
        TL = np.array([[J - g, mpc(0, d)], [mpc(0, d), J + g]], dtype=object)
        for i in range(L - 1):
            H[2 * i + 2:2 * i + 4, 2 * i:2 * i + 2] = TR
            H[2 * i:2 * i + 2, 2 * i + 2:2 * i + 4] = TL
        if spec.bc == "pbc":
            H[0:2, 2 * L - 2:2 * L] = TR
            H[2 * L - 2:2 * L, 0:2] = TL
        return H


def _sort_order(vals):
    def key(v):
        if isinstance(v, type(mpc(0))):
            return (v.real, v.imag)
        return (v, mpfr(0))
    return sorted(range(len(vals)), key=lambda i: key(vals[i]))


def _hn_r(spec, ctx):
    J = mpfr(spec.J)
    g = mpfr(spec.gamma)
    if J <= abs(g):
        raise NoClosedForm("chain closed forms need J > |gamma|")
    return gmpy2.sqrt((J + g) / (J - g))


def _shn_core(spec, ctx):
    """(rp, cp, Jp, Jm): r', c' and the decoupled hopping pair J +- s."""
    J = mpfr(spec.J)
    g = mpfr(spec.gamma)
    d = mpfr(spec.delta)
    if abs(g) == abs(d):
        raise ExceptionalBoundary("gamma = delta is the exceptional point of the hopping blocks")
    s = gmpy2.sqrt(mpc(g * g - d * d))
    if s.imag == 0:
        s = s.real
    Jp = J + s
    Jm = J - s
    ratio = Jp / Jm
    if not isinstance(ratio, type(mpc(0))) and ratio < 0:
        ratio = mpc(ratio)
    rp = gmpy2.sqrt(ratio)
    cp = mpc(0, -1) * d / (g + s)
    return rp, cp, Jp, Jm


def exact_spectrum(spec, ctx):
    """Closed-form eigenvalues, sorted by (Re, Im); degenerate values repeat."""
    if spec.variant == "disordered_hn":
        raise NoClosedForm("disordered chain has no closed-form spectrum")
    with ctx.gmp():
        pi = gmpy2.const_pi()
        J = mpfr(spec.J)
        g = mpfr(spec.gamma)
        L = spec.L
        vals = []
        if spec.variant == "hn":
            if spec.bc == "obc":
                _hn_r(spec, ctx)
                a = 2 * gmpy2.sqrt(J * J - g * g)
                for m in range(1, L + 1):
                    vals.append(a * gmpy2.cos(mpfr(m) * pi / (L + 1)))
            else:
                for m in range(1, L + 1):
                    k = 2 * pi * m / L
                    vals.append(mpc(2 * J * gmpy2.cos(k), -2 * g * gmpy2.sin(k)))
        else:
            d = mpfr(spec.delta)
            if spec.bc == "obc":
                pref = J * J - g * g + d * d
                if pref <= 0:
                    raise NoClosedForm("chain closed forms need J^2 - gamma^2 + delta^2 > 0")
                a = 2 * gmpy2.sqrt(pref)
                for m in range(1, L + 1):
                    e = a * gmpy2.cos(mpfr(m) * pi / (L + 1))
                    vals.append(e)
                    vals.append(e)
            else:
                s = gmpy2.sqrt(mpc(g * g - d * d))
                for m in range(1, L + 1):
                    k = 2 * pi * m / L
                    base = 2 * J * gmpy2.cos(k)
                    shift = mpc(0, 2) * s * gmpy2.sin(k)
                    vals.append(base - shift)
                    vals.append(base + shift)
        order = _sort_order(vals)
        return [vals[i] for i in order]


def exact_wavefunctions(spec, ctx):
    """Closed-form OBC eigenvectors, unit columns, ordered like exact_spectrum."""
    if spec.variant == "disordered_hn":
        raise NoClosedForm("disordered chain has no closed-form wavefunctions")
    if spec.bc != "obc":
        raise NoClosedForm("closed-form wavefunctions exist under OBC only")
    with ctx.gmp():
        pi = gmpy2.const_pi()
        L = spec.L
        if spec.variant == "hn":
            r = _hn_r(spec, ctx)
            V = mpcore.zeros(L, L, ctx)
            # eigenvalue 2 sqrt(J^2-g^2) cos(m pi/(L+1)) descends with m;
            # sorted-ascending order is m = L, L-1, ..., 1
            for col, m in enumerate(range(L, 0, -1)):
                th = mpfr(m) * pi / (L + 1)
                for j in range(1, L + 1):
                    V[j - 1, col] = (r ** j) * gmpy2.sin(j * th)
                _normalize_column(V, col, ctx)
            return V
        rp, cp, _, _ = _shn_core(spec, ctx)
        V = mpcore.zeros(2 * L, 2 * L, ctx)
        col = 0
        for m in range(L, 0, -1):
            th = mpfr(m) * pi / (L + 1)
            for j in range(1, L + 1):
                phi = (rp ** j) * gmpy2.sin(j * th)
                V[2 * (j - 1), col] = phi
                V[2 * (j - 1) + 1, col] = phi * cp
            _normalize_column(V, col, ctx)
            col += 1
            for j in range(1, L + 1):
                phit = (rp ** (-j)) * gmpy2.sin(j * th)
                V[2 * (j - 1), col] = -cp * phit
                V[2 * (j - 1) + 1, col] = phit
            _normalize_column(V, col, ctx)
            col += 1
        return V


def _normalize_column(V, col, ctx):
    n2 = mpfr(0)
    big = 0
    biga = mpfr(-1)
    for i in range(V.shape[0]):
        x = V[i, col]
        a2 = gmpy2.norm(x) if isinstance(x, type(mpc(0))) else x * x
        n2 += a2
        if a2 > biga:
            biga = a2
            big = i
    nrm = gmpy2.sqrt(n2)
    if nrm == 0:
        return
    lead = V[big, col]
    phase = lead / abs(lead)
    V[:, col] = V[:, col] / (nrm * phase)


def localization_length(spec, ctx):
    """1/ln of the envelope ratio; inf when the closed form gives |ratio| = 1."""
    with ctx.gmp():
        if spec.variant == "hn":
            r = _hn_r(spec, ctx)
            return 1 / gmpy2.log(r)
        if spec.variant == "shn":
            # gamma <= delta puts J+ and J- on the same circle, |ratio| = 1
            if abs(spec.gamma) <= abs(spec.delta):
                return mpfr("inf")
            rp, _, _, _ = _shn_core(spec, ctx)
            return 1 / gmpy2.log(abs(rp))
        raise NoClosedForm("disordered chain has no closed-form localization length")


def exact_condition_number(spec, ctx):
    """Closed-form cond of the eigenvector matrix."""
    if spec.variant == "disordered_hn":
        raise NoClosedForm("disordered chain has no closed-form condition number")
    with ctx.gmp():
        L = spec.L
        if spec.variant == "hn":
            if spec.bc == "pbc":
                return mpfr(1)
            r = _hn_r(spec, ctx)
            return r ** (L - 1)
        if spec.bc == "pbc":
            raise NoClosedForm("no closed-form condition number for the symplectic chain under PBC")
        g = mpfr(abs(spec.gamma))
        d = mpfr(abs(spec.delta))
        if g == d:
            raise ExceptionalBoundary("gamma = delta is the exceptional point of the hopping blocks")
        if g < d:
            return gmpy2.sqrt((d + g) / (d - g))
        rp, _, _, _ = _shn_core(spec, ctx)
        rp = abs(rp)
        RL = rp ** (2 * L) + rp ** (-2 * L)
        cpar = 4 * (1 - (d / g) ** 2)
        root = gmpy2.sqrt(RL * RL - cpar)
        # sqrt((RL+root)/(RL-root)) loses half the working digits to the
        # cancellation in the denominator; multiply through by (RL+root)
        return (RL + root) / gmpy2.sqrt(cpar)


def condition_asymptote(spec, ctx):
    """Large-L exponential asymptote of the condition number."""
    with ctx.gmp():
        if spec.variant == "hn":
            if spec.bc == "pbc":
                return mpfr(1)
            r = _hn_r(spec, ctx)
            return r ** (spec.L - 1)
        if spec.variant == "shn" and spec.bc == "obc":
            g, d = abs(spec.gamma), abs(spec.delta)
            if g > d:
                rp, _, _, _ = _shn_core(spec, ctx)
                return abs(rp) ** (spec.L - 1)
            return exact_condition_number(spec, ctx)
        raise NoClosedForm("no asymptote for this variant")


def analytical_reference(spec, ctx):
    """Bundle of whatever closed forms exist for this spec (None elsewhere)."""
    ref = AnalyticalReference()
    try:
        ref.spectrum = exact_spectrum(spec, ctx)
    except (NoClosedForm, ExceptionalBoundary):
        pass
    try:
        ref.wavefunctions = exact_wavefunctions(spec, ctx)
    except (NoClosedForm, ExceptionalBoundary):
        pass
    try:
        ref.localization_length = localization_length(spec, ctx)
    except (NoClosedForm, ExceptionalBoundary):
        pass
    try:
        ref.condition_number = exact_condition_number(spec, ctx)
    except (NoClosedForm, ExceptionalBoundary):
        pass
    return ref
