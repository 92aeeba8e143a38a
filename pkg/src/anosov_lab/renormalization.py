"""
Numerical version of the surface construction used to show that a map which
does not preserve center-unstable leaves forces joint integrability.

The pieces: sign-changing pairs ``(eps, eps', alpha)`` for the stable local
time ``t1``, renormalization times ``T = log(L / alpha) / h``, the surfaces

    psi(t, s)    = h+_{t1(h-_s x, t)} phi(h-_s x)
    varphi(t, s) = g_{t2(h-_s x, t)} psi(t, s)

over the domain where the unstable parameter reaches ``L e^{hT}``, and the
distance of ``g_{-T}`` of these surfaces from the su-rectangle
``h-_{[-L,L]} h+_{[-L,L]}(y)`` at the renormalized base point ``y``.
"""

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import BadScale, GridMismatch, NoAccumulation, NoSignChange
from .foliations import as_chart, bracket_u, local_times


class SignChange(NamedTuple):
    eps: float
    eps_prime: float
    alpha: float


def _t1(phi, x, t):
    return float(local_times(None, phi, x, t).t1)


def sign_change_times(phi, x, delta0, n=6, alphas=None, zero_tol=1e-12):
    """Pairs with ``t1(x, eps) = alpha`` and ``t1(x, -eps') = -alpha``.

    ``alphas`` defaults to a geometric sequence ``a_max 2^{-k}``; the sign of
    each alpha follows the sign of ``t1`` for positive times.  Both times are
    located by Brent's method on ``(0, delta0]``.
    """
    x = np.asarray(x, dtype=float)
    up, down = _t1(phi, x, delta0), _t1(phi, x, -delta0)
    if max(abs(up), abs(down)) <= zero_tol:
        raise NoSignChange("t1 vanishes at resolution: phi preserves center-unstable leaves here")
    if np.sign(up) == np.sign(down):
        raise NoSignChange("t1(x, t) keeps its sign across t = 0")
    a_max = min(abs(up), abs(down))
    if alphas is None:
        alphas = [a_max * 2.0 ** (-k) for k in range(1, n + 1)]
    out = []
    for a in alphas:
        a = math.copysign(abs(a), up)
        if abs(a) > a_max:
            raise NoSignChange(f"|alpha| = {abs(a):.3g} is not reached within delta0")
        eps = brentq(lambda t: _t1(phi, x, t) - a, 0.0, delta0, xtol=1e-15, rtol=1e-15)
        epsp = brentq(lambda t: _t1(phi, x, -t) + a, 0.0, delta0, xtol=1e-15, rtol=1e-15)
        out.append(SignChange(eps, epsp, a))
    return out


def renorm_time(h, L, alpha):
    """``log(L / alpha) / h``: stretches a stable interval of size alpha to L."""
    if not (h > 0 and L > 0 and alpha > 0):
        raise BadScale("need h, L, alpha > 0")
    if alpha > L:
        raise BadScale(f"alpha = {alpha} exceeds L = {L}")
    return math.log(L / alpha) / h


@dataclass
class SampledSurface:
    """Points ``P(t_i, s_ij)`` on a rectangular index grid.

    ``s`` has shape ``(n_t, n_s)`` so that the unstable range may depend on
    ``t``; each row is strictly increasing.
    """

    t: np.ndarray
    s: np.ndarray
    points: np.ndarray
    tag: str
    t2: np.ndarray
    base: np.ndarray

    def __post_init__(self):
        if self.s.ndim != 2 or self.s.shape[0] != self.t.size:
            raise GridMismatch("s grid must have shape (len(t), n_s)")
        if self.t.size > 1 and np.any(np.diff(self.t) <= 0):
            raise GridMismatch("t grid must be strictly increasing")
        if self.s.shape[1] > 1 and np.any(np.diff(self.s, axis=1) <= 0):
            raise GridMismatch("s grid rows must be strictly increasing")

    def to_csv(self, path):
        n_t, n_s = self.s.shape
        flat = self.points.reshape(n_t, n_s, -1)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tag", "t", "s"] + [f"x{i}" for i in range(flat.shape[-1])])
            for i in range(n_t):
                for j in range(n_s):
                    w.writerow([self.tag, repr(float(self.t[i])), repr(float(self.s[i, j]))]
                               + [repr(float(v)) for v in flat[i, j]])


def surface_pair(chart_g, phi, x, t_values, s_values):
    """Evaluate ``psi`` and ``varphi`` on a grid through local times."""
    ch = as_chart(chart_g)
    t = np.asarray(t_values, dtype=float)
    s = np.asarray(s_values, dtype=float)
    if s.ndim == 1:
        s = np.broadcast_to(s, (t.size, s.size)).copy()
    x = np.asarray(x, dtype=float)
    b = phi.model.h_minus(x, s)
    lt = local_times(ch, phi, b, t[:, None])
    pb = phi(b)
    psi = ch.h_plus(pb, lt.t1)
    var = ch.flow(psi, lt.t2)
    t2 = np.asarray(lt.t2)
    base = phi(x)
    return (SampledSurface(t, s, psi, "psi", t2, base),
            SampledSurface(t, s, var, "varphi", t2, base))


class GapResult(NamedTuple):
    gap: float
    bound: float
    C: float
    passed: bool


def surface_gap(psi, var, T, chart, C=None, slack=1e-9):
    """``max dist(g_{-T} varphi, g_{-T} psi)`` against ``C * max |t2|``."""
    ch = as_chart(chart)
    if (psi.points.shape != var.points.shape or not np.array_equal(psi.t, var.t)
            or not np.array_equal(psi.s, var.s)):
        raise GridMismatch("surfaces are sampled on different grids")
    t2max = float(np.max(np.abs(psi.t2)))
    if C is None:
        k = ch.time_scale
        C = k * ch.model.generator_constant(k * t2max)
    gap = float(np.max(ch.dist(ch.flow(var.points, -T), ch.flow(psi.points, -T))))
    bound = C * t2max
    return GapResult(gap, bound, C, gap <= bound + slack)


def _unstable_stop(ch, phi, x, t, T, L, sign):
    """Parameter ``s`` (sign +1 or -1) where the renormalized unstable
    parameter measured from ``varphi(t, 0)`` reaches ``sign * L``."""
    y0 = ch.flow(surface_pair(ch, phi, x, [t], [0.0])[1].points[0, 0], -T)

    def f(s):
        p = surface_pair(ch, phi, x, [t], [sign * s])[1].points[0, 0]
        return sign * float(ch.decompose(y0, ch.flow(p, -T)).t3) - L

    hi = L * math.exp(ch.h * T)
    for _ in range(200):
        if f(hi) > 0:
            break
        hi *= 1.25
    return brentq(f, 0.0, hi, xtol=1e-14 * hi, rtol=1e-14)


@dataclass
class RenormalizedStage:
    T: float
    pair: SignChange
    psi: SampledSurface
    varphi: SampledSurface


def renormalization_stage(chart_g, phi, x, L, pair, n_t=9, n_s=9):
    """Surfaces over the domain ``R_n`` for one sign-change pair."""
    ch = as_chart(chart_g)
    T = renorm_time(ch.h, L, abs(pair.alpha))
    t = np.linspace(-pair.eps_prime, pair.eps, n_t)
    r = np.linspace(-1.0, 1.0, n_s)
    s = np.empty((n_t, n_s))
    for i, ti in enumerate(t):
        S = _unstable_stop(ch, phi, x, ti, T, L, +1)
        Sp = _unstable_stop(ch, phi, x, ti, T, L, -1)
        s[i] = np.where(r >= 0, r * S, r * Sp)
    psi, var = surface_pair(ch, phi, x, t, s)
    return RenormalizedStage(T, pair, psi, var)


class LimitRow(NamedTuple):
    n: int
    T: float
    distance: float
    base: tuple


@dataclass
class LimitTable:
    rows: list
    L: float
    C: float

    @property
    def distances(self):
        return np.array([r.distance for r in self.rows])

    @property
    def times(self):
        return np.array([r.T for r in self.rows])

    def decreasing(self):
        d = self.distances
        return bool(np.all(np.diff(d) < 0))

    def rate(self):
        """Per-unit-time contraction factor from a log-linear fit."""
        d, T = self.distances, self.times
        slope = np.polyfit(T, np.log(d), 1)[0]
        return float(math.exp(slope))


def rectangle_distance(chart, y, z, L, C):
    """Transverse distance of ``z`` from ``h-_{[-L,L]} h+_{[-L,L]}(y)``:
    ``C |t2|`` plus any overshoot of the leaf parameters beyond ``L``."""
    lt = as_chart(chart).decompose(y, z)
    return (C * np.abs(lt.t2) + np.maximum(0.0, np.abs(lt.t1) - L)
            + np.maximum(0.0, np.abs(lt.t3) - L))


def renormalized_limit(chart_g, surfaces, T_list, L, radius=0.05, C=None, slack=1e-12):
    """Distance of each renormalized surface from the su-rectangle at its base.

    Base points ``g_{-T_n} phi(x)`` are clustered with a fixed radius; only
    the largest cluster (the accumulating subsequence) is tabulated.
    """
    ch = as_chart(chart_g)
    if len(surfaces) != len(T_list):
        raise GridMismatch("need one renormalization time per surface")
    bases = [ch.flow(sf.base, -T) for sf, T in zip(surfaces, T_list)]
    keep = list(range(len(surfaces)))
    if len(surfaces) > 1:
        B = np.stack(bases)
        D = np.stack([ch.dist(B, b) for b in B])
        counts = (D < radius).sum(axis=1)
        centre = int(np.argmax(counts))
        if counts[centre] < 2:
            raise NoAccumulation(f"renormalized base points do not cluster within {radius}")
        keep = [i for i in range(len(surfaces)) if D[centre, i] < radius]
    if C is None:
        C = ch.time_scale * ch.model.generator_constant(
            ch.time_scale * max(float(np.max(np.abs(sf.t2))) for sf in surfaces))
    rows = []
    for i in keep:
        sf, T = surfaces[i], T_list[i]
        z = ch.flow(sf.points, -T)
        d = float(np.max(rectangle_distance(ch, bases[i], z, L + slack, C)))
        rows.append(LimitRow(i, float(T), d, tuple(np.ravel(bases[i]).tolist())))
    return LimitTable(rows, L, C)


def s_prime_defect(chart_g, y, L, eta=None, n=21):
    """Flow component of the center-stable segments of ``S'``.

    For ``t in [-L, L]`` and ``s in [-eta, eta]`` the point of
    ``W^u(h+_t y)`` on ``W^cs(h-_s y)`` is decomposed from ``h-_s y``; its
    flow time is zero for every pair exactly when the segments are strongly
    stable.
    """
    ch = as_chart(chart_g)
    eta = L / 2 if eta is None else eta
    t = np.linspace(-L, L, n)[:, None]
    s = np.linspace(-eta, eta, n)[None, :]
    y = np.asarray(y, dtype=float)
    a = ch.h_plus(y, t)
    b = ch.h_minus(y, s)
    a, b = np.broadcast_arrays(a, b)
    z = bracket_u(ch, a, b)
    return float(np.max(np.abs(ch.decompose(b, z).t2)))


__all__ = [
    "SignChange", "sign_change_times", "renorm_time", "SampledSurface",
    "surface_pair", "GapResult", "surface_gap", "RenormalizedStage",
    "renormalization_stage", "LimitRow", "LimitTable", "rectangle_distance",
    "renormalized_limit", "s_prime_defect",
]
