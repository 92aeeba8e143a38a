"""
Marcus-parametrized stable/unstable flows, the local product bracket,
stable holonomy, joint integrability and the local-times decomposition.

A ``MarcusChart`` pairs a model with a constant time scale ``kappa``: its flow
is ``g_t = f_{kappa t}`` and its Marcus rate is ``kappa * h``.  Stable and
unstable parametrizations are shared with the underlying model, since a
constant time change keeps the leaves and rescales only the rate.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import OutOfChart
from .models import DEFAULT_TOL


@dataclass(frozen=True)
class MarcusChart:
    model: object
    time_scale: float = 1.0

    def __post_init__(self):
        if not self.time_scale > 0:
            raise ValueError("time_scale must be positive")

    @property
    def h(self):
        return self.time_scale * self.model.h

    @property
    def chart_radius(self):
        return self.model.chart_radius

    def flow(self, x, t):
        return self.model.flow(x, self.time_scale * np.asarray(t, dtype=float))

    def h_plus(self, x, s):
        return self.model.h_plus(x, s)

    def h_minus(self, x, u):
        return self.model.h_minus(x, u)

    def dist(self, x, y):
        return self.model.dist(x, y)

    def decompose(self, base, target):
        """``(t1, t2, t3)`` with ``target = h-_{t3} g_{t2} h+_{t1} base``."""
        t1, tn, t3 = self.model.decompose(base, target)
        return LocalTimes(t1, tn / self.time_scale, t3)

    def compose(self, base, lt):
        """Inverse of ``decompose``: ``h-_{t3} g_{t2} h+_{t1} base``."""
        return self.h_minus(self.flow(self.h_plus(base, lt.t1), lt.t2), lt.t3)

    def to_dict(self):
        return {"model": self.model.to_dict(), "time_scale": self.time_scale}


def as_chart(model_or_chart):
    if isinstance(model_or_chart, MarcusChart):
        return model_or_chart
    return MarcusChart(model_or_chart)


@dataclass(frozen=True)
class LocalTimes:
    """Stable Marcus parameter, flow time and unstable Marcus parameter."""

    t1: np.ndarray
    t2: np.ndarray
    t3: np.ndarray

    def __iter__(self):
        return iter((self.t1, self.t2, self.t3))


def h_plus(chart, x, s):
    return as_chart(chart).h_plus(x, s)


def h_minus(chart, x, u):
    return as_chart(chart).h_minus(x, u)


def commutation_defects(chart, x, s, t):
    """Defects of the two Marcus commutation laws at ``(x, s, t)``.

    Returns ``(plus, minus)`` arrays of distances between
    ``h+_s f_t x`` and ``f_t h+_{s e^{ht}} x``, and between
    ``h-_s f_t x`` and ``f_t h-_{s e^{-ht}} x``.
    """
    ch = as_chart(chart)
    ft = ch.flow(x, t)
    plus = ch.dist(ch.h_plus(ft, s), ch.flow(ch.h_plus(x, s * np.exp(ch.h * t)), t))
    minus = ch.dist(ch.h_minus(ft, s), ch.flow(ch.h_minus(x, s * np.exp(-ch.h * t)), t))
    return plus, minus


def _check_radius(chart, x, y, delta):
    d = chart.dist(x, y)
    if np.any(d >= delta):
        raise OutOfChart(f"points at distance {np.max(d):.3g} >= chart radius {delta}")


def bracket(model, x, y, delta=None):
    """The unique point of ``W^s_loc(x)`` on ``W^cu_loc(y)``."""
    ch = as_chart(model)
    delta = ch.chart_radius if delta is None else delta
    _check_radius(ch, x, y, delta)
    return ch.h_plus(x, ch.decompose(x, y).t1)


def bracket_u(model, x, y):
    """Reversed roles: the point of ``W^u_loc(x)`` on ``W^cs_loc(y)``."""
    ch = as_chart(model)
    lt = ch.decompose(y, x)
    return ch.flow(ch.h_plus(y, lt.t1), lt.t2)


def stable_holonomy(model, x, y, xp, delta=None):
    """Slide ``xp`` (near ``x``) along stable leaves to the transversal at ``y``.

    ``y`` is expected on ``W^s(x)``; the image is ``[xp, y]``.
    """
    return bracket(model, xp, y, delta=delta)


def joint_integrability_defect(model, x, s_u, s_s):
    """Flow component of the point reached by unstable-then-stable moves.

    The point ``h+_{s_s} h-_{s_u} x`` is decomposed in the stable, flow,
    unstable frame based at ``x``; its flow time vanishes exactly when the
    su-rectangle closes up.
    """
    ch = as_chart(model)
    p = ch.h_plus(ch.h_minus(x, s_u), s_s)
    return np.abs(ch.decompose(x, p).t2)


def local_times(chart_g, phi, x, t, delta=None):
    """Solve ``phi(f_t x) = h-_{t3} g_{t2} h+_{t1} phi(x)`` for the triple.

    ``f`` is the source model's own flow, ``g`` the target chart of ``phi``
    unless ``chart_g`` is given.
    """
    ch = phi.target if chart_g is None else as_chart(chart_g)
    delta = ch.chart_radius if delta is None else delta
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) >= delta):
        raise OutOfChart(f"|t| = {np.max(np.abs(t)):.3g} exceeds local time radius {delta}")
    base = phi(x)
    target = phi(phi.model.flow(x, t))
    return ch.decompose(base, target)


def recomposition_defect(chart_g, phi, x, t):
    ch = phi.target if chart_g is None else as_chart(chart_g)
    lt = local_times(ch, phi, x, t)
    return ch.dist(ch.compose(phi(x), lt), phi(phi.model.flow(x, t)))


def write_defect_csv(path, points, params, defects, param_names=("s", "t")):
    """Write one row per sample: flattened point coordinates, parameters, defect."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    flat = points.reshape(n, -1)
    params = [np.broadcast_to(np.asarray(p, dtype=float), (n,)) for p in params]
    defects = np.broadcast_to(np.asarray(defects, dtype=float), (n,))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i}" for i in range(flat.shape[1])] + list(param_names) + ["defect"])
        for i in range(n):
            w.writerow([repr(float(v)) for v in flat[i]]
                       + [repr(float(p[i])) for p in params] + [repr(float(defects[i]))])


__all__ = [
    "DEFAULT_TOL", "MarcusChart", "LocalTimes", "as_chart", "h_plus", "h_minus",
    "commutation_defects", "bracket", "bracket_u", "stable_holonomy",
    "joint_integrability_defect", "local_times", "recomposition_defect",
    "write_defect_csv",
]
