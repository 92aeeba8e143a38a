"""
Rigidity in the constant-roof case: the fiber torus through a point is the
closure of its unstable leaf and a global section with return time equal to
the roof.  An equivalence carries it to a section of the target flow, whose
return time ``T'`` gives ``lambda = T' / T``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import NonPositiveReturn, NotSuspension, SectionMismatch
from .models import SuspensionModel


@dataclass(frozen=True)
class SectionDescriptor:
    model: SuspensionModel
    theta0: float
    return_time: float

    def points(self, fiber):
        """Lift fiber eigencoordinates ``[..., 2]`` to points of the section."""
        fiber = np.asarray(fiber, dtype=float)
        out = np.empty(fiber.shape[:-1] + (3,))
        out[..., :2] = fiber
        out[..., 2] = self.theta0
        return out

    def sample(self, n, rng):
        return self.points(self.model.to_eigen(rng.uniform(-0.5, 0.5, size=(n, 2))))


def extract_section(model, x):
    if not isinstance(model, SuspensionModel):
        raise NotSuspension(f"{model!r} has no global section of fibers")
    x = model.normalize(x)
    return SectionDescriptor(model, float(x[2]), model.roof)


def return_map(section, p):
    """First-return map on fiber eigencoordinates, reduced to the torus."""
    m = section.model
    return m.wrap_fiber(m.fiber_power(p, 1))


def fiber_dist(model, p, q):
    dp = model.to_standard(np.asarray(p) - np.asarray(q))
    dp = dp - np.round(dp)
    return np.sqrt(np.sum(dp * dp, axis=-1))


def unstable_line_equidistribution(section, base=(0.0, 0.0), n=10_000, cells=10, length=None):
    """Max deviation of cell occupation frequencies from ``1 / cells**2``.

    The unstable line through ``base`` is sampled at ``n`` equispaced Marcus
    parameters; a small value is the finite-sample stand-in for density of
    the leaf in the fiber.
    """
    m = section.model
    length = 50.0 * n ** 0.5 if length is None else length
    u = np.linspace(0.0, length, n)
    xi = np.zeros((n, 2))
    xi[:, 0] = base[0]
    xi[:, 1] = base[1] + u
    p = m.to_standard(xi)
    p = p - np.floor(p)
    idx = np.minimum((p * cells).astype(int), cells - 1)
    counts = np.zeros((cells, cells))
    np.add.at(counts, (idx[:, 0], idx[:, 1]), 1)
    return float(np.max(np.abs(counts / n - 1.0 / cells ** 2)))


class RigidityResult(NamedTuple):
    lam: float
    T: float
    T_prime: float
    monodromy_defect: float


def _offset(model, theta, theta0):
    c = model.roof
    return (theta - theta0 + c / 2) % c - c / 2


def find_return_time(chart, q, theta_ref, step=None, max_time=None, xtol=1e-13):
    """Smallest ``|tau| > 0`` with ``g_tau(q)`` back on the fiber ``theta_ref``.

    Scans ``tau`` on a grid in both directions and refines the first
    continuous zero crossing of the roof offset by Brent's method.
    """
    m = chart.model
    c = m.roof
    step = c / (16 * chart.time_scale) if step is None else step
    max_time = 64 * c / chart.time_scale if max_time is None else max_time

    def f(tau):
        return float(_offset(m, chart.flow(q, tau)[2], theta_ref))

    best = None
    for direction in (1.0, -1.0):
        grid = direction * np.arange(1, int(max_time / step) + 1) * step
        prev_t, prev_v = 0.0, 0.0
        for tau in grid:
            v = f(tau)
            # a zero crossing, not the jump of the wrapped offset at +-c/2
            if prev_t != 0.0 and np.sign(v) != np.sign(prev_v) and abs(v - prev_v) < c / 2:
                root = brentq(f, prev_t, tau, xtol=xtol)
                if best is None or abs(root) < abs(best):
                    best = root
                break
            if v == 0.0 and tau != 0.0:
                best = tau if best is None or abs(tau) < abs(best) else best
                break
            prev_t, prev_v = tau, v
    return best


def rigidity_lambda(phi, section_f, chart_g=None, n_samples=64, seed=0, tol=1e-9):
    """``lambda = T'/T`` from the return time of the image section.

    Returns ``RigidityResult(lam, T, T_prime, monodromy_defect)`` where the
    defect is ``max dist(phi(F p), g_{T'}(phi p))`` over section samples.
    """
    g = phi.target if chart_g is None else chart_g
    if not isinstance(g.model, SuspensionModel):
        raise NotSuspension("target flow is not a suspension")
    rng = np.random.default_rng(seed)
    S = section_f.sample(n_samples, rng)
    q = phi(S)
    th = g.model.normalize(q)[:, 2]
    ref = float(th[0])
    spread = np.max(np.abs(_offset(g.model, th, ref)))
    if spread > tol:
        raise SectionMismatch(f"image of the section is not a single fiber (spread {spread:.3g})")
    Tp = find_return_time(g, q[0], ref)
    if Tp is None:
        raise SectionMismatch("no return of the image section found")
    if Tp <= 0:
        raise NonPositiveReturn(f"return time {Tp:.6g} is not positive")
    back = np.max(np.abs(_offset(g.model, g.model.normalize(g.flow(q, Tp))[:, 2], ref)))
    if back > tol:
        raise SectionMismatch(f"image section does not return as a whole (offset {back:.3g})")
    F = section_f.model.flow(S, section_f.return_time)
    mono = g.dist(phi(F), g.flow(q, Tp))
    T = section_f.return_time
    return RigidityResult(Tp / T, T, Tp, float(np.max(mono)))


__all__ = [
    "SectionDescriptor", "extract_section", "return_map", "fiber_dist",
    "unstable_line_equidistribution", "RigidityResult", "find_return_time",
    "rigidity_lambda",
]
