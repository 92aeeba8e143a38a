"""
The topological conjugacy as the uniform limit of ``phi_T = g_{-lam T} phi f_T``.

Since ``phi_T(x)`` stays on the unstable leaf of ``phi(x)`` one writes
``phi_T(x) = h-_{tau(x, T)} phi(x)``.  Pushing the unstable parameter through
``g_{-lam T1}`` with the Marcus law rescales it by ``exp(-h_g lam T1)``, so

    tau(x, T1 + T2) = tau(x, T1) + exp(-r T1) tau(f_{T1} x, T2),   r = h_g * lam,

and unit-step increments of ``tau`` are bounded by a geometric tail with
ratio ``exp(-r)``.  When ``h_g = 1`` (the psl2 chart) ``r`` is just ``lam``.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, NotOnLeaf
from .models import DEFAULT_TOL


def contraction_rate(phi, lam):
    """Rate ``r = h_g * lam`` at which tau increments decay."""
    return phi.target.h * lam


def phi_T(phi, lam, x, T):
    """``g_{-lam T}(phi(f_T(x)))``."""
    return phi.target.flow(phi(phi.model.flow(x, T)), -lam * np.asarray(T, dtype=float))


def tau(phi, lam, x, T, tol=DEFAULT_TOL):
    """Unstable Marcus parameter from ``phi(x)`` to ``phi_T(x)``."""
    lt = phi.target.decompose(phi(x), phi_T(phi, lam, x, T))
    off = np.abs(lt.t1) + np.abs(lt.t2)
    if np.any(off > tol):
        raise NotOnLeaf(f"phi_T(x) leaves the unstable leaf of phi(x) (|t1|+|t2| = {np.max(off):.3g})")
    return lt.t3


def tau_recursion_defect(phi, lam, x, T1, T2, tol=DEFAULT_TOL):
    lhs = tau(phi, lam, x, np.asarray(T1) + np.asarray(T2), tol)
    rhs = (tau(phi, lam, x, T1, tol)
           + np.exp(-contraction_rate(phi, lam) * np.asarray(T1, dtype=float))
           * tau(phi, lam, phi.model.flow(x, T1), T2, tol))
    return np.abs(lhs - rhs)


def cauchy_bound(lam, tau0, T, Tp):
    """Tail bound ``exp(-lam floor(Tp)) tau0 / (1 - exp(-lam))``.

    ``lam`` is the contraction rate of the increments (``h_g`` times the time
    rescaling).  ``T`` only has to satisfy ``T >= Tp`` and may be infinite.
    """
    if not lam > 0:
        raise ValueError("rate must be positive")
    if T < Tp:
        raise ValueError("need T >= Tp")
    return math.exp(-lam * math.floor(Tp)) * tau0 / (1 - math.exp(-lam))


@dataclass
class ConvergenceCertificate:
    lam: float
    rate: float
    tau0: float
    tau0_grid: dict
    steps: list = field(default_factory=list)   # dicts with T, increment, bound
    T_star: float = float("nan")
    final_defect: float = float("nan")
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def bounds_monotone(self):
        b = [s["bound"] for s in self.steps]
        return all(b2 <= b1 for b1, b2 in zip(b, b[1:]))

    def to_dict(self):
        return {
            "lambda": self.lam,
            "rate": self.rate,
            "tau0": self.tau0,
            "tau0_grid": self.tau0_grid,
            "steps": self.steps,
            "T_star": self.T_star,
            "final_defect": self.final_defect,
            "violations": self.violations,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


@dataclass(frozen=True, eq=False)
class Conjugacy:
    """Lazy ``psi(x) = h-_{tau(x, T*)} phi(x)``."""

    phi: object
    lam: float
    T_star: float
    tol: float = DEFAULT_TOL

    def tau(self, x):
        return tau(self.phi, self.lam, x, self.T_star, self.tol)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.phi.target.h_minus(self.phi(x), self.tau(x))


def build_psi(phi, lam, tol=1e-8, n_samples=256, seed=0, max_steps=200,
              defect_times=np.linspace(-5, 5, 11), defect_samples=1000, slack=1e-9):
    """Iterate ``T = 1, 2, ...`` until the tail bound drops below ``tol``.

    Returns ``(psi, certificate)``.  Raises NoConvergence when the maps
    ``phi_T`` leave the unstable leaves (wrong ``lam`` or a map that does not
    preserve center-unstable leaves) or after ``max_steps`` steps.
    """
    if not lam > 0:
        raise NoConvergence("lambda must be positive")
    rng = np.random.default_rng(seed)
    x = phi.sample(n_samples, rng)
    rate = contraction_rate(phi, lam)
    T_grid = np.linspace(0.0, 1.0, 11)
    try:
        tau0 = max(float(np.max(np.abs(tau(phi, lam, x, T)))) for T in T_grid)
        cert = ConvergenceCertificate(lam, rate, tau0,
                                      {"n_points": n_samples, "n_times": len(T_grid)})
        prev = tau(phi, lam, x, 0.0)
        T = 0
        while True:
            T += 1
            if T > max_steps:
                raise NoConvergence(f"tail bound still above {tol} after {max_steps} steps")
            cur = tau(phi, lam, x, float(T))
            inc = float(np.max(np.abs(cur - prev)))
            bound = cauchy_bound(rate, tau0, T, T - 1)
            cert.steps.append({"T": T, "increment": inc, "bound": bound})
            if inc > bound + slack:
                cert.violations.append({"T": T, "increment": inc, "bound": bound})
            prev = cur
            if cauchy_bound(rate, tau0, math.inf, T) < tol:
                break
    except NotOnLeaf as e:
        raise NoConvergence(f"phi_T does not stay on unstable leaves: {e}") from e
    cert.T_star = float(T)
    psi = Conjugacy(phi, lam, float(T))
    if defect_samples:
        cert.final_defect = conjugacy_defect(psi, lam, defect_times, defect_samples, seed=seed + 1)
    return psi, cert


def conjugacy_defect(psi, lam, times, n_samples=1000, seed=0):
    """Max ``dist(psi(f_t x), g_{lam t}(psi(x)))`` over samples and times."""
    phi = psi.phi
    x = phi.sample(n_samples, np.random.default_rng(seed))
    px = psi(x)
    worst = 0.0
    for t in np.atleast_1d(times):
        d = phi.target.dist(psi(phi.model.flow(x, t)), phi.target.flow(px, lam * t))
        worst = max(worst, float(np.max(d)))
    return worst


def injectivity_probe(psi, n_pairs=1000, seed=0):
    """Smallest ``dist(psi(x), psi(y))`` over random pairs ``x != y``."""
    rng = np.random.default_rng(seed)
    x = psi.phi.sample(n_pairs, rng)
    y = psi.phi.sample(n_pairs, rng)
    return float(np.min(psi.phi.target.dist(psi(x), psi(y))))


def semigroup_defect(phi, lam, x, T, t):
    """``dist(phi_T(f_t x), g_{lam t}(phi_{T+t}(x)))``."""
    a = phi_T(phi, lam, phi.model.flow(x, t), T)
    b = phi.target.flow(phi_T(phi, lam, x, np.asarray(T) + np.asarray(t)), lam * np.asarray(t, dtype=float))
    return phi.target.dist(a, b)


__all__ = [
    "contraction_rate", "phi_T", "tau", "tau_recursion_defect", "cauchy_bound",
    "ConvergenceCertificate", "Conjugacy", "build_psi", "conjugacy_defect",
    "injectivity_probe", "semigroup_defect",
]
