"""
Catalog of unstable-foliation equivalences and the measurements made on them:
leaf preservation, center-unstable preservation, the flow-time profile
``t2bar`` and the rescaling constant ``lambda``.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import IncompatibleSpec, InsufficientGrid, NonPositiveLambda
from .foliations import MarcusChart, as_chart, local_times
from .models import Psl2Model, SuspensionModel

KINDS = ("identity", "unstable_slide", "stable_slide", "fiber_reparam",
         "linear_induced", "local_shear", "compose")

SHEAR_PROFILES = {
    "signed_square": lambda t: np.sign(t) * t * t,
    "square": lambda t: t * t,
    "linear": lambda t: t,
}


@dataclass(frozen=True, eq=False)
class FoliationMap:
    """A homeomorphism of ``model`` carrying unstable leaves of its flow ``f``
    to unstable leaves of the flow of ``target``.

    Construct through :func:`catalog_map`, which validates the parameters.
    Direct construction skips validation and is how negative controls are
    built.
    """

    kind: str
    params: dict
    model: object
    target: MarcusChart
    parts: tuple = field(default=())

    def __call__(self, x):
        return _apply(self, np.asarray(x, dtype=float), inverse=False)

    def inverse(self, x):
        return _apply(self, np.asarray(x, dtype=float), inverse=True)

    def sample(self, n, rng, stratified=False):
        """Points in the domain of the map."""
        if self.kind == "local_shear":
            r = self.params.get("radius", 0.1)
            m = self.model
            a, b, c = rng.uniform(-r, r, size=(3, n))
            x0 = np.asarray(self.params["center"], dtype=float)
            return m.h_minus(m.flow(m.h_plus(np.broadcast_to(x0, (n, 2, 2)), a), b), c)
        if self.kind == "compose" and any(p.kind == "local_shear" for p in self.parts):
            return next(p for p in self.parts if p.kind == "local_shear").sample(n, rng, stratified)
        return self.model.sample(n, rng, stratified=stratified)

    def to_dict(self):
        d = {"kind": self.kind}
        d.update(self.params)
        if self.kind == "compose":
            d["maps"] = [p.to_dict() for p in self.parts]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def __repr__(self):
        return f"FoliationMap({self.to_json()}, model={self.model!r}, time_scale={self.target.time_scale})"


def _gamma(params, roof, theta, deriv=False):
    amp = params.get("amplitude", 0.0)
    w = 2 * math.pi * params.get("mode", 1) / roof
    ph = params.get("phase", 0.0)
    if deriv:
        return amp * w * np.cos(w * theta + ph)
    return amp * np.sin(w * theta + ph)


def _apply(phi, x, inverse):
    kind, p, m = phi.kind, phi.params, phi.model
    sgn = -1.0 if inverse else 1.0
    if kind == "identity":
        return x.copy()
    if kind == "unstable_slide":
        return m.h_minus(x, sgn * p["sigma"])
    if kind == "stable_slide":
        return m.h_plus(x, sgn * p["sigma"])
    if kind == "fiber_reparam":
        th = x[..., 2]
        if not inverse:
            return m.flow(x, _gamma(p, m.roof, th))
        # solve s + gamma(s) = th for s, Newton is safe since 1 + gamma' > 0
        s = th - _gamma(p, m.roof, th)
        for _ in range(60):
            step = (s + _gamma(p, m.roof, s) - th) / (1 + _gamma(p, m.roof, s, deriv=True))
            s = s - step
            if np.all(np.abs(step) < 1e-15):
                break
        return m.flow(x, s - th)
    if kind == "linear_induced":
        bs, bu = _linear_eigen(phi)
        out = x.copy()
        if inverse:
            bs, bu = 1 / bs, 1 / bu
        out[..., 0] *= bs
        out[..., 1] *= bu
        return out
    if kind == "local_shear":
        x0 = np.asarray(p["center"], dtype=float)
        prof = SHEAR_PROFILES[p.get("profile", "signed_square")]
        coef = p.get("coefficient", 1.0)
        t = m.decompose(x0, x)[1]
        shift = sgn * coef * prof(t)
        # chart coordinates (s, t, u) about x0 become (s + shift(t), t, u)
        return _shear(m, x0, shift, x)
    if kind == "compose":
        parts = reversed(phi.parts) if inverse else phi.parts
        for q in parts:
            x = _apply(q, x, inverse)
        return x
    raise IncompatibleSpec(f"unknown map kind {kind!r}")


def _shear(m, x0, shift, x):
    """``x0 n(shift) x0^{-1} x``."""
    x0inv = m._inv(x0)
    n = np.zeros(np.shape(shift) + (2, 2))
    n[..., 0, 0] = 1
    n[..., 1, 1] = 1
    n[..., 0, 1] = shift
    return x0 @ n @ x0inv @ x


def _linear_eigen(phi):
    m = phi.model
    B = np.asarray(phi.params["matrix"], dtype=float).reshape(2, 2)
    vs = m.matrix.eigenvector_stable
    vu = m.matrix.eigenvector_unstable
    return float(vs @ B @ vs), float(vu @ B @ vu)


def _validate(kind, params, model):
    if kind not in KINDS:
        raise IncompatibleSpec(f"unknown map kind {kind!r}; expected one of {KINDS}")
    if kind in ("unstable_slide", "stable_slide"):
        if "sigma" not in params or not math.isfinite(params["sigma"]):
            raise IncompatibleSpec(f"{kind} needs a finite 'sigma'")
    if kind == "stable_slide" and not isinstance(model, SuspensionModel):
        raise IncompatibleSpec(
            "stable_slide preserves unstable leaves only when the stable and "
            "unstable foliations are jointly integrable (suspension models)")
    if kind == "fiber_reparam":
        if not isinstance(model, SuspensionModel):
            raise IncompatibleSpec("fiber_reparam requires a suspension model")
        mode = params.get("mode", 1)
        if int(mode) != mode or mode < 1:
            raise IncompatibleSpec("fiber_reparam 'mode' must be a positive integer "
                                   "(gamma has to be roof-periodic)")
        slope = abs(params.get("amplitude", 0.0)) * 2 * math.pi * mode / model.roof
        if slope >= 1:
            raise IncompatibleSpec(f"theta + gamma(theta) is not monotone (|gamma'| up to {slope:.3g})")
    if kind == "linear_induced":
        if not isinstance(model, SuspensionModel):
            raise IncompatibleSpec("linear_induced requires a suspension model")
        B = np.asarray(params.get("matrix"), dtype=float).reshape(2, 2)
        if not np.all(B == np.round(B)):
            raise IncompatibleSpec("linear_induced matrix must be integral")
        if abs(round(np.linalg.det(B))) != 1:
            raise IncompatibleSpec("linear_induced matrix must have determinant +-1")
        A = model.matrix.array.astype(float)
        if not np.array_equal(A @ B, B @ A):
            raise IncompatibleSpec("linear_induced matrix must commute with the suspended matrix")
    if kind == "local_shear":
        if not isinstance(model, Psl2Model):
            raise IncompatibleSpec("local_shear is a synthetic map of the psl2 chart")
        if params.get("profile", "signed_square") not in SHEAR_PROFILES:
            raise IncompatibleSpec(f"unknown shear profile {params.get('profile')!r}")


def catalog_map(spec, model, target=None):
    """Build and validate a catalog equivalence from a JSON-like spec.

    Parameters
    ----------
    spec : dict or str
        e.g. ``{"kind": "unstable_slide", "sigma": 0.3}``.
    model : SuspensionModel or Psl2Model
        Carries the source flow ``f``.
    target : MarcusChart or float, optional
        Target flow ``g``; a float is read as the time scale of ``g_t = f_{c t}``.
    """
    if isinstance(spec, str):
        spec = json.loads(spec)
    spec = dict(spec)
    if target is None:
        target = MarcusChart(model, spec.pop("time_scale", 1.0))
    elif not isinstance(target, MarcusChart):
        target = MarcusChart(model, float(target))
    if target.model != model:
        raise IncompatibleSpec("target chart must live on the same model")
    kind = spec.pop("kind", None)
    _validate(kind, spec, model)
    parts = ()
    if kind == "compose":
        parts = tuple(catalog_map(s, model, target) for s in spec.pop("maps", []))
    if kind == "local_shear":
        spec["center"] = np.asarray(spec.get("center", np.eye(2)), dtype=float).tolist()
    return FoliationMap(kind, spec, model, target, parts)


def _samples(phi, n, seed, stratified=False):
    return phi.sample(n, np.random.default_rng(seed), stratified=stratified)


def leaf_preservation_defect(phi, n_samples=1000, u_max=0.2, seed=0):
    """Max of ``|t1| + |t2|`` for ``phi(h-_u x)`` decomposed against ``phi(x)``."""
    rng = np.random.default_rng(seed)
    x = phi.sample(n_samples, rng)
    u = rng.uniform(-u_max, u_max, size=n_samples)
    lt = phi.target.decompose(phi(x), phi(phi.model.h_minus(x, u)))
    return float(np.max(np.abs(lt.t1) + np.abs(lt.t2)))


def cu_image_defect(phi, n_samples=1000, times=(-0.1, -0.05, 0.05, 0.1), seed=0):
    """Max ``|t1(x, t)|``; zero iff ``phi`` maps center-unstable leaves to
    center-unstable leaves on the sample."""
    x = _samples(phi, n_samples, seed)
    worst = 0.0
    for t in times:
        worst = max(worst, float(np.max(np.abs(local_times(None, phi, x, t).t1))))
    return worst


def roundtrip_defect(phi, n_samples=1000, seed=0):
    x = _samples(phi, n_samples, seed)
    d1 = phi.model.dist(phi.inverse(phi(x)), x)
    d2 = phi.model.dist(phi(phi.inverse(x)), x)
    return float(max(np.max(d1), np.max(d2)))


def leaf_constancy_defect(phi, times, n_samples=1000, u_max=0.2, seed=0):
    """Max ``|t2(h-_u x, t) - t2(x, t)|``: flow time is constant along unstable leaves."""
    rng = np.random.default_rng(seed)
    x = phi.sample(n_samples, rng)
    u = rng.uniform(-u_max, u_max, size=n_samples)
    xu = phi.model.h_minus(x, u)
    worst = 0.0
    for t in times:
        a = local_times(None, phi, x, t).t2
        b = local_times(None, phi, xu, t).t2
        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst


@dataclass
class T2Profile:
    times: np.ndarray
    values: np.ndarray          # (n_times, n_points), may be empty for synthetic tables
    t2bar: np.ndarray
    constancy_defect: np.ndarray
    slope: float

    @classmethod
    def from_table(cls, times, t2bar):
        times = np.asarray(times, dtype=float)
        t2bar = np.asarray(t2bar, dtype=float)
        return cls(times, t2bar[:, None], t2bar, np.zeros_like(times), _ls_slope(times, t2bar))

    def rows(self):
        return [(float(t), float(v), float(c))
                for t, v, c in zip(self.times, self.t2bar, self.constancy_defect)]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "t2bar", "constancy_defect"])
            for row in self.rows():
                w.writerow([repr(v) for v in row])

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        prof = cls.from_table(data[:, 0], data[:, 1])
        prof.constancy_defect = data[:, 2]
        return prof


def _ls_slope(t, v):
    den = float(np.dot(t, t))
    return float(np.dot(t, v) / den) if den > 0 else float("nan")


def t2bar_profile(phi, times, n_samples=200, seed=0):
    """Evaluate ``t2(x, t)`` over a stratified sample for each ``t``."""
    times = np.asarray(times, dtype=float)
    x = _samples(phi, n_samples, seed, stratified=True)
    values = np.stack([local_times(None, phi, x, t).t2 for t in times])
    t2bar = values.mean(axis=1)
    constancy = np.max(np.abs(values - t2bar[:, None]), axis=1)
    return T2Profile(times, values, t2bar, constancy, _ls_slope(times, t2bar))


def additivity_defect(profile, atol=1e-12):
    """Max ``|t2bar(t + t') - t2bar(t) - t2bar(t')|`` over grid triples."""
    t = profile.times
    v = profile.t2bar
    worst = None
    for i in range(len(t)):
        for j in range(i, len(t)):
            k = np.flatnonzero(np.abs(t - (t[i] + t[j])) <= atol)
            if k.size:
                d = abs(v[k[0]] - v[i] - v[j])
                worst = d if worst is None else max(worst, d)
    if worst is None:
        raise InsufficientGrid("no (t, t', t + t') triple in the profile")
    return float(worst)


class LambdaFit(NamedTuple):
    lam: float
    residual: float


def estimate_lambda(profile):
    """Least-squares slope through the origin of ``t2bar`` against ``t``."""
    t, v = profile.times, profile.t2bar
    if t.size == 0 or not np.any(t != 0):
        raise InsufficientGrid("profile has no nonzero times")
    lam = _ls_slope(t, v)
    if not lam > 0:
        raise NonPositiveLambda(f"fitted slope {lam:.6g} is not positive")
    return LambdaFit(lam, float(np.max(np.abs(v - lam * t))))


__all__ = [
    "FoliationMap", "catalog_map", "leaf_preservation_defect", "cu_image_defect",
    "roundtrip_defect", "leaf_constancy_defect", "T2Profile", "t2bar_profile",
    "additivity_defect", "LambdaFit", "estimate_lambda", "as_chart",
]
