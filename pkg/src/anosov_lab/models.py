"""
Concrete Anosov flow models with closed-form flows, charts and metrics.

Two families are provided:

* ``SuspensionModel`` -- constant-roof suspension of a hyperbolic toral
  automorphism ``A``.  Points are arrays ``[..., 3]`` holding
  ``(xi_s, xi_u, theta)``: fiber coordinates in the (unit) eigenbasis of ``A``
  and the roof coordinate.  The gluing rule is
  ``(xi, theta + c) ~ (Lambda xi, theta)`` with ``Lambda = diag(1/mu, mu)``,
  together with translations of the fiber by the integer lattice.
* ``Psl2Model`` -- the local SL(2, R) chart.  Points are arrays
  ``[..., 2, 2]`` of determinant-one matrices; the flow is right
  multiplication by ``diag(e^{t/2}, e^{-t/2})``.

All operations are vectorized over leading axes and never mutate inputs.

Flows keep the roof coordinate in ``[0, c)`` but leave the fiber in the
covering plane: wrapping by the lattice mixes the stable and unstable
components and destroys relative precision after long flow times.
``normalize`` performs the full reduction to the fundamental domain, and
``dist``/``decompose`` pick matching representatives themselves.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFinite, NonHyperbolic, NonOrientable, OutOfChart

DEFAULT_TOL = 1e-9


def _check_finite(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise NonFinite("coordinates contain NaN or infinity")
    return x


@dataclass(frozen=True)
class TorusMatrix:
    """Hyperbolic element of SL(2, Z) together with its eigendata."""

    a: int
    b: int
    c: int
    d: int
    eigenvalue_large: float = field(init=False)
    eigenvalue_small: float = field(init=False)
    eigenvector_stable: np.ndarray = field(init=False, compare=False, repr=False)
    eigenvector_unstable: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        for v in (self.a, self.b, self.c, self.d):
            if int(v) != v:
                raise NonHyperbolic(f"entries must be integers, got {v!r}")
        a, b, c, d = (int(v) for v in (self.a, self.b, self.c, self.d))
        if a * d - b * c != 1:
            raise NonHyperbolic(f"determinant is {a * d - b * c}, expected 1")
        tr = a + d
        if abs(tr) <= 2:
            raise NonHyperbolic(f"|trace| = {abs(tr)} <= 2")
        if tr < 0:
            raise NonOrientable(
                "negative trace: eigenvalues are negative and the stable/"
                "unstable bundles of the suspension are not orientable")
        mu = (abs(tr) + math.sqrt(tr * tr - 4)) / 2
        vu = self._eigvec(mu)
        vs = self._eigvec(1.0 / mu)
        # orientation convention: vu points right, vs points up
        if vu[0] < 0 or (vu[0] == 0 and vu[1] < 0):
            vu = -vu
        if vs[1] < 0 or (vs[1] == 0 and vs[0] < 0):
            vs = -vs
        object.__setattr__(self, "eigenvalue_large", mu)
        object.__setattr__(self, "eigenvalue_small", 1.0 / mu)
        object.__setattr__(self, "eigenvector_unstable", vu)
        object.__setattr__(self, "eigenvector_stable", vs)

    def _eigvec(self, nu):
        if self.b != 0:
            v = np.array([self.b, nu - self.a], dtype=float)
        else:
            v = np.array([nu - self.d, self.c], dtype=float)
        return v / np.linalg.norm(v)

    @property
    def array(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.int64)

    @property
    def determinant(self):
        return self.a * self.d - self.b * self.c

    @property
    def trace(self):
        return self.a + self.d


class SuspensionModel:
    """Constant-roof suspension flow of a hyperbolic toral automorphism.

    Parameters
    ----------
    matrix : TorusMatrix
    roof : float
        Constant return time ``c > 0``.
    chart_radius : float, optional
        Radius of the local product chart.  Defaults to ``0.4 * min(1, c)``,
        which keeps lattice and roof representatives unambiguous.
    """

    kind = "suspension"

    def __init__(self, matrix, roof, chart_radius=None):
        if not (roof > 0 and math.isfinite(roof)):
            raise ValueError(f"roof must be positive, got {roof!r}")
        self.matrix = matrix
        self.roof = float(roof)
        self.mu = matrix.eigenvalue_large
        self.h = math.log(self.mu) / self.roof
        self.chart_radius = 0.4 * min(1.0, self.roof) if chart_radius is None else float(chart_radius)
        # columns: stable, unstable eigenvectors
        self.basis = np.column_stack([matrix.eigenvector_stable, matrix.eigenvector_unstable])
        self.basis_inv = np.linalg.inv(self.basis)

    def __repr__(self):
        m = self.matrix
        return f"SuspensionModel(matrix=[{m.a},{m.b},{m.c},{m.d}], roof={self.roof})"

    def __eq__(self, other):
        return (isinstance(other, SuspensionModel) and self.matrix == other.matrix
                and self.roof == other.roof)

    def __hash__(self):
        return hash((self.kind, self.matrix, self.roof))

    point_shape = (3,)

    # -- coordinates -------------------------------------------------------

    def to_standard(self, xi):
        """Eigencoordinates ``[..., 2]`` -> standard torus coordinates."""
        return np.asarray(xi) @ self.basis.T

    def to_eigen(self, p):
        return np.asarray(p) @ self.basis_inv.T

    def wrap_fiber(self, xi):
        """Reduce fiber eigencoordinates to the fundamental domain.

        The domain is the preimage of ``[-1/2, 1/2)^2`` in standard
        coordinates.
        """
        p = self.to_standard(xi)
        p = p - np.floor(p + 0.5)
        return self.to_eigen(p)

    def fiber_power(self, xi, k):
        """Apply ``A^k`` to fiber eigencoordinates (no wrapping)."""
        xi = np.asarray(xi, dtype=float)
        k = np.asarray(k, dtype=float)
        out = np.empty(np.broadcast_shapes(xi.shape, k.shape + (2,)))
        out[..., 0] = xi[..., 0] * self.mu ** (-k)
        out[..., 1] = xi[..., 1] * self.mu ** k
        return out

    def _reduce_roof(self, xi, theta):
        c = self.roof
        k = np.floor(theta / c)
        th = theta - k * c
        hi = th >= c
        lo = th < 0
        th = np.where(hi, th - c, np.where(lo, th + c, th))
        k = k + hi - lo
        return self.fiber_power(xi, k), th

    def point(self, xi_s, xi_u, theta):
        return self.normalize(np.stack(np.broadcast_arrays(
            np.asarray(xi_s, float), np.asarray(xi_u, float), np.asarray(theta, float)), axis=-1))

    def normalize(self, raw):
        raw = _check_finite(raw)
        xi, th = self._reduce_roof(raw[..., :2], raw[..., 2])
        out = np.empty(np.broadcast_shapes(raw.shape))
        out[..., :2] = self.wrap_fiber(xi)
        out[..., 2] = th
        return out

    # -- dynamics ----------------------------------------------------------

    def flow(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        shape = np.broadcast_shapes(x.shape, t.shape + (3,))
        xi, th = self._reduce_roof(np.broadcast_to(x[..., :2], shape[:-1] + (2,)), x[..., 2] + t)
        out = np.empty(shape)
        out[..., :2] = xi
        out[..., 2] = th
        return out

    def h_plus(self, x, s):
        x = np.asarray(x, dtype=float)
        s = np.asarray(s, dtype=float)
        out = np.array(np.broadcast_to(x, np.broadcast_shapes(x.shape, s.shape + (3,))))
        out[..., 0] = out[..., 0] + s * self.mu ** (out[..., 2] / self.roof)
        return out

    def h_minus(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        out = np.array(np.broadcast_to(x, np.broadcast_shapes(x.shape, u.shape + (3,))))
        out[..., 1] = out[..., 1] + u * self.mu ** (-out[..., 2] / self.roof)
        return out

    def decompose(self, base, target):
        """Return ``(t1, t2, t3)`` with ``target = h-_{t3} f_{t2} h+_{t1} base``.

        ``t2`` is in units of this model's own flow time.  The representative
        of ``target`` nearest to ``base`` (roof shift, then lattice) is used.
        """
        b = np.asarray(base, dtype=float)
        y = np.asarray(target, dtype=float)
        c = self.roof
        k = np.round((y[..., 2] - b[..., 2]) / c)
        yxi = self.fiber_power(y[..., :2], k)
        dth = y[..., 2] - k * c - b[..., 2]
        dp = self.to_standard(yxi - b[..., :2])
        dp = dp - np.round(dp)
        dxi = self.to_eigen(dp)
        t1 = dxi[..., 0] * self.mu ** (-b[..., 2] / c)
        t3 = dxi[..., 1] * self.mu ** ((b[..., 2] + dth) / c)
        return t1, dth, t3

    def dist(self, x, y):
        """Flat product distance with lattice wrap and roof gluing.

        Minimum over the roof representatives ``k = -1, 0, 1`` of either
        argument, which makes the result exactly symmetric.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        xi_x, th_x = self._reduce_roof(x[..., :2], x[..., 2])
        xi_y, th_y = self._reduce_roof(y[..., :2], y[..., 2])
        best = None
        for k in (-1, 0, 1):
            for (xa, ta), (xb, tb) in (((xi_x, th_x), (xi_y, th_y)), ((xi_y, th_y), (xi_x, th_x))):
                dp = self.to_standard(self.fiber_power(xb, k) - xa)
                dp = dp - np.round(dp)
                d = np.sqrt(np.sum(dp * dp, axis=-1) + (tb - k * self.roof - ta) ** 2)
                best = d if best is None else np.minimum(best, d)
        return best

    def generator_constant(self, t_max=None):
        """Sup-norm of the flow generator: unit speed in the roof direction."""
        return 1.0

    def sample(self, n, rng, stratified=False):
        """``n`` points of the fundamental domain.

        With ``stratified=True`` the roof coordinates form an equispaced grid
        with a random offset (so averages of periodic functions of theta are
        exact), in random order.
        """
        p = rng.uniform(-0.5, 0.5, size=(n, 2))
        if stratified:
            th = self.roof * ((np.arange(n) + rng.uniform()) / n)
            th = th[rng.permutation(n)]
        else:
            th = rng.uniform(0.0, self.roof, size=n)
        out = np.empty((n, 3))
        out[:, :2] = self.to_eigen(p)
        out[:, 2] = th
        return out

    def to_dict(self):
        m = self.matrix
        return {"kind": "suspension", "matrix": [m.a, m.b, m.c, m.d], "roof": self.roof}


class Psl2Model:
    """Local SL(2, R) chart for the geodesic flow; Marcus rate ``h = 1``.

    Stable leaves are orbits of right multiplication by upper unipotents,
    unstable leaves of lower unipotents.  No cocompact quotient is taken.
    """

    kind = "psl2"
    h = 1.0
    point_shape = (2, 2)

    def __init__(self, chart_radius=0.25):
        self.chart_radius = float(chart_radius)

    def __repr__(self):
        return "Psl2Model()"

    def __eq__(self, other):
        return isinstance(other, Psl2Model)

    def __hash__(self):
        return hash(self.kind)

    def normalize(self, raw):
        raw = _check_finite(raw)
        det = raw[..., 0, 0] * raw[..., 1, 1] - raw[..., 0, 1] * raw[..., 1, 0]
        if np.any(det <= 0):
            raise NonFinite("matrix must have positive determinant")
        return raw / np.sqrt(det)[..., None, None]

    def flow(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        out = np.array(np.broadcast_to(x, np.broadcast_shapes(x.shape, t.shape + (2, 2))))
        out[..., :, 0] *= np.exp(t / 2)[..., None]
        out[..., :, 1] *= np.exp(-t / 2)[..., None]
        return out

    def h_plus(self, x, s):
        x = np.asarray(x, dtype=float)
        s = np.asarray(s, dtype=float)
        out = np.array(np.broadcast_to(x, np.broadcast_shapes(x.shape, s.shape + (2, 2))))
        out[..., :, 1] += s[..., None] * out[..., :, 0]
        return out

    def h_minus(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        out = np.array(np.broadcast_to(x, np.broadcast_shapes(x.shape, u.shape + (2, 2))))
        out[..., :, 0] += u[..., None] * out[..., :, 1]
        return out

    @staticmethod
    def _inv(x):
        det = x[..., 0, 0] * x[..., 1, 1] - x[..., 0, 1] * x[..., 1, 0]
        out = np.empty_like(x)
        out[..., 0, 0] = x[..., 1, 1]
        out[..., 1, 1] = x[..., 0, 0]
        out[..., 0, 1] = -x[..., 0, 1]
        out[..., 1, 0] = -x[..., 1, 0]
        return out / det[..., None, None]

    def decompose(self, base, target):
        """Factor ``base^{-1} target = n(t1) a(t2) nbar(t3)``.

        ``n`` upper unipotent, ``a`` the geodesic diagonal, ``nbar`` lower
        unipotent.  Raises OutOfChart when the factorization does not exist
        (lower-right entry not positive).
        """
        b = np.asarray(base, dtype=float)
        y = np.asarray(target, dtype=float)
        m = self._inv(b) @ y
        m22 = m[..., 1, 1]
        if np.any(~(m22 > 0)):
            raise OutOfChart("unipotent-diagonal-unipotent factorization leaves the chart")
        return m[..., 0, 1] / m22, -2.0 * np.log(m22), m[..., 1, 0] / m22

    def dist(self, x, y):
        """Left-invariant distance ``(|x^-1 y - I| + |y^-1 x - I|) / 2`` (Frobenius)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        eye = np.eye(2)
        a = np.linalg.norm(self._inv(x) @ y - eye, axis=(-2, -1))
        b = np.linalg.norm(self._inv(y) @ x - eye, axis=(-2, -1))
        return 0.5 * (a + b)

    def generator_constant(self, t_max):
        """Smallest ``C`` with ``dist(g_t z, z) <= C |t|`` for ``|t| <= t_max``."""
        t_max = float(t_max)
        if t_max == 0:
            return 1 / math.sqrt(2)
        d = math.hypot(math.exp(t_max / 2) - 1, math.exp(-t_max / 2) - 1)
        return d / t_max

    def sample(self, n, rng, stratified=False):
        """Random points ``k(angle) a(t) n(s)`` with ``|t|, |s| <= 1``."""
        ang = rng.uniform(0, 2 * np.pi, size=n)
        t = rng.uniform(-1, 1, size=n)
        s = rng.uniform(-1, 1, size=n)
        k = np.empty((n, 2, 2))
        k[:, 0, 0] = np.cos(ang)
        k[:, 0, 1] = -np.sin(ang)
        k[:, 1, 0] = np.sin(ang)
        k[:, 1, 1] = np.cos(ang)
        return self.h_plus(self.flow(k, t), s)

    @staticmethod
    def identity():
        return np.eye(2)

    def to_dict(self):
        return {"kind": "psl2"}


def make_suspension(a, b, c, d, roof=1.0, chart_radius=None):
    """Build the suspension of ``[[a, b], [c, d]]`` with constant roof."""
    return SuspensionModel(TorusMatrix(a, b, c, d), roof, chart_radius=chart_radius)


def make_psl2(chart_radius=0.25):
    return Psl2Model(chart_radius)


def model_from_dict(spec):
    kind = spec.get("kind")
    if kind == "suspension":
        return make_suspension(*spec["matrix"], roof=spec.get("roof", 1.0),
                               chart_radius=spec.get("chart_radius"))
    if kind == "psl2":
        return make_psl2(spec.get("chart_radius", 0.25))
    raise ValueError(f"unknown model kind {kind!r}")


def model_from_json(text):
    return model_from_dict(json.loads(text))


def model_to_json(model):
    return json.dumps(model.to_dict(), sort_keys=True)


def flow(model, x, t):
    return model.flow(x, t)


def dist(model, x, y):
    return model.dist(x, y)


def normalize(model, raw):
    return model.normalize(raw)
