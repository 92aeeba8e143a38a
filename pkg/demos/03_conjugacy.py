"""
Building the conjugacy as a limit
=================================

``phi_T = g_{-lam T} phi f_T`` moves along unstable leaves by ``tau(x, T)``,
and the increments decay geometrically at rate ``h lam``.  For an unstable
slide the limit undoes the slide exactly.
"""

import math

import numpy as np

from anosov_lab import build_psi, catalog_map, conjugacy_defect, make_suspension, tau

cat = make_suspension(2, 1, 1, 1)
phi = catalog_map({"kind": "unstable_slide", "sigma": 0.3}, cat)
x = cat.sample(5, np.random.default_rng(1))

for T in (0, 1, 3, 10):
    print(f"tau(x, {T:2d}) = {float(tau(phi, 1.0, x, T)[0]):+.9f}"
          f"   closed form {0.3 * (math.exp(-cat.h * T) - 1):+.9f}")

psi, cert = build_psi(phi, 1.0, tol=1e-10)
print(f"tau0 = {cert.tau0:.6f}, stopped at T* = {cert.T_star:.0f}")
for s in cert.steps[:5]:
    print(f"  T={s['T']:2d} increment {s['increment']:.3e} <= bound {s['bound']:.3e}")
print("psi is the identity up to", float(np.max(cat.dist(psi(x), x))))
print("conjugacy defect over t in [-5, 5]:", conjugacy_defect(psi, 1.0, np.linspace(-5, 5, 11), 1000))

# a wrong lambda leaves the unstable leaves immediately
try:
    build_psi(phi, 2.0)
except Exception as e:
    print("lambda = 2:", type(e).__name__)
