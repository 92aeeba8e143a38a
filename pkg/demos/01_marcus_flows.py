"""
Marcus parametrizations on the two models
=========================================

The stable and unstable flows ``h+`` and ``h-`` slide points along the strong
leaves and are rescaled by the geodesic/suspension flow at the constant rate
``h``.  On the cat-map suspension the local su-rectangles close up; on psl2
they do not, and the gap is the flow time ``2 ln(1 + s u)``.
"""

import math

import numpy as np

from anosov_lab import (bracket, commutation_defects, joint_integrability_defect, make_psl2,
                        make_suspension)

cat = make_suspension(2, 1, 1, 1, roof=1.0)
psl2 = make_psl2()
print(f"cat map: mu = {cat.mu:.6f}, h = ln(mu) = {cat.h:.6f}")

rng = np.random.default_rng(0)

# commutation laws h+_s f_t = f_t h+_{s e^{ht}} and the unstable analogue
for m in (cat, psl2):
    x = m.sample(10_000, rng)
    plus, minus = commutation_defects(m, x, rng.uniform(-1, 1, 10_000), rng.uniform(-5, 5, 10_000))
    print(f"{type(m).__name__:16s} commutation defects: {plus.max():.1e} {minus.max():.1e}")

# the bracket picks the stable coordinate of y and the rest from x
x = np.array([0.2, 0.4, 0.3])
y = np.array([0.25, 0.1, 0.35])
print("bracket on the suspension:", bracket(cat, x, y))

# joint integrability: zero on the suspension, 2 ln(1 + su) on psl2
for scale in (0.05, 0.1, 0.2):
    d_cat = joint_integrability_defect(cat, x, scale, scale)
    d_psl = joint_integrability_defect(psl2, np.eye(2), scale, scale)
    print(f"scale {scale}: suspension {float(d_cat):.1e}, psl2 {float(d_psl):.7f}"
          f" (2 ln(1+s^2) = {2 * math.log1p(scale * scale):.7f})")
