"""
Renormalizing surfaces toward an su-rectangle
=============================================

A stable slide on the suspension does not preserve center-unstable leaves, so
``t1(x, t)`` changes sign across ``t = 0``.  For each sign-change pair the
surfaces ``psi`` and ``varphi`` are pushed back by ``T_n = log(L / alpha_n) / h``
and compared with the rectangle ``h-_{[-L,L]} h+_{[-L,L]}(y)``; on the
suspension they converge at rate ``e^{-h}`` per unit time.
"""

import math

import numpy as np

from anosov_lab import (MarcusChart, catalog_map, make_suspension, renormalization_stage,
                        renormalized_limit, sign_change_times, surface_gap)
from anosov_lab.plotting import plot_surfaces

cat = make_suspension(2, 1, 1, 1)
ch = MarcusChart(cat)
phi = catalog_map({"kind": "stable_slide", "sigma": 0.2}, cat)
x = np.array([-0.2, 0.0, 0.0])
L = 0.1

pairs = sign_change_times(phi, x, 0.3, alphas=[L * math.exp(-cat.h * n) for n in range(2, 9)])
stages = [renormalization_stage(ch, phi, x, L, p) for p in pairs]
for st in stages:
    g = surface_gap(st.psi, st.varphi, st.T, ch)
    print(f"T = {st.T:4.1f}  alpha = {st.pair.alpha:.3e}  gap {g.gap:.3e} <= {g.bound:.3e}")

tab = renormalized_limit(ch, [st.varphi for st in stages], [st.T for st in stages], L)
print("distances:", np.array2string(tab.distances, precision=3))
print(f"rate {tab.rate():.5f} per unit time, e^-h = {math.exp(-cat.h):.5f}")

last = stages[-1]
plot_surfaces({"psi": cat.normalize(ch.flow(last.psi.points, -last.T)).reshape(-1, 3),
               "varphi": cat.normalize(ch.flow(last.varphi.points, -last.T)).reshape(-1, 3)},
              "renormalized_surfaces.svg")
print("wrote renormalized_surfaces.svg")
