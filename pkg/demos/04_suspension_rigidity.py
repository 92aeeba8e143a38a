"""
Rigidity of suspensions
=======================

On a constant-roof suspension the closure of an unstable leaf is a fiber
torus, a global section with return time ``T = roof``.  Its image under an
equivalence is a section of ``g`` with return time ``T'``, and ``lambda = T'/T``.
"""

import numpy as np

from anosov_lab import (catalog_map, estimate_lambda, extract_section, make_suspension,
                        rigidity_lambda, t2bar_profile, unstable_line_equidistribution)

cat = make_suspension(2, 1, 1, 1)
section = extract_section(cat, np.array([0.2, 0.4, 0.3]))
print(f"section theta0 = {section.theta0}, return time T = {section.return_time}")
print("equidistribution defect of the unstable line (10x10 cells):",
      unstable_line_equidistribution(section))

for scale in (1.0, 0.5, 0.25):
    for spec in ({"kind": "identity"}, {"kind": "fiber_reparam", "amplitude": 0.05}):
        phi = catalog_map(spec, cat, scale)
        r = rigidity_lambda(phi, section)
        lam_t2 = estimate_lambda(t2bar_profile(phi, [-0.1, 0.1])).lam
        print(f"g_t = f_{scale}t, {spec['kind']:13s}: T' = {r.T_prime:.10f}, "
              f"lambda = {r.lam:.10f}, t2bar gives {lam_t2:.10f}")
