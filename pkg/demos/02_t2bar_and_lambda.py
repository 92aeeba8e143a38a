"""
Flow time along an equivalence and the constant lambda
======================================================

For an equivalence ``phi`` of unstable foliations, the local times
``phi(f_t x) = h-_{t3} g_{t2} h+_{t1} phi(x)`` give a flow time ``t2`` that is
constant along unstable leaves, additive in ``t`` and therefore linear,
``t2bar(t) = lambda t``.
"""

import numpy as np

from anosov_lab import (additivity_defect, catalog_map, cu_image_defect, estimate_lambda,
                        leaf_preservation_defect, make_suspension, t2bar_profile)

cat = make_suspension(2, 1, 1, 1)
times = [-0.2, -0.1, -0.05, 0.05, 0.1, 0.15, 0.2]

maps = {
    "identity, g = f": catalog_map({"kind": "identity"}, cat),
    "identity, g_t = f_0.5t": catalog_map({"kind": "identity"}, cat, 0.5),
    "unstable slide 0.3": catalog_map({"kind": "unstable_slide", "sigma": 0.3}, cat),
    "stable slide 0.2": catalog_map({"kind": "stable_slide", "sigma": 0.2}, cat),
    "fiber reparam": catalog_map({"kind": "fiber_reparam", "amplitude": 0.05}, cat),
}

# the stable slide moves center-unstable leaves (cu column): allowed only
# because the suspension is not mixing
print(f"{'map':24s} {'leaves':>8s} {'cu':>8s} {'additive':>9s} {'lambda':>10s}")
for name, phi in maps.items():
    prof = t2bar_profile(phi, times)
    fit = estimate_lambda(prof)
    print(f"{name:24s} {leaf_preservation_defect(phi):8.1e} {cu_image_defect(phi):8.1e} "
          f"{additivity_defect(prof):9.1e} {fit.lam:10.6f}")

print("t2bar for the rescale:", np.round(t2bar_profile(maps["identity, g_t = f_0.5t"], times).t2bar, 12))
