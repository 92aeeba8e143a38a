"""
anosov_lab
==========

Numerical laboratory for unstable-foliation equivalences between Anosov flows
on two explicit models: the suspension of a hyperbolic torus automorphism and
the geodesic flow of PSL(2, R) in a local matrix chart.

Points are plain float arrays (``(..., 3)`` on the suspension, ``(..., 2, 2)``
on psl2) so that every operation vectorizes over samples.
"""

from .errors import *  # noqa: F401,F403
from .models import (DEFAULT_TOL, Psl2Model, SuspensionModel, TorusMatrix, make_psl2,
                     make_suspension, model_from_dict, model_from_json, model_to_json)
from .foliations import (LocalTimes, MarcusChart, bracket, bracket_u, commutation_defects,
                         joint_integrability_defect, local_times, recomposition_defect,
                         stable_holonomy)
from .equivalence import (FoliationMap, T2Profile, additivity_defect, catalog_map,
                          cu_image_defect, estimate_lambda, leaf_constancy_defect,
                          leaf_preservation_defect, roundtrip_defect, t2bar_profile)
from .conjugacy import (ConvergenceCertificate, Conjugacy, build_psi, cauchy_bound,
                        conjugacy_defect, tau, tau_recursion_defect)
from .suspension import extract_section, rigidity_lambda, unstable_line_equidistribution
from .renormalization import (renorm_time, renormalization_stage, renormalized_limit,
                              s_prime_defect, sign_change_times, surface_gap, surface_pair)

__version__ = "0.1.0"
