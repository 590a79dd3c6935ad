from .anchors import (AnchorSet, IncompleteSelection, XrayResult, cg_nmf, error_curve, gp_nmf,
                      relative_error, spa, xray)
from .geometry import (PolytopeSpec, SolidAngle, condition_number, extreme_points_bruteforce,
                       normal_cone_member, projections_needed, regular_polygon, solid_angle_mc,
                       solid_angles_mc, srht_counterexample_check, sin_3pi_10_exceeds,
                       CounterexampleReport)
from .nnls import nnls_solve
from .synthetic import SeparableInstance, generate_noisy_polytope, generate_separable

__all__ = [
    "AnchorSet", "IncompleteSelection", "XrayResult", "cg_nmf", "gp_nmf", "spa", "xray",
    "relative_error", "error_curve", "PolytopeSpec", "SolidAngle", "condition_number",
    "extreme_points_bruteforce", "normal_cone_member", "projections_needed", "regular_polygon",
    "solid_angle_mc", "solid_angles_mc", "nnls_solve", "SeparableInstance",
    "generate_noisy_polytope", "generate_separable", "srht_counterexample_check",
    "sin_3pi_10_exceeds", "CounterexampleReport",
]
