"""Equilibria, stability and symmetrization for the total inverse curvature of half-plane curves."""
from .critical import (CriticalCurve, CriticalParams, area_closed_form, build_critical_curve,
                       el_residual, f_closed_form, hk_counterexample_ratio, make_params,
                       solve_length)
from .curvegeom import (DiscreteCurve, check_admissible, enclosed_area, frame_and_curvature,
                        resample, semicircle, total_inverse_curvature)
from .errors import InvCurvError, ThresholdViolation

__version__ = "0.1.0"

__all__ = [
    "CriticalCurve", "CriticalParams", "DiscreteCurve", "InvCurvError", "ThresholdViolation",
    "area_closed_form", "build_critical_curve", "check_admissible", "el_residual",
    "enclosed_area", "f_closed_form", "frame_and_curvature", "hk_counterexample_ratio",
    "make_params", "resample", "semicircle", "solve_length", "total_inverse_curvature",
]
