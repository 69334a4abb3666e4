"""
First and second variation
==========================

Along a clamped normal variation the first variation of G = F - lambda A
vanishes at the critical curve. The second variation has a closed form whose
value is checked against a Richardson-extrapolated second difference.
"""
import numpy as np

from invcurv.critical import build_critical_curve, make_params
from invcurv.variations import (VariationField, check_first_variation, check_second_variation_G,
                                first_variation_area, first_variation_F, random_w1_profile,
                                second_variation_G)

params = make_params(1.0, 4.0)
curve = build_critical_curve(params, 4097).curve
rng = np.random.default_rng(1)

for k in range(3):
    fld = VariationField(random_w1_profile(params.L, rng))
    dF = first_variation_F(curve, fld)
    dA = first_variation_area(curve, fld)
    fd = check_first_variation(curve, fld)
    full, core = second_variation_G(params, fld)
    chk = check_second_variation_G(params, fld)
    print(f"field {k}: dG = {dF - params.lam * dA:+.1e}  (dF vs FD rel {fd.rel_err:.1e})"
          f"  d2G = {full:.8f}  FD rel {chk.rel_err:.1e}")
