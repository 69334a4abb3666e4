"""
Prescribing the area
====================

L -> A(x0, L) is increasing on (3 x0, inf), so each area above the threshold
A(x0, 3 x0) picks out exactly one critical curve. Below the threshold there is
no such curve and the solver refuses.
"""
import numpy as np

from invcurv.critical import area_closed_form, area_threshold, make_params, solve_length
from invcurv.errors import ThresholdViolation

x0 = 1.0
print(f"area threshold for x0 = {x0}: {area_threshold(x0):.10f}")

Ls = np.geomspace(3.001, 1e4, 8)
areas = [area_closed_form(make_params(x0, L)) for L in Ls]
print("increasing:", bool(np.all(np.diff(areas) > 0)))

# invert the map and come back
for A0 in (5.0, 10.0, 100.0, 1e4):
    L = solve_length(x0, A0)
    back = area_closed_form(make_params(x0, L))
    print(f"A0 = {A0:8g}  ->  L = {L:.12f}  ->  A = {back:.12g}")

try:
    solve_length(x0, 4.0)
except ThresholdViolation as exc:
    print("rejected:", exc)
