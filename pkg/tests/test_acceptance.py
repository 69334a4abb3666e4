"""The eight end-to-end acceptance criteria, each printed as one PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from invcurv.critical import (area_closed_form, area_threshold, build_critical_curve,
                              el_residual, f_closed_form, hk_counterexample_ratio,
                              invariant_report, make_params, solve_length)
from invcurv.curvegeom import enclosed_area, total_inverse_curvature
from invcurv.errors import ThresholdViolation
from invcurv.experiments import perturbation_study, steiner_study
from invcurv.stability import (ABOVE, BELOW, CRITICAL, mu0_threshold, ode_residual,
                               params_from_ratio, particular_solution, rayleigh_min_discrete,
                               scan_mu_w1, solution_basis)
from invcurv.variations import (VariationField, check_second_variation_F,
                                check_second_variation_G, check_second_variation_area,
                                first_variation_F, first_variation_area, random_field,
                                random_w1_profile, second_variation_F, second_variation_G,
                                second_variation_area)

pytestmark = pytest.mark.acceptance

# L / x0 from just above the threshold to 10^4, with varied scales
PAIRS = [(1.0, 3.5), (1.0, 4.0), (2.0, 9.0), (0.5, 3.0), (1.0, 10.0),
         (3.0, 60.0), (1.0, 100.0), (0.1, 50.0), (1.0, 1000.0), (1.0, 1e4)]


def test_1_euler_lagrange_exactness(criterion):
    t0 = time.perf_counter()
    worst_el = worst_bc = 0.0
    for x0, L in PAIRS:
        cc = build_critical_curve(make_params(x0, L))
        rep = invariant_report(cc)
        worst_el = max(worst_el, el_residual(cc))
        worst_bc = max(worst_bc, *(rep[k] for k in ("x_start_error", "x_end_error", "y_start",
                                                    "y_end", "ydot_start", "ydot_end")))
    dt = time.perf_counter() - t0
    ok = worst_el <= 1e-10 and worst_bc <= 1e-10 and dt < 1.0
    criterion(1, "Euler-Lagrange exactness", ok,
              f"max EL residual {worst_el:.1e}, max boundary error {worst_bc:.1e}, {dt:.2f} s")
    assert ok


def _quadrature_errors(p, n):
    c = build_critical_curve(p, n).curve
    return (abs(area_closed_form(p) - enclosed_area(c)),
            abs(f_closed_form(p) - total_inverse_curvature(c)))


def _order(p):
    """Observed order from the finest consecutive grids whose error is above roundoff."""
    F = f_closed_form(p)
    errs = {}
    for k in range(6, 13):
        c = build_critical_curve(p, 2**k + 1).curve
        errs[k] = abs(total_inverse_curvature(c) - F)
    floor = 1e-11 * max(1.0, F)
    ks = [k for k in sorted(errs) if errs[k] > floor and errs.get(k - 1, 0) > floor]
    k = ks[-1]
    return math.log2(errs[k - 1] / errs[k])


def test_2_closed_form_vs_quadrature(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for x0, L in PAIRS:
        worst = max(worst, *_quadrature_errors(make_params(x0, L), 2**14))
    order = min(_order(make_params(x0, L)) for x0, L in [(1.0, 3.5), (1.0, 4.0), (1.0, 10.0)])
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and order >= 3.7 and dt < 10.0
    criterion(2, "closed form vs quadrature", ok,
              f"max abs error {worst:.1e}, min order {order:.2f}, {dt:.2f} s")
    assert ok


def test_3_bijection_round_trip(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for x0, L in PAIRS:
        L2 = solve_length(x0, area_closed_form(make_params(x0, L)))
        worst = max(worst, abs(L2 - L) / L)
    rejected = 0
    for x0 in (0.5, 1.0, 2.0):
        try:
            solve_length(x0, area_threshold(x0))
        except ThresholdViolation:
            rejected += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and rejected == 3 and dt < 1.0
    criterion(3, "area-length bijection round trip", ok,
              f"max rel error {worst:.1e}, threshold rejected {rejected}/3, {dt:.2f} s")
    assert ok


def test_4_variation_formulas(criterion):
    t0 = time.perf_counter()
    p = make_params(1.0, 4.0)
    cc = build_critical_curve(p, 4097)
    rng = np.random.default_rng(2024)
    first = fd_err = ident = 0.0
    for _ in range(50):
        fld = random_field(p.L, rng)
        # F - lambda A is stationary along every clamped field
        g1 = first_variation_F(cc, fld) - p.lam * first_variation_area(cc, fld)
        first = max(first, abs(g1))
        for rep in (check_second_variation_F(p, fld), check_second_variation_area(cc, fld),
                    check_second_variation_G(p, fld)):
            fd_err = max(fd_err, rep.rel_err)
        g2, _ = second_variation_G(p, fld)
        ident = max(ident, abs(second_variation_F(p, fld) - p.lam * second_variation_area(cc, fld) - g2))
    # F alone is stationary along area-preserving (zero-mean) clamped fields
    for _ in range(10):
        phi = random_w1_profile(p.L, rng, mean_zero=True)
        first = max(first, abs(first_variation_F(cc, VariationField(phi))))
    dt = time.perf_counter() - t0
    ok = first <= 1e-8 and fd_err <= 1e-3 and ident <= 1e-8 and dt < 30.0
    criterion(4, "variation formulas", ok,
              f"first variation {first:.1e}, FD rel error {fd_err:.1e}, identity {ident:.1e}, {dt:.1f} s")
    assert ok


def test_5_stability_sweep(criterion):
    t0 = time.perf_counter()
    ratios = np.round(np.arange(1, 25) * 0.01, 2)
    mu_min = math.inf
    agree = 0.0
    below_ok = True
    for r in ratios:
        p = params_from_ratio(float(r))
        scan = scan_mu_w1(p)
        mu_min = min(mu_min, scan.root)
        below_ok &= scan.below_min_normalized > 0 and scan.critical_det < 0
        agree = max(agree, abs(rayleigh_min_discrete(p, 2048) - scan.root) / scan.root)

    p = make_params(1.0, 4.0)
    mu0 = mu0_threshold(p)
    residuals = []
    for mu in (0.5 * mu0, mu0, 1.5):
        for f in solution_basis(mu, p).functions:
            residuals.append(ode_residual(f, mu, 0.0, p))
    residuals.append(ode_residual(particular_solution(1.2, 0.7, p), 1.2, 0.7, p))
    residuals.append(ode_residual(particular_solution(1.0, 0.7, p), 1.0, 0.7, p))
    worst = max(residuals)
    dt = time.perf_counter() - t0
    ok = mu_min > 1 and agree <= 0.01 and below_ok and worst <= 1e-8 and dt < 120.0
    criterion(5, "stability sweep", ok,
              f"min mu_W1 {mu_min:.6f}, Rayleigh agreement {agree:.1e}, no root <= mu0: {below_ok}, "
              f"{len(residuals)} closed-form residuals <= {worst:.1e}, {dt:.1f} s")
    assert ok


def test_6_local_minimality(criterion):
    t0 = time.perf_counter()
    p = make_params(1.0, 4.0)
    plain = perturbation_study(p, count=200, eps=1e-2, seed=7)
    area = perturbation_study(p, count=50, eps=1e-2, seed=11, coercivity=plain.coercivity,
                              area_preserving=True)
    ratio = min(r.delta / r.bound for r in plain.rows)
    dt = time.perf_counter() - t0
    ok = plain.all_positive and plain.all_bounded and area.all_positive and dt < 60.0
    criterion(6, "local minimality", ok,
              f"min delta {min(r.delta for r in plain.rows):.2e}, min delta/bound {ratio:.2f}, "
              f"area-preserving min delta F {min(r.delta for r in area.rows):.2e}, {dt:.1f} s")
    assert ok


def test_7_steiner_corpus(criterion):
    t0 = time.perf_counter()
    _, comps = steiner_study("random", 100, seed=3)
    drift = max(c.area_drift for c in comps)
    decreases = all(c.F_after < c.F_before for c in comps)
    _, sym = steiner_study("symmetric", 20, seed=4)
    fixed = all(c.F_after == c.F_before and c.A_after == c.A_before for c in sym)
    dt = time.perf_counter() - t0
    ok = drift <= 1e-8 and decreases and fixed and dt < 30.0
    criterion(7, "Steiner corpus", ok,
              f"max area drift {drift:.1e}, all F decrease: {decreases}, symmetric fixed: {fixed}, {dt:.1f} s")
    assert ok


def test_8_counterexample_ratio(criterion):
    t0 = time.perf_counter()
    grid = np.geomspace(3.0001, 1e6, 20)
    vals = np.array([hk_counterexample_ratio(make_params(1.0, r)) for r in grid])
    dt = time.perf_counter() - t0
    ok = bool(np.all(vals > 0.5) and np.all(np.diff(vals) < 0) and vals[-1] - 0.5 < 1e-5
              and dt < 1.0)
    criterion(8, "counterexample ratio", ok,
              f"min {vals.min():.8f}, decreasing: {bool(np.all(np.diff(vals) < 0))}, "
              f"gap at 1e6 {vals[-1] - 0.5:.1e}, {dt:.3f} s")
    assert ok
