import math

import numpy as np
import pytest

from invcurv.critical import area_closed_form, build_critical_curve, f_closed_form, make_params
from invcurv.curvegeom import DiscreteCurve, enclosed_area, semicircle
from invcurv.errors import DegenerateCurvature, MultipleApexes, NotConvex, PreconditionError
from invcurv.steiner import (GraphPair, compare_functionals, corpus, curvature_bound_gap,
                             explicit_pair, graph_F, graph_area, graph_rule, is_convex_pair,
                             midpoint_convexity_gap, random_convex_pair, reconstitute,
                             sheared_semicircle, symmetrize)


def test_rule_integrates_square_root_singularity():
    y, w = graph_rule(2.0, 64)
    assert np.all(np.diff(y) > 0) and 0 < y[0] and y[-1] < 2
    assert w @ (1 / np.sqrt(2 - y)) == pytest.approx(2 * math.sqrt(2), rel=1e-12)
    assert w @ y**3 == pytest.approx(4.0, rel=1e-13)


def test_to_graph_pair_semicircle():
    from invcurv.steiner import to_graph_pair
    p = to_graph_pair(semicircle(1001))
    assert np.max(np.abs(p.g - np.sqrt(1 - p.y**2))) < 1e-6
    assert np.max(np.abs(p.f + np.sqrt(1 - p.y**2))) < 1e-6
    assert p.ybar == pytest.approx(1.0, abs=1e-12)


def test_to_graph_pair_critical_curve():
    from invcurv.steiner import to_graph_pair
    prm = make_params(1.0, 4.0)
    p = to_graph_pair(build_critical_curve(prm, 4097).curve)
    assert np.max(np.abs(p.f + p.g)) < 1e-8
    assert graph_area(p) == pytest.approx(area_closed_form(prm), rel=1e-9)
    assert graph_F(p) == pytest.approx(f_closed_form(prm), rel=1e-8)
    assert is_convex_pair(p)


def test_to_graph_pair_rejects():
    from invcurv.steiner import to_graph_pair
    s = np.linspace(0, math.pi, 801)
    r = 1 + 0.3 * np.sin(4 * s) ** 2
    wiggly = DiscreteCurve(s, np.column_stack([r * np.cos(s), r * np.sin(s)]), math.pi / 2, 1.0)
    with pytest.raises(NotConvex):
        to_graph_pair(wiggly)
    # a convex spiral that turns past the top twice
    t = np.linspace(0, 3 * math.pi, 1201)
    spiral = DiscreteCurve(t, np.column_stack([np.cos(t), np.sin(t) + 2]), 1.5 * math.pi, 1.0)
    with pytest.raises(MultipleApexes):
        to_graph_pair(spiral)


def test_symmetrize_fixed_point_and_recentre():
    sym = explicit_pair(1.0, 1.0)
    out = symmetrize(sym)
    assert np.array_equal(out.f, sym.f) and np.array_equal(out.g, sym.g)
    shifted = explicit_pair(1.0, 1.0)
    shifted = GraphPair(shifted.y, shifted.w, shifted.f + 0.4, shifted.df, shifted.ddf,
                        shifted.g + 0.4, shifted.dg, shifted.ddg, shifted.ybar)
    assert np.allclose(symmetrize(shifted).g, np.sqrt(1 - shifted.y**2), atol=1e-15)


def test_symmetrize_preserves_convexity():
    rng = np.random.default_rng(0)
    for _ in range(10):
        pair = random_convex_pair(rng)
        assert is_convex_pair(pair) and is_convex_pair(symmetrize(pair))


def test_sheared_semicircle():
    c = compare_functionals(sheared_semicircle(0.3))
    assert c.area_drift <= 1e-8
    assert c.A_before == pytest.approx(math.pi / 2, abs=1e-10)
    assert c.F_after == pytest.approx(math.pi, abs=1e-8)
    assert c.F_after < c.F_before


def test_symmetric_input_unchanged():
    c = compare_functionals(explicit_pair(1.2, 0.7, 0.0, 0.2, 0.2))
    assert c.F_after == c.F_before and c.A_after == c.A_before


def test_random_corpus_decreases():
    for pair in corpus("random", 30, seed=5):
        c = compare_functionals(pair)
        assert c.F_after < c.F_before and c.area_drift <= 1e-8


def test_quadrature_converges():
    vals = [graph_F(explicit_pair(1.0, 1.3, 0.4, 0.2, 0.1, m)) for m in (256, 512, 1024)]
    assert abs(vals[1] - vals[2]) < 1e-9 and abs(vals[0] - vals[2]) < 1e-9


def test_fubini_identity():
    for pair in [sheared_semicircle(0.3), explicit_pair(1.0, 1.5, -0.2, 0.3, 0.0)]:
        assert enclosed_area(reconstitute(pair)) == pytest.approx(graph_area(pair), rel=1e-5)


def test_midpoint_convexity_and_curvature_bound():
    rng = np.random.default_rng(1)
    for pair in [sheared_semicircle(0.5)] + [random_convex_pair(rng) for _ in range(10)]:
        gap = midpoint_convexity_gap(pair)
        scale = np.abs(midpoint_convexity_gap(pair)).max()
        assert gap.min() >= -1e-12 * max(1.0, scale)
        c = compare_functionals(pair)
        assert c.F_before - c.F_after == pytest.approx(2 * pair.w @ gap, rel=1e-9)
        assert curvature_bound_gap(pair) >= -1e-3


def test_degenerate_curvature_floor():
    pair = explicit_pair(1.0, 1.0)
    flat = GraphPair(pair.y, pair.w, pair.f, pair.df, np.zeros_like(pair.ddf), pair.g, pair.dg,
                     pair.ddg, pair.ybar)
    with pytest.raises(DegenerateCurvature):
        compare_functionals(flat)


def test_graph_pair_validation():
    pair = explicit_pair(1.0, 1.0)
    with pytest.raises(PreconditionError):
        GraphPair(pair.y, pair.w, pair.g, pair.df, pair.ddf, pair.f, pair.dg, pair.ddg, pair.ybar)
    with pytest.raises(PreconditionError):
        explicit_pair(1.0, 1.0, d1=-0.1)
    with pytest.raises(PreconditionError):
        corpus("nonsense", 3)


def test_corpus_kinds():
    assert len(corpus("sheared", 5)) == 5
    assert all(p.is_symmetric() for p in corpus("symmetric", 5))
    assert not any(p.is_symmetric() for p in corpus("random", 5))
    mixed = corpus("mixed", 8)
    assert sum(p.is_symmetric() for p in mixed) == 2
