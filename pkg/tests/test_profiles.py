import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import Polynomial
from scipy.integrate import quad

from invcurv.profiles import (Bump, Poly, SineSeries, Zero, c2_norm, clamp, hermite_clamp_pair,
                              w22_norm_sq)

coeffs = st.lists(st.floats(-2, 2), min_size=1, max_size=8)


def _fd_check(prof, s, k=3, h=1e-5):
    v = prof(s, k)
    for j in range(k):
        fd = (prof(s + h, j)[j] - prof(s - h, j)[j]) / (2 * h)
        assert np.allclose(v[j + 1], fd, rtol=1e-5, atol=1e-6 * (1 + np.max(np.abs(v[j + 1]))))


@settings(max_examples=25, deadline=None)
@given(coeffs, st.floats(0.5, 10))
def test_sine_series_derivatives_and_integral(c, length):
    p = SineSeries(c, length)
    s = np.linspace(0.1, length - 0.1, 17)
    _fd_check(p, s)
    assert p.integral(0, length) == pytest.approx(quad(lambda x: p(np.array([x]))[0, 0], 0, length)[0],
                                                  abs=1e-9)


def test_bump_support_and_smoothness():
    b = Bump(1.0, 3.0, m=6)
    s = np.array([0.5, 1.0, 3.0, 3.5])
    assert np.all(b(s, 4) == 0)
    assert b(np.array([2.0]))[0, 0] == pytest.approx(1.0)
    _fd_check(b, np.linspace(1.1, 2.9, 9))
    assert b.integral(0, 4) == pytest.approx(quad(lambda x: b(np.array([x]))[0, 0], 1, 3)[0], rel=1e-12)
    assert b.integral(3.5, 4) == 0.0


def test_algebra():
    a = SineSeries([1.0], 2.0)
    b = Poly(Polynomial([0.0, 1.0]))
    s = np.linspace(0, 2, 9)
    assert np.allclose((a + b)(s, 2), a(s, 2) + b(s, 2))
    assert np.allclose((a - b)(s, 2), a(s, 2) - b(s, 2))
    assert np.allclose((3 * a)(s, 1), 3 * a(s, 1))
    assert np.allclose((-a)(s), -a(s))
    assert (a + b).integral(0, 2) == pytest.approx(a.integral(0, 2) + 2.0)
    assert np.all(Zero()(s, 3) == 0) and Zero().integral(0, 1) == 0


@settings(max_examples=25, deadline=None)
@given(coeffs, st.floats(0.5, 10))
def test_clamp_zeroes_end_slopes(c, length):
    p = clamp(SineSeries(c, length), length)
    v = p(np.array([0.0, length]), 1)
    assert np.allclose(v, 0.0, atol=1e-12 * (1 + sum(abs(x) for x in c)) * max(1, 1 / length))


def test_hermite_pair():
    h0, h1 = hermite_clamp_pair(3.0)
    v0 = h0(np.array([0.0, 3.0]), 1)
    v1 = h1(np.array([0.0, 3.0]), 1)
    assert np.allclose(v0, [[0, 0], [1, 0]])
    assert np.allclose(v1, [[0, 0], [0, 1]])


def test_norms():
    s = np.linspace(0, np.pi, 2001)
    p = SineSeries([1.0], np.pi)
    assert c2_norm(p, s) == pytest.approx(3.0, rel=1e-6)
    assert w22_norm_sq(p, s) == pytest.approx(1.5 * np.pi, rel=1e-9)
