"""Steiner symmetrization of convex regions over the x-axis.

A convex admissible region is {f(y) < x < g(y), 0 < y < ybar} with f convex
and g concave. Symmetrization replaces (f, g) by (-h, h), h = (g - f)/2: the
slice lengths, hence the area, are unchanged, and in graph form

    F = int (1 + f'^2)^2 / f'' dy + int (1 + g'^2)^2 / (-g'') dy

can only decrease, because Phi(z, w) = (1 + z^2)^2 / w is strictly convex
for w > 0.

Graph derivatives blow up at the apex (and at y = 0 when the curve leaves
the axis horizontally), and the density of F behaves like (ybar - y)^(-1/2)
there. All integrals substitute y = ybar (1 - cos t)/2 and apply
Gauss-Legendre in t: in t the integrands are smooth, the endpoints are
never evaluated, and before/after comparisons share the same nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .curvegeom import CurveFrame, DiscreteCurve, frame_and_curvature
from .errors import DegenerateCurvature, MultipleApexes, NotConvex, PreconditionError

DEFAULT_NODES = 2048
CURVATURE_FLOOR = 1e-10


@lru_cache(maxsize=8)
def _legendre(m):
    return np.polynomial.legendre.leggauss(m)


def graph_rule(ybar: float, m: int = DEFAULT_NODES):
    """Nodes (increasing, inside (0, ybar)) and weights for integrals in y.

    Gauss-Legendre in t on (0, pi) with y = ybar (1 - cos t)/2, so the
    weights carry the factor dy/dt = ybar sin(t)/2.
    """
    if m < 4:
        raise PreconditionError("need at least 4 nodes")
    x, w = _legendre(m)
    t = 0.5 * math.pi * (x + 1)
    return 0.5 * ybar * (1 - np.cos(t)), 0.25 * math.pi * ybar * np.sin(t) * w


@dataclass(frozen=True, eq=False)
class GraphPair:
    """Left boundary x = f(y) and right boundary x = g(y) on a quadrature grid.

    df, ddf, dg, ddg are derivatives with respect to y; w are the matching
    quadrature weights on (0, ybar).
    """
    y: np.ndarray
    w: np.ndarray
    f: np.ndarray
    df: np.ndarray
    ddf: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    ddg: np.ndarray
    ybar: float

    def __post_init__(self):
        arrays = (self.y, self.w, self.f, self.df, self.ddf, self.g, self.dg, self.ddg)
        if len({np.shape(a) for a in arrays}) != 1 or np.ndim(self.y) != 1:
            raise PreconditionError("graph arrays must share one 1-d shape")
        if np.any(np.diff(self.y) <= 0) or self.y[0] <= 0 or self.y[-1] >= self.ybar:
            raise PreconditionError("y grid must be increasing inside (0, ybar)")
        if np.any(self.f >= self.g):
            raise PreconditionError("need f < g on the grid")

    @property
    def h(self):
        return 0.5 * (self.g - self.f)

    def is_symmetric(self, tol=0.0):
        return bool(np.all(np.abs(self.f + self.g) <= tol)
                    and np.all(np.abs(self.df + self.dg) <= tol)
                    and np.all(np.abs(self.ddf + self.ddg) <= tol))


def divided_second_differences(y, x):
    """Second divided differences, 2 [y0, y1, y2] x, on a non-uniform grid."""
    d1 = np.diff(x) / np.diff(y)
    return 2 * np.diff(d1) / (y[2:] - y[:-2])


def _thinned(y, gap):
    """Indices of a subgrid whose consecutive spacing is at least gap."""
    keep = [0]
    for i in range(1, y.size):
        if y[i] - y[keep[-1]] >= gap:
            keep.append(i)
    return np.array(keep)


def is_convex_pair(pair: GraphPair, rel_gap: float = 1e-4) -> bool:
    """f convex and g concave by the sign of their discrete second differences.

    The differences are taken on a subgrid with spacing at least rel_gap * ybar:
    the quadrature nodes cluster so tightly at the ends that second
    differences there are rounding noise.
    """
    i = _thinned(pair.y, rel_gap * pair.ybar)
    y = pair.y[i]
    return bool(np.all(divided_second_differences(y, pair.f[i]) > 0)
                and np.all(divided_second_differences(y, pair.g[i]) < 0))


# ---------------------------------------------------------------- curve -> graphs

def _evaluator(curve: DiscreteCurve):
    if curve.source is not None:
        return curve.source.evaluate
    d1, _ = curve.derivatives()
    spline = CubicHermiteSpline(curve.s, curve.pts, d1, axis=0)
    return lambda s: (spline(s), spline(s, 1), spline(s, 2))


def _invert(ev, target, lo, hi, iters=60):
    """Solve y(s) = target for s in [lo, hi] (vectorized, y monotone on each bracket).

    Newton steps that leave the bracket are replaced by bisection.
    """
    lo = lo.copy()
    hi = hi.copy()
    y_lo = ev(lo)[0][:, 1]
    rising = ev(hi)[0][:, 1] > y_lo
    s = 0.5 * (lo + hi)
    for _ in range(iters):
        pts, d1, _ = ev(s)
        r = pts[:, 1] - target
        below = (r < 0) == rising
        lo = np.where(below, s, lo)
        hi = np.where(below, hi, s)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = s - r / d1[:, 1]
        ok = np.isfinite(step) & (step > lo) & (step < hi)
        s_new = np.where(ok, step, 0.5 * (lo + hi))
        if np.all(np.abs(s_new - s) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(s))):
            s = s_new
            break
        s = s_new
    return s


def _graph_derivatives(ev, s):
    pts, d1, d2 = ev(s)
    xd, yd = d1[:, 0], d1[:, 1]
    return pts[:, 0], xd / yd, (d2[:, 0] * yd - xd * d2[:, 1]) / yd**3


def to_graph_pair(curve: DiscreteCurve, frame: CurveFrame | None = None,
                  m: int = DEFAULT_NODES) -> GraphPair:
    """Split a convex curve at its apex and write both branches as graphs over y."""
    frame = frame_and_curvature(curve) if frame is None else frame
    if np.any(frame.curvature <= 0):
        raise NotConvex(f"curvature not positive (min H = {frame.curvature.min():.3e})")
    ydot = frame.tangent[1:-1, 1]
    sgn = np.sign(ydot[ydot != 0])
    changes = np.count_nonzero(sgn[1:] != sgn[:-1])
    if changes != 1 or sgn[0] < 0:
        raise MultipleApexes(f"expected one rise and one fall of y, found {changes} sign changes")
    ev = _evaluator(curve)
    k = 1 + int(np.nonzero(sgn[1:] != sgn[:-1])[0][0])
    idx = np.nonzero(ydot != 0)[0] + 1
    a, b = curve.s[idx[k - 1]], curve.s[idx[k]]
    s_apex = brentq(lambda t: float(ev(np.array([t]))[1][0, 1]), a, b, xtol=1e-15)
    ybar = float(ev(np.array([s_apex]))[0][0, 1])

    y, w = graph_rule(ybar, m)
    ones = np.ones_like(y)
    s_right = _invert(ev, y, curve.s[0] * ones, s_apex * ones)
    s_left = _invert(ev, y, s_apex * ones, curve.s[-1] * ones)
    g, dg, ddg = _graph_derivatives(ev, s_right)
    f, df, ddf = _graph_derivatives(ev, s_left)
    return GraphPair(y, w, f, df, ddf, g, dg, ddg, ybar)


def symmetrize(pair: GraphPair) -> GraphPair:
    """(f, g) -> (-h, h) with h = (g - f)/2 on the same grid."""
    h, dh, ddh = 0.5 * (pair.g - pair.f), 0.5 * (pair.dg - pair.df), 0.5 * (pair.ddg - pair.ddf)
    return GraphPair(pair.y, pair.w, -h, -dh, -ddh, h, dh, ddh, pair.ybar)


# ---------------------------------------------------------------- functionals

def phi(z, w):
    """(1 + z^2)^2 / w, the graph-form density of 1/H ds."""
    return (1 + z**2) ** 2 / w


@dataclass(frozen=True)
class SteinerComparison:
    A_before: float
    A_after: float
    F_before: float
    F_after: float
    window: tuple

    @property
    def area_drift(self):
        return abs(self.A_after - self.A_before) / abs(self.A_before)

    @property
    def F_decrease(self):
        return self.F_before - self.F_after

    def to_dict(self):
        return {"A_before": self.A_before, "A_after": self.A_after,
                "F_before": self.F_before, "F_after": self.F_after,
                "area_drift": self.area_drift, "F_decrease": self.F_decrease,
                "window": list(self.window)}


def _check_floor(pair, floor):
    worst = min(float(pair.ddf.min()), float(-pair.ddg.max()))
    if worst < floor:
        raise DegenerateCurvature(f"graph second derivative {worst:.3e} below floor {floor:.1e}")


def graph_area(pair: GraphPair) -> float:
    return float(pair.w @ (pair.g - pair.f))


def graph_F(pair: GraphPair, floor: float = CURVATURE_FLOOR) -> float:
    _check_floor(pair, floor)
    return float(pair.w @ (phi(pair.df, pair.ddf) + phi(pair.dg, -pair.ddg)))


def compare_functionals(pair: GraphPair, floor: float = CURVATURE_FLOOR) -> SteinerComparison:
    _check_floor(pair, floor)
    F_before = graph_F(pair, floor)
    # after: 2 Phi(h', -h'') = 4 (1 + ((f' - g')/2)^2)^2 / (f'' - g'')
    dd = pair.ddf - pair.ddg
    F_after = float(pair.w @ (4 * (1 + (0.5 * (pair.df - pair.dg)) ** 2) ** 2 / dd))
    A_before = graph_area(pair)
    A_after = float(pair.w @ (2 * symmetrize(pair).h))
    return SteinerComparison(A_before, A_after, F_before, F_after,
                             (float(pair.y[0]), float(pair.y[-1])))


def midpoint_convexity_gap(pair: GraphPair) -> np.ndarray:
    """1/2 Phi(f', f'') + 1/2 Phi(-g', -g'') - Phi((f' - g')/2, (f'' - g'')/2), pointwise.

    Nonnegative by convexity of Phi; the integral of twice this is F_before - F_after.
    """
    mid = phi(0.5 * (pair.df - pair.dg), 0.5 * (pair.ddf - pair.ddg))
    return 0.5 * phi(pair.df, pair.ddf) + 0.5 * phi(-pair.dg, -pair.ddg) - mid


def graph_curvatures(pair: GraphPair):
    """Curvature of the left and right boundaries at each height."""
    Hf = pair.ddf / (1 + pair.df**2) ** 1.5
    Hg = -pair.ddg / (1 + pair.dg**2) ** 1.5
    return Hf, Hg


def curvature_bound_gap(pair: GraphPair) -> float:
    """min over heights of (H_sym - min(H_f, H_g)) / min(H_f, H_g)."""
    Hf, Hg = graph_curvatures(pair)
    Hs, _ = graph_curvatures(symmetrize(pair))
    lower = np.minimum(Hf, Hg)
    return float(np.min((Hs - lower) / lower))


def reconstitute(pair: GraphPair, x0: float | None = None) -> DiscreteCurve:
    """Closed-up boundary curve (right branch up, left branch down), chord-parametrized."""
    x0 = 0.5 * (pair.g[0] - pair.f[0]) if x0 is None else x0
    apex = 0.5 * (pair.f[-1] + pair.g[-1])
    pts = np.concatenate([[[x0, 0.0]], np.column_stack([pair.g, pair.y]), [[apex, pair.ybar]],
                          np.column_stack([pair.f, pair.y])[::-1], [[-x0, 0.0]]])
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    return DiscreteCurve(s, pts, s[-1] / 2, x0)


# ---------------------------------------------------------------- test corpora

def explicit_pair(a, ybar, c=0.0, d1=0.0, d2=0.0, m: int = DEFAULT_NODES) -> GraphPair:
    """f = -a S + c y + d1 (y^2 - ybar y)/ybar, g = a S + c y - d2 (y^2 - ybar y)/ybar,
    with S = sqrt(1 - (y/ybar)^2).

    A half-ellipse sheared by c and bulged by d1, d2 >= 0; convex for a > 0.
    Symmetric exactly when c = 0 and d1 = d2.
    """
    if not (a > 0 and ybar > 0 and d1 >= 0 and d2 >= 0):
        raise PreconditionError("need a, ybar > 0 and d1, d2 >= 0")
    y, w = graph_rule(ybar, m)
    u = y / ybar
    S = np.sqrt(1 - u**2)
    q, dq = (y**2 - ybar * y) / ybar, (2 * y - ybar) / ybar
    dS, ddS = -u / (ybar * S), -1 / (ybar**2 * S**3)
    f = -a * S + c * y + d1 * q
    g = a * S + c * y - d2 * q
    return GraphPair(y, w, f, -a * dS + c + d1 * dq, -a * ddS + 2 * d1 / ybar,
                     g, a * dS + c - d2 * dq, a * ddS - 2 * d2 / ybar, ybar)


def sheared_semicircle(shear: float = 0.3, m: int = DEFAULT_NODES) -> GraphPair:
    return explicit_pair(1.0, 1.0, c=shear, m=m)


def random_convex_pair(rng: np.random.Generator, m: int = DEFAULT_NODES) -> GraphPair:
    """An asymmetric pair: shear at least 0.05 in magnitude or unequal bulges."""
    a = rng.uniform(0.5, 2.0)
    ybar = a * rng.uniform(0.5, 2.0)
    c = rng.choice([-1, 1]) * rng.uniform(0.05, 0.6)
    d1, d2 = a * rng.uniform(0.0, 0.5, size=2)
    return explicit_pair(a, ybar, c, d1, d2, m)


def symmetric_pair(rng: np.random.Generator, m: int = DEFAULT_NODES) -> GraphPair:
    a = rng.uniform(0.5, 2.0)
    d = a * rng.uniform(0.0, 0.5)
    return explicit_pair(a, a * rng.uniform(0.5, 2.0), 0.0, d, d, m)


def corpus(kind: str, count: int, seed: int = 0, m: int = DEFAULT_NODES) -> list:
    """'sheared' (shears spread over [-0.6, 0.6] minus 0), 'symmetric', 'random', or 'mixed'."""
    rng = np.random.default_rng(seed)
    if kind == "sheared":
        shears = np.linspace(0.05, 0.6, count) * np.where(np.arange(count) % 2, -1, 1)
        return [sheared_semicircle(float(c), m) for c in shears]
    if kind == "symmetric":
        return [symmetric_pair(rng, m) for _ in range(count)]
    if kind == "random":
        return [random_convex_pair(rng, m) for _ in range(count)]
    if kind == "mixed":
        return [random_convex_pair(rng, m) if i % 4 else symmetric_pair(rng, m)
                for i in range(count)]
    raise PreconditionError(f"unknown corpus kind {kind!r}")
