"""Sampled planar curves in the upper half-plane.

A curve is stored on a parameter grid s in [0, 2L]. For arc-length curves
the parameter is the arc length; for varied curves (gamma + t X) it is the
arc length of the base curve, and quadratures carry the speed |c'| explicitly.

Conventions: the tangent is T = c'/|c'|, the normal is N = T^perp with
(xi, eta)^perp = (eta, -xi), and H = <c', c''^perp>/|c'|^3. A counterclockwise
convex arc therefore has H > 0 and an outward-pointing N.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import (DegenerateSpacing, FormMismatch, NonConvexCurve,
                     PreconditionError, TooFewSamples)

MIN_SAMPLES = 5


def perp(v):
    """(xi, eta) -> (eta, -xi), applied along the last axis."""
    v = np.asarray(v)
    return np.stack([v[..., 1], -v[..., 0]], axis=-1)


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteCurve:
    """Planar curve sampled on an increasing parameter grid.

    d1 and d2 optionally hold exact first and second derivatives with respect
    to s. source, when set, is an analytic evaluator with an
    ``evaluate(s) -> (pts, d1, d2)`` method; it lets resample re-evaluate
    exactly instead of interpolating.
    """
    s: np.ndarray
    pts: np.ndarray
    L_half: float
    x0: float
    d1: np.ndarray | None = None
    d2: np.ndarray | None = None
    source: object | None = field(default=None, repr=False)

    def __post_init__(self):
        s = _readonly(self.s)
        pts = _readonly(self.pts)
        if s.ndim != 1 or pts.shape != (s.size, 2):
            raise PreconditionError("pts must have shape (len(s), 2)")
        if s.size < MIN_SAMPLES:
            raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {s.size}")
        if np.any(np.diff(s) <= 0):
            raise DegenerateSpacing("parameter grid must be strictly increasing")
        span = 2 * self.L_half
        tol = 1e-9 * max(1.0, span)
        if abs(s[0]) > tol or abs(s[-1] - span) > tol:
            raise PreconditionError("parameter grid must cover [0, 2L]")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "pts", pts)
        for name in ("d1", "d2"):
            val = getattr(self, name)
            if val is not None:
                val = _readonly(val)
                if val.shape != pts.shape:
                    raise PreconditionError(f"{name} must match pts")
                object.__setattr__(self, name, val)

    @classmethod
    def from_source(cls, source, n, x0=None, L_half=None):
        """Sample an analytic arc-length evaluator on a uniform grid."""
        L_half = source.L_half if L_half is None else L_half
        x0 = source.x0 if x0 is None else x0
        s = np.linspace(0.0, 2 * L_half, n)
        pts, d1, d2 = source.evaluate(s)
        return cls(s, pts, L_half, x0, d1, d2, source)

    @property
    def n(self):
        return self.s.size

    @property
    def x(self):
        return self.pts[:, 0]

    @property
    def y(self):
        return self.pts[:, 1]

    def is_uniform(self, rtol=1e-9):
        h = np.diff(self.s)
        return bool(np.all(np.abs(h - h[0]) <= rtol * h[0]))

    def arc_defect(self):
        """max |chord / ds - 1|; small for arc-length sampled curves."""
        chords = np.linalg.norm(np.diff(self.pts, axis=0), axis=1)
        return float(np.max(np.abs(chords / np.diff(self.s) - 1.0)))

    def derivatives(self):
        """(c', c'') with respect to s: stored values, or finite differences."""
        if self.d1 is not None and self.d2 is not None:
            return self.d1, self.d2
        return fd_derivatives(self.s, self.pts)


def fd_derivatives(s, f):
    """Second-order first and second derivatives along axis 0.

    Centered in the interior and one-sided second-order at the ends.
    """
    s = np.asarray(s, float)
    f = np.asarray(f, float)
    d1 = np.gradient(f, s, axis=0, edge_order=2)
    h = np.diff(s)
    if np.all(np.abs(h - h[0]) <= 1e-9 * h[0]):
        h = h[0]
        d2 = np.empty_like(f)
        d2[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
        d2[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2
        d2[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    else:
        d2 = np.gradient(d1, s, axis=0, edge_order=2)
    return d1, d2


@dataclass(frozen=True, eq=False)
class CurveFrame:
    tangent: np.ndarray
    normal: np.ndarray
    curvature: np.ndarray
    speed: np.ndarray


@dataclass(frozen=True)
class AdmissibilityReport:
    is_admissible: bool
    min_H: float
    min_interior_y: float
    endpoint_errors: tuple
    messages: list


def frame_and_curvature(curve: DiscreteCurve) -> CurveFrame:
    d1, d2 = curve.derivatives()
    speed = np.linalg.norm(d1, axis=1)
    tangent = d1 / speed[:, None]
    normal = perp(tangent)
    cross = np.sum(d1 * perp(d2), axis=1)
    return CurveFrame(tangent, normal, cross / speed**3, speed)


def total_inverse_curvature(curve: DiscreteCurve, frame: CurveFrame | None = None) -> float:
    """F = integral of 1/H with respect to arc length (Simpson)."""
    frame = frame_and_curvature(curve) if frame is None else frame
    H = frame.curvature
    if np.any(H <= 0):
        raise NonConvexCurve(f"curvature not positive (min H = {H.min():.3e})")
    return float(simpson(frame.speed / H, x=curve.s))


def area_forms(curve: DiscreteCurve):
    """The two boundary-integral forms of the enclosed area.

    The closing segment on the x-axis contributes nothing to either.
    """
    d1, _ = curve.derivatives()
    x, y = curve.x, curve.y
    a_xdy = simpson(x * d1[:, 1], x=curve.s)
    a_sym = 0.5 * simpson(x * d1[:, 1] - d1[:, 0] * y, x=curve.s)
    return float(a_xdy), float(a_sym)


def area_tolerance(curve: DiscreteCurve) -> float:
    h = float(np.max(np.diff(curve.s)))
    scale = max(1.0, float(np.max(np.abs(curve.pts))) ** 2)
    return 10.0 * (h**2 + 1e-12) * scale


def enclosed_area(curve: DiscreteCurve) -> float:
    a1, a2 = area_forms(curve)
    tol = area_tolerance(curve)
    if abs(a1 - a2) > tol:
        raise FormMismatch(f"area forms disagree: {a1!r} vs {a2!r} (tol {tol:.2e})")
    return 0.5 * (a1 + a2)


def check_admissible(curve: DiscreteCurve, frame: CurveFrame | None = None,
                     tol: float = 1e-8) -> AdmissibilityReport:
    frame = frame_and_curvature(curve) if frame is None else frame
    min_H = float(np.min(frame.curvature))
    min_y = float(np.min(curve.y[1:-1]))
    e0 = float(np.hypot(curve.x[0] - curve.x0, curve.y[0]))
    e1 = float(np.hypot(curve.x[-1] + curve.x0, curve.y[-1]))
    msgs = []
    if not min_H > 0:
        msgs.append(f"curvature not positive: min H = {min_H:.3e}")
    if not min_y > 0:
        msgs.append(f"interior leaves the open upper half-plane: min y = {min_y:.3e}")
    if e0 >= tol or e1 >= tol:
        msgs.append(f"endpoints off (x0, 0) / (-x0, 0): errors {e0:.3e}, {e1:.3e}")
    return AdmissibilityReport(not msgs, min_H, min_y, (e0, e1), msgs)


def _gauss_arclength(spline, a, b, nodes=5):
    """Integral of |spline'| over each [a_i, b_i]."""
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    a = np.asarray(a)[:, None]
    b = np.asarray(b)[:, None]
    t = 0.5 * (b - a) * xg + 0.5 * (b + a)
    sp = np.linalg.norm(spline(t, 1), axis=-1)
    return 0.5 * (b - a)[:, 0] * (sp @ wg)


def resample(curve: DiscreteCurve, n: int) -> DiscreteCurve:
    """Uniform arc-length resampling with n samples.

    Analytic curves are re-evaluated. Otherwise a cubic spline in s is
    reparametrized by its own arc length.
    """
    if n < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {n}")
    if curve.source is not None:
        return DiscreteCurve.from_source(curve.source, n, curve.x0, curve.L_half)
    if n == curve.n and curve.is_uniform() and curve.arc_defect() < 1e-6:
        return curve

    s = curve.s
    if curve.d1 is not None:
        spline = CubicHermiteSpline(s, curve.pts, curve.d1, axis=0)
    else:
        spline = CubicSpline(s, curve.pts, axis=0)
    seg = _gauss_arclength(spline, s[:-1], s[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    target = np.linspace(0.0, total, n)

    u = np.interp(target, cum, s)
    for _ in range(4):
        idx = np.clip(np.searchsorted(s, u, side="right") - 1, 0, s.size - 2)
        ell = cum[idx] + _gauss_arclength(spline, s[idx], u)
        u = np.clip(u - (ell - target) / np.linalg.norm(spline(u, 1), axis=1), s[0], s[-1])
    u[0], u[-1] = s[0], s[-1]

    p1 = spline(u, 1)
    p2 = spline(u, 2)
    sp2 = np.sum(p1 * p1, axis=1)[:, None]
    d1 = p1 / np.sqrt(sp2)
    d2 = (p2 - np.sum(p1 * p2, axis=1)[:, None] / sp2 * p1) / sp2
    return DiscreteCurve(target, spline(u), total / 2, curve.x0, d1, d2)


@dataclass(frozen=True)
class CircleArc:
    """Counterclockwise circle arc of radius R centred at c, starting at angle a0."""
    R: float
    angle: float
    a0: float = 0.0
    c: tuple = (0.0, 0.0)

    @property
    def L_half(self):
        return 0.5 * self.R * self.angle

    @property
    def x0(self):
        return self.R * np.cos(self.a0) + self.c[0]

    def H(self, s):
        return np.full(np.shape(s), 1.0 / self.R)

    def dH(self, s):
        return np.zeros(np.shape(s))

    def evaluate(self, s):
        a = self.a0 + np.asarray(s, float) / self.R
        ca, sa = np.cos(a), np.sin(a)
        pts = np.column_stack([self.c[0] + self.R * ca, self.c[1] + self.R * sa])
        d1 = np.column_stack([-sa, ca])
        d2 = np.column_stack([-ca, -sa]) / self.R
        return pts, d1, d2


def semicircle(n: int, radius: float = 1.0) -> DiscreteCurve:
    """Upper semicircle from (r, 0) to (-r, 0), arc-length sampled."""
    return DiscreteCurve.from_source(CircleArc(radius, np.pi), n)
