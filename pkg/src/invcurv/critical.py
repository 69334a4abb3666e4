"""Closed-form equilibrium curves of F - lambda A with endpoints (+-x0, 0).

For 3 x0 < L the equilibrium of length 2L is

    sigma = pi sqrt(x0 / (L + x0)),  kappa = L / sin(sigma),  lambda = 2L / (L + x0),
    theta(s) = pi (1 + arcsin((s - L)/kappa) / sigma),
    H(s) = pi / (sigma sqrt(kappa^2 - (s - L)^2)),

so that H^-2 is a downward parabola in s and 2 + (H^-2)'' = lambda.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .curvegeom import DiscreteCurve, fd_derivatives, frame_and_curvature
from .errors import NoBracket, PreconditionError, ThresholdViolation

L_CAP_FACTOR = 1e9


@dataclass(frozen=True)
class CriticalParams:
    x0: float
    L: float
    sigma: float
    kappa: float
    lam: float

    @property
    def rho(self):
        """x0 / (L + x0), the only shape parameter (sigma = pi sqrt(rho))."""
        return self.x0 / (self.L + self.x0)


def make_params(x0: float, L: float) -> CriticalParams:
    x0 = float(x0)
    L = float(L)
    if not x0 > 0:
        raise PreconditionError(f"x0 must be positive, got {x0}")
    if not L > 3 * x0:
        raise ThresholdViolation(f"need L > 3 x0 (got L = {L}, x0 = {x0})")
    sigma = math.pi * math.sqrt(x0 / (L + x0))
    return CriticalParams(x0, L, sigma, L / math.sin(sigma), 2 * L / (L + x0))


class CriticalCurve:
    """Analytic evaluators for gamma(x0, L), parametrized by arc length on [0, 2L]."""

    def __init__(self, params: CriticalParams, n: int = 4096):
        self.params = params
        self.n = n

    @property
    def L_half(self):
        return self.params.L

    @property
    def x0(self):
        return self.params.x0

    def _v(self, s):
        return np.asarray(s, float) - self.params.L

    def _asin(self, s):
        p = self.params
        s = np.asarray(s, float)
        a = np.arcsin(np.clip(self._v(s) / p.kappa, -1.0, 1.0))
        # exact endpoint values so theta(0) = 0 and theta(2L) = 2 pi
        a = np.where(s == 0.0, -p.sigma, a)
        return np.where(s == 2 * p.L, p.sigma, a)

    def radicand(self, s):
        return self.params.kappa**2 - self._v(s) ** 2

    def theta(self, s):
        return math.pi * (1.0 + self._asin(s) / self.params.sigma)

    def H(self, s):
        return math.pi / (self.params.sigma * np.sqrt(self.radicand(s)))

    def dH(self, s):
        return self.H(s) * self._v(s) / self.radicand(s)

    def ddH(self, s):
        R = self.radicand(s)
        v = self._v(s)
        return self.H(s) * (1.0 / R + 3 * v**2 / R**2)

    def inv_H2(self, s):
        """H^-2 = rho (kappa^2 - (s - L)^2)."""
        return self.params.rho * self.radicand(s)

    def x(self, s):
        p = self.params
        a = self._asin(s)
        sg = p.sigma
        return -0.5 * p.kappa * (sg / (math.pi + sg) * np.sin((math.pi + sg) / sg * a)
                                 + sg / (math.pi - sg) * np.sin((math.pi - sg) / sg * a))

    def y(self, s):
        p = self.params
        a = self._asin(s)
        sg = p.sigma
        return (0.5 * p.kappa * (sg / (math.pi + sg) * np.cos((math.pi + sg) / sg * a)
                                 + sg / (math.pi - sg) * np.cos((math.pi - sg) / sg * a))
                + math.pi * p.x0 / (sg * math.tan(sg)))

    def evaluate(self, s):
        """Positions and the first two arc-length derivatives."""
        th = self.theta(s)
        H = self.H(s)
        c, sn = np.cos(th), np.sin(th)
        pts = np.column_stack([self.x(s), self.y(s)])
        return pts, np.column_stack([c, sn]), np.column_stack([-H * sn, H * c])

    @cached_property
    def curve(self) -> DiscreteCurve:
        return self.sample(self.n)

    def sample(self, n: int) -> DiscreteCurve:
        return DiscreteCurve.from_source(self, n)


def build_critical_curve(params: CriticalParams, n: int = 4096) -> CriticalCurve:
    return CriticalCurve(params, n)


def el_residual(curve, lam: float | None = None) -> float:
    """max |2 + (H^-2)'' - lambda| over the samples.

    For a CriticalCurve the analytic H, H', H'' are used via
    (H^-2)'' = 6 H^-4 H'^2 - 2 H^-3 H''. For a DiscreteCurve (which need not
    be arc-length parametrized) H^-2 is differentiated numerically in the
    parameter and converted to arc-length derivatives; the two end samples on
    each side are dropped and lam must be given. This amounts to four
    derivatives of the sampled positions, so rounding error grows like h^-4
    and grids of a few thousand samples give the smallest residual.
    """
    if isinstance(curve, CriticalCurve):
        s = curve.curve.s
        H, dH, ddH = curve.H(s), curve.dH(s), curve.ddH(s)
        w2 = 6 * dH**2 / H**4 - 2 * ddH / H**3
        lam = curve.params.lam if lam is None else lam
        return float(np.max(np.abs(2 + w2 - lam)))
    if lam is None:
        raise PreconditionError("lam is required for a sampled curve")
    frame = frame_and_curvature(curve)
    v = frame.speed
    w_s, w_ss = fd_derivatives(curve.s, frame.curvature ** -2)
    v_s, _ = fd_derivatives(curve.s, v)
    # d/d(arc) = (1/v) d/ds
    w2 = (w_ss - w_s * v_s / v) / v**2
    return float(np.max(np.abs(2 + w2[2:-2] - lam)))


def _area(x0, L):
    # valid down to L = 3 x0, where it equals (3/2) pi x0^2
    sg = math.pi * math.sqrt(x0 / (L + x0))
    k = L / math.sin(sg)
    pi2 = math.pi**2
    return (math.pi * k**2 * sg**2 / (2 * (pi2 - sg**2))
            + math.pi * k**2 * sg * (pi2 + sg**2) * math.sin(2 * sg) / (4 * (pi2 - sg**2) ** 2))


def area_closed_form(params: CriticalParams) -> float:
    return _area(params.x0, params.L)


def area_statement_form(params: CriticalParams) -> float:
    """Alternative closed form with a (2L + x0) factor on the oscillatory term.

    Kept for comparison only: it disagrees with quadrature of the sampled
    curve, while area_closed_form matches it (see tests).
    """
    x0, L, sg = params.x0, params.L, params.sigma
    return ((L + x0) / (2 * math.pi) * (sg / math.sin(sg)) ** 2
            * (L + (2 * L + x0) * math.sin(2 * sg) / (2 * sg)))


def f_closed_form(params: CriticalParams) -> float:
    sg = params.sigma
    return params.kappa**2 * sg * (2 * sg + math.sin(2 * sg)) / (2 * math.pi)


def hk_counterexample_ratio(params: CriticalParams) -> float:
    """lambda^-1 times the ratio that equals lambda A / F; always above 1/2."""
    sg = params.sigma
    pi2 = math.pi**2
    num = 2 * (pi2 - sg**2) * sg + (pi2 + sg**2) * math.sin(2 * sg)
    den = 2 * (pi2 - sg**2) * sg + (pi2 - sg**2) * math.sin(2 * sg)
    return num / den / params.lam


def area_threshold(x0: float) -> float:
    return 1.5 * math.pi * x0**2


def solve_length(x0: float, A0: float, L_cap_factor: float = L_CAP_FACTOR) -> float:
    """The unique L > 3 x0 whose equilibrium encloses area A0."""
    x0 = float(x0)
    A0 = float(A0)
    if not x0 > 0:
        raise PreconditionError(f"x0 must be positive, got {x0}")
    if not A0 > area_threshold(x0):
        raise ThresholdViolation(f"A0 = {A0} must exceed (3/2) pi x0^2 = {area_threshold(x0)}")
    lo, hi = 3 * x0, 6 * x0
    while _area(x0, hi) < A0:
        lo, hi = hi, 2 * hi
        if hi > L_cap_factor * x0:
            raise NoBracket(f"no bracket below L = {L_cap_factor:g} x0 for A0 = {A0}")
    L = brentq(lambda L: _area(x0, L) - A0, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
               maxiter=500)
    resid = abs(_area(x0, L) - A0)
    if resid > 1e-12 * max(1.0, A0):
        raise NoBracket(f"area residual {resid:.3e} above tolerance")
    return float(L)


def invariant_report(cc: CriticalCurve) -> dict:
    """Boundary, symmetry, and Euler-Lagrange checks on the sampled curve."""
    p = cc.params
    s = cc.curve.s
    two_L = 2 * p.L
    ends = np.array([0.0, two_L])
    xe, ye = cc.x(ends), cc.y(ends)
    dye = np.sin(cc.theta(ends))
    refl = two_L - s
    return {
        "el_residual": el_residual(cc),
        "x_start_error": float(abs(xe[0] - p.x0)),
        "x_end_error": float(abs(xe[1] + p.x0)),
        "y_start": float(abs(ye[0])),
        "y_end": float(abs(ye[1])),
        "ydot_start": float(abs(dye[0])),
        "ydot_end": float(abs(dye[1])),
        "symmetry_x": float(np.max(np.abs(cc.x(s) + cc.x(refl)))),
        "symmetry_y": float(np.max(np.abs(cc.y(s) - cc.y(refl)))),
        "symmetry_H": float(np.max(np.abs(cc.H(s) - cc.H(refl)))),
    }


def critical_report(params: CriticalParams, n: int = 4096) -> dict:
    cc = build_critical_curve(params, n)
    return {
        "sigma": params.sigma,
        "kappa": params.kappa,
        "lambda": params.lam,
        "area": area_closed_form(params),
        "F": f_closed_form(params),
        "el_residual": el_residual(cc),
        "hk_ratio": hk_counterexample_ratio(params),
    }
