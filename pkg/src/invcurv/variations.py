"""Variations of the critical curve and checks of the variation formulas.

A variation is described by its velocity X = phi N + phi_tau T and its
acceleration X' = psi N + psi_tau T. The varied curve is
c(t) = gamma + t X + t^2/2 X', evaluated with exact derivatives, so the
functionals along the family can be finite-differenced without mixing in
differentiation error.

For an arc-length base curve (T' = -H N, N' = H T), a field a N + b T has
derivative (a' - H b) N + (b' + H a) T. This gives exact c' and c'' from
phi, phi', phi'' (and likewise for the other three profiles), H and H'.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .critical import CriticalCurve, CriticalParams, build_critical_curve
from .curvegeom import (DiscreteCurve, check_admissible, enclosed_area, fd_derivatives,
                        frame_and_curvature, total_inverse_curvature)
from .errors import AdmissibilityLost, NewtonStall, NonConvexCurve, PreconditionError
from .profiles import Bump, Profile, SineSeries, Zero, c2_norm, clamp

DEFAULT_N = 4097


@dataclass(frozen=True, eq=False)
class VariationField:
    phi: Profile
    phi_tau: Profile = field(default_factory=Zero)
    psi: Profile = field(default_factory=Zero)
    psi_tau: Profile = field(default_factory=Zero)

    def end_values(self, L):
        """Values of (phi, phi_tau, psi, psi_tau) at s = 0 and s = 2L, shape (4, 2)."""
        ends = np.array([0.0, 2 * L])
        return np.stack([p(ends)[0] for p in (self.phi, self.phi_tau, self.psi, self.psi_tau)])

    def end_slopes(self, L):
        return self.phi(np.array([0.0, 2 * L]), 1)[1]

    def fixes_boundary(self, L, tol=1e-12):
        return bool(np.all(np.abs(self.end_values(L)) <= tol))

    def in_w1(self, L, tol=1e-12):
        return self.fixes_boundary(L, tol) and bool(np.all(np.abs(self.end_slopes(L)) <= tol))


@dataclass(frozen=True)
class VariationCheckReport:
    analytic: float
    finite_difference: float
    abs_err: float
    rel_err: float
    fd_step: float

    @classmethod
    def compare(cls, analytic, fd, step):
        err = abs(analytic - fd)
        return cls(float(analytic), float(fd), float(err), float(err / max(1.0, abs(analytic))),
                   float(step))


@dataclass(frozen=True, eq=False)
class BaseGeometry:
    s: np.ndarray
    pts: np.ndarray
    T: np.ndarray
    N: np.ndarray
    H: np.ndarray
    dH: np.ndarray
    L: float
    x0: float


def as_curve(curve, n=DEFAULT_N) -> DiscreteCurve:
    """Accept CriticalParams, CriticalCurve or DiscreteCurve."""
    if isinstance(curve, CriticalParams):
        curve = build_critical_curve(curve, n)
    if isinstance(curve, CriticalCurve):
        return curve.curve
    return curve


def base_geometry(curve, n=DEFAULT_N) -> BaseGeometry:
    """Frame, curvature and its arc-length derivative of an arc-length curve."""
    dc = as_curve(curve, n)
    frame = frame_and_curvature(dc)
    src = dc.source
    if src is not None and hasattr(src, "dH"):
        H, dH = src.H(dc.s), src.dH(dc.s)
    else:
        H = frame.curvature
        dH = fd_derivatives(dc.s, H)[0]
    return BaseGeometry(dc.s, dc.pts, frame.tangent, frame.normal, np.broadcast_to(H, dc.s.shape),
                        np.broadcast_to(dH, dc.s.shape), dc.L_half, dc.x0)


def _field_derivs(a, b, H, dH):
    """Normal/tangential parts of F, F', F'' for F = a N + b T.

    a and b are stacks (value, first, second derivative).
    """
    n0, t0 = a[0], b[0]
    n1 = a[1] - H * b[0]
    t1 = b[1] + H * a[0]
    n2 = a[2] - 2 * H * b[1] - dH * b[0] - H**2 * a[0]
    t2 = b[2] + 2 * H * a[1] + dH * a[0] - H**2 * b[0]
    return (n0, t0), (n1, t1), (n2, t2)


def varied_curve(curve, fld: VariationField, t: float, t2: float | None = None) -> DiscreteCurve:
    """gamma + t X + (t^2/2) X' with exact derivatives (t2 overrides t^2/2)."""
    g = curve if isinstance(curve, BaseGeometry) else base_geometry(curve)
    t2 = 0.5 * t * t if t2 is None else t2
    s = g.s
    parts = []
    for a_prof, b_prof, w in ((fld.phi, fld.phi_tau, t), (fld.psi, fld.psi_tau, t2)):
        if w == 0:
            continue
        parts.append((w, _field_derivs(a_prof(s, 2), b_prof(s, 2), g.H, g.dH)))
    T, N = g.T, g.N
    pts = g.pts.copy()
    d1 = T.copy()
    d2 = -g.H[:, None] * N
    for w, ((n0, t0), (n1, t1), (n2, t2_)) in parts:
        pts = pts + w * (n0[:, None] * N + t0[:, None] * T)
        d1 = d1 + w * (n1[:, None] * N + t1[:, None] * T)
        d2 = d2 + w * (n2[:, None] * N + t2_[:, None] * T)
    return DiscreteCurve(s, pts, g.L, g.x0, d1, d2)


def geodesic_normal_variation(curve, phi: Profile, t: float, check: bool = True) -> DiscreteCurve:
    """gamma + t phi N. Raises AdmissibilityLost if the result is not admissible."""
    g = base_geometry(curve)
    ends = phi(np.array([0.0, 2 * g.L]))[0]
    if np.any(np.abs(ends) > 1e-12):
        raise PreconditionError("phi must vanish at both ends")
    c = varied_curve(g, VariationField(phi), t)
    if check:
        rep = check_admissible(c)
        if not rep.is_admissible:
            raise AdmissibilityLost("; ".join(rep.messages))
    return c


def functional_G(curve: DiscreteCurve, lam: float) -> float:
    return total_inverse_curvature(curve) - lam * enclosed_area(curve)


def first_variation_F(curve, fld: VariationField, n: int = DEFAULT_N) -> float:
    """int (2 + (H^-2)'') phi ds + [H^-2 phi']_0^2L, integrated by parts as
    int (2 phi - (H^-2)' phi') ds + [H^-2 phi']."""
    g = base_geometry(curve, n)
    if np.any(g.H <= 0):
        raise NonConvexCurve("first variation needs H > 0")
    ph = fld.phi(g.s, 1)
    w = g.H**-2
    dw = -2 * g.dH / g.H**3
    body = simpson(2 * ph[0] - dw * ph[1], x=g.s)
    return float(body + w[-1] * ph[1][-1] - w[0] * ph[1][0])


def first_variation_area(curve, fld: VariationField, n: int = DEFAULT_N) -> float:
    g = base_geometry(curve, n)
    return float(simpson(fld.phi(g.s)[0], x=g.s))


def _tangential_block(s, H, fld):
    ph = fld.phi(s)[0]
    pt = fld.phi_tau(s, 1)
    ps = fld.psi(s)[0]
    return simpson(ps + H * pt[0] ** 2 + 2 * ph * pt[1], x=s)


def _boundary_term(s, H, fld):
    ends = np.array([s[0], s[-1]])
    dps = fld.psi(ends, 1)[1]
    dph = fld.phi(ends, 1)[1]
    dpt = fld.phi_tau(ends, 1)[1]
    val = (dps - 2 * dph * dpt) / np.array([H[0], H[-1]]) ** 2
    return val[1] - val[0]


def _critical_grid(params: CriticalParams, n):
    cc = build_critical_curve(params, n)
    s = cc.curve.s
    return cc, s, cc.H(s)


def second_variation_F(params: CriticalParams, fld: VariationField, n: int = DEFAULT_N) -> float:
    _, s, H = _critical_grid(params, n)
    ph = fld.phi(s, 2)
    core = simpson(2 * H * ph[0] ** 2 - 2 * ph[1] ** 2 / H + 2 * ph[2] ** 2 / H**3, x=s)
    return float(core + params.lam * _tangential_block(s, H, fld) + _boundary_term(s, H, fld))


def second_variation_area(curve, fld: VariationField, n: int = DEFAULT_N) -> float:
    g = base_geometry(curve, n)
    ph = fld.phi(g.s)[0]
    return float(simpson(g.H * ph**2, x=g.s) + _tangential_block(g.s, g.H, fld))


def second_variation_G(params: CriticalParams, fld: VariationField, n: int = DEFAULT_N):
    """(full value, integral part alone)."""
    _, s, H = _critical_grid(params, n)
    ph = fld.phi(s, 2)
    core = simpson((2 - params.lam) * H * ph[0] ** 2 - 2 * ph[1] ** 2 / H
                   + 2 * ph[2] ** 2 / H**3, x=s)
    return float(core + _boundary_term(s, H, fld)), float(core)


def fd_first(fun, h):
    return (fun(h) - fun(-h)) / (2 * h)


def fd_second(fun, h, richardson=True):
    f0 = fun(0.0)

    def d2(k):
        return (fun(k) - 2 * f0 + fun(-k)) / k**2

    if not richardson:
        return d2(h)
    return (4 * d2(h / 2) - d2(h)) / 3


def _family(curve, fld, functional):
    g = base_geometry(curve)
    return lambda t: functional(varied_curve(g, fld, t))


def check_first_variation(curve, fld: VariationField, h: float = 1e-5) -> VariationCheckReport:
    fd = fd_first(_family(curve, fld, total_inverse_curvature), h)
    return VariationCheckReport.compare(first_variation_F(curve, fld), fd, h)


def check_second_variation_F(params, fld, h=1e-3, n=DEFAULT_N):
    fd = fd_second(_family(build_critical_curve(params, n), fld, total_inverse_curvature), h)
    return VariationCheckReport.compare(second_variation_F(params, fld, n), fd, h)


def check_second_variation_area(curve, fld, h=1e-3, n=DEFAULT_N):
    fd = fd_second(_family(as_curve(curve, n), fld, enclosed_area), h)
    return VariationCheckReport.compare(second_variation_area(curve, fld, n), fd, h)


def check_second_variation_G(params, fld, h=1e-3, n=DEFAULT_N):
    fd = fd_second(_family(build_critical_curve(params, n), fld,
                           lambda c: functional_G(c, params.lam)), h)
    return VariationCheckReport.compare(second_variation_G(params, fld, n)[0], fd, h)


@dataclass(frozen=True, eq=False)
class AreaPreservingFamily:
    t: np.ndarray
    g: np.ndarray
    curves: list
    bump: Profile
    area: float


def default_bump(L):
    return Bump(0.5 * L, 1.5 * L)


def make_area_preserving(curve, phi: Profile, t_grid, bump: Profile | None = None,
                         tol: float = 1e-12, max_iter: int = 50) -> AreaPreservingFamily:
    """Solve A(gamma + (t phi + u bump) N) = A(gamma) for u = g(t)."""
    g = base_geometry(curve)
    L = g.L
    bump = default_bump(L) if bump is None else bump
    mass = phi.integral(0.0, 2 * L)
    scale = simpson(np.abs(phi(g.s)[0]), x=g.s)
    if abs(mass) > 1e-10 * max(1.0, scale):
        raise PreconditionError(f"phi must have zero mean (integral = {mass:.3e})")
    target = enclosed_area(DiscreteCurve(g.s, g.pts, L, g.x0, g.T, -g.H[:, None] * g.N))

    def area_of(t, u):
        return enclosed_area(varied_curve(g, VariationField(t * phi + u * bump), 1.0, 0.0))

    ts = np.asarray(t_grid, float)
    gs = np.zeros_like(ts)
    curves = []
    atol = tol * max(1.0, abs(target))
    for i, t in enumerate(ts):
        u = 0.0
        r = area_of(t, u) - target
        it = 0
        while abs(r) > atol:
            if it >= max_iter:
                raise NewtonStall(f"no convergence at t = {t} (residual {r:.3e})")
            du = 1e-3 * max(1.0, abs(u))
            slope = (area_of(t, u + du) - area_of(t, u - du)) / (2 * du)
            step = -r / slope
            # backtrack until the residual decreases
            for _ in range(30):
                r_new = area_of(t, u + step) - target
                if abs(r_new) < abs(r):
                    break
                step *= 0.5
            u += step
            r = r_new
            it += 1
        gs[i] = u
        curves.append(varied_curve(g, VariationField(t * phi + u * bump), 1.0, 0.0))
    return AreaPreservingFamily(ts, gs, curves, bump, target)


def random_w1_profile(L: float, rng: np.random.Generator, modes: int = 12,
                      c2: float | None = None, mean_zero: bool = False,
                      grid: np.ndarray | None = None) -> Profile:
    """Random profile vanishing with its slope at both ends.

    Sine modes with coefficients ~ k^-3 followed by a Hermite clamp. With
    mean_zero, a multiple of the interior bump is subtracted so the integral
    vanishes. With c2 set, the profile is rescaled to that C^2 norm on grid.
    """
    k = np.arange(1, modes + 1)
    coeffs = rng.standard_normal(modes) * k**-3.0
    prof = clamp(SineSeries(coeffs, 2 * L), 2 * L)
    if mean_zero:
        b = default_bump(L)
        prof = prof - (prof.integral(0.0, 2 * L) / b.integral(0.0, 2 * L)) * b
    if c2 is not None:
        grid = np.linspace(0.0, 2 * L, DEFAULT_N) if grid is None else grid
        prof = (c2 / c2_norm(prof, grid)) * prof
    return prof


def random_field(L: float, rng: np.random.Generator, full: bool = True) -> VariationField:
    """phi in the clamped space; with full, random tangential and acceleration parts too."""
    phi = random_w1_profile(L, rng)
    if not full:
        return VariationField(phi)

    def sines(m=8):
        k = np.arange(1, m + 1)
        return SineSeries(rng.standard_normal(m) * k**-3.0, 2 * L)

    return VariationField(phi, sines(), sines(), sines())
