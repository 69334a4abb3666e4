"""Stability of the critical curve: the optimal constant mu_W1.

With r = 2/H^3, q = 2/H, p = (2 - lambda) H the quadratic forms are

    a(u, v) = int q u' v' ds,      b(u, v) = int (r u'' v'' + p u v) ds,

and mu_W1 = min b(u,u)/a(u,u) over u with u = u' = 0 at both ends. The
minimizer solves (r u'')'' + mu (q u')' + p u = 0. In the tangent angle theta
its solutions are trigonometric/hyperbolic in theta, and imposing the four
boundary conditions leaves a 2x2 system whose determinant vanishes exactly
at the admissible mu. mu_W1 is computed twice: as the first root of that
determinant, and as the smallest generalized eigenvalue of a clamped cubic
Hermite discretization of (b, a).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sps
import sympy as sp
from scipy.linalg import eigh, null_space
from scipy.integrate import simpson
from scipy.optimize import brentq
from scipy.sparse.linalg import eigsh

from .critical import CriticalParams, build_critical_curve, make_params
from .errors import PreconditionError, RootNotFound, SingularForm

MU_CAP = 50.0
BELOW, CRITICAL, ABOVE = "Below", "Critical", "Above"


def params_from_ratio(ratio: float, x0: float = 1.0) -> CriticalParams:
    """Parameters with x0 / (L + x0) = ratio."""
    if not 0 < ratio < 0.25:
        raise PreconditionError(f"ratio must lie in (0, 1/4), got {ratio}")
    return make_params(x0, x0 * (1 - ratio) / ratio)


@dataclass(frozen=True)
class CoefficientTriple:
    params: CriticalParams

    def _H(self, s):
        return build_critical_curve(self.params, 5).H(s)

    def r(self, s):
        return 2 / self._H(s) ** 3

    def q(self, s):
        return 2 / self._H(s)

    def p(self, s):
        return (2 - self.params.lam) * self._H(s)


def quadratic_forms(params: CriticalParams, u, v, n: int = 4097):
    """(a(u, v), b(u, v)) by Simpson quadrature; u, v are profiles with exact derivatives."""
    s = np.linspace(0.0, 2 * params.L, n)
    H = build_critical_curve(params, 5).H(s)
    U, V = u(s, 2), v(s, 2)
    a = simpson(2 / H * U[1] * V[1], x=s)
    b = simpson(2 / H**3 * U[2] * V[2] + (2 - params.lam) * H * U[0] * V[0], x=s)
    return float(a), float(b)


def mu0_threshold(params: CriticalParams) -> float:
    rho = params.rho
    return -rho + 2 * math.sqrt(rho)


@dataclass(frozen=True)
class RegimeParams:
    mu: float
    mu0: float
    rho: float
    regime: str
    alpha: float
    beta: float | None = None
    gamma: float | None = None


def regime_params(mu: float, params: CriticalParams, tol: float = 1e-12) -> RegimeParams:
    rho = params.rho
    sr = math.sqrt(rho)
    mu0 = -rho + 2 * sr
    alpha = 0.5 * math.sqrt(mu + rho + 2 * sr)
    if abs(mu - mu0) <= tol * max(1.0, mu0):
        return RegimeParams(mu, mu0, rho, CRITICAL, alpha)
    if mu < mu0:
        return RegimeParams(mu, mu0, rho, BELOW, alpha, beta=0.5 * math.sqrt(-mu - rho + 2 * sr))
    return RegimeParams(mu, mu0, rho, ABOVE, alpha, gamma=0.5 * math.sqrt(mu + rho - 2 * sr))


def _det_below(a, b):
    return a**2 * np.sinh(2 * np.pi * b) ** 2 - b**2 * np.sin(2 * np.pi * a) ** 2


def _det_critical(a):
    return np.sin(2 * np.pi * a) ** 2 - 4 * np.pi**2 * a**2


def _det_above(a, g):
    return 4 * g**2 * np.sin(2 * np.pi * a) ** 2 - 4 * a**2 * np.sin(2 * np.pi * g) ** 2


def characteristic_det(mu: float, params: CriticalParams) -> float:
    """Determinant of the 2x2 boundary system in the regime of mu.

    Each regime carries its own normalization, so the value is not
    continuous across mu0.
    """
    if not mu > 0:
        raise PreconditionError("mu must be positive")
    rp = regime_params(mu, params)
    if rp.regime == BELOW:
        return float(_det_below(rp.alpha, rp.beta))
    if rp.regime == CRITICAL:
        return float(_det_critical(rp.alpha))
    return float(_det_above(rp.alpha, rp.gamma))


def _above_vec(mu, rho):
    sr = np.sqrt(rho)
    return _det_above(0.5 * np.sqrt(mu + rho + 2 * sr), 0.5 * np.sqrt(mu + rho - 2 * sr))


@dataclass(frozen=True)
class MuScan:
    root: float
    bracket: tuple
    below_min_normalized: float
    critical_det: float
    trace: list


def scan_mu_w1(params: CriticalParams, step: float = 1e-3, tol: float = 1e-12,
               cap: float = MU_CAP) -> MuScan:
    """First root of the Above-regime determinant, plus the audit below mu0."""
    rho = params.rho
    mu0 = mu0_threshold(params)
    sr = math.sqrt(rho)

    # Below mu0 the determinant divided by beta^2 is at least 4 pi^2 alpha^2 - sin^2(2 pi alpha) > 0.
    mus = np.arange(step, mu0, step)
    if mus.size:
        a = 0.5 * np.sqrt(mus + rho + 2 * sr)
        b = 0.5 * np.sqrt(np.maximum(-mus - rho + 2 * sr, 0.0))
        b = np.where(b > 0, b, np.finfo(float).tiny)
        normalized = a**2 * (np.sinh(2 * np.pi * b) / b) ** 2 - np.sin(2 * np.pi * a) ** 2
        below_min = float(normalized.min())
    else:
        below_min = math.inf
    crit = float(_det_critical(0.5 * math.sqrt(mu0 + rho + 2 * sr)))

    grid = mu0 + step * np.arange(1, int(math.ceil((cap - mu0) / step)) + 1)
    d = _above_vec(grid, rho)
    change = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
    if change.size == 0:
        raise RootNotFound(f"no sign change of the determinant below mu = {cap}")
    i = change[0]
    lo, hi = float(grid[i]), float(grid[i + 1])
    root = brentq(lambda m: float(_above_vec(m, rho)), lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
    trace = [
        {"regime": BELOW, "mu_min": float(mus[0]) if mus.size else None,
         "mu_max": float(mus[-1]) if mus.size else None, "min_normalized_det": below_min},
        {"regime": CRITICAL, "mu": mu0, "det": crit},
        {"regime": ABOVE, "bracket": [lo, hi], "root": root},
    ]
    return MuScan(root, (lo, hi), below_min, crit, trace)


def find_mu_w1(params: CriticalParams, step: float = 1e-3, tol: float = 1e-12) -> float:
    scan = scan_mu_w1(params, step, tol)
    if not (scan.below_min_normalized > 0 and scan.critical_det < 0):
        raise RootNotFound("determinant vanishes at or below mu0")
    return scan.root


# ---------------------------------------------------------------- discrete Rayleigh quotient

class HermiteFE:
    """Cubic Hermite elements on a uniform grid of [0, 2L].

    Degrees of freedom are (u, u') at each node. Element integrals use a
    6-point Gauss rule.
    """

    def __init__(self, params: CriticalParams, n: int, quad: int = 6):
        self.params = params
        self.n = n
        L = params.L
        self.h = h = 2 * L / n
        gp, gw = np.polynomial.legendre.leggauss(quad)
        xi = 0.5 * (gp + 1)
        self.w = 0.5 * gw * h
        self.N = np.array([1 - 3 * xi**2 + 2 * xi**3, h * (xi - 2 * xi**2 + xi**3),
                           3 * xi**2 - 2 * xi**3, h * (-xi**2 + xi**3)])
        self.dN = np.array([-6 * xi + 6 * xi**2, h * (1 - 4 * xi + 3 * xi**2),
                            6 * xi - 6 * xi**2, h * (-2 * xi + 3 * xi**2)]) / h
        self.ddN = np.array([-6 + 12 * xi, h * (-4 + 6 * xi), 6 - 12 * xi, h * (-2 + 6 * xi)]) / h**2
        self.sq = (np.arange(n)[:, None] + xi[None, :]) * h
        self.Hq = build_critical_curve(params, 5).H(self.sq)
        self.ndof = 2 * n + 2
        self.conn = 2 * np.arange(n)[:, None] + np.arange(4)[None, :]

    def _assemble(self, c0=None, c1=None, c2=None):
        Ke = np.zeros((self.n, 4, 4))
        for c, B in ((c0, self.N), (c1, self.dN), (c2, self.ddN)):
            if c is not None:
                Ke += np.einsum("iq,eq,jq->eij", B, c * self.w, B)
        rows = np.repeat(self.conn[:, :, None], 4, axis=2)
        cols = np.repeat(self.conn[:, None, :], 4, axis=1)
        return sps.coo_matrix((Ke.ravel(), (rows.ravel(), cols.ravel())),
                              shape=(self.ndof, self.ndof)).tocsc()

    @cached_property
    def A(self):
        return self._assemble(c1=2 / self.Hq)

    @cached_property
    def B(self):
        lam = self.params.lam
        return self._assemble(c0=(2 - lam) * self.Hq, c2=2 / self.Hq**3)

    @cached_property
    def G(self):
        one = np.ones_like(self.Hq)
        return self._assemble(c0=one, c1=one, c2=one)

    @property
    def clamped(self):
        return np.arange(2, 2 * self.n)

    @property
    def pinned(self):
        """Value dofs removed at both ends, slopes free."""
        keep = np.ones(self.ndof, bool)
        keep[[0, 2 * self.n]] = False
        return np.nonzero(keep)[0]

    def expand(self, x, free):
        full = np.zeros(self.ndof)
        full[free] = x
        return full

    def at_quadrature(self, full):
        """u, u', u'' at the quadrature points, each of shape (n, q)."""
        el = full[self.conn]
        return el @ self.N, el @ self.dN, el @ self.ddN

    def forms(self, full):
        u, du, ddu = self.at_quadrature(full)
        H = self.Hq
        w = self.w
        a = np.sum(2 / H * du**2 * w)
        b = np.sum((2 / H**3 * ddu**2 + (2 - self.params.lam) * H * u**2) * w)
        g = np.sum((u**2 + du**2 + ddu**2) * w)
        return a, b, g

    def nodal_values(self, full):
        s = np.linspace(0.0, 2 * self.params.L, self.n + 1)
        return s, full[0::2], full[1::2]

    def mass_vector(self):
        """Integral of each basis function."""
        m = np.zeros(self.ndof)
        np.add.at(m, self.conn, (self.N @ self.w)[None, :].repeat(self.n, 0))
        return m


def _smallest_pair(K, M, free):
    K = K[free][:, free]
    M = M[free][:, free]
    try:
        vals, vecs = eigsh(K, k=1, M=M, sigma=0.0, which="LM")
    except RuntimeError as exc:
        raise SingularForm(str(exc)) from exc
    return float(vals[0]), vecs[:, 0]


@dataclass(frozen=True, eq=False)
class RayleighResult:
    mu: float
    mu_raw: float
    fe: HermiteFE
    coeffs: np.ndarray

    def values(self):
        """Node positions, u and u' at the nodes, normalized to max |u| = 1."""
        s, u, du = self.fe.nodal_values(self.coeffs)
        k = np.max(np.abs(u))
        return s, u / k, du / k


def rayleigh_minimizer(params: CriticalParams, n: int = 2048) -> RayleighResult:
    if n < 64:
        raise PreconditionError("n must be at least 64")
    fe = HermiteFE(params, n)
    if not np.all(np.isfinite(fe.A.data)):
        raise SingularForm("non-finite stiffness entries")
    raw, vec = _smallest_pair(fe.B, fe.A, fe.clamped)
    full = fe.expand(vec, fe.clamped)
    a, b, _ = fe.forms(full)
    if not a > 0:
        raise SingularForm("a(u, u) vanished for the computed eigenvector")
    # The eigenvalue from the solver degrades for large n (the fourth-order
    # pencil is badly conditioned); the Rayleigh quotient of the returned
    # vector, summed from positive quadrature terms, does not.
    return RayleighResult(b / a, raw, fe, full)


def rayleigh_min_discrete(params: CriticalParams, n: int = 2048) -> float:
    return rayleigh_minimizer(params, n).mu


def coercivity_bounds(params: CriticalParams, n: int = 512):
    """Two upper bounds for inf (b(u,u) - a(u,u)) / ||u||^2_{W^{2,2}} over clamped u.

    discrete: the minimum over the clamped Hermite space (Rayleigh-Ritz).
    edge: min 2/H^3, attained at the ends. Profiles oscillating ever faster in
    a shrinking layer at an end drive the quotient down to this value, so the
    infimum never exceeds it. When it is the smaller bound the discrete
    minimizers concentrate at the ends and converge only at first order in 1/n.
    """
    fe = HermiteFE(params, n)
    raw, vec = _smallest_pair(fe.B - fe.A, fe.G, fe.clamped)
    a, b, g = fe.forms(fe.expand(vec, fe.clamped))
    H0 = float(build_critical_curve(params, 5).H(0.0))
    return float((b - a) / g), 2 / H0**3


def coercivity_constant(params: CriticalParams, n: int = 512) -> float:
    """Estimate of the coercivity constant: the smaller of the two bounds above."""
    return min(coercivity_bounds(params, n))


# ---------------------------------------------------------------- closed-form solutions

_S = sp.Symbol("s", real=True)


class AnalyticProfile:
    """u(s) built from a sympy expression in (theta(s), s)."""

    def __init__(self, builder, label=""):
        self.builder = builder
        self.label = label

    def expr(self, params: CriticalParams):
        return self.builder(_theta_expr(params), _S)

    def derivatives(self, params, s, k=4):
        e = self.expr(params)
        out = []
        for j in range(k + 1):
            f = sp.lambdify(_S, e, "numpy")
            out.append(np.broadcast_to(np.asarray(f(s), float), np.shape(s)))
            e = sp.diff(e, _S)
        return np.stack(out)


def _theta_expr(params):
    return sp.pi * (1 + sp.asin((_S - params.L) / params.kappa) / params.sigma)


def _H_expr(params):
    return sp.pi / (params.sigma * sp.sqrt(params.kappa**2 - (_S - params.L) ** 2))


def _residual_expr(u_expr, mu, nu, params):
    H = _H_expr(params)
    r, q, p = 2 / H**3, 2 / H, (2 - params.lam) * H
    lhs = sp.diff(r * sp.diff(u_expr, _S, 2), _S, 2) + mu * sp.diff(q * sp.diff(u_expr, _S), _S)
    return lhs + p * u_expr - nu, p * u_expr


def _interior(params, n):
    return np.linspace(0.0, 2 * params.L, n + 2)[1:-1]


def ode_residual(u, mu: float, nu: float, params: CriticalParams, n: int = 401) -> float:
    """Scaled max |(r u'')'' + mu (q u')' + p u - nu| over interior samples.

    u is an AnalyticProfile (exact symbolic derivatives) or a RayleighResult
    (spectral fit in theta, see eigenvector_residual).
    """
    if isinstance(u, RayleighResult):
        return eigenvector_residual(u, mu)
    s = _interior(params, n)
    res, pu = _residual_expr(u.expr(params), mu, nu, params)
    fr = sp.lambdify(_S, res, "numpy")
    fp = sp.lambdify(_S, pu, "numpy")
    scale = np.max(np.abs(fp(s))) + abs(nu) + 1e-300
    return float(np.max(np.abs(fr(s))) / scale)


def eigenvector_residual(result: RayleighResult, mu: float | None = None, degree: int = 16,
                         window: float = 0.05) -> float:
    """Scaled residual of a discrete eigenvector, from a Chebyshev fit in theta.

    Writing u = f(theta(s)), the operator becomes
    H * (2 f'''' + (2 mu + 2 - lambda) f'' + (2 - lambda) f) and p u = (2 - lambda) H f,
    so H cancels from the scaled residual. The nodal values are fitted in theta
    and the fit is differentiated exactly. The maximum is taken over theta in
    [window, 1 - window] * 2 pi: a fourth derivative of a fitted series is
    unreliable in a thin layer at the ends.
    """
    params = result.fe.params
    mu = result.mu if mu is None else mu
    s, u, _ = result.values()
    th = build_critical_curve(params, 5).theta(s)
    two_pi = 2 * math.pi
    f = np.polynomial.Chebyshev.fit(th, u, degree, domain=[0.0, two_pi])
    c2 = 2 * mu + 2 - params.lam
    c0 = 2 - params.lam
    res = 2 * f.deriv(4)(th) + c2 * f.deriv(2)(th) + c0 * f(th)
    inner = (th >= window * two_pi) & (th <= (1 - window) * two_pi)
    return float(np.max(np.abs(res[inner])) / np.max(np.abs(c0 * u)))


@dataclass(frozen=True, eq=False)
class SolutionBasis:
    regime: RegimeParams
    functions: list
    wronskian: np.ndarray
    det_numeric: float
    det_formula: float


def _basis_builders(rp: RegimeParams):
    a = rp.alpha
    if rp.regime == BELOW:
        b = rp.beta
        return [
            lambda t, s: sp.cos(a * t) * sp.sinh(b * t),
            lambda t, s: sp.sin(a * t) * sp.cosh(b * t),
            lambda t, s: sp.sin(a * t) * sp.sinh(b * t),
            lambda t, s: sp.cos(a * t) * sp.cosh(b * t),
        ]
    if rp.regime == CRITICAL:
        return [
            lambda t, s: sp.sin(a * t),
            lambda t, s: sp.cos(a * t),
            lambda t, s: t * sp.sin(a * t),
            lambda t, s: t * sp.cos(a * t),
        ]
    z1, z2 = a - rp.gamma, a + rp.gamma
    return [
        lambda t, s: sp.sin(z1 * t),
        lambda t, s: sp.sin(z2 * t),
        lambda t, s: sp.cos(z1 * t),
        lambda t, s: sp.cos(z2 * t),
    ]


def solution_basis(mu: float, params: CriticalParams) -> SolutionBasis:
    """Four independent solutions of the homogeneous equation, composed with theta."""
    rp = regime_params(mu, params)
    funcs = [AnalyticProfile(b, f"{rp.regime} u{i + 1}") for i, b in enumerate(_basis_builders(rp))]
    W = np.stack([f.derivatives(params, np.array([0.0]), 3)[:, 0] for f in funcs], axis=1)
    H0 = float(build_critical_curve(params, 5).H(0.0))
    a = rp.alpha
    if rp.regime == BELOW:
        # the row of W(0) with a single nonzero entry sits in an even-sum
        # position, so the expansion carries a plus sign
        formula = 4 * H0**6 * a**2 * rp.beta**2 * (a**2 + rp.beta**2)
    elif rp.regime == CRITICAL:
        formula = 4 * H0**6 * a**4
    else:
        z1, z2 = a - rp.gamma, a + rp.gamma
        formula = -H0**6 * z1 * z2 * (z1**2 - z2**2) ** 2
    return SolutionBasis(rp, funcs, W, float(np.linalg.det(W)), float(formula))


def particular_solution(mu: float, nu: float, params: CriticalParams) -> AnalyticProfile:
    """A solution of (r u'')'' + mu (q u')' + p u = nu."""
    if mu == 1:
        c = nu / (2 * params.lam)
        return AnalyticProfile(lambda t, s: c * t * (s - params.L), "mu = 1 particular")
    c = nu / ((2 - params.lam) * (1 - mu))
    H = _H_expr(params)
    return AnalyticProfile(lambda t, s: c / H, "H^-1 particular")


# ---------------------------------------------------------------- one-sided problem

@dataclass(frozen=True, eq=False)
class OneSidedProblem:
    coefficients: CoefficientTriple
    conditions: tuple
    mu_w2_discrete: float
    minimizer_mean: float
    minimizer_norm: float
    n: int


def w2_bvp_statement(params: CriticalParams, n: int = 256) -> OneSidedProblem:
    """The mean-zero, pinned-end problem and a discrete estimate of its constant.

    Trial space: u(0) = u(2L) = 0 and int u = 0, slopes free. The natural
    conditions u''(0) = u''(2L) = 0 and the free multiplier nu are recorded,
    not imposed.
    """
    fe = HermiteFE(params, n)
    free = fe.pinned
    A = fe.A[free][:, free].toarray()
    B = fe.B[free][:, free].toarray()
    c = fe.mass_vector()[free]
    Z = null_space(c[None, :])
    vals, vecs = eigh(Z.T @ B @ Z, Z.T @ A @ Z, subset_by_index=[0, 0])
    x = Z @ vecs[:, 0]
    full = fe.expand(x, free)
    a, b, g = fe.forms(full)
    mean = float(fe.mass_vector() @ full)
    conditions = (
        "(r u'')'' + mu (q u')' + p u = nu on (0, 2L), nu free",
        "u(0) = u(2L) = 0",
        "u''(0) = u''(2L) = 0",
        "int_0^2L u ds = 0",
    )
    return OneSidedProblem(CoefficientTriple(params), conditions, float(b / a), mean,
                           float(math.sqrt(g)), n)


# ---------------------------------------------------------------- report

@dataclass(frozen=True)
class StabilityReport:
    ratio: float
    mu0: float
    mu_w1_det: float
    mu_w1_rayleigh: float
    coercivity: float
    regime_trace: list = field(default_factory=list)
    passed: bool = False

    def to_dict(self):
        return {"ratio": self.ratio, "mu0": self.mu0, "mu_w1_det": self.mu_w1_det,
                "mu_w1_rayleigh": self.mu_w1_rayleigh, "coercivity": self.coercivity,
                "regime_trace": self.regime_trace, "pass": self.passed}


def stability_report(params: CriticalParams, n_rayleigh: int = 2048, n_coercivity: int = 512,
                     step: float = 1e-3, tol: float = 1e-12) -> StabilityReport:
    scan = scan_mu_w1(params, step, tol)
    mu_r = rayleigh_min_discrete(params, n_rayleigh)
    coer = coercivity_constant(params, n_coercivity)
    ok = (scan.root > 1 and mu_r > 1 and coer > 0 and scan.below_min_normalized > 0
          and scan.critical_det < 0 and abs(scan.root - mu_r) / scan.root <= 0.01)
    return StabilityReport(params.rho, mu0_threshold(params), scan.root, mu_r, coer,
                           scan.trace, bool(ok))
