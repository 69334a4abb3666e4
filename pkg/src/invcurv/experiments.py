"""Batch experiments shared by the command line and the acceptance tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .critical import CriticalParams, build_critical_curve
from .curvegeom import total_inverse_curvature
from .profiles import c2_norm, w22_norm_sq
from .stability import coercivity_constant
from .steiner import DEFAULT_NODES, compare_functionals, corpus
from .variations import (DEFAULT_N, functional_G, geodesic_normal_variation,
                         make_area_preserving, random_w1_profile)

SLACK = 0.2


@dataclass(frozen=True)
class PerturbationRow:
    index: int
    c2: float
    w22_sq: float
    delta: float
    bound: float

    @property
    def ok(self):
        return self.delta > 0 and self.delta >= (1 - SLACK) * self.bound

    def to_dict(self):
        return {"index": self.index, "c2": self.c2, "w22_sq": self.w22_sq,
                "delta": self.delta, "bound": self.bound, "ok": self.ok}


@dataclass(frozen=True)
class PerturbationStudy:
    params: CriticalParams
    coercivity: float
    area_preserving: bool
    rows: list

    @property
    def all_positive(self):
        return all(r.delta > 0 for r in self.rows)

    @property
    def all_bounded(self):
        return all(r.ok for r in self.rows)


def perturbation_study(params: CriticalParams, count: int = 200, eps: float = 1e-2, seed: int = 7,
                       n: int = DEFAULT_N, coercivity: float | None = None,
                       area_preserving: bool = False, n_coercivity: int = 512) -> PerturbationStudy:
    """Random clamped perturbations phi with ||phi||_C2 = eps.

    Plain mode: delta = G(gamma + phi N) - G(gamma) with G = F - lambda A.
    Area-preserving mode: phi has zero mean, an interior bump restores the
    area, and delta = F(corrected) - F(gamma).
    bound is C ||phi||^2_W22 / 2.
    """
    cc = build_critical_curve(params, n)
    curve = cc.curve
    C = coercivity_constant(params, n_coercivity) if coercivity is None else coercivity
    rng = np.random.default_rng(seed)
    s = curve.s
    G0 = functional_G(curve, params.lam)
    F0 = total_inverse_curvature(curve)
    rows = []
    for i in range(count):
        phi = random_w1_profile(params.L, rng, c2=eps, mean_zero=area_preserving, grid=s)
        if area_preserving:
            fam = make_area_preserving(curve, phi, [1.0])
            delta = total_inverse_curvature(fam.curves[0]) - F0
            # the bump correction is second order; measure the actual field
            applied = phi + fam.g[0] * fam.bump
        else:
            delta = functional_G(geodesic_normal_variation(curve, phi, 1.0), params.lam) - G0
            applied = phi
        w2 = w22_norm_sq(applied, s)
        rows.append(PerturbationRow(i, c2_norm(phi, s), w2, float(delta), 0.5 * C * w2))
    return PerturbationStudy(params, C, area_preserving, rows)


def steiner_study(kind: str = "mixed", count: int = 100, seed: int = 0, m: int = DEFAULT_NODES):
    """compare_functionals over a generated corpus; returns (pairs, comparisons)."""
    pairs = corpus(kind, count, seed, m)
    return pairs, [compare_functionals(p) for p in pairs]
