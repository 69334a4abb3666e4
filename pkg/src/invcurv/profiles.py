"""Scalar profiles on [0, 2L] with exact derivatives.

A profile is called as ``p(s, k)`` and returns an array of shape (k+1, len(s))
holding the value and the first k derivatives.
"""
from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import simpson


class Profile:
    def __call__(self, s, k=0):
        raise NotImplementedError

    def integral(self, a, b):
        """Exact integral over [a, b]."""
        raise NotImplementedError

    def __add__(self, other):
        return Sum([self, other])

    def __sub__(self, other):
        return Sum([self, Scaled(other, -1.0)])

    def __mul__(self, c):
        return Scaled(self, float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return Scaled(self, -1.0)


class Zero(Profile):
    def __call__(self, s, k=0):
        return np.zeros((k + 1, np.size(s)))

    def integral(self, a, b):
        return 0.0


class Sum(Profile):
    def __init__(self, parts):
        self.parts = list(parts)

    def __call__(self, s, k=0):
        return sum(p(s, k) for p in self.parts)

    def integral(self, a, b):
        return sum(p.integral(a, b) for p in self.parts)


class Scaled(Profile):
    def __init__(self, base, c):
        self.base, self.c = base, c

    def __call__(self, s, k=0):
        return self.c * self.base(s, k)

    def integral(self, a, b):
        return self.c * self.base.integral(a, b)


class Poly(Profile):
    def __init__(self, poly: Polynomial):
        self.poly = poly

    def __call__(self, s, k=0):
        s = np.asarray(s, float)
        return np.stack([self.poly.deriv(j)(s) if j else self.poly(s) for j in range(k + 1)])

    def integral(self, a, b):
        P = self.poly.integ()
        return float(P(b) - P(a))


class SineSeries(Profile):
    """sum_k c_k sin(k pi s / length)."""

    def __init__(self, coeffs, length):
        self.coeffs = np.asarray(coeffs, float)
        self.length = float(length)

    def __call__(self, s, k=0):
        s = np.asarray(s, float)
        w = np.arange(1, self.coeffs.size + 1) * math.pi / self.length
        arg = np.outer(w, s)
        out = []
        for j in range(k + 1):
            # d^j/ds^j sin(w s) = w^j sin(w s + j pi / 2)
            out.append((self.coeffs * w**j) @ np.sin(arg + j * math.pi / 2))
        return np.stack(out)

    def integral(self, a, b):
        w = np.arange(1, self.coeffs.size + 1) * math.pi / self.length
        return float(np.sum(self.coeffs * (np.cos(w * a) - np.cos(w * b)) / w))


class Bump(Profile):
    """(1 - u^2)^m on [a, b] with u the centred, scaled coordinate; zero outside.

    C^(m-1) across the support ends, so it lies in the clamped space for m >= 2.
    """

    def __init__(self, a, b, m=6):
        self.a, self.b, self.m = float(a), float(b), m
        # expanded in the centred coordinate, not in powers of s
        self.poly = Polynomial(((Polynomial([1.0, 0.0, -1.0])) ** m).coef,
                               domain=[self.a, self.b], window=[-1.0, 1.0])

    def __call__(self, s, k=0):
        s = np.asarray(s, float)
        inside = (s > self.a) & (s < self.b)
        out = np.stack([self.poly.deriv(j)(s) if j else self.poly(s) for j in range(k + 1)])
        return np.where(inside, out, 0.0)

    def integral(self, a, b):
        lo, hi = max(a, self.a), min(b, self.b)
        if hi <= lo:
            return 0.0
        P = self.poly.integ()
        return float(P(hi) - P(lo))


def hermite_clamp_pair(length):
    """h0, h1 vanishing at both ends with h0'(0) = 1, h1'(length) = 1 and the
    other end slopes zero."""
    u = Polynomial([0.0, 1.0 / length])
    s = Polynomial([0.0, 1.0])
    h0 = s * (1 - u) ** 2
    h1 = -(length - s) * u**2
    return Poly(h0), Poly(h1)


def clamp(profile: Profile, length) -> Profile:
    """Subtract the Hermite correction that zeroes both end slopes.

    The profile must already vanish at both ends.
    """
    d = profile(np.array([0.0, length]), 1)[1]
    h0, h1 = hermite_clamp_pair(length)
    return Sum([profile, Scaled(h0, -d[0]), Scaled(h1, -d[1])])


def c2_norm(profile: Profile, s) -> float:
    """sup|u| + sup|u'| + sup|u''| on the sample grid."""
    v = profile(s, 2)
    return float(np.sum(np.max(np.abs(v), axis=1)))


def w22_norm_sq(profile: Profile, s) -> float:
    v = profile(s, 2)
    return float(simpson(np.sum(v**2, axis=0), x=s))
