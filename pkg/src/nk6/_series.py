"""Truncated multivariate Taylor arithmetic used to build exact chart jets.

A `Jet3` is a Taylor polynomial in the three chart variables, truncated at a
total degree, whose coefficients may be numpy arrays so that a single object
carries expansions around a whole batch of chart points at once.  Built-in
immersions are polynomials in trigonometric chart functions, so sums and
products of these objects reproduce every mixed partial derivative exactly
(up to float roundoff), with no differencing error.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

NVARS = 3


@lru_cache(maxsize=None)
def multi_indices(order: int) -> tuple[tuple[int, int, int], ...]:
    """Exponent tuples of total degree <= order, graded lexicographic."""
    out = []
    for total in range(order + 1):
        for i in range(total, -1, -1):
            for j in range(total - i, -1, -1):
                out.append((i, j, total - i - j))
    return tuple(out)


def _factorial_weight(alpha):
    w = 1
    for a in alpha:
        w *= math.factorial(a)
    return w


class Jet3:
    """Taylor polynomial in 3 variables truncated at `order` total degree."""

    __slots__ = ("order", "coef")

    def __init__(self, order: int, coef: dict):
        self.order = order
        self.coef = coef

    @classmethod
    def constant(cls, value, order: int) -> "Jet3":
        return cls(order, {(0, 0, 0): value})

    def __neg__(self):
        return Jet3(self.order, {a: -v for a, v in self.coef.items()})

    def __add__(self, other):
        if not isinstance(other, Jet3):
            coef = dict(self.coef)
            coef[(0, 0, 0)] = coef.get((0, 0, 0), 0.0) + other
            return Jet3(self.order, coef)
        coef = dict(self.coef)
        for a, v in other.coef.items():
            coef[a] = coef[a] + v if a in coef else v
        return Jet3(self.order, coef)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet3) else -np.asarray(other))

    def __mul__(self, other):
        if not isinstance(other, Jet3):
            return Jet3(self.order, {a: v * other for a, v in self.coef.items()})
        order = self.order
        coef: dict = {}
        for a, va in self.coef.items():
            ta = a[0] + a[1] + a[2]
            for b, vb in other.coef.items():
                if ta + b[0] + b[1] + b[2] > order:
                    continue
                c = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
                prod = va * vb
                coef[c] = coef[c] + prod if c in coef else prod
        return Jet3(order, coef)

    __rmul__ = __mul__

    def partial(self, alpha, batch_shape=()):
        """Mixed partial d^alpha at the expansion point (coefficient times factorials)."""
        if alpha not in self.coef:
            return np.zeros(batch_shape)
        return np.asarray(self.coef[alpha]) * float(_factorial_weight(alpha))


def trig_jets(angle, axis: int, order: int) -> tuple[Jet3, Jet3]:
    """Jets of cos and sin of (angle + t) where t is chart variable `axis`.

    `angle` may be a scalar or an ndarray of expansion points.
    """
    c, s = np.cos(angle), np.sin(angle)
    cycle_cos = (c, -s, -c, s)
    cycle_sin = (s, c, -s, -c)
    cos_coef, sin_coef = {}, {}
    for n in range(order + 1):
        alpha = tuple(n if a == axis else 0 for a in range(NVARS))
        w = 1.0 / math.factorial(n)
        cos_coef[alpha] = cycle_cos[n % 4] * w
        sin_coef[alpha] = cycle_sin[n % 4] * w
    return Jet3(order, cos_coef), Jet3(order, sin_coef)
