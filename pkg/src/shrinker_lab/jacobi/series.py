"""Power-series solution ``f1`` of the radial equation on the flat hyperplane.

``f1`` solves ``f'' + ((n-1)/r - r/2) f' + f/2 = 0`` with ``f1(0) = -1``.  Only even
powers appear; writing ``f1 = sum a_{2m} r^{2m}`` the coefficients are positive
for ``m >= 1`` and decay roughly like ``1/(8^m m!)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..errors import DomainError, InsufficientTruncationError, ToleranceError

SERIES_RTOL = 1e-12


@lru_cache(maxsize=None)
def series_coefficients(n: int, truncation: int) -> tuple[Fraction, ...]:
    """Exact ``a_0, a_2, ..., a_{2 truncation}`` from the ODE recurrence.

    Substituting ``sum c_j r^j`` gives ``c_2 = -c_0/(4n)`` and
    ``c_{j+1} = (j - 2) c_{j-1} / (2 (j + 1)(n + j - 1))``.
    """
    if n < 1:
        raise DomainError("n must be >= 1", n=n)
    if truncation < 2:
        raise DomainError("truncation must be >= 2", truncation=truncation)
    c = {0: Fraction(-1), 1: Fraction(0)}
    c[2] = -c[0] / (4 * n)
    for j in range(2, 2 * truncation):
        c[j + 1] = Fraction(j - 2) * c[j - 1] / (2 * (j + 1) * (n + j - 1))
    return tuple(c[2 * m] for m in range(truncation + 1))


def closed_form_coefficient(n: int, m: int) -> Fraction:
    """``a_{2m} = m (2m-2)! / (2^{3m-1} (m!)^2 prod_{j<m} (n + 2j))`` for ``m >= 1``."""
    if m == 0:
        return Fraction(-1)
    denom = 2 ** (3 * m - 1) * math.factorial(m) ** 2 * math.prod(n + 2 * j for j in range(m))
    return Fraction(m * math.factorial(2 * m - 2), denom)


def growth_ratio(n: int, m: int) -> Fraction:
    """Exact ``a_{2m} / b_{2m}`` where ``b_{2m} = 1/(2^{3m} m!)`` are the Taylor
    coefficients of ``exp(r^2/8)``."""
    if n < 2 or m < 1:
        raise DomainError("growth_ratio needs n >= 2 and m >= 1", n=n, m=m)
    num = 2 * m * math.factorial(2 * m - 2)
    den = math.factorial(m) * math.prod(n + 2 * j for j in range(m))
    return Fraction(num, den)


class F1Series:
    """Evaluator for ``f1`` and its first two derivatives.

    Terms are generated with the float ratio ``a_{2m+2}/a_{2m}`` and summed with
    :func:`math.fsum`.  Summation stops once a geometric majorant of the tail falls
    below ``SERIES_RTOL`` times the sum of absolute values of the terms.
    """

    def __init__(self, n: int, truncation: int = 200) -> None:
        self.n = int(n)
        self.truncation = int(truncation)
        self.coefficients = series_coefficients(self.n, self.truncation)
        for m in range(1, min(10, self.truncation) + 1):
            if self.coefficients[m] != closed_form_coefficient(self.n, m):
                raise ToleranceError(
                    "recurrence and closed-form coefficients disagree", n=self.n, m=m
                )

    def _ratio(self, m: int) -> float:
        # a_{2m+2} / a_{2m}
        return (2 * m - 1) / (4.0 * (m + 1) * (self.n + 2 * m))

    def value(self, r, deriv: int = 0):
        """``f1``, ``f1'`` or ``f1''`` at ``r`` (scalar or array)."""
        if deriv not in (0, 1, 2):
            raise DomainError("deriv must be 0, 1 or 2", deriv=deriv)
        scalar = np.ndim(r) == 0
        x = np.atleast_1d(np.asarray(r, dtype=float))
        x2 = x * x
        a2 = 1.0 / (4.0 * self.n)
        if deriv == 0:
            first = np.full_like(x, -1.0)
            term = a2 * x2
        elif deriv == 1:
            first = np.zeros_like(x)
            term = 2.0 * a2 * x
        else:
            first = np.zeros_like(x)
            term = np.full_like(x, 2.0 * a2)
        terms = [first]
        scale = np.abs(first) + 1.0
        for m in range(1, self.truncation + 1):
            terms.append(term)
            scale = scale + np.abs(term)
            step = self._ratio(m) * x2 * self._factor(m, deriv)
            nxt = term * step
            # terms beyond m shrink at least geometrically with ratio q once q < 1
            q = x2 / (4.0 * (m + 1)) * ((2 * m + 4) / (2 * m + 1)) ** deriv
            if np.all(q < 1.0):
                tail = np.abs(nxt) / (1.0 - q)
                if np.all(tail <= SERIES_RTOL * 1e-4 * scale):
                    total = np.array([math.fsum(col) for col in np.stack(terms, axis=1)])
                    return float(total[0]) if scalar else total.reshape(np.shape(r))
            term = nxt
        raise InsufficientTruncationError(
            "series truncation too short for this radius",
            radius=float(np.max(np.abs(x))),
            truncation=self.truncation,
        )

    __call__ = value

    @staticmethod
    def _factor(m: int, deriv: int) -> float:
        # extra ratio picked up by differentiating r^{2m} deriv times
        if deriv == 0:
            return 1.0
        if deriv == 1:
            return (m + 1) / m
        return (m + 1) * (2 * m + 1) / (m * (2 * m - 1))

    def taylor_at(self, center: float, order: int) -> np.ndarray:
        """Taylor coefficients ``f1^{(j)}(center)/j!`` for ``j = 0..order``."""
        a = [float(c) for c in self.coefficients]
        out = np.zeros(order + 1)
        for j in range(order + 1):
            terms = [
                a[m] * math.comb(2 * m, j) * center ** (2 * m - j)
                for m in range((j + 1) // 2, len(a))
            ]
            out[j] = math.fsum(terms)
        return out
