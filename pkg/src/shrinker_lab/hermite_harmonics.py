"""Hermite polynomials at half argument and harmonic polynomial counts.

The eigenfunctions of the stability operator on the Euclidean factor are the
physicists' Hermite polynomials evaluated at ``x/2``.  Rescaled this way they are
monic in ``x`` with integer coefficients, which keeps everything exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import DegreeCapError, DomainError

DEGREE_CAP = 64


@dataclass(frozen=True)
class HermitePoly:
    """``H_k(x/2)`` stored as integer coefficients, lowest degree first."""

    degree: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.degree + 1:
            raise ValueError("coefficient count must be degree + 1")

    def __call__(self, x):
        return hermite_eval(self, x)

    def __str__(self) -> str:
        terms = []
        for power in range(self.degree, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            mono = "" if power == 0 else ("x" if power == 1 else f"x^{power}")
            mag = abs(c)
            body = mono if (mag == 1 and mono) else f"{mag}{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


@lru_cache(maxsize=None)
def _coeff_table(k: int) -> tuple[int, ...]:
    if k == 0:
        return (1,)
    if k == 1:
        return (0, 1)
    prev = _coeff_table(k - 2)
    cur = _coeff_table(k - 1)
    # H_{k}(x/2) = x H_{k-1}(x/2) - 2(k-1) H_{k-2}(x/2)
    out = [0] * (k + 1)
    for i, c in enumerate(cur):
        out[i + 1] += c
    for i, c in enumerate(prev):
        out[i] -= 2 * (k - 1) * c
    return tuple(out)


def hermite_half(k: int, cap: int = DEGREE_CAP) -> HermitePoly:
    """Exact coefficients of ``H_k(x/2)`` in powers of ``x``.

    Examples
    --------
    >>> str(hermite_half(3))
    'x^3 - 6x'
    """
    if k < 0 or int(k) != k:
        raise DomainError("degree must be a nonnegative integer", degree=k)
    if k > cap:
        raise DegreeCapError(f"degree {k} exceeds cap {cap}", degree=k, cap=cap)
    return HermitePoly(int(k), _coeff_table(int(k)))


def _exact_scalar(p: HermitePoly, x: float) -> float:
    xq = Fraction(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * xq + c
    return float(acc)


def hermite_eval(p: HermitePoly, x):
    """Evaluate ``H_k(x/2)``.

    Scalars are evaluated in exact rational arithmetic and rounded once, so the
    result is correctly rounded.  Arrays use the three-term recurrence in floating
    point, which is backward stable and much faster.
    """
    if np.ndim(x) == 0:
        return _exact_scalar(p, float(x))
    xs = np.asarray(x, dtype=float)
    if p.degree == 0:
        return np.ones_like(xs)
    h_prev = np.ones_like(xs)
    h = xs.copy()
    for j in range(1, p.degree):
        h_prev, h = h, xs * h - 2.0 * j * h_prev
    return h


def harmonic_dim(k: int, m: int) -> int:
    """Dimension of degree-``m`` harmonic homogeneous polynomials in ``k + 1`` variables.

    These restrict to the spherical harmonics of degree ``m`` on ``S^k``.
    """
    if k < 1:
        raise DomainError("harmonic_dim needs a sphere factor (k >= 1)", k=k)
    if m < 0:
        raise DomainError("degree must be nonnegative", m=m)
    if m < 2:
        return 1 if m == 0 else k + 1
    return comb(k + m, k) - comb(k + m - 2, k)
