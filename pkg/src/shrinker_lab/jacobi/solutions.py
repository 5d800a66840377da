"""Radial solutions of ``L f = 0`` on generalized cylinders and critical radii.

Three cases depending on the Euclidean factor ``R^(n-k)``:

* axis (``k = n - 1``): ``g'' - (x/2) g' + g = 0`` with ``g1 = x^2 - 2``;
* annular (``1 <= k <= n - 2``, ``lam = n - k``):
  ``f'' + ((lam - 1)/r - r/2) f' + f = 0`` with ``g1 = r^2 - 2 lam``;
* plane (``k = 0``): ``f'' + ((n - 1)/r - r/2) f' + f/2 = 0`` with the power
  series ``f1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..config import DEFAULT_CONFIG, QuadratureConfig
from ..errors import DomainError, ToleranceError
from .reduction import ReducedSecondSolution
from .series import F1Series

UPPER = 16.0
LOWER = 1e-8


class QuadraticSolution:
    """``x^2 - c``, the polynomial Jacobi function of the axis and annular cases."""

    def __init__(self, c: float) -> None:
        self.c = float(c)

    def __call__(self, x, deriv: int = 0):
        x = np.asarray(x, dtype=float)
        if deriv == 0:
            return x * x - self.c
        if deriv == 1:
            return 2.0 * x
        if deriv == 2:
            return np.full_like(x, 2.0)
        return np.zeros_like(x)


@dataclass(frozen=True)
class SingularPoint:
    location: float
    limit: float


@dataclass
class PiecewiseRadialSolution:
    """One radial solution with the data describing how it is assembled.

    ``kind`` is ``"g2"`` (axis), ``"f2"`` (annular), ``"f1"`` (plane series) or
    ``"plane_f2"`` (plane, second solution).  ``parameter`` is ``lam`` for the
    annular case and ``n`` for the plane case.
    """

    case: str
    kind: str
    parameter: int
    singular_points: tuple[SingularPoint, ...] = ()
    matching_constant: float | None = None
    anchors: tuple[float, ...] = ()
    coefficients: tuple[Fraction, ...] = ()
    odd: bool = False
    _impl: object = field(default=None, repr=False)

    @property
    def domain(self) -> tuple[float, float]:
        if self.kind == "f1":
            return (-math.inf, math.inf)
        if self.odd:
            return (-UPPER, UPPER)
        return (LOWER, UPPER)

    @property
    def dim(self) -> int:
        """Exponent ``d`` in the radial weight ``r^(d-1)``."""
        return 1 if self.case == "axis" else self.parameter

    @property
    def potential(self) -> float:
        return 0.5 if self.case == "plane" else 1.0

    def value(self, x):
        if self.kind == "f1":
            return self._impl.value(x)
        if not self.odd:
            return self._impl.value(x)
        xs = np.asarray(x, dtype=float)
        out = np.sign(xs) * self._impl.value(np.abs(xs))
        return float(out) if np.ndim(x) == 0 else out

    def derivative(self, x):
        if self.kind == "f1":
            return self._impl.value(x, 1)
        if not self.odd:
            return self._impl.derivative(x)
        xs = np.asarray(x, dtype=float)
        out = self._impl.derivative(np.abs(xs))
        return float(out) if np.ndim(x) == 0 else out

    __call__ = value

    @property
    def reduction(self) -> ReducedSecondSolution:
        if not isinstance(self._impl, ReducedSecondSolution):
            raise DomainError("the series solution has no reduction-of-order data")
        return self._impl

    def drift(self, x):
        """Coefficient of ``f'`` in the ODE."""
        x = np.asarray(x, dtype=float)
        if self.case == "axis":
            return -x / 2.0
        return (self.dim - 1) / x - x / 2.0


def ode_residual(
    solution: PiecewiseRadialSolution, x, h: float | None = None, scaled: bool = False
):
    """Finite-difference residual ``f'' + p f' + c f`` using a 5-point stencil.

    The stencil is fourth order.  By default the step shrinks where the
    ``exp(x^2/4)`` growth makes high derivatives large, and near ``r = 0`` for the
    radial cases.  With ``scaled=True`` the residual is divided by
    ``|f''| + |p f'| + |c f|``, which is the meaningful measure where the solution
    itself blows up.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if h is None:
        hs = 1.5e-2 / (1.0 + xs * xs / 4.0)
    else:
        hs = np.full_like(xs, h)
    if solution.domain[0] > 0:
        hs = np.minimum(hs, xs / 400.0)
    out = np.empty_like(xs)
    for i, (xv, hv) in enumerate(zip(xs, hs)):
        pts = xv + hv * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        f = np.asarray(solution.value(pts), dtype=float)
        d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * hv)
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * hv * hv)
        p1 = float(solution.drift(xv)) * d1
        c0 = solution.potential * f[2]
        out[i] = d2 + p1 + c0
        if scaled:
            out[i] /= max(abs(d2) + abs(p1) + abs(c0), 1e-300)
    return float(out[0]) if np.ndim(x) == 0 else out


def series_ode_residual(solution: PiecewiseRadialSolution, r):
    """Residual of the plane ODE for ``f1`` using term-wise series derivatives."""
    if solution.kind != "f1":
        raise DomainError("series residual applies to the f1 solution only")
    r = np.asarray(r, dtype=float)
    s = solution._impl
    return s.value(r, 2) + solution.drift(r) * s.value(r, 1) + 0.5 * s.value(r, 0)


# -- builders ------------------------------------------------------------------


@lru_cache(maxsize=8)
def build_g2(config: QuadratureConfig = DEFAULT_CONFIG) -> PiecewiseRadialSolution:
    """Odd second solution of the axis equation."""
    s = math.sqrt(2.0)
    impl = ReducedSecondSolution(
        QuadraticSolution(2.0), [2 * s, 1.0], True, s, 1, 0.0, 2.0, 0.0, UPPER, config
    )
    limit = impl.singular_value
    return PiecewiseRadialSolution(
        case="axis",
        kind="g2",
        parameter=1,
        singular_points=(SingularPoint(-s, -limit), SingularPoint(s, limit)),
        matching_constant=impl.matching_constant,
        anchors=(0.0, 2.0),
        odd=True,
        _impl=impl,
    )


@lru_cache(maxsize=16)
def build_f2(lam: int, config: QuadratureConfig = DEFAULT_CONFIG) -> PiecewiseRadialSolution:
    """Second solution of the annular equation, defined for ``r > 0``."""
    if int(lam) != lam or lam < 2:
        raise DomainError("lambda = n - k must be an integer >= 2", lam=lam)
    s = math.sqrt(2.0 * lam)
    impl = ReducedSecondSolution(
        QuadraticSolution(2.0 * lam), [2 * s, 1.0], True, s, lam, 1.0, 2 * s, LOWER, UPPER, config
    )
    return PiecewiseRadialSolution(
        case="annular",
        kind="f2",
        parameter=int(lam),
        singular_points=(SingularPoint(s, impl.singular_value),),
        matching_constant=impl.matching_constant,
        anchors=(1.0, 2 * s),
        _impl=impl,
    )


@lru_cache(maxsize=16)
def build_f1_series(n: int, truncation: int = 200) -> PiecewiseRadialSolution:
    """Entire even solution ``f1`` of the plane equation."""
    if int(n) != n or n < 2:
        raise DomainError("n must be an integer >= 2", n=n)
    series = F1Series(n, truncation)
    return PiecewiseRadialSolution(
        case="plane",
        kind="f1",
        parameter=int(n),
        coefficients=series.coefficients,
        _impl=series,
    )


@lru_cache(maxsize=16)
def build_plane_f2(n: int, config: QuadratureConfig = DEFAULT_CONFIG) -> PiecewiseRadialSolution:
    """Second solution of the plane equation, singular at ``r = 0``."""
    f1 = build_f1_series(n)._impl
    r1 = find_r1(n)
    taylor = f1.taylor_at(r1, 40)
    impl = ReducedSecondSolution(
        lambda x, deriv=0: f1.value(x, deriv),
        taylor[1:],
        False,
        r1,
        n,
        r1 / 2.0,
        2.0 * r1,
        LOWER,
        UPPER,
        config,
    )
    return PiecewiseRadialSolution(
        case="plane",
        kind="plane_f2",
        parameter=int(n),
        singular_points=(SingularPoint(r1, impl.singular_value),),
        matching_constant=impl.matching_constant,
        anchors=(r1 / 2.0, 2.0 * r1),
        _impl=impl,
    )


def first_solution(case: str, parameter: int):
    """The solution regular at the origin for each case."""
    if case == "axis":
        return QuadraticSolution(2.0)
    if case == "annular":
        return QuadraticSolution(2.0 * parameter)
    f1 = build_f1_series(parameter)._impl
    return lambda x, deriv=0: f1.value(x, deriv)


# -- critical radii ------------------------------------------------------------


@lru_cache(maxsize=32)
def find_r1(n: int) -> float:
    """Unique positive root of ``f1`` by bisection on ``(0, 2 sqrt(n)]`` plus Newton."""
    f1 = build_f1_series(n)._impl
    lo, hi = 0.0, 2.0 * math.sqrt(n)
    if not (f1(lo) < 0.0 < f1(hi)):
        raise ToleranceError("f1 does not change sign on (0, 2 sqrt(n)]", n=n)
    while hi - lo > 1e-13 * hi:
        mid = 0.5 * (lo + hi)
        if f1(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    r -= f1(r) / f1.value(r, 1)
    if abs(f1(r)) > 1e-12:
        raise ToleranceError("Newton polish left a large residual", n=n, residual=f1(r))
    return r


def r1_approximations(n: int) -> tuple[float, float]:
    """Roots of the second- and fourth-order partial sums of ``f1``."""
    if n < 2:
        raise DomainError("n must be >= 2", n=n)
    second = 2.0 * math.sqrt(n)
    fourth = 2.0 * math.sqrt((n + 2) * (math.sqrt((3 * n + 2) / (n + 2)) - 1.0))
    return second, fourth


def g2_sign_changes(upper: float = 10.0, step: float = 0.05, config=DEFAULT_CONFIG) -> list[float]:
    """All roots of ``g2`` on ``(sqrt 2, upper]`` detected on a grid and refined."""
    from scipy.optimize import brentq

    g2 = build_g2(config)
    s = math.sqrt(2.0)
    grid = np.linspace(s, upper, int(math.ceil((upper - s) / step)) + 1)[1:]
    vals = g2.value(grid)
    roots = []
    left, fleft = s, g2.singular_points[1].limit
    for x, fx in zip(grid, vals):
        if fleft == 0.0:
            roots.append(left)
        elif fx != 0.0 and (fx > 0) != (fleft > 0):
            roots.append(brentq(lambda t: float(g2.value(t)), left, x, xtol=1e-14, rtol=1e-15))
        left, fleft = x, fx
    return roots


def find_r0(config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Smallest positive root of ``g2``; it lies in ``(sqrt 2, 5]``."""
    roots = [r for r in g2_sign_changes(5.0, config=config) if r <= 5.0]
    if not roots:
        raise ToleranceError("g2 has no sign change on (sqrt 2, 5]")
    return roots[0]
