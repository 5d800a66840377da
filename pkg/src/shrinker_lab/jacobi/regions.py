"""Stability of symmetric regions via the sign of Jacobi functions.

A region is stable when it carries a positive Jacobi function.  For the regions
handled here the question reduces to a second-order ODE on an interval
``(lo, hi)`` with a fundamental pair ``(g1, g2)`` whose Wronskian is positive.
Sturm theory then gives an exact test: the region is stable iff the solution
``y = g2(lo) g1 - g1(lo) g2`` vanishing at ``lo`` has no zero inside ``(lo, hi)``.
Between two zeros of ``y`` there is a zero of ``g1``, so it suffices to look at
``y`` on the roots of ``g1``, at ``hi`` and, for ``hi = inf``, at its sign at
infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..config import DEFAULT_CONFIG, QuadratureConfig
from ..errors import DomainError, RegionDescriptorError
from ..spectrum import ShrinkerSpec
from .series import F1Series
from .solutions import UPPER, build_f2, build_g2, build_plane_f2, find_r1, first_solution


class Stability(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


ROOT_SNAP = 1e-12
SUBDOMINANT_TOL = 1e-9

KINDS = ("half_space", "slab", "annulus", "exterior", "ball")


@dataclass(frozen=True)
class Region:
    """Closed enumeration of supported regions.

    * ``half_space``: ``{x_n > a}`` (``side="below"`` gives ``{x_n < a}``)
    * ``slab``: ``{a < x_n < b}``
    * ``annulus``: ``{a < |x| < b}``, ``exterior``: ``{|x| > a}``, ``ball``: ``{|x| < a}``

    ``x`` is the Euclidean coordinate vector on ``R^(n-k)`` and ``x_n`` one of its
    coordinates.
    """

    kind: str
    a: float
    b: float | None = None
    side: str = "above"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise RegionDescriptorError(f"unsupported region family {self.kind!r}", kind=self.kind)
        if not math.isfinite(self.a):
            raise RegionDescriptorError("region bound must be finite", a=self.a)
        if self.kind in ("slab", "annulus"):
            if self.b is None or not self.b > self.a:
                raise RegionDescriptorError("need a < b", kind=self.kind, a=self.a, b=self.b)
        if self.kind in ("annulus", "exterior") and self.a < 0:
            raise RegionDescriptorError("radial bounds must be nonnegative", a=self.a)
        if self.kind == "ball" and self.a <= 0:
            raise RegionDescriptorError("ball radius must be positive", a=self.a)
        if self.side not in ("above", "below"):
            raise RegionDescriptorError("side must be 'above' or 'below'", side=self.side)

    @classmethod
    def half_space(cls, a: float, side: str = "above") -> Region:
        return cls("half_space", float(a), None, side)

    @classmethod
    def slab(cls, a: float, b: float) -> Region:
        return cls("slab", float(a), float(b))

    @classmethod
    def annulus(cls, a: float, b: float) -> Region:
        return cls("annulus", float(a), float(b))

    @classmethod
    def exterior(cls, a: float) -> Region:
        return cls("exterior", float(a))

    @classmethod
    def ball(cls, a: float) -> Region:
        return cls("ball", float(a))


class _Pair:
    """A fundamental pair on one side of the ODE with ``W(g1, g2) > 0``."""

    def __init__(self, g1, g2, g1_roots, sign_at_infinity, dim=1):
        self.g1 = g1
        self.g2 = g2
        self.g1_roots = tuple(g1_roots)
        self._sign_at_infinity = sign_at_infinity
        self.dim = dim

    def wronskian(self, x: float) -> float:
        """``g1 g2' - g1' g2 = exp(x^2/4) x^(1-d)`` for every pair built here."""
        return math.exp(x * x / 4.0) * (abs(x) ** (1 - self.dim) if self.dim != 1 else 1.0)

    def g1_at(self, lo: float) -> float:
        """``g1(lo)``, snapped to 0 when ``lo`` is a root up to rounding."""
        for r in self.g1_roots:
            if abs(lo - r) <= ROOT_SNAP * max(1.0, abs(r)):
                return 0.0
        return float(self.g1(lo))

    def y(self, lo: float, x):
        x = np.asarray(x, dtype=float)
        return float(self.g2(lo)) * self.g1(x) - self.g1_at(lo) * self.g2(x)

    def sign_at_infinity(self, lo: float) -> float:
        return self._sign_at_infinity(self.g1_at(lo), float(self.g2(lo)))


def _axis_pair(config: QuadratureConfig) -> _Pair:
    g2 = build_g2(config)
    g1 = first_solution("axis", 1)
    s = math.sqrt(2.0)

    def sign_inf(c: float, d: float) -> float:
        # g2/g1 -> +inf, so y/g1 = d - c g2/g1 is dominated by -c unless c = 0
        return -math.copysign(1.0, c) if c != 0.0 else math.copysign(1.0, d)

    return _Pair(lambda x: g1(x), g2.value, (-s, s), sign_inf)


def _line_pair() -> _Pair:
    # on a flat factor, functions of one coordinate solve g'' - (x/2) g' + g/2 = 0;
    # x and the n = 1 series are a fundamental pair with Wronskian exp(x^2/4)
    f = F1Series(1)

    def sign_inf(c: float, d: float) -> float:
        # y = d x - c f(x) and f grows like exp(x^2/4)
        return -math.copysign(1.0, c) if c != 0.0 else math.copysign(1.0, d)

    return _Pair(lambda x: np.asarray(x, dtype=float), f.value, (0.0,), sign_inf)


def _annular_pair(lam: int, config: QuadratureConfig) -> _Pair:
    f2 = build_f2(lam, config)
    g1 = first_solution("annular", lam)

    def sign_inf(c: float, d: float) -> float:
        return -math.copysign(1.0, c) if c != 0.0 else math.copysign(1.0, d)

    return _Pair(lambda x: g1(x), f2.value, (math.sqrt(2.0 * lam),), sign_inf, dim=lam)


def _plane_pair(n: int, config: QuadratureConfig) -> _Pair:
    f2 = build_plane_f2(n, config)
    g1 = first_solution("plane", n)
    # f1 grows like exp(r^2/4), so g2/g1 has a finite limit; the remaining tail of
    # the integral beyond UPPER is below exp(-UPPER^2/4)
    v_inf = float(f2.reduction.ratio(UPPER))

    def sign_inf(c: float, d: float) -> float:
        # a vanishing limit means y is the subdominant solution, which keeps its sign
        value = d - c * v_inf
        if abs(value) <= SUBDOMINANT_TOL * (abs(d) + abs(c * v_inf)):
            return 0.0
        return math.copysign(1.0, value)

    return _Pair(lambda x: g1(x), f2.value, (find_r1(n),), sign_inf, dim=n)


def _interval_stable(pair: _Pair, lo: float, hi: float, tol: float) -> bool:
    """True iff ``y_lo`` has no zero in the open interval ``(lo, hi)``."""
    checks = [r for r in pair.g1_roots if lo < r < hi]
    if math.isfinite(hi):
        checks.append(hi)
    # y_lo leaves lo with slope -W(lo); a zero at hi itself is allowed
    w = pair.wronskian(lo)
    for x in checks:
        if pair.y(lo, x) > tol * w * max(1.0, x - lo):
            return False
    if math.isinf(hi) and pair.sign_at_infinity(lo) > 0:
        return False
    return True


def _ball_stable(pair: _Pair, hi: float, tol: float) -> bool:
    """Regular solution ``g1`` must not vanish inside ``(0, hi)``."""
    roots = [r for r in pair.g1_roots if 0.0 < r]
    return all(r >= hi * (1.0 - tol) for r in roots)


def _oriented(region: Region) -> list[tuple[float, float]]:
    """Map a coordinate region to intervals of a line, reflected to point upward."""
    if region.kind == "half_space":
        return [(region.a, math.inf)] if region.side == "above" else [(-region.a, math.inf)]
    if region.kind == "slab":
        return [(region.a, region.b)]
    # radial families on a one-dimensional factor: |x_n| regions
    if region.kind == "ball":
        return [(-region.a, region.a)]
    if region.kind == "exterior":
        return [(region.a, math.inf)]
    return [(region.a, region.b)]


def classify_region(
    spec: ShrinkerSpec,
    region: Region,
    config: QuadratureConfig = DEFAULT_CONFIG,
    tol: float = 1e-9,
) -> Stability:
    """Decide stability of ``region`` on the shrinker ``spec``.

    Regions described by one Euclidean coordinate use the ODE for functions of
    that coordinate alone.  Radial regions use the radial ODE; a region containing
    the origin only admits the solution regular there.
    """
    if spec.k == spec.n:
        raise RegionDescriptorError("the round sphere has no Euclidean factor", n=spec.n, k=spec.k)
    one_dim = region.kind in ("half_space", "slab") or spec.euclidean_dim == 1

    if one_dim:
        pair = _line_pair() if spec.k == 0 else _axis_pair(config)
        for lo, hi in _oriented(region):
            if not _interval_stable(pair, lo, hi, tol):
                return Stability.UNSTABLE
        return Stability.STABLE

    if spec.k == 0:
        pair = _plane_pair(spec.n, config)
    else:
        pair = _annular_pair(spec.euclidean_dim, config)

    lo = 0.0 if region.kind == "ball" else region.a
    hi = math.inf if region.kind == "exterior" else (region.a if region.kind == "ball" else region.b)
    if math.isfinite(hi) and hi > UPPER:
        raise DomainError("radial bound beyond the tabulated range", bound=hi, upper=UPPER)
    if lo == 0.0:
        return Stability.STABLE if _ball_stable(pair, hi, tol) else Stability.UNSTABLE
    return Stability.STABLE if _interval_stable(pair, lo, hi, tol) else Stability.UNSTABLE
