"""Spectrum and index of the stability operator on S^k(sqrt(2k)) x R^(n-k).

Sign convention: an eigenfunction satisfies ``L u = -lambda u``, so the mean
curvature (``L H = H``) sits at ``lambda = -1`` and the index counts negative
``lambda`` with multiplicity.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import qmc

from .errors import ChartError, DomainError, GeneratorNotConstructibleError
from .hermite_harmonics import harmonic_dim, hermite_eval, hermite_half

Generator = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class ShrinkerSpec:
    """The generalized cylinder S^k x R^(n-k); ``k = 0`` is the hyperplane."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be an integer >= 1", n=self.n)
        if int(self.k) != self.k or not 0 <= self.k <= self.n:
            raise DomainError("k must be an integer with 0 <= k <= n", n=self.n, k=self.k)

    @property
    def radius(self) -> float:
        """Radius of the sphere factor (0 for the hyperplane)."""
        return math.sqrt(2 * self.k)

    @property
    def euclidean_dim(self) -> int:
        return self.n - self.k

    @property
    def case(self) -> str:
        if self.k == 0:
            return "plane"
        if self.k == self.n:
            return "sphere"
        if self.k == self.n - 1:
            return "axis"
        return "annular"

    @property
    def potential(self) -> Fraction:
        """Constant term |A|^2 + 1/2 of the operator."""
        return Fraction(1) if self.k >= 1 else Fraction(1, 2)


@dataclass(frozen=True)
class EigenvalueRecord:
    value: Fraction
    multiplicity: int
    generators: tuple[Generator, ...] = field(default=())


def eigenvalue_of(spec: ShrinkerSpec, generator: Generator) -> Fraction:
    """Exact eigenvalue produced by one (spherical degree, Hermite degrees) pair."""
    m, degrees = generator
    half_sum = Fraction(sum(degrees), 2)
    if spec.k == 0:
        return Fraction(-1, 2) + half_sum
    return Fraction(-1) + Fraction(m * (m + spec.k - 1), 2 * spec.k) + half_sum


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _as_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError("ceiling must be finite", ceiling=x)
    return Fraction(x)


def enumerate_spectrum(spec: ShrinkerSpec, ceiling) -> list[EigenvalueRecord]:
    """All eigenvalues ``<= ceiling`` with aggregated multiplicities.

    ``ceiling`` may be an int, :class:`~fractions.Fraction`, float or a string such
    as ``"1/2"``.  The spherical part ``m(m+k-1)/(2k)`` is nondecreasing in ``m``
    and the Hermite part is nonnegative, so the enumeration below is complete.
    """
    top = _as_fraction(ceiling)
    d = spec.euclidean_dim
    buckets: dict[Fraction, list] = {}

    def add(m: int, weight: int, base: Fraction) -> None:
        budget = top - base
        if budget < 0:
            return
        for s in range(0, math.floor(2 * budget) + 1):
            value = base + Fraction(s, 2)
            entry = buckets.setdefault(value, [0, []])
            for degrees in _compositions(s, d):
                entry[0] += weight
                entry[1].append((m, degrees))

    if spec.k == 0:
        add(0, 1, Fraction(-1, 2))
    else:
        m = 0
        while True:
            base = Fraction(-1) + Fraction(m * (m + spec.k - 1), 2 * spec.k)
            if base > top:
                break
            add(m, harmonic_dim(spec.k, m), base)
            m += 1

    return [
        EigenvalueRecord(value, mult, tuple(gens))
        for value, (mult, gens) in sorted(buckets.items())
        if mult > 0
    ]


def stability_index(spec: ShrinkerSpec) -> int:
    """Number of negative eigenvalues counted with multiplicity."""
    return sum(r.multiplicity for r in enumerate_spectrum(spec, 0) if r.value < 0)


# -- finite differences -------------------------------------------------------

Field = Callable[[np.ndarray], float]


def _sphere_laplacian(f: Field, p: np.ndarray, k: int, h: float) -> float:
    """Laplacian on the unit S^k in hyperspherical angles (phi_1, ..., phi_k)."""
    if k == 1:
        e = np.zeros_like(p)
        e[0] = h
        return (f(p + e) - 2.0 * f(p) + f(p - e)) / h**2
    margin = 10.0 * h
    sines = np.sin(p[: k - 1])
    if np.any(np.abs(sines) < margin):
        raise ChartError(
            "point too close to a degenerate locus of the sphere chart",
            angles=[float(a) for a in p[:k]],
            margin=margin,
        )
    f0 = f(p)
    total = 0.0
    scale = 1.0
    for i in range(k):
        e = np.zeros_like(p)
        e[i] = h
        fp, fm = f(p + e), f(p - e)
        d2 = (fp - 2.0 * f0 + fm) / h**2
        d1 = (fp - fm) / (2.0 * h)
        # sqrt(g) = prod_j sin^{k-j}(phi_j), so d_i log sqrt(g) = (k - i - 1) cot(phi_i)
        drift = (k - i - 1) / math.tan(p[i]) if i < k - 1 else 0.0
        total += (d2 + drift * d1) / scale
        if i < k - 1:
            scale *= sines[i] ** 2
    return total


def _apply_L_once(spec: ShrinkerSpec, f: Field, p: np.ndarray, h: float) -> float:
    k = spec.k
    value = float(spec.potential) * f(p)
    if k >= 1:
        value += _sphere_laplacian(f, p, k, h) / spec.radius**2
    f0 = f(p)
    for i in range(k, spec.n):
        e = np.zeros_like(p)
        e[i] = h
        fp, fm = f(p + e), f(p - e)
        value += (fp - 2.0 * f0 + fm) / h**2 - 0.5 * p[i] * (fp - fm) / (2.0 * h)
    return float(value)


def apply_L(
    spec: ShrinkerSpec,
    f: Field,
    point: Sequence[float],
    h: float = 1e-3,
    richardson: bool = False,
) -> float:
    """Central-difference approximation of ``L f`` at ``point``.

    ``point`` lists the ``k`` sphere angles followed by the ``n - k`` Euclidean
    coordinates; ``f`` is called with arrays in the same layout.  With
    ``richardson=True`` the estimates at ``h`` and ``h/2`` are combined to cancel
    the leading ``O(h^2)`` term.
    """
    p = np.asarray(point, dtype=float)
    if p.shape != (spec.n,):
        raise DomainError("point must have n coordinates", n=spec.n, got=list(p.shape))
    coarse = _apply_L_once(spec, f, p, h)
    if not richardson:
        return coarse
    fine = _apply_L_once(spec, f, p, h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def _constructible(spec: ShrinkerSpec, generator: Generator) -> bool:
    m, _ = generator
    return spec.k <= 1 or m <= 1


def generator_field(spec: ShrinkerSpec, generator: Generator) -> Field:
    """Explicit eigenfunction for a generator, in ``apply_L`` coordinates."""
    if not _constructible(spec, generator):
        raise GeneratorNotConstructibleError(
            "spherical harmonics of degree >= 2 are only built for k = 1",
            k=spec.k,
            m=generator[0],
        )
    m, degrees = generator
    polys = [hermite_half(c) for c in degrees]
    k = spec.k

    def f(p: np.ndarray) -> float:
        if k == 0 or m == 0:
            g = 1.0
        elif k == 1:
            g = math.cos(m * p[0])
        else:
            g = math.cos(p[0])
        for poly, y in zip(polys, p[k:]):
            g *= hermite_eval(poly, float(y))
        return g

    return f


def sample_points(spec: ShrinkerSpec, count: int, half_width: float = 2.0) -> np.ndarray:
    """Deterministic Halton points in the parameter box used for residual checks."""
    if count < 1:
        raise DomainError("sample_count must be positive", sample_count=count)
    unit = qmc.Halton(d=spec.n, scramble=False).random(count + 1)[1:]
    lo = np.empty(spec.n)
    hi = np.empty(spec.n)
    for i in range(spec.n):
        if i < spec.k - 1:
            lo[i], hi[i] = 0.5, math.pi - 0.5
        elif i == spec.k - 1:
            lo[i], hi[i] = 0.0, 2.0 * math.pi
        else:
            lo[i], hi[i] = -half_width, half_width
    return lo + unit * (hi - lo)


def eigenfunction_residual(
    spec: ShrinkerSpec,
    record: EigenvalueRecord,
    sample_count: int = 100,
    h: float = 1e-3,
) -> float:
    """Max of ``|L f + lambda f|`` over Halton samples for one generator of ``record``."""
    usable = [g for g in record.generators if _constructible(spec, g)]
    if not usable:
        raise GeneratorNotConstructibleError(
            "record has no explicitly constructible generator",
            value=str(record.value),
            k=spec.k,
        )
    generator = min(usable, key=lambda g: (sum(g[1]), g[0]))
    f = generator_field(spec, generator)
    lam = float(record.value)
    worst = 0.0
    for p in sample_points(spec, sample_count):
        worst = max(worst, abs(apply_L(spec, f, p, h=h) + lam * f(p)))
    return worst
