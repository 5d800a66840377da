"""Shrinker residual, Gaussian density and the shrinking-sphere flow.

Throughout, the Gaussian density is written with an explicit centre and scale,

    F_{x0,t0}(S) = (4 pi t0)^(-n/2) int_S exp(-|x - x0|^2 / (4 t0)) dmu.

Huisken's monotone quantity along a flow ``M_t`` is the same integral with
``t0`` replaced by ``T - t`` for a fixed later time ``T``.  Written with
``t < 0`` and ``T = 0`` this is the familiar ``exp(|x|^2/(4t))`` kernel; the
shifted form is used everywhere here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.special import erfc

from .errors import DomainError, ToleranceError, TruncationError
from .spectrum import ShrinkerSpec

TAIL_LIMIT = 1e-10
BOX_HALF_WIDTH = 14.0


@lru_cache(maxsize=64)
def _legendre(count: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(count)


def _sphere_grid(k: int, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors and area weights on S^k in R^(k+1).

    Polar angles use Gauss-Legendre nodes on ``(0, pi)`` with the ``sin^j`` metric
    factor folded into the weights; the last angle uses the periodic trapezoid
    rule.
    """
    m = 2 * resolution
    az = 2.0 * math.pi * np.arange(m) / m
    w_az = np.full(m, 2.0 * math.pi / m)
    if k == 1:
        return np.stack([np.cos(az), np.sin(az)], axis=1), w_az

    nodes, weights = _legendre(resolution)
    theta = 0.5 * math.pi * (nodes + 1.0)
    w_theta = 0.5 * math.pi * weights

    dirs = np.stack([np.cos(az), np.sin(az)], axis=1)
    w = w_az
    # build S^j from S^(j-1) by prepending a polar angle
    for j in range(2, k + 1):
        s, c = np.sin(theta), np.cos(theta)
        new_dirs = np.concatenate(
            [
                np.repeat(c, len(dirs))[:, None],
                np.repeat(s, len(dirs))[:, None] * np.tile(dirs, (len(theta), 1)),
            ],
            axis=1,
        )
        w = np.repeat(w_theta * s ** (j - 1), len(w)) * np.tile(w, len(theta))
        dirs = new_dirs
    return dirs, w


@dataclass(frozen=True)
class ParametricHypersurface:
    """Sphere, generalized cylinder or hyperplane in ``R^(n+1)``.

    ``k`` is the dimension of the sphere factor (``k = n`` for a sphere, ``0`` for a
    hyperplane) and ``radius`` its radius.  The sphere factor is centred at
    ``center`` (first ``k + 1`` coordinates); the Euclidean factor spans the last
    ``n - k`` coordinates.
    """

    n: int
    k: int
    radius: float
    center: tuple[float, ...] = ()
    resolution: int = 48
    euclidean_nodes: int = 60

    def __post_init__(self) -> None:
        if not 0 <= self.k <= self.n:
            raise DomainError("need 0 <= k <= n", n=self.n, k=self.k)
        if self.k > 0 and not self.radius > 0:
            raise DomainError("sphere radius must be positive", radius=self.radius)
        if not self.center:
            object.__setattr__(self, "center", (0.0,) * (self.n + 1))
        if len(self.center) != self.n + 1:
            raise DomainError("center must have n + 1 coordinates", n=self.n)

    @classmethod
    def sphere(cls, n: int, radius: float, center=None, **kw) -> ParametricHypersurface:
        c = tuple(float(v) for v in center) if center is not None else ()
        return cls(n, n, float(radius), c, **kw)

    @classmethod
    def from_spec(cls, spec: ShrinkerSpec, **kw) -> ParametricHypersurface:
        return cls(spec.n, spec.k, spec.radius, (), **kw)

    @classmethod
    def plane(cls, n: int, **kw) -> ParametricHypersurface:
        return cls(n, 0, 0.0, (), **kw)

    def refined(self, factor: int = 2) -> ParametricHypersurface:
        return replace(
            self,
            resolution=self.resolution * factor,
            euclidean_nodes=self.euclidean_nodes * factor,
        )

    @property
    def mean_curvature(self) -> float:
        """Sum of principal curvatures with the outward normal."""
        return self.k / self.radius if self.k else 0.0

    def sphere_part(self) -> tuple[np.ndarray, np.ndarray]:
        if self.k == 0:
            return np.zeros((1, 0)), np.ones(1)
        dirs, w = _sphere_grid(self.k, self.resolution)
        return dirs, w * self.radius**self.k

    def euclidean_part(self, centre, half_width: float) -> tuple[np.ndarray, np.ndarray]:
        d = self.n - self.k
        if d == 0:
            return np.zeros((1, 0)), np.ones(1)
        nodes, weights = _legendre(self.euclidean_nodes)
        axes = [c + half_width * nodes for c in centre]
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        w = np.ones(1)
        for _ in range(d):
            w = np.outer(w, half_width * weights).ravel()
        return pts, w

    def samples(self, euclidean_centre=None, half_width: float = BOX_HALF_WIDTH):
        """Points, outward unit normals and area weights of the product grid."""
        dirs, ws = self.sphere_part()
        d = self.n - self.k
        centre = np.zeros(d) if euclidean_centre is None else np.asarray(euclidean_centre)
        pts_e, we = self.euclidean_part(centre, half_width)
        c = np.asarray(self.center, dtype=float)
        ns, ne = len(dirs), len(pts_e)
        x = np.empty((ns * ne, self.n + 1))
        normal = np.zeros_like(x)
        if self.k > 0:
            sphere_pts = c[: self.k + 1] + self.radius * dirs
            x[:, : self.k + 1] = np.repeat(sphere_pts, ne, axis=0)
            normal[:, : self.k + 1] = np.repeat(dirs, ne, axis=0)
        else:
            normal[:, self.n] = 1.0
            x[:, self.n] = c[self.n]
        if d > 0:
            start = self.k + 1 if self.k > 0 else 0
            x[:, start : start + d] = np.tile(pts_e, (ns, 1))
        weights = np.repeat(ws, ne) * np.tile(we, ns)
        return x, normal, weights


    def euclidean_slice(self) -> slice:
        start = self.k + 1 if self.k > 0 else 0
        return slice(start, start + self.n - self.k)


def shrinker_residual(surface: ParametricHypersurface) -> float:
    """Max of ``|H - <x, nu>/2|`` over the sample grid.

    The grid is taken from the surface's own resolution with a unit box; for the
    product shapes the residual does not depend on the Euclidean coordinates.
    """
    x, normal, _ = surface.samples(half_width=1.0)
    support = np.einsum("ij,ij->i", x, normal)
    return float(np.max(np.abs(surface.mean_curvature - 0.5 * support)))


@dataclass(frozen=True)
class FResult:
    value: float
    error_estimate: float
    tail_bound: float
    half_width: float


def _sphere_factor_max(surface: ParametricHypersurface, x0: np.ndarray, t0: float) -> float:
    """Upper bound for the sphere-factor integral of the Gaussian."""
    if surface.k == 0:
        return 1.0
    area = 2.0 * math.pi ** ((surface.k + 1) / 2) / math.gamma((surface.k + 1) / 2)
    area *= surface.radius**surface.k
    return area * (4.0 * math.pi * t0) ** (-surface.k / 2)


def _f_at(surface, x0, t0, half_width) -> float:
    e_slice = surface.euclidean_slice()
    x, _, w = surface.samples(euclidean_centre=x0[e_slice], half_width=half_width)
    sq = np.sum((x - x0) ** 2, axis=1)
    vals = w * np.exp(-sq / (4.0 * t0))
    return math.fsum(vals) * (4.0 * math.pi * t0) ** (-surface.n / 2)


def f_functional(
    surface: ParametricHypersurface,
    x0=None,
    t0: float = 1.0,
    err_tol: float = 1e-6,
) -> FResult:
    """Gaussian density of ``surface`` at centre ``x0`` and scale ``t0``.

    The Euclidean factor is truncated to a box of half-width ``14 sqrt(t0)`` about
    the projection of ``x0``; ``tail_bound`` bounds the discarded mass.  The error
    estimate compares the grid with one of doubled resolution.
    """
    if not t0 > 0:
        raise DomainError("t0 must be positive", t0=t0)
    x0 = np.zeros(surface.n + 1) if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (surface.n + 1,):
        raise DomainError("x0 must have n + 1 coordinates", n=surface.n)

    half_width = BOX_HALF_WIDTH * math.sqrt(t0)
    d = surface.n - surface.k
    if d:
        inside = math.erf(half_width / (2.0 * math.sqrt(t0))) ** d
        tail = _sphere_factor_max(surface, x0, t0) * (1.0 - inside)
        tail = max(tail, _sphere_factor_max(surface, x0, t0) * d * erfc(half_width / (2.0 * math.sqrt(t0))))
    else:
        tail = 0.0
    if tail > TAIL_LIMIT:
        raise TruncationError("Euclidean box too small for the Gaussian tail", tail_bound=tail)

    coarse = _f_at(surface, x0, t0, half_width)
    fine = _f_at(surface.refined(), x0, t0, half_width)
    err = abs(fine - coarse)
    if err > err_tol:
        raise ToleranceError("F-functional quadrature did not converge", error=err, tolerance=err_tol)
    return FResult(float(fine), float(err), float(tail), float(half_width))


def sphere_entropy(n: int) -> float:
    """Closed-form F of the shrinking sphere of radius sqrt(2n) at (0, 1)."""
    area = 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)
    return area * (2.0 * n) ** (n / 2) * (4.0 * math.pi) ** (-n / 2) * math.exp(-n / 2)


def cylinder_entropy(k: int) -> float:
    """Closed-form F of ``S^k(sqrt(2k)) x R^(n-k)``; independent of ``n``."""
    return sphere_entropy(k) if k else 1.0


@dataclass(frozen=True)
class FlowState:
    """Discrete history of a round sphere moving by mean curvature."""

    n: int
    r_init: float
    t_init: float
    times: np.ndarray
    radii: np.ndarray
    center: tuple[float, ...]
    extinction_time: float
    clipped: bool = False
    dt: float = field(default=0.0)

    @property
    def t(self) -> float:
        return float(self.times[-1])

    @property
    def radius(self) -> float:
        return float(self.radii[-1])

    def closed_form(self, t):
        r2 = self.r_init**2 - 2.0 * self.n * (np.asarray(t, dtype=float) - self.t_init)
        return np.sqrt(np.maximum(r2, 0.0))

    def radius_at(self, t: float) -> float:
        """Cubic Hermite interpolation of the recorded history."""
        if not self.times[0] <= t <= self.times[-1]:
            raise DomainError("time outside recorded history", t=t)
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        i = min(i, len(self.times) - 2)
        if i < 0:
            return float(self.radii[0])
        t0, t1 = self.times[i], self.times[i + 1]
        r0, r1 = self.radii[i], self.radii[i + 1]
        h = t1 - t0
        s = (t - t0) / h
        d0, d1 = -self.n / r0 * h, -self.n / r1 * h
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return float(h00 * r0 + h10 * d0 + h01 * r1 + h11 * d1)

    def surface_at(self, index: int, **kw) -> ParametricHypersurface:
        return ParametricHypersurface.sphere(self.n, self.radii[index], self.center, **kw)


def _rk4_step(n: int, r: float, dt: float) -> float | None:
    def f(x):
        return -n / x

    k1 = f(r)
    r2 = r + 0.5 * dt * k1
    if r2 <= 0:
        return None
    k2 = f(r2)
    r3 = r + 0.5 * dt * k2
    if r3 <= 0:
        return None
    k3 = f(r3)
    r4 = r + dt * k3
    if r4 <= 0:
        return None
    k4 = f(r4)
    return r + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def flow_sphere(
    n: int,
    r_init: float,
    t_init: float,
    dt: float = 1e-3,
    r_floor: float = 1e-3,
    t_end: float | None = None,
    center=None,
) -> FlowState:
    """Integrate ``dr/dt = -n/r`` with classical RK4.

    Stops at ``t_end`` or when the next radius would fall below ``r_floor``.  In
    the latter case the extinction time is closed off from the current state
    (``r^2`` is linear in ``t``) and the state is flagged as clipped.
    """
    if n < 1:
        raise DomainError("n must be >= 1", n=n)
    if not r_init > 0 or not dt > 0 or not r_floor >= 0:
        raise DomainError("need r_init > 0, dt > 0, r_floor >= 0", r_init=r_init, dt=dt)
    c = tuple(float(v) for v in center) if center is not None else (0.0,) * (n + 1)
    if len(c) != n + 1:
        raise DomainError("center must have n + 1 coordinates", n=n)

    times, radii = [float(t_init)], [float(r_init)]
    t, r = float(t_init), float(r_init)
    clipped = False
    while True:
        step = dt
        if t_end is not None:
            if t >= t_end - 1e-12 * max(1.0, abs(t_end)):
                break
            step = min(dt, t_end - t)
        nxt = _rk4_step(n, r, step)
        if nxt is None or nxt < r_floor:
            clipped = True
            break
        t, r = t + step, nxt
        times.append(t)
        radii.append(r)
    t_ext = t + r * r / (2.0 * n)
    return FlowState(n, float(r_init), float(t_init), np.array(times), np.array(radii), c, t_ext, clipped, dt)


@dataclass(frozen=True)
class MonotonicityReport:
    times: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    violations: int
    max_increase: float


def monotonicity_check(
    flow: FlowState,
    x0=None,
    t0: float | None = None,
    max_slices: int = 200,
    err_tol: float = 1e-6,
    resolution: int | None = None,
) -> MonotonicityReport:
    """Evaluate ``F_{x0, t0 - t}`` along the flow history.

    ``t0`` defaults to the extinction time.  Slices with ``t >= t0`` are skipped and
    at most ``max_slices`` evenly strided slices are evaluated.  An increase
    larger than the sum of the two quadrature error estimates counts as a
    violation.  ``resolution`` overrides the sphere grid resolution.
    """
    grid = {} if resolution is None else {"resolution": int(resolution)}
    t0 = flow.extinction_time if t0 is None else float(t0)
    valid = np.nonzero(flow.times < t0)[0]
    if len(valid) == 0:
        raise DomainError("no history slice precedes t0", t0=t0)
    stride = max(1, math.ceil(len(valid) / max_slices))
    idx = valid[::stride]
    vals, errs = [], []
    for i in idx:
        res = f_functional(flow.surface_at(int(i), **grid), x0, t0 - flow.times[i], err_tol=err_tol)
        vals.append(res.value)
        errs.append(res.error_estimate)
    vals_a, errs_a = np.array(vals), np.array(errs)
    inc = np.diff(vals_a)
    allowed = errs_a[1:] + errs_a[:-1] + 1e-13
    violations = int(np.sum(inc > allowed))
    max_inc = float(inc.max()) if len(inc) else 0.0
    return MonotonicityReport(flow.times[idx], vals_a, errs_a, violations, max_inc)
