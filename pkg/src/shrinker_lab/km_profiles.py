"""Rotationally symmetric self-shrinker profiles.

A surface of revolution ``(u(z) cos t, u(z) sin t, z)`` satisfies ``H = <x, n>/2``
exactly when

    u'' = (1 + u'^2) (1/u - u/2 + z u'/2).

The cylinder ``u = sqrt(2)`` and the sphere arc ``u = sqrt(4 - z^2)`` solve it.
Profiles asymptotic to the cone ``u = sigma z`` are obtained by integrating
backwards from the cone expansion

    u = sigma z + 1/(sigma z) + b / z^3 + O(z^-5),
    b = -1/(2 sigma^3) - 1/(sigma (1 + sigma^2)),

which is stable in that direction; forward shooting from ``z = 0`` is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShootingRangeError, StepSizeError

SQRT2 = math.sqrt(2.0)
CRASH_FLOOR = 1e-6
BLOWUP_SLOPE = 1e8
CONE_MARGIN = 10.0


def profile_rhs(z: float, u: float, du: float) -> float:
    """Second derivative of the profile; the bracket is factored so ``u = sqrt(2)`` is exact."""
    return (1.0 + du * du) * ((SQRT2 - u) * (SQRT2 + u) / (2.0 * u) + 0.5 * z * du)


def profile_rhs_array(z, u, du):
    z, u, du = (np.asarray(a, dtype=float) for a in (z, u, du))
    return (1.0 + du * du) * ((SQRT2 - u) * (SQRT2 + u) / (2.0 * u) + 0.5 * z * du)


def sphere_arc(radius: float = 2.0, z_max: float = 1.5, count: int = 301):
    """Closed-form arc ``u = sqrt(r^2 - z^2)`` with its derivatives."""
    z = np.linspace(-z_max, z_max, count)
    u = np.sqrt(radius * radius - z * z)
    du = -z / u
    ddu = -(radius * radius) / u**3
    return z, u, du, ddu


@dataclass(frozen=True)
class ProfileTrajectory:
    z: np.ndarray
    u: np.ndarray
    du: np.ndarray
    ddu: np.ndarray
    sigma_estimate: float
    u0: float
    outcome: str = "ok"
    sigma: float | None = None

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.z.tolist(), self.u.tolist(), self.du.tolist()))

    @property
    def crashed(self) -> bool:
        return self.outcome == "crash"

    def shape_checks(self) -> dict[str, bool]:
        """Convexity, slope bounds and the cone comparison on ``(0, z_max]``."""
        s = self.sigma_estimate
        inner = self.z > 0
        return {
            "height_below_cylinder": bool(self.u0 < SQRT2),
            "slope_bounds": bool(np.all(self.du[inner] > 0) and np.all(self.du[inner] < s)),
            "convex": bool(np.all(self.ddu[1:-1] > 0)),
            "above_cone": bool(np.all(self.u > s * self.z)),
        }


def _sigma_from_slope(du: float, z: float) -> float:
    # u' = sigma - 1/(sigma z^2) + O(z^-4)
    if du <= 0 or z <= 0:
        return du
    return du + 1.0 / (du * z * z)


def _rk4(z, u, p, h):
    k1u, k1p = p, profile_rhs(z, u, p)
    u2, p2 = u + 0.5 * h * k1u, p + 0.5 * h * k1p
    if u2 <= 0:
        return None
    k2u, k2p = p2, profile_rhs(z + 0.5 * h, u2, p2)
    u3, p3 = u + 0.5 * h * k2u, p + 0.5 * h * k2p
    if u3 <= 0:
        return None
    k3u, k3p = p3, profile_rhs(z + 0.5 * h, u3, p3)
    u4, p4 = u + h * k3u, p + h * k3p
    if u4 <= 0:
        return None
    k4u, k4p = p4, profile_rhs(z + h, u4, p4)
    return (
        u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u),
        p + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p),
    )


def _march(z0, u, p, z1, dt):
    """RK4 from z0 to z1 (either direction). Returns arrays and an outcome tag."""
    steps = max(1, math.ceil(abs(z1 - z0) / dt - 1e-9))
    h = (z1 - z0) / steps
    zs, us, ps = [z0], [u], [p]
    outcome = "ok"
    for i in range(steps):
        z = z0 + i * h
        nxt = _rk4(z, u, p, h)
        if nxt is None or nxt[0] <= CRASH_FLOOR:
            outcome = "crash"
            break
        u, p = nxt
        if not math.isfinite(p) or abs(p) > BLOWUP_SLOPE:
            partial = (np.array(zs), np.array(us), np.array(ps))
            raise StepSizeError(
                "profile slope blew up", partial=partial, z=z + h, slope=p
            )
        zs.append(z0 + (i + 1) * h)
        us.append(u)
        ps.append(p)
    return np.array(zs), np.array(us), np.array(ps), outcome


def integrate_profile(
    u0: float, z_max: float = 40.0, dt: float = 1e-3, slope0: float = 0.0
) -> ProfileTrajectory:
    """Forward RK4 integration from ``u(0) = u0``, ``u'(0) = slope0``.

    A profile that reaches the axis is returned with outcome ``"crash"``; a slope
    that blows up raises :class:`StepSizeError` carrying the partial trajectory.
    """
    if not 0 < u0 < SQRT2 + 1e-15 * SQRT2:
        raise DomainError("u0 must lie in (0, sqrt(2)]", u0=u0)
    if not z_max > 0 or not dt > 0:
        raise DomainError("z_max and dt must be positive", z_max=z_max, dt=dt)
    z, u, p, outcome = _march(0.0, float(u0), float(slope0), float(z_max), dt)
    ddu = profile_rhs_array(z, u, p)
    return ProfileTrajectory(z, u, p, ddu, _sigma_from_slope(p[-1], z[-1]), float(u[0]), outcome)


def cone_data(sigma: float, z: float) -> tuple[float, float]:
    """Value and slope of the cone expansion at ``z``."""
    b = -1.0 / (2.0 * sigma**3) - 1.0 / (sigma * (1.0 + sigma * sigma))
    u = sigma * z + 1.0 / (sigma * z) + b / z**3
    du = sigma - 1.0 / (sigma * z * z) - 3.0 * b / z**4
    return u, du


def profile_from_cone(sigma: float, z_max: float = 40.0, dt: float = 1e-3) -> ProfileTrajectory:
    """Profile asymptotic to ``u = sigma z``, on ``[0, z_max]``.

    Starts from the cone expansion at ``z_max + 10`` and integrates towards the
    axis.
    """
    if not sigma > 0:
        raise DomainError("sigma must be positive", sigma=sigma)
    if not z_max > 0 or not dt > 0:
        raise DomainError("z_max and dt must be positive", z_max=z_max, dt=dt)
    z_start = z_max + CONE_MARGIN
    u, p = cone_data(sigma, z_start)
    # the linearization has rate ~ (1 + sigma^2) z / 2; keep RK4 inside its stability region
    step = min(dt, 1.0 / ((1.0 + sigma * sigma) * z_start))
    z, us, ps, outcome = _march(z_start, u, p, 0.0, step)
    z, us, ps = z[::-1], us[::-1], ps[::-1]
    if outcome == "ok":
        keep = z <= z_max + 1e-9
        z, us, ps = z[keep], us[keep], ps[keep]
    ddu = profile_rhs_array(z, us, ps)
    # closed form from the last sample, not the start point
    sig = _sigma_from_slope(ps[-1], z[-1])
    return ProfileTrajectory(z, us, ps, ddu, sig, float(us[0]), outcome, float(sigma))


def shoot_for_sigma(
    sigma_target: float, tol: float = 1e-3, z_max: float = 40.0, dt: float = 1e-3
) -> ProfileTrajectory:
    """Cone-asymptotic profile with slope ``sigma_target`` at infinity.

    The returned slope estimate is compared against the target; a mismatch larger
    than ``tol`` raises :class:`ShootingRangeError`.
    """
    traj = profile_from_cone(sigma_target, z_max, dt)
    if traj.crashed or abs(traj.sigma_estimate - sigma_target) > tol:
        raise ShootingRangeError(
            "shot did not reproduce the target slope",
            sigma_target=sigma_target,
            sigma_estimate=traj.sigma_estimate,
            outcome=traj.outcome,
        )
    return traj


def shoot_for_height(
    u0_target: float,
    tol: float = 1e-6,
    sigma_range: tuple[float, float] = (0.1, 8.0),
    z_max: float = 40.0,
    dt: float = 1e-3,
    max_iter: int = 80,
) -> ProfileTrajectory:
    """Bisect on ``sigma`` until the profile height at the axis is ``u0_target``.

    The map ``sigma -> u(0)`` is observed to be decreasing; this is checked on the
    bisection history and a violation raises :class:`ShootingRangeError`.
    """
    lo, hi = sigma_range
    if not 0 < lo < hi:
        raise DomainError("need 0 < sigma_lo < sigma_hi", sigma_range=sigma_range)
    t_lo, t_hi = profile_from_cone(lo, z_max, dt), profile_from_cone(hi, z_max, dt)
    h_lo, h_hi = t_lo.u0, t_hi.u0
    if not h_hi < u0_target < h_lo:
        raise ShootingRangeError(
            "target height outside the achievable range",
            u0_target=u0_target,
            achievable=(min(h_lo, h_hi), max(h_lo, h_hi)),
        )
    history = [(lo, h_lo), (hi, h_hi)]
    best = t_lo
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        best = profile_from_cone(mid, z_max, dt)
        history.append((mid, best.u0))
        _check_monotone(history)
        if abs(best.u0 - u0_target) <= tol:
            return best
        if best.u0 > u0_target:
            lo = mid
        else:
            hi = mid
    raise ShootingRangeError("bisection did not converge", u0_target=u0_target, last=best.u0)


def _check_monotone(history) -> None:
    pts = sorted(history)
    heights = [h for _, h in pts]
    if any(b >= a for a, b in zip(heights, heights[1:])):
        raise ShootingRangeError(
            "sigma -> u(0) is not decreasing on the bisection history",
            history=[list(p) for p in pts],
        )


def mean_curvature(u, du, ddu):
    """Mean curvature of the rotation surface, positive on the cylinder."""
    u, du, ddu = (np.asarray(a, dtype=float) for a in (u, du, ddu))
    w = 1.0 + du * du
    return -ddu / w**1.5 + 1.0 / (u * np.sqrt(w))


def profile_mean_curvature(traj: ProfileTrajectory) -> float:
    if traj.crashed:
        raise DomainError("mean curvature of a crashed profile is undefined")
    return float(np.min(mean_curvature(traj.u, traj.du, traj.ddu)))
