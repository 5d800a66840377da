"""Second solutions by reduction of order through a removable singular point.

Given a solution ``g1`` with a simple root ``s``, the second solution is
``g2 = g1 * integral(h)`` with ``h(z) = exp(z^2/4) / (z^(d-1) g1(z)^2)``.  Write
``g1 = (z - s) q(z)`` and ``h = phi / (z - s)^2`` with
``phi = exp(z^2/4) z^(1-d) / q^2``.  The ODE forces ``phi'(s) = 0``, so

    g2 = g1 * (R + C) - phi(s) * q,      R' = (phi - phi(s)) / (z - s)^2,

is analytic across ``s``.  ``R`` is smooth, which lets ordinary quadrature handle
it; inside a small band around ``s`` the difference quotient is replaced by its
Taylor expansion.
"""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from ..config import DEFAULT_CONFIG, QuadratureConfig
from ..errors import DomainError, ToleranceError

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(40)

FirstSolution = Callable[..., np.ndarray]


class ReducedSecondSolution:
    """Evaluator for ``g2`` on ``[lower, upper]`` given ``g1`` with root ``sigma``.

    Parameters
    ----------
    first : callable
        ``first(x, deriv)`` returning ``g1`` or its derivatives, vectorized.
    q_coeffs : array_like
        Taylor coefficients of ``q = g1/(z - sigma)`` about ``sigma``.
    q_exact : bool
        Whether ``q_coeffs`` is the whole of ``q`` (a polynomial).  Otherwise the
        Taylor polynomial is used only within ``q_radius`` of ``sigma``.
    dim : int
        The power ``d`` in ``z^(d-1)``.
    left_anchor, right_anchor : float
        Lower limits of the integrals on either side of ``sigma``.
    """

    def __init__(
        self,
        first: FirstSolution,
        q_coeffs,
        q_exact: bool,
        sigma: float,
        dim: int,
        left_anchor: float,
        right_anchor: float,
        lower: float,
        upper: float,
        config: QuadratureConfig = DEFAULT_CONFIG,
        q_radius: float = 0.5,
    ) -> None:
        self.first = first
        self.qc = np.asarray(q_coeffs, dtype=float)
        self.q_exact = q_exact
        self.sigma = float(sigma)
        self.dim = int(dim)
        self.left_anchor = float(left_anchor)
        self.right_anchor = float(right_anchor)
        self.lower = float(lower)
        self.upper = float(upper)
        self.config = config
        self.q_radius = q_radius
        self.band = config.singular_band

        self.phi_s = self._phi_direct(np.array([self.sigma]))[0]
        psi = self._psi_derivatives()
        if abs(psi[0]) > 1e-8 * max(1.0, abs(psi[1])):
            raise ToleranceError(
                "phi'(sigma) does not vanish; sigma is not a root of the first solution",
                psi1=psi[0],
            )
        p1, p2, p3, p4 = psi
        f = self.phi_s
        self._taylor = (
            f * (p2 + p1**2) / 2.0,
            f * (p3 + 3 * p1 * p2 + p1**3) / 6.0,
            f * (p4 + 4 * p1 * p3 + 3 * p2**2 + 6 * p1**2 * p2 + p1**4) / 24.0,
        )
        self._build_knots()
        self.constant = self.phi_s / (self.left_anchor - self.sigma)

    # -- pieces of the integrand -------------------------------------------------

    def q(self, z, deriv: int = 0):
        z = np.asarray(z, dtype=float)
        t = z - self.sigma
        coeffs = self.qc if deriv == 0 else P.polyder(self.qc, deriv)
        poly = P.polyval(t, coeffs)
        if self.q_exact:
            return poly
        near = np.abs(t) <= self.q_radius
        safe_t = np.where(near, 1.0, t)
        g = self.first(np.where(near, self.sigma + 1.0, z), 0)
        if deriv == 0:
            far = g / safe_t
        else:
            dg = self.first(np.where(near, self.sigma + 1.0, z), 1)
            far = (dg * safe_t - g) / safe_t**2
        return np.where(near, poly, far)

    def _phi_direct(self, z):
        z = np.asarray(z, dtype=float)
        log_phi = z * z / 4.0 - 2.0 * np.log(np.abs(self.q(z)))
        if self.dim != 1:
            log_phi = log_phi + (1 - self.dim) * np.log(z)
        return np.exp(log_phi)

    def h(self, z):
        """The reduction-of-order integrand, singular at ``sigma``."""
        z = np.asarray(z, dtype=float)
        g = self.first(z, 0)
        out = np.exp(z * z / 4.0) / g**2
        if self.dim != 1:
            out = out / z ** (self.dim - 1)
        return out

    def _psi_derivatives(self) -> tuple[float, float, float, float]:
        s, d = self.sigma, self.dim
        qd = [math.factorial(j) * (self.qc[j] if j < len(self.qc) else 0.0) for j in range(5)]
        q0, q1, q2, q3, q4 = qd
        l1 = q1 / q0
        l2 = q2 / q0 - l1**2
        l3 = q3 / q0 - 3 * q2 * q1 / q0**2 + 2 * l1**3
        l4 = (
            q4 / q0
            - 4 * q3 * q1 / q0**2
            - 3 * q2**2 / q0**2
            + 12 * q2 * q1**2 / q0**3
            - 6 * l1**4
        )
        e = 1 - d
        return (
            s / 2 + e / s - 2 * l1,
            0.5 - e / s**2 - 2 * l2,
            2 * e / s**3 - 2 * l3,
            -6 * e / s**4 - 2 * l4,
        )

    def rho(self, z):
        """Regularized integrand ``(phi - phi(sigma)) / (z - sigma)^2``."""
        z = np.asarray(z, dtype=float)
        t = z - self.sigma
        a, b, c = self._taylor
        inside = np.abs(t) < self.band
        ts = np.where(inside, 1.0, t)
        # the log1p/expm1 form avoids cancellation near sigma; far away (and near
        # z = 0, where z - sigma loses the digits of z) phi is evaluated directly
        use_poly = np.abs(t) <= min(self.q_radius, 0.5 * self.sigma)

        dpsi = ts * (2 * self.sigma + ts) / 4.0
        if self.dim != 1:
            ratio = np.where(use_poly, ts / self.sigma, 0.0)
            dpsi = dpsi + (1 - self.dim) * np.log1p(ratio)
        tail = P.polyval(ts, np.concatenate([[0.0], self.qc[1:]])) / self.qc[0]
        dpsi = dpsi - 2.0 * np.log1p(np.where(use_poly, tail, 0.0))
        smooth = self.phi_s * np.expm1(dpsi) / ts**2

        if not np.all(use_poly | inside):
            zf = np.where(use_poly | inside, self.sigma + 0.5, z)
            direct = (self._phi_direct(zf) - self.phi_s) / ts**2
            smooth = np.where(use_poly, smooth, direct)
        return np.where(inside, a + b * t + c * t * t, smooth)

    # -- cumulative integral -----------------------------------------------------

    def _build_knots(self) -> None:
        pts = {self.lower, self.upper, self.sigma, self.left_anchor, self.right_anchor}
        j = 1
        while self.lower > 0.0 and 2.0**-j > self.lower:
            pts.add(2.0**-j)
            j += 1
        step = 0.25
        pts.update(step * i for i in range(1, int(self.upper / step) + 1))
        knots = np.array(sorted(p for p in pts if self.lower <= p <= self.upper))
        cum = np.zeros_like(knots)
        base = int(np.searchsorted(knots, self.left_anchor))
        for i in range(base, len(knots) - 1):
            cum[i + 1] = cum[i] + self._panel(knots[i], knots[i + 1])
        for i in range(base, 0, -1):
            cum[i - 1] = cum[i] - self._panel(knots[i - 1], knots[i])
        self.knots = knots
        self.cumulative = cum

    def _panel(self, lo: float, hi: float) -> float:
        value, err = integrate.quad(
            lambda z: float(self.rho(np.array([z]))[0]),
            lo,
            hi,
            epsabs=self.config.abs_tol * 1e-3,
            epsrel=1e-13,
            limit=200,
        )
        # absolute budget near sigma, relative where exp(z^2/4) makes values large
        if err > max(self.config.abs_tol, 1e-12 * abs(value)):
            raise ToleranceError(
                "adaptive quadrature did not converge",
                interval=(float(lo), float(hi)),
                achieved=float(err),
            )
        return value

    def _check_domain(self, x: np.ndarray) -> None:
        if np.any(x < self.lower) or np.any(x > self.upper) or np.any(~np.isfinite(x)):
            raise DomainError(
                "evaluation point outside the tabulated range",
                lower=self.lower,
                upper=self.upper,
            )

    def R(self, x):
        """``integral_{left_anchor}^x rho``."""
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        self._check_domain(xs)
        idx = np.clip(np.searchsorted(self.knots, xs, side="right") - 1, 0, len(self.knots) - 1)
        out = np.empty_like(xs)
        for j, (xv, i) in enumerate(zip(xs, idx)):
            lo = self.knots[i]
            half = 0.5 * (xv - lo)
            if half == 0.0:
                out[j] = self.cumulative[i]
                continue
            nodes = lo + half * (GL_NODES + 1.0)
            out[j] = self.cumulative[i] + half * float(np.dot(GL_WEIGHTS, self.rho(nodes)))
        return float(out[0]) if scalar else out

    # -- public evaluation ---------------------------------------------------------

    def value(self, x):
        xs = np.asarray(x, dtype=float)
        return self.first(xs, 0) * (self.R(xs) + self.constant) - self.phi_s * self.q(xs)

    def derivative(self, x):
        xs = np.asarray(x, dtype=float)
        return (
            self.first(xs, 1) * (self.R(xs) + self.constant)
            + self.first(xs, 0) * self.rho(xs)
            - self.phi_s * self.q(xs, 1)
        )

    def ratio(self, x):
        """``g2 / g1``, monotone increasing between roots of ``g1``."""
        xs = np.asarray(x, dtype=float)
        return self.R(xs) + self.constant - self.phi_s / (xs - self.sigma)

    @property
    def singular_value(self) -> float:
        """Limit of ``g2`` at ``sigma``: ``-phi(sigma) q(sigma)``."""
        return -self.phi_s * self.qc[0]

    @property
    def matching_constant(self) -> float:
        """Constant on the right branch when integrating from ``right_anchor``."""
        s, f = self.sigma, self.phi_s
        return (
            self.R(self.right_anchor)
            + f / (self.left_anchor - s)
            - f / (self.right_anchor - s)
        )

    # -- the branchwise representation, used for cross-checks ----------------------

    def branch_integral(self, x: float) -> float:
        """``integral h`` from the anchor on the same side of ``sigma`` as ``x``."""
        if abs(x - self.sigma) < self.band:
            raise DomainError("branch form is not evaluated inside the singular band", x=x)
        anchor = self.left_anchor if x < self.sigma else self.right_anchor
        value, err = integrate.quad(
            lambda z: float(self.h(np.array([z]))[0]),
            anchor,
            x,
            epsabs=0.0,
            epsrel=1e-13,
            limit=400,
        )
        if err > max(self.config.abs_tol, 1e-12 * abs(value)):
            raise ToleranceError("branch quadrature did not converge", x=x, achieved=err)
        return value

    def branch_value(self, x: float, constant: float | None = None) -> float:
        k = self.matching_constant if constant is None else constant
        g = float(self.first(np.array([x]), 0)[0])
        if x < self.sigma:
            return g * self.branch_integral(x)
        return g * (k + self.branch_integral(x))

    def branch_derivative(self, x: float, constant: float = 0.0) -> float:
        g = float(self.first(np.array([x]), 0)[0])
        dg = float(self.first(np.array([x]), 1)[0])
        integral = self.branch_integral(x) + (constant if x > self.sigma else 0.0)
        return dg * integral + g * float(self.h(np.array([x]))[0])

    def matching_constant_from_derivatives(self, offsets=(0.04, 0.02, 0.01, 0.005)) -> float:
        """Recover the matching constant by one-sided derivative matching.

        Left and right derivatives (right side with constant 0) are sampled at
        ``sigma -/+ delta`` and extrapolated to ``delta = 0`` with Neville's scheme.
        The constant closes the gap: ``K g1'(sigma) = D_left - D_right``.
        """
        deltas = np.asarray(offsets, dtype=float)
        left = [self.branch_derivative(self.sigma - d) for d in deltas]
        right = [self.branch_derivative(self.sigma + d) for d in deltas]
        d_left = _neville_at_zero(deltas, left)
        d_right = _neville_at_zero(-deltas, right)
        slope = float(self.first(np.array([self.sigma]), 1)[0])
        return (d_left - d_right) / slope


def _neville_at_zero(x, y) -> float:
    x = list(map(float, x))
    p = list(map(float, y))
    n = len(x)
    for level in range(1, n):
        for i in range(n - level):
            p[i] = (x[i + level] * p[i] - x[i] * p[i + 1]) / (x[i + level] - x[i])
    return p[0]
