"""Lowest Dirichlet eigenvalue of the reduced stability operator on an interval.

In self-adjoint form the operator reads ``L u = w^{-1} (w u')' + c u`` with
``w = exp(-x^2/4) x^(d-1)``, so ``-(w u')' - c w u = lambda w u``.  A conservative
three-point discretization keeps the generalized problem symmetric; the scaled
matrix ``M^{-1/2} K M^{-1/2}`` is tridiagonal.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.linalg import eigh_tridiagonal

from ..config import DEFAULT_CONFIG, QuadratureConfig
from ..errors import DomainError
from ..spectrum import ShrinkerSpec

ORIGIN_EPS = 1e-6


class OriginShiftWarning(RuntimeWarning):
    """The interval endpoint at the coordinate origin was moved to ``ORIGIN_EPS``."""


def _operator_data(spec: ShrinkerSpec) -> tuple[int, float]:
    if spec.k == spec.n:
        raise DomainError("the round sphere has no Euclidean factor", n=spec.n, k=spec.k)
    d = spec.euclidean_dim
    return d, float(spec.potential)


def _log_weight(x: np.ndarray, d: int) -> np.ndarray:
    out = -x * x / 4.0
    if d != 1:
        out = out + (d - 1) * np.log(x)
    return out


def dirichlet_ground_eigenvalue(
    spec: ShrinkerSpec,
    interval: tuple[float, float],
    grid_size: int | None = None,
    config: QuadratureConfig = DEFAULT_CONFIG,
    origin: str = "regular",
) -> float:
    """Smallest ``lambda`` with ``L u = -lambda u`` and ``u = 0`` on the ends.

    For a one-dimensional Euclidean factor the coordinate is ``x_n`` on any real
    interval.  Otherwise it is ``r = |x|`` and the interval must lie in
    ``[0, inf)``.  When it starts at ``r = 0`` the default ``origin="regular"``
    imposes only regularity there (the weight vanishes, so no flux crosses the
    origin).  ``origin="shift"`` instead moves the endpoint to ``ORIGIN_EPS`` and
    keeps a Dirichlet condition, emitting :class:`OriginShiftWarning`.
    """
    a, b = map(float, interval)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DomainError("need a finite interval with a < b", a=a, b=b)
    n_grid = config.grid_size if grid_size is None else int(grid_size)
    if n_grid < 64:
        raise DomainError("grid_size must be at least 64", grid_size=n_grid)
    d, c = _operator_data(spec)

    regular_origin = False
    if d > 1:
        if a < 0.0:
            raise DomainError("radial interval must lie in r >= 0", a=a)
        if a < ORIGIN_EPS:
            if origin == "shift":
                warnings.warn(
                    f"interval endpoint {a} moved to {ORIGIN_EPS} to avoid r = 0",
                    OriginShiftWarning,
                    stacklevel=2,
                )
                a = ORIGIN_EPS
            elif origin == "regular":
                regular_origin = True
                a = 0.0
            else:
                raise DomainError("origin must be 'regular' or 'shift'", origin=origin)

    if regular_origin:
        h = b / (n_grid + 1)
        x = h * np.arange(0, n_grid + 1)
        lw_half = _log_weight(x + h / 2.0, d)
        # cell masses: [0, h/2] at the origin, width h elsewhere
        log_mass = np.empty_like(x)
        log_mass[0] = d * math.log(h / 2.0) - math.log(d)
        log_mass[1:] = math.log(h) + _log_weight(x[1:], d)
        lw_left = np.concatenate([[-np.inf], lw_half[:-1]])
    else:
        h = (b - a) / (n_grid + 1)
        x = a + h * np.arange(1, n_grid + 1)
        lw_half = _log_weight(x + h / 2.0, d)
        lw_left = _log_weight(x - h / 2.0, d)
        log_mass = math.log(h) + _log_weight(x, d)

    # flux coefficient w_{i+1/2} / h between node i and i+1
    log_flux_r = lw_half - math.log(h)
    log_flux_l = lw_left - math.log(h)
    diag = np.exp(log_flux_l - log_mass) + np.exp(log_flux_r - log_mass) - c
    off = -np.exp(log_flux_r[:-1] - 0.5 * (log_mass[:-1] + log_mass[1:]))
    values = eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, 0))
    return float(values[0])
