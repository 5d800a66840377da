"""Numerical tolerances shared by the quadrature, ODE and eigen-solver code."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Any


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and step policy.

    Attributes
    ----------
    abs_tol : float
        Absolute error budget for adaptive quadrature panels.
    singular_band : float
        Half-width of the band around a removable singular point inside which the
        local Taylor expansion replaces the difference quotient.
    ode_dt : float
        Default step for the fixed-step Runge-Kutta integrators.
    grid_size : int
        Default number of interior nodes for the Dirichlet eigen-solver.
    """

    abs_tol: float = 1e-10
    singular_band: float = 1e-3
    ode_dt: float = 1e-3
    grid_size: int = 2048

    def __post_init__(self) -> None:
        for name in ("abs_tol", "singular_band", "ode_dt"):
            value = getattr(self, name)
            if not (value > 0.0):
                raise ValueError(f"{name} must be positive, got {value!r}")
        if int(self.grid_size) != self.grid_size or self.grid_size <= 0:
            raise ValueError(f"grid_size must be a positive integer, got {self.grid_size!r}")

    def with_overrides(self, **overrides: Any) -> QuadratureConfig:
        """Return a copy with the non-``None`` overrides applied."""
        clean = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(clean) - set(asdict(self))
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **clean)

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


DEFAULT_CONFIG = QuadratureConfig()
