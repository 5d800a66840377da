"""Spectral and stability toolkit for generalized-cylinder self-shrinkers.

The shrinkers studied here are S^k(sqrt(2k)) x R^(n-k) in R^(n+1), together with
the flat hyperplane (k = 0).  The package enumerates the spectrum of the stability
operator, builds the radial Jacobi functions, classifies stable regions, and checks
a few flow identities numerically.
"""

from importlib.metadata import PackageNotFoundError, version

from .config import QuadratureConfig
from .errors import ShrinkerLabError

try:
    __version__ = version("shrinker-lab")
except PackageNotFoundError:  # pragma: no cover - running from a source tree
    __version__ = "0.0.0"

__all__ = ["QuadratureConfig", "ShrinkerLabError", "__version__"]
