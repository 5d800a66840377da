"""Flat import path for the radial Jacobi toolkit (see :mod:`shrinker_lab.jacobi`)."""

from .jacobi import *  # noqa: F401,F403
from .jacobi import __all__  # noqa: F401
