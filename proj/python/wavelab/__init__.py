"""Numerical lab for the 1-D stochastic Burgers equation with transport noise."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
