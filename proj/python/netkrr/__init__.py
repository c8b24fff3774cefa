"""Kernel regression with network cohesion."""

from ._netkrr import *  # noqa: F401,F403
from ._netkrr import __version__  # noqa: F401
