"""Finite-sum SGD processes, their diffusion limit, and convergence diagnostics."""

from ._sgdlab import *  # noqa: F401,F403
from ._sgdlab import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
