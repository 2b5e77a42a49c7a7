"""Deterministic simulator and verification harness for the spatially
inhomogeneous Landau equation with soft potentials."""

from ._landau import *  # noqa: F401,F403
from ._landau import __doc__  # noqa: F401
