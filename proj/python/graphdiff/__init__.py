"""Sparse polynomial surrogates for parametric diffusion on community graphs.

Node and community indices are 0-based here, as in the C++ API.
"""

from ._core import *  # noqa: F401,F403
from ._core import GraphdiffError, __doc__  # noqa: F401

__version__ = "0.1.0"
