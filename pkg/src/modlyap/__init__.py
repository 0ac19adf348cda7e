"""Lyapunov exponents of modular functions along Farey-tree paths.

Exact word/surd algebra, q-series evaluation of modular functions on the
unit arc, cycle integrals, Lyapunov-type exponents and their verification
suites, plus a command-line front end.
"""

from .errors import ModlyapError
from .words import Mat2, QuadSurd, TVWord

__all__ = ["Mat2", "QuadSurd", "TVWord", "ModlyapError", "__version__"]

__version__ = "0.1.0"
