"""Flag-decorated triangulations: gluing equations, holonomy, volume and
exact wedge invariants."""

__version__ = "0.1.0"

from .arith import QuadExt, bloch_wigner, dilog, factor  # noqa: F401
from .errors import FlagTetError  # noqa: F401
