"""Spectral shapes: general solver plus check-hybrid closed forms."""

from .checkhybrid import *  # noqa: F401,F403
from .checkhybrid import __all__ as _ch_all
from .solver import *  # noqa: F401,F403
from .solver import __all__ as _solver_all

__all__ = sorted(_solver_all + _ch_all)
