"""Evolutionary gait optimization for a two-servo walker.

Thin Python layer over the C++ core: genome parsing and validation, the
surrogate walker simulator, the steady-state genetic algorithm, and the run
log / CSV report tooling.
"""

from gaitevo._core import *  # noqa: F401,F403
from gaitevo._core import __doc__ as _core_doc

__version__ = "0.1.0"
__doc__ = _core_doc or __doc__
