"""regenlab: break-time regeneration workbench.

Simulators, exact small-case oracles, and statistical verification suites
for stochastic processes whose regeneration times are defined by past and
future events of an i.i.d. driving sequence.
"""

__version__ = "0.1.0"

from regenlab.backend import BACKEND_NAME, IS_COMPILED
from regenlab.core import Alphabet, ContinuousLaw, DrivingStream, Window

__all__ = [
    "Alphabet",
    "ContinuousLaw",
    "DrivingStream",
    "Window",
    "BACKEND_NAME",
    "IS_COMPILED",
    "__version__",
]
