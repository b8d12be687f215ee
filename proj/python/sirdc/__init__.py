"""County-level SIRDC modelling: transmission recovery, calibration, GP forecasts."""

from ._sirdc import *  # noqa: F401,F403
from ._sirdc import __doc__  # noqa: F401
