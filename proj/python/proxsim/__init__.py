"""Python access to the proxsim model, simulator and analysis routines."""

from ._proxsim import *  # noqa: F401,F403
from ._proxsim import __doc__  # noqa: F401

ROBOT = 0
PARTICIPANT = 1
