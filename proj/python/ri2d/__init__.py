"""Planar random-interlacement and excursion-process laboratory."""

from _ri2d import *  # noqa: F401,F403
from _ri2d import __doc__  # noqa: F401
