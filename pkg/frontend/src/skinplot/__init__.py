"""Offline figure rendering for the numerical toolkit's CSV artifacts."""

__version__ = "0.1.0"

from .jobs import PlotJob, SchemaMismatch, read_table, KINDS
from .marching import contour_lines
from .render import render
