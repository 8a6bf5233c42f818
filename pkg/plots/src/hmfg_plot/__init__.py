"""Figure rendering for solver CSV artifacts."""

from .plots import KINDS, PlotError, PlotSpec, render

__all__ = ["KINDS", "PlotError", "PlotSpec", "render"]
