"""Static publication-style figures from monfermi CSV/JSON outputs.

This package never recomputes physics: every number drawn comes from an
input file produced by the simulation/analysis pipeline.
"""

from .figures import FigureSpec, SchemaError, build_figure, render

__version__ = "0.1.0"
__all__ = ["FigureSpec", "SchemaError", "build_figure", "render", "__version__"]
