"""Figure rendering for greenstream CSV result tables."""

__version__ = "0.1.0"

from .render import FigureSpec, SpecError, load_spec, render

__all__ = ["FigureSpec", "SpecError", "load_spec", "render"]
