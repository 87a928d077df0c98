"""Figure rendering for effective-gain estimation sweep results."""

from .render import PlotSpec, SchemaError, load_series, render

__version__ = "0.1.0"
