"""Publication-style figures from riskevo CSV files."""

__version__ = "0.1.0"

from .render import FigureSpec, SchemaError, load_table, main, render

__all__ = ["FigureSpec", "SchemaError", "load_table", "main", "render",
           "__version__"]
