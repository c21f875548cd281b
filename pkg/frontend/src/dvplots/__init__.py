"""Figure rendering for dvbandit experiment results (CSV in, PNG out)."""

from .figures import (FigureSpec, SchemaError, build_figure, load_rows,
                      render_experiment_figures, required_columns)

__version__ = "0.1.0"

__all__ = [
    "FigureSpec", "SchemaError", "build_figure", "load_rows",
    "render_experiment_figures", "required_columns",
]
