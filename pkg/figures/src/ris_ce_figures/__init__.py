"""Figure rendering for sweep CSVs produced by ris-doppler-ce."""

from .loader import EXPECTED_HEADER, SchemaError, SweepRow, load_rows, select_scenario
from .plots import FigureSpec, PanelSpec, build_figure, build_spec, render

__version__ = "0.1.0"

__all__ = [
    "EXPECTED_HEADER",
    "SchemaError",
    "SweepRow",
    "load_rows",
    "select_scenario",
    "FigureSpec",
    "PanelSpec",
    "build_figure",
    "build_spec",
    "render",
    "__version__",
]
