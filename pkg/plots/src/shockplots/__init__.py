"""Figure regeneration from shocklayer run artifacts (CSV/JSON only)."""

from .io import Case, MissingInputError, load_cases, load_trajectories, read_columns
from .render import FIGURES, FigureSpec, render

__version__ = "0.1.0"
