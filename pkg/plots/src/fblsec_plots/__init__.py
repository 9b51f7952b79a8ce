"""Figure rendering for the experiment CSV artifacts.

Consumes only the flat CSV files that the experiment CLI emits; knows
nothing about the models that produced them. Each rendered image gets a
sidecar JSON summary listing its panels, series names and point counts,
so tests and downstream tooling never parse pixels.
"""

__version__ = "0.1.0"

from .schemas import FigureInputs, SchemaError, Table, gather  # noqa: F401
from .render import RENDERERS  # noqa: F401
