"""Area-time energy modelling of channel decoders in Thompson's VLSI model."""

from vlsidec.grid_circuit import Cell, GridCircuit, TechParams, area, energy, validate
from vlsidec.tanner_layout import NodeAreaModel, TannerGraph, area_report, energy_upper, layout

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "GridCircuit",
    "NodeAreaModel",
    "TannerGraph",
    "TechParams",
    "area",
    "area_report",
    "energy",
    "energy_upper",
    "layout",
    "validate",
]
