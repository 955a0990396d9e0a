"""Flow-level simulator and analysis toolkit for wafer-scale training interconnects.

The package models a switched wafer-scale fabric built from recursive
reduce/distribute Clos switches, routes concurrent collective flows through it
via conflict-graph coloring, plans collective communication for 3D-parallel
training workloads, and simulates iteration timing with max-min fair bandwidth
sharing against a 2D-mesh baseline.
"""

__version__ = "0.1.0"

from wafersim.errors import (
    CapabilityError,
    ConfigError,
    ConstraintViolation,
    InvalidEpochError,
    SimulationError,
)

__all__ = [
    "CapabilityError",
    "ConfigError",
    "ConstraintViolation",
    "InvalidEpochError",
    "SimulationError",
    "__version__",
]
