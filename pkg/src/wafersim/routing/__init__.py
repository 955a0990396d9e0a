"""Concurrent flow routing through reduce/distribute Clos switches."""

from wafersim.routing.flows import Flow, flow, parse_epoch, format_epoch, validate_epoch
from wafersim.routing.conflict import (
    Coloring,
    ColoringFailure,
    ConflictGraph,
    build_conflict_graph,
    color_graph,
)
from wafersim.routing.router import (
    ConflictReport,
    IncrementalRouter,
    LevelAssignment,
    RoutingAssignment,
    route,
)
from wafersim.routing.validate import evaluate_assignment, validate_assignment
from wafersim.routing.resolve import (
    BlockResolution,
    DecompositionResolution,
    MidStageIncrease,
    PlacementDelegation,
    ResolutionStrategy,
    resolve,
)

__all__ = [
    "BlockResolution",
    "Coloring",
    "ColoringFailure",
    "ConflictGraph",
    "ConflictReport",
    "DecompositionResolution",
    "Flow",
    "IncrementalRouter",
    "LevelAssignment",
    "MidStageIncrease",
    "PlacementDelegation",
    "ResolutionStrategy",
    "RoutingAssignment",
    "build_conflict_graph",
    "color_graph",
    "evaluate_assignment",
    "flow",
    "format_epoch",
    "parse_epoch",
    "resolve",
    "route",
    "validate_assignment",
    "validate_epoch",
]
