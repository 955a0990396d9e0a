"""Collective communication patterns and their compilation into flow plans."""

from wafersim.collectives.patterns import CollectiveKind, CollectivePattern, expected_state
from wafersim.collectives.plan import (
    CollectivePlan,
    EndpointTransfer,
    LocalDelivery,
    LogicalFlow,
    PayloadRef,
    PlanMode,
    PlanStep,
    injected_traffic,
    slice_bytes,
)
from wafersim.collectives.simple import plan_compound, plan_simple
from wafersim.collectives.fabric_plans import (
    SlotAllocator,
    fabric_endpoint_plan,
    lower_epoch_to_fabric,
    plan_hierarchical,
)
from wafersim.collectives.mesh_plans import io_broadcast_tree, plan_mesh_collective
from wafersim.collectives.executor import execute_plan

__all__ = [
    "CollectiveKind",
    "CollectivePattern",
    "CollectivePlan",
    "EndpointTransfer",
    "LocalDelivery",
    "LogicalFlow",
    "PayloadRef",
    "PlanMode",
    "PlanStep",
    "SlotAllocator",
    "execute_plan",
    "expected_state",
    "fabric_endpoint_plan",
    "injected_traffic",
    "io_broadcast_tree",
    "lower_epoch_to_fabric",
    "plan_compound",
    "plan_hierarchical",
    "plan_mesh_collective",
    "plan_simple",
    "slice_bytes",
]
