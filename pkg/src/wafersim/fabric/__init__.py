"""Fabric construction: recursive reduce/distribute Clos switches and topologies."""

from wafersim.fabric.switch import (
    MicroSwitch,
    MicroSwitchKind,
    OddPortAdapter,
    RdClosSwitch,
    build_switch,
)
from wafersim.fabric.topology import (
    IoAttachment,
    Link,
    Mesh2D,
    Node,
    NodeKind,
    Topology,
    TreeFabric,
    TreeFabricSpec,
    L1GroupSpec,
    bisection_bandwidth,
    border_io_attachments,
    build_mesh,
    build_tree_fabric,
)

__all__ = [
    "IoAttachment",
    "L1GroupSpec",
    "Link",
    "Mesh2D",
    "MicroSwitch",
    "MicroSwitchKind",
    "Node",
    "NodeKind",
    "OddPortAdapter",
    "RdClosSwitch",
    "Topology",
    "TreeFabric",
    "TreeFabricSpec",
    "bisection_bandwidth",
    "border_io_attachments",
    "build_mesh",
    "build_switch",
    "build_tree_fabric",
]
