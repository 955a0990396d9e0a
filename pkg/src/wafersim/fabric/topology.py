"""Wafer-scale topologies: the 2D-mesh baseline and switched tree fabrics.

The tree fabric connects NPUs and I/O controllers to leaf (L1) switches and,
when there is more than one leaf group, L1 switches to a single L2 switch.
It is an almost-fat-tree: each L1's uplink budget equals the sum of its
attached NPU bandwidth only, modeled as one uplink slot per attached NPU at
the switch-port level and one aggregated L1-L2 link at the topology level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from wafersim.errors import ConfigError, ConstraintViolation
from wafersim.fabric.switch import RdClosSwitch, build_switch

DEFAULT_HOP_LATENCY = 20e-9  # seconds per wafer-scale hop


class NodeKind(str, Enum):
    NPU = "npu"
    IO_CONTROLLER = "io"
    SWITCH = "switch"


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind


@dataclass(frozen=True)
class Link:
    id: str
    src: str
    dst: str
    bandwidth: float  # bytes/s, one direction
    latency: float  # seconds


@dataclass(frozen=True)
class IoAttachment:
    npu: int  # row-major NPU index
    edge: str  # n | s | w | e


@dataclass(frozen=True)
class Mesh2D:
    rows: int
    cols: int
    link_bw: float
    io_bw: float
    hop_latency: float
    attachments: tuple[IoAttachment, ...]

    def index(self, r: int, c: int) -> int:
        return r * self.cols + c

    def coord(self, idx: int) -> tuple[int, int]:
        return divmod(idx, self.cols)

    def npu_count(self) -> int:
        return self.rows * self.cols

    def xy_path(self, src: int, dst: int) -> list[str]:
        """Directed link ids of the X-then-Y route from src to dst."""
        r0, c0 = self.coord(src)
        r1, c1 = self.coord(dst)
        links = []
        r, c = r0, c0
        while c != c1:
            step = 1 if c1 > c else -1
            links.append(mesh_link_id(self, (r, c), (r, c + step)))
            c += step
        while r != r1:
            step = 1 if r1 > r else -1
            links.append(mesh_link_id(self, (r, c), (r + step, c)))
            r += step
        return links

    def snake_order(self) -> list[int]:
        """Boustrophedon NPU order: row 0 left-to-right, row 1 back, ..."""
        order = []
        for r in range(self.rows):
            cols = range(self.cols) if r % 2 == 0 else range(self.cols - 1, -1, -1)
            order.extend(self.index(r, c) for c in cols)
        return order


@dataclass(frozen=True)
class L1GroupSpec:
    npus: tuple[int, ...]
    io_channels: int = 0


@dataclass(frozen=True)
class TreeFabricSpec:
    groups: tuple[L1GroupSpec, ...]
    npu_link_bw: float
    io_link_bw: float
    l1_l2_bw: float | None  # total bytes/s per L1 (both directions each), None if 1 level
    mid_count: int = 3
    hop_latency: float = DEFAULT_HOP_LATENCY
    middle_reduce_capable: bool = True


@dataclass(frozen=True)
class TreeFabric:
    spec: TreeFabricSpec
    levels: int
    l1_switches: tuple[RdClosSwitch, ...]
    l2_switch: RdClosSwitch | None

    @property
    def groups(self) -> tuple[L1GroupSpec, ...]:
        return self.spec.groups

    def npu_ids(self) -> list[int]:
        return [n for g in self.groups for n in g.npus]

    def npu_count(self) -> int:
        return sum(len(g.npus) for g in self.groups)

    def group_of_npu(self, npu: int) -> int:
        for gi, g in enumerate(self.groups):
            if npu in g.npus:
                return gi
        raise ConstraintViolation(f"npu {npu} not attached to any L1 switch")

    def npu_port(self, group: int, npu: int) -> int:
        return self.groups[group].npus.index(npu)

    def uplink_slots(self, group: int) -> int:
        return len(self.groups[group].npus) if self.levels == 2 else 0

    def uplink_port(self, group: int, slot: int) -> int:
        if not 0 <= slot < self.uplink_slots(group):
            raise ConstraintViolation(f"uplink slot {slot} out of range on L1 {group}")
        return len(self.groups[group].npus) + slot

    def io_port(self, group: int, channel: int) -> int:
        g = self.groups[group]
        if not 0 <= channel < g.io_channels:
            raise ConstraintViolation(f"io channel {channel} out of range on L1 {group}")
        return len(g.npus) + self.uplink_slots(group) + channel

    def l2_port(self, group: int, slot: int) -> int:
        if self.levels != 2:
            raise ConstraintViolation("fabric has no L2 switch")
        offset = sum(self.uplink_slots(g) for g in range(group))
        if not 0 <= slot < self.uplink_slots(group):
            raise ConstraintViolation(f"uplink slot {slot} out of range on L1 {group}")
        return offset + slot

    def io_channel_index(self, group: int, channel: int) -> int:
        """Global I/O controller index for ``channel`` on L1 ``group``."""
        return sum(g.io_channels for g in self.groups[:group]) + channel


@dataclass(frozen=True)
class Topology:
    kind: str  # "mesh" | "tree"
    nodes: dict[str, Node]
    links: dict[str, Link]
    structure: Mesh2D | TreeFabric

    def npu_count(self) -> int:
        return sum(1 for n in self.nodes.values() if n.kind is NodeKind.NPU)

    def npu_node(self, npu: int) -> str:
        return f"npu{npu}"

    def link(self, src: str, dst: str) -> Link:
        return self.links[f"{src}->{dst}"]

    def describe_rows(self) -> list[list[str]]:
        """Nodes and links as CSV-ready rows."""
        rows: list[list[str]] = [["record", "id", "kind_or_src", "dst", "bandwidth_bytes_per_s", "latency_s"]]
        for node in sorted(self.nodes.values(), key=lambda n: n.id):
            rows.append(["node", node.id, node.kind.value, "", "", ""])
        for link in sorted(self.links.values(), key=lambda l: l.id):
            rows.append(
                ["link", link.id, link.src, link.dst, repr(link.bandwidth), repr(link.latency)]
            )
        return rows


def mesh_link_id(mesh: Mesh2D, a: tuple[int, int], b: tuple[int, int]) -> str:
    return f"npu{mesh.index(*a)}->npu{mesh.index(*b)}"


def border_io_attachments(rows: int, cols: int) -> list[IoAttachment]:
    """One I/O channel per border NPU per adjacent wafer edge.

    Corner NPUs sit on two edges and carry two controllers; a 4x5 mesh gets
    2*(4+5) = 18 controllers and an NxN mesh 4N.
    """
    out: list[IoAttachment] = []
    for c in range(cols):
        out.append(IoAttachment(npu=c, edge="n"))
    for c in range(cols):
        out.append(IoAttachment(npu=(rows - 1) * cols + c, edge="s"))
    for r in range(rows):
        out.append(IoAttachment(npu=r * cols, edge="w"))
    for r in range(rows):
        out.append(IoAttachment(npu=r * cols + cols - 1, edge="e"))
    return out


def build_mesh(
    rows: int,
    cols: int,
    link_bw: float,
    io_attachments: Sequence[IoAttachment] | None = None,
    io_bw: float = 128e9,
    hop_latency: float = DEFAULT_HOP_LATENCY,
) -> Topology:
    """4-neighborhood 2D mesh of NPUs with I/O controllers on border NPUs."""
    if rows < 1 or cols < 1:
        raise ConstraintViolation("mesh needs rows >= 1 and cols >= 1")
    if link_bw <= 0 or io_bw <= 0:
        raise ConstraintViolation("bandwidths must be strictly positive")
    attachments = tuple(io_attachments or ())
    mesh = Mesh2D(rows, cols, link_bw, io_bw, hop_latency, attachments)

    nodes: dict[str, Node] = {}
    links: dict[str, Link] = {}
    for i in range(rows * cols):
        nodes[f"npu{i}"] = Node(f"npu{i}", NodeKind.NPU)

    def add_link(src: str, dst: str, bw: float):
        lid = f"{src}->{dst}"
        links[lid] = Link(lid, src, dst, bw, hop_latency)

    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                add_link(f"npu{mesh.index(r, c)}", f"npu{mesh.index(r, c + 1)}", link_bw)
                add_link(f"npu{mesh.index(r, c + 1)}", f"npu{mesh.index(r, c)}", link_bw)
            if r + 1 < rows:
                add_link(f"npu{mesh.index(r, c)}", f"npu{mesh.index(r + 1, c)}", link_bw)
                add_link(f"npu{mesh.index(r + 1, c)}", f"npu{mesh.index(r, c)}", link_bw)

    for ioi, att in enumerate(attachments):
        r, c = mesh.coord(att.npu)
        on_border = {
            "n": r == 0,
            "s": r == rows - 1,
            "w": c == 0,
            "e": c == cols - 1,
        }.get(att.edge)
        if on_border is None:
            raise ConstraintViolation(f"unknown edge {att.edge!r}")
        if not on_border:
            raise ConstraintViolation(
                f"I/O attachment on npu{att.npu} is not on the {att.edge} border"
            )
        nodes[f"io{ioi}"] = Node(f"io{ioi}", NodeKind.IO_CONTROLLER)
        add_link(f"io{ioi}", f"npu{att.npu}", io_bw)
        add_link(f"npu{att.npu}", f"io{ioi}", io_bw)

    return Topology(kind="mesh", nodes=nodes, links=links, structure=mesh)


def build_tree_fabric(spec: TreeFabricSpec) -> Topology:
    """Build the switched tree fabric described by ``spec``."""
    if not spec.groups:
        raise ConfigError("at least one L1 group is required", field="groups")
    seen: set[int] = set()
    for gi, g in enumerate(spec.groups):
        if not g.npus:
            raise ConfigError(f"L1 group {gi} has no NPUs (orphan switch)", field="groups")
        for n in g.npus:
            if n in seen:
                raise ConfigError(f"npu {n} attached to two L1 switches", field="groups")
            seen.add(n)
        if g.io_channels < 0:
            raise ConfigError("io_channels must be >= 0", field="groups")
    if spec.npu_link_bw <= 0 or spec.io_link_bw <= 0:
        raise ConfigError("bandwidths must be strictly positive")
    levels = 2 if len(spec.groups) > 1 else 1
    if levels == 2 and (spec.l1_l2_bw is None or spec.l1_l2_bw <= 0):
        raise ConfigError("l1_l2_bw required for a 2-level fabric", field="l1_l2_bw")

    l1_switches = []
    for g in spec.groups:
        slots = len(g.npus) if levels == 2 else 0
        ports = len(g.npus) + slots + g.io_channels
        l1_switches.append(
            build_switch(spec.mid_count, ports, spec.middle_reduce_capable)
        )
    l2 = None
    if levels == 2:
        total_slots = sum(len(g.npus) for g in spec.groups)
        l2 = build_switch(spec.mid_count, total_slots, spec.middle_reduce_capable)

    fabric = TreeFabric(spec=spec, levels=levels, l1_switches=tuple(l1_switches), l2_switch=l2)

    nodes: dict[str, Node] = {}
    links: dict[str, Link] = {}

    def add_link(src: str, dst: str, bw: float):
        lid = f"{src}->{dst}"
        links[lid] = Link(lid, src, dst, bw, spec.hop_latency)

    for gi, g in enumerate(spec.groups):
        l1 = f"l1s{gi}"
        nodes[l1] = Node(l1, NodeKind.SWITCH)
        for n in g.npus:
            nodes[f"npu{n}"] = Node(f"npu{n}", NodeKind.NPU)
            add_link(f"npu{n}", l1, spec.npu_link_bw)
            add_link(l1, f"npu{n}", spec.npu_link_bw)
        for ch in range(g.io_channels):
            ioi = fabric.io_channel_index(gi, ch)
            nodes[f"io{ioi}"] = Node(f"io{ioi}", NodeKind.IO_CONTROLLER)
            add_link(f"io{ioi}", l1, spec.io_link_bw)
            add_link(l1, f"io{ioi}", spec.io_link_bw)
    if levels == 2:
        nodes["l2s0"] = Node("l2s0", NodeKind.SWITCH)
        for gi in range(len(spec.groups)):
            add_link(f"l1s{gi}", "l2s0", spec.l1_l2_bw)
            add_link("l2s0", f"l1s{gi}", spec.l1_l2_bw)

    return Topology(kind="tree", nodes=nodes, links=links, structure=fabric)


def bisection_bandwidth(topology: Topology) -> float:
    """Min-cut bandwidth over balanced NPU bipartitions.

    Mesh: the straight mid-cut (between-rows cut when the row count is even,
    between-columns when the column count is even, minimum when both apply).
    Tree fabric: minimum over levels of total cross-level bandwidth, halved.
    """
    if topology.npu_count() < 2:
        raise ConstraintViolation("bisection needs at least 2 connected NPUs")
    s = topology.structure
    if isinstance(s, Mesh2D):
        cuts = []
        if s.rows % 2 == 0:
            cuts.append(s.cols * s.link_bw)
        if s.cols % 2 == 0:
            cuts.append(s.rows * s.link_bw)
        if not cuts:
            # Both dimensions odd: nearest-to-balanced straight cuts.
            cuts = [s.cols * s.link_bw, s.rows * s.link_bw]
        return min(cuts)
    assert isinstance(s, TreeFabric)
    level_totals = [s.npu_count() * s.spec.npu_link_bw]
    if s.levels == 2:
        level_totals.append(len(s.groups) * s.spec.l1_l2_bw)
    return min(level_totals) / 2.0
