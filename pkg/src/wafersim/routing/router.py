"""Recursive flow routing.

Routing configures the outermost micro-switch stages first: flows are colored
on the conflict graph (color = middle-stage subswitch), reductions are
activated on input micro-switches whose two ports belong to one flow and
distributions on output micro-switches likewise, then each middle subswitch
recursively routes the reduced/partial streams that were assigned to it.  A
conflict at any recursion depth marks the whole epoch as conflicted.

Unicast-only epochs use the exact alternating 2-coloring instead of the
greedy heuristic, which makes the switch rearrangeably non-blocking for
permutations at m = 2.  The incremental router adds one flow at a time
without touching established flows; with m >= 3 and unicast traffic every
arrival admits a free middle at each level (strict-sense non-blocking).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from wafersim.errors import CapabilityError, InvalidEpochError
from wafersim.fabric.switch import RdClosSwitch
from wafersim.routing.conflict import (
    Coloring,
    ColoringFailure,
    alternating_two_color,
    build_conflict_graph,
    color_graph,
    exact_color,
)
from wafersim.routing.flows import Flow, validate_epoch


@dataclass(frozen=True)
class MicroConfig:
    micro_uid: int
    stage: str
    index: int
    port_flows: dict[int, int]  # external port -> flow id (on this stage's side)
    reduce_active: bool
    distribute_active: bool
    crossbar: dict[int, int]  # external port -> middle subswitch index


@dataclass(frozen=True)
class LevelAssignment:
    ports: int
    mid_count: int
    flows: dict[int, Flow]  # sub-flows at this level, keyed by original flow id
    colors: dict[int, int]
    input_configs: tuple[MicroConfig, ...]
    output_configs: tuple[MicroConfig, ...]
    children: dict[int, "LevelAssignment"]
    is_base: bool
    odd_demux_middle: int | None = None
    odd_mux_middle: int | None = None


@dataclass(frozen=True)
class RoutingAssignment:
    switch: RdClosSwitch
    root: LevelAssignment

    def color_path(self, flow_id: int) -> tuple[int, ...]:
        """Middle-subswitch choice of a flow at each recursion level."""
        path = []
        level = self.root
        while not level.is_base:
            color = level.colors[flow_id]
            path.append(color)
            level = level.children[color]
            if flow_id not in level.flows:
                break
        return tuple(path)


@dataclass(frozen=True)
class ConflictReport:
    depth: int
    path: tuple[int, ...]  # middle indices leading to the conflicted level
    flow_ids: tuple[int, ...]  # original ids of the flows that could not route
    message: str


def route(flows: Sequence[Flow], switch: RdClosSwitch) -> RoutingAssignment | ConflictReport:
    """Route one epoch; returns the assignment or a conflict report."""
    flows = sorted(flows, key=lambda f: f.id)
    validate_epoch(flows, switch.ports)
    result = _route_level(flows, switch, depth=0, path=())
    if isinstance(result, ConflictReport):
        return result
    return RoutingAssignment(switch=switch, root=result)


def _choose_colors(flows, switch) -> Coloring | ColoringFailure:
    graph = build_conflict_graph(flows, switch)
    if all(f.is_unicast for f in flows):
        return Coloring(colors=alternating_two_color(flows, switch))
    result = color_graph(graph, switch.mid_count)
    if isinstance(result, ColoringFailure):
        exact = exact_color(graph, switch.mid_count)
        if exact is not None:
            return exact
    return result


def _route_level(flows, switch, depth, path) -> LevelAssignment | ConflictReport:
    if switch.is_base:
        return _base_level(flows, switch)

    if not switch.middle_reduce_capable:
        for f in flows:
            if len({switch.middle_port_of(p) for p in f.input_ports}) > 1:
                raise CapabilityError(
                    f"flow {f.id} needs in-middle reduction but middle stages "
                    "were built without reduce capability"
                )

    result = _choose_colors(flows, switch)
    if isinstance(result, ColoringFailure):
        return ConflictReport(
            depth=depth,
            path=path,
            flow_ids=result.uncolored,
            message=(
                f"coloring failed at depth {depth} with {switch.mid_count} middle "
                f"stages; uncolorable flows: {list(result.uncolored)}"
            ),
        )
    colors = result.colors

    sub_epochs: dict[int, list[Flow]] = {}
    for f in flows:
        sub_ips = sorted({switch.middle_port_of(p) for p in f.input_ports})
        sub_ops = sorted({switch.middle_port_of(p) for p in f.output_ports})
        sub_epochs.setdefault(colors[f.id], []).append(
            Flow(f.id, frozenset(sub_ips), frozenset(sub_ops), f.payload_bytes, f.op_kind)
        )

    children: dict[int, LevelAssignment] = {}
    for k in sorted(sub_epochs):
        child = _route_level(sub_epochs[k], switch.middle[k], depth + 1, path + (k,))
        if isinstance(child, ConflictReport):
            return child
        children[k] = child

    in_by_flow = {f.id: f.input_ports for f in flows}
    out_by_flow = {f.id: f.output_ports for f in flows}
    input_configs = tuple(
        _stage_config(switch.input_stage[i], in_by_flow, colors, reduce_side=True)
        for i in range(switch.half)
    )
    output_configs = tuple(
        _stage_config(switch.output_stage[j], out_by_flow, colors, reduce_side=False)
        for j in range(switch.half)
    )

    odd_demux = odd_mux = None
    if switch.is_odd:
        odd = switch.odd_port
        for f in flows:
            if odd in f.input_ports:
                odd_demux = colors[f.id]
            if odd in f.output_ports:
                odd_mux = colors[f.id]

    return LevelAssignment(
        ports=switch.ports,
        mid_count=switch.mid_count,
        flows={f.id: f for f in flows},
        colors=colors,
        input_configs=input_configs,
        output_configs=output_configs,
        children=children,
        is_base=False,
        odd_demux_middle=odd_demux,
        odd_mux_middle=odd_mux,
    )


def _stage_config(micro, ports_by_flow, colors, reduce_side) -> MicroConfig:
    port_flows: dict[int, int] = {}
    for p in micro.ports:
        for fid, ports in ports_by_flow.items():
            if p in ports:
                port_flows[p] = fid
                break
    both_same = (
        len(micro.ports) == 2
        and all(p in port_flows for p in micro.ports)
        and len(set(port_flows.values())) == 1
    )
    return MicroConfig(
        micro_uid=micro.uid,
        stage=micro.stage,
        index=micro.index,
        port_flows=port_flows,
        reduce_active=both_same and reduce_side,
        distribute_active=both_same and not reduce_side,
        crossbar={p: colors[fid] for p, fid in sorted(port_flows.items())},
    )


def _base_level(flows, switch) -> LevelAssignment:
    base = switch.base_element
    in_map = {p: f.id for f in flows for p in f.input_ports}
    out_map = {p: f.id for f in flows for p in f.output_ports}
    config = MicroConfig(
        micro_uid=base.uid,
        stage="base",
        index=0,
        port_flows=dict(sorted(in_map.items())),
        reduce_active=any(len(f.input_ports) > 1 for f in flows),
        distribute_active=any(len(f.output_ports) > 1 for f in flows),
        crossbar={p: 0 for p in sorted(out_map)},
    )
    return LevelAssignment(
        ports=switch.ports,
        mid_count=switch.mid_count,
        flows={f.id: f for f in flows},
        colors={f.id: 0 for f in flows},
        input_configs=(config,),
        output_configs=(config,),
        children={},
        is_base=True,
    )


class IncrementalRouter:
    """Adds/removes flows one at a time, never rerouting established flows.

    At each level the new flow takes the lowest middle index whose channels
    from its input micro-switches and to its output micro-switches are all
    free, then descends.  If no middle admits the flow (possible for
    non-unicast flows or m = 2), the addition fails atomically.
    """

    def __init__(self, switch: RdClosSwitch):
        self.switch = switch
        self._root = _NodeState(switch)
        self._flows: dict[int, Flow] = {}

    @property
    def active_flows(self) -> dict[int, Flow]:
        return dict(self._flows)

    def add(self, f: Flow) -> bool:
        if f.id in self._flows:
            raise InvalidEpochError(f"flow id {f.id} already routed")
        validate_epoch(list(self._flows.values()) + [f], self.switch.ports)
        if self._root.add(f):
            self._flows[f.id] = f
            return True
        return False

    def remove(self, fid: int) -> None:
        if fid not in self._flows:
            raise KeyError(fid)
        self._root.remove(fid)
        del self._flows[fid]


class _NodeState:
    def __init__(self, switch: RdClosSwitch):
        self.switch = switch
        self.in_used: dict[tuple[int, int], int] = {}  # (micro idx, middle) -> flow
        self.out_used: dict[tuple[int, int], int] = {}
        self.children: dict[int, _NodeState] = {}
        self.flow_color: dict[int, int] = {}
        self.base_flows: dict[int, Flow] = {}

    def add(self, f: Flow) -> bool:
        sw = self.switch
        if sw.is_base:
            self.base_flows[f.id] = f
            return True
        in_micros = sorted(
            {m for p in f.input_ports if (m := sw.input_micro_index(p)) is not None}
        )
        out_micros = sorted(
            {m for p in f.output_ports if (m := sw.output_micro_index(p)) is not None}
        )
        for k in range(sw.mid_count):
            if any((i, k) in self.in_used for i in in_micros):
                continue
            if any((j, k) in self.out_used for j in out_micros):
                continue
            sub = Flow(
                f.id,
                frozenset(sw.middle_port_of(p) for p in f.input_ports),
                frozenset(sw.middle_port_of(p) for p in f.output_ports),
                f.payload_bytes,
                f.op_kind,
            )
            child = self.children.setdefault(k, _NodeState(sw.middle[k]))
            if not child.add(sub):
                continue
            for i in in_micros:
                self.in_used[(i, k)] = f.id
            for j in out_micros:
                self.out_used[(j, k)] = f.id
            self.flow_color[f.id] = k
            return True
        return False

    def remove(self, fid: int) -> None:
        if self.switch.is_base:
            del self.base_flows[fid]
            return
        k = self.flow_color.pop(fid)
        self.in_used = {key: v for key, v in self.in_used.items() if v != fid}
        self.out_used = {key: v for key, v in self.out_used.items() if v != fid}
        self.children[k].remove(fid)
