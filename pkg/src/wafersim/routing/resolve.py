"""Resolution strategies for conflicted routing epochs.

Four ways out of a conflict: serialize some flows into later epochs (block),
rebuild the switch with more middle stages, decompose the conflicting
collectives into endpoint ring unicast sequences, or change the device
placement (delegated to the placement module).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from wafersim.errors import ConstraintViolation
from wafersim.fabric.switch import RdClosSwitch, build_switch
from wafersim.routing.conflict import build_conflict_graph, color_graph, ColoringFailure
from wafersim.routing.flows import Flow
from wafersim.routing.router import ConflictReport, RoutingAssignment, route


class ResolutionStrategy(str, Enum):
    BLOCK = "block"
    INCREASE_MID_STAGES = "increase_mid_stages"
    DECOMPOSE = "decompose"
    PLACEMENT = "placement"


@dataclass(frozen=True)
class BlockResolution:
    epochs: tuple[tuple[Flow, ...], ...]
    assignments: tuple[RoutingAssignment, ...]


@dataclass(frozen=True)
class MidStageIncrease:
    mid_count: int
    switch: RdClosSwitch
    assignment: RoutingAssignment


@dataclass(frozen=True)
class DecompositionResolution:
    in_network: tuple[Flow, ...]
    decomposed_ids: tuple[int, ...]
    # step t routes in_network flows plus every decomposed flow's step-t unicasts
    step_epochs: tuple[tuple[Flow, ...], ...]
    assignments: tuple[RoutingAssignment, ...]


@dataclass(frozen=True)
class PlacementDelegation:
    message: str


def resolve(
    flows: Sequence[Flow],
    switch: RdClosSwitch,
    strategy: ResolutionStrategy,
    max_mid_count: int = 6,
):
    flows = tuple(sorted(flows, key=lambda f: f.id))
    if strategy is ResolutionStrategy.BLOCK:
        return _resolve_block(flows, switch)
    if strategy is ResolutionStrategy.INCREASE_MID_STAGES:
        return _resolve_increase(flows, switch, max_mid_count)
    if strategy is ResolutionStrategy.DECOMPOSE:
        return _resolve_decompose(flows, switch)
    if strategy is ResolutionStrategy.PLACEMENT:
        return PlacementDelegation(
            message="remap the conflicting workers onto different ports via the "
            "placement module and re-route"
        )
    raise ValueError(f"unknown strategy {strategy}")


def _block_victim(flows, switch, report: ConflictReport) -> int:
    """Highest-degree flow among the unroutable ones, ties by lowest id."""
    graph = build_conflict_graph(flows, switch)
    candidates = [fid for fid in report.flow_ids if fid in graph.nodes]
    if not candidates:
        candidates = list(report.flow_ids)
    return max(candidates, key=lambda fid: (graph.degree(fid), -fid))


def _resolve_block(flows, switch) -> BlockResolution:
    epochs: list[tuple[Flow, ...]] = []
    assignments: list[RoutingAssignment] = []
    pending = list(flows)
    while pending:
        blocked: list[Flow] = []
        current = list(pending)
        result = route(current, switch)
        while isinstance(result, ConflictReport):
            victim = _block_victim(current, switch, result)
            blocked.extend(f for f in current if f.id == victim)
            current = [f for f in current if f.id != victim]
            result = route(current, switch)
        epochs.append(tuple(current))
        assignments.append(result)
        pending = blocked
    return BlockResolution(epochs=tuple(epochs), assignments=tuple(assignments))


def _resolve_increase(flows, switch, max_mid_count) -> MidStageIncrease:
    for m in range(switch.mid_count + 1, max_mid_count + 1):
        candidate = build_switch(m, switch.ports, switch.middle_reduce_capable)
        result = route(flows, candidate)
        if isinstance(result, RoutingAssignment):
            return MidStageIncrease(mid_count=m, switch=candidate, assignment=result)
    raise ConstraintViolation(
        f"no middle-stage count up to {max_mid_count} routes the epoch"
    )


def ring_unicast_steps(f: Flow) -> list[list[Flow]]:
    """Endpoint ring rewrite of an in-network flow.

    All-reduce style flows (inputs == outputs) become the 2(s-1) ring steps
    in which every participant sends to its successor; other flows fall back
    to a full serial unicast sweep, the worst-case decomposition.
    """
    ips, ops = f.sorted_inputs(), f.sorted_outputs()
    if set(ips) == set(ops):
        members = list(ips)
        s = len(members)
        if s == 1:
            return []
        step = [
            Flow(
                f.id * 1000 + i,
                frozenset({members[i]}),
                frozenset({members[(i + 1) % s]}),
                f.payload_bytes // max(1, s),
                f.op_kind,
            )
            for i in range(s)
        ]
        return [list(step) for _ in range(2 * (s - 1))]
    steps = []
    seq = 0
    for ip in ips:
        for op in ops:
            steps.append(
                [Flow(f.id * 1000 + seq, frozenset({ip}), frozenset({op}), f.payload_bytes, f.op_kind)]
            )
            seq += 1
    return steps


def _resolve_decompose(flows, switch) -> DecompositionResolution:
    graph = build_conflict_graph(flows, switch)
    by_id = {f.id: f for f in flows}

    decomposed: set[int] = set()
    coloring = color_graph(graph, switch.mid_count)
    if isinstance(coloring, ColoringFailure):
        for comp in graph.components():
            sub = graph.subgraph(set(comp))
            if isinstance(color_graph(sub, switch.mid_count), ColoringFailure):
                decomposed.update(comp)

    def step_epochs_for(decomposed_ids: set[int]):
        keep = tuple(f for f in flows if f.id not in decomposed_ids)
        rings = {fid: ring_unicast_steps(by_id[fid]) for fid in sorted(decomposed_ids)}
        n_steps = max((len(s) for s in rings.values()), default=0)
        epochs = []
        for t in range(max(n_steps, 1)):
            epoch = list(keep)
            for fid in sorted(rings):
                if t < len(rings[fid]):
                    epoch.extend(rings[fid][t])
            epochs.append(tuple(epoch))
        return keep, epochs

    while True:
        keep, epochs = step_epochs_for(decomposed)
        assignments = []
        failed = None
        for epoch in epochs:
            result = route(epoch, switch)
            if isinstance(result, ConflictReport):
                failed = result
                break
            assignments.append(result)
        if failed is None:
            return DecompositionResolution(
                in_network=keep,
                decomposed_ids=tuple(sorted(decomposed)),
                step_epochs=tuple(epochs),
                assignments=tuple(assignments),
            )
        # Conflicts left: decompose the surviving in-network flows involved.
        survivors = {fid for fid in failed.flow_ids if fid in by_id and fid not in decomposed}
        if not survivors:
            survivors = {fid for fid in by_id if fid not in decomposed}
            if not survivors:
                raise ConstraintViolation("decomposition cannot resolve the epoch")
        decomposed.update(survivors)
