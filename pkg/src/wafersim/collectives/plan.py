"""Plan data model shared by all collective planners.

A plan is an ordered sequence of steps.  Flows within a step run
concurrently, steps run serially (compound collectives), and ring phases may
be marked pipelined so the simulator overlaps their fused streams
(chunk-pipelined steady state).  Plans carry both the participant-level
semantics (for the token-propagation oracle) and the physical footprint
(per-switch flows for routing, topology links for the bandwidth simulator).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from wafersim.collectives.patterns import CollectivePattern, split_bounds
from wafersim.routing.flows import Flow


class PlanMode(str, Enum):
    IN_NETWORK = "in_network"
    ENDPOINT = "endpoint"


@dataclass(frozen=True)
class PayloadRef:
    """Which part of the payload a flow or transfer carries.

    ``source`` reads the sender's current working buffer ("cur") or its
    original input ("orig").  ``path`` is a chain of (part, of_parts)
    selections applied successively: chunking first, then ring shards, then
    sub-shards of hierarchical rings.
    """

    source: str = "cur"  # "cur" | "orig"
    path: tuple[tuple[int, int], ...] = ()

    def bounds(self, length: int) -> tuple[int, int]:
        lo, hi = 0, length
        for part, parts in self.path:
            slo, shi = split_bounds(hi - lo, parts)[part]
            lo, hi = lo + slo, lo + shi
        return lo, hi


FULL = PayloadRef()


def slice_bytes(payload_bytes: int, ref: PayloadRef) -> int:
    lo, hi = ref.bounds(payload_bytes)
    return hi - lo


@dataclass(frozen=True)
class LogicalFlow:
    """Reduce a set of sources and broadcast to a set of destinations.

    In-network plans realize it with per-switch flows; mesh trees realize it
    directly over topology links.  ``bytes`` is the volume each source
    injects (the streams progress in lockstep through reductions).
    """

    input_npus: tuple[int, ...]
    output_npus: tuple[int, ...]
    payload: PayloadRef
    bytes: int
    switch_flows: tuple[tuple[str, Flow], ...] = ()  # (switch node id, flow)
    links: tuple[str, ...] = ()
    hops: int = 1


@dataclass(frozen=True)
class EndpointTransfer:
    src: int
    dst: int
    payload: PayloadRef
    bytes: int
    accumulate: bool
    links: tuple[str, ...] = ()


@dataclass(frozen=True)
class LocalDelivery:
    npu: int
    payload: PayloadRef


@dataclass(frozen=True)
class PlanStep:
    index: int
    phase: str = "xfer"
    chunk: int = 0
    flows: tuple[LogicalFlow, ...] = ()
    transfers: tuple[EndpointTransfer, ...] = ()
    local: tuple[LocalDelivery, ...] = ()


@dataclass(frozen=True)
class CollectivePlan:
    pattern: CollectivePattern
    mode: PlanMode
    steps: tuple[PlanStep, ...]
    chunks: int = 1
    phases: tuple[str, ...] = ("xfer",)  # execution order of phases
    pipelined: bool = False  # phases overlap (chunk-pipelined steady state)
    serial_steps: bool = True  # steps of one phase are barriered

    def describe_rows(self) -> list[list[str]]:
        rows = [["step", "phase", "chunk", "kind", "sources", "destinations", "bytes"]]
        for step in self.steps:
            for f in step.flows:
                rows.append(
                    [
                        str(step.index),
                        step.phase,
                        str(step.chunk),
                        "flow",
                        " ".join(map(str, f.input_npus)),
                        " ".join(map(str, f.output_npus)),
                        str(f.bytes),
                    ]
                )
            for t in step.transfers:
                rows.append(
                    [
                        str(step.index),
                        step.phase,
                        str(step.chunk),
                        "transfer",
                        str(t.src),
                        str(t.dst),
                        str(t.bytes),
                    ]
                )
            for l in step.local:
                rows.append(
                    [str(step.index), step.phase, str(step.chunk), "local", str(l.npu), str(l.npu), "0"]
                )
        return rows


def injected_traffic(plan: CollectivePlan) -> dict[int, int]:
    """Bytes each NPU sources into the network under the plan."""
    injected: dict[int, int] = {p: 0 for p in plan.pattern.participants}
    for step in plan.steps:
        for f in step.flows:
            for src in f.input_npus:
                injected[src] = injected.get(src, 0) + f.bytes
        for t in step.transfers:
            injected[t.src] = injected.get(t.src, 0) + t.bytes
    return injected
