"""Single-switch collective plans.

Simple patterns compile to exactly one flow.  Compound patterns break into
serial steps of simple flows, one step per participant: reduce-scatter into
reduces (step j produces owner j's shard), all-gather into multicasts,
scatter/gather into unicasts, and all-to-all into steps where every input
sends to the output at the step's ring distance (self-delivery is a local
record with zero network cost).
"""

from __future__ import annotations

from wafersim.collectives.patterns import (
    COMPOUND_KINDS,
    SIMPLE_KINDS,
    CollectiveKind,
    CollectivePattern,
)
from wafersim.collectives.plan import (
    FULL,
    CollectivePlan,
    LocalDelivery,
    LogicalFlow,
    PayloadRef,
    PlanMode,
    PlanStep,
    slice_bytes,
)
from wafersim.errors import ConstraintViolation
from wafersim.routing.flows import Flow

SWITCH_NODE = "switch"


def _one_flow(fid, ips, ops, payload, nbytes, switch_node=SWITCH_NODE):
    return LogicalFlow(
        input_npus=tuple(sorted(ips)),
        output_npus=tuple(sorted(ops)),
        payload=payload,
        bytes=nbytes,
        switch_flows=((switch_node, Flow(fid, frozenset(ips), frozenset(ops), nbytes)),),
    )


def plan_simple(pattern: CollectivePattern, switch_ports: int) -> CollectivePlan:
    """One-flow plan for a simple pattern, participants as switch ports."""
    if pattern.kind not in SIMPLE_KINDS:
        raise ConstraintViolation(f"{pattern.kind.value} is not a simple pattern")
    _check_ports(pattern, switch_ports)
    members = pattern.participants
    full = PayloadRef("full")
    d = pattern.payload_bytes
    kind = pattern.kind
    if kind is CollectiveKind.ALL_REDUCE:
        f = _one_flow(0, members, members, full, d)
    elif kind is CollectiveKind.ALL_REDUCE_FORWARD:
        outputs = tuple(sorted(set(members) | set(pattern.forward_to)))
        f = _one_flow(0, members, outputs, full, d)
    elif kind is CollectiveKind.REDUCE:
        f = _one_flow(0, members, [pattern.root], full, d)
    elif kind is CollectiveKind.MULTICAST:
        dests = [p for p in members if p != pattern.root]
        if not dests:
            raise ConstraintViolation("multicast needs at least one destination")
        f = _one_flow(0, [pattern.root], dests, full, d)
    elif kind is CollectiveKind.UNICAST:
        dests = [p for p in members if p != pattern.root]
        if len(dests) != 1:
            raise ConstraintViolation("unicast needs exactly one destination")
        f = _one_flow(0, [pattern.root], dests, full, d)
    else:  # pragma: no cover
        raise ConstraintViolation(f"unhandled simple kind {kind}")
    step = PlanStep(index=0, flows=(f,))
    return CollectivePlan(pattern=pattern, mode=PlanMode.IN_NETWORK, steps=(step,))


def plan_compound(pattern: CollectivePattern, switch_ports: int) -> CollectivePlan:
    """Serial-step plan for a compound pattern, participants as switch ports."""
    if pattern.kind not in COMPOUND_KINDS:
        raise ConstraintViolation(f"{pattern.kind.value} is not a compound pattern")
    _check_ports(pattern, switch_ports)
    members = list(pattern.participants)
    n = len(members)
    d = pattern.payload_bytes
    kind = pattern.kind
    steps: list[PlanStep] = []

    def shard(j, orig=False):
        return PayloadRef("orig_shard" if orig else "shard", 0, j)

    if kind is CollectiveKind.REDUCE_SCATTER:
        for j in range(n):
            ref = shard(j)
            f = _one_flow(j, members, [members[j]], ref, slice_bytes(d, ref, 1, n))
            steps.append(PlanStep(index=j, flows=(f,)))
    elif kind is CollectiveKind.ALL_GATHER:
        for j in range(n):
            ref = shard(j, orig=True)
            dests = [p for p in members if p != members[j]]
            f = _one_flow(j, [members[j]], dests, ref, slice_bytes(d, ref, 1, n))
            steps.append(
                PlanStep(index=j, flows=(f,), local=(LocalDelivery(members[j], ref),))
            )
    elif kind is CollectiveKind.SCATTER:
        for j in range(n):
            ref = shard(j, orig=True)
            if members[j] == pattern.root:
                steps.append(PlanStep(index=j, local=(LocalDelivery(pattern.root, ref),)))
            else:
                f = _one_flow(j, [pattern.root], [members[j]], ref, slice_bytes(d, ref, 1, n))
                steps.append(PlanStep(index=j, flows=(f,)))
    elif kind is CollectiveKind.GATHER:
        for j in range(n):
            ref = shard(j, orig=True)
            if members[j] == pattern.root:
                steps.append(PlanStep(index=j, local=(LocalDelivery(pattern.root, ref),)))
            else:
                f = _one_flow(j, [members[j]], [pattern.root], ref, slice_bytes(d, ref, 1, n))
                steps.append(PlanStep(index=j, flows=(f,)))
    elif kind is CollectiveKind.ALL_TO_ALL:
        # Step j: input at position idx unicasts to the output at distance j.
        for j in range(1, n + 1):
            flows = []
            local = []
            for idx in range(n):
                dst_idx = (idx + j) % n
                ref = PayloadRef("orig_shard", 0, dst_idx)
                if dst_idx == idx:
                    local.append(LocalDelivery(members[idx], ref))
                    continue
                flows.append(
                    _one_flow(
                        idx,
                        [members[idx]],
                        [members[dst_idx]],
                        ref,
                        slice_bytes(d, ref, 1, n),
                    )
                )
            steps.append(PlanStep(index=j - 1, flows=tuple(flows), local=tuple(local)))
    else:  # pragma: no cover
        raise ConstraintViolation(f"unhandled compound kind {kind}")

    return CollectivePlan(
        pattern=pattern,
        mode=PlanMode.IN_NETWORK,
        steps=tuple(steps),
        shards=n,
        serial_steps=True,
    )


def _check_ports(pattern: CollectivePattern, switch_ports: int) -> None:
    everyone = set(pattern.participants) | set(pattern.forward_to)
    for p in everyone:
        if not 0 <= p < switch_ports:
            raise ConstraintViolation(
                f"participant {p} is not a port of a {switch_ports}-port switch; "
                "use a hierarchical plan for multi-switch participant sets"
            )
