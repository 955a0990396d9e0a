"""Functional oracle for routed epochs.

Propagates per-port value vectors through the configured micro-switches:
input micro-switches with an active reduction merge their two streams, each
stream rides the flow's colored middle subswitch, and output micro-switches
deliver (broadcasting when distribution is active).  Every output port of a
flow must receive the reduction of all its input ports' vectors; ports that
belong to no flow stay untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from wafersim.routing.flows import Flow
from wafersim.routing.router import LevelAssignment, RoutingAssignment

Value = tuple[int, ...]


def vector_sum(a: Value, b: Value) -> Value:
    if len(a) != len(b):
        raise ValueError("vector length mismatch")
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True)
class Mismatch:
    flow_id: int
    port: int
    expected: Value
    actual: Value | None
    path: str


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    mismatches: tuple[Mismatch, ...]


def evaluate_assignment(
    assignment: RoutingAssignment,
    inputs: Mapping[int, Value],
    op: Callable[[Value, Value], Value] = vector_sum,
) -> dict[int, Value]:
    """Run the routed configuration on concrete input-port values."""
    return _evaluate(assignment.root, dict(inputs), op)


def _evaluate(level: LevelAssignment, inputs: dict[int, Value], op) -> dict[int, Value]:
    if level.is_base:
        outputs: dict[int, Value] = {}
        for fid in sorted(level.flows):
            f = level.flows[fid]
            acc = None
            for p in f.sorted_inputs():
                acc = inputs[p] if acc is None else op(acc, inputs[p])
            for p in f.sorted_outputs():
                outputs[p] = acc
        return outputs

    half = level.ports // 2
    odd_port = level.ports - 1 if level.ports % 2 == 1 else None
    mid_inputs: dict[int, dict[int, Value]] = {}

    def feed(middle: int, sub_port: int, value: Value) -> None:
        lane = mid_inputs.setdefault(middle, {})
        assert sub_port not in lane, "two streams on one middle-stage channel"
        lane[sub_port] = value

    for i in range(half):
        config = level.input_configs[i]
        ports = sorted(config.port_flows)
        present = [p for p in ports if p in inputs]
        if not present:
            continue
        if config.reduce_active and len(present) == 2:
            fid = config.port_flows[present[0]]
            value = op(inputs[present[0]], inputs[present[1]])
            feed(level.colors[fid], i, value)
        else:
            for p in present:
                feed(level.colors[config.port_flows[p]], i, inputs[p])
    if odd_port is not None and odd_port in inputs and level.odd_demux_middle is not None:
        feed(level.odd_demux_middle, half, inputs[odd_port])

    mid_outputs = {
        k: _evaluate(level.children[k], lanes, op) for k, lanes in sorted(mid_inputs.items())
    }

    outputs: dict[int, Value] = {}
    for j in range(half):
        config = level.output_configs[j]
        for p, fid in sorted(config.port_flows.items()):
            outputs[p] = mid_outputs[level.colors[fid]][j]
    if odd_port is not None and level.odd_mux_middle is not None:
        fid = next(
            fid for fid, f in level.flows.items() if odd_port in f.output_ports
        )
        outputs[odd_port] = mid_outputs[level.odd_mux_middle][half]
    return outputs


def validate_assignment(
    assignment: RoutingAssignment,
    flows: Sequence[Flow],
    test_vectors: Mapping[int, Value],
    op: Callable[[Value, Value], Value] = vector_sum,
) -> ValidationResult:
    """Check that every flow's outputs carry the reduction of its inputs."""
    actual = evaluate_assignment(assignment, test_vectors, op)
    mismatches: list[Mismatch] = []
    member_outputs: set[int] = set()
    for f in sorted(flows, key=lambda f: f.id):
        expected = None
        for p in f.sorted_inputs():
            v = test_vectors[p]
            expected = v if expected is None else op(expected, v)
        for p in f.sorted_outputs():
            member_outputs.add(p)
            got = actual.get(p)
            if got != expected:
                mismatches.append(
                    Mismatch(f.id, p, expected, got, path=f"output port {p}")
                )
    for p in sorted(set(actual) - member_outputs):
        mismatches.append(
            Mismatch(-1, p, (), actual[p], path=f"unexpected value on port {p}")
        )
    return ValidationResult(ok=not mismatches, mismatches=tuple(mismatches))
