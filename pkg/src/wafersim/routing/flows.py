"""Flows: the unit of routing.

A flow reduces the data of a set of input ports and broadcasts the result to
a set of output ports.  Flows of one routing epoch must have pairwise
disjoint input ports and pairwise disjoint output ports (a port side serves
one flow at a time; a port's input side and output side may serve different
flows).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from wafersim.errors import ConstraintViolation, InvalidEpochError


@dataclass(frozen=True)
class Flow:
    id: int
    input_ports: frozenset[int]
    output_ports: frozenset[int]
    payload_bytes: int = 0
    op_kind: str = "sum"

    def __post_init__(self):
        if not self.input_ports:
            raise ConstraintViolation(f"flow {self.id} has no input ports")
        if not self.output_ports:
            raise ConstraintViolation(f"flow {self.id} has no output ports")

    @property
    def is_unicast(self) -> bool:
        return len(self.input_ports) == 1 and len(self.output_ports) == 1

    def sorted_inputs(self) -> tuple[int, ...]:
        return tuple(sorted(self.input_ports))

    def sorted_outputs(self) -> tuple[int, ...]:
        return tuple(sorted(self.output_ports))


def flow(
    fid: int,
    inputs: Iterable[int],
    outputs: Iterable[int],
    payload_bytes: int = 0,
    op_kind: str = "sum",
) -> Flow:
    return Flow(fid, frozenset(inputs), frozenset(outputs), payload_bytes, op_kind)


def validate_epoch(flows: Sequence[Flow], ports: int) -> None:
    """Check flow/port invariants for one epoch; raise on violation."""
    seen_ids = set()
    used_in: dict[int, int] = {}
    used_out: dict[int, int] = {}
    for f in flows:
        if f.id in seen_ids:
            raise InvalidEpochError(f"duplicate flow id {f.id}")
        seen_ids.add(f.id)
        if len(f.input_ports) > ports or len(f.output_ports) > ports:
            raise ConstraintViolation(f"flow {f.id} uses more than {ports} ports")
        for p in f.input_ports:
            if not 0 <= p < ports:
                raise ConstraintViolation(f"flow {f.id}: input port {p} out of range")
            if p in used_in:
                raise InvalidEpochError(
                    f"input port {p} shared by flows {used_in[p]} and {f.id}"
                )
            used_in[p] = f.id
        for p in f.output_ports:
            if not 0 <= p < ports:
                raise ConstraintViolation(f"flow {f.id}: output port {p} out of range")
            if p in used_out:
                raise InvalidEpochError(
                    f"output port {p} shared by flows {used_out[p]} and {f.id}"
                )
            used_out[p] = f.id


def parse_epoch(text: str) -> list[Flow]:
    """Parse a flow-epoch file: one flow per line, ``id ip,ip,... op,op,...``.

    Blank lines and ``#`` comments are skipped.
    """
    flows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ConstraintViolation(
                f"line {lineno}: expected 'id inputs outputs', got {raw!r}"
            )
        try:
            fid = int(parts[0])
            ips = [int(x) for x in parts[1].split(",") if x]
            ops = [int(x) for x in parts[2].split(",") if x]
        except ValueError as exc:
            raise ConstraintViolation(f"line {lineno}: {exc}") from exc
        flows.append(flow(fid, ips, ops))
    return flows


def format_epoch(flows: Sequence[Flow]) -> str:
    lines = [
        f"{f.id} {','.join(map(str, f.sorted_inputs()))} "
        f"{','.join(map(str, f.sorted_outputs()))}"
        for f in sorted(flows, key=lambda f: f.id)
    ]
    return "\n".join(lines) + "\n"
