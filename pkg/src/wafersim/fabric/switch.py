"""Recursive reduce/distribute Clos switch construction.

A switch with P external ports is a (m, n=2, r) Clos network whose 2x2
micro-switches additionally support reducing both inputs into one stream
(R), broadcasting one stream to both outputs (D), or both (RD).  The middle
stage holds m recursively constructed subswitches: m copies of the r-port
switch when P = 2r, m copies of the (r+1)-port switch when P = 2r + 1 (the
last port then reaches the middle stage through a demux/mux adapter pair).
Recursion terminates at atomic 2-port and 3-port base switches.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

from wafersim.errors import ConstraintViolation


class MicroSwitchKind(str, Enum):
    REDUCE = "R"
    DISTRIBUTE = "D"
    REDUCE_DISTRIBUTE = "RD"

    @property
    def can_reduce(self) -> bool:
        return self in (MicroSwitchKind.REDUCE, MicroSwitchKind.REDUCE_DISTRIBUTE)

    @property
    def can_distribute(self) -> bool:
        return self in (MicroSwitchKind.DISTRIBUTE, MicroSwitchKind.REDUCE_DISTRIBUTE)


@dataclass(frozen=True)
class MicroSwitch:
    """One micro-switch element, pinned to a stage at construction time."""

    uid: int
    kind: MicroSwitchKind
    stage: str  # "input" | "output" | "base"
    index: int  # position within its stage
    ports: tuple[int, ...]  # external port indices it serves at this level


@dataclass(frozen=True)
class OddPortAdapter:
    """Demux (input side) or mux (output side) wiring the odd last port."""

    port: int
    side: str  # "demux" | "mux"


@dataclass(frozen=True)
class InternalLink:
    uid: int
    src: str
    dst: str


@dataclass(frozen=True)
class RdClosSwitch:
    """A P-port switch with m middle-stage subswitches, built recursively."""

    mid_count: int
    ports: int
    input_stage: tuple[MicroSwitch, ...]
    output_stage: tuple[MicroSwitch, ...]
    middle: tuple["RdClosSwitch", ...]
    base_element: MicroSwitch | None
    odd_adapters: tuple[OddPortAdapter, ...]
    internal_links: tuple[InternalLink, ...]
    middle_reduce_capable: bool = True

    @property
    def is_base(self) -> bool:
        return self.base_element is not None

    @property
    def half(self) -> int:
        """Number of paired input (or output) micro-switches."""
        return self.ports // 2

    @property
    def is_odd(self) -> bool:
        return self.ports % 2 == 1

    @property
    def odd_port(self) -> int | None:
        return self.ports - 1 if self.is_odd and not self.is_base else None

    def input_micro_index(self, port: int) -> int | None:
        """Input-stage micro-switch serving ``port``; None for the odd port."""
        self._check_port(port)
        if self.is_base:
            return 0
        if port == self.odd_port:
            return None
        return port // 2

    def output_micro_index(self, port: int) -> int | None:
        self._check_port(port)
        if self.is_base:
            return 0
        if port == self.odd_port:
            return None
        return port // 2

    def middle_port_of(self, port: int) -> int:
        """Port index on a middle subswitch that carries this external port."""
        if self.is_base:
            raise ConstraintViolation("base switches have no middle stage")
        self._check_port(port)
        return self.half if port == self.odd_port else port // 2

    def depth(self) -> int:
        """Levels of middle stages below this switch (0 for a base switch)."""
        return 0 if self.is_base else 1 + self.middle[0].depth()

    def iter_micro_switches(self):
        """All micro-switches in the recursive structure, construction order."""
        if self.is_base:
            yield self.base_element
            return
        yield from self.input_stage
        for sub in self.middle:
            yield from sub.iter_micro_switches()
        yield from self.output_stage

    def _check_port(self, port: int) -> None:
        if not 0 <= port < self.ports:
            raise ConstraintViolation(
                f"port {port} out of range for a {self.ports}-port switch"
            )


def build_switch(
    mid_count: int, ports: int, middle_reduce_capable: bool = True
) -> RdClosSwitch:
    """Construct the mid_count-middle-stage switch with the given port count.

    Requires mid_count >= 2 and ports >= 2.  Input-stage micro-switches are
    reduce-capable, output-stage ones distribute-capable, base elements both.
    """
    if mid_count < 2:
        raise ConstraintViolation(f"mid_count must be >= 2, got {mid_count}")
    if ports < 2:
        raise ConstraintViolation(f"ports must be >= 2, got {ports}")
    uids = itertools.count()
    link_uids = itertools.count()
    return _build(mid_count, ports, middle_reduce_capable, uids, link_uids)


def _build(m, ports, middle_reduce_capable, uids, link_uids) -> RdClosSwitch:
    if ports in (2, 3):
        base = MicroSwitch(
            uid=next(uids),
            kind=MicroSwitchKind.REDUCE_DISTRIBUTE,
            stage="base",
            index=0,
            ports=tuple(range(ports)),
        )
        links = tuple(
            InternalLink(next(link_uids), src, dst)
            for p in range(ports)
            for src, dst in ((f"in{p}", "base"), ("base", f"out{p}"))
        )
        return RdClosSwitch(
            mid_count=m,
            ports=ports,
            input_stage=(),
            output_stage=(),
            middle=(),
            base_element=base,
            odd_adapters=(),
            internal_links=links,
            middle_reduce_capable=middle_reduce_capable,
        )

    r = ports // 2
    odd = ports % 2 == 1
    sub_ports = r + 1 if odd else r

    input_stage = tuple(
        MicroSwitch(next(uids), MicroSwitchKind.REDUCE, "input", i, (2 * i, 2 * i + 1))
        for i in range(r)
    )
    middle = tuple(
        _build(m, sub_ports, middle_reduce_capable, uids, link_uids) for _ in range(m)
    )
    output_stage = tuple(
        MicroSwitch(
            next(uids), MicroSwitchKind.DISTRIBUTE, "output", j, (2 * j, 2 * j + 1)
        )
        for j in range(r)
    )
    adapters = (
        (OddPortAdapter(ports - 1, "demux"), OddPortAdapter(ports - 1, "mux"))
        if odd
        else ()
    )

    links = []
    for i in range(r):
        links.append(InternalLink(next(link_uids), f"in{2 * i}", f"imsw{i}"))
        links.append(InternalLink(next(link_uids), f"in{2 * i + 1}", f"imsw{i}"))
        for k in range(m):
            links.append(InternalLink(next(link_uids), f"imsw{i}", f"mid{k}.in{i}"))
    if odd:
        links.append(InternalLink(next(link_uids), f"in{ports - 1}", "idemux"))
        for k in range(m):
            links.append(InternalLink(next(link_uids), "idemux", f"mid{k}.in{r}"))
    for j in range(r):
        for k in range(m):
            links.append(InternalLink(next(link_uids), f"mid{k}.out{j}", f"omsw{j}"))
        links.append(InternalLink(next(link_uids), f"omsw{j}", f"out{2 * j}"))
        links.append(InternalLink(next(link_uids), f"omsw{j}", f"out{2 * j + 1}"))
    if odd:
        for k in range(m):
            links.append(InternalLink(next(link_uids), f"mid{k}.out{r}", "omux"))
        links.append(InternalLink(next(link_uids), "omux", f"out{ports - 1}"))

    return RdClosSwitch(
        mid_count=m,
        ports=ports,
        input_stage=input_stage,
        output_stage=output_stage,
        middle=middle,
        base_element=None,
        odd_adapters=adapters,
        internal_links=tuple(links),
        middle_reduce_capable=middle_reduce_capable,
    )
