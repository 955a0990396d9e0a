"""Collective patterns and their mathematically defined results.

``expected_state`` is the independent oracle used throughout the tests: it
computes, per participant, the vector that participant must hold after the
collective, straight from the definitions (no plan or network involved).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from wafersim.errors import ConstraintViolation

Vector = tuple[int, ...]


class CollectiveKind(str, Enum):
    UNICAST = "unicast"
    MULTICAST = "multicast"
    REDUCE = "reduce"
    ALL_REDUCE = "all_reduce"
    ALL_REDUCE_FORWARD = "all_reduce_forward"  # experimental
    REDUCE_SCATTER = "reduce_scatter"
    ALL_GATHER = "all_gather"
    SCATTER = "scatter"
    GATHER = "gather"
    ALL_TO_ALL = "all_to_all"


SIMPLE_KINDS = {
    CollectiveKind.UNICAST,
    CollectiveKind.MULTICAST,
    CollectiveKind.REDUCE,
    CollectiveKind.ALL_REDUCE,
    CollectiveKind.ALL_REDUCE_FORWARD,
}
COMPOUND_KINDS = {
    CollectiveKind.REDUCE_SCATTER,
    CollectiveKind.ALL_GATHER,
    CollectiveKind.SCATTER,
    CollectiveKind.GATHER,
    CollectiveKind.ALL_TO_ALL,
}
ROOTED_KINDS = {
    CollectiveKind.UNICAST,
    CollectiveKind.MULTICAST,
    CollectiveKind.REDUCE,
    CollectiveKind.SCATTER,
    CollectiveKind.GATHER,
}


@dataclass(frozen=True)
class CollectivePattern:
    kind: CollectiveKind
    participants: tuple[int, ...]  # ordered, ascending-id shard ownership
    payload_bytes: int
    root: int | None = None  # for rooted patterns
    forward_to: tuple[int, ...] = ()  # all-reduce-forward targets

    def __post_init__(self):
        if len(self.participants) < 1:
            raise ConstraintViolation("a collective needs at least one participant")
        if len(set(self.participants)) != len(self.participants):
            raise ConstraintViolation("duplicate participants")
        if self.payload_bytes <= 0:
            raise ConstraintViolation("payload_bytes must be positive")
        if self.kind in (
            CollectiveKind.ALL_TO_ALL,
            CollectiveKind.REDUCE_SCATTER,
            CollectiveKind.ALL_GATHER,
        ) and len(self.participants) < 2:
            raise ConstraintViolation(f"{self.kind.value} needs >= 2 participants")
        if self.kind in ROOTED_KINDS:
            if self.root is None or self.root not in self.participants:
                raise ConstraintViolation(f"{self.kind.value} needs a participant root")
        if self.kind is CollectiveKind.ALL_REDUCE_FORWARD and not self.forward_to:
            raise ConstraintViolation("all_reduce_forward needs forward targets")


def split_bounds(length: int, parts: int) -> list[tuple[int, int]]:
    """Near-equal split; the remainder goes to the last part."""
    if parts <= 0:
        raise ConstraintViolation("parts must be positive")
    base = length // parts
    bounds = []
    start = 0
    for i in range(parts):
        size = base if i < parts - 1 else length - base * (parts - 1)
        bounds.append((start, start + size))
        start += size
    return bounds


def _vsum(values: Sequence[Vector]) -> Vector:
    acc = list(values[0])
    for v in values[1:]:
        for i, x in enumerate(v):
            acc[i] += x
    return tuple(acc)


def expected_state(
    pattern: CollectivePattern, inputs: Mapping[int, Vector]
) -> dict[int, Vector]:
    """Per-participant vectors after the collective, from first principles.

    Patterns that define only part of the result (reduce-scatter, scatter)
    leave the unspecified regions at the participant's original values, which
    is also what the plans deliver.
    """
    members = list(pattern.participants)
    vecs = {p: tuple(inputs[p]) for p in members}
    length = len(next(iter(vecs.values())))
    if any(len(v) != length for v in vecs.values()):
        raise ConstraintViolation("all input vectors must have equal length")
    kind = pattern.kind
    out = {p: list(vecs[p]) for p in members}

    if kind is CollectiveKind.UNICAST:
        dests = [p for p in members if p != pattern.root]
        (dst,) = dests if dests else (pattern.root,)
        out[dst] = list(vecs[pattern.root])
    elif kind is CollectiveKind.MULTICAST:
        for p in members:
            out[p] = list(vecs[pattern.root])
    elif kind is CollectiveKind.REDUCE:
        out[pattern.root] = list(_vsum([vecs[p] for p in members]))
    elif kind in (CollectiveKind.ALL_REDUCE, CollectiveKind.ALL_REDUCE_FORWARD):
        total = _vsum([vecs[p] for p in members])
        for p in members:
            out[p] = list(total)
        for t in pattern.forward_to:
            out[t] = list(total)
    elif kind is CollectiveKind.REDUCE_SCATTER:
        total = _vsum([vecs[p] for p in members])
        for j, (lo, hi) in enumerate(split_bounds(length, len(members))):
            out[members[j]][lo:hi] = total[lo:hi]
    elif kind is CollectiveKind.ALL_GATHER:
        for j, (lo, hi) in enumerate(split_bounds(length, len(members))):
            for p in members:
                out[p][lo:hi] = vecs[members[j]][lo:hi]
    elif kind is CollectiveKind.SCATTER:
        for j, (lo, hi) in enumerate(split_bounds(length, len(members))):
            out[members[j]][lo:hi] = vecs[pattern.root][lo:hi]
    elif kind is CollectiveKind.GATHER:
        for j, (lo, hi) in enumerate(split_bounds(length, len(members))):
            out[pattern.root][lo:hi] = vecs[members[j]][lo:hi]
    elif kind is CollectiveKind.ALL_TO_ALL:
        bounds = split_bounds(length, len(members))
        for di, dst in enumerate(members):
            for si, src in enumerate(members):
                lo_d, hi_d = bounds[si]
                lo_s, hi_s = bounds[di]
                if hi_d - lo_d != hi_s - lo_s:
                    raise ConstraintViolation(
                        "all_to_all oracle needs vector length divisible by the "
                        "participant count"
                    )
                out[dst][lo_d:hi_d] = vecs[src][lo_s:hi_s]
    else:
        raise ConstraintViolation(f"unsupported pattern {kind}")
    return {p: tuple(v) for p, v in out.items()}
