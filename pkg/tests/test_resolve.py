"""Conflict resolution strategies on the four-flow conflict fixture."""

import pytest

from wafersim.errors import ConstraintViolation
from wafersim.fabric import build_switch
from wafersim.routing import (
    ConflictReport,
    PlacementDelegation,
    ResolutionStrategy,
    RoutingAssignment,
    flow,
    resolve,
    route,
)


def all_reduce(fid, ports):
    return flow(fid, ports, ports, 1 << 20)


EPOCH = [
    all_reduce(0, [0, 4]),
    all_reduce(1, [1, 2]),
    all_reduce(2, [3, 5]),
    all_reduce(3, [6, 7]),
]
SWITCH = build_switch(2, 8)


def test_block_serializes_into_routable_epochs():
    result = resolve(EPOCH, SWITCH, ResolutionStrategy.BLOCK)
    # Victim rule (highest-degree uncolored flow, lowest id on ties) blocks
    # flow 2 out of the triangle; every produced epoch re-routes cleanly.
    assert [[f.id for f in ep] for ep in result.epochs] == [[0, 1, 3], [2]]
    for epoch in result.epochs:
        assert isinstance(route(list(epoch), SWITCH), RoutingAssignment)
    covered = sorted(f.id for ep in result.epochs for f in ep)
    assert covered == [0, 1, 2, 3]


def test_increase_mid_stages_finds_three():
    result = resolve(EPOCH, SWITCH, ResolutionStrategy.INCREASE_MID_STAGES)
    assert result.mid_count == 3
    assert isinstance(result.assignment, RoutingAssignment)


def test_increase_mid_stages_cap_exceeded():
    with pytest.raises(ConstraintViolation):
        resolve(EPOCH, SWITCH, ResolutionStrategy.INCREASE_MID_STAGES, max_mid_count=2)


def test_decompose_rewrites_triangle_keeps_flow_3():
    result = resolve(EPOCH, SWITCH, ResolutionStrategy.DECOMPOSE)
    assert result.decomposed_ids == (0, 1, 2)
    assert [f.id for f in result.in_network] == [3]
    # Ring rewrite of a 2-member all-reduce has 2(s-1) = 2 steps.
    assert len(result.step_epochs) == 2
    for step, assignment in zip(result.step_epochs, result.assignments):
        assert isinstance(assignment, RoutingAssignment)
        ids = {f.id for f in step}
        assert 3 in ids  # the in-network flow rides along every step


def test_placement_strategy_delegates():
    result = resolve(EPOCH, SWITCH, ResolutionStrategy.PLACEMENT)
    assert isinstance(result, PlacementDelegation)


def test_conflict_report_has_recursion_context():
    report = route(EPOCH, SWITCH)
    assert isinstance(report, ConflictReport)
    assert report.path == ()
    assert "middle" in report.message
