"""Structural checks on the recursive switch construction."""

import math

import pytest

from wafersim.errors import ConstraintViolation
from wafersim.fabric import MicroSwitchKind, build_switch


def walk_structure(switch, expected_ports):
    """Oracle: walk the even/odd recursion and check counts at every level."""
    assert switch.ports == expected_ports
    if expected_ports in (2, 3):
        assert switch.is_base
        assert switch.base_element.kind is MicroSwitchKind.REDUCE_DISTRIBUTE
        assert switch.base_element.ports == tuple(range(expected_ports))
        return
    r = expected_ports // 2
    odd = expected_ports % 2 == 1
    assert len(switch.input_stage) == r
    assert len(switch.output_stage) == r
    assert len(switch.middle) == switch.mid_count
    assert bool(switch.odd_adapters) == odd
    sub_ports = r + 1 if odd else r
    for sub in switch.middle:
        walk_structure(sub, sub_ports)


def test_fred2_8_structure():
    sw = build_switch(2, 8)
    assert len(sw.input_stage) == 4
    assert len(sw.output_stage) == 4
    assert len(sw.middle) == 2
    for sub in sw.middle:
        assert sub.ports == 4
        assert not sub.is_base
        for base in sub.middle:
            assert base.ports == 2
            assert base.is_base


def test_fred2_2_is_single_base_element():
    sw = build_switch(2, 2)
    assert sw.is_base
    assert sw.base_element.kind is MicroSwitchKind.REDUCE_DISTRIBUTE
    assert not sw.middle


def test_odd_port_recursion_m3_p11():
    # 11 -> r=5 -> middle ports 6 -> 3 -> base, with adapters on port 10.
    sw = build_switch(3, 11)
    walk_structure(sw, 11)
    assert {a.side for a in sw.odd_adapters} == {"demux", "mux"}
    assert all(a.port == 10 for a in sw.odd_adapters)
    assert sw.middle[0].ports == 6
    assert sw.middle[0].middle[0].ports == 3
    assert sw.middle[0].middle[0].is_base


@pytest.mark.parametrize("ports", [2, 4, 8, 16])
def test_recursion_depth_power_of_two(ports):
    sw = build_switch(2, ports)
    expected = max(0, math.ceil(math.log2(ports)) - 1)
    assert sw.depth() == expected


@pytest.mark.parametrize("m,ports", [(2, 4), (2, 8), (3, 8), (3, 11), (2, 16), (4, 10)])
def test_port_conservation(m, ports):
    # Channels fanned into each middle equal that middle's external ports.
    sw = build_switch(m, ports)
    stack = [sw]
    while stack:
        node = stack.pop()
        if node.is_base:
            continue
        fanned = len(node.input_stage) + (1 if node.is_odd else 0)
        for sub in node.middle:
            assert sub.ports == fanned
            stack.append(sub)


def test_stage_kinds_fixed_at_construction():
    sw = build_switch(2, 8)
    assert all(ms.kind is MicroSwitchKind.REDUCE for ms in sw.input_stage)
    assert all(ms.kind is MicroSwitchKind.DISTRIBUTE for ms in sw.output_stage)


def test_internal_link_endpoints_valid():
    sw = build_switch(3, 11)
    r = sw.half
    valid_prefixes = {"in", "out", "imsw", "omsw", "mid", "idemux", "omux", "base"}
    for link in sw.internal_links:
        for end in (link.src, link.dst):
            assert any(end.startswith(p) for p in valid_prefixes), end
    # Every input micro-switch fans out to every middle subswitch.
    for i in range(r):
        for k in range(sw.mid_count):
            assert any(
                l.src == f"imsw{i}" and l.dst == f"mid{k}.in{i}"
                for l in sw.internal_links
            )


def test_micro_switch_ids_unique_and_deterministic():
    a = build_switch(3, 11)
    b = build_switch(3, 11)
    uids_a = [ms.uid for ms in a.iter_micro_switches()]
    uids_b = [ms.uid for ms in b.iter_micro_switches()]
    assert uids_a == uids_b
    assert len(uids_a) == len(set(uids_a))


@pytest.mark.parametrize("m,ports", [(1, 8), (0, 4), (2, 1), (3, 0)])
def test_rejects_bad_parameters(m, ports):
    with pytest.raises(ConstraintViolation):
        build_switch(m, ports)
