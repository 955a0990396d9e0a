"""Routing: conflict graphs, coloring, recursive assignment, functional oracle."""

import itertools
import random

import pytest

from wafersim.errors import InvalidEpochError
from wafersim.fabric import build_switch
from wafersim.routing import (
    ConflictReport,
    IncrementalRouter,
    RoutingAssignment,
    build_conflict_graph,
    color_graph,
    evaluate_assignment,
    flow,
    format_epoch,
    parse_epoch,
    route,
    validate_assignment,
)
from wafersim.routing.conflict import ColoringFailure


def all_reduce(fid, ports, payload=0):
    return flow(fid, ports, ports, payload)


# Concurrent all-reduce epochs standing in for the paper's two routed
# examples: three flows whose conflict graph is a 2-colorable path, and the
# four-flow epoch with a 3-cycle among flows 0, 1, 2 that m=2 cannot route.
THREE_FLOW_EPOCH = [all_reduce(0, [0, 1, 2]), all_reduce(1, [3, 4]), all_reduce(2, [5, 6, 7])]
FOUR_FLOW_CONFLICT_EPOCH = [
    all_reduce(0, [0, 4]),
    all_reduce(1, [1, 2]),
    all_reduce(2, [3, 5]),
    all_reduce(3, [6, 7]),
]


class TestConflictGraph:
    def test_three_flow_epoch_is_a_path(self):
        graph = build_conflict_graph(THREE_FLOW_EPOCH, build_switch(2, 8))
        assert graph.edges == ((0, 1), (1, 2))

    def test_single_flow_has_no_edges(self):
        graph = build_conflict_graph([all_reduce(7, [0, 1])], build_switch(2, 8))
        assert graph.nodes == (7,)
        assert graph.edges == ()

    def test_four_flow_epoch_has_triangle_on_012(self):
        graph = build_conflict_graph(FOUR_FLOW_CONFLICT_EPOCH, build_switch(2, 8))
        assert graph.has_edge(0, 1) and graph.has_edge(1, 2) and graph.has_edge(0, 2)
        assert graph.neighbors(3) == ()

    def test_overlapping_ports_rejected(self):
        with pytest.raises(InvalidEpochError):
            route([all_reduce(0, [0, 1]), all_reduce(1, [1, 2])], build_switch(2, 8))

    def test_dot_output(self):
        graph = build_conflict_graph(THREE_FLOW_EPOCH, build_switch(2, 8))
        dot = graph.to_dot()
        assert dot.startswith("graph")
        assert "f0 -- f1" in dot


class TestColoring:
    def test_path_graph_two_colors_two_one_split(self):
        graph = build_conflict_graph(THREE_FLOW_EPOCH, build_switch(2, 8))
        result = color_graph(graph, 2)
        counts = sorted(
            len([n for n, c in result.colors.items() if c == k]) for k in (0, 1)
        )
        assert counts == [1, 2]

    def test_triangle_fails_with_two_colors(self):
        graph = build_conflict_graph(FOUR_FLOW_CONFLICT_EPOCH, build_switch(2, 8))
        result = color_graph(graph, 2)
        assert isinstance(result, ColoringFailure)
        assert set(result.uncolored) <= {0, 1, 2}

    def test_triangle_succeeds_with_three_colors(self):
        graph = build_conflict_graph(FOUR_FLOW_CONFLICT_EPOCH, build_switch(3, 8))
        result = color_graph(graph, 3)
        assert not isinstance(result, ColoringFailure)
        for a, b in graph.edges:
            assert result.colors[a] != result.colors[b]

    def test_coloring_deterministic(self):
        graph = build_conflict_graph(THREE_FLOW_EPOCH, build_switch(2, 8))
        assert color_graph(graph, 2) == color_graph(graph, 2)


class TestRoute:
    def test_two_all_reduce_flows_with_reduction_on_ports_4_5(self):
        # Green inputs/outputs {0,1,2}, orange {3,4,5}: the input micro-switch
        # covering ports 4 and 5 reduces for the orange flow.
        sw = build_switch(2, 8)
        epoch = [all_reduce(0, [0, 1, 2]), all_reduce(1, [3, 4, 5])]
        result = route(epoch, sw)
        assert isinstance(result, RoutingAssignment)
        cfg_45 = result.root.input_configs[2]
        assert cfg_45.reduce_active
        assert set(cfg_45.port_flows.values()) == {1}
        cfg_01 = result.root.input_configs[0]
        assert cfg_01.reduce_active
        assert set(cfg_01.port_flows.values()) == {0}

    def test_identity_permutation_routes(self):
        sw = build_switch(2, 8)
        epoch = [flow(i, [i], [i]) for i in range(8)]
        assert isinstance(route(epoch, sw), RoutingAssignment)

    def test_four_flow_epoch_conflicts_on_m2(self):
        report = route(FOUR_FLOW_CONFLICT_EPOCH, build_switch(2, 8))
        assert isinstance(report, ConflictReport)
        assert report.depth == 0
        assert set(report.flow_ids) <= {0, 1, 2}

    def test_four_flow_epoch_routes_on_m3(self):
        result = route(FOUR_FLOW_CONFLICT_EPOCH, build_switch(3, 8))
        assert isinstance(result, RoutingAssignment)

    def test_three_flow_epoch_routes_on_m2(self):
        result = route(THREE_FLOW_EPOCH, build_switch(2, 8))
        assert isinstance(result, RoutingAssignment)

    def test_swap_of_ports_1_and_4_resolves_the_conflict(self):
        def swap(p):
            return {1: 4, 4: 1}.get(p, p)

        swapped = [
            flow(f.id, map(swap, f.input_ports), map(swap, f.output_ports))
            for f in FOUR_FLOW_CONFLICT_EPOCH
        ]
        assert isinstance(route(swapped, build_switch(2, 8)), RoutingAssignment)

    def test_routing_deterministic(self):
        sw = build_switch(3, 8)
        a = route(FOUR_FLOW_CONFLICT_EPOCH, sw)
        b = route(FOUR_FLOW_CONFLICT_EPOCH, sw)
        assert a == b

    def test_color_path_reaches_bases(self):
        sw = build_switch(2, 8)
        result = route(THREE_FLOW_EPOCH, sw)
        for f in THREE_FLOW_EPOCH:
            path = result.color_path(f.id)
            assert 1 <= len(path) <= sw.depth()


class TestValidateAssignment:
    def test_all_reduce_sums_to_all_outputs(self):
        sw = build_switch(2, 8)
        epoch = [all_reduce(0, [3, 4, 5])]
        result = route(epoch, sw)
        vectors = {3: (1,), 4: (2,), 5: (4,)}
        outputs = evaluate_assignment(result, vectors)
        assert outputs == {3: (7,), 4: (7,), 5: (7,)}

    def test_multicast_copies(self):
        sw = build_switch(2, 8)
        epoch = [flow(0, [0], [2, 5, 6])]
        result = route(epoch, sw)
        outputs = evaluate_assignment(result, {0: (9,)})
        assert outputs == {2: (9,), 5: (9,), 6: (9,)}

    def test_two_disjoint_all_reduces_match_direct_sums(self):
        rng = random.Random(7)
        sw = build_switch(2, 8)
        for _ in range(50):
            ports = rng.sample(range(8), 6)
            a, b = sorted(ports[:3]), sorted(ports[3:])
            epoch = [all_reduce(0, a), all_reduce(1, b)]
            result = route(epoch, sw)
            if isinstance(result, ConflictReport):
                continue
            vectors = {p: (rng.randrange(100),) for p in ports}
            check = validate_assignment(result, epoch, vectors)
            assert check.ok, check.mismatches

    def test_validation_on_m3_conflict_fixture(self):
        sw = build_switch(3, 8)
        result = route(FOUR_FLOW_CONFLICT_EPOCH, sw)
        vectors = {p: (p + 1,) for p in range(8)}
        check = validate_assignment(result, FOUR_FLOW_CONFLICT_EPOCH, vectors)
        assert check.ok, check.mismatches


class TestNonBlockingProperties:
    def test_all_24_permutations_on_4_ports(self):
        sw = build_switch(2, 4)
        for perm in itertools.permutations(range(4)):
            epoch = [flow(i, [i], [perm[i]]) for i in range(4)]
            result = route(epoch, sw)
            assert isinstance(result, RoutingAssignment), perm
            outputs = evaluate_assignment(result, {i: (10 + i,) for i in range(4)})
            assert outputs == {perm[i]: (10 + i,) for i in range(4)}

    @pytest.mark.parametrize("ports", [8, 16])
    def test_random_permutations_route(self, ports):
        rng = random.Random(123)
        sw = build_switch(2, ports)
        for _ in range(300):
            perm = list(range(ports))
            rng.shuffle(perm)
            epoch = [flow(i, [i], [perm[i]]) for i in range(ports)]
            assert isinstance(route(epoch, sw), RoutingAssignment)

    def test_incremental_unicast_arrivals_never_blocked_m3(self):
        rng = random.Random(5)
        for _ in range(100):
            router = IncrementalRouter(build_switch(3, 8))
            perm = list(range(8))
            rng.shuffle(perm)
            order = list(range(8))
            rng.shuffle(order)
            for i in order:
                assert router.add(flow(i, [i], [perm[i]]))

    def test_incremental_arrivals_and_departures(self):
        rng = random.Random(11)
        router = IncrementalRouter(build_switch(3, 16))
        live: dict[int, int] = {}  # flow id -> (src, dst) bookkeeping via id
        free_src = set(range(16))
        free_dst = set(range(16))
        next_id = 0
        for _ in range(400):
            if live and (rng.random() < 0.4 or not free_src):
                fid = rng.choice(sorted(live))
                src, dst = live.pop(fid)
                router.remove(fid)
                free_src.add(src)
                free_dst.add(dst)
            else:
                src = rng.choice(sorted(free_src))
                dst = rng.choice(sorted(free_dst))
                assert router.add(flow(next_id, [src], [dst]))
                live[next_id] = (src, dst)
                free_src.discard(src)
                free_dst.discard(dst)
                next_id += 1


class TestEpochFiles:
    def test_round_trip(self):
        text = format_epoch(FOUR_FLOW_CONFLICT_EPOCH)
        parsed = parse_epoch(text)
        assert parsed == FOUR_FLOW_CONFLICT_EPOCH

    def test_comments_and_blank_lines(self):
        parsed = parse_epoch("# epoch\n\n0 0,4 0,4\n")
        assert parsed == [all_reduce(0, [0, 4])]
