"""Conflict graphs over flows and their coloring.

Two flows conflict when they share an input micro-switch or an output
micro-switch; conflicting flows must ride different middle-stage subswitches,
so a proper coloring with at most m colors is a valid middle assignment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from wafersim.fabric.switch import RdClosSwitch
from wafersim.routing.flows import Flow


@dataclass(frozen=True)
class ConflictGraph:
    nodes: tuple[int, ...]
    # weight = number of shared micro-switches (input side + output side)
    weights: dict[tuple[int, int], int]

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.weights))

    def neighbors(self, node: int) -> tuple[int, ...]:
        return tuple(
            sorted(b if a == node else a for a, b in self.weights if node in (a, b))
        )

    def degree(self, node: int) -> int:
        return len(self.neighbors(node))

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.weights

    def subgraph(self, keep: set[int]) -> "ConflictGraph":
        return ConflictGraph(
            nodes=tuple(n for n in self.nodes if n in keep),
            weights={e: w for e, w in self.weights.items() if set(e) <= keep},
        )

    def components(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        comps = []
        for start in self.nodes:
            if start in seen:
                continue
            stack, comp = [start], []
            seen.add(start)
            while stack:
                n = stack.pop()
                comp.append(n)
                for nb in self.neighbors(n):
                    if nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
            comps.append(tuple(sorted(comp)))
        return comps

    def to_dot(self, name: str = "conflicts") -> str:
        lines = [f"graph {name} {{"]
        for n in self.nodes:
            lines.append(f"  f{n};")
        for (a, b), w in sorted(self.weights.items()):
            label = f' [label="{w}"]' if w > 1 else ""
            lines.append(f"  f{a} -- f{b}{label};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_conflict_graph(flows: Sequence[Flow], switch: RdClosSwitch) -> ConflictGraph:
    """Edges join flows sharing an input or output micro-switch of ``switch``."""
    weights: dict[tuple[int, int], int] = {}

    def account(owner_of_micro: dict[int, list[int]]):
        for fids in owner_of_micro.values():
            fids = sorted(set(fids))
            for i in range(len(fids)):
                for j in range(i + 1, len(fids)):
                    key = (fids[i], fids[j])
                    weights[key] = weights.get(key, 0) + 1

    by_in: dict[int, list[int]] = {}
    by_out: dict[int, list[int]] = {}
    for f in flows:
        for p in f.input_ports:
            idx = switch.input_micro_index(p)
            if idx is not None:
                by_in.setdefault(idx, []).append(f.id)
        for p in f.output_ports:
            idx = switch.output_micro_index(p)
            if idx is not None:
                by_out.setdefault(idx, []).append(f.id)
    account(by_in)
    account(by_out)
    return ConflictGraph(
        nodes=tuple(sorted(f.id for f in flows)),
        weights=weights,
    )


@dataclass(frozen=True)
class Coloring:
    colors: dict[int, int]


@dataclass(frozen=True)
class ColoringFailure:
    colors: dict[int, int]
    uncolored: tuple[int, ...]


def greedy_order(graph: ConflictGraph) -> list[int]:
    """Highest degree first, ties broken by lowest flow id."""
    return sorted(graph.nodes, key=lambda n: (-graph.degree(n), n))


def color_graph(graph: ConflictGraph, num_colors: int) -> Coloring | ColoringFailure:
    """Greedy coloring; on failure reports the uncolorable residual set."""
    if num_colors < 2:
        raise ValueError("num_colors must be >= 2")
    colors: dict[int, int] = {}
    uncolored: list[int] = []
    for node in greedy_order(graph):
        taken = {colors[nb] for nb in graph.neighbors(node) if nb in colors}
        free = [c for c in range(num_colors) if c not in taken]
        if free:
            colors[node] = free[0]
        else:
            uncolored.append(node)
    if uncolored:
        return ColoringFailure(colors=colors, uncolored=tuple(sorted(uncolored)))
    return Coloring(colors=colors)


def exact_color(
    graph: ConflictGraph, num_colors: int, node_limit: int = 16
) -> Coloring | None:
    """Deterministic backtracking search; None when no proper coloring exists.

    Only attempted on small graphs (the epochs 3D-parallel phases generate);
    larger graphs fall through to the greedy result.
    """
    nodes = greedy_order(graph)
    if len(nodes) > node_limit:
        return None
    order_pos = {n: i for i, n in enumerate(nodes)}
    neighbors = {n: [nb for nb in graph.neighbors(n)] for n in nodes}
    colors: dict[int, int] = {}

    def assign(i: int) -> bool:
        if i == len(nodes):
            return True
        node = nodes[i]
        taken = {colors[nb] for nb in neighbors[node] if order_pos[nb] < i}
        for c in range(num_colors):
            if c in taken:
                continue
            colors[node] = c
            if assign(i + 1):
                return True
            del colors[node]
        return False

    if assign(0):
        return Coloring(colors=dict(colors))
    return None


def alternating_two_color(flows: Sequence[Flow], switch: RdClosSwitch) -> dict[int, int]:
    """Exact 2-coloring for unicast-only epochs.

    Flows are edges of the bipartite sharing multigraph (input micro-switches
    on one side, output micro-switches on the other, degree <= 2 everywhere),
    so alternating colors along each path/cycle yields a proper coloring.
    This realizes rearrangeable non-blocking unicast routing with m = 2.
    """
    adj: dict[object, list[tuple[int, object]]] = {}
    endpoints: dict[int, tuple[object, object]] = {}
    for f in flows:
        (ip,) = f.input_ports
        (op,) = f.output_ports
        in_idx = switch.input_micro_index(ip)
        out_idx = switch.output_micro_index(op)
        a = ("i", in_idx if in_idx is not None else "odd")
        b = ("o", out_idx if out_idx is not None else "odd")
        adj.setdefault(a, []).append((f.id, b))
        adj.setdefault(b, []).append((f.id, a))
        endpoints[f.id] = (a, b)
    for lst in adj.values():
        lst.sort()

    colors: dict[int, int] = {}

    def walk(start: object, first_color: int):
        node, color = start, first_color
        while True:
            nxt = [(fid, other) for fid, other in adj[node] if fid not in colors]
            if not nxt:
                return
            fid, other = nxt[0]
            colors[fid] = color
            color ^= 1
            node = other

    # Paths first (start from degree-1 nodes), then remaining cycles.
    keys = sorted(adj, key=str)
    for node in keys:
        if len(adj[node]) == 1:
            walk(node, 0)
    for node in keys:
        walk(node, 0)
    assert len(colors) == len(flows)
    return colors
