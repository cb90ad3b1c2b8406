"""Static network topologies and neighborhood queries.

Nodes are dense integers 0..n-1.  Adjacency is symmetric with no
self-edges.  When a topology is built from coordinates, two nodes are
linked iff their euclidean distance is within the radio range
(unit-disk model).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Topology:
    node_count: int
    adj: tuple[frozenset[int], ...]
    positions: tuple[tuple[float, float], ...] | None = None
    radio_range: float | None = None

    def neighbors(self, v: int) -> frozenset[int]:
        if not 0 <= v < self.node_count:
            raise TopologyError(f"unknown node id {v}")
        return self.adj[v]


@dataclass(frozen=True)
class NeighborView:
    """Closed 1-hop set N(v) and 2-hop set N(N(v)) of a node."""

    owner: int
    one_hop: frozenset[int]
    two_hop: frozenset[int]


def _build(n: int, edges: set[tuple[int, int]],
           positions=None, radio_range=None) -> Topology:
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return Topology(
        node_count=n,
        adj=tuple(frozenset(s) for s in adj),
        positions=positions,
        radio_range=radio_range,
    )


def from_edges(n: int, edges) -> Topology:
    """Build a topology from an explicit edge list (no coordinates)."""
    if n < 1:
        raise TopologyError("node count must be >= 1")
    clean: set[tuple[int, int]] = set()
    for a, b in edges:
        if a == b:
            raise TopologyError(f"self-loop on node {a}")
        if not (0 <= a < n and 0 <= b < n):
            raise TopologyError(f"edge ({a}, {b}) outside node range 0..{n - 1}")
        clean.add((min(a, b), max(a, b)))
    return _build(n, clean)


def generate_random_topology(n: int, area: float, radio_range: float,
                             seed: int) -> Topology:
    """Place n nodes uniformly in [0, area]^2; link pairs within range.

    Pure function of its arguments: a fixed seed always reproduces the
    same coordinates and adjacency.
    """
    if n < 1:
        raise TopologyError("node count must be >= 1")
    if area <= 0 or radio_range <= 0:
        raise TopologyError("area and radio range must be positive")
    rng = random.Random(seed)
    positions = tuple((rng.uniform(0.0, area), rng.uniform(0.0, area))
                      for _ in range(n))
    edges = set()
    for a in range(n):
        xa, ya = positions[a]
        for b in range(a + 1, n):
            xb, yb = positions[b]
            if math.dist((xa, ya), (xb, yb)) <= radio_range:
                edges.add((a, b))
    return _build(n, edges, positions=positions, radio_range=radio_range)


def generate_connected_topology(n: int, area: float, radio_range: float,
                                seed: int, max_tries: int = 1000) -> Topology:
    """Deterministically search derived seeds until the graph is connected."""
    for attempt in range(max_tries):
        t = generate_random_topology(n, area, radio_range,
                                     seed if attempt == 0
                                     else (seed * 100003 + attempt))
        if is_connected(t):
            return t
    raise TopologyError(
        f"no connected {n}-node topology found from seed {seed} "
        f"(area={area}, range={radio_range})")


def load_topology(text: str) -> Topology:
    """Parse the edge-list format.

    First line ``nodes <n>``, then ``a b`` pairs, optional
    ``pos <v> <x> <y>`` lines; ``#`` starts a comment.
    """
    n = None
    edges: set[tuple[int, int]] = set()
    pos: dict[int, tuple[float, float]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if fields[0] == "nodes":
                n = int(fields[1])
            elif fields[0] == "pos":
                pos[int(fields[1])] = (float(fields[2]), float(fields[3]))
            else:
                a, b = int(fields[0]), int(fields[1])
                if a == b:
                    raise TopologyError(f"line {lineno}: self-loop on node {a}")
                edges.add((min(a, b), max(a, b)))
        except (IndexError, ValueError) as exc:
            if isinstance(exc, TopologyError):
                raise
            raise TopologyError(f"line {lineno}: cannot parse {raw!r}") from exc
    if n is None:
        raise TopologyError("missing 'nodes <n>' header line")
    if n < 1:
        raise TopologyError("node count must be >= 1")
    for a, b in edges:
        if not (0 <= a < n and 0 <= b < n):
            raise TopologyError(f"edge ({a}, {b}) outside node range 0..{n - 1}")
    positions = None
    if pos:
        if set(pos) != set(range(n)):
            raise TopologyError("pos lines must cover every node or none")
        positions = tuple(pos[v] for v in range(n))
    return _build(n, edges, positions=positions)


def neighbor_view(t: Topology, v: int) -> NeighborView:
    one = frozenset({v} | t.neighbors(v))
    two = set(one)
    for w in one:
        two |= t.adj[w]
    return NeighborView(owner=v, one_hop=one, two_hop=frozenset(two))


def all_neighbor_views(t: Topology) -> tuple[NeighborView, ...]:
    return tuple(neighbor_view(t, v) for v in range(t.node_count))


def is_connected(t: Topology) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in t.adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == t.node_count
