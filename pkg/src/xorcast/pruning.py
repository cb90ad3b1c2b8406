"""Forward-node selection: flooding baseline plus DP, TDP and PDP.

All three pruning variants reduce to a greedy set cover: from the
candidate set B(u, v) pick relays until the coverage obligation
U(u, v) is exhausted.  Neighborhoods N(.) are closed (a node is its
own neighbor), which keeps the set algebra below uniform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Mapping

from .topology import Topology, neighbor_view


class PruningProtocol(Enum):
    FLOOD = "flood"
    DP = "dp"
    TDP = "tdp"
    PDP = "pdp"


class PruningError(ValueError):
    pass


@dataclass(frozen=True)
class ForwardDecision:
    candidate_set: frozenset[int]
    coverage_set: frozenset[int]
    forward_list: tuple[int, ...]
    # Coverage nodes no candidate can reach; tolerated, not an error.
    uncovered: frozenset[int]


def _closed_hood_union(t: Topology, nodes) -> frozenset[int]:
    out = set(nodes)
    for w in nodes:
        out |= t.adj[w]
    return frozenset(out)


def coverage_sets(protocol: PruningProtocol, t: Topology,
                  u: int | None, v: int) -> tuple[frozenset[int], frozenset[int]]:
    """Candidate set B and coverage obligation U for relay v after
    hearing from u (u is None when v is the broadcast source)."""
    if protocol is PruningProtocol.FLOOD:
        raise PruningError("coverage sets are undefined for flooding")
    nv = neighbor_view(t, v)
    if u is None:
        b = nv.one_hop - {v}
        cov = nv.two_hop - nv.one_hop
        return frozenset(b), frozenset(cov)
    nu = neighbor_view(t, u)
    if u not in nv.one_hop - {v}:
        raise PruningError(f"sender {u} is not adjacent to relay {v}")
    b = nv.one_hop - nu.one_hop
    if protocol is PruningProtocol.DP:
        cov = nv.two_hop - nu.one_hop - nv.one_hop
    elif protocol is PruningProtocol.TDP:
        cov = nv.two_hop - nu.two_hop
    else:  # PDP
        shared = nu.one_hop & nv.one_hop
        cov = (nv.two_hop - nu.one_hop - nv.one_hop
               - _closed_hood_union(t, shared))
    return frozenset(b), frozenset(cov)


def greedy_forward_set(b: frozenset[int], u_set: frozenset[int],
                       one_hop: Mapping[int, frozenset[int]]) -> ForwardDecision:
    """Greedy set cover: repeatedly take the candidate covering the most
    remaining nodes, smallest id on ties."""
    reachable = set()
    for cand in b:
        reachable |= one_hop[cand]
    remaining = set(u_set) & reachable
    uncovered = frozenset(u_set - reachable)
    chosen: list[int] = []
    unused = set(b)
    while remaining:
        best = max(sorted(unused),
                   key=lambda cand: len(one_hop[cand] & remaining))
        chosen.append(best)
        unused.discard(best)
        remaining -= one_hop[best]
    return ForwardDecision(candidate_set=b, coverage_set=u_set,
                           forward_list=tuple(chosen), uncovered=uncovered)


def brute_force_min_forward_set(
        b: frozenset[int], u_set: frozenset[int],
        one_hop: Mapping[int, frozenset[int]]) -> ForwardDecision:
    """Minimum-cardinality cover by exhaustive search; test oracle only.

    Ties break to the lexicographically smallest sorted id list.
    """
    if len(b) > 20:
        raise PruningError(f"candidate set too large for brute force ({len(b)})")
    reachable = set()
    for cand in b:
        reachable |= one_hop[cand]
    target = set(u_set) & reachable
    uncovered = frozenset(u_set - reachable)
    ordered = sorted(b)
    for size in range(len(ordered) + 1):
        for subset in combinations(ordered, size):
            covered = set()
            for cand in subset:
                covered |= one_hop[cand]
            if target <= covered:
                return ForwardDecision(candidate_set=b, coverage_set=u_set,
                                       forward_list=subset,
                                       uncovered=uncovered)
    raise AssertionError("unreachable: full candidate set always covers target")


def select_forwarders(protocol: PruningProtocol, t: Topology,
                      u: int | None, v: int) -> ForwardDecision:
    """Forward decision of relay v for a packet heard from u."""
    if protocol is PruningProtocol.FLOOD:
        nbrs = frozenset(t.neighbors(v))
        return ForwardDecision(candidate_set=nbrs, coverage_set=frozenset(),
                               forward_list=tuple(sorted(nbrs)),
                               uncovered=frozenset())
    b, cov = coverage_sets(protocol, t, u, v)
    hoods = {cand: neighbor_view(t, cand).one_hop for cand in b}
    return greedy_forward_set(b, cov, hoods)


def greedy_cover_bound(u_size: int) -> float:
    """Classical approximation factor of greedy set cover."""
    return 1.0 + math.log(max(u_size, 1))
