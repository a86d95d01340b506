"""Best-first search for swap sequences that make a set of CNOTs executable."""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Sequence

from .mapping import Mapping, SwapOp, apply_swap, apply_swaps
from .topology import CouplingGraph

logger = logging.getLogger(__name__)

Target = tuple[int, int]  # logical (control, target) of a blocked cx


class SearchAborted(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchParams:
    m_extra_expansions: int = 20
    k_gate_ratio: float = 2.0
    expand_per_step: int = 1
    deeper_levels: int = 0
    max_expansions_hard_cap: int = 100_000

    def __post_init__(self):
        if self.m_extra_expansions < 0:
            raise ValueError("m must be >= 0")
        if self.k_gate_ratio < 1:
            raise ValueError("k must be >= 1")
        if self.expand_per_step < 1:
            raise ValueError("expand must be >= 1")
        if self.deeper_levels < 0:
            raise ValueError("deeper must be >= 0")
        if self.max_expansions_hard_cap < 1:
            raise ValueError("hard cap must be >= 1")


@dataclass(frozen=True)
class SearchNode:
    mapping: Mapping
    swaps_so_far: tuple[SwapOp, ...]
    g_cost: int
    h_cost: int
    depth: int


@dataclass(frozen=True)
class MappingCandidate:
    swaps: tuple[SwapOp, ...]
    final_mapping: Mapping
    swap_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "swap_count", len(self.swaps))


def heuristic_cost(pi: Mapping, targets: Sequence[Target], dist) -> int:
    """Sum of excess hops, zero exactly when every target is adjacent."""
    return sum(dist[pi.phys(c)][pi.phys(t)] - 1 for c, t in targets)


def _lower_bound(pi: Mapping, targets: Sequence[Target], dist, per_swap: int) -> int:
    # one swap relocates two logical qubits by one hop each, so the excess
    # sum drops by at most `per_swap`; no single target drops by more than 1
    excess = [dist[pi.phys(c)][pi.phys(t)] - 1 for c, t in targets]
    total = sum(excess)
    return max(max(excess, default=0), -(-total // per_swap))


def is_goal(pi: Mapping, targets: Sequence[Target], g: CouplingGraph) -> bool:
    return all(g.adjacent(pi.phys(c), pi.phys(t)) for c, t in targets)


def successors(node: SearchNode, g: CouplingGraph, targets: Sequence[Target] = (), dist=None) -> list[SearchNode]:
    """One child per coupling-graph link, in sorted link order."""
    dist = dist if dist is not None else g.distance
    out = []
    for a, b in g.undirected_edges:
        s = SwapOp(a, b)
        pi = apply_swap(node.mapping, s)
        h = heuristic_cost(pi, targets, dist) if targets else 0
        out.append(SearchNode(pi, node.swaps_so_far + (s,), node.g_cost + 1, h, node.depth + 1))
    return out


def resolve_conflicts(pi: Mapping, targets: Sequence[Target], g: CouplingGraph,
                      params: SearchParams = SearchParams()) -> list[MappingCandidate]:
    """Collect swap sequences that make every target executable.

    Nodes are popped in (lower bound + swaps, deepest first, sequence) order
    and only swaps touching a target qubit are generated. After the
    first goal (``s_min`` swaps) the search runs ``m`` more expansion steps;
    popping anything with more than ``k * s_min`` swaps ends it. Each step
    expands ``expand_per_step`` nodes. With ``deeper_levels`` the search then
    keeps going for up to ``m * deeper`` further steps, restricted to nodes
    at most ``deeper`` swaps past ``s_min``.
    """
    targets = list(targets)
    if not targets:
        raise ValueError("resolve_conflicts needs at least one target")
    if is_goal(pi, targets, g):
        raise ValueError("no target is blocked under the current mapping")
    dist = g.distance
    qubit_use: dict[int, int] = {}
    for c, t in targets:
        qubit_use[c] = qubit_use.get(c, 0) + 1
        qubit_use[t] = qubit_use.get(t, 0) + 1
    per_swap = 2 * max(qubit_use.values())

    involved = sorted(qubit_use)
    nbrs = g.neighbors

    def moves(cur: Mapping) -> list[SwapOp]:
        # a swap between two non-target qubits never changes adjacency of a
        # target, so dropping it keeps the minimum swap count exact
        out = set()
        for lq in involved:
            a = cur.log_to_phys[lq]
            for b in nbrs[a]:
                out.add(SwapOp(a, b) if a < b else SwapOp(b, a))
        return sorted(out)

    # ties on f go to the deeper node, which reaches goals sooner
    heap = [(_lower_bound(pi, targets, dist, per_swap), 0, (), pi)]
    seen = {(pi, 0)}
    found: list[MappingCandidate] = []
    s_min: int | None = None
    expansions = 0
    steps_after_goal = 0
    deeper_budget = params.m_extra_expansions * params.deeper_levels

    while heap:
        in_deeper = s_min is not None and steps_after_goal >= params.m_extra_expansions
        if in_deeper and steps_after_goal >= params.m_extra_expansions + deeper_budget:
            break
        batch = []
        stop = False
        while heap and len(batch) < params.expand_per_step:
            f, neg, swaps, cur = heapq.heappop(heap)
            gc = -neg
            if s_min is not None and gc > params.k_gate_ratio * s_min:
                stop = True
                break
            if in_deeper and gc > s_min + params.deeper_levels:
                continue
            if is_goal(cur, targets, g):
                if s_min is None:
                    s_min = gc
                found.append(MappingCandidate(swaps, cur))
                continue
            batch.append((gc, swaps, cur))
        if stop:
            break
        for gc, swaps, cur in batch:
            expansions += 1
            if expansions > params.max_expansions_hard_cap:
                raise SearchAborted(
                    f"search exceeded {params.max_expansions_hard_cap} expansions "
                    f"({len(targets)} targets, params={params})")
            last = swaps[-1] if swaps else None
            for s in moves(cur):
                if s == last:
                    continue
                nxt = apply_swap(cur, s)
                key = (nxt, gc + 1)
                if key in seen:
                    continue
                if in_deeper and gc + 1 > s_min + params.deeper_levels:
                    continue
                seen.add(key)
                lb = _lower_bound(nxt, targets, dist, per_swap)
                heapq.heappush(heap, (gc + 1 + lb, -(gc + 1), swaps + (s,), nxt))
        if s_min is not None and batch:
            steps_after_goal += 1

    assert found, "search space exhausted without a goal on a connected graph"
    logger.debug("resolve_conflicts: %d candidates, s_min=%s, %d expansions", len(found), s_min, expansions)
    return found


def replay(pi: Mapping, cand: MappingCandidate) -> Mapping:
    return apply_swaps(pi, cand.swaps)
