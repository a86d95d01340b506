"""Dependency graph, latency model and schedule analysis of a circuit."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .qasm import RawGate, SourceCircuit


class CycleError(ValueError):
    pass


@dataclass(frozen=True)
class LatencyModel:
    """Gate latencies in cycles.

    ``swap_cycles`` defaults to three CNOTs when left as ``None``.
    """

    single_qubit_cycles: int = 1
    cnot_cycles: int = 2
    swap_cycles: int | None = None

    def __post_init__(self):
        if self.single_qubit_cycles < 1 or self.cnot_cycles < 1:
            raise ValueError("latencies must be >= 1")
        if self.swap_cycles is not None and self.swap_cycles < 1:
            raise ValueError("latencies must be >= 1")

    @classmethod
    def unit(cls) -> "LatencyModel":
        # swap = three 1-cycle CNOTs on bidirectional links
        return cls(1, 1)

    @property
    def swap(self) -> int:
        return self.swap_cycles if self.swap_cycles is not None else 3 * self.cnot_cycles

    def latency(self, gate: RawGate) -> int:
        if gate.name in ("barrier", "measure"):
            return 0
        if gate.name == "swap":
            return self.swap
        if gate.name == "cx":
            return self.cnot_cycles
        return self.single_qubit_cycles


class DepGraph:
    """Gate dependency DAG.

    Nodes ``0..n-1`` are the gates. Each qubit also has an implicit dummy
    source node (start 0, latency 0) which is not materialised: a gate
    without predecessors simply starts at cycle 0. ``qubit_preds[i][k]`` is
    the gate preceding ``i`` on its ``k``-th qubit (``None`` for the dummy).
    """

    def __init__(self, num_nodes: int, preds: Sequence[Sequence[int]], *,
                 gates: Sequence[RawGate] | None = None, num_qubits: int = 0,
                 latencies: Sequence[int] | None = None,
                 qubit_preds: Sequence[Sequence[int | None]] | None = None,
                 chains: Sequence[Sequence[int]] | None = None):
        self.num_nodes = num_nodes
        self.gates = list(gates) if gates is not None else None
        self.num_qubits = num_qubits
        self.preds = [tuple(sorted(set(p))) for p in preds]
        succs: list[list[int]] = [[] for _ in range(num_nodes)]
        for n, ps in enumerate(self.preds):
            for p in ps:
                succs[p].append(n)
        self.succs = [tuple(sorted(s)) for s in succs]
        self._latencies = list(latencies) if latencies is not None else None
        self.qubit_preds = [tuple(q) for q in qubit_preds] if qubit_preds is not None else None
        self.chains = [tuple(c) for c in chains] if chains is not None else []

    @classmethod
    def from_edges(cls, num_nodes: int, edges: Iterable[tuple[int, int]],
                   latencies: Sequence[int]) -> "DepGraph":
        preds: list[list[int]] = [[] for _ in range(num_nodes)]
        for a, b in edges:
            preds[b].append(a)
        return cls(num_nodes, preds, latencies=latencies)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(p, n) for n in range(self.num_nodes) for p in self.preds[n]]

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        indeg = [len(p) for p in self.preds]
        ready = [n for n in range(self.num_nodes) if indeg[n] == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            n = heapq.heappop(ready)
            order.append(n)
            for s in self.succs[n]:
                indeg[s] -= 1
                if indeg[s] == 0:
                    heapq.heappush(ready, s)
        if len(order) != self.num_nodes:
            raise CycleError("dependency graph contains a cycle")
        return tuple(order)

    def latencies(self, lm: LatencyModel) -> list[int]:
        if self._latencies is not None:
            return list(self._latencies)
        if self.gates is None:
            raise ValueError("graph has neither gates nor explicit latencies")
        return [lm.latency(g) for g in self.gates]

    def to_dot(self, lm: LatencyModel) -> str:
        es = earliest_starts(self, lm)
        lat = self.latencies(lm)
        out = ["digraph deps {"]
        for q in range(self.num_qubits):
            out.append(f'  d{q} [label="q{q} [0,0]", shape=point];')
        for n in range(self.num_nodes):
            out.append(f'  g{n} [label="g{n} [{es[n]},{es[n] + lat[n]}]"];')
        for q, chain in enumerate(self.chains):
            if chain:
                out.append(f"  d{q} -> g{chain[0]};")
        out += [f"  g{a} -> g{b};" for a, b in self.edges]
        out.append("}")
        return "\n".join(out) + "\n"


def build_dep_graph(circuit: SourceCircuit) -> DepGraph:
    last: list[int | None] = [None] * circuit.num_qubits
    chains: list[list[int]] = [[] for _ in range(circuit.num_qubits)]
    preds, qpreds = [], []
    for i, g in enumerate(circuit.gates):
        qp = tuple(last[q] for q in g.qubits)
        qpreds.append(qp)
        preds.append([p for p in qp if p is not None])
        for q in g.qubits:
            last[q] = i
            chains[q].append(i)
    return DepGraph(len(circuit.gates), preds, gates=circuit.gates,
                    num_qubits=circuit.num_qubits, qubit_preds=qpreds, chains=chains)


def earliest_starts(dg: DepGraph, lm: LatencyModel, order: Sequence[int] | None = None) -> list[int]:
    """ASAP start cycle of every node, relaxed in topological order."""
    lat = dg.latencies(lm)
    if order is None:
        order = dg.topological_order
    es = [0] * dg.num_nodes
    done = [False] * dg.num_nodes
    for n in order:
        t = 0
        for p in dg.preds[n]:
            if not done[p]:
                raise CycleError(f"node {p} visited after its successor {n}")
            t = max(t, es[p] + lat[p])
        es[n] = t
        done[n] = True
    return es


def critical_path(dg: DepGraph, lm: LatencyModel) -> int:
    es = earliest_starts(dg, lm)
    lat = dg.latencies(lm)
    return max((s + l for s, l in zip(es, lat)), default=0)


def latest_starts(dg: DepGraph, lm: LatencyModel, horizon: int | None = None) -> list[int]:
    """ALAP start cycles against ``horizon`` (the critical path by default)."""
    lat = dg.latencies(lm)
    if horizon is None:
        horizon = critical_path(dg, lm)
    ls = [0] * dg.num_nodes
    for n in reversed(dg.topological_order):
        finish = min((ls[s] for s in dg.succs[n]), default=horizon)
        ls[n] = finish - lat[n]
    return ls


def total_float(dg: DepGraph, lm: LatencyModel) -> list[int]:
    es = earliest_starts(dg, lm)
    ls = latest_starts(dg, lm)
    return [b - a for a, b in zip(es, ls)]


@dataclass(frozen=True)
class Layering:
    layers: tuple[frozenset[int], ...]

    def __len__(self) -> int:
        return len(self.layers)


def partition_layers(dg: DepGraph, lm: LatencyModel) -> Layering:
    """Group nodes by earliest start time, in start-time order.

    Zero-latency nodes (barriers, measurements) can share a start time with a
    dependent gate; such groups are split by their internal dependency depth
    so every layer stays qubit-disjoint.
    """
    es = earliest_starts(dg, lm)
    groups: dict[int, list[int]] = {}
    for n in dg.topological_order:
        groups.setdefault(es[n], []).append(n)
    layers = []
    for t in sorted(groups):
        members = groups[t]
        inside = set(members)
        level: dict[int, int] = {}
        for n in members:  # already topologically ordered
            level[n] = max((level[p] + 1 for p in dg.preds[n] if p in inside), default=0)
        for lv in range(max(level.values()) + 1):
            layers.append(frozenset(n for n in members if level[n] == lv))
    return Layering(tuple(layers))


@dataclass(frozen=True)
class SlackWindow:
    qubit: int
    start: int
    end: int
    kind: str  # "fixed" or "flexible"

    @property
    def length(self) -> int:
        return self.end - self.start


def idle_windows(dg: DepGraph, lm: LatencyModel) -> list[SlackWindow]:
    """Idle gaps between consecutive gates on each qubit under ASAP timing.

    A window is ``fixed`` when both bounding gates have zero total float.
    """
    es = earliest_starts(dg, lm)
    ls = latest_starts(dg, lm)
    lat = dg.latencies(lm)
    out = []
    for q, chain in enumerate(dg.chains):
        for a, b in zip(chain, chain[1:]):
            start, end = es[a] + lat[a], es[b]
            if end > start:
                fixed = ls[a] == es[a] and ls[b] == es[b]
                out.append(SlackWindow(q, start, end, "fixed" if fixed else "flexible"))
    return out
