"""Dynamic gate scheduling with slack-aware swap selection.

The router walks the dependency graph, placing every gate as soon as its
operands are free and the coupling graph allows it. When the frontier is
stuck it asks the search for swap sequences that unblock the critical
frontier gates and keeps the one that stretches the whole circuit least.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .circuit import DepGraph, LatencyModel, build_dep_graph, partition_layers
from .mapping import Mapping, SwapOp, apply_swap, identity_mapping
from .qasm import Header, RawGate, SourceCircuit
from .search import MappingCandidate, SearchParams, resolve_conflicts
from .topology import CouplingGraph, device_latency, is_executable, needs_h_wrap, swap_cost

STRATEGIES = ("slackq", "min_swap", "layered")

# how many upcoming two-qubit gates the lookahead tie-break inspects
LOOKAHEAD_WINDOW = 20
# blocked gates handed to one search; joint searches grow exponentially
MAX_TARGETS = 3


@dataclass(frozen=True)
class ScheduledOp:
    name: str
    qubits: tuple[int, ...]  # physical
    params: tuple[str, ...]
    start: int
    end: int
    source: int | None  # index of the original gate; None for inserted swaps
    target: str | None = None
    h_wrap: bool = False

    @property
    def inserted(self) -> bool:
        return self.source is None


@dataclass
class TransformedCircuit:
    ops: list[ScheduledOp]
    num_physical: int
    initial_mapping: Mapping
    final_mapping: Mapping
    header: Header = field(default_factory=Header)
    metrics: object | None = None

    @property
    def swaps_inserted(self) -> int:
        return sum(1 for op in self.ops if op.inserted)

    @property
    def circuit_time(self) -> int:
        return max((op.end for op in self.ops), default=0)

    def ordered_ops(self) -> list[ScheduledOp]:
        """Ops by start cycle; ties keep scheduling order."""
        return sorted(self.ops, key=lambda op: op.start)

    def to_source_circuit(self, g: CouplingGraph | None = None) -> SourceCircuit:
        """Physical circuit for emission.

        Reversed CNOTs are expanded with Hadamards; with a directed ``g``
        each swap is oriented along an existing link. Measurements that end
        their qubit's timeline go last.
        """
        ops = self.ordered_ops()
        last_on: dict[int, int] = {}
        for i, op in enumerate(ops):
            for p in op.qubits:
                last_on[p] = i
        body: list[RawGate] = []
        tail: list[RawGate] = []
        for i, op in enumerate(ops):
            if op.name == "measure" and last_on[op.qubits[0]] == i:
                tail.append(RawGate("measure", op.qubits, (), op.target))
            elif op.h_wrap:
                c, t = op.qubits
                hs = [RawGate("h", (c,)), RawGate("h", (t,))]
                body += [*hs, RawGate("cx", (t, c), op.params), *hs]
            elif op.name == "swap" and g is not None and not g.bidirectional:
                a, b = op.qubits
                if (a, b) not in g.edges:
                    a, b = b, a
                body.append(RawGate("swap", (a, b)))
            else:
                body.append(RawGate(op.name, op.qubits, op.params, op.target))
        return SourceCircuit(self.num_physical, body + tail, self.header)


class ScheduleState:
    """Mutable bookkeeping of one routing run.

    ``frontier`` holds unscheduled gates whose predecessors are all placed;
    ``ops`` is the processed circuit; ``free_at[p]`` is the cycle physical
    qubit ``p`` becomes idle.
    """

    def __init__(self, circuit: SourceCircuit, g: CouplingGraph, pi0: Mapping, lm: LatencyModel):
        if circuit.num_qubits > g.num_physical:
            raise ValueError(f"circuit needs {circuit.num_qubits} qubits, device has {g.num_physical}")
        if len(pi0) != g.num_physical:
            pi0 = Mapping.from_log_to_phys(pi0.log_to_phys[:circuit.num_qubits], g.num_physical)
        self.circuit = circuit
        self.g = g
        self.lm = device_latency(g, lm)
        self.dg: DepGraph = build_dep_graph(circuit)
        self.lat = self.dg.latencies(self.lm)
        self.pi = pi0
        self.pi0 = pi0
        self.free_at = [0] * g.num_physical
        self.ops: list[ScheduledOp] = []
        n = self.dg.num_nodes
        self.done = [False] * n
        self.missing = [len(p) for p in self.dg.preds]
        self.frontier = {i for i in range(n) if self.missing[i] == 0}
        self.remaining = n
        self._baseline = None

    # -- placement -------------------------------------------------------

    def schedule_gate(self, i: int) -> ScheduledOp:
        gate = self.circuit.gates[i]
        phys = tuple(self.pi.phys(q) for q in gate.qubits)
        wrap = needs_h_wrap(self.g, self.pi, gate)
        lat = self.lat[i] + (2 * self.lm.single_qubit_cycles if wrap else 0)
        start = max((self.free_at[p] for p in phys), default=0)
        op = ScheduledOp(gate.name, phys, gate.params, start, start + lat, i, gate.target, wrap)
        self.ops.append(op)
        for p in phys:
            self.free_at[p] = op.end
        self.done[i] = True
        self.frontier.discard(i)
        self.remaining -= 1
        for s in self.dg.succs[i]:
            self.missing[s] -= 1
            if self.missing[s] == 0:
                self.frontier.add(s)
        self._baseline = None
        return op

    def apply_swaps(self, swaps: Iterable[SwapOp]) -> None:
        for a, b in swaps:
            start = max(self.free_at[a], self.free_at[b])
            op = ScheduledOp("swap", (a, b), (), start, start + self.lm.swap, None)
            self.ops.append(op)
            self.free_at[a] = self.free_at[b] = op.end
            self.pi = apply_swap(self.pi, SwapOp(a, b))
        self._baseline = None

    # -- analysis of the unscheduled remainder ----------------------------

    def remaining_gates(self) -> list[int]:
        return [i for i in range(self.dg.num_nodes) if not self.done[i]]

    def baseline(self) -> "_Baseline":
        """ASAP/ALAP timing of the remaining circuit under the current state,
        ignoring coupling conflicts it has not hit yet."""
        if self._baseline is None:
            self._baseline = _Baseline.compute(self)
        return self._baseline

    def lookahead_cost(self, pi: Mapping) -> int:
        dist = self.g.distance
        cost = seen = 0
        for i in range(self.dg.num_nodes):
            if self.done[i] or not self.circuit.gates[i].is_two_qubit:
                continue
            c, t = self.circuit.gates[i].qubits
            cost += dist[pi.phys(c)][pi.phys(t)] - 1
            seen += 1
            if seen >= LOOKAHEAD_WINDOW:
                break
        return cost


@dataclass
class _Baseline:
    start: dict[int, int]
    end: dict[int, int]
    latest: dict[int, int]
    ready: list[int]  # per logical qubit: cycle its current physical home frees up
    cp: int  # current circuit time: processed ops plus the ASAP remainder
    remaining_cp: int

    @classmethod
    def compute(cls, st: ScheduleState) -> "_Baseline":
        dg, lat = st.dg, st.lat
        ready = [st.free_at[st.pi.phys(q)] for q in range(st.circuit.num_qubits)]
        start: dict[int, int] = {}
        end: dict[int, int] = {}
        rem = st.remaining_gates()
        for r in rem:
            s = 0
            for q, p in zip(st.circuit.gates[r].qubits, dg.qubit_preds[r]):
                s = max(s, ready[q] if p is None or st.done[p] else end[p])
            start[r], end[r] = s, s + lat[r]
        remaining_cp = max(end.values(), default=0)
        cp = max(max(st.free_at, default=0), remaining_cp)
        latest: dict[int, int] = {}
        for r in reversed(rem):
            finish = min((latest[s] for s in dg.succs[r]), default=cp)
            latest[r] = finish - lat[r]
        return cls(start, end, latest, ready, cp, remaining_cp)

    def float_in_remaining(self, r: int) -> int:
        return self.latest[r] - self.start[r] - (self.cp - self.remaining_cp)


def schedulable_gates(state: ScheduleState, g: CouplingGraph | None = None) -> set[int]:
    g = g or state.g
    return {i for i in state.frontier if is_executable(g, state.pi, state.circuit.gates[i])}


def select_critical_gates(frontier: Iterable[int], remaining_dg: DepGraph, lm: LatencyModel,
                          release: dict[int, int] | None = None) -> set[int]:
    """Blocked frontier nodes with zero float in the remaining graph.

    ``release`` optionally bounds node start times from below (e.g. the
    cycle the operand qubits become free). Falls back to every given node
    when none is critical.
    """
    frontier = set(frontier)
    lat = remaining_dg.latencies(lm)
    release = release or {}
    es = [0] * remaining_dg.num_nodes
    for n in remaining_dg.topological_order:
        es[n] = max([release.get(n, 0)] + [es[p] + lat[p] for p in remaining_dg.preds[n]])
    horizon = max((es[n] + lat[n] for n in range(remaining_dg.num_nodes)), default=0)
    ls = [0] * remaining_dg.num_nodes
    for n in reversed(remaining_dg.topological_order):
        ls[n] = min((ls[s] for s in remaining_dg.succs[n]), default=horizon) - lat[n]
    critical = {n for n in frontier if ls[n] == es[n]}
    return critical or frontier


def evaluate_increment(state: ScheduleState, cand: MappingCandidate,
                       smallest: float = math.inf) -> int | None:
    """Circuit-time increase caused by inserting ``cand``'s swaps now.

    Only gates whose start moves are revisited. Returns ``None`` when a
    critical gate is already delayed by more than ``smallest``.
    """
    base = state.baseline()
    dg, lat, gates = state.dg, state.lat, state.circuit.gates
    free = {}
    swap_end = 0
    for a, b in cand.swaps:
        s = max(free.get(a, state.free_at[a]), free.get(b, state.free_at[b]))
        free[a] = free[b] = s + state.lm.swap
        swap_end = max(swap_end, s + state.lm.swap)
    pi = cand.final_mapping
    new_ready = {}
    for p, t in free.items():
        q = pi.logical(p)
        if q < state.circuit.num_qubits and t > base.ready[q]:
            new_ready[q] = t
    circuit_time = max(base.cp, swap_end)

    heads = []
    for q in new_ready:
        # first unscheduled gate on q: the frontier member touching it
        for r in _heads_on(state, q):
            heads.append(r)
    todo = list(set(heads))
    heapq.heapify(todo)
    queued = set(todo)
    tent_end: dict[int, int] = {}
    while todo:
        r = heapq.heappop(todo)
        s = 0
        for q, p in zip(gates[r].qubits, dg.qubit_preds[r]):
            if p is None or state.done[p]:
                s = max(s, new_ready.get(q, base.ready[q]))
            else:
                s = max(s, tent_end.get(p, base.end[p]))
        delta = s - base.start[r]
        if delta <= 0:
            continue
        if base.latest[r] == base.start[r] and delta > smallest:
            return None
        tent_end[r] = s + lat[r]
        circuit_time = max(circuit_time, tent_end[r])
        for c in dg.succs[r]:
            if c not in queued:
                queued.add(c)
                heapq.heappush(todo, c)
    return max(0, circuit_time - base.cp)


def _heads_on(state: ScheduleState, q: int) -> list[int]:
    chain = state.dg.chains[q]
    for r in chain:
        if not state.done[r]:
            return [r]
    return []


def full_circuit_time(state: ScheduleState, swaps: Sequence[SwapOp]) -> int:
    """Circuit time after appending ``swaps`` and list-scheduling the whole
    remainder from scratch under the resulting mapping."""
    free = list(state.free_at)
    pi = state.pi
    for a, b in swaps:
        s = max(free[a], free[b]) + state.lm.swap
        free[a] = free[b] = s
        pi = apply_swap(pi, SwapOp(a, b))
    for r in state.remaining_gates():
        phys = [pi.phys(q) for q in state.circuit.gates[r].qubits]
        e = max((free[p] for p in phys), default=0) + state.lat[r]
        for p in phys:
            free[p] = e
    return max(free, default=0)


def best_slack_utilization(candidates: Sequence[MappingCandidate], state: ScheduleState) -> MappingCandidate:
    """Candidate whose swaps stretch the circuit least.

    Ties go to fewer swaps, then to the mapping that leaves upcoming CNOTs
    closest together, then to the lexicographically smallest swap list.
    """
    if not candidates:
        raise ValueError("no candidates to rank")
    if len(candidates) == 1:
        return candidates[0]
    smallest = math.inf
    scored = []
    for cand in candidates:
        inc = evaluate_increment(state, cand, smallest)
        if inc is None:
            continue
        smallest = min(smallest, inc)
        scored.append((inc, cand.swap_count, state.lookahead_cost(cand.final_mapping), cand.swaps, cand))
    return min(scored, key=lambda row: row[:4])[-1]


def fewest_swaps(candidates: Sequence[MappingCandidate], state: ScheduleState | None = None) -> MappingCandidate:
    return min(candidates, key=lambda c: (c.swap_count, c.swaps))


def shallowest(candidates: Sequence[MappingCandidate], state: ScheduleState) -> MappingCandidate:
    return min(candidates, key=lambda c: (full_circuit_time(state, c.swaps), c.swap_count, c.swaps))


Chooser = Callable[[Sequence[MappingCandidate], ScheduleState], MappingCandidate]

_CHOOSERS: dict[str, Chooser] = {
    "slackq": best_slack_utilization,
    "min_swap": fewest_swaps,
    "layered": shallowest,
}


def _drain(state: ScheduleState) -> None:
    while True:
        ready = sorted(schedulable_gates(state))
        if not ready:
            return
        for i in ready:
            state.schedule_gate(i)


def _pick_targets(state: ScheduleState, blocked: list[int], critical_first: bool) -> list[int]:
    base = state.baseline()
    critical = [i for i in blocked if base.float_in_remaining(i) == 0]
    if critical_first:
        return critical or blocked
    # test hook: resolve the non-critical conflicts before the critical ones
    others = [i for i in blocked if i not in critical]
    return others or blocked


def run_scheduler(circuit: SourceCircuit, g: CouplingGraph, pi0: Mapping | None = None,
                  lm: LatencyModel = LatencyModel(), strategy: str = "slackq",
                  params: SearchParams = SearchParams(), *,
                  choose: Chooser | None = None, critical_first: bool = True) -> TransformedCircuit:
    """Route ``circuit`` onto ``g`` and return the timed physical circuit.

    ``choose`` overrides the strategy's candidate ranking and
    ``critical_first=False`` resolves non-critical conflicts first; both
    exist for experiments and tests.
    """
    from .verify import compute_metrics

    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    circuit.validate()
    if pi0 is None:
        pi0 = identity_mapping(g.num_physical)
    state = ScheduleState(circuit, g, pi0, lm)
    chooser = choose or _CHOOSERS[strategy]

    if strategy == "layered":
        _run_layered(state, params, chooser)
    else:
        while state.frontier:
            _drain(state)
            if not state.frontier:
                break
            blocked = sorted(state.frontier)
            chosen = _pick_targets(state, blocked, critical_first)[:MAX_TARGETS]
            targets = [circuit.gates[i].qubits for i in chosen]
            cands = resolve_conflicts(state.pi, targets, g, params)
            state.apply_swaps(chooser(cands, state).swaps)

    t = TransformedCircuit(state.ops, g.num_physical, state.pi0, state.pi, circuit.header)
    t.metrics = compute_metrics(t, circuit, state.lm, swap_gates=swap_cost(g, state.lm)[0])
    return t


def _run_layered(state: ScheduleState, params: SearchParams, chooser: Chooser) -> None:
    gates = state.circuit.gates
    for layer in partition_layers(state.dg, state.lm).layers:
        remaining = sorted(layer)
        while remaining:
            blocked = [i for i in remaining
                       if gates[i].is_two_qubit and not is_executable(state.g, state.pi, gates[i])]
            if blocked:
                targets = [gates[i].qubits for i in blocked[:MAX_TARGETS]]
                cands = resolve_conflicts(state.pi, targets, state.g, params)
                state.apply_swaps(chooser(cands, state).swaps)
            # layer members are qubit-disjoint, so any executable subset may go first
            later = []
            for i in remaining:
                if gates[i].is_two_qubit and not is_executable(state.g, state.pi, gates[i]):
                    later.append(i)
                else:
                    state.schedule_gate(i)
            remaining = later
