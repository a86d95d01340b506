import itertools
import random

import pytest
from hypothesis import given, strategies as st

from slackq.circuit import (CycleError, DepGraph, LatencyModel, build_dep_graph, critical_path,
                            earliest_starts, idle_windows, latest_starts, partition_layers, total_float)
from slackq.qasm import RawGate, SourceCircuit

from conftest import circuits, fixture_circuit

UNIT = LatencyModel.unit()


# -- oracles -----------------------------------------------------------------

def pairwise_edges(c: SourceCircuit) -> set:
    """O(n^2): j follows i directly on some shared qubit."""
    out = set()
    for j, gj in enumerate(c.gates):
        for q in gj.qubits:
            prev = [i for i in range(j) if q in c.gates[i].qubits]
            if prev:
                out.add((prev[-1], j))
    return out


def all_paths_longest(n, edges, lat):
    """Longest latency-weighted path ending at each node by enumerating every path."""
    preds = {v: [a for a, b in edges if b == v] for v in range(n)}
    best = [0] * n

    def walk(v, acc):
        # acc = total latency of nodes strictly before v on this path
        best[v] = max(best[v], acc)
        for s in [b for a, b in edges if a == v]:
            walk(s, acc + lat[v])

    for v in range(n):
        if not preds[v]:
            walk(v, 0)
    return best


@st.composite
def random_dags(draw, max_nodes=12):
    n = draw(st.integers(0, max_nodes))
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if draw(st.booleans()) and draw(st.booleans())]
    lat = [draw(st.integers(1, 3)) for _ in range(n)]
    return n, edges, lat


# -- construction -----------------------------------------------------------

def test_empty_graph():
    dg = build_dep_graph(SourceCircuit(3, []))
    assert dg.num_nodes == 0 and dg.edges == []
    assert critical_path(dg, LatencyModel()) == 0


def test_motivation_dag():
    dg = build_dep_graph(fixture_circuit("fig_motivation"))
    # g5 = cx q[1],q[4] follows g4 on q1 and is the first gate on q4
    assert dg.preds[4] == (3,)
    assert dg.qubit_preds[4] == (3, None)
    assert dg.preds[5] == (4,)
    es = earliest_starts(dg, UNIT)
    spans = [(s, s + 1) for s in es]
    assert spans == [(0, 1), (1, 2), (1, 2), (2, 3), (3, 4), (4, 5)]
    assert critical_path(dg, UNIT) == 5


@given(circuits(max_qubits=6, max_gates=50))
def test_edges_match_pairwise_oracle(c):
    assert set(build_dep_graph(c).edges) == pairwise_edges(c)


@given(circuits(max_qubits=6, max_gates=40))
def test_degree_bounds_and_chains(c):
    dg = build_dep_graph(c)
    for n in range(dg.num_nodes):
        assert len(dg.preds[n]) <= 2 and len(dg.succs[n]) <= 2
    for q, chain in enumerate(dg.chains):
        assert list(chain) == [i for i, g in enumerate(c.gates) if q in g.qubits]


def test_chain_starts():
    c = SourceCircuit(1, [RawGate("h", (0,))] * 5)
    assert earliest_starts(build_dep_graph(c), UNIT) == [0, 1, 2, 3, 4]


def test_parallel_gates():
    c = SourceCircuit(2, [RawGate("h", (0,)), RawGate("h", (1,))])
    assert critical_path(build_dep_graph(c), UNIT) == 1


def test_default_latencies():
    lm = LatencyModel()
    assert (lm.latency(RawGate("h", (0,))), lm.latency(RawGate("cx", (0, 1))), lm.swap) == (1, 2, 6)
    assert lm.latency(RawGate("barrier", (0, 1))) == 0
    with pytest.raises(ValueError):
        LatencyModel(0, 1)


def test_cycle_detected():
    dg = DepGraph.from_edges(2, [(0, 1), (1, 0)], [1, 1])
    with pytest.raises(CycleError):
        earliest_starts(dg, UNIT)


@given(random_dags())
def test_earliest_start_matches_path_enumeration(d):
    n, edges, lat = d
    dg = DepGraph.from_edges(n, edges, lat)
    assert earliest_starts(dg, UNIT) == all_paths_longest(n, edges, lat)
    want = max((s + l for s, l in zip(all_paths_longest(n, edges, lat), lat)), default=0)
    assert critical_path(dg, UNIT) == want


@given(random_dags(max_nodes=8), st.randoms(use_true_random=False))
def test_any_topological_order_gives_same_starts(d, r):
    n, edges, lat = d
    dg = DepGraph.from_edges(n, edges, lat)
    # random topological order: repeatedly pick a random ready node
    indeg = [len(p) for p in dg.preds]
    ready = [v for v in range(n) if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop(r.randrange(len(ready)))
        order.append(v)
        for s in dg.succs[v]:
            indeg[s] -= 1
            if indeg[s] == 0:
                ready.append(s)
    assert earliest_starts(dg, UNIT, order) == earliest_starts(dg, UNIT)


@given(circuits(max_qubits=5, max_gates=30), st.sampled_from(["h", "cx"]), st.integers(0, 4), st.integers(0, 4))
def test_critical_path_monotone(c, name, a, b):
    a %= c.num_qubits
    b %= c.num_qubits
    extra = RawGate("cx", (a, b)) if name == "cx" and a != b else RawGate("h", (a,))
    bigger = SourceCircuit(c.num_qubits, c.gates + [extra])
    lm = LatencyModel()
    assert critical_path(build_dep_graph(bigger), lm) >= critical_path(build_dep_graph(c), lm)


@given(circuits(max_qubits=6, max_gates=40))
def test_float_nonnegative_and_zero_float_path(c):
    dg = build_dep_graph(c)
    lm = LatencyModel()
    fl = total_float(dg, lm)
    assert all(f >= 0 for f in fl)
    if dg.num_nodes:
        es, lat = earliest_starts(dg, lm), dg.latencies(lm)
        cp = critical_path(dg, lm)
        # walk back from a zero-float sink to a source along zero-float nodes
        v = next(n for n in range(dg.num_nodes) if fl[n] == 0 and es[n] + lat[n] == cp)
        while dg.preds[v]:
            v = next(p for p in dg.preds[v] if fl[p] == 0 and es[p] + lat[p] == es[v])
        assert es[v] == 0


# -- layers -------------------------------------------------------------------

def test_chain_gives_singleton_layers():
    c = SourceCircuit(2, [RawGate("cx", (0, 1))] * 4)
    lay = partition_layers(build_dep_graph(c), UNIT)
    assert [sorted(l) for l in lay.layers] == [[0], [1], [2], [3]]


@given(circuits(max_qubits=7, max_gates=40))
def test_layering_properties(c):
    dg = build_dep_graph(c)
    lay = partition_layers(dg, UNIT)
    assert len(lay) == critical_path(dg, UNIT)
    seen = []
    for layer in lay.layers:
        qubits = [q for n in layer for q in c.gates[n].qubits]
        assert len(qubits) == len(set(qubits))
        seen += sorted(layer)
    assert sorted(seen) == list(range(len(c.gates)))
    pos = {n: k for k, n in enumerate(seen)}
    assert all(pos[a] < pos[b] for a, b in dg.edges)


def test_barrier_layers_stay_disjoint():
    c = SourceCircuit(2, [RawGate("h", (0,)), RawGate("barrier", (0, 1)), RawGate("measure", (0,), (), "c[0]")])
    lay = partition_layers(build_dep_graph(c), UNIT)
    for layer in lay.layers:
        qubits = [q for n in layer for q in c.gates[n].qubits]
        assert len(qubits) == len(set(qubits))


# -- slack windows ------------------------------------------------------------

def test_slack_fixture_three_cycle_window():
    dg = build_dep_graph(fixture_circuit("fig_slack"))
    wins = idle_windows(dg, UNIT)
    assert [(w.qubit, w.length, w.kind) for w in wins] == [(2, 3, "fixed")]


def test_serial_circuit_has_no_windows():
    c = SourceCircuit(2, [RawGate("cx", (0, 1)), RawGate("cx", (1, 0)), RawGate("cx", (0, 1))])
    assert idle_windows(build_dep_graph(c), UNIT) == []


def delayed_cp(c: SourceCircuit, node: int, lm: LatencyModel) -> int:
    """Critical path when ``node`` is forced one cycle later (oracle by rebuild)."""
    dg = build_dep_graph(c)
    lat = dg.latencies(lm)
    es = [0] * dg.num_nodes
    for n in dg.topological_order:
        es[n] = max([es[p] + lat[p] for p in dg.preds[n]], default=0) + (1 if n == node else 0)
    return max((s + l for s, l in zip(es, lat)), default=0)


@given(circuits(max_qubits=5, max_gates=25))
def test_window_kind_matches_perturbation_oracle(c):
    lm = LatencyModel()
    dg = build_dep_graph(c)
    cp = critical_path(dg, lm)
    for w in idle_windows(dg, lm):
        assert w.start < w.end
        chain = dg.chains[w.qubit]
        es, lat = earliest_starts(dg, lm), dg.latencies(lm)
        a = next(x for x in chain if es[x] + lat[x] == w.start)
        b = next(x for x in chain if es[x] == w.end and chain.index(x) == chain.index(a) + 1)
        movable = delayed_cp(c, a, lm) == cp or delayed_cp(c, b, lm) == cp
        assert (w.kind == "flexible") == movable


def test_dot_dump():
    text = build_dep_graph(fixture_circuit("fig_motivation")).to_dot(UNIT)
    assert 'g4 [label="g4 [3,4]"]' in text and "g3 -> g4;" in text
