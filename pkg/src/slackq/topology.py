"""Hardware coupling graphs and distances."""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

from .circuit import LatencyModel
from .mapping import Mapping
from .qasm import RawGate

# small worked-example layouts bundled as fixtures, addressable by name
FIXTURE_TOPOLOGIES = ("fig1", "fig8", "figflex")


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class CouplingGraph:
    num_physical: int
    edges: frozenset[tuple[int, int]]
    bidirectional: bool = True
    name: str = ""

    def __post_init__(self):
        for a, b in self.edges:
            if a == b:
                raise TopologyError(f"self-edge on qubit {a}")
            if not (0 <= a < self.num_physical and 0 <= b < self.num_physical):
                raise TopologyError(f"edge ({a}, {b}) outside [0, {self.num_physical})")
        if self.num_physical > 1 and not self._connected():
            raise TopologyError(f"coupling graph {self.name!r} is disconnected")

    def _connected(self) -> bool:
        seen = {0}
        todo = [0]
        while todo:
            for nb in self.neighbors[todo.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        return len(seen) == self.num_physical

    @cached_property
    def undirected_edges(self) -> tuple[tuple[int, int], ...]:
        """Each link once as (low, high), sorted."""
        return tuple(sorted({(min(a, b), max(a, b)) for a, b in self.edges}))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        nbs: list[set[int]] = [set() for _ in range(self.num_physical)]
        for a, b in self.edges:
            nbs[a].add(b)
            nbs[b].add(a)
        return tuple(tuple(sorted(s)) for s in nbs)

    @cached_property
    def distance(self) -> tuple[tuple[int, ...], ...]:
        return all_pairs_distance(self)

    def adjacent(self, a: int, b: int) -> bool:
        return b in self.neighbors[a]

    def allows_cx(self, control: int, target: int) -> bool:
        """True if a CNOT can run as-is (no Hadamard reversal)."""
        if (control, target) in self.edges:
            return True
        return self.bidirectional and (target, control) in self.edges


def _line(n: int) -> CouplingGraph:
    return CouplingGraph(n, frozenset((i, i + 1) for i in range(n - 1)), True, f"line:{n}")


def _grid(r: int, c: int) -> CouplingGraph:
    edges = set()
    for i in range(r):
        for j in range(c):
            q = i * c + j
            if j + 1 < c:
                edges.add((q, q + 1))
            if i + 1 < r:
                edges.add((q, q + c))
    return CouplingGraph(r * c, frozenset(edges), True, f"grid:{r}x{c}")


def topology_from_dict(data: dict) -> CouplingGraph:
    try:
        edges = frozenset((int(a), int(b)) for a, b in data["edges"])
        return CouplingGraph(int(data["num_qubits"]), edges, bool(data.get("bidirectional", True)),
                             str(data.get("name", "")))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TopologyError):
            raise
        raise TopologyError(f"bad topology description: {exc}") from exc


def _bundled(name: str) -> dict:
    path = resources.files("slackq") / "data" / name
    return json.loads(path.read_text(encoding="utf-8"))


def load_topology(spec: str) -> CouplingGraph:
    """Resolve ``tokyo``, ``line:<n>``, ``grid:<r>x<c>``, a fixture name or a JSON path."""
    if spec == "tokyo":
        return topology_from_dict(_bundled("tokyo.json"))
    if spec in FIXTURE_TOPOLOGIES:
        return topology_from_dict(_bundled(f"fixtures/{spec}.json"))
    m = re.fullmatch(r"line:(\d+)", spec)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise TopologyError("line needs at least one qubit")
        return _line(n)
    m = re.fullmatch(r"grid:(\d+)x(\d+)", spec)
    if m:
        r, c = int(m.group(1)), int(m.group(2))
        if r < 1 or c < 1:
            raise TopologyError("grid dimensions must be positive")
        return _grid(r, c)
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise TopologyError(f"cannot read topology file {spec}: {exc}") from exc
        return topology_from_dict(data)
    raise TopologyError(f"unknown topology {spec!r}")


def all_pairs_distance(g: CouplingGraph) -> tuple[tuple[int, ...], ...]:
    """Hop counts over the undirected view, one BFS per source."""
    rows = []
    for src in range(g.num_physical):
        d = [-1] * g.num_physical
        d[src] = 0
        todo = deque([src])
        while todo:
            u = todo.popleft()
            for v in g.neighbors[u]:
                if d[v] < 0:
                    d[v] = d[u] + 1
                    todo.append(v)
        rows.append(tuple(d))
    return tuple(rows)


def is_executable(g: CouplingGraph, pi: Mapping, gate: RawGate) -> bool:
    """Whether ``gate`` satisfies the coupling constraint under ``pi``.

    On directed graphs a CNOT over a reversed link counts as executable; see
    :func:`needs_h_wrap`.
    """
    if not gate.is_two_qubit:
        return True
    a, b = pi.phys(gate.qubits[0]), pi.phys(gate.qubits[1])
    return g.adjacent(a, b)


def needs_h_wrap(g: CouplingGraph, pi: Mapping, gate: RawGate) -> bool:
    if gate.name != "cx":
        return False
    c, t = pi.phys(gate.qubits[0]), pi.phys(gate.qubits[1])
    return g.adjacent(c, t) and not g.allows_cx(c, t)


def swap_cost(g: CouplingGraph, lm: LatencyModel) -> tuple[int, int]:
    """(gate count, cycles) of one swap on this device."""
    if g.bidirectional:
        return 3, 3 * lm.cnot_cycles
    return 7, 3 * lm.cnot_cycles + 4 * lm.single_qubit_cycles


def device_latency(g: CouplingGraph, lm: LatencyModel) -> LatencyModel:
    """Latency model with the swap duration resolved for this device.

    An explicit ``swap_cycles`` always wins.
    """
    if lm.swap_cycles is not None:
        return lm
    return LatencyModel(lm.single_qubit_cycles, lm.cnot_cycles, swap_cost(g, lm)[1])
