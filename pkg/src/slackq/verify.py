"""Post-routing checks and metrics."""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .circuit import LatencyModel, build_dep_graph, critical_path
from .mapping import Mapping, SwapOp, apply_swap
from .qasm import PASSTHROUGH, SourceCircuit

if TYPE_CHECKING:
    from .scheduler import TransformedCircuit
    from .topology import CouplingGraph

ORACLE_MAX_QUBITS = 8
# the oracle simulates every physical qubit the routed circuit touches
ORACLE_MAX_ACTIVE = 12


@dataclass
class Report:
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Violation:
    index: int
    name: str
    qubits: tuple[int, int]

    def __str__(self) -> str:
        return f"op {self.index} ({self.name}) on unlinked pair {self.qubits}"


@dataclass(frozen=True)
class Metrics:
    circuit_time: int
    original_circuit_time: int
    overhead_ratio: float
    gate_count_total: int
    cx_count: int
    swaps_inserted: int
    wall_time_ms: float = 0.0


def check_compliance(t: "TransformedCircuit", g: "CouplingGraph") -> list[Violation]:
    """Two-qubit ops that do not sit on a link of ``g``.

    On a directed device a CNOT against the link direction passes only when
    it is marked for Hadamard reversal.
    """
    out = []
    for i, op in enumerate(t.ops):
        if len(op.qubits) != 2 or op.name not in ("cx", "swap"):
            continue
        a, b = op.qubits
        if not g.adjacent(a, b):
            out.append(Violation(i, op.name, (a, b)))
        elif op.name == "cx" and not g.allows_cx(a, b) and not op.h_wrap:
            out.append(Violation(i, op.name, (a, b)))
    return out


def _per_qubit_history(num_qubits: int, items) -> list[list[tuple]]:
    hist: list[list[tuple]] = [[] for _ in range(num_qubits)]
    for name, params, target, logical in items:
        for q in logical:
            hist[q].append((name, params, target, logical))
    return hist


def check_equivalence(original: SourceCircuit, t: "TransformedCircuit", pi0: Mapping | None = None) -> Report:
    """Compare per-qubit gate histories after undoing the inserted swaps.

    Each entry records the gate name, parameters and the full tuple of
    logical operands, so matching histories mean identical dependency DAGs.
    """
    pi = pi0 if pi0 is not None else t.initial_mapping
    n = original.num_qubits
    routed = []
    report = Report()
    for i, op in enumerate(t.ops):
        if op.inserted:
            pi = apply_swap(pi, SwapOp(*op.qubits))
            continue
        logical = tuple(pi.logical(p) for p in op.qubits)
        if any(q >= n for q in logical):
            report.problems.append(f"op {i} ({op.name}) acts on ancilla slot(s) {logical}")
            continue
        routed.append((op.name, op.params, op.target, logical))
    want = _per_qubit_history(n, ((g.name, g.params, g.target, g.qubits) for g in original.gates))
    got = _per_qubit_history(n, routed)
    for q in range(n):
        if want[q] != got[q]:
            k = next((j for j, (a, b) in enumerate(zip(want[q], got[q])) if a != b),
                     min(len(want[q]), len(got[q])))
            exp = want[q][k] if k < len(want[q]) else None
            act = got[q][k] if k < len(got[q]) else None
            report.problems.append(f"qubit {q}: entry {k} expected {exp}, got {act}")
    if t.final_mapping != pi:
        report.problems.append("final mapping does not match the replayed swaps")
    return report


# -- dense unitary oracle ---------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def eval_angle(text: str) -> float:
    """Numeric value of a parameter built from literals, ``pi`` and + - * / **."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ValueError(f"unsupported symbolic parameter {text!r}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except SyntaxError as exc:
        raise ValueError(f"unsupported symbolic parameter {text!r}") from exc


def _u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -np.exp(1j * lam) * s],
                     [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]])


_FIXED = {
    "id": np.eye(2), "x": np.array([[0, 1], [1, 0]]), "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.diag([1, -1]), "h": np.array([[1, 1], [1, -1]]) / math.sqrt(2),
    "s": np.diag([1, 1j]), "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * math.pi / 4)]), "tdg": np.diag([1, np.exp(-1j * math.pi / 4)]),
    "sx": np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]) / 2,
}


def single_qubit_matrix(name: str, params: tuple[str, ...]) -> np.ndarray:
    if name in _FIXED:
        return np.asarray(_FIXED[name], dtype=complex)
    v = [eval_angle(p) for p in params]
    if name == "rx":
        return _u3(v[0], -math.pi / 2, math.pi / 2)
    if name == "ry":
        return _u3(v[0], 0, 0)
    if name in ("rz", "u1", "p"):
        return np.diag([1, np.exp(1j * v[0])])
    if name == "u2":
        return _u3(math.pi / 2, v[0], v[1])
    if name in ("u3", "u", "U"):
        return _u3(*v)
    raise ValueError(f"no matrix for gate {name!r}")




class _Register:
    """Columns of a unitary over ``n`` labelled qubits, built gate by gate.

    The state is kept as a (2**n, 2**n) array whose row index is the
    big-endian bit string of the labels in sorted order.
    """

    def __init__(self, labels):
        self.pos = {lab: k for k, lab in enumerate(labels)}
        self.n = len(self.pos)
        self.u = np.eye(2 ** self.n, dtype=complex)

    def _view(self, k: int):
        return self.u.reshape(2 ** k, 2, -1)

    def apply(self, mat: np.ndarray, labels) -> None:
        (lab,) = labels
        view = self._view(self.pos[lab])
        self.u = np.matmul(mat, view).reshape(self.u.shape)

    def _pair(self, a, b):
        i, j = self.pos[a], self.pos[b]
        lo, hi = min(i, j), max(i, j)
        view = self.u.reshape(2 ** lo, 2, 2 ** (hi - lo - 1), 2, -1)
        return view, i < j

    def cx(self, control, target) -> None:
        view, ordered = self._pair(control, target)
        # slices with the control bit set, target bit 0 and 1
        if ordered:
            a, b = (slice(None), 1, slice(None), 0), (slice(None), 1, slice(None), 1)
        else:
            a, b = (slice(None), 0, slice(None), 1), (slice(None), 1, slice(None), 1)
        tmp = view[a].copy()
        view[a] = view[b]
        view[b] = tmp

    def swap(self, p, q) -> None:
        view, _ = self._pair(p, q)
        a, b = (slice(None), 0, slice(None), 1), (slice(None), 1, slice(None), 0)
        tmp = view[a].copy()
        view[a] = view[b]
        view[b] = tmp

    def relabel(self, moves: dict[int, int]) -> None:
        """Move the qubit on axis ``src`` to axis ``moves[src]``."""
        n, cols = self.n, self.u.shape[1]
        t = self.u.reshape((2,) * n + (cols,))
        order = [0] * n
        for src, dst in moves.items():
            order[dst] = src
        self.u = t.transpose(order + [n]).reshape(2 ** n, cols)

    def matrix(self) -> np.ndarray:
        return self.u


def _apply_gate(reg: _Register, name: str, params, qubits) -> None:
    if name in PASSTHROUGH:
        return
    if name == "cx":
        reg.cx(*qubits)
    elif name == "swap":
        reg.swap(*qubits)
    else:
        reg.apply(single_qubit_matrix(name, params), qubits)


def unitary_oracle_equivalence(original: SourceCircuit, t: "TransformedCircuit",
                               pi0: Mapping | None = None, tol: float = 1e-9) -> Report:
    """Dense-matrix check that routing preserved the circuit's unitary.

    Both circuits are simulated over the physical qubits the routed circuit
    touches: the original with its gates placed by ``pi0`` and no swaps,
    then followed by the permutation taking every logical qubit from its
    initial to its final home. Compared up to global phase.
    """
    pi0 = pi0 if pi0 is not None else t.initial_mapping
    pif = t.final_mapping
    if original.num_qubits > ORACLE_MAX_QUBITS:
        raise ValueError(f"oracle limited to {ORACLE_MAX_QUBITS} logical qubits")
    if any(g.name == "measure" for g in original.gates):
        measured = set()
        for g in original.gates:
            if g.name == "measure":
                measured.add(g.qubits[0])
            elif measured & set(g.qubits) and g.name != "barrier":
                raise ValueError("mid-circuit measurement is not supported by the oracle")
    active = {pi0.phys(q) for q in range(original.num_qubits)}
    active |= {pif.phys(q) for q in range(original.num_qubits)}
    for op in t.ops:
        active.update(op.qubits)
    labels = sorted(active)
    if len(labels) > ORACLE_MAX_ACTIVE:
        raise ValueError(f"routed circuit touches {len(labels)} qubits; oracle limit is {ORACLE_MAX_ACTIVE}")

    routed = _Register(labels)
    h = _FIXED["h"]
    for op in t.ordered_ops():
        if op.h_wrap:
            c, tq = op.qubits
            for q in (c, tq):
                routed.apply(h, [q])
            routed.cx(tq, c)
            for q in (c, tq):
                routed.apply(h, [q])
        else:
            _apply_gate(routed, op.name, op.params, list(op.qubits))

    expected = _Register(labels)
    for g in original.gates:
        _apply_gate(expected, g.name, g.params, [pi0.phys(q) for q in g.qubits])
    # relabel: logical qubit l moves from pi0.phys(l) to pif.phys(l)
    idx = {lab: k for k, lab in enumerate(labels)}
    moves = {}
    for p in labels:
        lq = pi0.logical(p)
        dest = pif.phys(lq)
        if dest not in idx:
            return Report([f"logical {lq} leaves the simulated qubit set"])
        moves[idx[p]] = idx[dest]
    expected.relabel(moves)
    want = expected.matrix()
    got = routed.matrix()
    overlap = abs(np.vdot(want, got)) / want.shape[0]
    if abs(1 - overlap) > tol:
        return Report([f"unitaries differ: normalized overlap {overlap:.12f}"])
    return Report()


def compute_metrics(t: "TransformedCircuit", original: SourceCircuit, lm: LatencyModel,
                    wall_time_ms: float = 0.0, swap_gates: int = 3) -> Metrics:
    """Time and gate counts of a routed circuit.

    Inserted swaps count as ``swap_gates`` elementary gates (3 CNOTs, or 7
    with the Hadamards of a directed link) and a Hadamard-reversed CNOT as 5.
    """
    orig_time = critical_path(build_dep_graph(original), lm)
    total = cx = 0
    for op in t.ops:
        if op.name in PASSTHROUGH:
            continue
        if op.inserted:
            total += swap_gates
            cx += 3
        elif op.name == "swap":
            total += 1
        else:
            total += 5 if op.h_wrap else 1
            cx += op.name == "cx"
    ct = t.circuit_time
    ratio = 1.0 if orig_time == 0 else ct / orig_time
    return Metrics(ct, orig_time, ratio, total, cx, t.swaps_inserted, wall_time_ms)
