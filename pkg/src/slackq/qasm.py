"""Reading and writing a practical subset of OpenQASM 2.0.

Only a single quantum register is supported. Angle parameters are carried
as opaque text and never evaluated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

TWO_QUBIT_GATES = frozenset({"cx", "swap"})
PASSTHROUGH = frozenset({"barrier", "measure"})

# statements this parser refuses outright
_UNSUPPORTED = frozenset({"gate", "opaque", "if", "reset"})


class QasmError(ValueError):
    """Parse failure carrying the 1-based source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class RawGate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[str, ...] = ()
    # classical destination of a measure, e.g. "c[0]"
    target: str | None = None

    @property
    def is_two_qubit(self) -> bool:
        return self.name in TWO_QUBIT_GATES


@dataclass(frozen=True)
class Header:
    qreg: str = "q"
    cregs: tuple[tuple[str, int], ...] = ()
    includes: tuple[str, ...] = ("qelib1.inc",)


@dataclass
class SourceCircuit:
    num_qubits: int
    gates: list[RawGate] = field(default_factory=list)
    header: Header = field(default_factory=Header)

    def validate(self) -> None:
        for i, g in enumerate(self.gates):
            if any(q < 0 or q >= self.num_qubits for q in g.qubits):
                raise ValueError(f"gate {i} ({g.name}) references a qubit outside [0, {self.num_qubits})")
            if g.is_two_qubit and (len(g.qubits) != 2 or g.qubits[0] == g.qubits[1]):
                raise ValueError(f"gate {i} ({g.name}) needs two distinct qubits")
            if g.name not in PASSTHROUGH and not g.is_two_qubit and len(g.qubits) != 1:
                raise ValueError(f"gate {i} ({g.name}) must act on one qubit")

    @property
    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)

    @property
    def operation_count(self) -> int:
        """Number of gates, not counting barriers and measurements."""
        return sum(1 for g in self.gates if g.name not in PASSTHROUGH)


_COMMENT = re.compile(r"//[^\n]*")
_VERSION = re.compile(r"OPENQASM\s+(\S+)$")
_INCLUDE = re.compile(r'include\s+"([^"]*)"$')
_REG = re.compile(r"(qreg|creg)\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_MEASURE = re.compile(r"measure\s+(.+?)\s*->\s*(.+)$", re.S)
_APPLY = re.compile(r"([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*(.*)$", re.S)
_ARG = re.compile(r"([A-Za-z_]\w*)\s*(?:\[\s*(\d+)\s*\])?$")


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


def _statements(text: str):
    """Yield (statement, line, column) with comments removed."""
    text = _COMMENT.sub(lambda m: " " * len(m.group(0)), text)
    line, col = 1, 1
    start = None
    buf: list[str] = []
    for ch in text:
        if start is None and not ch.isspace():
            start = (line, col)
        if ch == ";":
            yield "".join(buf).strip(), start or (line, col)
            buf, start = [], None
        else:
            buf.append(ch)
        if ch == "\n":
            line, col = line + 1, 1
        else:
            col += 1
    if "".join(buf).strip():
        raise QasmError("missing ';' at end of statement", *start)


def parse_qasm(text: str) -> SourceCircuit:
    qreg: tuple[str, int] | None = None
    cregs: list[tuple[str, int]] = []
    includes: list[str] = []
    gates: list[RawGate] = []
    seen_version = False

    def qubit_args(raw: str, line: int, col: int) -> list[int | None]:
        out: list[int | None] = []
        for arg in _split_top_level(raw):
            m = _ARG.match(arg)
            if not m:
                raise QasmError(f"bad qubit argument {arg!r}", line, col)
            if qreg is None:
                raise QasmError("gate applied before qreg declaration", line, col)
            if m.group(1) != qreg[0]:
                raise QasmError(f"unknown quantum register {m.group(1)!r}", line, col)
            if m.group(2) is None:
                out.append(None)  # whole register
                continue
            idx = int(m.group(2))
            if idx >= qreg[1]:
                raise QasmError(f"qubit index {idx} out of range for {qreg[0]}[{qreg[1]}]", line, col)
            out.append(idx)
        return out

    for stmt, (line, col) in _statements(text):
        if not stmt:
            continue
        head = stmt.split(None, 1)[0].split("(", 1)[0]
        if head == "OPENQASM":
            m = _VERSION.match(stmt)
            if not m or m.group(1) != "2.0":
                raise QasmError("only OPENQASM 2.0 is supported", line, col)
            seen_version = True
            continue
        if not seen_version:
            raise QasmError("program must start with 'OPENQASM 2.0;'", line, col)
        if head == "include":
            m = _INCLUDE.match(stmt)
            if not m:
                raise QasmError("malformed include", line, col)
            includes.append(m.group(1))
            continue
        if head in ("qreg", "creg"):
            m = _REG.match(stmt)
            if not m:
                raise QasmError(f"malformed {head} declaration", line, col)
            name, size = m.group(2), int(m.group(3))
            if head == "qreg":
                if qreg is not None:
                    raise QasmError("multiple quantum registers are not supported", line, col)
                qreg = (name, size)
            else:
                cregs.append((name, size))
            continue
        if head in _UNSUPPORTED:
            raise QasmError(f"unsupported statement {head!r}", line, col)
        if head == "measure":
            m = _MEASURE.match(stmt)
            if not m:
                raise QasmError("malformed measure", line, col)
            args = qubit_args(m.group(1), line, col)
            dest = re.sub(r"\s+", "", m.group(2))
            if len(args) != 1 or args[0] is None:
                raise QasmError("measure must name a single qubit", line, col)
            gates.append(RawGate("measure", (args[0],), target=dest))
            continue
        if head == "barrier":
            args = qubit_args(stmt[len("barrier"):], line, col)
            if None in args:
                qs = tuple(range(qreg[1]))
            else:
                qs = tuple(dict.fromkeys(args))
            gates.append(RawGate("barrier", qs))
            continue

        m = _APPLY.match(stmt)
        if not m or not m.group(3).strip():
            raise QasmError(f"cannot parse statement {stmt!r}", line, col)
        name = m.group(1)
        if name == "CX":
            name = "cx"
        params = tuple(_split_top_level(m.group(2))) if m.group(2) is not None else ()
        if params == ("",):
            params = ()
        args = qubit_args(m.group(3), line, col)
        if name in TWO_QUBIT_GATES:
            if len(args) != 2:
                raise QasmError(f"{name} takes 2 qubits, got {len(args)}", line, col)
            if None in args:
                raise QasmError(f"register broadcast is not supported for {name}", line, col)
            if args[0] == args[1]:
                raise QasmError(f"{name} needs two distinct qubits", line, col)
            gates.append(RawGate(name, (args[0], args[1]), params))
        elif len(args) == 1:
            if args[0] is None:
                gates.extend(RawGate(name, (q,), params) for q in range(qreg[1]))
            else:
                gates.append(RawGate(name, (args[0],), params))
        else:
            raise QasmError(f"unknown multi-qubit gate {name!r}", line, col)

    if not seen_version:
        raise QasmError("program must start with 'OPENQASM 2.0;'", 1, 1)
    qname, size = qreg if qreg is not None else ("q", 0)
    return SourceCircuit(size, gates, Header(qname, tuple(cregs), tuple(includes)))


def _fmt(q: str, idx: int) -> str:
    return f"{q}[{idx}]"


def _swap_lines(q: str, a: int, b: int, directed: bool) -> list[str]:
    if not directed:
        return [f"cx {_fmt(q, a)},{_fmt(q, b)};", f"cx {_fmt(q, b)},{_fmt(q, a)};", f"cx {_fmt(q, a)},{_fmt(q, b)};"]
    # every CNOT keeps `a` as control; the middle one is reversed by H conjugation
    cx = f"cx {_fmt(q, a)},{_fmt(q, b)};"
    hh = [f"h {_fmt(q, a)};", f"h {_fmt(q, b)};"]
    return [cx, *hh, cx, *hh, cx]


def emit_qasm(circuit: SourceCircuit, decompose_swaps: bool = False, directed: bool = False) -> str:
    """Render a circuit as OpenQASM 2.0 text.

    With ``decompose_swaps`` each ``swap a,b`` becomes three CNOTs, or three
    CNOTs plus four Hadamards when ``directed`` (the first qubit is used as
    control throughout, so it must be the control end of the link).
    """
    h = circuit.header
    q = h.qreg
    lines = ["OPENQASM 2.0;"]
    lines += [f'include "{inc}";' for inc in h.includes]
    lines.append(f"qreg {q}[{circuit.num_qubits}];")
    lines += [f"creg {name}[{size}];" for name, size in h.cregs]
    for g in circuit.gates:
        if g.name == "measure":
            lines.append(f"measure {_fmt(q, g.qubits[0])} -> {g.target};")
        elif g.name == "barrier":
            lines.append("barrier " + ",".join(_fmt(q, i) for i in g.qubits) + ";")
        elif g.name == "swap" and decompose_swaps:
            lines += _swap_lines(q, g.qubits[0], g.qubits[1], directed)
        else:
            p = f"({','.join(g.params)})" if g.params else ""
            lines.append(f"{g.name}{p} " + ",".join(_fmt(q, i) for i in g.qubits) + ";")
    return "\n".join(lines) + "\n"
