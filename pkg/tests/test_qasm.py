import pytest
from hypothesis import given

from slackq.qasm import QasmError, RawGate, SourceCircuit, emit_qasm, parse_qasm

from conftest import CORPUS, circuits, fixture_circuit

HDR = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_empty_program():
    c = parse_qasm("OPENQASM 2.0; qreg q[1];")
    assert c.num_qubits == 1 and c.gates == []


def test_motivation_fixture_has_six_gates_in_order():
    c = fixture_circuit("fig_motivation")
    assert c.num_qubits == 5
    assert [(g.name, g.qubits) for g in c.gates] == [
        ("cx", (0, 1)), ("h", (1,)), ("h", (0,)), ("x", (1,)), ("cx", (1, 4)), ("h", (4,))]


def test_params_are_opaque_text():
    c = parse_qasm(HDR + "qreg q[2];\nrz(pi/4 + 0.1) q[0];\nu3(a,b,c) q[1];\n")
    assert c.gates[0].params == ("pi/4 + 0.1",)
    assert c.gates[1].params == ("a", "b", "c")


def test_register_broadcast_and_measure():
    c = parse_qasm(HDR + "qreg q[3];\ncreg c[3];\nh q;\nbarrier q;\nmeasure q[2] -> c[2];\n")
    assert [g.qubits for g in c.gates[:3]] == [(0,), (1,), (2,)]
    assert c.gates[3] == RawGate("barrier", (0, 1, 2))
    assert c.gates[4].name == "measure" and c.gates[4].qubits == (2,)


@pytest.mark.parametrize("src, where", [
    ("qreg q[2];\ncx q[0] q[1];\n", (4, 1)),
    ("qreg q[2];\nh q[5];\n", (4, 1)),
    ("qreg q[2];\nqreg r[2];\n", (4, 1)),
    ("qreg q[3];\nccx q[0],q[1],q[2];\n", (4, 1)),
    ("qreg q[2];\ncx q[0];\n", (4, 1)),
    ("qreg q[2];\nh q[0]\n", None),
])
def test_errors_carry_position(src, where):
    with pytest.raises(QasmError) as exc:
        parse_qasm(HDR + src)
    assert exc.value.line >= 1 and exc.value.column >= 1
    if where:
        assert (exc.value.line, exc.value.column) == where


def test_cx_same_qubit_rejected():
    with pytest.raises(QasmError):
        parse_qasm(HDR + "qreg q[2];\ncx q[1],q[1];\n")


def test_emit_empty_is_header_only():
    text = emit_qasm(SourceCircuit(2, []))
    assert text == HDR + "qreg q[2];\n"


def test_swap_decomposition_bidirectional():
    text = emit_qasm(SourceCircuit(2, [RawGate("swap", (0, 1))]), decompose_swaps=True)
    body = [l for l in text.splitlines() if l.startswith(("cx", "h", "swap"))]
    assert len(body) == 3 and all(l.startswith("cx") for l in body)


def test_swap_decomposition_directed():
    text = emit_qasm(SourceCircuit(2, [RawGate("swap", (0, 1))]), decompose_swaps=True, directed=True)
    body = [l for l in text.splitlines() if l.startswith(("cx", "h", "swap"))]
    assert sum(l.startswith("cx") for l in body) == 3
    assert sum(l.startswith("h ") for l in body) == 4
    # every cx keeps the link's orientation
    assert {l for l in body if l.startswith("cx")} == {"cx q[0],q[1];"}


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.qasm")), ids=lambda p: p.name)
def test_corpus_round_trip(path):
    c = parse_qasm(path.read_text())
    again = parse_qasm(emit_qasm(c))
    assert again.num_qubits == c.num_qubits and again.gates == c.gates


@given(circuits(max_qubits=5, max_gates=25))
def test_round_trip_property(c):
    again = parse_qasm(emit_qasm(c))
    assert again.gates == c.gates and again.num_qubits == c.num_qubits


@given(circuits(max_qubits=4, max_gates=15))
def test_decomposition_count_arithmetic(c):
    swapped = SourceCircuit(c.num_qubits, [RawGate("swap", g.qubits) if g.name == "cx" else g for g in c.gates])
    swaps = sum(g.name == "swap" for g in swapped.gates)
    for directed, per in ((False, 3), (True, 7)):
        out = parse_qasm(emit_qasm(swapped, decompose_swaps=True, directed=directed))
        assert len(out.gates) == len(swapped.gates) - swaps + per * swaps


def test_emit_is_deterministic():
    c = fixture_circuit("fig_flexslack")
    assert emit_qasm(c) == emit_qasm(c)
    assert "\r" not in emit_qasm(c)
