from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

import slackq
from slackq.qasm import RawGate, SourceCircuit, parse_qasm

DATA = Path(slackq.__file__).parent / "data"
FIXTURES = DATA / "fixtures"
CORPUS = DATA / "corpus"

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ONE_Q = ("h", "x", "t", "s", "z", "tdg")


def fixture_circuit(name: str) -> SourceCircuit:
    return parse_qasm((FIXTURES / f"{name}.qasm").read_text())


def random_circuit(rng: random.Random, n: int, gates: int, cx_frac: float = 0.5,
                   params: bool = False) -> SourceCircuit:
    out = []
    for _ in range(gates):
        if n >= 2 and rng.random() < cx_frac:
            out.append(RawGate("cx", tuple(rng.sample(range(n), 2))))
        elif params and rng.random() < 0.3:
            out.append(RawGate("rz", (rng.randrange(n),), (f"{rng.randint(1, 7)}*pi/8",)))
        else:
            out.append(RawGate(rng.choice(ONE_Q), (rng.randrange(n),)))
    return SourceCircuit(n, out)


@st.composite
def circuits(draw, max_qubits: int = 6, max_gates: int = 30, min_qubits: int = 2):
    n = draw(st.integers(min_qubits, max_qubits))
    size = draw(st.integers(0, max_gates))
    gates = []
    for _ in range(size):
        kind = draw(st.sampled_from(("1q", "cx", "cx")))
        if kind == "1q":
            gates.append(RawGate(draw(st.sampled_from(ONE_Q)), (draw(st.integers(0, n - 1)),)))
        else:
            pair = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
            gates.append(RawGate("cx", tuple(pair)))
    return SourceCircuit(n, gates)


@pytest.fixture
def rng():
    return random.Random(1234)
