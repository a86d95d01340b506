"""Regenerate the bundled benchmark corpus (deterministic, seeded)."""

from __future__ import annotations

import random
import sys
from pathlib import Path

ONE_Q = ("h", "x", "t", "tdg", "s", "z")
OUT = Path(__file__).resolve().parents[1] / "src" / "slackq" / "data" / "corpus"


def _emit(name: str, n: int, body: list[str]) -> None:
    text = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{n}];", f"creg c[{n}];"]
    text += body
    text += [f"measure q[{i}] -> c[{i}];" for i in range(n)]
    (OUT / f"{name}.qasm").write_text("\n".join(text) + "\n", encoding="utf-8")


def random_circuit(rng: random.Random, n: int, gates: int, cx_frac: float) -> list[str]:
    body = []
    for _ in range(gates):
        if rng.random() < cx_frac:
            a, b = rng.sample(range(n), 2)
            body.append(f"cx q[{a}],q[{b}];")
        else:
            body.append(f"{rng.choice(ONE_Q)} q[{rng.randrange(n)}];")
    return body


def ghz(n: int) -> list[str]:
    return ["h q[0];"] + [f"cx q[{i}],q[{i + 1}];" for i in range(n - 1)]


def qft_like(n: int) -> list[str]:
    body = []
    for i in range(n):
        body.append(f"h q[{i}];")
        for j in range(i + 1, n):
            body += [f"cx q[{j}],q[{i}];", f"rz(pi/{2 ** min(j - i, 6)}) q[{i}];", f"cx q[{j}],q[{i}];"]
    return body


def adder_like(rng: random.Random, n: int, rounds: int) -> list[str]:
    body = []
    for _ in range(rounds):
        for i in range(0, n - 2, 2):
            a, b, c = i, i + 1, i + 2
            body += [f"cx q[{c}],q[{b}];", f"cx q[{c}],q[{a}];", f"t q[{c}];",
                     f"cx q[{a}],q[{b}];", f"h q[{rng.randrange(n)}];"]
    return body


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*.qasm"):
        old.unlink()
    rng = random.Random(20190613)
    specs = [(5, 30), (6, 60), (8, 90), (10, 120), (12, 150), (16, 180),
             (6, 250), (10, 400), (14, 600), (20, 900)]
    for k, (n, g) in enumerate(specs):
        _emit(f"rand_{k:02d}_n{n}_g{g}", n, random_circuit(rng, n, g, 0.45))
    for n in (5, 10, 16):
        _emit(f"ghz_n{n}", n, ghz(n))
    for n in (5, 8, 12):
        _emit(f"qft_n{n}", n, qft_like(n))
    for n, r in ((7, 6), (11, 8), (15, 12), (19, 10)):
        _emit(f"adder_n{n}_r{r}", n, adder_like(rng, n, r))
    return 0


if __name__ == "__main__":
    sys.exit(main())
