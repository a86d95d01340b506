"""Logical-to-physical qubit assignment and its evolution under swaps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence


class SwapOp(NamedTuple):
    phys_a: int
    phys_b: int

    def canonical(self) -> "SwapOp":
        return self if self.phys_a < self.phys_b else SwapOp(self.phys_b, self.phys_a)


@dataclass(frozen=True)
class Mapping:
    """Bijection between logical and physical qubits over ``[0, n)``.

    Logical indices past the circuit's width stand for idle ancilla slots.
    """

    log_to_phys: tuple[int, ...]
    phys_to_log: tuple[int, ...]

    @classmethod
    def from_log_to_phys(cls, l2p: Sequence[int], num_physical: int | None = None) -> "Mapping":
        """Build from a (possibly partial) logical->physical list.

        Unused physical qubits are given to extra logical slots in
        increasing physical order.
        """
        n = len(l2p) if num_physical is None else num_physical
        if len(l2p) > n:
            raise ValueError(f"{len(l2p)} logical qubits do not fit on {n} physical qubits")
        if len(set(l2p)) != len(l2p) or any(p < 0 or p >= n for p in l2p):
            raise ValueError(f"not an injective assignment into [0, {n}): {list(l2p)}")
        used = set(l2p)
        full = list(l2p) + [p for p in range(n) if p not in used]
        inv = [0] * n
        for lq, pq in enumerate(full):
            inv[pq] = lq
        return cls(tuple(full), tuple(inv))

    def __len__(self) -> int:
        return len(self.log_to_phys)

    def phys(self, logical: int) -> int:
        return self.log_to_phys[logical]

    def logical(self, physical: int) -> int:
        return self.phys_to_log[physical]


def identity_mapping(n: int) -> Mapping:
    if n < 1:
        raise ValueError("mapping needs at least one qubit")
    r = tuple(range(n))
    return Mapping(r, r)


def apply_swap(pi: Mapping, s: SwapOp) -> Mapping:
    a, b = s
    if a == b:
        raise ValueError("swap endpoints must differ")
    p2l = list(pi.phys_to_log)
    la, lb = p2l[a], p2l[b]
    p2l[a], p2l[b] = lb, la
    l2p = list(pi.log_to_phys)
    l2p[la], l2p[lb] = b, a
    return Mapping(tuple(l2p), tuple(p2l))


def apply_swaps(pi: Mapping, swaps) -> Mapping:
    for s in swaps:
        pi = apply_swap(pi, s)
    return pi
