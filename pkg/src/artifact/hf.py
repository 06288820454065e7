"""Hereditarily finite sets, stored by their Ackermann code.

The Ackermann bijection N(x) = sum of 2**N(y) over y in x identifies every
hereditarily finite set with a natural number, so an HF value here is just a
wrapped int: y is an element of x exactly when bit N(y) of N(x) is set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Iterator


@total_ordering
@dataclass(frozen=True, slots=True)
class HF:
    """A hereditarily finite set, identified with its Ackermann code."""

    code: int

    def __post_init__(self) -> None:
        if self.code < 0:
            raise ValueError("Ackermann codes are natural numbers")

    def __lt__(self, other: "HF") -> bool:
        return self.code < other.code

    def elements(self) -> tuple["HF", ...]:
        """Members in canonical (code) order."""
        return tuple(HF(i) for i in _bits(self.code))

    def __iter__(self) -> Iterator["HF"]:
        return iter(self.elements())

    def __len__(self) -> int:
        return self.code.bit_count()

    def __contains__(self, item: object) -> bool:
        if not isinstance(item, HF):
            return False
        return item.code < self.code.bit_length() and bool((self.code >> item.code) & 1)

    def rank(self) -> int:
        """Von Neumann rank: 0 for the empty set, else 1 + max member rank."""
        if self.code == 0:
            return 0
        return 1 + max(e.rank() for e in self.elements())

    def __repr__(self) -> str:
        return f"#{self.code}"


def _bits(n: int) -> Iterator[int]:
    i = 0
    while n:
        if n & 1:
            yield i
        n >>= 1
        i += 1


EMPTY = HF(0)


def hf_set(members: Iterable[HF]) -> HF:
    code = 0
    for m in members:
        code |= 1 << m.code
    return HF(code)


def encode_hf(x: "HF | frozenset") -> int:
    """Ackermann code of an HF set given as an HF value or nested frozensets."""
    if isinstance(x, HF):
        return sum(1 << encode_hf(y) for y in x.elements())
    return sum(1 << encode_hf(y) for y in x)


def decode_hf(n: int) -> HF:
    if n < 0:
        raise ValueError("Ackermann codes are natural numbers")
    return HF(n)


def to_frozenset(x: HF) -> frozenset:
    """Nested-frozenset view of an HF value (independent structural form)."""
    return frozenset(to_frozenset(y) for y in x.elements())


def from_frozenset(s: frozenset) -> HF:
    return HF(encode_hf(s))


def universe_size(rank: int) -> int:
    """|V_rank|: number of HF sets of rank < rank (tower of twos)."""
    size = 0
    for _ in range(rank):
        size = 1 << size
    return size


MAX_UNIVERSE_RANK = 5


def hf_of_rank_below(rank: int) -> list[HF]:
    """All HF sets of rank < rank, in code order."""
    if rank > MAX_UNIVERSE_RANK:
        raise ValueError(f"rank {rank} exceeds configured bound {MAX_UNIVERSE_RANK}")
    return [HF(i) for i in range(universe_size(rank))]


def natural(n: int) -> HF:
    """The HF value used for the natural number n inside ω-universes."""
    return HF(n)


def kuratowski(a: HF, b: HF) -> HF:
    return hf_set([hf_set([a]), hf_set([a, b])])
