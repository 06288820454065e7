"""The least-split embedding of Cohen forcing into the kernel and generic
model construction from bit streams with a dense-set schedule."""

from __future__ import annotations

import random
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .certify import engine, show_condition, sort_condition
from .coding import godel_number, table_for_tci
from .kernel import DEFAULT_SEARCH_CAP, DEFAULT_STAGE_CAP, _exclusion_clauses, derive
from .semantics import Structure
from .syntax import Formula, Not, neg, to_text
from .tci import EXACT, TCI, model_of


class CapExceeded(RuntimeError):
    """The search cap ran out before a split (or a scheduled set) was reached."""


class WindowExhausted(CapExceeded):
    """Every pair of the window is decided: the condition no longer splits."""


class OffPath(ValueError):
    """A fragment that no π-path passes through."""


class NotDense(ValueError):
    """A scheduled set is not dense below the current condition."""


# ---------------------------------------------------------------------------
# Bit streams and schedules


@dataclass
class BitStream:
    """Explicit bits, or an endless stream replayed from `seed`."""

    bits: str | None = None
    seed: int | None = None
    _pos: int = 0
    _rng: random.Random | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.bits is None and self.seed is None:
            raise ValueError("a bit stream needs bits or a seed")
        if self.bits is not None and set(self.bits) - {"0", "1"}:
            raise ValueError("bits must be 0/1")
        if self.bits is None:
            self._rng = random.Random(self.seed)

    def next(self) -> str:
        if self.bits is not None:
            if self._pos >= len(self.bits):
                raise CapExceeded("bit stream exhausted")
            b = self.bits[self._pos]
        else:
            b = str(self._rng.getrandbits(1))
        self._pos += 1
        return b

    def take(self, n: int) -> str:
        return "".join(self.next() for _ in range(n))


@dataclass(frozen=True)
class ScheduleEntry:
    """`any`: meet {q : q contains one of the literals}; `decide`: meet
    {q : q decides the literal}."""

    kind: str
    literals: tuple

    def targets(self) -> tuple:
        if self.kind == "decide":
            (lit,) = self.literals
            return (lit, neg(lit))
        return self.literals

    def describe(self) -> str:
        return self.kind + " " + " ".join(to_text(l) for l in self.literals)


# ---------------------------------------------------------------------------
# The splitter: P*, least splits and π


class Splitter:
    """Least splits and the inductive π inside a target poset (the kernel at
    ω scope, P(T) itself at finite scope).  Pairs are the constraint-free
    positive sentences of the window in Gd order."""

    def __init__(self, tci: TCI, cap: int = 20, stage_cap: int = DEFAULT_STAGE_CAP,
                 search_cap: int = DEFAULT_SEARCH_CAP, target: str = "auto"):
        if target not in ("auto", "P", "kernel"):
            raise ValueError(f"unknown target poset {target!r}")
        self.tci = tci
        self.cap = cap
        self.search_cap = search_cap
        self.eng = engine(tci, cap)
        if target == "P" or (target == "auto" and tci.finite_scope):
            self.exclusions: tuple = ()
            self.target = "P"
        else:
            chain = derive(tci, stage_cap, search_cap, cap)
            if chain.kernel_empty:
                raise CapExceeded("the kernel is empty at this cap")
            self.exclusions = chain.exclusions
            self.target = "kernel"
        self.solver = self.eng.g.new_solver(_exclusion_clauses(self.eng, self.exclusions))
        table = table_for_tci(tci)
        free = [s for s in self.eng.g.positives if self._free(s)]
        self.pairs: list[Formula] = sorted(free, key=lambda s: godel_number(s, table))
        self.index = {s: i for i, s in enumerate(self.pairs)}
        self._memo: dict = {}
        self._pi: dict = {}

    def _free(self, s: Formula) -> bool:
        name = s.name if hasattr(s, "name") else s.left.name
        return self.tci.mode(name) != EXACT

    def contains(self, p) -> bool:
        p = frozenset(p)
        if p not in self._memo:
            if any(neg(s) in p for s in p):
                self._memo[p] = False
            else:
                lits = self.eng.literals(p)
                self._memo[p] = bool(self.solver.solve(assumptions=self.eng.selectors() + lits))
        return self._memo[p]

    def compatible(self, p, q) -> bool:
        return self.contains(frozenset(p) | frozenset(q))

    def split_index(self, x: frozenset) -> int | None:
        """The first pair not decided by x."""
        for i, s in enumerate(self.pairs):
            if s not in x and neg(s) not in x:
                return i
        return None

    def least_split(self, z: Iterable[Formula]) -> frozenset:
        """Follow forced literals from z until both sides of the first
        undecided pair are conditions; a condition deciding every pair of
        the window is returned as is."""
        x = frozenset(z)
        if not self.contains(x):
            raise ValueError(f"{show_condition(x)} is not a condition of the {self.target}")
        for _ in range(self.search_cap + 1):
            n = self.split_index(x)
            if n is None:
                return x
            s = self.pairs[n]
            yes, no = self.contains(x | {s}), self.contains(x | {neg(s)})
            if yes and no:
                return x
            x = x | {s if yes else neg(s)}
        raise CapExceeded(f"no split within {self.search_cap} forced steps")

    def child(self, x: frozenset, bit: str) -> frozenset:
        n = self.split_index(x)
        if n is None:
            raise WindowExhausted("every pair in the window is decided")
        s = self.pairs[n]
        return self.least_split(x | {s if bit == "1" else neg(s)})

    def pi(self, bits: str) -> frozenset:
        if bits not in self._pi:
            if bits == "":
                self._pi[bits] = self.least_split(())
            else:
                self._pi[bits] = self.child(self.pi(bits[:-1]), bits[-1])
        return self._pi[bits]

    def maximal(self, x: frozenset) -> bool:
        return self.split_index(x) is None

    def completion(self, x: frozenset) -> frozenset:
        """The full Σ of the first model extending x (its only one once x is
        maximal at finite scope)."""
        if not self.solver.solve(assumptions=self.eng.selectors() + self.eng.literals(x)):
            raise ValueError(f"{show_condition(x)} has no model")
        return self.eng.fragment(self.eng.g.positive_model(self.solver.get_model()))

    def close(self) -> None:
        self.solver.delete()


_SPLITTERS: "weakref.WeakKeyDictionary[TCI, dict]" = weakref.WeakKeyDictionary()


def splitter(tci: TCI, cap: int = 20, stage_cap: int = DEFAULT_STAGE_CAP,
             search_cap: int = DEFAULT_SEARCH_CAP, target: str = "auto") -> Splitter:
    per = _SPLITTERS.setdefault(tci, {})
    key = (cap, stage_cap, search_cap, target)
    if key not in per:
        per[key] = Splitter(tci, cap, stage_cap, search_cap, target)
    return per[key]


def least_split(tci: TCI, z: Iterable[Formula] = (), search_cap: int = DEFAULT_SEARCH_CAP,
                cap: int = 20, target: str = "auto") -> frozenset:
    """The ⊆-least x ⊇ z splitting at its first undecided pair.  `target`
    "P" works in P(T) itself instead of the kernel."""
    return splitter(tci, cap, search_cap=search_cap, target=target).least_split(z)


def cohen_embed(tci: TCI, x: str, search_cap: int = DEFAULT_SEARCH_CAP, cap: int = 20,
                stage_cap: int = DEFAULT_STAGE_CAP) -> frozenset:
    """π(x) for a bit string x."""
    if set(x) - {"0", "1"}:
        raise ValueError("x must be a bit string")
    return splitter(tci, cap, stage_cap, search_cap).pi(x)


# ---------------------------------------------------------------------------
# Sampling and decoding


@dataclass(frozen=True)
class SampleResult:
    stream_bits: str
    path: str
    fragment: frozenset
    model: Structure | None
    met: tuple  # (schedule entry description, literal met)
    cap: int

    def literals(self) -> list[Formula]:
        """The fragment sorted by text."""
        return sort_condition(self.fragment)


def _meet(sp: Splitter, path: str, entry: ScheduleEntry) -> tuple[str, Formula]:
    x = sp.pi(path)
    targets = entry.targets()
    for lit in targets:
        if lit in x:
            return path, lit
    if sp.contains(x | {neg(l) for l in targets}):
        raise NotDense(f"'{entry.describe()}' is not dense below {show_condition(x)}")
    lit = next(l for l in targets if sp.contains(x | {l}))
    for _ in range(sp.search_cap + 1):
        if lit in x:
            return path, lit
        for b in "01":
            y = sp.pi(path + b)
            if sp.contains(y | {lit}):
                path, x = path + b, y
                break
        else:
            raise CapExceeded(f"could not reach {to_text(lit)}")
    raise CapExceeded(f"'{entry.describe()}' not met within {sp.search_cap} steps")


def sample_model(tci: TCI, bits: BitStream, steps: int, schedule: Iterable[ScheduleEntry] = (),
                 cap: int = 20, stage_cap: int = DEFAULT_STAGE_CAP,
                 search_cap: int = DEFAULT_SEARCH_CAP, target: str = "auto") -> SampleResult:
    """Follow the stream through π, meeting each scheduled set before the
    next step.  Finite scope descends to a single model."""
    sp = splitter(tci, cap, stage_cap, search_cap, target)
    schedule = list(schedule)
    path, used, met = "", "", []
    i = 0
    while True:
        if i < len(schedule):
            path, lit = _meet(sp, path, schedule[i])
            met.append((schedule[i].describe(), to_text(lit)))
        more = (i < steps or tci.finite_scope) and not sp.maximal(sp.pi(path))
        if not more and i >= len(schedule):
            break
        if more:
            b = bits.next()
            used += b
            try:
                sp.pi(path + b)
            except WindowExhausted:
                break
            path += b
        i += 1
    frag = sp.pi(path)
    model = None
    if tci.finite_scope:
        frag = sp.completion(frag)
        model = model_of(tci, frag, cap)
    return SampleResult(used, path, frag, model, tuple(met), cap)


def decode_model(tci: TCI, prefix: Iterable[Formula], search_cap: int = DEFAULT_SEARCH_CAP,
                 cap: int = 20, stage_cap: int = DEFAULT_STAGE_CAP, target: str = "auto") -> str:
    """The bit string x with π(x) ⊆ prefix maximal."""
    prefix = frozenset(prefix)
    if any(neg(s) in prefix for s in prefix):
        raise OffPath("the fragment contains a literal and its negation")
    if not prefix:
        return ""
    sp = splitter(tci, cap, stage_cap, search_cap, target)
    if not sp.pi("") <= prefix:
        raise OffPath("the fragment is off every π-path")
    x = ""
    while True:
        for b in "01":
            try:
                y = sp.pi(x + b)
            except CapExceeded:
                continue
            if y <= prefix:
                x += b
                break
        else:
            break
    if not sp.contains(sp.pi(x) | prefix):
        raise OffPath("the fragment is off every π-path")
    return x


def streams(n: int, length: int) -> Iterator[str]:
    """All bit strings of a given length, in lexicographic order (first n)."""
    for k in range(min(n, 1 << length)):
        yield format(k, f"0{length}b") if length else ""
