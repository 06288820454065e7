"""Certification: P(T) membership by model search, consistency decisions,
the longest-chain oracle and the lazy P(T) poset."""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .grounding import Grounding, NotInLanguage, iter_models
from .semantics import Structure, models_star
from .syntax import Const, Eq, Formula, Language, Not, Quant, Rel, App, is_nice, neg, to_text
from .tci import EXACT, SUBSET, TCI, chain_sentence, structure_from_fragment

CERTIFIED_EXACT = "certified-exact"
CERTIFIED_WITNESS = "certified-with-witness"
REFUTED_EXACT = "refuted-exact"
UNKNOWN = "unknown-at-cap"
STATUSES = (CERTIFIED_EXACT, CERTIFIED_WITNESS, REFUTED_EXACT, UNKNOWN)


@dataclass(frozen=True)
class CertVerdict:
    status: str
    witness: Structure | None = None
    fragment: frozenset | None = None
    cap: int | None = None
    note: str = ""

    @property
    def certified(self) -> bool:
        return self.status in (CERTIFIED_EXACT, CERTIFIED_WITNESS)

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED_EXACT

    @property
    def definite(self) -> bool:
        return self.status != UNKNOWN


def sort_condition(p: Iterable[Formula]) -> list:
    return sorted(p, key=to_text)


def show_condition(p: Iterable[Formula]) -> str:
    return "{" + ", ".join(to_text(s) for s in sort_condition(p)) + "}"


# ---------------------------------------------------------------------------
# Certification


def certifies(sigma: Iterable[Formula], gamma: Iterable[Formula], lang: Language,
              A: Structure, p: Iterable[Formula] = ()) -> bool:
    sigma = frozenset(sigma)
    if not frozenset(p) <= sigma:
        return False
    if not is_nice(sigma, lang):
        return False
    return models_star(sigma, A, gamma, lang)


# ---------------------------------------------------------------------------
# Longest-chain oracle


@dataclass(frozen=True)
class OracleResult:
    symbol: str
    longest: int
    demanded: int

    @property
    def note(self) -> str:
        return f"max chain in {self.symbol} extension = {self.longest}, theory demands {self.demanded}"


def chain_length(phi: Formula, rel: str) -> int | None:
    """n if phi is syntactically chain_n over rel."""
    n, f = 0, phi
    while isinstance(f, Quant) and f.q == "exists":
        n += 1
        f = f.body
    if n >= 2 and phi == chain_sentence(rel, n):
        return n
    return None


def longest_path(edges: Iterable[tuple]) -> int | None:
    """Vertices on a longest directed path, or None if there is a cycle."""
    edges = sorted(set(edges))
    succ: dict = {}
    nodes = set()
    for a, b in edges:
        succ.setdefault(a, []).append(b)
        nodes |= {a, b}
    memo: dict = {}
    state: dict = {}

    def depth(v) -> int:
        if v in memo:
            return memo[v]
        if state.get(v) == "open":
            raise ValueError("cycle")
        state[v] = "open"
        best = 1 + max((depth(w) for w in succ.get(v, ())), default=0)
        state[v] = "done"
        memo[v] = best
        return best

    try:
        return max((depth(v) for v in sorted(nodes)), default=1 if nodes else 0)
    except ValueError:
        return None


def longest_chain_oracle(tci: TCI) -> OracleResult | None:
    """Exact refutation: a model's R lies inside a finite acyclic extension S,
    so no R-chain is longer than the longest path in S."""
    for sym in tci.sigma:
        if sym.kind != "relation" or sym.arity != 2:
            continue
        ext = tci.constraint[sym.name].extension
        if ext.kind != "finite":
            continue
        L = longest_path(ext.tuples)
        if L is None:
            continue
        demands = [n for n in (chain_length(phi, sym.name) for phi in tci.theory) if n]
        if tci.tail is not None and tci.tail.symbol == sym.name:
            demands.append(tci.tail.start)
        if demands and max(demands) > L:
            return OracleResult(sym.name, L, max(demands))
    return None


# ---------------------------------------------------------------------------
# Search engine (cached per TCI and window)


class Engine:
    """A grounding of the whole theory (tail closed off at the window size)
    with one selector per enumerated theory sentence."""

    def __init__(self, tci: TCI, cap: int, extra: tuple = ()):
        self.tci = tci
        self.cap = cap
        window = sorted(set(tci.window(cap)) | set(extra))
        theory = tci.theory
        if tci.tail is not None:
            size = sum(1 for a in window if tci.in_extension(tci.u_symbol.name, (a,)))
            theory = theory + (tci.tail.sentence(max(tci.tail.start, size + 1)),)
        self.g = Grounding(tci, tuple(window), theory)
        self.n_enumerated = len(tci.theory)
        self._solver = None

    @property
    def solver(self):
        if self._solver is None:
            self._solver = self.g.new_solver()
        return self._solver

    def selectors(self, subset: Iterable[int] | None = None, tail: bool = True) -> list[int]:
        sels = self.g.selectors
        if subset is None:
            chosen = list(range(self.n_enumerated))
        else:
            chosen = sorted(subset)
        out = [sels[i] for i in chosen]
        off = [sels[i] for i in range(self.n_enumerated) if i not in set(chosen)]
        out += [-s for s in off]
        if len(sels) > self.n_enumerated:
            out.append(sels[-1] if tail else -sels[-1])
        return out

    def literals(self, p: Iterable[Formula]) -> list[int]:
        return [self.g.literal(s) for s in sort_condition(p)]

    def solve(self, lits: list[int], subset=None, tail: bool = True) -> list[int] | None:
        s = self.solver
        if s.solve(assumptions=self.selectors(subset, tail) + lits):
            return self.g.positive_model(s.get_model())
        return None

    def fragment(self, model: list[int]) -> frozenset:
        return self.g.fragment(model)

    def structure(self, model: list[int]) -> Structure:
        return structure_from_fragment(self.tci, self.fragment(model))

    def models(self, lits: list[int] = (), extra=(), limit: int | None = None,
               subset=None) -> list[list[int]]:
        return list(iter_models(self.g, self.selectors(subset) + list(lits), extra, limit))


_ENGINES: "weakref.WeakKeyDictionary[TCI, dict]" = weakref.WeakKeyDictionary()


def engine(tci: TCI, cap: int, extra: Iterable = ()) -> Engine:
    extra = tuple(sorted(set(extra) - set(tci.window(cap))))
    per = _ENGINES.setdefault(tci, {})
    key = (cap, extra)
    if key not in per:
        per[key] = Engine(tci, cap, extra)
    return per[key]


def condition_elements(p: Iterable[Formula]) -> set:
    out = set()
    for s in p:
        body = s.body if isinstance(s, Not) else s
        if isinstance(body, Rel):
            out |= {a.value for a in body.args if isinstance(a, Const)}
        elif isinstance(body, Eq) and isinstance(body.left, App):
            out |= {a.value for a in body.left.args if isinstance(a, Const)}
            if isinstance(body.right, Const):
                out.add(body.right.value)
    return out


def check_condition(tci: TCI, p: Iterable[Formula]) -> None:
    """Raise NotInLanguage unless every member of p is an L_T literal."""
    for s in p:
        body = s.body if isinstance(s, Not) else s
        if isinstance(body, Rel):
            if not all(isinstance(a, Const) for a in body.args):
                raise NotInLanguage(to_text(s))
            t = tuple(a.value for a in body.args)
            if body.name == tci.u_symbol.name:
                ok = tci.in_extension(body.name, t)
            else:
                try:
                    sym = tci.symbol(body.name)
                except KeyError:
                    raise NotInLanguage(to_text(s)) from None
                ok = sym.kind == "relation" and tci.in_extension(sym.name, t)
                ok = ok and all(tci.in_extension(tci.u_symbol.name, (a,)) for a in t)
        elif isinstance(body, Eq) and isinstance(body.left, App) and isinstance(body.right, Const):
            if not all(isinstance(a, Const) for a in body.left.args):
                raise NotInLanguage(to_text(s))
            try:
                sym = tci.symbol(body.left.name)
            except KeyError:
                raise NotInLanguage(to_text(s)) from None
            t = tuple(a.value for a in body.left.args) + (body.right.value,)
            ok = sym.kind != "relation" and tci.in_extension(sym.name, t)
            ok = ok and all(tci.in_extension(tci.u_symbol.name, (a,)) for a in t)
        else:
            ok = False
        if not ok:
            raise NotInLanguage(to_text(s))


def _positive_ok(tci: TCI) -> bool:
    """Window models are genuine models (or restrictions of genuine ones)."""
    return tci.finite_scope or tci.mode(tci.u_symbol.name) == SUBSET or tci.truncation_sound


def in_P(tci: TCI, p: Iterable[Formula] = (), cap: int = 20) -> CertVerdict:
    p = frozenset(p)
    check_condition(tci, p)
    if any(neg(s) in p for s in p):
        return CertVerdict(REFUTED_EXACT, cap=cap, note="condition contains a literal and its negation")
    oracle = longest_chain_oracle(tci)
    if oracle is not None:
        return CertVerdict(REFUTED_EXACT, cap=cap, note=oracle.note)
    eng = engine(tci, cap, condition_elements(p))
    m = eng.solve(eng.literals(p))
    if m is not None:
        frag = eng.fragment(m)
        status = CERTIFIED_WITNESS if _positive_ok(tci) else UNKNOWN
        note = "" if status != UNKNOWN else "window model found; truncation not known to be sound"
        return CertVerdict(status, eng.structure(m), frag, cap, note)
    if tci.finite_scope:
        return CertVerdict(REFUTED_EXACT, cap=cap, note="finite search space exhausted")
    return CertVerdict(UNKNOWN, cap=cap, note="no model inside the cap window")


def consistent(tci: TCI, cap: int = 20) -> CertVerdict:
    return in_P(tci, (), cap)


@dataclass(frozen=True)
class SubsetVerdict:
    indices: tuple
    verdict: CertVerdict


@dataclass(frozen=True)
class FiniteConsistency:
    k: int
    cap: int
    results: tuple = field(default_factory=tuple)

    @property
    def status(self) -> str:
        sts = [r.verdict.status for r in self.results]
        if any(s == REFUTED_EXACT for s in sts):
            return REFUTED_EXACT
        if any(s == UNKNOWN for s in sts):
            return UNKNOWN
        return CERTIFIED_WITNESS if self.results else CERTIFIED_EXACT

    @property
    def holds(self) -> bool:
        return self.status in (CERTIFIED_EXACT, CERTIFIED_WITNESS)


def subset_verdict(tci: TCI, indices: tuple, cap: int) -> CertVerdict:
    sub = tci.with_theory([tci.theory[i] for i in indices])
    oracle = longest_chain_oracle(sub)
    if oracle is not None:
        return CertVerdict(REFUTED_EXACT, cap=cap, note=oracle.note)
    eng = engine(tci, cap)
    m = eng.solve([], subset=indices, tail=False)
    if m is not None:
        status = CERTIFIED_WITNESS if _positive_ok(sub) else UNKNOWN
        return CertVerdict(status, eng.structure(m), eng.fragment(m), cap)
    if tci.universe_ext.kind == "finite":
        return CertVerdict(REFUTED_EXACT, cap=cap, note="finite search space exhausted")
    return CertVerdict(UNKNOWN, cap=cap, note="no model inside the cap window")


def _subset_job(args):
    tci, idx, cap = args
    return subset_verdict(tci, idx, cap)


def finitely_consistent(tci: TCI, k: int, cap: int = 20, jobs: int = 1) -> FiniteConsistency:
    """Consistency of (T', σ, U, ϑ) for every T' ⊆ T (enumerated part) with |T'| <= k."""
    n = len(tci.theory)
    subsets = [idx for r in range(0, min(k, n) + 1) for idx in combinations(range(n), r)]
    from .parallel import pmap

    verdicts = pmap(_subset_job, [(tci, idx, cap) for idx in subsets], jobs)
    return FiniteConsistency(k, cap, tuple(SubsetVerdict(i, v) for i, v in zip(subsets, verdicts)))


# ---------------------------------------------------------------------------
# The poset P(T)


def all_literals(tci: TCI, cap: int = 20) -> list:
    """Every L_T literal inside the cap window (positive first, canonical order)."""
    eng = engine(tci, cap)
    pos = list(eng.g.positives)
    return pos + [neg(s) for s in pos]


class CertPoset:
    """P(T): finite conditions ordered by reverse inclusion; membership,
    compatibility and the w-order are decided by model search inside the
    cap window (exact at finite scope)."""

    def __init__(self, tci: TCI, cap: int = 20):
        self.tci = tci
        self.cap = cap
        self.exact = tci.finite_scope

    def contains(self, p) -> bool:
        return in_P(self.tci, p, self.cap).certified

    def leq(self, p, q) -> bool:
        return frozenset(q) <= frozenset(p)

    def compatible(self, p, q) -> bool:
        return self.contains(frozenset(p) | frozenset(q))

    def w_leq(self, p, q) -> bool:
        """Every model of p is a model of q."""
        p = frozenset(p)
        return all(not self.contains(p | {neg(s)}) for s in q if s not in p)

    def models(self, p=(), limit: int | None = None) -> list[frozenset]:
        p = frozenset(p)
        if any(neg(s) in p for s in p) or longest_chain_oracle(self.tci):
            return []
        eng = engine(self.tci, self.cap, condition_elements(p))
        return [eng.fragment(m) for m in eng.models(eng.literals(p), limit=limit)]

    def is_atom(self, p) -> bool:
        """Atom iff exactly one model (inside the window at ω scope)."""
        return len(self.models(p, limit=2)) == 1

    def g_union(self, p) -> frozenset:
        """⋃ g_p = every literal compatible with p."""
        p = frozenset(p)
        return frozenset(s for s in all_literals(self.tci, self.cap) if self.contains(p | {s}))

    def maximal_conditions(self) -> list[frozenset]:
        return sorted(self.models(), key=show_condition)

    def elements(self) -> list[frozenset]:
        """All conditions (finite scope): subsets of some Σ(M)."""
        if not self.exact:
            raise ValueError("explicit enumeration needs a finite-scope TCI")
        out = set()
        for sig in self.models():
            lits = sort_condition(sig)
            for mask in range(1 << len(lits)):
                out.add(frozenset(l for i, l in enumerate(lits) if mask >> i & 1))
        return sorted(out, key=lambda c: (len(c), show_condition(c)))

    def explicit(self):
        from .posets import Order

        els = tuple(self.elements())
        pairs = frozenset((a, b) for a in els for b in els if b <= a)
        return Order(els, pairs, f"P({self.tci.name})")


def poset_of(tci: TCI, cap: int = 20) -> CertPoset:
    return CertPoset(tci, cap)
