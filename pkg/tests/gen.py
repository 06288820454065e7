"""Random star formulas over a small negation-closed language, shared by the
property and acceptance tests."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product

from artifact.hf import HF
from artifact.semantics import Structure
from artifact.syntax import (
    BQuant, Bin, Const, EAtom, Eq, Formula, Language, Mem, NegArg, Not, Quant, Rel, SymbolId,
    Var, close_under_negation, make_set,
)

Q = SymbolId("Q", "relation", 1)


@dataclass
class StarWorld:
    lang: Language
    pairs: list  # positive sentences
    A: Structure

    def nice(self) -> list[frozenset]:
        """Every L-nice Σ: one of each pair."""
        out = []
        for bits in product((0, 1), repeat=len(self.pairs)):
            out.append(frozenset(s if b else Not(s) for s, b in zip(self.pairs, bits)))
        return out

    def subsets(self) -> list[frozenset]:
        lits = sorted(self.lang.sentences, key=repr)
        return [frozenset(l for i, l in enumerate(lits) if mask >> i & 1)
                for mask in range(1 << len(lits))]


def world(n_pairs: int) -> StarWorld:
    pairs = [Rel("Q", (Const(HF(i)),)) for i in range(n_pairs)]
    lang = close_under_negation(pairs)
    base = tuple(HF(i) for i in range(4)) + tuple(lang.sentences)
    A = Structure(base, {"Q": frozenset({(HF(1),)})}, (Q,))
    return StarWorld(lang, pairs, A)


class Gen:
    def __init__(self, w: StarWorld, rng: random.Random):
        self.w = w
        self.rng = rng
        self.lits = sorted(w.lang.sentences, key=repr)
        self.next_var = 0

    def fresh(self) -> Var:
        v = Var(self.next_var)
        self.next_var += 1
        return v

    def atom(self, scope: list) -> Formula:
        r = self.rng
        k = r.randrange(7)
        if k <= 2 or not scope:
            if k == 5:
                return Mem(Const(HF(r.randrange(4))), Const(HF(r.randrange(4))))
            if k == 6:
                return Rel("Q", (Const(HF(r.randrange(4))),))
            return EAtom(Const(r.choice(self.lits)))
        v = r.choice(scope)
        if k == 3:
            return EAtom(v)
        if k == 4:
            return Eq(v, Const(r.choice(self.lits)))
        if k == 5:
            return EAtom(NegArg(v))
        return Not(EAtom(v))

    def delta0(self, depth: int, scope: list, bounds: list) -> Formula:
        r = self.rng
        if depth <= 0 or r.random() < 0.25:
            a = self.atom(scope)
            return Not(a) if r.random() < 0.3 else a
        k = r.randrange(10)
        if k < 5:
            op = r.choice(("and", "or", "implies", "iff", "and", "or"))
            return Bin(op, self.delta0(depth - 1, scope, bounds), self.delta0(depth - 1, scope, bounds))
        if k < 6:
            return Not(self.delta0(depth - 1, scope, bounds))
        z = self.fresh()
        if bounds and r.random() < 0.4:
            bound = r.choice(bounds)
        else:
            members = [l for l in self.lits if r.random() < 0.35] or [r.choice(self.lits)]
            bound = Const(make_set(members))
        q = r.choice(("forall", "exists"))
        return BQuant(q, z, bound, self.delta0(depth - 1, scope + [z], bounds))

    def sentence(self, depth: int = 3, sigma1: bool | None = None) -> Formula:
        self.next_var = 0
        if sigma1 is None:
            sigma1 = self.rng.random() < 0.5
        if not sigma1:
            return self.delta0(depth, [], [])
        xs = [self.fresh()]
        body = self.delta0(depth, list(xs), list(xs))
        for x in reversed(xs):
            body = Quant("exists", x, body)
        return body


# ---------------------------------------------------------------------------
# Plain first-order sentences for the coding layer

R = SymbolId("R", "relation", 2)
F = SymbolId("F", "function", 1)
C = SymbolId("c", "constant", 0)


def fo_sentence(rng: random.Random, depth: int = 4) -> Formula:
    """A random sentence over {R, F, c, ∈} with small HF literals."""
    from artifact.syntax import App

    counter = [0]

    def term(scope: list):
        k = rng.randrange(4)
        if k == 0 or not scope:
            return Const(HF(rng.randrange(40)))
        if k == 1:
            return App("F", (term(scope) if rng.random() < 0.3 else rng.choice(scope),))
        if k == 2:
            return App("c", ())
        return rng.choice(scope)

    def atom(scope: list) -> Formula:
        k = rng.randrange(3)
        if k == 0:
            return Rel("R", (term(scope), term(scope)))
        if k == 1:
            return Eq(term(scope), term(scope))
        return Mem(Const(HF(rng.randrange(40))), term(scope))

    def go(d: int, scope: list) -> Formula:
        if d <= 0 or rng.random() < 0.2:
            return atom(scope)
        k = rng.randrange(6)
        if k < 3:
            return Bin(rng.choice(("and", "or", "implies", "iff")), go(d - 1, scope), go(d - 1, scope))
        if k == 3:
            return Not(go(d - 1, scope))
        v = Var(counter[0])
        counter[0] += 1
        q = rng.choice(("forall", "exists"))
        if k == 4:
            return BQuant(q, v, Const(HF(rng.randrange(1, 40))), go(d - 1, scope + [v]))
        return Quant(q, v, go(d - 1, scope + [v]))

    return go(depth, [])
