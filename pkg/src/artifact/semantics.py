"""Finite structures, valuations, Tarskian satisfaction and the E-expanded
relation X |=*_{A,nu} phi."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .hf import HF, MAX_UNIVERSE_RANK, hf_of_rank_below
from .syntax import (
    App, BQuant, Bin, Const, EAtom, Eq, Formula, InL, Language, Mem, NegArg, Not, Quant,
    Rel, SymbolId, Template, Var, free_vars, is_member, members_of, neg, sorted_values,
    substitute,
)


@dataclass(frozen=True)
class Structure:
    """A finite structure.

    `interp` maps a relation name to a frozenset of argument tuples, a function
    name to a frozenset of graph tuples (args + (value,)), and a constant name
    to its value.  Membership is always the true membership of the values.
    """

    base: tuple
    interp: Mapping[str, object] = field(default_factory=dict)
    signature: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", tuple(sorted_values(set(self.base))))
        object.__setattr__(self, "_base_set", frozenset(self.base))
        funcs = {}
        for sym in self.signature:
            if sym.kind == "function":
                funcs[sym.name] = {t[:-1]: t[-1] for t in self.interp.get(sym.name, ())}
        object.__setattr__(self, "_funcs", funcs)

    @property
    def base_set(self) -> frozenset:
        return self._base_set  # type: ignore[attr-defined]

    def symbol(self, name: str) -> SymbolId | None:
        for s in self.signature:
            if s.name == name:
                return s
        return None

    def key(self) -> tuple:
        """Hashable canonical form (for deduplication and ordering)."""
        parts = []
        for sym in sorted(self.signature, key=lambda s: s.name):
            v = self.interp.get(sym.name)
            if sym.kind == "constant":
                parts.append((sym.name, repr(v)))
            else:
                parts.append((sym.name, tuple(sorted(repr(t) for t in (v or ())))))
        return (tuple(repr(b) for b in self.base), tuple(parts))

    def describe(self) -> str:
        lines = ["BASE: " + " ".join(repr(b) if isinstance(b, HF) else str(b) for b in self.base)]
        for sym in sorted(self.signature, key=lambda s: s.name):
            v = self.interp.get(sym.name)
            if sym.kind == "constant":
                lines.append(f"{sym.name} = {v!r}")
            else:
                tuples = sorted(v or (), key=lambda t: tuple(x.code if isinstance(x, HF) else -1 for x in t))
                body = " ".join("(" + ",".join(repr(x) for x in t) + ")" for t in tuples)
                lines.append(f"{sym.name}: {body}" if body else f"{sym.name}:")
        return "\n".join(lines)


@dataclass(frozen=True)
class Valuation:
    mapping: Mapping[Var, object] = field(default_factory=dict)
    default: object = None

    def get(self, v: Var):
        if v in self.mapping:
            return self.mapping[v]
        if self.default is None:
            raise UnboundVariable(v)
        return self.default

    def extend(self, v: Var, value) -> "Valuation":
        m = dict(self.mapping)
        m[v] = value
        return Valuation(m, self.default)


class UnboundVariable(KeyError):
    pass


class _Undefined(Exception):
    """A function applied outside its domain; the enclosing atom is false."""


class Evaluator:
    """Satisfaction in A expanded by E := X (intersected with the base)."""

    def __init__(self, A: Structure, X: Iterable[Formula] = (), lang: Language | Iterable | None = None):
        self.A = A
        self.X = frozenset(X)
        if lang is None:
            self.L = frozenset()
        elif isinstance(lang, Language):
            self.L = lang.sentences
        else:
            self.L = frozenset(lang)
        self.base_set = A.base_set
        self.funcs = A._funcs  # type: ignore[attr-defined]

    def term(self, t, env: dict):
        if isinstance(t, Var):
            if t in env:
                return env[t]
            raise UnboundVariable(t)
        if isinstance(t, Const):
            return t.value
        if isinstance(t, App):
            args = tuple(self.term(a, env) for a in t.args)
            sym = self.A.symbol(t.name)
            if sym is not None and sym.kind == "constant":
                return self.A.interp[t.name]
            table = self.funcs.get(t.name)
            if table is None or args not in table:
                raise _Undefined
            return table[args]
        raise TypeError(f"not a term: {t!r}")

    def earg(self, a, env: dict):
        if isinstance(a, NegArg):
            v = self.term(a.term, env)
            return neg(v) if isinstance(v, Formula) else None
        if isinstance(a, Template):
            m = {v: Const(self.term(v, env)) for v in free_vars(a.atom)}
            return substitute(a.atom, m)
        return self.term(a, env)

    def holds(self, phi: Formula, env: dict) -> bool:
        if isinstance(phi, Bin):
            op = phi.op
            if op == "and":
                return self.holds(phi.left, env) and self.holds(phi.right, env)
            if op == "or":
                return self.holds(phi.left, env) or self.holds(phi.right, env)
            if op == "implies":
                return (not self.holds(phi.left, env)) or self.holds(phi.right, env)
            return self.holds(phi.left, env) == self.holds(phi.right, env)
        if isinstance(phi, Not):
            return not self.holds(phi.body, env)
        if isinstance(phi, EAtom):
            s = self.earg(phi.arg, env)
            return s is not None and s in self.X and s in self.base_set
        if isinstance(phi, InL):
            s = self.earg(phi.arg, env)
            return s is not None and s in self.L
        if isinstance(phi, Eq):
            try:
                return self.term(phi.left, env) == self.term(phi.right, env)
            except _Undefined:
                return False
        if isinstance(phi, Mem):
            try:
                return is_member(self.term(phi.left, env), self.term(phi.right, env))
            except _Undefined:
                return False
        if isinstance(phi, Rel):
            try:
                args = tuple(self.term(a, env) for a in phi.args)
            except _Undefined:
                return False
            ext = self.A.interp.get(phi.name)
            return ext is not None and args in ext
        if isinstance(phi, Quant):
            v = phi.var
            inner = dict(env)
            if phi.q == "forall":
                for a in self.A.base:
                    inner[v] = a
                    if not self.holds(phi.body, inner):
                        return False
                return True
            for a in self.A.base:
                inner[v] = a
                if self.holds(phi.body, inner):
                    return True
            return False
        if isinstance(phi, BQuant):
            try:
                bound = self.term(phi.bound, env)
            except _Undefined:
                return phi.q == "forall"
            v = phi.var
            inner = dict(env)
            members = [m for m in members_of(bound) if m in self.base_set]
            if phi.q == "forall":
                for a in members:
                    inner[v] = a
                    if not self.holds(phi.body, inner):
                        return False
                return True
            for a in members:
                inner[v] = a
                if self.holds(phi.body, inner):
                    return True
            return False
        raise TypeError(f"not a formula: {phi!r}")


def _env(phi: Formula, nu: Valuation | None) -> dict:
    env = {}
    for v in free_vars(phi):
        if nu is None:
            raise UnboundVariable(v)
        env[v] = nu.get(v)
    return env


def sat(A: Structure, X: Iterable[Formula], nu: Valuation | None, phi: Formula,
        lang: Language | Iterable | None = None) -> bool:
    """Truth of nu*(phi) in A expanded by E interpreted as X ∩ base."""
    return Evaluator(A, X, lang).holds(phi, _env(phi, nu))


def models_star(sigma: Iterable[Formula], A: Structure, gamma: Iterable[Formula],
                lang: Language | Iterable | None = None) -> bool:
    ev = Evaluator(A, sigma, lang)
    return all(ev.holds(g, {}) for g in gamma)


def first_failure(sigma: Iterable[Formula], A: Structure, gamma: Iterable[Formula],
                  lang: Language | Iterable | None = None) -> Formula | None:
    ev = Evaluator(A, sigma, lang)
    for g in gamma:
        if not ev.holds(g, {}):
            return g
    return None


def hf_universe(rank: int, signature: tuple = (), interp: Mapping | None = None) -> Structure:
    if rank > MAX_UNIVERSE_RANK:
        raise ValueError(f"rank {rank} exceeds configured bound {MAX_UNIVERSE_RANK}")
    return Structure(tuple(hf_of_rank_below(rank)), dict(interp or {}), signature)


@dataclass(frozen=True)
class SuitabilityReport:
    verified: dict
    assumed: tuple

    @property
    def ok(self) -> bool:
        return all(self.verified.values())

    def failures(self) -> list:
        return [k for k, v in self.verified.items() if not v]


def check_suitable(A: Structure, lang: Language | Iterable) -> SuitabilityReport:
    sentences = lang.sentences if isinstance(lang, Language) else frozenset(lang)
    base = A.base_set
    relations_ok = True
    for sym in A.signature:
        ext = A.interp.get(sym.name)
        if sym.kind == "constant":
            relations_ok &= ext in base
        else:
            relations_ok &= all(all(x in base for x in t) for t in (ext or ()))
    transitive = all(all(m in base for m in members_of(x)) for x in A.base)
    verified = {
        "relations on the base": relations_ok,
        "finitely transitive": transitive,
        "language inside the base": sentences <= base,
        "language definable (finite, listed)": True,
    }
    assumed = ("model of a sufficiently strong set theory",)
    return SuitabilityReport(verified, assumed)
