"""Propositional grounding of a TCI inside a finite universe window.

SAT variables are the positive sentences of L_T (U(a), X(a..), F(a..)=b,
c=a).  A satisfying assignment restricted to them is exactly the fragment
Σ(T, M) of a model M, so P(T) membership becomes SAT under assumptions.
Theory sentences are grounded with universe-relativized quantifiers and
Tseitin-encoded; each sentence gets a selector literal so subsets of the
theory can be switched on by assumptions.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Iterable, Iterator

from pysat.solvers import Solver

from .syntax import (
    App, BQuant, Bin, Const, Eq, Formula, Mem, Not, Quant, Rel, Var, free_vars, is_member,
    members_of, neg, to_text,
)

SOLVER_NAME = "cd15"


# ---------------------------------------------------------------------------
# Boolean circuits with constant folding


def n_not(n):
    if n is True:
        return False
    if n is False:
        return True
    if isinstance(n, int):
        return -n
    kind, kids = n
    return ("or" if kind == "and" else "and", frozenset(n_not(k) for k in kids))


def n_and(kids: Iterable):
    out = set()
    for k in kids:
        if k is False:
            return False
        if k is True:
            continue
        if isinstance(k, tuple) and k[0] == "and":
            out |= k[1]
        else:
            out.add(k)
    if not out:
        return True
    if len(out) == 1:
        return next(iter(out))
    return ("and", frozenset(out))


def n_or(kids: Iterable):
    out = set()
    for k in kids:
        if k is True:
            return True
        if k is False:
            continue
        if isinstance(k, tuple) and k[0] == "or":
            out |= k[1]
        else:
            out.add(k)
    if not out:
        return False
    if len(out) == 1:
        return next(iter(out))
    return ("or", frozenset(out))


class NotInLanguage(ValueError):
    pass


# ---------------------------------------------------------------------------
# Miniscoping: push quantifiers inward so grounding stays polynomial on
# chain-shaped sentences.  Every rewrite is valid over empty domains too.


def _flatten(phi: Formula, op: str) -> list:
    if isinstance(phi, Bin) and phi.op == op:
        return _flatten(phi.left, op) + _flatten(phi.right, op)
    return [phi]


def _rebuild(parts: list, op: str) -> Formula:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Bin(op, p, out)
    return out


def miniscope(phi: Formula) -> Formula:
    if isinstance(phi, Not):
        return Not(miniscope(phi.body))
    if isinstance(phi, Bin):
        return Bin(phi.op, miniscope(phi.left), miniscope(phi.right))
    if isinstance(phi, BQuant):
        return BQuant(phi.q, phi.var, phi.bound, miniscope(phi.body))
    if not isinstance(phi, Quant):
        return phi
    body = miniscope(phi.body)
    x = phi.var
    if phi.q == "exists":
        if isinstance(body, Bin) and body.op == "or":
            return Bin("or", miniscope(Quant("exists", x, body.left)),
                       miniscope(Quant("exists", x, body.right)))
        parts = _flatten(body, "and")
        inner = [p for p in parts if x in free_vars(p)]
        outer = [p for p in parts if x not in free_vars(p)]
        if outer and inner:
            return _rebuild(outer + [Quant("exists", x, _rebuild(inner, "and"))], "and")
        return Quant("exists", x, body)
    if isinstance(body, Bin) and body.op == "and":
        return Bin("and", miniscope(Quant("forall", x, body.left)),
                   miniscope(Quant("forall", x, body.right)))
    if isinstance(body, Bin) and body.op == "implies" and x not in free_vars(body.left):
        return Bin("implies", body.left, miniscope(Quant("forall", x, body.right)))
    parts = _flatten(body, "or")
    inner = [p for p in parts if x in free_vars(p)]
    outer = [p for p in parts if x not in free_vars(p)]
    if outer and inner:
        return _rebuild(outer + [Quant("forall", x, _rebuild(inner, "or"))], "or")
    return Quant("forall", x, body)


class Grounding:
    """Clauses for the models of a TCI whose universe lies in `window`."""

    def __init__(self, tci, window: tuple, theory: tuple | None = None):
        self.tci = tci
        self.window = tuple(window)
        self.theory = tuple(tci.theory if theory is None else theory)
        self.u_name = tci.u_symbol.name
        self.positives: list[Formula] = []
        self.var: dict[Formula, int] = {}
        self.clauses: list[list[int]] = []
        self.selectors: list[int] = []
        self._tseitin: dict = {}
        self._keys: dict = {}
        self._memo: dict = {}
        self._fv: dict = {}
        self._build_language()
        self.n_lang = len(self.positives)
        self.nvars = self.n_lang
        self._build_structural()
        self._build_theory()

    # -- language ---------------------------------------------------------

    def _add(self, sentence: Formula) -> None:
        self.positives.append(sentence)
        self.var[sentence] = len(self.positives)

    def _build_language(self) -> None:
        tci = self.tci
        self.universe = tuple(a for a in self.window if tci.in_extension(self.u_name, (a,)))
        self.uset = set(self.universe)
        self.u_lit = {}
        for a in self.universe:
            s = Rel(self.u_name, (Const(a),))
            self._add(s)
            self.u_lit[a] = self.var[s]
        self.rel_lit: dict = {}
        self.fun_lit: dict = {}
        for sym in tci.sigma:
            table = {}
            for t in tci.tuples_in_window(sym.name, self.universe):
                if sym.kind == "relation":
                    s = Rel(sym.name, tuple(Const(a) for a in t))
                else:
                    s = Eq(App(sym.name, tuple(Const(a) for a in t[:-1])), Const(t[-1]))
                self._add(s)
                table[t] = self.var[s]
            if sym.kind == "relation":
                self.rel_lit[sym.name] = table
            else:
                self.fun_lit[sym.name] = table

    def literal(self, sentence: Formula) -> int:
        if isinstance(sentence, Not):
            v = self.var.get(sentence.body)
            if v is None:
                raise NotInLanguage(to_text(sentence))
            return -v
        v = self.var.get(sentence)
        if v is None:
            raise NotInLanguage(to_text(sentence))
        return v

    def sentence(self, lit: int) -> Formula:
        s = self.positives[abs(lit) - 1]
        return s if lit > 0 else neg(s)

    # -- structural constraints ---------------------------------------------

    def _build_structural(self) -> None:
        tci = self.tci
        cl = self.clauses
        if tci.mode(self.u_name) == "exact":
            for a in self.universe:
                cl.append([self.u_lit[a]])
        for sym in tci.sigma:
            exact = tci.mode(sym.name) == "exact"
            if sym.kind == "relation":
                for t, v in self.rel_lit[sym.name].items():
                    for a in sorted(set(t)):
                        cl.append([-v, self.u_lit[a]])
                    if exact:
                        cl.append([v] + [-self.u_lit[a] for a in sorted(set(t))])
                continue
            table = self.fun_lit[sym.name]
            by_args: dict = {}
            for t, v in table.items():
                by_args.setdefault(t[:-1], []).append(v)
                for a in sorted(set(t)):
                    cl.append([-v, self.u_lit[a]])
                if exact:
                    cl.append([v] + [-self.u_lit[a] for a in sorted(set(t))])
            for args in product(self.universe, repeat=sym.arity):
                options = by_args.get(args, [])
                cl.append([-self.u_lit[a] for a in sorted(set(args))] + options)
                for v1, v2 in combinations(options, 2):
                    cl.append([-v1, -v2])

    # -- theory ---------------------------------------------------------------

    def _term(self, t, env):
        if isinstance(t, Var):
            return env[t]
        if isinstance(t, Const):
            return t.value
        raise ValueError(f"unsupported term in theory: {t!r}")

    def ground(self, phi: Formula, env: dict):
        if isinstance(phi, Bin):
            op = phi.op
            if op == "and":
                a = self.ground(phi.left, env)
                if a is False:
                    return False
                return n_and([a, self.ground(phi.right, env)])
            if op == "or":
                a = self.ground(phi.left, env)
                if a is True:
                    return True
                return n_or([a, self.ground(phi.right, env)])
            if op == "implies":
                a = self.ground(phi.left, env)
                if a is False:
                    return True
                return n_or([n_not(a), self.ground(phi.right, env)])
            a, b = self.ground(phi.left, env), self.ground(phi.right, env)
            return n_or([n_and([a, b]), n_and([n_not(a), n_not(b)])])
        if isinstance(phi, Not):
            return n_not(self.ground(phi.body, env))
        if isinstance(phi, Rel):
            args = tuple(self._term(a, env) for a in phi.args)
            if phi.name == self.u_name:
                return self.u_lit.get(args[0], False) if len(args) == 1 else False
            return self.rel_lit.get(phi.name, {}).get(args, False)
        if isinstance(phi, Eq):
            if isinstance(phi.left, App):
                args = tuple(self._term(a, env) for a in phi.left.args)
                val = self._term(phi.right, env)
                return self.fun_lit.get(phi.left.name, {}).get(args + (val,), False)
            return self._term(phi.left, env) == self._term(phi.right, env)
        if isinstance(phi, Mem):
            return is_member(self._term(phi.left, env), self._term(phi.right, env))
        if isinstance(phi, Quant):
            fv = self._fv.get(id(phi))
            if fv is None:
                fv = self._fv[id(phi)] = tuple(sorted(free_vars(phi), key=lambda v: v.index))
            key = (id(phi), tuple(env[v] for v in fv))
            hit = self._memo.get(key)
            if hit is None:
                hit = self._memo[key] = self._ground_quant(phi, env)
            return hit
        if isinstance(phi, BQuant):
            bound = self._term(phi.bound, env)
            inner = dict(env)
            kids = []
            for a in members_of(bound):
                if a not in self.uset:
                    continue
                inner[phi.var] = a
                if phi.q == "forall":
                    kids.append(n_or([-self.u_lit[a], self.ground(phi.body, inner)]))
                else:
                    kids.append(n_and([self.u_lit[a], self.ground(phi.body, inner)]))
            return n_and(kids) if phi.q == "forall" else n_or(kids)
        raise ValueError(f"unsupported formula in theory: {to_text(phi)}")

    def _ground_quant(self, phi: Quant, env: dict):
        inner = dict(env)
        kids = []
        if phi.q == "forall":
            for a in self.universe:
                inner[phi.var] = a
                k = n_or([-self.u_lit[a], self.ground(phi.body, inner)])
                if k is False:
                    return False
                kids.append(k)
            return n_and(kids)
        for a in self.universe:
            inner[phi.var] = a
            k = n_and([self.u_lit[a], self.ground(phi.body, inner)])
            if k is True:
                return True
            kids.append(k)
        return n_or(kids)

    def _key(self, n) -> tuple:
        """Deterministic order on circuit nodes (independent of hash seeds)."""
        if isinstance(n, int):
            return (0, n)
        hit = self._keys.get(n)
        if hit is None:
            hit = (1, n[0], tuple(sorted(self._key(k) for k in n[1])))
            self._keys[n] = hit
        return hit

    def _fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def tseitin(self, node) -> int | bool:
        if node is True or node is False or isinstance(node, int):
            return node
        hit = self._tseitin.get(node)
        if hit is not None:
            return hit
        kind, kids = node
        lits = [self.tseitin(k) for k in sorted(kids, key=self._key)]
        v = self._fresh()
        if kind == "and":
            for l in lits:
                self.clauses.append([-v, l])
            self.clauses.append([v] + [-l for l in lits])
        else:
            self.clauses.append([-v] + lits)
            for l in lits:
                self.clauses.append([-l, v])
        self._tseitin[node] = v
        return v

    def _build_theory(self) -> None:
        self._scoped = [miniscope(phi) for phi in self.theory]
        for phi in self._scoped:
            root = self.tseitin(self.ground(phi, {}))
            sel = self._fresh()
            self.selectors.append(sel)
            if root is False:
                self.clauses.append([-sel])
            elif root is not True:
                self.clauses.append([-sel, root])

    # -- solving ----------------------------------------------------------------

    def new_solver(self, extra: Iterable[list[int]] = ()) -> Solver:
        s = Solver(name=SOLVER_NAME, bootstrap_with=self.clauses)
        for c in extra:
            s.add_clause(c)
        return s

    def fragment(self, model: Iterable[int]) -> frozenset:
        """Σ for a solver model (list of signed literals)."""
        return frozenset(self.sentence(l) for l in model if abs(l) <= self.n_lang)

    def positive_model(self, model: Iterable[int]) -> list[int]:
        return [l for l in model if abs(l) <= self.n_lang]


def iter_models(g: Grounding, assumptions: list[int], extra: Iterable[list[int]] = (),
                limit: int | None = None) -> Iterator[list[int]]:
    """All solver models projected on the language variables."""
    with g.new_solver(extra) as s:
        count = 0
        while s.solve(assumptions=assumptions):
            m = g.positive_model(s.get_model())
            yield m
            count += 1
            if limit is not None and count >= limit:
                return
            s.add_clause([-l for l in m])
