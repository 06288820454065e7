"""The E-extended language: pos, set_of, max peelings, DNF1, WNF, DNF, check,
Conv and star-class tagging.

Star-Δ0 formulas are built from E-free Δ0 formulas and E-atoms by the
connectives and the bounded shell `(forall-mem z p body)`, where p is a
constant or a variable.  The finiteness/nonemptiness guard of the shell is
implicit because every bound denotes a finite set here.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable

from .semantics import Evaluator, Structure, Valuation
from .syntax import (
    FALSE, TRUE, BQuant, Bin, Const, EAtom, Eq, Formula, InL, Language, Mem, NegArg, Not,
    Quant, Rel, Template, Var, _bounded_only, conj, contains_e, disj, free_vars, members_of,
    neg, substitute, to_text,
)

ATOM_TYPES = (Rel, Eq, Mem, EAtom, InL)


def _sentence_arg(phi: Formula):
    """The sentence literal under an E-atom, or None."""
    if isinstance(phi, EAtom) and isinstance(phi.arg, Const) and isinstance(phi.arg.value, Formula):
        return phi.arg.value
    return None


# ---------------------------------------------------------------------------
# pos and set_of


def pos(phi: Formula, lang: Language | Iterable | None = None) -> Formula:
    """Replace each subformula ¬E(x), x a sentence literal (in L when L is
    given), by E(neg x)."""
    allowed = None if lang is None else (lang.sentences if isinstance(lang, Language) else frozenset(lang))

    def go(f: Formula) -> Formula:
        if isinstance(f, Not):
            s = _sentence_arg(f.body)
            if s is not None and (allowed is None or s in allowed):
                return EAtom(Const(neg(s)))
            return Not(go(f.body))
        if isinstance(f, Bin):
            return Bin(f.op, go(f.left), go(f.right))
        if isinstance(f, Quant):
            return Quant(f.q, f.var, go(f.body))
        if isinstance(f, BQuant):
            return BQuant(f.q, f.var, f.bound, go(f.body))
        return f

    return go(phi)


def set_of(phi: Formula) -> tuple[frozenset, frozenset]:
    q: set = set()
    negated: set = set()

    def go(f: Formula) -> None:
        s = _sentence_arg(f)
        if s is not None:
            q.add(s)
            return
        if isinstance(f, Not):
            s = _sentence_arg(f.body)
            if s is not None:
                negated.add(s)
            go(f.body)
        elif isinstance(f, Bin):
            go(f.left)
            go(f.right)
        elif isinstance(f, (Quant, BQuant)):
            go(f.body)

    go(phi)
    return frozenset(q - negated), frozenset(q)


# ---------------------------------------------------------------------------
# Peelings


@dataclass(frozen=True)
class PeelingSet:
    qa: tuple  # all quantifier-headed subformula occurrences (preorder)
    maximal: tuple  # those not inside another quantifier-headed subformula


def max_peelings(phi: Formula) -> PeelingSet:
    qa: list = []
    maximal: list = []

    def go(f: Formula, inside: bool) -> None:
        if isinstance(f, (Quant, BQuant)):
            qa.append(f)
            if not inside:
                maximal.append(f)
            go(f.body, True)
        elif isinstance(f, Not):
            go(f.body, inside)
        elif isinstance(f, Bin):
            go(f.left, inside)
            go(f.right, inside)

    go(phi, False)
    return PeelingSet(tuple(qa), tuple(maximal))


def desugar(phi: Formula) -> Formula:
    """Rewrite E-containing exists-mem shells as ¬∀z∈p¬ (star pipeline form)."""
    if isinstance(phi, BQuant):
        body = desugar(phi.body)
        if phi.q == "exists" and contains_e(body):
            return Not(BQuant("forall", phi.var, phi.bound, Not(body)))
        return BQuant(phi.q, phi.var, phi.bound, body)
    if isinstance(phi, Not):
        return Not(desugar(phi.body))
    if isinstance(phi, Bin):
        return Bin(phi.op, desugar(phi.left), desugar(phi.right))
    if isinstance(phi, Quant):
        return Quant(phi.q, phi.var, desugar(phi.body))
    return phi


# ---------------------------------------------------------------------------
# DNF1


def _lit_key(lit: Formula) -> tuple:
    return (to_text(pos(lit)), to_text(lit))


def _nnf_clauses(f: Formula, positive: bool) -> list[tuple]:
    """Clauses (tuples of literals) of a DNF of f (or of ¬f)."""
    if isinstance(f, Not):
        return _nnf_clauses(f.body, not positive)
    if isinstance(f, Bin):
        op = f.op
        if op == "implies":
            a, b = _nnf_clauses(f.left, not positive), _nnf_clauses(f.right, positive)
            return a + b if positive else _product(a, b)
        if op == "iff":
            if positive:
                return _product(_nnf_clauses(f.left, True), _nnf_clauses(f.right, True)) + \
                    _product(_nnf_clauses(f.left, False), _nnf_clauses(f.right, False))
            return _product(_nnf_clauses(f.left, True), _nnf_clauses(f.right, False)) + \
                _product(_nnf_clauses(f.left, False), _nnf_clauses(f.right, True))
        is_or = (op == "or") == positive
        a, b = _nnf_clauses(f.left, positive), _nnf_clauses(f.right, positive)
        return a + b if is_or else _product(a, b)
    return [(f if positive else Not(f),)]


def _product(a: list, b: list) -> list:
    return [x + y for x in a for y in b]


def _clause_formula(clause: tuple) -> Formula:
    return conj(clause)


def dnf_clauses(phi: Formula) -> list[tuple]:
    """Sorted, deduplicated clauses of dnf1(phi)."""
    clauses = set()
    for c in _nnf_clauses(phi, True):
        lits = tuple(sorted(set(c), key=_lit_key))
        clauses.add(lits)
    return sorted(clauses, key=lambda c: [_lit_key(l) for l in c])


def dnf1(phi: Formula) -> Formula:
    """Disjunctive normal form treating atoms and max peelings as propositions."""
    return disj(_clause_formula(c) for c in dnf_clauses(phi))


def clauses_of(phi: Formula) -> list[tuple]:
    """Read back the clause structure of a formula already in dnf1 shape."""
    out = []
    for d in _flatten(phi, "or"):
        out.append(tuple(_flatten(d, "and")))
    return out


def _flatten(f: Formula, op: str) -> list:
    out, stack = [], [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Bin) and g.op == op:
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


# ---------------------------------------------------------------------------
# Star classes


def _is_shell(f: Formula) -> bool:
    return isinstance(f, BQuant) and contains_e(f.body)


def is_star_delta0(phi: Formula) -> bool:
    if not contains_e(phi):
        return _bounded_only(phi)
    if isinstance(phi, EAtom):
        return True
    if isinstance(phi, Not):
        return is_star_delta0(phi.body)
    if isinstance(phi, Bin):
        return is_star_delta0(phi.left) and is_star_delta0(phi.right)
    if isinstance(phi, BQuant):
        if not isinstance(phi.bound, (Const, Var)):
            return False
        if isinstance(phi.bound, Var) and phi.bound == phi.var:
            return False
        return is_star_delta0(phi.body)
    return False


def _strip(phi: Formula, q: str) -> tuple[list, Formula]:
    vs = []
    while isinstance(phi, Quant) and phi.q == q:
        vs.append(phi.var)
        phi = phi.body
    return vs, phi


def classify_star(phi: Formula) -> str:
    if is_star_delta0(phi):
        return "star-Delta0"
    _, body = _strip(phi, "exists")
    if body is not phi and is_star_delta0(body):
        return "star-Sigma1"
    _, rest = _strip(phi, "forall")
    _, body = _strip(rest, "exists")
    if is_star_delta0(body):
        return "star-Pi2"
    return "other"


# ---------------------------------------------------------------------------
# WNF


def _map_shell_bodies(phi: Formula, fn) -> Formula:
    """Apply fn to the body of every E-containing max peeling."""
    if isinstance(phi, BQuant):
        if contains_e(phi.body):
            return BQuant(phi.q, phi.var, phi.bound, fn(phi.body))
        return phi
    if isinstance(phi, Not):
        return Not(_map_shell_bodies(phi.body, fn))
    if isinstance(phi, Bin):
        return Bin(phi.op, _map_shell_bodies(phi.left, fn), _map_shell_bodies(phi.right, fn))
    return phi


def wnf(phi: Formula) -> Formula:
    phi = desugar(phi)
    if not is_star_delta0(phi):
        raise ValueError(f"wnf needs a star-Delta0 formula: {to_text(phi)}")
    return _wnf(phi)


def _wnf(phi: Formula) -> Formula:
    return dnf1(_map_shell_bodies(phi, _wnf))


# ---------------------------------------------------------------------------
# DNF (procedure P0)


def _bound_value(bound, nu: Valuation | None):
    if isinstance(bound, Const):
        return bound.value
    if nu is None:
        raise ValueError(f"no valuation for bound variable {bound}")
    return nu.get(bound)


def _nonempty_atom(p) -> Formula:
    w = Var(1) if p == Var(0) else Var(0)
    return BQuant("exists", w, p, Eq(w, w))


def _expand(lit: Formula, nu: Valuation | None, A: Structure | None) -> Formula:
    negated = isinstance(lit, Not)
    shell = lit.body if negated else lit
    value = _bound_value(shell.bound, nu)
    members = list(members_of(value))
    if A is not None:
        missing = [m for m in members if m not in A.base_set]
        if missing:
            raise ValueError(f"bound {shell.bound} has members outside the structure base")
    insts = [substitute(shell.body, {shell.var: Const(a)}) for a in members]
    is_var = isinstance(shell.bound, Var)
    pin = [Eq(shell.bound, Const(value))] if is_var else []
    if not negated:
        if members:
            return conj(pin + insts)
        return Not(_nonempty_atom(shell.bound)) if is_var else TRUE
    if members:
        return conj(pin + [disj(Not(i) for i in insts)])
    return FALSE


def dnf(phi: Formula, nu: Valuation | None = None, A: Structure | None = None) -> Formula:
    """Expand E-containing bounded shells over their (valued) bounds, in DNF."""
    cur = dnf1(desugar(phi))
    while True:
        clauses = clauses_of(cur)
        changed = False
        new_clauses = []
        for c in clauses:
            lits = []
            for lit in c:
                core = lit.body if isinstance(lit, Not) else lit
                if _is_shell(core):
                    lits.append(_expand(lit, nu, A))
                    changed = True
                else:
                    lits.append(lit)
            new_clauses.append(conj(lits))
        if not changed:
            return cur
        cur = dnf1(disj(new_clauses))


def in_class_D(phi: Formula) -> bool:
    """Membership in 𝒟: disjunction of conjunctions of literals over E-free Δ0
    formulas and E-atoms."""
    for c in clauses_of(phi):
        for lit in c:
            core = lit.body if isinstance(lit, Not) else lit
            if isinstance(core, EAtom):
                continue
            if contains_e(core) or not _bounded_only(core):
                return False
            if isinstance(core, (Bin, Not)):
                return False
    return True


# ---------------------------------------------------------------------------
# check and Conv


def check(phi: Formula) -> Formula:
    def go(f: Formula) -> Formula:
        if isinstance(f, Not) and isinstance(f.body, EAtom) and isinstance(f.body.arg, Var):
            x = f.body.arg
            return Bin("and", f, Bin("implies", InL(x), EAtom(NegArg(x))))
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, Bin):
            return Bin(f.op, go(f.left), go(f.right))
        if isinstance(f, Quant):
            return Quant(f.q, f.var, go(f.body))
        if isinstance(f, BQuant):
            return BQuant(f.q, f.var, f.bound, go(f.body))
        return f

    return go(phi)


def conv(phi: Formula, lang: Language | Iterable | None = None) -> Formula:
    vs, body = _strip(phi, "exists")
    body = desugar(body)
    if not is_star_delta0(body):
        raise ValueError(f"conv needs a star-Sigma1 sentence: {to_text(phi)}")
    out = check(pos(wnf(body), lang))
    for v in reversed(vs):
        out = Quant("exists", v, out)
    return out


def sigma1_parts(phi: Formula) -> tuple[list, Formula]:
    """Split a star-Σ1 formula into its ∃-prefix variables and star-Δ0 body."""
    vs, body = _strip(phi, "exists")
    if not is_star_delta0(desugar(body)):
        raise ValueError("not star-Sigma1")
    return vs, body


# ---------------------------------------------------------------------------
# Finite witnesses for star-Σ1 sentences


@dataclass(frozen=True)
class Extraction:
    """A witnessing valuation, the satisfied DNF clause, and the finite pair
    (p, q) with p = X ∩ q: every X' with X' ∩ q = p satisfies the sentence."""

    valuation: Valuation
    clause: tuple
    p: frozenset
    q: frozenset


def _e_sentences(clause: tuple, ev: Evaluator, env: dict) -> set:
    out = set()

    def go(f: Formula) -> None:
        if isinstance(f, EAtom):
            s = ev.earg(f.arg, env)
            if isinstance(s, Formula):
                out.add(s)
        elif isinstance(f, Not):
            go(f.body)
        elif isinstance(f, Bin):
            go(f.left)
            go(f.right)

    for lit in clause:
        go(lit)
    return out


def extract_pq(phi: Formula, X: Iterable[Formula], A: Structure,
               lang: Language | Iterable | None = None) -> Extraction | None:
    """(p, q) for a star-Σ1 sentence true with E := X, or None when X is not
    a witness.  The ∃-variables range over the base of A."""
    vs, body = sigma1_parts(phi)
    X = frozenset(X)
    ev = Evaluator(A, X, lang)
    for values in product(A.base, repeat=len(vs)):
        env = dict(zip(vs, values))
        if not ev.holds(body, env):
            continue
        nu = Valuation(env)
        expanded = dnf(wnf(body), nu, A)
        for clause in clauses_of(expanded):
            if all(ev.holds(lit, env) for lit in clause):
                q = frozenset(_e_sentences(clause, ev, env))
                return Extraction(nu, clause, q & X, q)
        raise AssertionError("the expanded DNF lost a satisfied valuation")
    return None


__all__ = [
    "pos", "set_of", "PeelingSet", "max_peelings", "desugar", "dnf1", "dnf_clauses",
    "clauses_of", "wnf", "dnf", "in_class_D", "check", "conv", "classify_star",
    "is_star_delta0", "sigma1_parts", "Extraction", "extract_pq",
]
