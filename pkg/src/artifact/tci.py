"""Theories with constraints in interpretation (TCIs), their models, the
certification language L_T / Γ_T, the model <-> fragment translation and the
fixture constructions."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

from .hf import HF, hf_set, kuratowski
from .semantics import Evaluator, Structure, sat
from .syntax import (
    App, BQuant, Bin, Const, EAtom, Eq, Formula, InL, Language, Mem, Not, Quant, Rel,
    SymbolId, Template, Var, all_vars, close_under_negation, conj, free_vars, is_nice,
    members_of, neg, sorted_values, subst_term, substitute, symbols_used, to_text,
)

SUBSET, EXACT = "subset", "exact"


# ---------------------------------------------------------------------------
# Extensions and constraints


@dataclass(frozen=True)
class Extension:
    """A set of tuples of HF values: explicit (`finite`) or all `arity`-tuples
    of ω (`omega`), the latter enumerated inside a cap window."""

    kind: str
    arity: int
    tuples: frozenset = frozenset()

    @staticmethod
    def finite(tuples: Iterable, arity: int) -> "Extension":
        ts = frozenset(tuple(t) for t in tuples)
        if any(len(t) != arity for t in ts):
            raise ValueError("extension tuples must all have the declared length")
        return Extension("finite", arity, ts)

    @staticmethod
    def omega(arity: int) -> "Extension":
        return Extension("omega", arity)

    def contains(self, t: tuple) -> bool:
        if self.kind == "omega":
            return len(t) == self.arity
        return t in self.tuples

    def within(self, universe: tuple) -> list:
        """Tuples of the extension whose entries lie in `universe`, sorted."""
        if self.kind == "omega":
            return list(product(universe, repeat=self.arity))
        uset = set(universe)
        return sorted((t for t in self.tuples if all(a in uset for a in t)),
                      key=lambda t: tuple(a.code for a in t))

    def field(self) -> set:
        return {a for t in self.tuples for a in t}

    def describe(self) -> str:
        if self.kind == "omega":
            return "omega" if self.arity == 1 else f"omega^{self.arity}"
        if self.arity == 1:
            return "{" + ",".join(repr(t[0]) for t in sorted(self.tuples)) + "}"
        ts = sorted(self.tuples, key=lambda t: tuple(a.code for a in t))
        return "{" + ",".join("(" + ",".join(repr(a) for a in t) + ")" for t in ts) + "}"


@dataclass(frozen=True)
class Constraint:
    extension: Extension
    mode: str = SUBSET

    def __post_init__(self) -> None:
        if self.mode not in (SUBSET, EXACT):
            raise ValueError(f"bad constraint mode {self.mode!r}")


@dataclass(frozen=True)
class ChainTail:
    """The infinite theory tail {chain_n : n >= start} over a binary relation."""

    symbol: str
    start: int

    def sentence(self, n: int) -> Formula:
        return chain_sentence(self.symbol, n)

    def describe(self) -> str:
        return f"chain {self.symbol} from {self.start}"


# ---------------------------------------------------------------------------
# TCI


@dataclass(frozen=True, eq=False)
class TCI:
    theory: tuple
    sigma: tuple
    u_symbol: SymbolId
    constraint: Mapping[str, Constraint]
    tail: ChainTail | None = None
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "theory", tuple(self.theory))
        object.__setattr__(self, "sigma", tuple(self.sigma))
        if self.u_symbol.kind != "relation" or self.u_symbol.arity != 1:
            raise ValueError("the universe symbol must be a unary relation")
        names = [s.name for s in self.sigma]
        if self.u_symbol.name in names or len(set(names)) != len(names):
            raise ValueError("symbol names must be distinct and differ from the universe symbol")
        for sym in list(self.sigma) + [self.u_symbol]:
            c = self.constraint.get(sym.name)
            if c is None:
                raise ValueError(f"no constraint for symbol {sym.name}")
            if c.extension.arity != tuple_length(sym):
                raise ValueError(f"constraint for {sym.name} has the wrong tuple length")
        for phi in self.theory:
            if free_vars(phi):
                raise ValueError(f"theory formula is not a sentence: {to_text(phi)}")
            unknown = symbols_used(phi) - set(names)
            if unknown:
                raise ValueError(f"theory uses undeclared symbols {sorted(unknown)}")

    # -- basic queries ---------------------------------------------------

    def symbol(self, name: str) -> SymbolId:
        if name == self.u_symbol.name:
            return self.u_symbol
        for s in self.sigma:
            if s.name == name:
                return s
        raise KeyError(name)

    def mode(self, name: str) -> str:
        return self.constraint[name].mode

    def in_extension(self, name: str, t: tuple) -> bool:
        return self.constraint[name].extension.contains(t)

    @property
    def universe_ext(self) -> Extension:
        return self.constraint[self.u_symbol.name].extension

    @property
    def finite_scope(self) -> bool:
        return self.universe_ext.kind == "finite" and self.tail is None

    def window(self, cap: int) -> tuple:
        """Candidate universe elements: the finite universe extension, or the
        first `cap` naturals plus every element named by an explicit extension."""
        u = self.universe_ext
        if u.kind == "finite":
            return tuple(sorted(u.field()))
        elems = {HF(i) for i in range(cap)}
        for sym in self.sigma:
            ext = self.constraint[sym.name].extension
            if ext.kind == "finite":
                elems |= ext.field()
        return tuple(sorted(elems))

    def tuples_in_window(self, name: str, universe: tuple) -> list:
        return self.constraint[name].extension.within(universe)

    def homogeneous(self) -> bool:
        """Invariant under permutations of ω: ω-power or empty extensions and
        no HF literals in the theory."""
        if self.universe_ext.kind != "omega":
            return False
        for sym in self.sigma:
            ext = self.constraint[sym.name].extension
            if ext.kind == "finite" and ext.tuples:
                return False
        return all(not _has_consts(phi) for phi in self.theory) and self.tail is None

    @property
    def truncation_sound(self) -> bool:
        """Universal theory and window-closed constraints: window models are
        restrictions of genuine models."""
        if self.finite_scope:
            return True
        return all(_universal(phi) for phi in self.theory)

    def theory_with_tail(self, upto: int) -> tuple:
        if self.tail is None:
            return self.theory
        return self.theory + tuple(self.tail.sentence(n) for n in range(self.tail.start, upto + 1))

    def with_theory(self, theory: Iterable[Formula], keep_tail: bool = False) -> "TCI":
        return TCI(tuple(theory), self.sigma, self.u_symbol, self.constraint,
                   self.tail if keep_tail else None, self.name)

    def validate(self) -> list[str]:
        """Well-formedness of explicitly enumerated extensions; returns problems."""
        problems = []
        u = self.universe_ext
        for sym in self.sigma:
            ext = self.constraint[sym.name].extension
            if ext.kind == "finite" and u.kind == "finite":
                ufield = u.field()
                bad = [t for t in ext.tuples if not all(a in ufield for a in t)]
                if bad:
                    problems.append(f"{sym.name}: tuples outside the universe power")
        return problems

    def kuratowski_clashes(self) -> list:
        """Universe elements that coincide with Kuratowski pairs of universe
        elements (checked for codes below 2^16)."""
        u = self.universe_ext
        if u.kind != "finite":
            return []
        elems = sorted(u.field())
        codes = {a.code for a in elems}
        out = []
        for a in elems:
            for b in elems:
                if max(a.code, b.code) < 8:
                    k = kuratowski(a, b)
                    if k.code < (1 << 16) and k.code in codes:
                        out.append((a, b, k))
        return out


def tuple_length(sym: SymbolId) -> int:
    if sym.kind == "relation":
        return sym.arity
    if sym.kind == "function":
        return sym.arity + 1
    return 1


def _has_consts(phi: Formula) -> bool:
    def term(t) -> bool:
        if isinstance(t, Const):
            return True
        if isinstance(t, App):
            return any(term(a) for a in t.args)
        return False

    if isinstance(phi, Rel):
        return any(term(a) for a in phi.args)
    if isinstance(phi, (Eq, Mem)):
        return term(phi.left) or term(phi.right)
    if isinstance(phi, Not):
        return _has_consts(phi.body)
    if isinstance(phi, Bin):
        return _has_consts(phi.left) or _has_consts(phi.right)
    if isinstance(phi, Quant):
        return _has_consts(phi.body)
    if isinstance(phi, BQuant):
        return True
    return False


def _universal(phi: Formula) -> bool:
    while isinstance(phi, Quant):
        if phi.q != "forall":
            return False
        phi = phi.body
    return _qf(phi)


def _qf(phi: Formula) -> bool:
    if isinstance(phi, (Quant, BQuant)):
        return False
    if isinstance(phi, Not):
        return _qf(phi.body)
    if isinstance(phi, Bin):
        return _qf(phi.left) and _qf(phi.right)
    return True


# ---------------------------------------------------------------------------
# Models


def make_structure(tci: TCI, base: Iterable, interp: Mapping) -> Structure:
    return Structure(tuple(base), dict(interp), tci.sigma)


def models_tci(M: Structure, tci: TCI, cap: int | None = None) -> bool:
    """M satisfies the theory and respects every constraint; ω-universes are
    compared inside the cap window."""
    if {s.name for s in M.signature} != {s.name for s in tci.sigma}:
        raise ValueError("signature mismatch")
    base = M.base
    bset = set(base)
    u_name = tci.u_symbol.name
    u_ext = tci.universe_ext
    if not all(u_ext.contains((a,)) for a in base):
        return False
    if tci.mode(u_name) == EXACT:
        if u_ext.kind == "finite":
            if bset != u_ext.field():
                return False
        else:
            if cap is None or bset != set(tci.window(cap)):
                return False
    for sym in tci.sigma:
        c = tci.constraint[sym.name]
        ext = c.extension
        v = M.interp.get(sym.name)
        if sym.kind == "constant":
            if v not in bset or not ext.contains((v,)):
                return False
            if c.mode == EXACT and {t[0] for t in ext.within(base)} != {v}:
                return False
            continue
        tuples = frozenset(v or ())
        if not all(len(t) == tuple_length(sym) and all(a in bset for a in t) and ext.contains(t)
                   for t in tuples):
            return False
        if sym.kind == "function":
            graph: dict = {}
            for t in tuples:
                if t[:-1] in graph:
                    return False
                graph[t[:-1]] = t[-1]
            if len(graph) != len(base) ** sym.arity:
                return False
        if c.mode == EXACT and tuples != frozenset(ext.within(base)):
            return False
    for phi in tci.theory_with_tail(len(base) + 1):
        if not sat(M, (), None, phi):
            return False
    return True


# ---------------------------------------------------------------------------
# The certification language


def positive_sentences(tci: TCI, universe: tuple) -> list:
    """Positive L_T sentences for a universe window, in canonical order."""
    u = tci.u_symbol.name
    out = [Rel(u, (Const(a),)) for a in universe if tci.in_extension(u, (a,))]
    uu = tuple(a for a in universe if tci.in_extension(u, (a,)))
    for sym in tci.sigma:
        for t in tci.tuples_in_window(sym.name, uu):
            if sym.kind == "relation":
                out.append(Rel(sym.name, tuple(Const(a) for a in t)))
            else:
                out.append(Eq(App(sym.name, tuple(Const(a) for a in t[:-1])), Const(t[-1])))
    return out


def _u(tci: TCI, t) -> Formula:
    return EAtom(Template(Rel(tci.u_symbol.name, (t,))))


def _graph(name: str, args: tuple, val) -> Formula:
    return Eq(App(name, tuple(args)), val)


def prenex(phi: Formula) -> tuple[list, Formula]:
    """Prenex normal form with distinct bound variables: (prefix, matrix).
    Bounded quantifiers stay in the matrix."""
    counter = [max((v.index for v in all_vars(phi)), default=-1) + 1]

    def fresh() -> Var:
        v = Var(counter[0])
        counter[0] += 1
        return v

    def go(f: Formula) -> tuple[list, Formula]:
        if isinstance(f, Quant):
            nv = fresh()
            pre, mat = go(substitute(f.body, {f.var: nv}))
            return [(f.q, nv)] + pre, mat
        if isinstance(f, Not):
            pre, mat = go(f.body)
            flipped = [("exists" if q == "forall" else "forall", v) for q, v in pre]
            return flipped, Not(mat)
        if isinstance(f, Bin):
            if f.op == "iff":
                return go(Bin("and", Bin("implies", f.left, f.right), Bin("implies", f.right, f.left)))
            left = Not(f.left) if f.op == "implies" else f.left
            op = "or" if f.op == "implies" else f.op
            pl, ml = go(left)
            pr, mr = go(f.right)
            if f.op == "implies":
                ml = ml.body if isinstance(ml, Not) else Not(ml)
                return _merge(pl, pr), Bin("implies", ml, mr)
            return _merge(pl, pr), Bin(op, ml, mr)
        return [], f

    return go(phi)


def _merge(a: list, b: list) -> list:
    """Interleave two independent prefixes with the fewest alternations,
    universal blocks first."""
    out = []
    a, b = list(a), list(b)
    kind = "forall"
    while a or b:
        while a and a[0][0] == kind:
            out.append(a.pop(0))
        while b and b[0][0] == kind:
            out.append(b.pop(0))
        kind = "exists" if kind == "forall" else "forall"
    return out


def _star_atoms(tci: TCI, f: Formula) -> Formula:
    """Replace each atom mentioning a σ symbol by E(atom)."""
    sig = {s.name for s in tci.sigma}
    if isinstance(f, Rel):
        return EAtom(Template(f)) if f.name in sig else f
    if isinstance(f, Eq):
        if isinstance(f.left, App):
            return EAtom(Template(f))
        return f
    if isinstance(f, Mem):
        return f
    if isinstance(f, Not):
        return Not(_star_atoms(tci, f.body))
    if isinstance(f, Bin):
        return Bin(f.op, _star_atoms(tci, f.left), _star_atoms(tci, f.right))
    if isinstance(f, BQuant):
        body = _star_atoms(tci, f.body)
        guard = _u(tci, f.var)
        if f.q == "forall":
            return BQuant("forall", f.var, f.bound, Bin("implies", guard, body))
        return BQuant("exists", f.var, f.bound, Bin("and", guard, body))
    raise ValueError(f"unexpected node in theory matrix: {to_text(f)}")


def relativize(tci: TCI, phi: Formula) -> Formula:
    """Prenex, relativize quantifiers to E(U(x)), E-translate atoms, prenex."""
    pre, mat = prenex(phi)
    body = _star_atoms(tci, mat)
    for q, v in reversed(pre):
        g = _u(tci, v)
        body = Bin("implies", g, body) if q == "forall" else Bin("and", g, body)
    for q, v in reversed(pre):
        body = Quant(q, v, body)
    return body


@dataclass(frozen=True)
class CertLanguage:
    language: Language
    gamma: tuple
    universe: tuple
    structure: Structure
    window: tuple


def synth_cert(tci: TCI, cap: int = 20) -> CertLanguage:
    window = tci.window(cap)
    u_name = tci.u_symbol.name
    universe = tuple(a for a in window if tci.in_extension(u_name, (a,)))
    positives = positive_sentences(tci, window)
    lang = close_under_negation(positives, truncated=not tci.finite_scope)
    y = hf_set(universe)
    gamma: list[Formula] = []
    x0, x1, x2 = Var(0), Var(1), Var(2)

    if tci.mode(u_name) == EXACT:
        gamma.append(Quant("forall", x0, Bin("implies", Mem(x0, Const(y)), _u(tci, x0))))
    for sym in tci.sigma:
        exact = tci.mode(sym.name) == EXACT
        if sym.kind == "constant":
            eqx = EAtom(Template(_graph(sym.name, (), x0)))
            eqy = EAtom(Template(_graph(sym.name, (), x1)))
            gamma.append(Quant("exists", x0, Bin("and", _u(tci, x0), eqx)))
            gamma.append(Quant("forall", x0, Quant("forall", x1, Bin(
                "implies", Bin("and", eqx, eqy), Eq(x0, x1)))))
            if exact:
                gamma.append(Quant("forall", x0, Bin("implies", Bin(
                    "and", _u(tci, x0), InL(Template(_graph(sym.name, (), x0)))), eqx)))
            continue
        n = sym.arity
        xs = tuple(Var(i) for i in range(n))
        guards = conj([_u(tci, v) for v in xs])
        if sym.kind == "relation":
            atom = Rel(sym.name, xs)
            f = Bin("implies", EAtom(Template(atom)), guards)
            gamma.append(_forall(xs, f))
            if exact:
                f = Bin("implies", Bin("and", guards, InL(Template(atom))), EAtom(Template(atom)))
                gamma.append(_forall(xs, f))
            continue
        y_, z_ = Var(n), Var(n + 1)
        g_y = EAtom(Template(_graph(sym.name, xs, y_)))
        g_z = EAtom(Template(_graph(sym.name, xs, z_)))
        gamma.append(_forall(xs + (y_,), Bin("implies", g_y, Bin("and", guards, _u(tci, y_)))))
        gamma.append(_forall(xs, Quant("exists", y_, Bin("implies", guards, g_y))))
        gamma.append(_forall(xs + (y_, z_), Bin("implies", Bin("and", g_y, g_z), Eq(y_, z_))))
        if exact:
            f = Bin("implies", conj([guards, _u(tci, y_), InL(Template(_graph(sym.name, xs, y_)))]), g_y)
            gamma.append(_forall(xs + (y_,), f))
    for phi in tci.theory:
        gamma.append(relativize(tci, phi))

    base = set(universe) | {y} | set(lang.sentences)
    for phi in tci.theory:
        base |= _literal_values(phi)
    base = _hf_closure(base)
    A = Structure(tuple(base), {}, ())
    return CertLanguage(lang, tuple(gamma), universe, A, window)


def _forall(vs: tuple, body: Formula) -> Formula:
    for v in reversed(vs):
        body = Quant("forall", v, body)
    return body


def _literal_values(phi: Formula) -> set:
    out: set = set()

    def term(t) -> None:
        if isinstance(t, Const):
            out.add(t.value)
        elif isinstance(t, App):
            for a in t.args:
                term(a)

    def walk(f: Formula) -> None:
        if isinstance(f, Rel):
            for a in f.args:
                term(a)
        elif isinstance(f, (Eq, Mem)):
            term(f.left)
            term(f.right)
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, Bin):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, Quant):
            walk(f.body)
        elif isinstance(f, BQuant):
            term(f.bound)
            walk(f.body)

    walk(phi)
    return out


def _hf_closure(values: set) -> set:
    out = set()
    stack = list(values)
    while stack:
        v = stack.pop()
        if v in out:
            continue
        out.add(v)
        stack.extend(members_of(v))
    return out


# ---------------------------------------------------------------------------
# Model <-> fragment


def literal_truth(M: Structure, tci: TCI, sentence: Formula) -> bool:
    """Truth of a positive L_T sentence in M."""
    if isinstance(sentence, Rel):
        args = tuple(a.value for a in sentence.args)
        if sentence.name == tci.u_symbol.name:
            return args[0] in M.base_set
        return args in (M.interp.get(sentence.name) or ())
    if isinstance(sentence, Eq) and isinstance(sentence.left, App):
        name = sentence.left.name
        args = tuple(a.value for a in sentence.left.args)
        val = sentence.right.value
        if tci.symbol(name).kind == "constant":
            return M.interp.get(name) == val
        return args + (val,) in (M.interp.get(name) or ())
    raise ValueError(f"not an L_T sentence: {to_text(sentence)}")


def sigma_of(tci: TCI, M: Structure, cap: int = 20, check: bool = True) -> frozenset:
    if check and not models_tci(M, tci, cap):
        raise ValueError("sigma_of needs a model of the TCI")
    out = []
    for s in positive_sentences(tci, tci.window(cap)):
        out.append(s if literal_truth(M, tci, s) else neg(s))
    return frozenset(out)


def structure_from_fragment(tci: TCI, sigma: Iterable[Formula]) -> Structure:
    base = []
    interp: dict = {s.name: set() for s in tci.sigma if s.kind != "constant"}
    for s in sigma:
        if isinstance(s, Not):
            continue
        if isinstance(s, Rel):
            args = tuple(a.value for a in s.args)
            if s.name == tci.u_symbol.name:
                base.append(args[0])
            else:
                interp[s.name].add(args)
        elif isinstance(s, Eq) and isinstance(s.left, App):
            name = s.left.name
            if tci.symbol(name).kind == "constant":
                interp[name] = s.right.value
            else:
                interp[name].add(tuple(a.value for a in s.left.args) + (s.right.value,))
    interp = {k: (frozenset(v) if isinstance(v, set) else v) for k, v in interp.items()}
    return Structure(tuple(base), interp, tci.sigma)


def model_of(tci: TCI, sigma: Iterable[Formula], cap: int = 20, check_gamma: bool = False) -> Structure:
    sigma = frozenset(sigma)
    lang = close_under_negation(positive_sentences(tci, tci.window(cap)))
    if not is_nice(sigma, lang):
        raise ValueError("fragment is not L_T-nice")
    if check_gamma:
        cert = synth_cert(tci, cap)
        ev = Evaluator(cert.structure, sigma, cert.language)
        for g in cert.gamma:
            if not ev.holds(g, {}):
                raise ValueError(f"fragment does not certify the empty condition: fails {to_text(g)}")
    M = structure_from_fragment(tci, sigma)
    for sym in tci.sigma:
        if sym.kind == "constant" and sym.name not in M.interp:
            raise ValueError(f"fragment does not certify the empty condition: no value for {sym.name}")
    try:
        ok = models_tci(M, tci, cap)
    except (ValueError, KeyError):
        ok = False
    if not ok:
        raise ValueError("fragment does not certify the empty condition")
    return M


# ---------------------------------------------------------------------------
# Constructions


U_SYMBOL = SymbolId("U", "relation", 1)


def naturals(k: int) -> frozenset:
    return frozenset(HF(i) for i in range(k))


def tci_from_theory(theory: Iterable[Formula], sigma: Iterable[SymbolId], kappa: int,
                    name: str = "") -> TCI:
    sigma = tuple(sigma)
    pts = sorted(naturals(kappa))
    cons = {U_SYMBOL.name: Constraint(Extension.finite(((a,) for a in pts), 1), SUBSET)}
    for sym in sigma:
        n = tuple_length(sym)
        cons[sym.name] = Constraint(Extension.finite(product(pts, repeat=n), n), SUBSET)
    return TCI(tuple(theory), sigma, U_SYMBOL, cons, name=name)


def tci_sub(A: Structure, theory: Iterable[Formula], name: str = "") -> TCI:
    cons = {U_SYMBOL.name: Constraint(Extension.finite(((a,) for a in A.base), 1), SUBSET)}
    for sym in A.signature:
        v = A.interp.get(sym.name)
        if sym.kind == "constant":
            cons[sym.name] = Constraint(Extension.finite([(v,)], 1), EXACT)
        else:
            cons[sym.name] = Constraint(Extension.finite(v or (), tuple_length(sym)), EXACT)
    return TCI(tuple(theory), A.signature, U_SYMBOL, cons, name=name)


def chain_sentence(rel: str, n: int) -> Formula:
    xs = [Var(i) for i in range(n)]
    body = conj([Rel(rel, (xs[k], xs[k + 1])) for k in range(n - 1)])
    for v in reversed(xs):
        body = Quant("exists", v, body)
    return body


def linear_order_axioms(rel: str) -> tuple:
    x, y, z = Var(0), Var(1), Var(2)
    irreflexive = Quant("forall", x, Not(Rel(rel, (x, x))))
    transitive = Quant("forall", x, Quant("forall", y, Quant("forall", z, Bin(
        "implies", Bin("and", Rel(rel, (x, y)), Rel(rel, (y, z))), Rel(rel, (x, z))))))
    trichotomy = Quant("forall", x, Quant("forall", y, Bin(
        "or", Rel(rel, (x, y)), Bin("or", Rel(rel, (y, x)), Eq(y, x)))))
    return irreflexive, transitive, trichotomy


def window_pairs(n: int) -> list:
    """S_n = {(k, l) : 2^n <= k < l < 2^n + n}."""
    lo = 1 << n
    return [(HF(k), HF(l)) for k in range(lo, lo + n) for l in range(k + 1, lo + n)]


def countercom_fixture(n_max: int, rel: str = "R") -> TCI:
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    S = [p for n in range(1, n_max + 1) for p in window_pairs(n)]
    R = SymbolId(rel, "relation", 2)
    cons = {
        U_SYMBOL.name: Constraint(Extension.omega(1), SUBSET),
        rel: Constraint(Extension.finite(S, 2), SUBSET),
    }
    theory = linear_order_axioms(rel) + tuple(chain_sentence(rel, n) for n in range(2, n_max + 1))
    return TCI(theory, (R,), U_SYMBOL, cons, tail=ChainTail(rel, n_max + 1), name="countercom")


@dataclass(frozen=True)
class CodeFriendly:
    tci: TCI
    element_map: Mapping  # original element -> HF(i)
    symbol_codes: Mapping  # symbol name -> HF value of its code

    def translate(self, M: Structure) -> Structure:
        m = self.element_map
        interp = {}
        for sym in M.signature:
            v = M.interp.get(sym.name)
            if sym.kind == "constant":
                interp[sym.name] = m[v]
            else:
                interp[sym.name] = frozenset(tuple(m[a] for a in t) for t in v)
        return Structure(tuple(m[a] for a in M.base), interp, M.signature)


SYMBOL_CODE_BASE = 1 << 16


def symbol_codes(tci: TCI) -> dict:
    names = [tci.u_symbol.name] + [s.name for s in tci.sigma]
    return {n: HF(SYMBOL_CODE_BASE + i) for i, n in enumerate(names)}


def make_codefriendly(tci: TCI) -> CodeFriendly:
    u = tci.universe_ext
    if u.kind == "omega":
        return CodeFriendly(tci, {}, symbol_codes(tci))
    elems = sorted(u.field())
    m = {a: HF(i) for i, a in enumerate(elems)}
    if all(a == b for a, b in m.items()):
        return CodeFriendly(tci, m, symbol_codes(tci))
    cons = {}
    for name, c in tci.constraint.items():
        ext = c.extension
        if ext.kind == "finite":
            ext = Extension.finite((tuple(m.get(a, a) for a in t) for t in ext.tuples), ext.arity)
        cons[name] = Constraint(ext, c.mode)
    def rename(phi: Formula) -> Formula:
        return _map_consts(phi, lambda v: m.get(v, v))

    new = TCI(tuple(rename(p) for p in tci.theory), tci.sigma, tci.u_symbol, cons, tci.tail, tci.name)
    return CodeFriendly(new, m, symbol_codes(tci))


def _map_consts(phi: Formula, fn) -> Formula:
    def term(t):
        if isinstance(t, Const):
            return Const(fn(t.value))
        if isinstance(t, App):
            return App(t.name, tuple(term(a) for a in t.args))
        return t

    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(term(a) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(term(phi.left), term(phi.right))
    if isinstance(phi, Mem):
        return Mem(term(phi.left), term(phi.right))
    if isinstance(phi, Not):
        return Not(_map_consts(phi.body, fn))
    if isinstance(phi, Bin):
        return Bin(phi.op, _map_consts(phi.left, fn), _map_consts(phi.right, fn))
    if isinstance(phi, Quant):
        return Quant(phi.q, phi.var, _map_consts(phi.body, fn))
    if isinstance(phi, BQuant):
        return BQuant(phi.q, phi.var, term(phi.bound), _map_consts(phi.body, fn))
    return phi


def poset_element_map(P) -> dict:
    """Poset element -> HF(index) in the poset's listed order."""
    return {e: HF(i) for i, e in enumerate(P.elements)}


def tci_from_poset(P, name: str = "") -> TCI:
    """Models are the generic filters of the finite poset P, read off Ġ."""
    from .posets import dense_subsets

    if not isinstance(P.elements, tuple):
        raise ValueError("tci_from_poset needs a finite poset")
    m = poset_element_map(P)
    leq = SymbolId("Leq", "relation", 2)
    g = SymbolId("G", "relation", 1)
    dense = dense_subsets(P)
    d_syms = [SymbolId(f"D{i}", "relation", 1) for i in range(len(dense))]
    cons = {
        U_SYMBOL.name: Constraint(Extension.finite(((m[e],) for e in P.elements), 1), EXACT),
        "Leq": Constraint(Extension.finite(((m[a], m[b]) for a, b in P.pairs), 2), EXACT),
        "G": Constraint(Extension.finite(((m[e],) for e in P.elements), 1), SUBSET),
    }
    for sym, D in zip(d_syms, dense):
        cons[sym.name] = Constraint(Extension.finite(((m[e],) for e in D), 1), EXACT)
    x, y, z = Var(0), Var(1), Var(2)
    upward = Quant("forall", x, Quant("forall", y, Bin(
        "implies", Bin("and", Rel("G", (x,)), Rel("Leq", (x, y))), Rel("G", (y,)))))
    directed = Quant("forall", x, Quant("forall", y, Bin(
        "implies", Bin("and", Rel("G", (x,)), Rel("G", (y,))),
        Quant("exists", z, conj([Rel("G", (z,)), Rel("Leq", (z, x)), Rel("Leq", (z, y))])))))
    meeting = tuple(Quant("exists", x, Bin("and", Rel("G", (x,)), Rel(s.name, (x,))))
                    for s in d_syms)
    return TCI((upward, directed) + meeting, (leq, g) + tuple(d_syms), U_SYMBOL, cons,
               name=name or f"poset-{P.name or len(P.elements)}")
