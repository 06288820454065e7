"""First-order syntax: symbols, values, terms, formulas, parsing and printing.

Formulas are immutable trees.  The same node types carry the star extension:
`EAtom` is the predicate E applied to a sentence-valued argument and `InL` is
the E-free atom "x is in the language".
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Union

from .hf import HF, hf_set

# ---------------------------------------------------------------------------
# Symbols and values


KINDS = ("relation", "function", "constant")


@dataclass(frozen=True, slots=True)
class SymbolId:
    name: str
    kind: str
    arity: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind == "constant":
            if self.arity != 0:
                raise ValueError("constants have no arity")
        elif self.arity < 1:
            raise ValueError("relations and functions need arity >= 1")
        if not self.name or any(c in self.name for c in "()[]{},=# \t\n"):
            raise ValueError(f"bad symbol name {self.name!r}")


@dataclass(frozen=True, slots=True)
class SetVal:
    """A finite set with at least one non-HF member (e.g. a set of sentences)."""

    elems: frozenset

    def __repr__(self) -> str:
        return _set_text(self.elems)


@lru_cache(maxsize=1 << 14)
def _set_text(elems: frozenset) -> str:
    return "{" + ",".join(show_value(v) for v in sorted_values(elems)) + "}"


Value = Union[HF, SetVal, "Formula"]


def make_set(members: Iterable[Value]) -> Value:
    members = frozenset(members)
    if all(isinstance(m, HF) for m in members):
        return hf_set(members)
    return SetVal(members)


def members_of(v: Value) -> tuple:
    """Members of a value in canonical order; sentences have none."""
    if isinstance(v, HF):
        return v.elements()
    if isinstance(v, SetVal):
        return tuple(sorted_values(v.elems))
    return ()


def is_member(a: Value, b: Value) -> bool:
    if isinstance(b, HF):
        return isinstance(a, HF) and a in b
    if isinstance(b, SetVal):
        return a in b.elems
    return False


def value_key(v: Value) -> tuple:
    if isinstance(v, HF):
        return (0, v.code, "")
    if isinstance(v, SetVal):
        return (1, len(v.elems), repr(v))
    return (2, 0, to_text(v))


def sorted_values(vs: Iterable[Value]) -> list:
    return sorted(vs, key=value_key)


def show_value(v: Value) -> str:
    if isinstance(v, HF):
        return f"#{v.code}"
    if isinstance(v, SetVal):
        return repr(v)
    return to_text(v)


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True, slots=True)
class Var:
    index: int

    def __repr__(self) -> str:
        return f"v{self.index}"


@dataclass(frozen=True, slots=True)
class Const:
    value: Value

    def __repr__(self) -> str:
        return show_value(self.value)


@dataclass(frozen=True, slots=True)
class App:
    name: str
    args: tuple

    def __repr__(self) -> str:
        return to_text_term(self)


Term = Union[Var, Const, App]


def hf_const(code: int) -> Const:
    return Const(HF(code))


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    """Base class; concrete nodes are frozen dataclasses below."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True, repr=False)
class Rel(Formula):
    name: str
    args: tuple = ()

    def __repr__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True, repr=False)
class Eq(Formula):
    left: Term
    right: Term

    def __repr__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True, repr=False)
class Mem(Formula):
    left: Term
    right: Term

    def __repr__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True, repr=False)
class Not(Formula):
    body: Formula

    def __repr__(self) -> str:
        return to_text(self)


BINOPS = ("and", "or", "implies", "iff")


@dataclass(frozen=True, slots=True, repr=False)
class Bin(Formula):
    op: str
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True, repr=False)
class Quant(Formula):
    q: str  # "forall" | "exists"
    var: Var
    body: Formula

    def __repr__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True, repr=False)
class BQuant(Formula):
    q: str  # "forall" | "exists"
    var: Var
    bound: Term
    body: Formula

    def __repr__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class NegArg:
    """E-argument denoting the canonical negation of the sentence named by `term`."""

    term: Term


@dataclass(frozen=True, slots=True)
class Template:
    """E-argument given as an E-free atom with variables (parameter passing)."""

    atom: Formula


EArg = Union[Term, NegArg, Template]


@dataclass(frozen=True, slots=True, repr=False)
class EAtom(Formula):
    arg: EArg

    def __repr__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True, repr=False)
class InL(Formula):
    arg: EArg

    def __repr__(self) -> str:
        return to_text(self)


def And(a: Formula, b: Formula) -> Bin:
    return Bin("and", a, b)


def Or(a: Formula, b: Formula) -> Bin:
    return Bin("or", a, b)


def Implies(a: Formula, b: Formula) -> Bin:
    return Bin("implies", a, b)


def Iff(a: Formula, b: Formula) -> Bin:
    return Bin("iff", a, b)


def Forall(v: Var, body: Formula) -> Quant:
    return Quant("forall", v, body)


def Exists(v: Var, body: Formula) -> Quant:
    return Quant("exists", v, body)


def conj(fs: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is `(eq #0 #0)`."""
    fs = list(fs)
    if not fs:
        return TRUE
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Bin("and", f, out)
    return out


def disj(fs: Iterable[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is `(not (eq #0 #0))`."""
    fs = list(fs)
    if not fs:
        return FALSE
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Bin("or", f, out)
    return out


TRUE: Formula = Eq(Const(HF(0)), Const(HF(0)))
FALSE: Formula = Not(TRUE)


# ---------------------------------------------------------------------------
# Canonical negation, languages, niceness


def neg(phi: Formula) -> Formula:
    if isinstance(phi, Not):
        return phi.body
    return Not(phi)


@dataclass(frozen=True)
class Language:
    """A set of sentences; `truncated` marks a cap-enumerated portion."""

    sentences: frozenset
    truncated: bool = False

    def __contains__(self, item: object) -> bool:
        return item in self.sentences

    def __iter__(self) -> Iterator[Formula]:
        return iter(sorted(self.sentences, key=to_text))

    def __len__(self) -> int:
        return len(self.sentences)

    def is_negation_closed(self) -> bool:
        return all(neg(s) in self.sentences for s in self.sentences)

    def positives(self) -> list:
        return [s for s in self if not isinstance(s, Not)]


def close_under_negation(sentences: Iterable[Formula], truncated: bool = False) -> Language:
    base = set(sentences)
    return Language(frozenset(base | {neg(s) for s in base}), truncated)


def is_nice(sigma: Iterable[Formula], lang: "Language | Iterable[Formula]") -> bool:
    sigma = frozenset(sigma)
    sentences = lang.sentences if isinstance(lang, Language) else frozenset(lang)
    if not sigma <= sentences:
        return False
    return all((s in sigma) != (neg(s) in sigma) for s in sentences)


def nice_verdict(sigma: Iterable[Formula], lang: Language) -> tuple[bool, bool]:
    """(is_nice, truncated): the flag says the verdict covers only the enumerated part."""
    return is_nice(sigma, lang), lang.truncated


# ---------------------------------------------------------------------------
# Traversal helpers


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, App):
        out: set = set()
        for a in t.args:
            out |= term_vars(a)
        return out
    return set()


def earg_vars(a: EArg) -> set:
    if isinstance(a, NegArg):
        return term_vars(a.term)
    if isinstance(a, Template):
        return free_vars(a.atom)
    return term_vars(a)


def free_vars(phi: Formula) -> set:
    if isinstance(phi, Rel):
        out: set = set()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, (Eq, Mem)):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, Bin):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Quant):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, BQuant):
        return term_vars(phi.bound) | (free_vars(phi.body) - {phi.var})
    if isinstance(phi, (EAtom, InL)):
        return earg_vars(phi.arg)
    raise TypeError(f"not a formula: {phi!r}")


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


def all_vars(phi: Formula) -> set:
    """Free and bound variables."""
    if isinstance(phi, Quant):
        return {phi.var} | all_vars(phi.body)
    if isinstance(phi, BQuant):
        return {phi.var} | term_vars(phi.bound) | all_vars(phi.body)
    if isinstance(phi, Not):
        return all_vars(phi.body)
    if isinstance(phi, Bin):
        return all_vars(phi.left) | all_vars(phi.right)
    if isinstance(phi, (EAtom, InL)) and isinstance(phi.arg, Template):
        return all_vars(phi.arg.atom)
    return free_vars(phi)


def subst_term(t: Term, m: dict) -> Term:
    if isinstance(t, Var):
        return m.get(t, t)
    if isinstance(t, App):
        return App(t.name, tuple(subst_term(a, m) for a in t.args))
    return t


def _subst_earg(a: EArg, m: dict) -> EArg:
    if isinstance(a, NegArg):
        return NegArg(subst_term(a.term, m))
    if isinstance(a, Template):
        return Template(substitute(a.atom, m))
    return subst_term(a, m)


def substitute(phi: Formula, m: dict) -> Formula:
    """Replace free variables by terms.  Callers substitute closed terms only,
    so capture cannot occur."""
    if not m:
        return phi
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(subst_term(a, m) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.left, m), subst_term(phi.right, m))
    if isinstance(phi, Mem):
        return Mem(subst_term(phi.left, m), subst_term(phi.right, m))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, m))
    if isinstance(phi, Bin):
        return Bin(phi.op, substitute(phi.left, m), substitute(phi.right, m))
    if isinstance(phi, Quant):
        inner = {k: v for k, v in m.items() if k != phi.var}
        return Quant(phi.q, phi.var, substitute(phi.body, inner))
    if isinstance(phi, BQuant):
        inner = {k: v for k, v in m.items() if k != phi.var}
        return BQuant(phi.q, phi.var, subst_term(phi.bound, m), substitute(phi.body, inner))
    if isinstance(phi, EAtom):
        return EAtom(_subst_earg(phi.arg, m))
    if isinstance(phi, InL):
        return InL(_subst_earg(phi.arg, m))
    raise TypeError(f"not a formula: {phi!r}")


def contains_e(phi: Formula) -> bool:
    if isinstance(phi, EAtom):
        return True
    if isinstance(phi, Not):
        return contains_e(phi.body)
    if isinstance(phi, Bin):
        return contains_e(phi.left) or contains_e(phi.right)
    if isinstance(phi, (Quant, BQuant)):
        return contains_e(phi.body)
    return False


def symbols_used(phi: Formula) -> set:
    """Names of relation/function/constant symbols occurring in phi."""
    out: set = set()

    def term(t: Term) -> None:
        if isinstance(t, App):
            out.add(t.name)
            for a in t.args:
                term(a)

    def walk(f: Formula) -> None:
        if isinstance(f, Rel):
            out.add(f.name)
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


def canonical(phi: Formula) -> Formula:
    """Rename bound variables to v{k}, v{k+1}, ... in binding order, where k is
    one more than the largest free variable index."""
    free = free_vars(phi)
    start = max((v.index for v in free), default=-1) + 1
    counter = [start]

    def go(f: Formula, m: dict) -> Formula:
        if isinstance(f, (Quant, BQuant)):
            nv = Var(counter[0])
            counter[0] += 1
            inner = dict(m)
            inner[f.var] = nv
            body = go(f.body, inner)
            if isinstance(f, Quant):
                return Quant(f.q, nv, body)
            return BQuant(f.q, nv, subst_term(f.bound, m), body)
        if isinstance(f, Not):
            return Not(go(f.body, m))
        if isinstance(f, Bin):
            return Bin(f.op, go(f.left, m), go(f.right, m))
        return substitute(f, m)

    return go(phi, {})


# ---------------------------------------------------------------------------
# Formula classes


def _quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, (Quant, BQuant)):
        return False
    if isinstance(phi, Not):
        return _quantifier_free(phi.body)
    if isinstance(phi, Bin):
        return _quantifier_free(phi.left) and _quantifier_free(phi.right)
    return True


def _bounded_only(phi: Formula) -> bool:
    if isinstance(phi, Quant):
        return False
    if isinstance(phi, BQuant):
        return _bounded_only(phi.body)
    if isinstance(phi, Not):
        return _bounded_only(phi.body)
    if isinstance(phi, Bin):
        return _bounded_only(phi.left) and _bounded_only(phi.right)
    return True


def classify(phi: Formula, mode: str = "general") -> str:
    """Return "Delta0", "Sigma<n>", "Pi<n>" or "unclassified"."""
    if mode not in ("general", "set-theoretic"):
        raise ValueError(f"unknown mode {mode!r}")
    matrix_ok = _quantifier_free if mode == "general" else _bounded_only
    if matrix_ok(phi):
        return "Delta0"
    kinds: list[str] = []
    f = phi
    while True:
        if isinstance(f, Quant) or (mode == "general" and isinstance(f, BQuant)):
            kinds.append(f.q)
            f = f.body
        else:
            break
    if not kinds or not matrix_ok(f):
        return "unclassified"
    blocks = 1 + sum(1 for a, b in zip(kinds, kinds[1:]) if a != b)
    return ("Pi" if kinds[0] == "forall" else "Sigma") + str(blocks)


# ---------------------------------------------------------------------------
# Printing


def to_text_term(t: Term) -> str:
    if isinstance(t, Var):
        return f"v{t.index}"
    if isinstance(t, Const):
        return show_value(t.value)
    if isinstance(t, App):
        return "(app " + " ".join([t.name] + [to_text_term(a) for a in t.args]) + ")"
    raise TypeError(f"not a term: {t!r}")


def _template_parts(atom: Formula) -> list[str]:
    if isinstance(atom, Rel):
        return [atom.name] + [to_text_term(a) for a in atom.args]
    if isinstance(atom, Eq) and isinstance(atom.left, App):
        return [atom.left.name + "="] + [to_text_term(a) for a in atom.left.args] + [to_text_term(atom.right)]
    raise TypeError(f"template must be a relation atom or a graph equation: {atom!r}")


def _earg_text(a: EArg) -> str:
    if isinstance(a, NegArg):
        return f"(neg {to_text_term(a.term)})"
    if isinstance(a, Template):
        return "(tmpl " + " ".join(_template_parts(a.atom)) + ")"
    return to_text_term(a)


@lru_cache(maxsize=1 << 16)
def to_text(phi: Formula) -> str:
    if isinstance(phi, Rel):
        return "(rel " + " ".join([phi.name] + [to_text_term(a) for a in phi.args]) + ")"
    if isinstance(phi, Eq):
        return f"(eq {to_text_term(phi.left)} {to_text_term(phi.right)})"
    if isinstance(phi, Mem):
        return f"(mem {to_text_term(phi.left)} {to_text_term(phi.right)})"
    if isinstance(phi, Not):
        return f"(not {to_text(phi.body)})"
    if isinstance(phi, Bin):
        return f"({phi.op} {to_text(phi.left)} {to_text(phi.right)})"
    if isinstance(phi, Quant):
        return f"({phi.q} v{phi.var.index} {to_text(phi.body)})"
    if isinstance(phi, BQuant):
        return f"({phi.q}-mem v{phi.var.index} {to_text_term(phi.bound)} {to_text(phi.body)})"
    if isinstance(phi, EAtom):
        if isinstance(phi.arg, Template):
            return "(E-term " + " ".join(_template_parts(phi.arg.atom)) + ")"
        return f"(E {_earg_text(phi.arg)})"
    if isinstance(phi, InL):
        return f"(in-L {_earg_text(phi.arg)})"
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Parsing


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"syntax error at offset {offset}: {message}")
        self.offset = offset


_DELIMS = "(){},"
FORMULA_HEADS = {"rel", "eq", "mem", "not", "and", "or", "implies", "iff", "forall",
                 "exists", "forall-mem", "exists-mem", "E", "E-term", "in-L"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in _DELIMS:
            toks.append((c, i))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in _DELIMS:
                j += 1
            toks.append((text[i:j], i))
            i = j
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> str | None:
        j = self.i + k
        return self.toks[j][0] if j < len(self.toks) else None

    def offset(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def fail(self, msg: str) -> None:
        raise FormulaSyntaxError(msg, self.offset())

    def take(self) -> str:
        if self.i >= len(self.toks):
            self.fail("unexpected end of input")
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            self.fail(f"expected {tok!r}" if self.peek() is not None else "unexpected end of input")
        self.i += 1

    def var(self) -> Var:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        if not (tok.startswith("v") and tok[1:].isdigit()):
            self.fail(f"expected a variable, got {tok!r}")
        self.i += 1
        return Var(int(tok[1:]))

    def name(self) -> str:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        if tok in _DELIMS:
            self.fail(f"expected a symbol name, got {tok!r}")
        self.i += 1
        return tok

    def term(self, allow_app: bool = False) -> Term:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        if tok == "{":
            return Const(self.set_literal())
        if tok == "(":
            head = self.peek(1)
            if head == "app":
                if not allow_app:
                    self.fail("app is only allowed as a side of eq")
                self.i += 2
                name = self.name()
                args = []
                while self.peek() != ")":
                    args.append(self.term())
                self.expect(")")
                return App(name, tuple(args))
            if head in FORMULA_HEADS:
                return Const(self.formula())
            self.i += 1
            self.fail(f"unknown term head {head!r}")
        if tok.startswith("#"):
            if not tok[1:].isdigit():
                self.fail(f"bad HF literal {tok!r}")
            self.i += 1
            return Const(HF(int(tok[1:])))
        if tok.startswith("v") and tok[1:].isdigit():
            self.i += 1
            return Var(int(tok[1:]))
        self.fail(f"unexpected token {tok!r}")
        raise AssertionError

    def set_literal(self) -> Value:
        self.expect("{")
        items = []
        if self.peek() != "}":
            while True:
                t = self.term()
                if not isinstance(t, Const):
                    self.fail("set literals may only contain closed values")
                items.append(t.value)
                if self.peek() == ",":
                    self.i += 1
                    continue
                break
        self.expect("}")
        return make_set(items)

    def earg(self) -> EArg:
        if self.peek() == "(" and self.peek(1) == "neg":
            self.i += 2
            t = self.term()
            self.expect(")")
            return NegArg(t)
        if self.peek() == "(" and self.peek(1) == "tmpl":
            self.i += 2
            return Template(self.template_body())
        return self.term()

    def template_body(self) -> Formula:
        name = self.name()
        args = []
        while self.peek() != ")":
            args.append(self.term())
        self.expect(")")
        if name.endswith("="):
            if not args:
                self.fail("graph template needs a value argument")
            return Eq(App(name[:-1], tuple(args[:-1])), args[-1])
        return Rel(name, tuple(args))

    def formula(self) -> Formula:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        if tok != "(":
            if tok in _DELIMS or tok.startswith("#") or (tok.startswith("v") and tok[1:].isdigit()):
                self.fail(f"unexpected token {tok!r}")
            self.i += 1
            return Rel(tok, ())
        self.i += 1
        start = self.offset()
        head = self.take()
        if head == "rel":
            name = self.name()
            args = []
            while self.peek() != ")":
                args.append(self.term())
            self.expect(")")
            return Rel(name, tuple(args))
        if head in ("eq", "mem"):
            left = self.term(allow_app=head == "eq")
            right = self.term(allow_app=head == "eq")
            self.expect(")")
            if head == "eq" and isinstance(left, App) and isinstance(right, App):
                raise FormulaSyntaxError("eq between two applications is not supported", start)
            if head == "mem":
                return Mem(left, right)
            if isinstance(right, App):
                left, right = right, left
            return Eq(left, right)
        if head == "not":
            body = self.formula()
            self.expect(")")
            return Not(body)
        if head in BINOPS:
            a = self.formula()
            b = self.formula()
            self.expect(")")
            return Bin(head, a, b)
        if head in ("forall", "exists"):
            v = self.var()
            body = self.formula()
            self.expect(")")
            return Quant(head, v, body)
        if head in ("forall-mem", "exists-mem"):
            v = self.var()
            bound = self.term()
            body = self.formula()
            self.expect(")")
            return BQuant(head[:-4], v, bound, body)
        if head == "E":
            arg = self.earg()
            self.expect(")")
            return EAtom(arg)
        if head == "E-term":
            return EAtom(Template(self.template_body()))
        if head == "in-L":
            arg = self.earg()
            self.expect(")")
            return InL(arg)
        self.i -= 1
        self.fail(f"unknown formula head {head!r}")
        raise AssertionError


def parse(text: str) -> Formula:
    p = _Parser(text)
    phi = p.formula()
    if p.i != len(p.toks):
        p.fail("trailing input")
    return phi


def parse_many(text: str) -> list[Formula]:
    """Parse a whitespace-separated sequence of formulas."""
    p = _Parser(text)
    out = []
    while p.i < len(p.toks):
        out.append(p.formula())
    return out


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term(allow_app=True)
    if p.i != len(p.toks):
        p.fail("trailing input")
    return t
