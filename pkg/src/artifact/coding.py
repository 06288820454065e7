"""Gödel numbering of plain sentences and the nicely computable code (r, f).

f sends an HF set x to 2·N(x) (N the Ackermann code); f† sends the logical
symbols ¬ ∧ ∨ ⟹ ⟺ ∀ ∃ = ∈ and the variables v0, v1, ... to 1, 3, 5, ...
Formulas are written in Polish notation, mapped through f ∪ f†, and the
resulting sequence is packed by Elias-gamma concatenation behind a leading
1 bit.  Signature symbols are HF sets 2^16 + i (see `symbol_codes`), so HF
literals in coded sentences must stay below 2^16.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .hf import HF, hf_set
from .semantics import Structure, sat
from .syntax import (
    App, BQuant, Bin, Const, Eq, Formula, Mem, Not, Quant, Rel, SymbolId, Var, members_of,
)

LOGICAL = ("not", "and", "or", "implies", "iff", "forall", "exists", "eq", "mem")
F_DAGGER = {name: 2 * i + 1 for i, name in enumerate(LOGICAL)}
VAR_BASE = 2 * len(LOGICAL) + 1
SYMBOL_CODE_BASE = 1 << 16


class OutOfFragment(ValueError):
    pass


def f(x: HF) -> int:
    return 2 * x.code


def f_inverse(n: int) -> HF:
    if n % 2:
        raise ValueError("f has only even values")
    return HF(n // 2)


def f_dagger(token) -> int:
    """Logical symbol name or Var -> odd natural."""
    if isinstance(token, Var):
        return VAR_BASE + 2 * token.index
    return F_DAGGER[token]


def f_dagger_inverse(n: int):
    if n % 2 == 0:
        raise ValueError("f† has only odd values")
    if n < VAR_BASE:
        return LOGICAL[(n - 1) // 2]
    return Var((n - VAR_BASE) // 2)


# ---------------------------------------------------------------------------
# Sequence coding


def _gamma(n: int) -> str:
    b = bin(n)[2:]
    return "0" * (len(b) - 1) + b


def encode_sequence(seq) -> int:
    return int("1" + "".join(_gamma(n + 1) for n in seq), 2)


def decode_sequence(code: int) -> list[int]:
    bits = bin(code)[2:]
    if not bits.startswith("1"):
        raise ValueError("not a sequence code")
    out, i = [], 1
    while i < len(bits):
        z = 0
        while i < len(bits) and bits[i] == "0":
            z += 1
            i += 1
        if i + z + 1 > len(bits):
            raise ValueError("truncated sequence code")
        out.append(int(bits[i:i + z + 1], 2) - 1)
        i += z + 1
    return out


# ---------------------------------------------------------------------------
# Symbol tables


@dataclass(frozen=True)
class SymbolTable:
    """Signature symbols and their HF codes (2^16 + i)."""

    symbols: tuple

    @staticmethod
    def of(symbols) -> "SymbolTable":
        return SymbolTable(tuple(symbols))

    def code(self, name: str) -> int:
        for i, s in enumerate(self.symbols):
            if s.name == name:
                return SYMBOL_CODE_BASE + i
        raise OutOfFragment(f"unknown symbol {name}")

    def symbol(self, code: int) -> SymbolId:
        i = code - SYMBOL_CODE_BASE
        if 0 <= i < len(self.symbols):
            return self.symbols[i]
        raise ValueError(f"no symbol with code {code}")


def table_for_tci(tci) -> SymbolTable:
    return SymbolTable((tci.u_symbol,) + tuple(tci.sigma))


# ---------------------------------------------------------------------------
# Gd


def polish(phi: Formula, table: SymbolTable) -> list[int]:
    out: list[int] = []

    def term(t) -> None:
        if isinstance(t, Var):
            out.append(f_dagger(t))
        elif isinstance(t, Const):
            if not isinstance(t.value, HF) or t.value.code >= SYMBOL_CODE_BASE:
                raise OutOfFragment(f"literal {t!r} is outside the coded fragment")
            out.append(f(t.value))
        elif isinstance(t, App):
            out.append(f(HF(table.code(t.name))))
            for a in t.args:
                term(a)
        else:
            raise OutOfFragment(repr(t))

    def go(g: Formula) -> None:
        if isinstance(g, Rel):
            out.append(f(HF(table.code(g.name))))
            for a in g.args:
                term(a)
        elif isinstance(g, Eq):
            out.append(f_dagger("eq"))
            term(g.left)
            term(g.right)
        elif isinstance(g, Mem):
            out.append(f_dagger("mem"))
            term(g.left)
            term(g.right)
        elif isinstance(g, Not):
            out.append(f_dagger("not"))
            go(g.body)
        elif isinstance(g, Bin):
            out.append(f_dagger(g.op))
            go(g.left)
            go(g.right)
        elif isinstance(g, Quant):
            out.append(f_dagger(g.q))
            out.append(f_dagger(g.var))
            go(g.body)
        elif isinstance(g, BQuant):
            inner = Bin("implies" if g.q == "forall" else "and", Mem(g.var, g.bound), g.body)
            go(Quant(g.q, g.var, inner))
        else:
            raise OutOfFragment("E-atoms and language atoms are not coded")

    go(phi)
    return out


def godel_number(phi: Formula, table: SymbolTable) -> int:
    return encode_sequence(polish(phi, table))


def _from_polish(seq: list[int], table: SymbolTable) -> Formula:
    pos = [0]

    def take() -> int:
        if pos[0] >= len(seq):
            raise ValueError("truncated formula code")
        n = seq[pos[0]]
        pos[0] += 1
        return n

    def term():
        n = take()
        if n % 2:
            v = f_dagger_inverse(n)
            if not isinstance(v, Var):
                raise ValueError("expected a term")
            return v
        x = n // 2
        if x >= SYMBOL_CODE_BASE:
            sym = table.symbol(x)
            if sym.kind == "relation":
                raise ValueError("relation symbol in term position")
            return App(sym.name, tuple(term() for _ in range(sym.arity or 0)))
        return Const(HF(x))

    def go() -> Formula:
        n = take()
        if n % 2 == 0:
            sym = table.symbol(n // 2)
            if sym.kind != "relation":
                raise ValueError("expected a relation symbol")
            return Rel(sym.name, tuple(term() for _ in range(sym.arity)))
        tok = f_dagger_inverse(n)
        if tok == "eq":
            return Eq(term(), term())
        if tok == "mem":
            return Mem(term(), term())
        if tok == "not":
            return Not(go())
        if tok in ("and", "or", "implies", "iff"):
            return Bin(tok, go(), go())
        if tok in ("forall", "exists"):
            v = f_dagger_inverse(take())
            if not isinstance(v, Var):
                raise ValueError("expected a variable")
            return _fold_bounded(Quant(tok, v, go()))
        raise ValueError(f"unexpected token {tok!r}")

    phi = go()
    if pos[0] != len(seq):
        raise ValueError("trailing symbols in formula code")
    return phi


def _fold_bounded(q: Quant) -> Formula:
    body = q.body
    want = "implies" if q.q == "forall" else "and"
    if isinstance(body, Bin) and body.op == want and isinstance(body.left, Mem) \
            and body.left.left == q.var and not isinstance(body.left.right, App) \
            and body.left.right != q.var:
        return BQuant(q.q, q.var, body.left.right, body.right)
    return q


def godel_decode(code: int, table: SymbolTable) -> Formula:
    return _from_polish(decode_sequence(code), table)


# ---------------------------------------------------------------------------
# Nicely computable code witness


EMPTY_TABLE = SymbolTable(())


def _delta0_true(phi: Formula) -> bool:
    """Truth of a Δ0 sentence of (H(ω); ∈) with HF parameters."""
    consts = _constants(phi)
    base = set()
    stack = list(consts)
    while stack:
        v = stack.pop()
        if v in base:
            continue
        base.add(v)
        stack.extend(members_of(v))
    return sat(Structure(tuple(base)), (), None, phi)


def _constants(phi: Formula) -> set:
    out: set = set()

    def term(t) -> None:
        if isinstance(t, Const):
            out.add(t.value)

    def go(g) -> None:
        if isinstance(g, (Eq, Mem)):
            term(g.left)
            term(g.right)
        elif isinstance(g, Not):
            go(g.body)
        elif isinstance(g, Bin):
            go(g.left)
            go(g.right)
        elif isinstance(g, BQuant):
            term(g.bound)
            go(g.body)
        elif isinstance(g, Quant):
            go(g.body)

    go(phi)
    return out


def _is_delta0_set(phi: Formula) -> bool:
    if isinstance(phi, (Eq, Mem)):
        return not isinstance(phi.left, App) and not isinstance(phi.right, App)
    if isinstance(phi, Not):
        return _is_delta0_set(phi.body)
    if isinstance(phi, Bin):
        return _is_delta0_set(phi.left) and _is_delta0_set(phi.right)
    if isinstance(phi, BQuant):
        return _is_delta0_set(phi.body)
    return False


@dataclass
class CodeWitness:
    """(r, f) for (H(ω); ∈): r decides the Gd codes of true Δ0 sentences."""

    f: Callable = f
    f_dagger: Callable = f_dagger
    table: SymbolTable = EMPTY_TABLE
    _cache: dict = field(default_factory=dict, repr=False)

    def r(self, code: int) -> bool:
        hit = self._cache.get(code)
        if hit is None:
            try:
                phi = godel_decode(code, self.table)
            except (ValueError, IndexError):
                hit = False
            else:
                hit = _is_delta0_set(phi) and not _free(phi) and _delta0_true(phi)
            self._cache[code] = hit
        return hit

    def reconstruct_f(self, bound: int) -> dict:
        """Recover f on HF codes below `bound` from r alone: the set with
        number 2k is the collapse of {2j : r says ⟨∈, 2j, 2k⟩}."""
        mem = F_DAGGER["mem"]
        members = {k: [j for j in range(bound)
                       if self.r(encode_sequence([mem, 2 * j, 2 * k]))] for k in range(bound)}
        value: dict = {}

        def collapse(k: int) -> HF:
            if k not in value:
                value[k] = hf_set(collapse(j) for j in members[k])
            return value[k]

        return {collapse(k): 2 * k for k in range(bound)}


def _free(phi: Formula) -> bool:
    from .syntax import free_vars

    return bool(free_vars(phi))
