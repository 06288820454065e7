"""Line-oriented file formats: TCI, poset, structure, condition (Σ) and
schedule files.  Lines starting with `;` and blank lines are ignored."""

from __future__ import annotations

import re
from typing import Iterable

from .hf import HF
from .posets import Order, poset
from .semantics import Structure
from .syntax import (
    FormulaSyntaxError, SymbolId, Value, parse, parse_many, parse_term, show_value, to_text,
)
from .tci import (
    EXACT, SUBSET, TCI, U_SYMBOL, ChainTail, Constraint, Extension, tuple_length,
)


class FormatError(ValueError):
    pass


def _lines(text: str) -> list[tuple[int, str]]:
    out = []
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith(";"):
            out.append((i, line))
    return out


def _sections(text: str, known: Iterable[str]) -> dict[str, list[tuple[int, str]]]:
    """Split into `NAME:` sections; text after the colon starts the section."""
    known = tuple(known)
    out: dict[str, list] = {}
    current = None
    for i, line in _lines(text):
        head, sep, rest = line.partition(":")
        if sep and head.strip().upper() in known and not line.startswith("("):
            current = head.strip().upper()
            if current in out:
                raise FormatError(f"line {i}: duplicate section {current}")
            out[current] = []
            if rest.strip():
                out[current].append((i, rest.strip()))
        elif current is None:
            raise FormatError(f"line {i}: content before the first section")
        else:
            out[current].append((i, line))
    return out


# ---------------------------------------------------------------------------
# Values and tuples


_TUPLE = re.compile(r"\(([^()]*)\)")


def _value(tok: str, line: int) -> Value:
    try:
        t = parse_term(tok)
    except FormulaSyntaxError as e:
        raise FormatError(f"line {line}: bad value {tok!r}: {e}") from None
    if not hasattr(t, "value"):
        raise FormatError(f"line {line}: {tok!r} is not a value")
    return t.value


def _split_values(text: str) -> list[str]:
    """Split on whitespace/commas outside braces."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if depth == 0 and (ch.isspace() or ch == ","):
            if cur:
                out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur:
        out.append(cur)
    return out


def _tuples(text: str, line: int) -> list[tuple]:
    """`(a,b) (c,d)` or plain values `a b c` (1-tuples)."""
    text = text.strip()
    if not text or text == "-":
        return []
    if text.startswith("("):
        found = _TUPLE.findall(text)
        if _TUPLE.sub("", text).strip():
            raise FormatError(f"line {line}: malformed tuple list")
        return [tuple(_value(v, line) for v in _split_values(body)) for body in found]
    return [(_value(v, line),) for v in _split_values(text)]


def _show_tuples(ts: Iterable[tuple]) -> str:
    ts = sorted(ts, key=lambda t: tuple(getattr(a, "code", -1) for a in t))
    if not ts:
        return "-"
    if all(len(t) == 1 for t in ts):
        return " ".join(show_value(t[0]) for t in ts)
    return " ".join("(" + ",".join(show_value(a) for a in t) + ")" for t in ts)


# ---------------------------------------------------------------------------
# TCI files
#
#   SIGMA:
#   R relation 2
#   U: omega mode=subset          (or: U: #0 #1 mode=exact)
#   THETA:
#   R (#2,#3) (#4,#5) mode=subset  (or: R omega mode=subset)
#   THEORY:
#   (forall v0 (not (rel R v0 v0)))
#   THEORY-TAIL: chain R from 6


def _extension(text: str, arity: int, line: int) -> tuple[Extension, str]:
    m = re.search(r"\bmode=(\w+)\s*$", text)
    if not m:
        raise FormatError(f"line {line}: missing mode=subset|exact")
    mode = m.group(1)
    if mode not in (SUBSET, EXACT):
        raise FormatError(f"line {line}: bad mode {mode!r}")
    body = text[:m.start()].strip()
    if re.fullmatch(r"omega(\s+cap=\d+)?", body):
        return Extension.omega(arity), mode
    try:
        return Extension.finite(_tuples(body, line), arity), mode
    except ValueError as e:
        raise FormatError(f"line {line}: {e}") from None


def parse_tci(text: str, name: str = "") -> TCI:
    sec = _sections(text, ("SIGMA", "U", "THETA", "THEORY", "THEORY-TAIL", "NAME"))
    for req in ("SIGMA", "U"):
        if req not in sec:
            raise FormatError(f"missing section {req}:")
    if "NAME" in sec and sec["NAME"]:
        name = sec["NAME"][0][1]
    sigma = []
    for i, line in sec["SIGMA"]:
        parts = line.split()
        if len(parts) not in (2, 3):
            raise FormatError(f"line {i}: expected 'name kind arity'")
        try:
            sigma.append(SymbolId(parts[0], parts[1], int(parts[2]) if len(parts) == 3 else 0))
        except ValueError as e:
            raise FormatError(f"line {i}: {e}") from None
    if len(sec["U"]) != 1:
        raise FormatError("the U: section takes exactly one line")
    i, uline = sec["U"][0]
    cons = {}
    ext, mode = _extension(uline, 1, i)
    cons[U_SYMBOL.name] = Constraint(ext, mode)
    by_name = {s.name: s for s in sigma}
    for i, line in sec.get("THETA", []):
        sym_name, _, rest = line.partition(" ")
        if sym_name not in by_name:
            raise FormatError(f"line {i}: THETA line for undeclared symbol {sym_name!r}")
        if sym_name in cons:
            raise FormatError(f"line {i}: duplicate THETA line for {sym_name}")
        ext, mode = _extension(rest, tuple_length(by_name[sym_name]), i)
        cons[sym_name] = Constraint(ext, mode)
    missing = [s.name for s in sigma if s.name not in cons]
    if missing:
        raise FormatError(f"no THETA line for {', '.join(missing)}")
    theory = []
    for i, line in sec.get("THEORY", []):
        try:
            theory.append(parse(line))
        except FormulaSyntaxError as e:
            raise FormatError(f"line {i}: {e}") from None
    tail = None
    if "THEORY-TAIL" in sec:
        (i, line), = sec["THEORY-TAIL"]
        m = re.fullmatch(r"chain\s+(\S+)\s+from\s+(\d+)", line)
        if not m:
            raise FormatError(f"line {i}: expected 'chain NAME from N'")
        tail = ChainTail(m.group(1), int(m.group(2)))
    try:
        return TCI(tuple(theory), tuple(sigma), U_SYMBOL, cons, tail, name)
    except ValueError as e:
        raise FormatError(str(e)) from None


def _show_extension(c: Constraint) -> str:
    body = "omega" if c.extension.kind == "omega" else _show_tuples(c.extension.tuples)
    return f"{body} mode={c.mode}"


def write_tci(tci: TCI) -> str:
    lines = []
    if tci.name:
        lines.append(f"NAME: {tci.name}")
    lines.append("SIGMA:")
    for s in tci.sigma:
        lines.append(f"{s.name} {s.kind} {s.arity}" if s.kind != "constant" else f"{s.name} constant")
    lines.append("U: " + _show_extension(tci.constraint[tci.u_symbol.name]))
    lines.append("THETA:")
    for s in tci.sigma:
        lines.append(f"{s.name} " + _show_extension(tci.constraint[s.name]))
    lines.append("THEORY:")
    lines += [to_text(phi) for phi in tci.theory]
    if tci.tail is not None:
        lines.append(f"THEORY-TAIL: chain {tci.tail.symbol} from {tci.tail.start}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Poset files
#
#   ELEMENTS: a b c
#   LEQ: (a,c) (b,c)


def parse_poset(text: str, name: str = "") -> Order:
    sec = _sections(text, ("ELEMENTS", "LEQ", "NAME"))
    if "ELEMENTS" not in sec:
        raise FormatError("missing section ELEMENTS:")
    if "NAME" in sec and sec["NAME"]:
        name = sec["NAME"][0][1]
    elements = [tok for _, line in sec["ELEMENTS"] for tok in line.replace(",", " ").split()]
    pairs = []
    for i, line in sec.get("LEQ", []):
        found = _TUPLE.findall(line)
        if _TUPLE.sub("", line).strip():
            raise FormatError(f"line {i}: malformed pair list")
        for body in found:
            parts = [p.strip() for p in body.split(",")]
            if len(parts) != 2:
                raise FormatError(f"line {i}: pairs have two entries")
            pairs.append(tuple(parts))
    try:
        return poset(elements, pairs, name)
    except ValueError as e:
        raise FormatError(str(e)) from None


def write_poset(P: Order) -> str:
    strict = sorted((a, b) for a, b in P.pairs if a != b)
    lines = ["ELEMENTS: " + " ".join(str(e) for e in P.elements)]
    lines.append("LEQ: " + " ".join(f"({a},{b})" for a, b in strict))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Structure files
#
#   BASE: #0 #1 #2
#   INTERP:
#   R relation 2: (#0,#1) (#1,#2)
#   F function 1: (#0,#1) (#1,#1)
#   c constant: #0


def parse_structure(text: str) -> Structure:
    sec = _sections(text, ("BASE", "INTERP"))
    if "BASE" not in sec:
        raise FormatError("missing section BASE:")
    base = [_value(v, i) for i, line in sec["BASE"] for v in _split_values(line)]
    signature, interp = [], {}
    for i, line in sec.get("INTERP", []):
        head, sep, body = line.partition(":")
        if not sep:
            raise FormatError(f"line {i}: expected 'name kind [arity]: tuples'")
        parts = head.split()
        try:
            sym = SymbolId(parts[0], parts[1], int(parts[2]) if len(parts) > 2 else 0)
        except (ValueError, IndexError) as e:
            raise FormatError(f"line {i}: {e}") from None
        signature.append(sym)
        if sym.kind == "constant":
            interp[sym.name] = _value(body.strip(), i)
        else:
            ts = _tuples(body, i)
            if any(len(t) != tuple_length(sym) for t in ts):
                raise FormatError(f"line {i}: tuples for {sym.name} have the wrong length")
            interp[sym.name] = frozenset(ts)
    bset = set(base)
    for name, v in interp.items():
        vals = [v] if not isinstance(v, frozenset) else [a for t in v for a in t]
        if any(a not in bset for a in vals):
            raise FormatError(f"interpretation of {name} leaves the base")
    return Structure(tuple(base), interp, tuple(signature))


def write_structure(A: Structure) -> str:
    lines = ["BASE: " + " ".join(show_value(b) for b in A.base), "INTERP:"]
    for sym in A.signature:
        v = A.interp.get(sym.name)
        if sym.kind == "constant":
            lines.append(f"{sym.name} constant: {show_value(v)}")
        else:
            lines.append(f"{sym.name} {sym.kind} {sym.arity}: {_show_tuples(v or ())}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Condition / Σ files: one literal per line


def parse_condition(text: str) -> frozenset:
    out = []
    for i, line in _lines(text):
        try:
            out.extend(parse_many(line))
        except FormulaSyntaxError as e:
            raise FormatError(f"line {i}: {e}") from None
    return frozenset(out)


def parse_formulas(text: str) -> list:
    out = []
    for i, line in _lines(text):
        try:
            out.extend(parse_many(line))
        except FormulaSyntaxError as e:
            raise FormatError(f"line {i}: {e}") from None
    return out


# ---------------------------------------------------------------------------
# Schedule files: `any LIT...` or `decide LIT` per line


def parse_schedule(text: str) -> list:
    from .sampler import ScheduleEntry

    out = []
    for i, line in _lines(text):
        kind, _, rest = line.partition(" ")
        if kind not in ("any", "decide"):
            raise FormatError(f"line {i}: schedule lines start with 'any' or 'decide'")
        try:
            lits = tuple(parse_many(rest))
        except FormulaSyntaxError as e:
            raise FormatError(f"line {i}: {e}") from None
        if not lits or (kind == "decide" and len(lits) != 1):
            raise FormatError(f"line {i}: 'any' needs literals, 'decide' exactly one")
        out.append(ScheduleEntry(kind, lits))
    return out
