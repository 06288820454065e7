"""Command-line entry point.

Exit codes: 0 for definite verdicts, 2 for unknown-at-cap, 1 for usage or
format errors.  Reports are deterministic for identical inputs and seeds."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Callable

from . import fixtures as fx
from .certify import (
    UNKNOWN, consistent, finitely_consistent, in_P, show_condition, sort_condition,
)
from .formats import (
    FormatError, parse_condition, parse_formulas, parse_poset, parse_schedule, parse_structure,
    parse_tci, write_poset, write_tci,
)
from .grounding import NotInLanguage
from .kernel import (
    DEFAULT_SEARCH_CAP, DEFAULT_STAGE_CAP, KernelPoset, derive, dichotomy, enumerate_models,
)
from .posets import (
    Order, atoms, generic_filters, is_separative, minimal_elements, sep_quotient, w_classes,
)
from .sampler import BitStream, CapExceeded, NotDense, OffPath, cohen_embed, decode_model, sample_model
from .semantics import sat
from .star import check, classify_star, conv, desugar, dnf, dnf1, pos, wnf
from .syntax import FormulaSyntaxError, canonical, classify, to_text
from .tci import TCI

DEFAULT_CAP = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Reports


class Report:
    def __init__(self, command: str):
        self.fields: dict = {"command": command}
        self.exit = 0
        self.raw: str | None = None

    def add(self, key: str, value) -> None:
        self.fields[key] = value

    def unknown(self) -> None:
        self.exit = 2

    def render(self, fmt: str) -> str:
        if self.raw is not None:
            return self.raw
        if fmt == "structured":
            return json.dumps(self.fields, indent=2, ensure_ascii=False) + "\n"
        lines: list[str] = []
        for k, v in self.fields.items():
            _text(lines, k, v, 0)
        return "\n".join(lines) + "\n"


def _text(lines: list, key: str, v, depth: int) -> None:
    pad = "  " * depth
    if isinstance(v, dict):
        lines.append(f"{pad}{key}:")
        for k, x in v.items():
            _text(lines, k, x, depth + 1)
    elif isinstance(v, list):
        lines.append(f"{pad}{key}: ({len(v)})")
        for x in v:
            if isinstance(x, dict):
                lines.append(f"{pad}  -")
                for k, y in x.items():
                    _text(lines, k, y, depth + 2)
            else:
                lines.append(f"{pad}  {x}")
    elif isinstance(v, str) and "\n" in v:
        lines.append(f"{pad}{key}:")
        lines += [f"{pad}  {line}" for line in v.splitlines()]
    else:
        lines.append(f"{pad}{key}: {v}")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from None


def _digest(*texts: str) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode())
        h.update(b"\0")
    return h.hexdigest()[:16]


def _load_tci(args, rep: Report) -> TCI:
    if getattr(args, "fixture", None):
        obj = fx.fixture(args.fixture)
        if not isinstance(obj, TCI):
            raise FormatError(f"fixture {args.fixture} is not a TCI")
        rep.add("input", f"fixture {args.fixture}")
        rep.add("digest", _digest(write_tci(obj)))
        return obj
    if not getattr(args, "tci", None):
        raise UsageError("give --tci FILE or --fixture NAME")
    text = _read(args.tci)
    rep.add("input", args.tci)
    rep.add("digest", _digest(text))
    return parse_tci(text, name=args.tci)


def _caps(args, rep: Report) -> None:
    caps = {}
    for name in ("cap", "stage_cap", "search_cap"):
        if hasattr(args, name):
            caps[name.replace("_", "-")] = getattr(args, name)
    rep.add("caps", caps)


def _verdict(rep: Report, v) -> None:
    rep.add("verdict", v.status)
    if v.note:
        rep.add("note", v.note)
    if v.witness is not None:
        rep.add("witness", v.witness.describe())
    if v.status == UNKNOWN:
        rep.unknown()


# ---------------------------------------------------------------------------
# Subcommands


NORMALIZE_MODES: dict[str, Callable] = {
    "canonical": canonical,
    "pos": pos,
    "desugar": desugar,
    "dnf1": dnf1,
    "wnf": wnf,
    "dnf": lambda phi: dnf(phi),
    "check": check,
    "conv": conv,
}


def cmd_normalize(args, rep: Report) -> None:
    text = _read(args.formula)
    rep.add("mode", args.mode)
    rep.add("digest", _digest(text))
    out = []
    for phi in parse_formulas(text):
        if args.mode == "classify":
            out.append(f"{classify(phi)} {classify_star(phi)}")
        else:
            out.append(to_text(NORMALIZE_MODES[args.mode](phi)))
    rep.add("results", out)


def cmd_sat(args, rep: Report) -> None:
    stext, ftext = _read(args.structure), _read(args.formula)
    xtext = _read(args.sigma) if args.sigma else ""
    rep.add("digest", _digest(stext, ftext, xtext))
    A = parse_structure(stext)
    X = parse_condition(xtext) if xtext else frozenset()
    rep.add("results", [f"{'true' if sat(A, X, None, phi) else 'false'} {to_text(phi)}"
                        for phi in parse_formulas(ftext)])


def cmd_certify(args, rep: Report) -> None:
    tci = _load_tci(args, rep)
    _caps(args, rep)
    p = parse_condition(_read(args.condition)) if args.condition else frozenset()
    rep.add("condition", show_condition(p))
    _verdict(rep, in_P(tci, p, args.cap))


def cmd_consistency(args, rep: Report) -> None:
    tci = _load_tci(args, rep)
    _caps(args, rep)
    if args.finite is not None:
        fc = finitely_consistent(tci, args.finite, args.cap, args.jobs)
        rep.add("subset-size", args.finite)
        rep.add("subsets", len(fc.results))
        rep.add("verdict", fc.status)
        rep.add("results", [f"{list(r.indices)} {r.verdict.status}" for r in fc.results])
        if fc.status == UNKNOWN:
            rep.unknown()
        return
    _verdict(rep, consistent(tci, args.cap))


def _chain_report(rep: Report, chain, limit: int = 12) -> None:
    stages = []
    for st in chain.stages:
        entry = {"stage": st.index, "nonempty": st.nonempty, "atom-classes": len(st.atoms)}
        reps = []
        for a in st.atoms:
            line = show_condition(a.representative)
            if a.images:
                line += f" ({len(a.images)} images in the window)"
            reps.append(line)
        entry["atoms"] = reps[:limit] + ([f"... {len(reps) - limit} more"] if len(reps) > limit else [])
        stages.append(entry)
    rep.add("scope", chain.scope)
    rep.add("stages", stages)
    rep.add("fixpoint", chain.fixpoint_stage if chain.fixpoint else "not reached")
    if chain.fixpoint:
        rep.add("kernel", "empty" if chain.kernel_empty else
                ("full poset" if chain.kernel_is_full else "nonempty"))
    rep.add("status", chain.status)
    if not chain.fixpoint:
        rep.unknown()


def cmd_derive(args, rep: Report) -> None:
    tci = _load_tci(args, rep)
    _caps(args, rep)
    _chain_report(rep, derive(tci, args.stage_cap, args.search_cap, args.cap))


def cmd_kernel(args, rep: Report) -> None:
    tci = _load_tci(args, rep)
    _caps(args, rep)
    chain = derive(tci, args.stage_cap, args.search_cap, args.cap)
    _chain_report(rep, chain)
    rep.add("exclusions", len(chain.exclusions))
    if args.condition:
        p = parse_condition(_read(args.condition))
        K = KernelPoset(tci, chain, args.cap)
        rep.add("condition", show_condition(p))
        rep.add("in-kernel", K.contains(p))


def cmd_atoms(args, rep: Report) -> None:
    if args.poset:
        text = _read(args.poset)
        rep.add("digest", _digest(text))
        P = parse_poset(text)
        rep.add("atoms", [str(a) for a in atoms(P)])
        return
    tci = _load_tci(args, rep)
    _caps(args, rep)
    chain = derive(tci, args.stage_cap, args.search_cap, args.cap)
    rep.add("scope", chain.scope)
    rep.add("atoms", [show_condition(m) for m in chain.atoms_at(0)])
    if chain.scope != "finite":
        rep.add("status", chain.status)
        if not chain.fixpoint:
            rep.unknown()


def cmd_dichotomy(args, rep: Report) -> None:
    tci = _load_tci(args, rep)
    caps = [int(c) for c in args.caps.split(",")]
    rep.add("caps", {"caps": caps, "stage-cap": args.stage_cap, "search-cap": args.search_cap,
                     "depth": args.depth})
    d = dichotomy(tci, caps, args.depth, args.stage_cap, args.search_cap)
    per = []
    for r in d.results:
        entry = {"cap": r.cap, "kind": r.kind}
        if r.kind == "all-AFD":
            entry["models"] = len(r.stages)
            entry["stages"] = sorted({s for _, s in r.stages})
        elif r.kind == "perfect-kernel":
            entry["depth"] = r.depth
            entry["incompatible-leaves"] = len(r.tree)
        per.append(entry)
    rep.add("results", per)
    rep.add("verdict", d.kind)
    rep.add("identical-across-caps", d.identical_across_caps)
    if d.kind not in ("all-AFD", "perfect-kernel"):
        rep.unknown()


def cmd_enumerate(args, rep: Report) -> None:
    tci = _load_tci(args, rep)
    _caps(args, rep)
    models = enumerate_models(tci, args.cap, args.limit)
    rep.add("count", len(models))
    if args.limit is not None and len(models) >= args.limit:
        rep.add("note", f"stopped at limit {args.limit}")
    rep.add("models", [m.describe() for m in models])
    if not tci.finite_scope:
        rep.add("status", "within cap window")


def cmd_embed(args, rep: Report) -> None:
    tci = _load_tci(args, rep)
    _caps(args, rep)
    rep.add("bits", args.bits)
    rep.add("condition", [to_text(s) for s in sort_condition(
        cohen_embed(tci, args.bits, args.search_cap, args.cap, args.stage_cap))])


def cmd_sample(args, rep: Report) -> None:
    tci = _load_tci(args, rep)
    _caps(args, rep)
    schedule = parse_schedule(_read(args.schedule)) if args.schedule else []
    stream = BitStream(bits=args.bits) if args.bits is not None else BitStream(seed=args.seed)
    rep.add("seed", args.seed if args.bits is None else None)
    rep.add("steps", args.steps)
    r = sample_model(tci, stream, args.steps, schedule, args.cap, args.stage_cap, args.search_cap)
    rep.add("stream-bits", r.stream_bits)
    rep.add("path", r.path)
    rep.add("met", [f"{d} by {lit}" for d, lit in r.met])
    rep.add("fragment", [to_text(s) for s in r.literals()])
    if r.model is not None:
        rep.add("model", r.model.describe())
    rep.add("decoded", decode_model(tci, r.fragment, args.search_cap, args.cap, args.stage_cap))


def cmd_poset(args, rep: Report) -> None:
    if args.fixture:
        P = fx.fixture(args.fixture)
        if not isinstance(P, Order):
            raise FormatError(f"fixture {args.fixture} is not a poset")
        text = write_poset(P)
    else:
        if not args.poset:
            raise UsageError("give --poset FILE or --fixture NAME")
        text = _read(args.poset)
        P = parse_poset(text)
    rep.add("digest", _digest(text))
    rep.add("elements", [str(e) for e in P.elements])
    rep.add("separative", is_separative(P))
    rep.add("w-classes", ["{" + ",".join(map(str, c)) + "}" for c in w_classes(P)])
    Q, _ = sep_quotient(P)
    rep.add("quotient-size", len(Q))
    rep.add("atoms", [str(a) for a in atoms(P)])
    rep.add("minimal", [str(a) for a in minimal_elements(P)])
    rep.add("generic-filters", ["{" + ",".join(str(e) for e in P.elements if e in g) + "}"
                                for g in generic_filters(P)])


def cmd_fixtures(args, rep: Report) -> None:
    if args.action == "list":
        rep.add("fixtures", [f"{n}: {fx.describe(n)}" for n in fx.names()])
        return
    if not args.name:
        raise UsageError("fixtures show needs a NAME")
    obj = fx.fixture(args.name)
    text = write_tci(obj) if isinstance(obj, TCI) else write_poset(obj)
    if args.format == "text":
        rep.raw = text
        return
    rep.add("name", args.name)
    rep.add("file", text)


# ---------------------------------------------------------------------------
# Parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--jobs", type=int, default=1)


def _tci_args(p, caps: bool = True, stage: bool = False) -> None:
    p.add_argument("--tci", help="TCI file")
    p.add_argument("--fixture", help="named fixture instead of a file")
    if caps:
        p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    if stage:
        p.add_argument("--stage-cap", type=int, default=DEFAULT_STAGE_CAP)
        p.add_argument("--search-cap", type=int, default=DEFAULT_SEARCH_CAP)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="artifact", description="Forcing with language fragments at desk scale.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("normalize", help="normal forms of formulas")
    p.add_argument("--mode", choices=sorted(NORMALIZE_MODES) + ["classify"], required=True)
    p.add_argument("--formula", required=True)
    _common(p)
    p.set_defaults(run=cmd_normalize)

    p = sub.add_parser("sat", help="truth in a finite structure")
    p.add_argument("--structure", required=True)
    p.add_argument("--sigma", help="Σ file interpreting E")
    p.add_argument("--formula", required=True)
    _common(p)
    p.set_defaults(run=cmd_sat)

    p = sub.add_parser("certify", help="is a condition in P(T)")
    _tci_args(p)
    p.add_argument("--condition")
    _common(p)
    p.set_defaults(run=cmd_certify)

    p = sub.add_parser("consistency", help="consistency of a TCI")
    _tci_args(p)
    p.add_argument("--finite", type=int, help="check every theory subset of this size or less")
    _common(p)
    p.set_defaults(run=cmd_consistency)

    p = sub.add_parser("atoms", help="atoms of a poset or of P(T)")
    _tci_args(p, stage=True)
    p.add_argument("--poset")
    _common(p)
    p.set_defaults(run=cmd_atoms)

    for name, fn, help_ in (("derive", cmd_derive, "derivative chain"),
                            ("kernel", cmd_kernel, "the fixpoint kernel")):
        p = sub.add_parser(name, help=help_)
        _tci_args(p, stage=True)
        if name == "kernel":
            p.add_argument("--condition")
        _common(p)
        p.set_defaults(run=fn)

    p = sub.add_parser("dichotomy", help="all almost finitely determined or a perfect kernel")
    _tci_args(p, caps=False, stage=True)
    p.add_argument("--caps", default=str(DEFAULT_CAP))
    p.add_argument("--depth", type=int, default=6)
    _common(p)
    p.set_defaults(run=cmd_dichotomy)

    p = sub.add_parser("enumerate-models", help="models inside the cap window")
    _tci_args(p)
    p.add_argument("--limit", type=int)
    _common(p)
    p.set_defaults(run=cmd_enumerate)

    p = sub.add_parser("embed-cohen", help="π(x) for a bit string x")
    _tci_args(p, stage=True)
    p.add_argument("--bits", required=True)
    _common(p)
    p.set_defaults(run=cmd_embed)

    p = sub.add_parser("sample-generic", help="generic model prefix from a bit stream")
    _tci_args(p, stage=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bits")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--schedule")
    _common(p)
    p.set_defaults(run=cmd_sample)

    p = sub.add_parser("poset", help="order-theoretic summary of a poset")
    p.add_argument("--poset")
    p.add_argument("--fixture")
    _common(p)
    p.set_defaults(run=cmd_poset)

    p = sub.add_parser("fixtures", help="the fixture catalogue")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    _common(p)
    p.set_defaults(run=cmd_fixtures)
    return parser


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        for name in ("cap", "stage_cap", "search_cap", "jobs", "depth", "steps"):
            if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
                raise UsageError(f"--{name.replace('_', '-')} must be non-negative")
        rep = Report(args.command)
        args.run(args, rep)
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        return 1
    except (FormatError, FormulaSyntaxError, NotInLanguage, KeyError, OffPath, NotDense) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        err.write(f"error: {msg}\n")
        return 1
    except CapExceeded as e:
        rep.add("verdict", UNKNOWN)
        rep.add("note", str(e))
        out.write(rep.render(args.format))
        return 2
    out.write(rep.render(args.format))
    return rep.exit


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
