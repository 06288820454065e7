"""Cantor-Bendixson derivatives of P(T): atoms stage by stage, the fixpoint
kernel P(T)^⊤, (almost) finitely determined models, model enumeration and
the countable/perfect dichotomy."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Iterable

from .certify import (
    CERTIFIED_EXACT, CERTIFIED_WITNESS, UNKNOWN, condition_elements, engine,
    longest_chain_oracle, show_condition, sort_condition,
)
from .coding import godel_number, table_for_tci
from .hf import HF
from .semantics import Structure
from .syntax import Const, Eq, Formula, Not, Rel, App, neg, to_text
from .tci import TCI, sigma_of, structure_from_fragment

DEFAULT_STAGE_CAP = 8
DEFAULT_SEARCH_CAP = 64
MAX_PATTERN_SUPPORT = 2


@dataclass(frozen=True)
class AtomClass:
    representative: frozenset
    stage: int
    model: frozenset | None = None
    images: tuple = ()

    def members(self) -> tuple:
        """The reported atoms: the representative or its images in the window."""
        return self.images if self.images else (self.representative,)


@dataclass(frozen=True)
class Stage:
    index: int
    nonempty: bool
    atoms: tuple
    surviving: int | None = None


@dataclass(frozen=True)
class DerivativeChain:
    tci_name: str
    scope: str
    cap: int
    stage_cap: int
    search_cap: int
    stages: tuple
    fixpoint_stage: int | None
    exclusions: tuple = field(default_factory=tuple)

    @property
    def fixpoint(self) -> bool:
        return self.fixpoint_stage is not None

    @property
    def kernel_empty(self) -> bool | None:
        if not self.fixpoint:
            return None
        return not self.stages[self.fixpoint_stage].nonempty

    @property
    def kernel_is_full(self) -> bool:
        return self.fixpoint and self.fixpoint_stage == 0 and self.stages[0].nonempty

    @property
    def status(self) -> str:
        if not self.fixpoint:
            return UNKNOWN
        return CERTIFIED_EXACT if self.scope == "finite" else CERTIFIED_WITNESS

    def atoms_at(self, stage: int) -> list[frozenset]:
        if stage >= len(self.stages):
            return []
        return [m for a in self.stages[stage].atoms for m in a.members()]

    def summary(self) -> tuple:
        """Cap-independent shape: per stage (nonempty, canonical atom reps)."""
        return tuple((s.index, s.nonempty, tuple(show_condition(a.representative) for a in s.atoms))
                     for s in self.stages) + (("fixpoint", self.fixpoint_stage),)


# ---------------------------------------------------------------------------
# helpers


def _gd_key(tci: TCI):
    table = table_for_tci(tci)
    cache: dict = {}

    def key(lit: Formula) -> int:
        if lit not in cache:
            cache[lit] = godel_number(lit, table)
        return cache[lit]

    return key


def least_distinguishing(sig: frozenset, others: list, key) -> frozenset:
    """Smallest (then Gd-least) p ⊆ sig with p ⊄ o for every other o."""
    cands = sorted({l for l in sig for o in others if l not in o}, key=key)
    for k in range(0, len(cands) + 1):
        for combo in combinations(cands, k):
            if all(any(l not in o for l in combo) for o in others):
                return frozenset(combo)
    raise ValueError("models are not distinguishable")


class _Counter:
    """Model counting (up to 2) under assumptions with blocking via
    activation literals on one persistent solver."""

    def __init__(self, eng, extra: list[list[int]]):
        self.eng = eng
        self.solver = eng.g.new_solver(extra)
        self.top = eng.g.nvars + 1
        self.base = eng.selectors()

    def first(self, lits: list[int]):
        if self.solver.solve(assumptions=self.base + lits):
            return self.eng.g.positive_model(self.solver.get_model())
        return None

    def count2(self, lits: list[int]) -> int:
        m = self.first(lits)
        if m is None:
            return 0
        act = self.top
        self.top += 1
        self.solver.add_clause([-act] + [-l for l in m])
        ok = self.solver.solve(assumptions=self.base + lits + [act])
        self.solver.add_clause([-act])
        return 2 if ok else 1

    def close(self) -> None:
        self.solver.delete()


def _exclusion_clauses(eng, conditions: Iterable[frozenset]) -> list[list[int]]:
    return [[-eng.g.literal(s) for s in sort_condition(q)] for q in conditions]


# ---------------------------------------------------------------------------
# derive


def derive(tci: TCI, stage_cap: int = DEFAULT_STAGE_CAP, search_cap: int = DEFAULT_SEARCH_CAP,
           cap: int = 20) -> DerivativeChain:
    if tci.homogeneous():
        return _derive_homogeneous(tci, stage_cap, search_cap, cap)
    return _derive_enumerated(tci, stage_cap, search_cap, cap)


def _model_fragments(tci: TCI, cap: int, limit: int | None = None) -> list[frozenset]:
    if longest_chain_oracle(tci) is not None:
        return []
    eng = engine(tci, cap)
    return sorted((eng.fragment(m) for m in eng.models(limit=limit)), key=_fragment_key(tci))


def _fragment_key(tci: TCI):
    u = tci.u_symbol.name

    def key(sig: frozenset):
        pos = sorted(to_text(s) for s in sig if not isinstance(s, Not))
        size = sum(1 for s in sig if isinstance(s, Rel) and s.name == u)
        return (size, pos)

    return key


def _derive_enumerated(tci: TCI, stage_cap: int, search_cap: int, cap: int) -> DerivativeChain:
    """Finite scope (exact) or window enumeration (cap-tagged): atoms are the
    isolated models of the surviving set."""
    key = _gd_key(tci)
    surviving = _model_fragments(tci, cap)
    stages, exclusions = [], []
    fix = None
    for alpha in range(stage_cap + 1):
        atoms = []
        for sig in surviving:
            others = [o for o in surviving if o != sig]
            rep = least_distinguishing(sig, others, key)
            atoms.append(AtomClass(rep, alpha, sig))
        stages.append(Stage(alpha, bool(surviving), tuple(atoms), len(surviving)))
        if not atoms:
            fix = alpha
            break
        reps = [a.representative for a in atoms]
        exclusions += reps
        surviving = [s for s in surviving if not any(r <= s for r in reps)]
    scope = "finite" if tci.finite_scope else "window"
    return DerivativeChain(tci.name, scope, cap, stage_cap, search_cap, tuple(stages), fix,
                           tuple(exclusions))


def _support_sentences(eng, k: int) -> list:
    support = {HF(i) for i in range(k)}
    out = []
    for s in eng.g.positives:
        els = condition_elements([s])
        if els <= support:
            out.append(s)
    return out


def _patterns(eng, k: int) -> list[frozenset]:
    """Conditions whose elements are exactly HF(0..k-1)."""
    support = {HF(i) for i in range(k)}
    sents = _support_sentences(eng, k)
    out = []
    for choice in product((0, 1, 2), repeat=len(sents)):
        p = frozenset(s if c == 1 else neg(s) for s, c in zip(sents, choice) if c)
        if condition_elements(p) == support:
            out.append(p)
    return sorted(out, key=lambda p: (len(p), show_condition(p)))


def _rename(p: frozenset, m: dict) -> frozenset:
    def term(t):
        if isinstance(t, Const):
            return Const(m.get(t.value, t.value))
        if isinstance(t, App):
            return App(t.name, tuple(term(a) for a in t.args))
        return t

    def lit(s):
        if isinstance(s, Not):
            return Not(lit(s.body))
        if isinstance(s, Rel):
            return Rel(s.name, tuple(term(a) for a in s.args))
        return Eq(term(s.left), term(s.right))

    return frozenset(lit(s) for s in p)


def _images(p: frozenset, window: tuple) -> list[frozenset]:
    support = sorted(condition_elements(p))
    out = []
    for target in permutations(window, len(support)):
        out.append(_rename(p, dict(zip(support, target))))
    return sorted(set(out), key=show_condition)


def _canonical(p: frozenset) -> str:
    support = sorted(condition_elements(p))
    return min(show_condition(_rename(p, dict(zip(support, perm))))
               for perm in permutations(support))


def _derive_homogeneous(tci: TCI, stage_cap: int, search_cap: int, cap: int) -> DerivativeChain:
    """ω scope, permutation-invariant TCI: atom patterns of support <= 2 are
    tested inside the cap window; found atoms are excluded on all images."""
    eng = engine(tci, cap)
    window = eng.g.universe
    max_k = min(MAX_PATTERN_SUPPORT, max(0, len(window) - 2))
    patterns = [p for k in range(max_k + 1) for p in _patterns(eng, k)][:max(search_cap, 1) * 64]
    stages, exclusions = [], []
    fix = None
    for alpha in range(stage_cap + 1):
        counter = _Counter(eng, _exclusion_clauses(eng, exclusions))
        nonempty = counter.first([]) is not None
        found: list[frozenset] = []
        if nonempty:
            atom_cache: dict = {}

            def is_atom(p: frozenset) -> bool:
                if p not in atom_cache:
                    atom_cache[p] = counter.count2(eng.literals(p)) == 1
                return atom_cache[p]

            seen = set()
            for p in patterns:
                if not is_atom(p):
                    continue
                if any(is_atom(frozenset(q)) for r in range(len(p)) for q in combinations(sort_condition(p), r)):
                    continue
                c = _canonical(p)
                if c not in seen:
                    seen.add(c)
                    found.append(p)
        counter.close()
        atoms = tuple(AtomClass(p, alpha, None, tuple(_images(p, window))) for p in found)
        stages.append(Stage(alpha, nonempty, atoms))
        if not atoms:
            fix = alpha
            break
        for a in atoms:
            exclusions += list(a.images)
    return DerivativeChain(tci.name, "omega-homogeneous", cap, stage_cap, search_cap,
                           tuple(stages), fix, tuple(exclusions))


# ---------------------------------------------------------------------------
# The kernel poset P(T)^⊤


class KernelPoset:
    """Conditions certified with Γ^⊤ (the last stage's exclusions)."""

    def __init__(self, tci: TCI, chain: DerivativeChain, cap: int):
        self.tci = tci
        self.chain = chain
        self.cap = cap
        self._eng = engine(tci, cap)
        self._solver = self._eng.g.new_solver(_exclusion_clauses(self._eng, chain.exclusions))
        self._memo: dict = {}

    def contains(self, p) -> bool:
        p = frozenset(p)
        if p not in self._memo:
            if any(neg(s) in p for s in p):
                self._memo[p] = False
            else:
                lits = self._eng.literals(p)
                self._memo[p] = bool(self._solver.solve(assumptions=self._eng.selectors() + lits))
        return self._memo[p]

    def compatible(self, p, q) -> bool:
        return self.contains(frozenset(p) | frozenset(q))

    def leq(self, p, q) -> bool:
        return frozenset(q) <= frozenset(p)


def kernel(tci: TCI, cap: int = 20, stage_cap: int = DEFAULT_STAGE_CAP,
           search_cap: int = DEFAULT_SEARCH_CAP) -> KernelPoset:
    return KernelPoset(tci, derive(tci, stage_cap, search_cap, cap), cap)


# ---------------------------------------------------------------------------
# Determination


@dataclass(frozen=True)
class DeterminationVerdict:
    found: bool
    stage: int | None
    atom: frozenset | None
    status: str
    cap: int


def _locate(chain: DerivativeChain, sig: frozenset, max_stage: int | None = None):
    for st in chain.stages:
        if max_stage is not None and st.index > max_stage:
            break
        for a in st.atoms:
            for m in a.members():
                if m <= sig:
                    return st.index, m
    return None


def finitely_determined(tci: TCI, M: Structure, cap: int = 20,
                        chain: DerivativeChain | None = None) -> DeterminationVerdict:
    chain = chain or derive(tci, cap=cap)
    sig = sigma_of(tci, M, cap)
    hit = _locate(chain, sig, 0)
    status = CERTIFIED_EXACT if chain.scope == "finite" else UNKNOWN
    if hit:
        return DeterminationVerdict(True, 0, hit[1], CERTIFIED_EXACT if chain.scope == "finite" else CERTIFIED_WITNESS, cap)
    return DeterminationVerdict(False, None, None, status, cap)


def almost_fin_det(tci: TCI, M: Structure, stage_cap: int = DEFAULT_STAGE_CAP, cap: int = 20,
                   chain: DerivativeChain | None = None) -> DeterminationVerdict:
    chain = chain or derive(tci, stage_cap, cap=cap)
    sig = sigma_of(tci, M, cap)
    hit = _locate(chain, sig, stage_cap)
    if hit:
        status = CERTIFIED_EXACT if chain.scope == "finite" else CERTIFIED_WITNESS
        return DeterminationVerdict(True, hit[0], hit[1], status, cap)
    status = CERTIFIED_EXACT if chain.scope == "finite" and chain.fixpoint else UNKNOWN
    return DeterminationVerdict(False, None, None, status, cap)


def enumerate_models(tci: TCI, cap: int = 20, limit: int | None = None) -> list[Structure]:
    """All models inside the cap window, by universe size then lexicographic."""
    return [structure_from_fragment(tci, s) for s in _model_fragments(tci, cap, limit)]


# ---------------------------------------------------------------------------
# Dichotomy


@dataclass(frozen=True)
class DichotomyResult:
    cap: int
    kind: str  # all-AFD | perfect-kernel | undetermined
    chain: DerivativeChain
    stages: tuple = ()  # (model description, stage) for all-AFD
    tree: tuple = ()  # leaves of the splitting tree for perfect-kernel
    depth: int = 0  # requested depth, lowered to the number of window pairs


@dataclass(frozen=True)
class DichotomyReport:
    results: tuple

    @property
    def kind(self) -> str:
        kinds = {r.kind for r in self.results}
        return kinds.pop() if len(kinds) == 1 else "inconsistent-across-caps"

    @property
    def identical_across_caps(self) -> bool:
        return len({(r.kind, r.chain.summary()) for r in self.results}) == 1


def dichotomy(tci: TCI, caps: Iterable[int] = (20,), depth: int = 6,
              stage_cap: int = DEFAULT_STAGE_CAP, search_cap: int = DEFAULT_SEARCH_CAP,
              model_limit: int = 256) -> DichotomyReport:
    from .sampler import cohen_embed, splitter

    out = []
    for cap in caps:
        chain = derive(tci, stage_cap, search_cap, cap)
        if chain.kernel_empty:
            stages = []
            for sig in _model_fragments(tci, cap, model_limit):
                hit = _locate(chain, sig)
                stages.append((show_condition(s for s in sig if not isinstance(s, Not)),
                               hit[0] if hit else None))
            kind = "all-AFD" if all(s is not None for _, s in stages) else "undetermined"
            out.append(DichotomyResult(cap, kind, chain, tuple(stages)))
        elif chain.fixpoint:
            K = KernelPoset(tci, chain, cap)
            k = min(depth, len(splitter(tci, cap, stage_cap, search_cap).pairs))
            leaves = [cohen_embed(tci, "".join(bits), search_cap, cap, stage_cap)
                      for bits in product("01", repeat=k)]
            ok = len(set(leaves)) == len(leaves) and all(
                not K.compatible(a, b) for a, b in combinations(leaves, 2))
            out.append(DichotomyResult(cap, "perfect-kernel" if ok else "undetermined", chain,
                                       (), tuple(leaves), k))
        else:
            out.append(DichotomyResult(cap, "undetermined", chain))
    return DichotomyReport(tuple(out))
