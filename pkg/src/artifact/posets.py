"""Order theory on finite posets: w-order, separative quotient, atoms, g_p,
generic filters, embeddings, Cohen forcing and an isomorphism-type catalogue."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations, product
from typing import Callable, Iterable, Mapping, Protocol


@dataclass(frozen=True)
class Order:
    """A finite preorder given by its elements and the set of pairs (a, b)
    with a <= b.  `Poset` is the antisymmetric case."""

    elements: tuple
    pairs: frozenset
    name: str = ""

    def leq(self, a, b) -> bool:
        return (a, b) in self.pairs

    @cached_property
    def below(self) -> dict:
        out: dict = {e: set() for e in self.elements}
        for a, b in self.pairs:
            out[b].add(a)
        return {e: tuple(x for x in self.elements if x in out[e]) for e in self.elements}

    @cached_property
    def above(self) -> dict:
        out: dict = {e: set() for e in self.elements}
        for a, b in self.pairs:
            out[a].add(b)
        return {e: tuple(x for x in self.elements if x in out[e]) for e in self.elements}

    def compatible(self, a, b) -> bool:
        bb = set(self.below[b])
        return any(c in bb for c in self.below[a])

    def is_antisymmetric(self) -> bool:
        return all(not ((b, a) in self.pairs) or a == b for a, b in self.pairs)

    def __len__(self) -> int:
        return len(self.elements)


Poset = Order


def poset(elements: Iterable, pairs: Iterable, name: str = "", check: bool = True) -> Order:
    """Reflexive-transitive closure of `pairs`; antisymmetry is validated."""
    elements = tuple(elements)
    if len(set(elements)) != len(elements):
        raise ValueError("duplicate elements")
    eset = set(elements)
    rel = {(a, a) for a in elements}
    for a, b in pairs:
        if a not in eset or b not in eset:
            raise ValueError(f"pair ({a}, {b}) mentions an unknown element")
        rel.add((a, b))
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in product(list(rel), list(rel)):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    P = Order(elements, frozenset(rel), name)
    if check and not P.is_antisymmetric():
        raise ValueError("relation is not antisymmetric")
    return P


# ---------------------------------------------------------------------------
# Density, w-order, separativity


def dense(P: Order, D: Iterable) -> bool:
    D = set(D)
    return all(any(d in D for d in P.below[p]) for p in P.elements)


def dense_below(P: Order, D: Iterable, p) -> bool:
    D = set(D)
    return all(any(d in D for d in P.below[r]) for r in P.below[p])


def w_order(P: Order) -> Order:
    pairs = set()
    for p in P.elements:
        for q in P.elements:
            cone = set(P.below[q])
            if all(any(s in cone for s in P.below[r]) for r in P.below[p]):
                pairs.add((p, q))
    return Order(P.elements, frozenset(pairs), P.name)


def is_separative(P: Order) -> bool:
    return w_order(P).pairs == P.pairs


def w_classes(P: Order) -> list[tuple]:
    W = w_order(P)
    classes: list[list] = []
    for p in P.elements:
        for c in classes:
            if W.leq(p, c[0]) and W.leq(c[0], p):
                c.append(p)
                break
        else:
            classes.append([p])
    return [tuple(c) for c in classes]


def sep_quotient(P: Order) -> tuple[Order, dict]:
    """(w(P)/~, map element -> class)."""
    W = w_order(P)
    classes = w_classes(P)
    cls_of = {p: c for c in classes for p in c}
    pairs = {(a, b) for a in classes for b in classes if W.leq(a[0], b[0])}
    return Order(tuple(classes), frozenset(pairs), P.name), cls_of


# ---------------------------------------------------------------------------
# Atoms, filters, genericity


def is_atom(P: Order, p) -> bool:
    below = P.below[p]
    return all(P.compatible(a, b) for a, b in combinations(below, 2))


def atoms(P: Order) -> list:
    return [p for p in P.elements if is_atom(P, p)]


def minimal_elements(P: Order) -> list:
    return [p for p in P.elements if P.below[p] == (p,)]


def g_p(P: Order, p) -> frozenset:
    if not is_atom(P, p):
        raise ValueError(f"{p!r} is not an atom")
    return frozenset(q for q in P.elements if P.compatible(p, q))


def is_filter(P: Order, F: Iterable) -> bool:
    F = set(F)
    if not F:
        return False
    for a in F:
        if any(b not in F for b in P.above[a]):
            return False
    for a, b in combinations(F, 2):
        if not any(c in F for c in P.below[a] if P.leq(c, b)):
            return False
    return True


def meets(P: Order, g: Iterable, D: Iterable) -> bool:
    """g meets D: g hits D or a condition with no extension in D."""
    g, D = set(g), set(D)
    return any(p in D or not any(q in D for q in P.below[p]) for p in g)


def dense_subsets(P: Order) -> list[frozenset]:
    els = P.elements
    out = []
    for mask in range(1 << len(els)):
        D = frozenset(e for i, e in enumerate(els) if mask >> i & 1)
        if dense(P, D):
            out.append(D)
    return out


def is_generic(P: Order, g: Iterable, dense_sets: Iterable | None = None) -> bool:
    g = frozenset(g)
    if not is_filter(P, g):
        return False
    for D in (dense_subsets(P) if dense_sets is None else dense_sets):
        if not g & set(D):
            return False
    return True


def generic_filters(P: Order) -> list[frozenset]:
    """Generic filters of a finite poset: the principal filters of its minimal
    elements."""
    return [frozenset(P.above[m]) for m in minimal_elements(P)]


def generic_filters_naive(P: Order) -> list[frozenset]:
    """Exhaustive oracle: every subset that is a filter meeting all dense sets."""
    ds = dense_subsets(P)
    els = P.elements
    out = []
    for mask in range(1, 1 << len(els)):
        g = frozenset(e for i, e in enumerate(els) if mask >> i & 1)
        if is_generic(P, g, ds):
            out.append(g)
    return out


# ---------------------------------------------------------------------------
# Embeddings


class OrderLike(Protocol):
    def leq(self, a, b) -> bool: ...
    def compatible(self, a, b) -> bool: ...


@dataclass
class LazyTarget:
    """Target poset given by predicates: `w_leq` and `compatible`, plus a
    coinitial family (every condition has one of them below it) for density."""

    leq: Callable
    compatible: Callable
    w_leq: Callable
    coinitial: tuple


def check_embedding(pi: Mapping, P: Order, Q, kind: str = "plain") -> bool:
    if kind not in ("plain", "complete", "dense", "weak", "dense-weak"):
        raise ValueError(f"unknown embedding kind {kind!r}")
    els = P.elements
    if isinstance(Q, Order):
        WQ = w_order(Q) if kind in ("weak", "dense-weak") else Q
        q_leq, q_comp = WQ.leq, Q.compatible
        q_elements = Q.elements
        coinitial = minimal_elements(Q) if kind in ("dense", "dense-weak") else ()
    else:
        q_leq = Q.w_leq if kind in ("weak", "dense-weak") else Q.leq
        q_comp = Q.compatible
        q_elements = None
        coinitial = Q.coinitial
    p_leq = w_order(P).leq if kind in ("weak", "dense-weak") else P.leq
    if len({_frozen(pi[p]) for p in els}) != len(els):
        return False
    for a in els:
        for b in els:
            if p_leq(a, b) != q_leq(pi[a], pi[b]):
                return False
            if not P.compatible(a, b) and q_comp(pi[a], pi[b]):
                return False
    if kind == "complete":
        for A in maximal_antichains(P):
            if q_elements is None:
                raise ValueError("complete embeddings need an explicit target")
            image = [pi[a] for a in A]
            if any(all(not q_comp(q, x) for x in image) for q in q_elements):
                return False
    if kind in ("dense", "dense-weak"):
        for q in coinitial:
            if not any(q_leq(pi[p], q) for p in els):
                return False
    return True


def _frozen(x):
    return frozenset(x) if isinstance(x, (set, list)) else x


def maximal_antichains(P: Order) -> list[tuple]:
    els = P.elements
    anti = []
    for r in range(1, len(els) + 1):
        for A in combinations(els, r):
            if all(not P.compatible(a, b) for a, b in combinations(A, 2)):
                anti.append(A)
    out = []
    for A in anti:
        if all(any(P.compatible(x, a) for a in A) for x in els):
            out.append(A)
    return out


# ---------------------------------------------------------------------------
# Cohen forcing, catalogue, regular open algebra


def cohen(depth: int) -> Order:
    """Binary strings of length <= depth ordered by reverse extension."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    els = [""]
    for d in range(1, depth + 1):
        els += ["".join(bits) for bits in product("01", repeat=d)]
    pairs = frozenset((s, t) for s in els for t in els if s.startswith(t))
    return Order(tuple(els), pairs, f"cohen-{depth}")


def _canonical_edges(n: int, edges: frozenset) -> tuple:
    best = None
    for perm in permutations(range(n)):
        key = tuple(sorted((perm[a], perm[b]) for a, b in edges))
        if best is None or key < best:
            best = key
    return best


def catalogue(max_size: int) -> list[Order]:
    """One poset per isomorphism type with at most `max_size` elements
    (including the empty poset), elements 0..n-1."""
    out = []
    for n in range(max_size + 1):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        seen = set()
        for mask in range(1 << len(pairs)):
            edges = frozenset(p for k, p in enumerate(pairs) if mask >> k & 1)
            if any((a, b) in edges and (b, c) in edges and (a, c) not in edges
                   for a, b in edges for c in range(n)):
                continue
            key = _canonical_edges(n, edges)
            if key in seen:
                continue
            seen.add(key)
            rel = frozenset(set(key) | {(i, i) for i in range(n)})
            out.append(Order(tuple(range(n)), rel, f"P{n}-{len(seen)}"))
    return out


def regular_open_algebra(P: Order) -> list[frozenset]:
    """Regular open sets of a finite poset (down-sets U equal to
    {p : U is dense below p})."""
    els = P.elements
    out = []
    for mask in range(1 << len(els)):
        U = frozenset(e for i, e in enumerate(els) if mask >> i & 1)
        if any(q not in U for p in U for q in P.below[p]):
            continue
        reg = frozenset(p for p in els if all(any(s in U for s in P.below[r]) for r in P.below[p]))
        if reg == U:
            out.append(U)
    return out
