"""Named fixture TCIs and posets."""

from __future__ import annotations

from itertools import product
from typing import Callable

from .hf import HF
from .posets import Order, poset
from .semantics import Structure
from .syntax import Bin, Eq, Quant, Rel, SymbolId, Var, parse
from .tci import (
    EXACT, SUBSET, TCI, U_SYMBOL, Constraint, Extension, countercom_fixture, linear_order_axioms,
    tci_from_poset, tci_sub,
)


def _pts(n: int) -> list:
    return [HF(i) for i in range(n)]


def fn_2_2() -> TCI:
    """A unary function on a fixed 2-point universe: the 4 functions 2 -> 2."""
    F = SymbolId("F", "function", 1)
    pts = _pts(2)
    cons = {
        U_SYMBOL.name: Constraint(Extension.finite(((a,) for a in pts), 1), EXACT),
        "F": Constraint(Extension.finite(product(pts, repeat=2), 2), SUBSET),
    }
    return TCI((), (F,), U_SYMBOL, cons, name="fn-2-2")


def _unary_omega(theory: tuple, name: str) -> TCI:
    P = SymbolId("P", "relation", 1)
    cons = {
        U_SYMBOL.name: Constraint(Extension.omega(1), EXACT),
        "P": Constraint(Extension.omega(1), SUBSET),
    }
    return TCI(theory, (P,), U_SYMBOL, cons, name=name)


def singleton_pred() -> TCI:
    """At most one element satisfies P, universe ω."""
    return _unary_omega((parse("(forall v0 (forall v1 (implies (and (rel P v0) (rel P v1)) (eq v0 v1))))"),),
                        "singleton-pred")


def free_pred() -> TCI:
    """A free unary predicate on ω."""
    return _unary_omega((), "free-pred")


def chain_structure(n: int) -> Structure:
    R = SymbolId("R", "relation", 2)
    pts = _pts(n)
    rel = frozenset((a, b) for i, a in enumerate(pts) for b in pts[i + 1:])
    return Structure(tuple(pts), {"R": rel}, (R,))


def sub_chain(n: int) -> TCI:
    """Substructures of an n-chain that are linear orders: all 2^n subsets."""
    return tci_sub(chain_structure(n), linear_order_axioms("R"), name=f"sub-chain{n}")


def injection(kappa: int, mu: int) -> TCI:
    """A total injective relation from a kappa-set into a mu-set."""
    A = SymbolId("A", "relation", 1)
    B = SymbolId("B", "relation", 1)
    I = SymbolId("I", "relation", 2)
    dom = _pts(kappa)
    cod = [HF(kappa + j) for j in range(mu)]
    cons = {
        U_SYMBOL.name: Constraint(Extension.finite(((a,) for a in dom + cod), 1), EXACT),
        "A": Constraint(Extension.finite(((a,) for a in dom), 1), EXACT),
        "B": Constraint(Extension.finite(((b,) for b in cod), 1), EXACT),
        "I": Constraint(Extension.finite(product(dom, cod), 2), SUBSET),
    }
    theory = (
        parse("(forall v0 (implies (rel A v0) (exists v1 (rel I v0 v1))))"),
        parse("(forall v0 (forall v1 (forall v2 (implies (and (rel I v0 v2) (rel I v1 v2)) (eq v0 v1)))))"),
    )
    return TCI(theory, (A, B, I), U_SYMBOL, cons, name=f"injection-{kappa}-{mu}")


def poset_point() -> Order:
    return poset(("a",), (), "point")


def poset_antichain2() -> Order:
    return poset(("a", "b"), (), "antichain2")


def poset_chain2() -> Order:
    return poset(("a", "b"), (("a", "b"),), "chain2")


def poset_vee() -> Order:
    """Two minimal elements below a common top."""
    return poset(("a", "b", "t"), (("a", "t"), ("b", "t")), "vee")


CATALOGUE: dict[str, tuple[str, Callable]] = {
    "countercom": ("linear order with arbitrarily long chains inside short windows (n_max=5)",
                   lambda: countercom_fixture(5)),
    "fn-2-2": ("unary function on a 2-point universe", fn_2_2),
    "singleton-pred": ("at most one P-element, universe ω", singleton_pred),
    "free-pred": ("free unary predicate, universe ω", free_pred),
    "sub-chain2": ("linear-order substructures of a 2-chain", lambda: sub_chain(2)),
    "sub-chain3": ("linear-order substructures of a 3-chain", lambda: sub_chain(3)),
    "injection-3-2": ("injection from 3 points into 2 points (inconsistent)", lambda: injection(3, 2)),
    "poset-point": ("one-element poset", poset_point),
    "poset-antichain2": ("2-element antichain", poset_antichain2),
    "poset-chain2": ("2-element chain", poset_chain2),
    "poset-vee": ("two minimal elements below a top", poset_vee),
    "tci-poset-antichain2": ("generic filters of the 2-antichain as a TCI",
                             lambda: tci_from_poset(poset_antichain2(), "tci-poset-antichain2")),
    "tci-poset-chain2": ("generic filters of the 2-chain as a TCI",
                         lambda: tci_from_poset(poset_chain2(), "tci-poset-chain2")),
    "tci-poset-vee": ("generic filters of the vee as a TCI",
                      lambda: tci_from_poset(poset_vee(), "tci-poset-vee")),
}


def names() -> list[str]:
    return list(CATALOGUE)


def fixture(name: str):
    if name not in CATALOGUE:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(CATALOGUE)}")
    return CATALOGUE[name][1]()


def describe(name: str) -> str:
    return CATALOGUE[name][0]


def finite_scope_tcis() -> list[TCI]:
    out = []
    for name in CATALOGUE:
        obj = fixture(name)
        if isinstance(obj, TCI) and obj.finite_scope:
            out.append(obj)
    return out
