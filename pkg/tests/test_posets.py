import pytest
from hypothesis import given, settings, strategies as st

from artifact.posets import (
    atoms, catalogue, check_embedding, cohen, dense, g_p, generic_filters,
    generic_filters_naive, is_filter, is_separative, maximal_antichains, poset,
    regular_open_algebra, sep_quotient, w_order,
)

CAT5 = catalogue(5)


def test_catalogue_counts():
    assert [len([P for P in catalogue(n) if len(P) == n]) for n in range(6)] == [1, 1, 2, 5, 16, 63]


def test_poset_rejects_cycles():
    with pytest.raises(ValueError):
        poset(("a", "b"), (("a", "b"), ("b", "a")))


def test_separativity_and_quotient():
    V = poset(("a", "b", "t"), (("a", "t"), ("b", "t")))
    assert is_separative(V)
    C = poset(("a", "b"), (("a", "b"),))
    assert not is_separative(C)
    Q, cls = sep_quotient(C)
    assert len(Q) == 1 and cls["a"] == cls["b"]


def test_cohen_tree():
    P = cohen(3)
    assert len(P) == 15
    assert P.leq("01", "0") and not P.compatible("00", "01")
    assert set(generic_filters(P)) == set(generic_filters_naive(P))
    assert set(atoms(P)) == {x for x in P.elements if len(x) == 3}


def test_identity_embeddings():
    P = cohen(2)
    ident = {p: p for p in P.elements}
    for kind in ("plain", "complete", "dense", "weak", "dense-weak"):
        assert check_embedding(ident, P, P, kind)
    with pytest.raises(ValueError):
        check_embedding(ident, P, P, "bogus")


def test_collapsing_map_is_not_an_embedding():
    P = cohen(1)
    squash = {p: "" for p in P.elements}
    assert not check_embedding(squash, P, P)


indices = st.integers(min_value=0, max_value=len(CAT5) - 1)


@settings(max_examples=80)
@given(indices)
def test_w_order_is_idempotent_and_extends_order(i):
    P = CAT5[i]
    W = w_order(P)
    assert W.pairs >= P.pairs
    assert w_order(W).pairs == W.pairs


@settings(max_examples=80)
@given(indices)
def test_generic_filters_agree_with_oracle(i):
    P = CAT5[i]
    fast, naive = generic_filters(P), generic_filters_naive(P)
    assert set(fast) == set(naive)
    for g in fast:
        assert is_filter(P, g)


@settings(max_examples=80)
@given(indices)
def test_atoms_give_generic_filters(i):
    P = CAT5[i]
    for a in atoms(P):
        assert g_p(P, a) in set(generic_filters_naive(P))


@settings(max_examples=40)
@given(indices)
def test_antichains_and_regular_opens(i):
    P = CAT5[i]
    if not len(P):
        return
    for A in maximal_antichains(P):
        assert dense(P, {q for q in P.elements if any(P.leq(q, a) for a in A)})
    ro = regular_open_algebra(P)
    assert frozenset() in ro and frozenset(P.elements) in ro
