from artifact import fixtures
from artifact.certify import CERTIFIED_EXACT, CERTIFIED_WITNESS, UNKNOWN
from artifact.hf import HF
from artifact.kernel import (
    almost_fin_det, derive, dichotomy, enumerate_models, finitely_determined, kernel,
    least_distinguishing,
)
from artifact.syntax import Const, Not, Rel


def P(n):
    return Rel("P", (Const(HF(n)),))


def test_finite_scope_chain_is_exact():
    chain = derive(fixtures.fixture("fn-2-2"))
    assert chain.status == CERTIFIED_EXACT
    assert chain.fixpoint_stage == 1 and chain.kernel_empty
    assert len(chain.atoms_at(0)) == 4


def test_singleton_chain_shape():
    chain = derive(fixtures.fixture("singleton-pred"), cap=6)
    assert chain.status == CERTIFIED_WITNESS
    assert set(chain.atoms_at(0)) == {frozenset({P(n)}) for n in range(6)}
    assert chain.atoms_at(1) == [frozenset()]
    assert chain.fixpoint_stage == 2


def test_summaries_do_not_depend_on_cap():
    T = fixtures.fixture("singleton-pred")
    assert derive(T, cap=5).summary() == derive(T, cap=9).summary()


def test_free_kernel_is_full():
    K = kernel(fixtures.fixture("free-pred"), cap=8)
    assert K.chain.kernel_is_full
    assert K.contains({P(0), Not(P(1))})
    assert not K.compatible({P(0)}, {Not(P(0))})


def test_stage_cap_zero_is_unknown():
    chain = derive(fixtures.fixture("singleton-pred"), stage_cap=0, cap=5)
    assert not chain.fixpoint and chain.status == UNKNOWN


def test_determination():
    T = fixtures.fixture("singleton-pred")
    models = enumerate_models(T, cap=5)
    assert len(models) == 6
    for M in models:
        v = almost_fin_det(T, M, cap=5)
        assert v.found
        assert v.stage == (1 if not M.interp["P"] else 0)
    empty = next(M for M in models if not M.interp["P"])
    assert not finitely_determined(T, empty, cap=5).found


def test_least_distinguishing_prefers_small_sets():
    sig = frozenset({P(0), Not(P(1))})
    both = frozenset({P(0), P(1)})
    neither = frozenset({Not(P(0)), Not(P(1))})
    assert least_distinguishing(sig, [both], key=repr) == {Not(P(1))}
    assert least_distinguishing(sig, [both, neither], key=repr) == sig
    assert least_distinguishing(sig, [], key=repr) == frozenset()


def test_dichotomy_kinds():
    assert dichotomy(fixtures.fixture("singleton-pred"), caps=(5,)).kind == "all-AFD"
    rep = dichotomy(fixtures.fixture("free-pred"), caps=(5, 8), depth=4)
    assert rep.kind == "perfect-kernel"
    assert all(len(r.tree) == 16 for r in rep.results)
