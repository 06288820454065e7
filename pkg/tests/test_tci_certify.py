import pytest

from artifact import fixtures
from artifact.certify import (
    CERTIFIED_WITNESS, REFUTED_EXACT, UNKNOWN, consistent, finitely_consistent, in_P,
    longest_chain_oracle, poset_of,
)
from artifact.hf import HF
from artifact.kernel import enumerate_models
from artifact.syntax import Const, Eq, App, Not, Rel, SymbolId, parse
from artifact.tci import (
    EXACT, SUBSET, TCI, U_SYMBOL, Constraint, Extension, make_codefriendly, model_of,
    models_tci, sigma_of, synth_cert, tci_from_theory,
)


def lit(name, *args):
    return Rel(name, tuple(Const(HF(a)) for a in args))


def test_constraint_checks():
    P = SymbolId("P", "relation", 1)
    with pytest.raises(ValueError):
        TCI((), (P,), U_SYMBOL, {"U": Constraint(Extension.omega(1), EXACT)})
    with pytest.raises(ValueError):
        TCI((parse("(rel P v0)"),), (P,), U_SYMBOL,
            {"U": Constraint(Extension.omega(1), EXACT), "P": Constraint(Extension.omega(1), SUBSET)})
    with pytest.raises(ValueError):
        TCI((parse("(forall v0 (rel Q v0))"),), (P,), U_SYMBOL,
            {"U": Constraint(Extension.omega(1), EXACT), "P": Constraint(Extension.omega(1), SUBSET)})


def test_sub_chain_models_round_trip():
    T = fixtures.fixture("sub-chain3")
    models = enumerate_models(T)
    assert len(models) == 8
    for M in models:
        assert models_tci(M, T)
        assert model_of(T, sigma_of(T, M)) == M


def test_fn_fixture_certified_language():
    T = fixtures.fixture("fn-2-2")
    cert = synth_cert(T)
    assert len(cert.universe) == 2
    assert len(cert.language.sentences) == 2 * (2 + 4)


def test_countercom_oracle_and_subsets():
    T = fixtures.fixture("countercom")
    oracle = longest_chain_oracle(T)
    assert (oracle.longest, oracle.demanded) == (5, 6)
    assert consistent(T, 20).status == REFUTED_EXACT
    one = finitely_consistent(T, 2, cap=20, jobs=1)
    two = finitely_consistent(T, 2, cap=20, jobs=2)
    assert one.holds and [r.verdict.status for r in one.results] == [r.verdict.status for r in two.results]


def test_pigeonhole_is_refuted_exactly():
    assert consistent(fixtures.fixture("injection-3-2")).status == REFUTED_EXACT
    assert consistent(fixtures.fixture("injection-3-2").with_theory(())).certified


def test_conditions_in_P():
    T = fixtures.fixture("singleton-pred")
    assert in_P(T, {lit("P", 0)}).status == CERTIFIED_WITNESS
    assert in_P(T, {lit("P", 0), lit("P", 1)}).status in (REFUTED_EXACT, UNKNOWN)
    assert not in_P(T, {lit("P", 0), Not(lit("P", 0))}).certified


def test_w_order_on_finite_poset():
    T = fixtures.fixture("sub-chain2")
    P = poset_of(T)
    a, b = lit("U", 0), lit("U", 1)
    assert P.w_leq({a, b}, {a})
    assert not P.w_leq({a}, {a, b})
    assert P.is_atom(P.maximal_conditions()[0])


def test_tci_from_theory_and_codefriendly():
    E = SymbolId("E", "relation", 2)
    T = tci_from_theory([parse("(forall v0 (rel E v0 v0))")], [E], 2, name="refl")
    models = enumerate_models(T)
    assert all(models_tci(M, T) for M in models)
    cf = make_codefriendly(fixtures.fixture("fn-2-2"))
    M = enumerate_models(cf.tci)[0]
    assert models_tci(M, cf.tci)


def test_function_graph_literals():
    T = fixtures.fixture("fn-2-2")
    f00 = Eq(App("F", (Const(HF(0)),)), Const(HF(0)))
    f01 = Eq(App("F", (Const(HF(0)),)), Const(HF(1)))
    assert in_P(T, {f00}).certified
    assert not in_P(T, {f00, f01}).certified


def test_fixture_catalogue():
    names = fixtures.names()
    assert {"countercom", "fn-2-2", "singleton-pred", "free-pred"} <= set(names)
    assert all(fixtures.describe(n) for n in names)
    with pytest.raises(KeyError):
        fixtures.fixture("nope")
    assert all(T.finite_scope for T in fixtures.finite_scope_tcis())
