import pytest
from hypothesis import given, settings, strategies as st

from artifact.hf import HF
from artifact.syntax import (
    Bin, Const, FormulaSyntaxError, Not, Rel, close_under_negation, free_vars, is_nice,
    is_sentence, make_set, neg, parse, to_text,
)

SAMPLES = [
    "(forall v0 (implies (rel P v0) (eq v0 #1)))",
    "(exists v1 (and (mem v1 #3) (not (rel R v1 #0))))",
    "(forall-mem v0 #7 (exists-mem v1 v0 (eq v1 v1)))",
    "(iff (rel P #0) (or (rel P #1) (eq #0 #0)))",
]


@pytest.mark.parametrize("text", SAMPLES)
def test_parse_print_round_trip(text):
    phi = parse(text)
    assert to_text(phi) == text
    assert parse(to_text(phi)) == phi


@pytest.mark.parametrize("bad", ["", "(rel P", "(forall x (rel P x))", "(foo #1)", "(rel P #x)"])
def test_syntax_errors(bad):
    with pytest.raises(FormulaSyntaxError):
        parse(bad)


def test_free_variables():
    phi = parse("(and (rel P v0) (exists v1 (rel R v0 v1)))")
    assert {v.index for v in free_vars(phi)} == {0}
    assert not is_sentence(phi)
    assert is_sentence(parse("(forall v0 (rel P v0))"))


def test_neg_strips_one_negation():
    a = Rel("P", (Const(HF(0)),))
    assert neg(a) == Not(a)
    assert neg(Not(a)) == a


def test_nice_sets():
    a, b = Rel("P", (Const(HF(0)),)), Rel("P", (Const(HF(1)),))
    lang = close_under_negation([a, b])
    assert is_nice({a, Not(b)}, lang)
    assert not is_nice({a}, lang)
    assert not is_nice({a, Not(a), b}, lang)


def test_set_values_collapse_to_hf():
    assert make_set([HF(0)]) == HF(1)


atoms = st.sampled_from(["(rel P #0)", "(rel P v0)", "(eq v0 #2)", "(mem #1 v0)"])


@st.composite
def formulas(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return draw(atoms)
    op = draw(st.sampled_from(["and", "or", "implies", "iff", "not", "forall", "exists"]))
    if op == "not":
        return f"(not {draw(formulas(depth - 1))})"
    if op in ("forall", "exists"):
        return f"({op} v0 {draw(formulas(depth - 1))})"
    return f"({op} {draw(formulas(depth - 1))} {draw(formulas(depth - 1))})"


@settings(max_examples=200)
@given(formulas())
def test_round_trip_property(text):
    phi = parse(text)
    assert to_text(phi) == text
    assert parse(to_text(phi)) == phi
