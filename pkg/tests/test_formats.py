import pytest
from hypothesis import given, settings, strategies as st

from artifact import fixtures
from artifact.formats import (
    FormatError, parse_condition, parse_poset, parse_schedule, parse_structure, parse_tci,
    write_poset, write_structure, write_tci,
)
from artifact.kernel import enumerate_models
from artifact.posets import catalogue
from artifact.tci import TCI

TCI_TEXT = """\
; a free unary predicate
NAME: demo
SIGMA:
P relation 1
U: omega mode=exact
THETA:
P omega mode=subset
THEORY:
(forall v0 (implies (rel P v0) (rel P v0)))
"""


def test_parse_tci():
    T = parse_tci(TCI_TEXT)
    assert T.name == "demo" and [s.name for s in T.sigma] == ["P"]
    assert T.mode("P") == "subset" and T.universe_ext.kind == "omega"
    assert len(T.theory) == 1


@pytest.mark.parametrize("name", [n for n in fixtures.names() if isinstance(fixtures.fixture(n), TCI)])
def test_fixture_tci_round_trip(name):
    T = fixtures.fixture(name)
    again = parse_tci(write_tci(T))
    assert write_tci(again) == write_tci(T)
    assert again.theory == T.theory and again.sigma == T.sigma and again.tail == T.tail
    for name in [T.u_symbol.name] + [s.name for s in T.sigma]:
        assert again.mode(name) == T.mode(name)
        a, b = again.constraint[name].extension, T.constraint[name].extension
        assert a.kind == b.kind and set(a.tuples or ()) == set(b.tuples or ())


@pytest.mark.parametrize("bad", [
    "",
    "SIGMA:\nP relation 1\n",
    "SIGMA:\nP relation 1\nU: omega mode=exact\n",
    "SIGMA:\nP relation 1\nU: omega mode=exact\nTHETA:\nQ omega mode=subset\n",
    "SIGMA:\nP relation 1\nU: omega mode=sideways\nTHETA:\nP omega mode=subset\n",
    "SIGMA:\nP relation 1\nU: omega mode=exact\nTHETA:\nP omega mode=subset\nTHEORY:\n(rel P\n",
    "junk before\nSIGMA:\n",
])
def test_malformed_tci(bad):
    with pytest.raises(FormatError):
        parse_tci(bad)


@settings(max_examples=40)
@given(st.sampled_from(catalogue(4)))
def test_poset_round_trip(P):
    Q = parse_poset(write_poset(P))
    assert len(Q) == len(P)
    strict = lambda X: {(str(a), str(b)) for a, b in X.pairs}
    assert strict(Q) == strict(P)


def test_poset_cycle_is_a_format_error():
    with pytest.raises(FormatError):
        parse_poset("ELEMENTS: a b\nLEQ: (a,b) (b,a)\n")


def test_structure_round_trip():
    for M in enumerate_models(fixtures.fixture("fn-2-2")):
        assert parse_structure(write_structure(M)) == M


def test_structure_outside_base():
    with pytest.raises(FormatError):
        parse_structure("BASE: #0\nINTERP:\nR relation 2: (#0,#1)\n")


def test_condition_and_schedule_files():
    sig = parse_condition("; comment\n(rel P #0)\n(not (rel P #1))\n")
    assert len(sig) == 2
    sched = parse_schedule("decide (rel P #3)\nany (rel P #1) (rel P #2)\n")
    assert [e.kind for e in sched] == ["decide", "any"]
    with pytest.raises(FormatError):
        parse_schedule("maybe (rel P #1)\n")
