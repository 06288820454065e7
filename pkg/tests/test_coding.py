import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import C, F, R, fo_sentence

from artifact.coding import (
    CodeWitness, OutOfFragment, SymbolTable, decode_sequence, encode_sequence, f, f_dagger,
    f_dagger_inverse, f_inverse, godel_decode, godel_number,
)
from artifact.hf import HF
from artifact.syntax import Const, Rel, Var, parse

TABLE = SymbolTable.of((R, F, C))


@given(st.lists(st.integers(min_value=0, max_value=10**6), max_size=12))
def test_sequence_coding_round_trip(seq):
    assert decode_sequence(encode_sequence(seq)) == seq


def test_sequence_coding_is_injective_on_small_codes():
    seen = {}
    for code in range(1, 2000):
        try:
            seq = tuple(decode_sequence(code))
        except ValueError:
            continue
        assert seq not in seen
        seen[seq] = code
        assert encode_sequence(list(seq)) == code


@given(st.integers(min_value=0, max_value=1 << 20))
def test_f_is_a_bijection_onto_evens(n):
    assert f(HF(n)) % 2 == 0
    assert f_inverse(f(HF(n))) == HF(n)


def test_f_dagger_tokens():
    for tok in ("not", "and", "forall", "mem", Var(3)):
        code = f_dagger(tok)
        assert code % 2 == 1 and f_dagger_inverse(code) == tok


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_godel_round_trip(seed):
    phi = fo_sentence(random.Random(seed))
    assert godel_decode(godel_number(phi, TABLE), TABLE) == phi


def test_large_literals_are_out_of_fragment():
    with pytest.raises(OutOfFragment):
        godel_number(Rel("R", (Const(HF(1 << 16)), Const(HF(0)))), TABLE)


def test_code_witness_decides_delta0_truth():
    w = CodeWitness()
    t = SymbolTable(())
    assert w.r(godel_number(parse("(mem #0 #1)"), t))
    assert not w.r(godel_number(parse("(mem #1 #1)"), t))
    assert w.r(godel_number(parse("(forall-mem v0 #3 (exists-mem v1 #3 (eq v0 v1)))"), t))
    assert not w.r(godel_number(parse("(exists v0 (mem v0 #1))"), t))
    assert not w.r(12345)


def test_reconstruct_f():
    got = CodeWitness().reconstruct_f(32)
    assert got == {HF(k): 2 * k for k in range(32)}
