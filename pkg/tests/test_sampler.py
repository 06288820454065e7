import pytest
from hypothesis import given, settings, strategies as st

from artifact import fixtures
from artifact.hf import HF
from artifact.sampler import (
    BitStream, CapExceeded, NotDense, OffPath, ScheduleEntry, cohen_embed, decode_model,
    least_split, sample_model,
)
from artifact.syntax import Const, Not, Rel
from artifact.tci import models_tci

FREE = fixtures.fixture("free-pred")


def P(n):
    return Rel("P", (Const(HF(n)),))


def test_first_levels_of_pi():
    assert cohen_embed(FREE, "") == frozenset()
    assert cohen_embed(FREE, "1") == {P(0)}
    assert cohen_embed(FREE, "0") == {Not(P(0))}
    assert cohen_embed(FREE, "101") == {P(0), Not(P(1)), P(2)}


def test_bad_bits_rejected():
    with pytest.raises(ValueError):
        cohen_embed(FREE, "012")
    with pytest.raises(ValueError):
        BitStream("10x")
    with pytest.raises(ValueError):
        BitStream()


def test_least_split_follows_forced_literals():
    T = fixtures.fixture("singleton-pred")
    forced = {P(0)} | {Not(P(n)) for n in range(1, 20)}
    assert least_split(T, {P(0)}, target="P") == forced
    assert least_split(T, (), target="P") == frozenset()


def test_explicit_stream_runs_out():
    with pytest.raises(CapExceeded):
        sample_model(FREE, BitStream("10"), 4)


def test_seeded_streams_are_reproducible():
    a = sample_model(FREE, BitStream(seed=42), 8)
    b = sample_model(FREE, BitStream(seed=42), 8)
    assert a == b and len(a.stream_bits) == 8


def test_schedule_decides_a_literal():
    res = sample_model(FREE, BitStream("0000"), 2, [ScheduleEntry("decide", (P(5),))])
    assert P(5) in res.fragment or Not(P(5)) in res.fragment
    assert res.met[0][0] == "decide (rel P #5)"


def test_non_dense_schedule_is_rejected():
    T = fixtures.fixture("singleton-pred")
    with pytest.raises(NotDense):
        sample_model(T, BitStream("1"), 1, [ScheduleEntry("any", (P(7),))], target="P")


def test_finite_scope_samples_are_models():
    T = fixtures.fixture("fn-2-2")
    seen = []
    for bits in ("00", "01", "10", "11"):
        res = sample_model(T, BitStream(bits), 2)
        assert models_tci(res.model, T)
        seen.append(res.model)
    assert all(seen.count(M) == 1 for M in seen)


def test_decode_rejects_contradictions_and_foreign_fragments():
    with pytest.raises(OffPath):
        decode_model(FREE, {P(0), Not(P(0))})
    assert decode_model(FREE, ()) == ""


@settings(max_examples=50, deadline=None)
@given(st.text(alphabet="01", min_size=0, max_size=8))
def test_decode_inverts_sample(bits):
    res = sample_model(FREE, BitStream(bits), len(bits))
    assert decode_model(FREE, res.fragment) == bits


@settings(max_examples=30, deadline=None)
@given(st.text(alphabet="01", min_size=0, max_size=6))
def test_pi_is_monotone_and_siblings_clash(x):
    here = cohen_embed(FREE, x)
    left, right = cohen_embed(FREE, x + "0"), cohen_embed(FREE, x + "1")
    assert here <= left and here <= right
    assert any(Not(s) in right for s in left) or any(Not(s) in left for s in right)
