from hypothesis import given, strategies as st

from artifact.hf import HF, EMPTY, decode_hf, encode_hf, from_frozenset, hf_set, to_frozenset, universe_size


def test_small_codes():
    assert EMPTY == HF(0) and len(EMPTY) == 0
    assert hf_set([EMPTY]) == HF(1)
    assert hf_set([HF(1)]) == HF(2)
    assert hf_set([EMPTY, HF(1)]) == HF(3)
    assert HF(0) in HF(3) and HF(1) in HF(3) and HF(2) not in HF(3)


def test_rank_and_universe_sizes():
    assert [universe_size(r) for r in range(5)] == [0, 1, 2, 4, 16]
    assert HF(0).rank() == 0 and HF(1).rank() == 1 and HF(2).rank() == 2
    assert max(HF(n).rank() for n in range(16)) == 3


def test_negative_code_rejected():
    import pytest

    with pytest.raises(ValueError):
        HF(-1)
    with pytest.raises(ValueError):
        decode_hf(-3)


@given(st.integers(min_value=0, max_value=1 << 20))
def test_round_trip(n):
    x = decode_hf(n)
    assert encode_hf(x) == n
    assert from_frozenset(to_frozenset(x)) == x


@given(st.lists(st.integers(min_value=0, max_value=64), max_size=6))
def test_membership_matches_construction(codes):
    x = hf_set(HF(c) for c in codes)
    assert set(x.elements()) == {HF(c) for c in codes}
    assert all(HF(c) in x for c in codes)
