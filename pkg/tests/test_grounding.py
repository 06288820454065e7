import random

from hypothesis import given, settings, strategies as st

from gen import fo_sentence

from artifact.grounding import miniscope
from artifact.hf import HF
from artifact.parallel import pmap
from artifact.semantics import Structure, sat
from artifact.syntax import SymbolId

R = SymbolId("R", "relation", 2)
F = SymbolId("F", "function", 1)
C = SymbolId("c", "constant", 0)


def _structure(rng, n):
    base = tuple(HF(i) for i in range(n))
    rel = frozenset((a, b) for a in base for b in base if rng.random() < 0.4)
    fn = frozenset((a, rng.choice(base)) for a in base)
    return Structure(base, {"R": rel, "F": fn, "c": base[0]}, (R, F, C))


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=1, max_value=4))
def test_miniscoping_preserves_truth(seed, n):
    rng = random.Random(seed)
    phi = fo_sentence(rng, depth=4)
    A = _structure(rng, n)
    assert sat(A, (), None, miniscope(phi)) == sat(A, (), None, phi)


def _square(x):
    return x * x


def test_pmap_keeps_order():
    assert pmap(_square, range(10), jobs=1) == pmap(_square, range(10), jobs=3) == [x * x for x in range(10)]
