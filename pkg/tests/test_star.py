import random
from itertools import product

from hypothesis import given, settings, strategies as st

from gen import Gen, world

from artifact.semantics import Evaluator, Valuation, sat
from artifact.star import (
    check, classify_star, conv, desugar, dnf, dnf1, extract_pq, in_class_D, max_peelings, pos,
    set_of, sigma1_parts, wnf,
)
from artifact.syntax import Bin, Const, EAtom, Not, parse

W = world(3)
NICE = W.nice()
seeds = st.integers(min_value=0, max_value=10**6)


def _body(phi):
    if classify_star(phi) == "star-Delta0":
        return [], phi
    return sigma1_parts(phi)


def _truths(phi, env=None):
    return [Evaluator(W.A, S, W.lang).holds(phi, env or {}) for S in NICE]


def test_pos_rewrites_negated_sentence_atoms():
    s = W.pairs[0]
    phi = Not(EAtom(Const(s)))
    assert pos(phi) == EAtom(Const(Not(s)))
    assert pos(phi, []) == phi


def test_set_of_reports_positive_and_all_sentences():
    a, b = W.pairs[0], W.pairs[1]
    phi = Bin("and", EAtom(Const(a)), Not(EAtom(Const(b))))
    p, q = set_of(phi)
    assert p == {a} and q == {a, b}


def test_peelings():
    phi = parse("(and (forall-mem v0 #3 (exists-mem v1 #2 (eq v0 v1))) (eq #0 #0))")
    peel = max_peelings(phi)
    assert len(peel.qa) == 2 and len(peel.maximal) == 1


def test_classification():
    assert classify_star(parse("(forall-mem v0 #3 (eq v0 v0))")) == "star-Delta0"
    assert classify_star(parse("(exists v0 (forall-mem v1 v0 (eq v1 v1)))")) == "star-Sigma1"
    assert classify_star(parse("(forall v0 (exists v1 (eq v0 v1)))")) == "star-Pi2"


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_pos_and_wnf_preserve_truth(seed):
    phi = Gen(W, random.Random(seed)).sentence(depth=3, sigma1=False)
    base = _truths(phi)
    assert _truths(pos(phi, W.lang)) == base
    assert _truths(wnf(phi)) == base
    assert _truths(dnf1(phi)) == base
    assert _truths(desugar(phi)) == base


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_dnf_is_in_class_D_and_equivalent(seed):
    phi = Gen(W, random.Random(seed)).sentence(depth=3)
    xs, body = _body(phi)
    for vals in product(W.A.base[:3], repeat=len(xs)):
        nu = Valuation(dict(zip(xs, vals)))
        D = dnf(wnf(body), nu, W.A)
        assert in_class_D(D)
        env = dict(nu.mapping)
        assert _truths(D, env) == _truths(body, env)
        assert _truths(check(D), env) == _truths(dnf(check(wnf(body)), nu, W.A), env)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_conv_preserves_truth_of_sigma1(seed):
    phi = Gen(W, random.Random(seed)).sentence(depth=3, sigma1=True)
    assert _truths(conv(phi, W.lang)) == _truths(phi)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_extraction_is_a_finite_witness(seed):
    rng = random.Random(seed)
    phi = Gen(W, rng).sentence(depth=3, sigma1=True)
    subsets = W.subsets()
    for X in subsets:
        if sat(W.A, X, None, phi, W.lang):
            ex = extract_pq(phi, X, W.A, W.lang)
            assert ex is not None and ex.p == ex.q & X
            for X2 in subsets:
                if X2 & ex.q == ex.p:
                    assert sat(W.A, X2, None, phi, W.lang)
            break
    else:
        X = rng.choice(subsets)
        assert extract_pq(phi, X, W.A, W.lang) is None
