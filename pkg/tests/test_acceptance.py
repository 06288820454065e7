"""The ten acceptance criteria, each printing one pass/fail line."""

import random
import time
from itertools import combinations, product

from gen import Gen, R, F, C, fo_sentence, world

from artifact import fixtures
from artifact.certify import (
    CERTIFIED_WITNESS, REFUTED_EXACT, all_literals, certifies, consistent, finitely_consistent,
    longest_chain_oracle, poset_of,
)
from artifact.coding import CodeWitness, SymbolTable, f, godel_decode, godel_number
from artifact.hf import decode_hf, encode_hf, to_frozenset
from artifact.kernel import derive, dichotomy, enumerate_models, kernel
from artifact.posets import (
    LazyTarget, atoms, catalogue, check_embedding, dense_subsets, g_p, generic_filters,
    generic_filters_naive, is_generic, is_separative, sep_quotient, w_order,
)
from artifact.sampler import BitStream, cohen_embed, decode_model, sample_model, streams
from artifact.semantics import Evaluator, Valuation, sat
from artifact.star import (
    check, classify_star, dnf, dnf1, extract_pq, in_class_D, pos, sigma1_parts, wnf,
)
from artifact.syntax import Const, Rel
from artifact.tci import model_of, poset_element_map, sigma_of, synth_cert, tci_from_poset


def test_criterion_01_compactness_failure(criterion):
    start = time.perf_counter()
    T = fixtures.fixture("countercom")
    oracle = longest_chain_oracle(T)
    problems = []
    for cap in (20, 40):
        fc = finitely_consistent(T, 5, cap)
        if not fc.results or any(r.verdict.status != CERTIFIED_WITNESS or r.verdict.witness is None
                                 for r in fc.results):
            problems.append(f"subsets at cap {cap}")
        if consistent(T, cap).status != REFUTED_EXACT:
            problems.append(f"full theory at cap {cap}")
    if oracle is None or oracle.longest != 5 or oracle.demanded != 6:
        problems.append("oracle")
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 10
    criterion(1, "compactness failure (countercom, n_max=5, caps 20/40)", ok,
              f"{len(fc.results)} subsets, {elapsed:.1f}s {' '.join(problems)}".strip())
    assert ok, problems


def test_criterion_02_normal_forms(criterion):
    start = time.perf_counter()
    w = world(4)
    assert len(w.lang.sentences) == 8 and len(w.nice()) == 16
    gen = Gen(w, random.Random(1))
    A, L, nice = w.A, w.lang, w.nice()
    fails: dict[str, int] = {}

    def bump(key: str) -> None:
        fails[key] = fails.get(key, 0) + 1

    for _ in range(500):
        phi = gen.sentence()
        if classify_star(phi) == "star-Delta0":
            xs, body = [], phi
        else:
            xs, body = sigma1_parts(phi)
        W = wnf(body)
        P, N1 = pos(body, L), dnf1(body)
        for vals in product(A.base, repeat=len(xs)):
            nu = Valuation(dict(zip(xs, vals)))
            D = dnf(W, nu, A)
            Dp = dnf(pos(W), nu, A)
            PD = pos(D)
            CD, DC = check(D), dnf(check(W), nu, A)
            if not in_class_D(D):
                bump("dnf shape")
            if dnf1(pos(PD)) != dnf1(pos(Dp)):
                bump("pos/dnf syntactic")
            env = dict(nu.mapping)
            for S in nice:
                ev = Evaluator(A, S, L)
                truth = ev.holds(body, env)
                if truth != ev.holds(P, env):
                    bump("pos")
                if truth != ev.holds(W, env) or truth != ev.holds(N1, env):
                    bump("wnf/dnf1")
                if truth != ev.holds(D, env):
                    bump("dnf")
                if ev.holds(PD, env) != ev.holds(Dp, env):
                    bump("pos/dnf")
                if ev.holds(CD, env) != ev.holds(DC, env):
                    bump("check/dnf")
    elapsed = time.perf_counter() - start
    ok = not fails and elapsed < 30
    criterion(2, "normal-form soundness (|L|=8, 500 sentences, 16 nice Σ)", ok,
              f"{elapsed:.1f}s {fails or ''}".strip())
    assert ok, fails


def test_criterion_03_extraction(criterion):
    w = world(5)
    assert len(w.lang.sentences) == 10
    rng = random.Random(7)
    gen = Gen(w, rng)
    A, L = w.A, w.lang
    subsets = w.subsets()
    done = failures = 0
    while done < 200:
        phi = gen.sentence(sigma1=True)
        witnesses = [X for X in rng.sample(subsets, 32) if sat(A, X, None, phi, L)]
        if not witnesses:
            continue
        ex = extract_pq(phi, witnesses[0], A, L)
        if ex is None or not ex.p <= ex.q:
            failures += 1
            done += 1
            continue
        rest = sorted(L.sentences - ex.q, key=repr)
        for mask in range(1 << len(rest)):
            X2 = ex.p | {s for i, s in enumerate(rest) if mask >> i & 1}
            if not sat(A, X2, None, phi, L):
                failures += 1
                break
        done += 1
    ok = failures == 0
    criterion(3, "Σ1 witness extraction (200 sentences, |L|=10)", ok, f"{failures} failures")
    assert ok


def test_criterion_04_model_fragment_bijection(criterion):
    T = fixtures.fixture("fn-2-2")
    models = enumerate_models(T)
    chain = derive(T)
    atom_list = chain.atoms_at(0)
    P = poset_of(T)
    images = [model_of(T, P.g_union(a)) for a in atom_list]
    bijective = (len(models) == 4 and len(atom_list) == 4
                 and all(images.count(M) == 1 for M in models) and len(images) == 4)
    inverse = all(sigma_of(T, model_of(T, P.g_union(a))) == P.g_union(a) for a in atom_list)
    ok = bijective and inverse and all(P.is_atom(a) for a in atom_list)
    criterion(4, "model/fragment bijection on fn-2-2", ok,
              f"{len(models)} models, {len(atom_list)} atoms")
    assert ok


def test_criterion_05_generic_filters_finite_scope(criterion):
    problems = []
    counts = []
    for T in fixtures.finite_scope_tcis():
        P = poset_of(T)
        cert = synth_cert(T)
        conditions = set(P.elements())
        literals = all_literals(T)
        minimal = [p for p in conditions
                   if not any(l not in p and p | {l} in conditions for l in literals)]
        seen = []
        for m in minimal:
            g = [q for q in conditions if q <= m]
            union = frozenset().union(*g)
            if not certifies(union, cert.gamma, cert.language, cert.structure, ()):
                problems.append(f"{T.name}: ⋃g does not certify ∅")
                continue
            M = model_of(T, union)
            if M in seen:
                problems.append(f"{T.name}: two filters give one model")
            seen.append(M)
        if len(seen) != len(enumerate_models(T)):
            problems.append(f"{T.name}: filter count differs from model count")
        counts.append(f"{T.name}={len(seen)}")
    ok = not problems
    criterion(5, "generic filters give models at finite scope", ok, " ".join(counts))
    assert ok, problems


def test_criterion_06_posets_as_tcis(criterion):
    start = time.perf_counter()
    problems = []
    cat = catalogue(4)
    for P in cat:
        T = tci_from_poset(P)
        m = poset_element_map(P)
        inv = {v: k for k, v in m.items()}
        filters = [frozenset(inv[a] for (a,) in M.interp["G"]) for M in enumerate_models(T)]
        if len(set(filters)) != len(filters) or set(filters) != set(generic_filters_naive(P)):
            problems.append(f"{P.name}: models vs generic filters")
        if not P.elements:
            continue
        Q = poset_of(T)
        pi = {p: frozenset({Rel("G", (Const(m[p]),))}) for p in P.elements}
        target = LazyTarget(Q.leq, Q.compatible, Q.w_leq, tuple(Q.maximal_conditions()))
        if not check_embedding(pi, P, target, "dense-weak"):
            problems.append(f"{P.name}: not a dense-weak embedding")
    elapsed = time.perf_counter() - start
    ok = not problems and len(cat) == 25 and elapsed < 60
    criterion(6, "posets with ≤4 elements as TCIs", ok, f"{len(cat)} posets, {elapsed:.1f}s")
    assert ok, problems


def test_criterion_07_derivative_chain(criterion):
    T = fixtures.fixture("singleton-pred")
    problems = []
    report = dichotomy(T, caps=(5, 10, 20))
    for res in report.results:
        cap, chain = res.cap, res.chain
        want0 = {frozenset({Rel("P", (Const(decode_hf(n)),))}) for n in range(cap)}
        if set(chain.atoms_at(0)) != want0:
            problems.append(f"stage 0 at cap {cap}")
        if chain.atoms_at(1) != [frozenset()]:
            problems.append(f"stage 1 at cap {cap}")
        if not chain.kernel_empty:
            problems.append(f"kernel at cap {cap}")
        if res.kind != "all-AFD":
            problems.append(f"verdict at cap {cap}")
        empty = [st for text, st in res.stages if "rel P" not in text]
        singles = [st for text, st in res.stages if "rel P" in text]
        if empty != [1] or singles != [0] * cap:
            problems.append(f"stages at cap {cap}")
    if not report.identical_across_caps:
        problems.append("caps disagree")
    ok = not problems
    criterion(7, "derivative chain of singleton-pred at caps 5/10/20", ok, " ".join(problems))
    assert ok, problems


def test_criterion_08_perfect_kernel(criterion):
    start = time.perf_counter()
    T = fixtures.fixture("free-pred")
    problems = []
    for cap in (5, 10, 20):
        if not kernel(T, cap).chain.kernel_is_full:
            problems.append(f"kernel not full at cap {cap}")
    tree = {x: cohen_embed(T, x) for d in range(7) for x in streams(1 << d, d)}
    if len(set(tree.values())) != 127:
        problems.append("π not injective")
    from artifact.sampler import splitter

    sp = splitter(T)
    for x in tree:
        if len(x) < 6 and sp.compatible(tree[x + "0"], tree[x + "1"]):
            problems.append(f"siblings below {x!r} compatible")
    frags = {}
    for bits in streams(64, 6):
        res = sample_model(T, BitStream(bits), 6)
        frags[bits] = res.fragment
        if decode_model(T, res.fragment) != bits:
            problems.append(f"decode({bits}) failed")
    if len(set(frags.values())) != 64:
        problems.append("fragments not distinct")
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 10
    criterion(8, "perfect kernel of free-pred", ok, f"{elapsed:.1f}s {' '.join(problems)}".strip())
    assert ok, problems


def test_criterion_09_order_theory(criterion):
    start = time.perf_counter()
    cat = catalogue(5)
    failures = []
    for P in cat:
        W = w_order(P)
        if w_order(W).pairs != W.pairs:
            failures.append(f"{P.name}: w not idempotent")
        if not is_separative(sep_quotient(P)[0]):
            failures.append(f"{P.name}: quotient not separative")
        ds = dense_subsets(P)
        at = atoms(P)
        for a in at:
            if not is_generic(P, g_p(P, a), ds):
                failures.append(f"{P.name}: g_{a} not generic")
        naive = generic_filters_naive(P)
        if set(naive) != set(generic_filters(P)):
            failures.append(f"{P.name}: generic filter enumeration")
        for g in naive:
            if not any(a in g for a in at):
                failures.append(f"{P.name}: generic filter without an atom")
    elapsed = time.perf_counter() - start
    ok = not failures and len(cat) == 88 and elapsed < 60
    criterion(9, "order theory over posets with ≤5 elements", ok, f"{len(cat)} posets, {elapsed:.1f}s")
    assert ok, failures


def test_criterion_10_coding(criterion):
    level: list = []
    for _ in range(5):
        level = [frozenset(c) for k in range(len(level) + 1) for c in combinations(level, k)]
    codes = [encode_hf(x) for x in level]
    hf_ok = sorted(codes) == list(range(1 << 16)) and all(
        to_frozenset(decode_hf(n)) == x for n, x in zip(codes, level))
    table = SymbolTable.of((R, F, C))
    rng = random.Random(3)
    sentences = [fo_sentence(rng) for _ in range(100)]
    gd_ok = all(godel_decode(godel_number(s, table), table) == s for s in sentences)
    recovered = CodeWitness().reconstruct_f(64)
    f_ok = len(recovered) == 64 and all(f(x) == n for x, n in recovered.items())
    ok = hf_ok and gd_ok and f_ok
    criterion(10, "coding layer (HF rank<5, Gd, f from r)", ok,
              f"hf={hf_ok} gd={gd_ok} f={f_ok}")
    assert ok
