"""Property tests over random CFMs, traces and automata."""

import random
from collections import deque

from hypothesis import given
from hypothesis import strategies as st

from mbsync.automata.nfa import EPS, ExplicitNfa, accepts, determinize, emptiness, minimize
from mbsync.corpus import CorpusConfig, random_cfm
from mbsync.decide import check_sync
from mbsync.model import MB, P2P, enabled, is_viable, initial_configuration, parse_action, parse_cfm, render_cfm
from mbsync.msc import equivalent, exchange_from_ms, is_valid, linearizations, ms, msc_of, normalize_exchange
from mbsync.oracle import is_synchronizable_bf, is_synchronizable_by_search, replays

SMALL = CorpusConfig(processes=3, states=3, messages=2, max_transitions=3)
seeds = st.integers(min_value=0, max_value=10**6)


def random_run(seed, net, length):
    rng = random.Random(seed)
    cfm = random_cfm(rng, SMALL)
    conf = initial_configuration(cfm)
    trace = []
    for _ in range(length):
        moves = sorted(enabled(cfm, net, conf), key=lambda x: (str(x[0]), repr(x[1])))
        if not moves:
            break
        a, conf = rng.choice(moves)
        trace.append(a)
    return cfm, tuple(trace)


@given(seeds)
def test_cfm_text_round_trip(seed):
    cfm = random_cfm(random.Random(seed), CorpusConfig())
    again = parse_cfm(render_cfm(cfm))
    assert again.processes == cfm.processes
    assert [set(p.transitions) for p in again.procs] == [set(p.transitions) for p in cfm.procs]


@given(st.sampled_from("pqr"), st.sampled_from("pqr"), st.sampled_from(["a", "msg", "x1"]), st.sampled_from("!?"))
def test_action_text_round_trip(p, q, m, kind):
    if p == q:
        return
    a = parse_action(f"{p}{kind}{q}({m})")
    assert parse_action(str(a)) == a
    if a.is_send:
        assert parse_action(str(a.bar()), allow_barred=True) == a.bar()


@given(seeds, st.integers(min_value=0, max_value=8))
def test_linearizations_of_a_run_are_equivalent_viable_sequences(seed, length):
    _, u = random_run(seed, MB, length)
    m = msc_of(u)
    assert is_valid(m, MB)
    for k, v in enumerate(linearizations(m, MB)):
        assert equivalent(u, v)
        if k == 20:
            break


@given(seeds, st.integers(min_value=0, max_value=7))
def test_factor_criterion_matches_reordering(seed, length):
    _, u = random_run(seed, MB, length)
    assert is_synchronizable_bf(u) == is_synchronizable_by_search(u, exhaustive_cuts=True)


@given(seeds, st.integers(min_value=0, max_value=10))
def test_mb_runs_are_p2p_runs(seed, length):
    cfm, u = random_run(seed, MB, length)
    assert replays(cfm, P2P, u)


@given(seeds)
def test_sync_witness_replays_and_is_confirmed(seed):
    cfm = random_cfm(random.Random(seed), SMALL)
    v = check_sync(cfm)
    if not v.answer:
        assert replays(cfm, MB, v.witness)
        assert not is_synchronizable_bf(v.witness)


@given(seeds)
def test_exchange_round_trip_through_ms(seed):
    rng = random.Random(seed)
    procs = "pqr"
    sends = []
    for _ in range(rng.randint(1, 4)):
        p, q = rng.sample(procs, 2)
        a = parse_action(f"{p}!{q}(m)")
        sends.append(a.bar() if rng.random() < 0.3 else a)
    u = exchange_from_ms(sends)
    if ms(u) == tuple(sends) and is_viable(MB, u):
        assert equivalent(normalize_exchange(u), u)


letters = st.sampled_from("ab")


@st.composite
def nfas(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    trans = draw(st.lists(st.tuples(st.integers(0, n - 1), st.sampled_from(["a", "b", EPS]), st.integers(0, n - 1)), max_size=10))
    finals = draw(st.sets(st.integers(0, n - 1)))
    return ExplicitNfa(range(n), [0], finals, trans, alphabet={"a", "b"})


@given(nfas(), st.lists(st.lists(letters, max_size=6), max_size=15))
def test_minimal_dfa_preserves_language(nfa, words):
    dfa = minimize(determinize(nfa, {"a", "b"}))
    for w in words:
        assert accepts(dfa, w) == accepts(nfa, w)


@given(nfas())
def test_emptiness_returns_a_shortest_word(nfa):
    w = emptiness(nfa)
    shortest = None
    queue = deque([()])
    while queue and shortest is None:
        x = queue.popleft()
        if len(x) > 6:
            break
        if accepts(nfa, list(x)):
            shortest = x
        else:
            queue.extend(x + (a,) for a in "ab")
    if w is None:
        assert shortest is None
    elif shortest is not None:
        assert len(w.word) == len(shortest) and accepts(nfa, list(w.word))


@given(seeds, st.integers(min_value=0, max_value=8))
def test_product_automaton_accepts_marked_runs(seed, length):
    from mbsync.automata.sync import async_product
    from mbsync.msc import mark

    cfm, u = random_run(seed, MB, length)
    assert accepts(async_product(cfm), mark(u))


@given(seeds)
def test_product_automaton_is_r_diamond(seed):
    from mbsync.automata.sync import async_product, check_r_diamond

    assert check_r_diamond(async_product(random_cfm(random.Random(seed), SMALL)))
