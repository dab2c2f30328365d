import pytest

from conftest import load, seq
from mbsync.automata.atomic import AtomicitySummary, atomic_exchange_nfa, list_automata, process_list_automaton
from mbsync.automata.causality import FINAL, HASH, causality_nfa, similarity_nfa, tag_word
from mbsync.automata.exchange import ExchangeMachine
from mbsync.automata.nfa import (
    EPS,
    ExplicitNfa,
    ProductNfa,
    accepts,
    determinize,
    emptiness,
    explore,
    minimize,
    nfa_to_dot,
    parse_nfa,
    render_nfa,
)
from mbsync.automata.sync import async_product, check_r_diamond, exchange_automata, sync_lift
from mbsync.model import ModelError, parse_action
from mbsync.msc import mark, ms


def _nfa(trans, finals, init="0"):
    states = {s for s, _, _ in trans} | {t for _, _, t in trans} | {init}
    return ExplicitNfa(states, [init], set(finals), trans)


def test_accepts_with_epsilon():
    n = _nfa([("0", EPS, "1"), ("1", "a", "2")], {"2"})
    assert accepts(n, ["a"]) and not accepts(n, []) and not accepts(n, ["a", "a"])


def test_determinize_and_minimize_preserve_language():
    n = _nfa([("0", "a", "0"), ("0", "b", "0"), ("0", "b", "1")], {"1"})
    d = minimize(determinize(n, {"a", "b"}))
    assert len(d.states) == 2
    for w in ["", "a", "b", "ab", "ba", "abb"]:
        assert accepts(d, list(w)) == accepts(n, list(w))


def test_emptiness_returns_shortest_word():
    n = _nfa([("0", "a", "1"), ("1", "b", "2"), ("0", "c", "2")], {"2"})
    w = emptiness(n)
    assert w.word == ("c",)
    assert emptiness(_nfa([("0", "a", "1")], set())) is None


def test_nfa_text_round_trip(data_dir):
    for f in sorted((data_dir / "properties").glob("*.nfa")):
        n = parse_nfa(f.read_text())
        again = parse_nfa(render_nfa(n))
        assert again.transitions == n.transitions and again.finals == n.finals
    assert "digraph" in nfa_to_dot(n)


def test_nfa_parse_errors():
    with pytest.raises(ModelError) as e:
        parse_nfa("nfa x\ninit a\na -> b : p!p(m)\n", source="x.nfa")
    assert e.value.line == 3


def test_async_product_is_r_diamond():
    for name in ("nonsync_gadget", "ping_pong", "crossing_loop"):
        assert check_r_diamond(async_product(load(name)))


def test_sync_lift_rejects_non_diamond():
    a, b = parse_action("q?p(m)"), parse_action("r?p(m)")
    n = _nfa([("0", a, "1"), ("1", b, "2")], {"2"})
    with pytest.raises(ValueError):
        sync_lift(n)


def test_exchange_automata_accept_crossing_round():
    cfm = load("crossing_round")
    b, c = exchange_automata(cfm, cfm.initial, set(), ("s2", "s2"), set())
    word = ms(seq("p!q(a) q!p(b) q?p(a) p?q(b)"))
    assert accepts(b, word) and accepts(c, word)


def test_exchange_machine_successors():
    cfm = load("ping_pong")
    em = ExchangeMachine(cfm)
    succ = em.successors(cfm.initial, frozenset())
    assert ((("s1", "s0"), frozenset({"q"}))) in succ
    assert (("s1", "s1"), frozenset()) in succ


def test_atomicity_summary_and_list_automata_agree():
    procs = ("p", "q", "r")
    summ = AtomicitySummary(procs)
    lists = ProductNfa(list_automata(procs))
    for t in [seq("p!q(a) q!p(b) q?p(a) p?q(b)"), seq("p!q(a) q?p(a)"), seq("p!q(a) r!q(b) q?p(a) q?r(b)")]:
        w = ms(t)
        assert summ.accepts(w) == accepts(lists, w)
    assert not summ.accepts(ms(seq("p!q(a) r!p(b) q?p(a) p?r(b)")))


def test_process_list_automaton_runs():
    n = process_list_automaton(("p", "q"), "p")
    assert accepts(n, ms(seq("p!q(a) q!p(b) q?p(a) p?q(b)")))


def test_atomic_exchange_nfa_methods_agree():
    cfm = load("crossing_round")
    for method in ("summary", "labels"):
        n = atomic_exchange_nfa(cfm, cfm.initial, frozenset(), ("s2", "s2"), frozenset(), method=method)
        assert accepts(n, ms(seq("p!q(a) q!p(b) q?p(a) p?q(b)")))


def test_causality_automaton_on_tagged_words():
    # p!q(a) then q!r(b) after q reads a: hb path from the first to the second
    u = mark(seq("p!q(a) q?p(a) q!r(b)"))
    w = tag_word(u, 0, 2)
    assert accepts(causality_nfa(set(u)), w)
    # unrelated sends
    v = mark(seq("p!q(a) r!s(b)"))
    assert not accepts(causality_nfa(set(v)), tag_word(v, 0, 1))


def test_similarity_automaton_finds_gadget_violation():
    u = mark(seq("p!r(d) q!p(d) p?q(d) p!q(d) q?p(d) q!r(d)"))
    r = parse_action("r?q(d)")
    sim = similarity_nfa(r, set(u))
    assert accepts(sim, u)
    assert not accepts(sim, mark(seq("q!r(d)")))
