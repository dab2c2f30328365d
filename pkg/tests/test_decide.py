import pytest

from conftest import load, seq
from mbsync.automata.nfa import parse_nfa
from mbsync.decide import Budget, check_ksync, check_mbsim, check_sync, infer_k, model_check, reachable
from mbsync.decide.bench import cycle_nfa, gen_benchmark, letter_nfa
from mbsync.model import MB, P2P, BudgetExceeded
from mbsync.msc import is_synchronous, mark
from mbsync.oracle import exhaustive_verdicts, is_mbsim_bf, is_synchronizable_bf, min_k, reaches, replays

# name -> (synchronizable, mailbox-similar, smallest k); frozen from the engines, cross-checked below
VERDICTS = {
    "late_unmatched_send": (False, None, None),
    "three_process_chain": (True, True, 1),
    "nonsync_gadget": (False, None, None),
    "nonsim_gadget": (True, False, 1),
    "weakly_synchronous": (False, None, None),
    "crossing_round": (True, True, 2),
    "crossing_loop": (False, None, None),
    "ping_pong": (True, True, 1),
    "intersection_pair": (True, True, 1),
    "intersection_pair_nonsync": (False, None, None),
    "intersection_pair_nonsim": (True, False, 1),
    "intersection_empty_nonsync": (True, True, 1),
}


@pytest.mark.parametrize("name", sorted(VERDICTS))
def test_fixture_verdicts(name):
    cfm = load(name)
    sync, sim, k = VERDICTS[name]
    s = check_sync(cfm)
    assert s.answer == sync
    if not sync:
        assert replays(cfm, MB, s.witness) and not is_synchronizable_bf(s.witness)
        return
    m = check_mbsim(cfm)
    assert m.answer == sim
    if not sim:
        assert replays(cfm, P2P, m.witness) and not is_mbsim_bf(m.witness)
    v = infer_k(cfm)
    assert v.answer and v.k == k


@pytest.mark.parametrize("name", ["three_process_chain", "crossing_round", "ping_pong", "nonsim_gadget", "late_unmatched_send", "crossing_loop"])
def test_small_fixtures_match_oracle(name):
    cfm = load(name)
    r = exhaustive_verdicts(cfm, 8)
    s = check_sync(cfm)
    if r.complete:
        assert s.answer == r.sync
    if not r.sync:
        assert not s.answer


def test_ksync_is_monotone_and_matches_infer_k():
    for name in ("crossing_round", "ping_pong", "nonsim_gadget", "intersection_pair"):
        cfm = load(name)
        k = infer_k(cfm).k
        answers = [check_ksync(cfm, j).answer for j in range(1, 4)]
        assert answers == [j >= k for j in range(1, 4)]


def test_ksync_witness_needs_more_sends():
    cfm = load("crossing_round")
    v = check_ksync(cfm, 1)
    assert not v.answer and replays(cfm, MB, v.witness)
    assert min_k(v.witness) == 2


def test_ksync_on_non_synchronizable_cfm():
    v = check_ksync(load("late_unmatched_send"), 3)
    assert not v.answer and v.detail["reason"] == "not synchronizable"
    with pytest.raises(ValueError):
        check_ksync(load("ping_pong"), 0)


def test_reach_witness_is_synchronous_and_reaches_goal():
    cfm = load("intersection_pair")
    goal = tuple("accept" for _ in cfm.processes)
    v = reachable(cfm, goal)
    assert v.answer
    assert is_synchronous(MB, v.witness) and reaches(cfm, v.witness, goal)


def test_reach_unreachable_goal():
    cfm = load("intersection_empty_nonsync")
    goal = list(cfm.initial)
    goal[0], goal[1] = "accept", "accept"
    assert not reachable(cfm, tuple(goal)).answer


def test_intersection_family_reachability_follows_language():
    # the ring reaches all-accept iff the NFAs share a word
    same = gen_benchmark([letter_nfa("ab"), letter_nfa("ab")])
    diff = gen_benchmark([letter_nfa("ab"), letter_nfa("ba")])
    for cfm, want in ((same, True), (diff, False)):
        goal = tuple("accept" for _ in cfm.processes)
        assert reachable(cfm, goal).answer == want


def test_bounded_engine_agrees_where_it_finds_witnesses():
    for name in ("late_unmatched_send", "nonsync_gadget", "weakly_synchronous", "crossing_loop"):
        cfm = load(name)
        v = check_sync(cfm, engine="bounded")
        assert not v.answer and replays(cfm, MB, v.witness) and not is_synchronizable_bf(v.witness)
    # yes from the bounded engine only means nothing was found within the bounds
    v = check_sync(load("intersection_pair_nonsync"), engine="bounded", max_sends=4)
    assert v.answer and v.detail["complete"] is False


def test_exact_witness_is_not_longer_than_bounded():
    for name in ("nonsync_gadget", "weakly_synchronous"):
        cfm = load(name)
        e, b = check_sync(cfm), check_sync(cfm, engine="bounded")
        assert sum(a.is_send for a in e.witness) <= sum(a.is_send for a in b.witness)


def test_budget_is_enforced():
    cfm = gen_benchmark([cycle_nfa(16), cycle_nfa(16)])
    with pytest.raises(BudgetExceeded):
        check_sync(cfm, budget=Budget(states=20))
    with pytest.raises(ValueError):
        check_sync(cfm, engine="psychic")


def _prop(text):
    return parse_nfa(text)


NO_UNMATCHED_PING = """nfa no_unmatched_ping
init s
final s
s -> s : p!q(ping)
s -> s : q?p(ping)
s -> s : q!p(pong)
s -> s : p?q(pong)
s -> s : q!!p(pong)
"""

EVERYTHING = NO_UNMATCHED_PING.replace("no_unmatched_ping", "anything") + "s -> s : p!!q(ping)\n"


def test_model_check_ping_pong():
    cfm = load("ping_pong")
    assert model_check(cfm, _prop(EVERYTHING)).answer
    v = model_check(cfm, _prop(NO_UNMATCHED_PING))
    assert not v.answer
    assert is_synchronous(MB, v.witness) and replays(cfm, MB, v.witness)
    assert any(a.barred for a in mark(v.witness))


def test_model_check_rejects_non_r_closed():
    prop = _prop("""nfa order
init a
final c
a -> b : U?p(m)
b -> c : V?p(m)
""")
    cfm = load("ping_pong")
    with pytest.raises(ValueError):
        model_check(cfm, prop)


def test_mbsim_witness_is_p2p_trace_ending_in_receive():
    cfm = load("nonsim_gadget")
    v = check_mbsim(cfm)
    assert v.witness[-1].is_receive
    assert replays(cfm, P2P, v.witness) and not replays(cfm, MB, v.witness)
