import pytest

from conftest import seq, trace
from mbsync.model import MB, P2P, ModelError
from mbsync.msc import (
    equivalent,
    exchange_from_ms,
    greedy_blocks,
    is_exchange,
    is_synchronous,
    is_valid,
    linearizations,
    mark,
    ms,
    msc_of,
    msc_to_dot,
    normalize_exchange,
    product,
    some_linearization,
    trace_from_blocks,
    unmark,
)


def test_msc_matches_kth_send_with_kth_receive():
    m = msc_of(trace("three_process_chain"))
    assert set(m.msg) == {(0, 4), (1, 2)}
    assert m.unmatched_sends() == [3]


def test_msc_of_rejects_unviable_and_marked():
    with pytest.raises(ModelError):
        msc_of(seq("q?p(a)"))
    with pytest.raises(ModelError):
        msc_of(mark(seq("p!q(a)")))


def test_mailbox_validity():
    # the unmatched send to p2 is buffered behind nothing, all valid
    assert is_valid(msc_of(trace("three_process_chain")), MB)
    # p's send to r precedes q's send to r through p?q, yet r reads q's message first
    m = msc_of(seq("p!r(d) q!p(d) p?q(d) p!q(d) q?p(d) q!r(d) r?q(d)"))
    assert is_valid(m, P2P) and not is_valid(m, MB)


def test_equivalence_is_per_process_projection():
    u = seq("p!q(a) r!s(b)")
    v = seq("r!s(b) p!q(a)")
    assert equivalent(u, v)
    assert not equivalent(u, seq("p!q(a)"))


def test_linearizations_are_equivalent_and_viable():
    m = msc_of(trace("late_unmatched_send"))
    lins = list(linearizations(m, MB))
    assert lins and all(equivalent(x, m.labels) for x in lins)
    assert some_linearization(m, MB) in lins


def test_mark_and_ms():
    t = trace("three_process_chain")
    assert [str(a) for a in ms(t)] == ["p1!p2(m1)", "p2!p3(m2)", "p3!!p2(m3)"]
    assert unmark(mark(t)) == t


def test_product_blocks_receives_behind_unmatched():
    u = seq("p!!q(a)".replace("!!", "!"))
    assert product(MB, u, seq("r!q(b) q?r(b)")) is None
    assert product(P2P, u, seq("r!q(b) q?r(b)")) is not None
    assert product(MB, u, seq("r!s(b)")) == u + seq("r!s(b)")


def test_exchanges_and_synchronous():
    assert is_exchange(MB, seq("p!q(a) q!p(b) q?p(a) p?q(b)"))
    assert not is_exchange(MB, seq("p!q(a) q?p(a) q!p(b)"))
    t = seq("p!q(a) q?p(a) q!p(b) p?q(b)")
    assert greedy_blocks(t) == [seq("p!q(a) q?p(a)"), seq("q!p(b) p?q(b)")]
    assert is_synchronous(MB, t)
    assert not is_synchronous(MB, trace("late_unmatched_send"))


def test_normalize_exchange():
    u = seq("p!r(a) q!r(b) r?q(b) r?p(a)")
    assert not u == normalize_exchange(u)
    with pytest.raises(ModelError):
        normalize_exchange(seq("p!q(a) q?p(a) q!p(b)"))
    assert normalize_exchange(seq("p!r(a) q!r(b) r?p(a) r?q(b)")) == seq("p!r(a) q!r(b) r?p(a) r?q(b)")


def test_exchange_from_ms_inverts_ms():
    for t in [seq("p!q(a) q!p(b) q?p(a) p?q(b)"), seq("p!q(a) p!r(c) q?p(a)")]:
        assert ms(exchange_from_ms(ms(t))) == ms(t)
        assert equivalent(exchange_from_ms(ms(t)), t)
    blocks = [ms(seq("p!q(a) q?p(a)")), ms(seq("q!p(b)"))]
    assert trace_from_blocks(blocks) == seq("p!q(a) q?p(a) q!p(b)")


def test_dot_mentions_every_process():
    text = msc_to_dot(msc_of(trace("three_process_chain")))
    assert text.startswith("digraph") and all(p in text for p in ("p1", "p2", "p3"))
