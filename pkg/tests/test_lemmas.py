"""Structural facts the engines rely on, exhaustively at unit-test bounds.

The acceptance suite runs the same checks at 8 actions.
"""

import random

from lemma_checks import (
    check_append_receive,
    check_atomic_scc,
    check_atomic_summary,
    check_ms_equality,
    check_sync_lift,
    check_well_labeling,
)

from conftest import load
from mbsync.corpus import CorpusConfig, random_cfm


def _assert_clean(result):
    checked, bad = result
    assert checked > 0
    assert bad == [], bad[:3]


def test_exchanges_with_same_ms_sequence_are_equivalent():
    _assert_clean(check_ms_equality(max_sends=3))
    _assert_clean(check_ms_equality(max_sends=2, msgs=("m", "n")))


def test_sync_lift_matches_block_enumeration():
    _assert_clean(check_sync_lift([load("crossing_round"), load("nonsim_gadget"), load("ping_pong")], max_sends=3))
    rng = random.Random(7)
    cfms = [random_cfm(rng, CorpusConfig(), f"r{k}") for k in range(5)]
    _assert_clean(check_sync_lift(cfms, max_sends=2))


def test_atomic_iff_strongly_connected():
    _assert_clean(check_atomic_scc(max_len=5, definition_len=5))


def test_streaming_atomicity_summary():
    _assert_clean(check_atomic_summary(max_sends=3))


def test_well_labeling_iff_path_and_size_bound():
    _assert_clean(check_well_labeling(max_sends=3))


def test_append_receive_criterion():
    _assert_clean(check_append_receive(max_len=5, search_len=4))
