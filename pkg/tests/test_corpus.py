import random

from mbsync.corpus import CorpusConfig, compare, corpus, random_cfm
from mbsync.model import MB
from mbsync.oracle import exhaustive_verdicts


def test_generator_respects_bounds():
    cfg = CorpusConfig()
    for c in corpus(60, cfg):
        assert 2 <= len(c.processes) <= cfg.processes
        msgs = {a.msg for a in c.actions()}
        assert len(msgs) <= cfg.messages
        for p in c.procs:
            assert len(p.states) <= cfg.states
            assert len(p.transitions) <= cfg.max_transitions


def test_generator_is_seeded():
    a = [str(c.procs) for c in corpus(5, CorpusConfig(seed=3))]
    b = [str(c.procs) for c in corpus(5, CorpusConfig(seed=3))]
    assert a == b


def test_engines_agree_with_oracle_on_small_corpus():
    for c in corpus(25, CorpusConfig(seed=11)):
        a = compare(c, bound=6)
        assert a.ok, (c.name, a.problems)


def test_compare_flags_a_wrong_oracle_report():
    rng = random.Random(2)
    while True:
        c = random_cfm(rng, CorpusConfig(), "r")
        rep = exhaustive_verdicts(c, 6)
        if rep.complete and rep.sync:
            break
    rep.sync = False
    rep.sync_witness = ()
    assert not compare(c, bound=6, report=rep).ok
