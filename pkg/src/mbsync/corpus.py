"""Random small CFMs and the engine-versus-oracle agreement check run over them."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional

from .decide import check_ksync, check_mbsim, check_sync, reachable
from .decide.reach import reachable_boundaries
from .model import MB, P2P, Cfm, Process, Action, recv, send
from .oracle import Report, exhaustive_verdicts, is_mbsim_bf, is_synchronizable_bf, min_k, reaches, replays


@dataclass
class CorpusConfig:
    processes: int = 3
    states: int = 4
    messages: int = 3
    max_transitions: int = 4
    seed: int = 0


def random_cfm(rng: random.Random, cfg: CorpusConfig, name: str = "rand") -> Cfm:
    nproc = rng.randint(2, cfg.processes)
    names = [f"p{i}" for i in range(nproc)]
    msgs = [chr(ord("a") + i) for i in range(rng.randint(1, cfg.messages))]
    # sends first so that receives can be biased towards messages somebody sends
    plan = {p: [] for p in names}
    sent = []
    for p in names:
        nst = rng.randint(1, cfg.states)
        for _ in range(rng.randint(1, cfg.max_transitions)):
            if rng.random() < 0.5:
                q = rng.choice([x for x in names if x != p])
                a = send(p, q, rng.choice(msgs))
                sent.append(a)
            else:
                a = None
            plan[p].append((f"s{rng.randrange(nst)}", a, f"s{rng.randrange(nst)}"))
    procs = []
    for p in names:
        trans = []
        for src, a, dst in plan[p]:
            if a is None:
                to_me = [s for s in sent if s.receiver == p]
                if to_me and rng.random() < 0.8:
                    s = rng.choice(to_me)
                    a = s.matching_receive()
                else:
                    a = recv(p, rng.choice([x for x in names if x != p]), rng.choice(msgs))
            trans.append((src, a, dst))
        states = frozenset({"s0"} | {s for s, _, _ in trans} | {d for _, _, d in trans})
        procs.append(Process(p, "s0", states, tuple(dict.fromkeys(trans))))
    return Cfm(name, tuple(procs))


def corpus(n: int, cfg: CorpusConfig = CorpusConfig()) -> List[Cfm]:
    rng = random.Random(cfg.seed)
    return [random_cfm(rng, cfg, name=f"rand{k}") for k in range(n)]


@dataclass
class Agreement:
    cfm: str
    complete: bool
    problems: List[str] = field(default_factory=list)
    sync: Optional[bool] = None
    witnesses: int = 0

    @property
    def ok(self) -> bool:
        return not self.problems

    @property
    def witness_failures(self) -> List[str]:
        return [p for p in self.problems if "witness" in p]


def compare(cfm: Cfm, bound: int = 8, kmax: int = 3, report: Optional[Report] = None) -> Agreement:
    """Engines against the exhaustive oracle at `bound`.

    When the oracle saw every trace (`complete`) verdicts must coincide.
    Otherwise a violation the oracle found must be reported by the engine,
    and every engine witness must replay and be confirmed by the oracle.
    """
    rep = report or exhaustive_verdicts(cfm, bound)
    out = Agreement(cfm.name, rep.complete)
    bad = out.problems.append

    s = check_sync(cfm)
    out.sync = s.answer
    if rep.complete and s.answer != rep.sync:
        bad(f"sync: engine {s.answer}, oracle {rep.sync}")
    if not rep.sync and s.answer:
        bad("sync: oracle found a violation, engine said yes")
    if not s.answer:
        out.witnesses += 1
        if not replays(cfm, MB, s.witness):
            bad("sync witness does not replay")
        elif is_synchronizable_bf(s.witness):
            bad("sync witness is synchronizable")
    # the bounded engine may miss witnesses but must never invent one
    b = check_sync(cfm, engine="bounded", max_exchange=3, max_sends=6)
    if s.answer and not b.answer:
        bad("bounded sync: engine said no on a synchronizable CFM")
    if not b.answer:
        out.witnesses += 1
        if not replays(cfm, MB, b.witness) or is_synchronizable_bf(b.witness):
            bad("bounded sync witness not confirmed")
    if not s.answer:
        return out

    # reachability of global states
    got = {b[0] for b in reachable_boundaries(cfm)}
    if not rep.reachable <= got:
        bad(f"reach: oracle-reachable states missed {sorted(rep.reachable - got)[:3]}")
    if rep.complete and got != set(rep.reachable):
        bad(f"reach: engine-only states {sorted(got - rep.reachable)[:3]}")
    for g in sorted(got - rep.reachable)[:4]:
        v = reachable(cfm, g)
        out.witnesses += 1
        if not v.answer or not reaches(cfm, v.witness, g):
            bad(f"reach witness for {g} does not reach it")

    m = check_mbsim(cfm)
    if rep.complete and m.answer != rep.mbsim:
        bad(f"mbsim: engine {m.answer}, oracle {rep.mbsim}")
    if not rep.mbsim and m.answer:
        bad("mbsim: oracle found a violation, engine said yes")
    if not m.answer:
        out.witnesses += 1
        if not replays(cfm, P2P, m.witness):
            bad("mbsim witness does not replay under p2p")
        elif is_mbsim_bf(m.witness):
            bad("mbsim witness is mailbox-similar")

    for k in range(1, kmax + 1):
        v = check_ksync(cfm, k, sync=s)
        if rep.complete and v.answer != rep.ksync(k):
            bad(f"ksync({k}): engine {v.answer}, oracle {rep.ksync(k)}")
        if k in rep.k_witness and v.answer:
            bad(f"ksync({k}): oracle trace needs more than {k} sends, engine said yes")
        if not v.answer:
            out.witnesses += 1
            if not replays(cfm, MB, v.witness):
                bad(f"ksync({k}) witness does not replay")
            else:
                need = min_k(v.witness)
                if need is not None and need <= k:
                    bad(f"ksync({k}) witness only needs {need}")
    return out
