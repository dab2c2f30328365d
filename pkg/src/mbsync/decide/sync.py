"""Is every mb-trace of a CFM equivalent to a synchronous one?

The exact engine searches for a smallest counterexample u = v.r where v is a
sequence of atomic mb-exchanges v_1 ... v_n executed block by block and r
is a receive by some process q. Such a u is not synchronizable iff

* r's matching send s is an unmatched send of v, and no earlier unmatched
  send to q has a happens-before/buffer-order path to s (otherwise u would
  not even be mailbox-realizable);
* some chain of blocks v_{i_1}, ..., v_{i_k} (k >= 2), each directly
  ordered before the next, starts at a block containing s or an unmatched
  send to q, ends at a block containing s or an action of q, and has two
  consecutive blocks where a process receives in the first and sends in
  the second.

The path condition is checked by running, for every other sender p' to q,
the subset construction of the causality automaton over
ms(v_1)#ms(v_2)#..., with the first unmatched p'!q and s tagged.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, FrozenSet, List, Optional, Tuple

from ..automata.atomic import AtomicitySummary
from ..automata.causality import FINAL, HASH, INIT, _causality_step
from ..automata.exchange import ExchangeMachine
from ..automata.nfa import EPS, LazyNfa, SearchStats, emptiness
from ..commgraph import decompose
from ..model import MB, P2P, Action, BudgetExceeded, Cfm, is_viable, projection, recv
from ..msc import is_sr_shaped, is_valid, msc_of, some_linearization, trace_from_blocks
from .verdict import Budget, Timer, Verdict

# context carried across blocks: (q, s, U, copies, phase, last)
#   s: None or (sender index, message) of the send r will consume
#   U: bitmask of senders with an unmatched send to q so far (until s is chosen)
#   copies: ((p', subset of causality states), ...) for p' in U
#   phase: 0 chain not started, 1 started, 2 has a receive-then-send step, 3 closed
#   last: (active mask, matched-receivers mask) of the last chain block


def _post(subset: FrozenSet, letter) -> FrozenSet:
    out = set()
    for st in subset:
        out.update(_causality_step(st, letter))
    return frozenset(out)


class WitnessSearch(LazyNfa):
    def __init__(self, cfm: Cfm, targets: Optional[List[int]] = None):
        self.cfm = cfm
        self.em = ExchangeMachine(cfm)
        self.atom = AtomicitySummary(cfm.processes)
        self.n = len(cfm.procs)
        self.names = cfm.processes
        self.idx = {p: i for i, p in enumerate(self.names)}
        receivers = [i for i, p in enumerate(cfm.procs) if any(a.is_receive for _, a, _ in p.transitions)]
        qs = receivers if targets is None else [q for q in targets if q in receivers]
        init = [("B", cfm.initial, frozenset(), (q, None, 0, (), 0, None)) for q in qs]
        super().__init__(init, self._edges, lambda st: st[0] == "F", name="sync-witness")

    # -- letters inside a block ------------------------------------------

    def _read(self, ctx, a: Action):
        """Context updates for reading send `a`; several when s may be chosen here."""
        q, s, u, copies, phase, last = ctx
        i = self.idx[a.sender]
        to_q = a.barred and self.idx[a.receiver] == q
        stepped = tuple((p, _post(sub, (a, 0))) for p, sub in copies)
        if not to_q or s is not None:
            yield (q, s, u, stepped, phase, last), False
            return
        first = not (u >> i & 1)
        if first:
            yield (q, s, u | 1 << i, stepped + ((i, _post(frozenset([INIT]), (a, 1))),), phase, last), False
            # choose this send as the one r receives
            if all(FINAL not in _post(sub, (a, 1)) for _, sub in copies):
                yield (q, (i, a.msg), u, (), phase, last), True
        else:
            yield (q, s, u, stepped, phase, last), False

    # -- chain bookkeeping at block end ----------------------------------

    def _close(self, ctx, bsum):
        q, s, u, copies, phase, last = ctx
        senders, mr, rcv, has_s, has_uq = bsum
        copies = tuple((p, _post(sub, HASH)) for p, sub in copies)
        yield (q, s, u, copies, phase, last)  # block not on the chain
        act = senders | mr
        here = (act, mr)
        if phase == 0:
            if has_s or has_uq:
                yield (q, s, u, copies, 1, here)
        elif phase in (1, 2):
            lact, lmr = last
            if lact & act or lmr & rcv:
                ph = 2 if phase == 2 or lmr & senders else 1
                if ph == 2 and (has_s or act >> q & 1):
                    yield (q, s, u, copies, 3, None)
                else:
                    yield (q, s, u, copies, ph, here)

    # -- edges -----------------------------------------------------------

    def _edges(self, st):
        kind = st[0]
        if kind == "B":
            _, g, d, ctx = st
            q, s, _, _, phase, _ = ctx
            if s is not None and phase == 3:
                r = recv(self.names[q], self.names[s[0]], s[1])
                if self.em.receive(q, g[q], r):
                    yield ("r", r), ("F", r)
            empty = (0, 0, 0, False, False)
            yield EPS, ("X", self.em.start(g, d), self.atom.initial(), empty, ctx)
            return
        if kind != "X":
            return
        _, block, summ, bsum, ctx = st
        done = self.em.finish(block)
        if done is not None and self.atom.accepting(summ):
            g2, d2 = done
            for ctx2 in self._close(ctx, bsum):
                yield EPS, ("B", g2, d2, ctx2)
        senders, mr, rcv, has_s, has_uq = bsum
        q = ctx[0]
        for a, block2 in self.em.steps(block):
            summ2 = self.atom.step(summ, a)
            i, j = self.idx[a.sender], self.idx[a.receiver]
            base = (senders | 1 << i, mr if a.barred else mr | 1 << j, rcv | 1 << j)
            uq = has_uq or (a.barred and j == q)
            for ctx2, chose in self._read(ctx, a):
                yield a, ("X", block2, summ2, base + (has_s or chose, uq), ctx2)


def _weight(letter) -> int:
    return 1 if isinstance(letter, Action) else 0


def _decode(w) -> Tuple[List[Tuple[Action, ...]], Action]:
    blocks: List[Tuple[Action, ...]] = []
    cur: List[Action] = []
    r = None
    for k, a in enumerate(w.letters):
        nxt = w.path[k + 1]
        if isinstance(a, Action):
            cur.append(a)
        elif a is EPS and nxt[0] == "B" and w.path[k][0] == "X":
            blocks.append(tuple(cur))
            cur = []
        elif isinstance(a, tuple) and a and a[0] == "r":
            r = a[1]
    return blocks, r


def _not_synchronizable(u) -> bool:
    """Some atomic part has a process that sends after receiving, so no reordering makes it an exchange."""
    for part, _ in decompose(u, MB):
        if not all(is_sr_shaped(projection(part, p)) for p in {a.actor for a in part}):
            return True
    return False


def check_sync_exact(cfm: Cfm, budget: Optional[Budget] = None) -> Verdict:
    timer = Timer()
    search = WitnessSearch(cfm)
    stats = SearchStats()
    cap = budget.states if budget else None
    cancel = budget.cancelled if budget else None
    try:
        w = emptiness(search, weight=_weight, cap=cap, stats=stats, cancel=cancel)
    except BudgetExceeded as e:
        e.explored = stats.explored
        raise
    if w is None:
        return Verdict("check sync", True, None, states=stats.explored, millis=timer.millis, detail={"engine": "exact"})
    blocks, r = _decode(w)
    v = trace_from_blocks(blocks)
    u = some_linearization(msc_of(v + (r,)), MB)
    if u is None:
        raise AssertionError("decoded witness has no mailbox linearization")
    return Verdict(
        "check sync",
        False,
        u,
        states=stats.explored,
        millis=timer.millis,
        detail={"engine": "exact", "exchanges": [[str(a) for a in b] for b in blocks], "receive": str(r)},
    )


def check_sync_bounded(
    cfm: Cfm, max_exchange: int = 4, max_sends: int = 8, budget: Optional[Budget] = None
) -> Verdict:
    """Enumerate synchronous runs (exchanges of at most `max_exchange` sends, `max_sends` in total)
    and test every receive that could follow. `yes` only means no witness within the bounds."""
    timer = Timer()
    em = ExchangeMachine(cfm)
    start = (cfm.initial, frozenset(), ())
    seen = {(cfm.initial, frozenset(), ())}
    queue = deque([(start, ())])
    explored = 0
    recvs = [[a for _, a, _ in p.transitions if a.is_receive] for p in cfm.procs]
    while queue:
        (g, d, key), blocks = queue.popleft()
        explored += 1
        if budget is not None:
            budget.check(explored)
        v = trace_from_blocks(blocks)
        for qi, p in enumerate(cfm.procs):
            for r in {a for a, _ in p.out(g[qi]) if a.is_receive}:
                u = v + (r,)
                if not is_viable(P2P, u):
                    continue
                m = msc_of(u)
                if not is_valid(m, MB):
                    continue
                lin = some_linearization(m, MB)
                if _not_synchronizable(lin):
                    return Verdict(
                        "check sync",
                        False,
                        lin,
                        states=explored,
                        millis=timer.millis,
                        detail={"engine": "bounded", "exchanges": [[str(a) for a in b] for b in blocks]},
                    )
        used = sum(len(b) for b in blocks)
        room = min(max_exchange, max_sends - used)
        if room <= 0:
            continue
        for (g2, d2), word in _all_exchanges(em, g, d, room):
            if not word:
                continue
            nb = blocks + (word,)
            t = trace_from_blocks(nb)
            k2 = (g2, d2, tuple(tuple(a for a in t if a.actor == x) for x in cfm.processes))
            if k2 not in seen:
                seen.add(k2)
                queue.append(((g2, d2, k2[2]), nb))
    return Verdict(
        "check sync",
        True,
        None,
        states=explored,
        millis=timer.millis,
        detail={"engine": "bounded", "max_exchange": max_exchange, "max_sends": max_sends, "complete": False},
    )


def _all_exchanges(em: ExchangeMachine, g, d, limit: int):
    """Every (boundary, ms-word) pair of one exchange with at most `limit` sends."""
    out = []
    stack = [(em.start(g, d), ())]
    seen = set()
    while stack:
        b, w = stack.pop()
        done = em.finish(b)
        if done is not None and (done, w) not in seen:
            seen.add((done, w))
            out.append((done, w))
        if len(w) < limit:
            for a, b2 in em.steps(b):
                stack.append((b2, w + (a,)))
    return sorted(out, key=lambda x: (len(x[1]), str(x[1])))


def check_sync(
    cfm: Cfm,
    engine: str = "exact",
    max_exchange: int = 4,
    max_sends: int = 8,
    budget: Optional[Budget] = None,
) -> Verdict:
    if engine == "exact":
        return check_sync_exact(cfm, budget)
    if engine == "bounded":
        return check_sync_bounded(cfm, max_exchange, max_sends, budget)
    raise ValueError(f"unknown engine {engine!r}")
