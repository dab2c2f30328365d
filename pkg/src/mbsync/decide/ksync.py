"""Bounding the number of sends in atomic exchanges."""

from __future__ import annotations

from typing import Dict, Optional, Tuple

from ..automata.atomic import AtomicitySummary
from ..automata.exchange import ExchangeMachine
from ..model import Action, Cfm
from ..msc import trace_from_blocks
from .reach import blocks_to, reachable_boundaries
from .sync import check_sync
from .verdict import Budget, Timer, Verdict

INF = float("inf")


def longest_atomic_exchange(em: ExchangeMachine, atom: AtomicitySummary, g, d, budget: Optional[Budget] = None):
    """(most sends in an atomic exchange from (g, D), one such ms-word); INF with a word
    that pumps when the trimmed machine has a cycle."""
    start = (em.start(g, d), atom.initial())
    succ: Dict = {}
    order = []
    stack = [start]
    seen = {start}
    while stack:
        st = stack.pop()
        order.append(st)
        out = []
        for a, b2 in em.steps(st[0]):
            t = (b2, atom.step(st[1], a))
            out.append((a, t))
            if t not in seen:
                seen.add(t)
                stack.append(t)
                if budget is not None:
                    budget.check(len(seen))
        succ[st] = out

    def final(st):
        return em.finish(st[0]) is not None and atom.accepting(st[1])

    # trim: states that can reach a final state
    pred: Dict = {}
    for s, out in succ.items():
        for _, t in out:
            pred.setdefault(t, []).append(s)
    live = {s for s in succ if final(s)}
    work = list(live)
    while work:
        t = work.pop()
        for s in pred.get(t, ()):
            if s not in live:
                live.add(s)
                work.append(s)
    if start not in live:
        return 0, ()
    # longest path (in letters) to a final state; cycle among live states means unbounded
    best: Dict = {}
    colour: Dict = {}

    def visit(root):
        stack = [(root, iter(succ[root]))]
        colour[root] = 1
        while stack:
            s, it = stack[-1]
            advanced = False
            for a, t in it:
                if t not in live:
                    continue
                c = colour.get(t, 0)
                if c == 1:
                    return (s, a, t)
                if c == 0:
                    colour[t] = 1
                    stack.append((t, iter(succ[t])))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            colour[s] = 2
            val = (0, ()) if final(s) else (-INF, ())
            for a, t in succ[s]:
                if t in live and best[t][0] + 1 > val[0]:
                    val = (best[t][0] + 1, (a,) + best[t][1])
            best[s] = val
        return None

    cyc = visit(start)
    if cyc is not None:
        return INF, _pumped(succ, live, final, start, cyc)
    return best[start]


def _pumped(succ, live, final, start, cyc):
    """A concrete accepted word that goes around the detected cycle once."""
    from collections import deque

    def path(src, pred_ok):
        prev = {src: None}
        dq = deque([src])
        while dq:
            s = dq.popleft()
            if pred_ok(s):
                out = []
                while prev[s] is not None:
                    s, a = prev[s]
                    out.append(a)
                return s, tuple(reversed(out))
            for a, t in succ.get(s, ()):
                if t in live and t not in prev:
                    prev[t] = (s, a)
                    dq.append(t)
        return None

    s, a, t = cyc
    _, w1 = path(start, lambda x: x == t)
    _, w2 = path(t, lambda x: x == s)
    # after the loop we are back at t; finish from there
    _, w3 = path(t, final)
    return w1 + w2 + (a,) + w3


def _atomic_bound(cfm: Cfm, budget: Optional[Budget]):
    em = ExchangeMachine(cfm)
    atom = AtomicitySummary(cfm.processes)
    parent = reachable_boundaries(cfm, budget, em)
    best, where, word = 0, None, ()
    for b in sorted(parent, key=lambda b: (b[0], sorted(b[1]))):
        k, w = longest_atomic_exchange(em, atom, b[0], b[1], budget)
        if k > best:
            best, where, word = k, b, w
            if k == INF:
                break
    return best, where, word, parent


def check_ksync(cfm: Cfm, k: int, budget: Optional[Budget] = None, sync: Optional[Verdict] = None) -> Verdict:
    """`sync` may carry an earlier check_sync verdict for the same CFM."""
    timer = Timer()
    if k < 1:
        raise ValueError("k must be positive")
    sync = sync or check_sync(cfm, budget=budget)
    if not sync.answer:
        return Verdict("check ksync", False, sync.witness, k=k, states=sync.states, millis=timer.millis, detail={"reason": "not synchronizable"})
    best, where, word, parent = _atomic_bound(cfm, budget)
    states = sync.states + len(parent)
    if best <= k:
        return Verdict("check ksync", True, None, k=k, states=states, millis=timer.millis)
    witness = trace_from_blocks(blocks_to(parent, where) + [word])
    return Verdict(
        "check ksync",
        False,
        witness,
        k=k,
        states=states,
        millis=timer.millis,
        detail={"reason": "atomic exchange with more than k sends", "sends": len(word), "unbounded": best == INF},
    )


def infer_k(cfm: Cfm, budget: Optional[Budget] = None, sync: Optional[Verdict] = None) -> Verdict:
    timer = Timer()
    sync = sync or check_sync(cfm, budget=budget)
    if not sync.answer:
        return Verdict("infer-k", False, sync.witness, states=sync.states, millis=timer.millis, detail={"reason": "not synchronizable"})
    best, where, word, parent = _atomic_bound(cfm, budget)
    states = sync.states + len(parent)
    if best == INF:
        witness = trace_from_blocks(blocks_to(parent, where) + [word])
        return Verdict("infer-k", False, witness, states=states, millis=timer.millis, detail={"reason": "atomic exchanges grow without bound"})
    return Verdict("infer-k", True, None, k=max(1, int(best)), states=states, millis=timer.millis)
