"""Global-state reachability for mb-synchronizable CFMs, exchange by exchange."""

from __future__ import annotations

import heapq
from itertools import count
from typing import Dict, FrozenSet, Optional, Sequence, Tuple

from ..automata.exchange import ExchangeMachine
from ..model import Action, Cfm
from ..msc import trace_from_blocks
from .verdict import Budget, Timer, Verdict

Boundary = Tuple[Tuple[str, ...], FrozenSet[str]]


def reachable_boundaries(cfm: Cfm, budget: Optional[Budget] = None, machine: Optional[ExchangeMachine] = None):
    """Every (g, D) reachable by an mb-synchronous run, with a parent map for the run using fewest sends."""
    em = machine or ExchangeMachine(cfm)
    start: Boundary = (cfm.initial, frozenset())
    dist = {start: 0}
    parent: Dict[Boundary, Optional[Tuple[Boundary, Tuple[Action, ...]]]] = {start: None}
    tie = count()
    heap = [(0, next(tie), start)]
    done = set()
    while heap:
        d, _, b = heapq.heappop(heap)
        if b in done:
            continue
        done.add(b)
        if budget is not None:
            budget.check(len(done))
        for b2, word in em.successors(*b).items():
            nd = d + len(word)
            if b2 not in dist or nd < dist[b2]:
                dist[b2] = nd
                parent[b2] = (b, word)
                heapq.heappush(heap, (nd, next(tie), b2))
    return parent


def blocks_to(parent, b: Boundary):
    blocks = []
    while parent[b] is not None:
        b, word = parent[b]
        blocks.append(word)
    blocks.reverse()
    return [w for w in blocks if w]


def reachable(cfm: Cfm, goal: Sequence[str], budget: Optional[Budget] = None) -> Verdict:
    """Is a configuration with global state `goal` reachable? Sound only for mb-synchronizable CFMs."""
    timer = Timer()
    goal = tuple(goal)
    parent = reachable_boundaries(cfm, budget)
    hits = [b for b in parent if b[0] == goal]
    if not hits:
        return Verdict("reach", False, None, states=len(parent), millis=timer.millis)

    def cost(b):
        return sum(len(w) for w in blocks_to(parent, b))

    best = min(hits, key=lambda b: (cost(b), sorted(b[1])))
    blocks = blocks_to(parent, best)
    return Verdict(
        "reach",
        True,
        trace_from_blocks(blocks),
        states=len(parent),
        millis=timer.millis,
        detail={"exchanges": [[str(a) for a in w] for w in blocks], "deaf": sorted(best[1])},
    )
