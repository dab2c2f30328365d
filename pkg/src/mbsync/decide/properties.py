"""R-closed model checking and mailbox-similarity of mb-synchronizable CFMs."""

from __future__ import annotations

from typing import List, Optional, Tuple

from ..automata.causality import similarity_nfa
from ..automata.nfa import EPS, ExplicitNfa, LazyNfa, Nfa, ProductNfa, SearchStats, determinize, emptiness, minimize
from ..automata.sync import SyncLift, async_product, r_diamond_violation
from ..model import MB, P2P, Action, Cfm, is_viable
from ..msc import trace_from_blocks
from .verdict import Budget, Timer, Verdict


def _blocks(w) -> List[Tuple[Action, ...]]:
    """Split a lifted witness into per-exchange ms-words (an exchange ends on entering a boundary state)."""
    blocks, cur = [], []
    for k, a in enumerate(w.letters):
        if a is not EPS:
            cur.append(a)
        elif w.path[k][0] == "X" and w.path[k + 1][0] == "B":
            if cur:
                blocks.append(tuple(cur))
            cur = []
    return blocks


def property_alphabet(cfm: Cfm, prop: Nfa):
    letters = set(cfm.actions()) | {a.bar() for a in cfm.sends()}
    if prop.alphabet is not None:
        letters |= {a for a in prop.alphabet if a is not EPS}
    return letters


def _min_dfa(prop: Nfa, alphabet) -> ExplicitNfa:
    return minimize(determinize(prop, alphabet))


def r_closed_violation(prop: Nfa, alphabet=None):
    """(state, a, b) where the minimal DFA fails to commute receives a, b; None if the language is R-closed."""
    alph = alphabet if alphabet is not None else prop.alphabet
    return r_diamond_violation(_min_dfa(prop, alph))


def check_r_closed(prop: Nfa, alphabet=None) -> bool:
    return r_closed_violation(prop, alphabet) is None


def _complement_dfa(dfa: ExplicitNfa) -> ExplicitNfa:
    return ExplicitNfa(dfa.states, dfa.initial(), dfa.states - dfa.finals, dfa.transitions, dfa.alphabet, name="co")


def model_check(cfm: Cfm, prop: Nfa, budget: Optional[Budget] = None) -> Verdict:
    """Does marked(u) belong to the property for every mb-synchronous trace u?"""
    timer = Timer()
    alph = property_alphabet(cfm, prop)
    dfa = _min_dfa(prop, alph)
    bad = r_diamond_violation(dfa)
    if bad is not None:
        s, a, b = bad
        raise ValueError(f"property is not R-closed: receives {a} and {b} do not commute at DFA state {s}")
    co = _complement_dfa(dfa)
    q = async_product(cfm)
    prod = ProductNfa([q, co])
    lift = SyncLift(prod, name="sync-violation")
    stats = SearchStats()
    w = emptiness(
        lift,
        cap=budget.states if budget else None,
        stats=stats,
        cancel=budget.cancelled if budget else None,
    )
    if w is None:
        return Verdict("model-check", True, None, states=stats.explored, millis=timer.millis)
    blocks = _blocks(w)
    return Verdict(
        "model-check",
        False,
        trace_from_blocks(blocks),
        states=stats.explored,
        millis=timer.millis,
        detail={"exchanges": [[str(a) for a in b] for b in blocks]},
    )


def check_mbsim(cfm: Cfm, budget: Optional[Budget] = None) -> Verdict:
    """Is every p2p trace equivalent to an mb-viable one? Sound for mb-synchronizable CFMs."""
    timer = Timer()
    q = async_product(cfm)
    total = 0
    for r in sorted(cfm.receives(), key=str):
        qi = cfm.index(r.actor)
        procs = cfm.procs

        def enables(g, qi=qi, r=r):
            return bool(procs[qi].post(g[qi], r))

        sim = similarity_nfa(r)
        prod = ProductNfa([q, sim])
        lift = SyncLift(
            prod,
            accepting=lambda st, enables=enables, sim=sim: st[0] == "B" and enables(st[1][0]) and sim.accepting(st[1][1]),
            name=f"sim-{r}",
        )
        stats = SearchStats()
        w = emptiness(
            lift,
            cap=budget.states if budget else None,
            stats=stats,
            cancel=budget.cancelled if budget else None,
        )
        total += stats.explored
        if w is not None:
            blocks = _blocks(w)
            u = trace_from_blocks(blocks) + (r,)
            assert is_viable(P2P, u)
            return Verdict(
                "check mbsim",
                False,
                u,
                states=total,
                millis=timer.millis,
                detail={"exchanges": [[str(a) for a in b] for b in blocks], "receive": str(r)},
            )
    return Verdict("check mbsim", True, None, states=total, millis=timer.millis)
