"""The asynchronous product of a CFM and the lift from marked words to ms-sequences of synchronous runs."""

from __future__ import annotations

from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Set, Tuple

from ..model import Action, Cfm
from .nfa import EPS, LazyNfa, Nfa, explore

NO_DEAF: FrozenSet[str] = frozenset()


def async_product(cfm: Cfm) -> LazyNfa:
    """All local transitions interleaved; sends also readable overlined. Every state accepts."""
    procs = cfm.procs

    def edges(g):
        for i, p in enumerate(procs):
            for a, dst in p.out(g[i]):
                h = g[:i] + (dst,) + g[i + 1 :]
                yield a, h
                if a.is_send:
                    yield a.bar(), h

    alphabet = set(cfm.actions()) | {a.bar() for a in cfm.sends()}
    return LazyNfa([cfm.initial], edges, lambda g: True, alphabet=alphabet, name=f"{cfm.name}-async")


def r_diamond_violation(nfa: Nfa, cap: int = 10**6) -> Optional[Tuple[object, Action, Action]]:
    """A reachable state and receive pair on distinct processes that do not commute, if any."""
    m = explore(nfa, cap)
    out: Dict[object, Dict[object, Set[object]]] = {}
    for s, a, t in m.transitions:
        out.setdefault(s, {}).setdefault(a, set()).add(t)
    recvs = sorted({a for a in m.alphabet if a is not EPS and a.is_receive}, key=str)
    if any(a is EPS for _, a, _ in m.transitions):
        raise ValueError("R-diamond check expects an epsilon-free automaton")

    def two(s, a, b):
        mid = out.get(s, {}).get(a, ())
        res = set()
        for x in mid:
            res |= out.get(x, {}).get(b, set())
        return res

    for s in sorted(m.states, key=repr):
        for a in recvs:
            for b in recvs:
                if a.actor < b.actor and two(s, a, b) != two(s, b, a):
                    return (s, a, b)
    return None


def check_r_diamond(nfa: Nfa, cap: int = 10**6) -> bool:
    return r_diamond_violation(nfa, cap) is None


def _send_closure(nfa: Nfa, memo: Dict) -> callable:
    def closure(state):
        if state not in memo:
            seen = {state}
            stack = [state]
            while stack:
                s = stack.pop()
                for a, t in nfa.edges(s):
                    if a is not EPS and a.is_send and t not in seen:
                        seen.add(t)
                        stack.append(t)
            memo[state] = tuple(sorted(seen, key=repr))
        return memo[state]

    return closure


class SyncLift(LazyNfa):
    """Reads ms-sequences of mb-synchronous runs of an R-diamond automaton.

    Boundary states ("B", l, D); inside an exchange ("X", l1, l2, mid, D):
    l1 follows the sends, l2 starts at the guessed middle state mid and
    follows the matching receives; leaving needs l1 == mid.
    """

    def __init__(self, nfa: Nfa, initial: Iterable = None, accepting=None, name="sync"):
        self.inner = nfa
        closure = _send_closure(nfa, {})
        self._closure = closure
        init = list(initial) if initial is not None else [("B", s, NO_DEAF) for s in nfa.initial()]
        acc = accepting or (lambda st: st[0] == "B" and nfa.accepting(st[1]))
        alphabet = None
        if nfa.alphabet is not None:
            alphabet = {a for a in nfa.alphabet if a is not EPS and a.is_send}
        super().__init__(init, self._edges, acc, alphabet=alphabet, name=name)

    def _edges(self, st):
        nfa = self.inner
        if st[0] == "B":
            _, l, d = st
            for mid in self._closure(l):
                yield EPS, ("X", l, mid, mid, d)
            return
        _, l1, l2, mid, d = st
        if l1 == mid:
            yield EPS, ("B", l2, d)
        for a, t1 in nfa.edges(l1):
            if a is EPS or not a.is_send:
                continue
            if a.barred:
                yield a, ("X", t1, l2, mid, d | {a.receiver})
            elif a.receiver not in d:
                for t2 in nfa.step(l2, a.matching_receive()):
                    yield a, ("X", t1, t2, mid, d)


def sync_lift(nfa: Nfa, initial=None, accepting=None, check: bool = True) -> SyncLift:
    """Soundness needs an R-diamond input; `check` explores the input to make sure."""
    if check:
        bad = r_diamond_violation(nfa)
        if bad is not None:
            raise ValueError(f"automaton is not R-diamond at state {bad[0]!r} for {bad[1]}, {bad[2]}")
    return SyncLift(nfa, initial, accepting)


def sync_of_property(p_nfa: Nfa) -> SyncLift:
    """ms-images of the mb-synchronous u with marked(u) accepted by p_nfa."""
    return SyncLift(p_nfa, name="sync-property")


def exchange_automata(cfm: Cfm, g: Sequence[str], d: Iterable[str], g2: Sequence[str], d2: Iterable[str]):
    """(B, C): ms-images of one exchange, resp. of a synchronous sequence, from (g, D) to (g2, D2).

    B has its own initial and final states even when (g, D) = (g2, D2).
    """
    q = async_product(cfm)
    g, g2 = tuple(g), tuple(g2)
    d, d2 = frozenset(d), frozenset(d2)
    lift = SyncLift(q, initial=[("B", g, d)], accepting=lambda st: st == ("B", g2, d2), name="C")

    def b_edges(st):
        if st[0] == "start":
            yield from lift.edges(("B", st[1], st[2]))
        elif st[0] == "X":
            for a, t in lift.edges(st):
                if t[0] == "B":
                    yield a, ("end", t[1], t[2])
                else:
                    yield a, t

    b = LazyNfa([("start", g, d)], b_edges, lambda st: st == ("end", g2, d2), alphabet=lift.alphabet, name="B")
    return b, lift
