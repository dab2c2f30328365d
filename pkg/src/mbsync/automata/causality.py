"""Causality between two tagged sends of a synchronous run, and the similarity automaton built on it.

Letters are (action, tag) pairs with tag 1 on the two distinguished sends.
The automaton follows a chain of sends, each one guessed as the next hop:

* ("P", p): the chain is at a send by p; any later send by p follows.
* ("MB", p): at a matched send to p; any later send to p follows.
* ("MS", p) / ("MR", p): at a matched send to p whose receive has not /
  has happened; once it has, any later send by p follows.

A receive letter (or '#', between exchanges) moves every MS state to MR.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from ..model import Action
from .nfa import EPS, LazyNfa

INIT, FINAL = ("init",), ("final",)
HASH = "#"


def _hops(a: Action):
    yield ("P", a.sender)
    if not a.barred:
        yield ("MB", a.receiver)
        yield ("MS", a.receiver)


def _follows(state, b: Action) -> bool:
    kind, p = state
    if kind in ("P", "MR"):
        return b.sender == p
    if kind == "MB":
        return b.receiver == p
    return False


def _causality_step(state, letter):
    if letter == HASH or (isinstance(letter, tuple) and len(letter) == 2 and letter[0].is_receive):
        if letter != HASH and letter[1]:
            return
        if state[0] == "MS":
            yield ("MR", state[1])
        else:
            yield state
        return
    b, tag = letter
    if state == INIT:
        if tag:
            yield from _hops(b)
        else:
            yield INIT
        return
    if state == FINAL:
        if not tag:
            yield FINAL
        return
    if tag:
        if _follows(state, b):
            yield FINAL
        return
    yield state
    if _follows(state, b):
        yield from _hops(b)


class _Causality(LazyNfa):
    def __init__(self, letters: Optional[Iterable] = None, name="causality"):
        self.letters = frozenset(letters) if letters is not None else None
        super().__init__([INIT], self._edges, lambda s: s == FINAL, alphabet=self.letters, name=name)

    def _edges(self, state):
        # without a letter set the automaton is letter-driven (see ProductNfa)
        for a in self.letters or ():
            for t in _causality_step(state, a):
                yield a, t

    def step(self, state, letter):
        return set(_causality_step(state, letter))


def tagged_letters(actions: Iterable[Action], hashed: bool = False):
    out = set()
    for a in actions:
        if a.is_send:
            out |= {(a, 0), (a, 1)}
        elif not hashed:
            out.add((a, 0))
    if hashed:
        out.add(HASH)
    return out


def causality_nfa(actions: Optional[Iterable[Action]] = None) -> _Causality:
    """Tagged marked words whose two tagged sends are connected by a happens-before / buffer-order path."""
    return _Causality(tagged_letters(actions) if actions is not None else None)


def causality_nfa_hashed(sends: Optional[Iterable[Action]] = None) -> _Causality:
    """Same over ms(v1)#ms(v2)#...: '#' plays the role of the receives of the previous exchange."""
    return _Causality(tagged_letters(sends, hashed=True) if sends is not None else None, name="causality#")


def tag_word(word: Sequence, i: int, j: int, hashed_positions: Sequence[int] = ()):
    """Tag positions i and j of a marked word (positions index `word`)."""
    return tuple(a if a == HASH else (a, int(k in (i, j))) for k, a in enumerate(word))


# -- similarity ------------------------------------------------------------


def _w_step(state: int, letter, p: str, q: str, m: str):
    a, tag = letter
    blocking = a.barred and a.sender == p and a.receiver == q
    if state == 0:
        if tag:
            if a.barred and a.receiver == q and a.sender != p:
                yield 1
        elif not blocking:
            yield 0
    elif state == 1:
        if tag:
            if a.barred and (a.sender, a.receiver, a.msg) == (p, q, m):
                yield 2
        elif not blocking:
            yield 1
    elif not tag:
        yield 2


def similarity_nfa(r: Action, actions: Optional[Iterable[Action]] = None) -> LazyNfa:
    """Marked words u (of synchronous runs) for which u.r is p2p-viable but not mailbox-similar.

    Guesses an unmatched send to q from another sender that happens-before or
    is buffer-ordered before the unmatched p!q(m) that r would receive.
    """
    if not r.is_receive:
        raise ValueError("similarity automaton needs a receive")
    q, p, m = r.actor, r.peer, r.msg
    letters = frozenset(actions) if actions is not None else None

    def step(state, a):
        w, d = state
        for tag in (0, 1):
            if tag and a.is_receive:
                continue
            for w2 in _w_step(w, (a, tag), p, q, m):
                for d2 in _causality_step(d, (a, tag)):
                    yield (w2, d2)

    class _Similarity(LazyNfa):
        def step(self, state, letter):
            return set(step(state, letter))

    def edges(state):
        for a in letters or ():
            for t in step(state, a):
                yield a, t

    return _Similarity([(0, INIT)], edges, lambda s: s == (2, FINAL), alphabet=letters, name=f"similar-{r}")
