"""Intersection-of-NFAs benchmark CFMs and the two gadgets that can be attached to them."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from ..automata.nfa import ExplicitNfa
from ..model import Cfm, Process, make_cfm, parse_action

ACCEPT = "accept"
GO = "go"


def _proc(name: str, init: str, trans: Sequence[Tuple[str, str, str]]) -> Process:
    ts = tuple((s, parse_action(a), d) for s, a, d in trans)
    states = {init} | {s for s, _, _ in ts} | {d for _, _, d in ts}
    return Process(name, init, frozenset(states), ts)


def nonsync_gadget(a: str = "a", b: str = "b", c: str = "c", trigger: Optional[str] = None) -> List[Process]:
    """Three processes whose only complete run is not mb-synchronizable.

    b sends x to a early, a sends y to b and w to c, b then sends z to c;
    c reads z before w and a reads x last. With `trigger`, a first waits for go.
    """
    pa = [("g0", f"{a}!{b}(y)", "g1"), ("g1", f"{a}!{c}(w)", "g2"), ("g2", f"{a}?{b}(x)", "g3")]
    init = "g0"
    if trigger:
        pa = [("t0", f"{a}?{trigger}({GO})", "g0")] + pa
        init = "t0"
    return [
        _proc(a, init, pa),
        _proc(b, "g0", [("g0", f"{b}!{a}(x)", "g1"), ("g1", f"{b}?{a}(y)", "g2"), ("g2", f"{b}!{c}(z)", "g3")]),
        _proc(c, "g0", [("g0", f"{c}?{b}(z)", "g1"), ("g1", f"{c}?{a}(w)", "g2")]),
    ]


def nonsim_gadget(p: str = "p", q: str = "q", r: str = "r", trigger: Optional[str] = None) -> List[Process]:
    """Three processes with a p2p run that no mailbox run is equivalent to.

    p sends to r, then exchanges with q, and q finally sends to r: under
    p2p r may read q's message first, under mailboxes it never can.
    """
    pp = [("g0", f"{p}!{r}(d)", "g1"), ("g1", f"{p}?{q}(d)", "g2"), ("g2", f"{p}!{q}(d)", "g3")]
    init = "g0"
    if trigger:
        pp = [("t0", f"{p}?{trigger}({GO})", "g0")] + pp
        init = "t0"
    return [
        _proc(p, init, pp),
        _proc(q, "g0", [("g0", f"{q}!{p}(d)", "g1"), ("g1", f"{q}?{p}(d)", "g2"), ("g2", f"{q}!{r}(d)", "g3")]),
        _proc(r, "g0", [("g0", f"{r}?{q}(d)", "g1")]),
    ]


def _letters(nfas: Sequence[ExplicitNfa]) -> List[str]:
    letters = set()
    for a in nfas:
        letters |= {str(x) for x in a.alphabet}
    bad = [x for x in letters if not x.isidentifier() and not x.isalnum()]
    if bad:
        raise ValueError(f"benchmark letters must be identifiers: {bad}")
    if ACCEPT in letters or GO in letters:
        raise ValueError(f"letters {ACCEPT!r} and {GO!r} are reserved")
    return sorted(letters)


def gen_benchmark(nfas: Sequence[ExplicitNfa], gadget: Optional[str] = None, name: str = "intersection") -> Cfm:
    """Ring p1 -> p2 -> ... -> pn -> p1 relaying guessed letters, each p_i running NFA i.

    p1 guesses a letter, steps its NFA and sends it on; every other process
    receives it, steps, and passes it on; p1 gets it back and starts over.
    From a final state p1 may send `accept` instead; p_i in a final state
    relays it; p_n stops in `accept`. So all processes sit in `accept` iff
    the NFAs share a word. A gadget on three fresh processes is started by
    p_n after it accepts.
    """
    n = len(nfas)
    if n < 2:
        raise ValueError("need at least two NFAs")
    letters = _letters(nfas)
    names = [f"p{i + 1}" for i in range(n)]
    procs: List[Process] = []
    for i, (pname, a) in enumerate(zip(names, nfas)):
        if len(a.initial()) != 1:
            raise ValueError(f"NFA {i + 1} must have exactly one initial state")
        nxt, prv = names[(i + 1) % n], names[(i - 1) % n]
        trans = []
        for x, lab, y in a.transitions:
            lab = str(lab)
            if i == 0:
                trans.append((f"q{x}", f"{pname}!{nxt}({lab})", f"b{y}"))
            else:
                trans.append((f"q{x}", f"{pname}?{prv}({lab})", f"t{y}_{lab}"))
                trans.append((f"t{y}_{lab}", f"{pname}!{nxt}({lab})", f"q{y}"))
        if i == 0:
            for y in a.states:
                for lab in letters:
                    trans.append((f"b{y}", f"{pname}?{prv}({lab})", f"q{y}"))
        for x in a.finals:
            if i == 0:
                trans.append((f"q{x}", f"{pname}!{nxt}({ACCEPT})", ACCEPT))
            elif i < n - 1:
                trans.append((f"q{x}", f"{pname}?{prv}({ACCEPT})", f"r{x}"))
                trans.append((f"r{x}", f"{pname}!{nxt}({ACCEPT})", ACCEPT))
            else:
                trans.append((f"q{x}", f"{pname}?{prv}({ACCEPT})", ACCEPT))
        if i == n - 1 and gadget:
            trans.append((ACCEPT, f"{pname}!ga({GO})", "done"))
        procs.append(_proc(pname, f"q{a.initial()[0]}", trans))
    if gadget == "nonsync":
        procs += nonsync_gadget("ga", "gb", "gc", trigger=names[-1])
    elif gadget == "nonsim":
        procs += nonsim_gadget("ga", "gb", "gc", trigger=names[-1])
    elif gadget not in (None, "none"):
        raise ValueError(f"unknown gadget {gadget!r}")
    return Cfm(name, tuple(procs))


def cycle_nfa(size: int, letter: str = "a", name: str = "cycle") -> ExplicitNfa:
    """Deterministic cycle of `size` states over one letter, accepting at state size-1."""
    trans = [(f"s{k}", letter, f"s{(k + 1) % size}") for k in range(size)]
    return ExplicitNfa({f"s{k}" for k in range(size)}, ["s0"], {f"s{size - 1}"}, trans, name=name)


def letter_nfa(word: Sequence[str], name: str = "word") -> ExplicitNfa:
    """Accepts exactly `word`."""
    trans = [(f"s{k}", x, f"s{k + 1}") for k, x in enumerate(word)]
    return ExplicitNfa({f"s{k}" for k in range(len(word) + 1)}, ["s0"], {f"s{len(word)}"}, trans, name=name)


def single_state_nfa(letters: Sequence[str], accepting: bool = True, name: str = "one") -> ExplicitNfa:
    trans = [("s0", x, "s0") for x in letters]
    return ExplicitNfa({"s0"}, ["s0"], {"s0"} if accepting else set(), trans, alphabet=list(letters), name=name)
