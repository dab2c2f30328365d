"""Exchange machine specialized to a CFM.

Same language as the lifted asynchronous product, but the middle state is
guessed per process and only when that process first receives, which
keeps the branching small. In-block states are (D, rows) with one row
(send-state, middle, receive-state) per process; middle is None while the
process has not received in the block.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, Iterator, Optional, Sequence, Tuple

from ..model import Action, Cfm
from .nfa import EPS, LazyNfa

Row = Tuple[str, Optional[str], Optional[str]]
Block = Tuple[FrozenSet[str], Tuple[Row, ...]]


class ExchangeMachine:
    def __init__(self, cfm: Cfm):
        self.cfm = cfm
        self.procs = cfm.procs
        self.index = {p.name: i for i, p in enumerate(cfm.procs)}
        self._closure: Dict[Tuple[int, str], Tuple[str, ...]] = {}
        self._sends: Dict[Tuple[int, str], Tuple[Tuple[Action, str], ...]] = {}
        self._recv: Dict[Tuple[int, str, Action], Tuple[str, ...]] = {}

    def sends_from(self, i: int, state: str):
        key = (i, state)
        if key not in self._sends:
            self._sends[key] = tuple((a, t) for a, t in self.procs[i].out(state) if a.is_send)
        return self._sends[key]

    def send_closure(self, i: int, state: str) -> Tuple[str, ...]:
        """States of process i reachable from `state` by sends only (including itself)."""
        key = (i, state)
        if key not in self._closure:
            seen = {state}
            stack = [state]
            while stack:
                s = stack.pop()
                for _, t in self.sends_from(i, s):
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
            self._closure[key] = tuple(sorted(seen))
        return self._closure[key]

    def receive(self, i: int, state: str, a: Action) -> Tuple[str, ...]:
        key = (i, state, a)
        if key not in self._recv:
            self._recv[key] = self.procs[i].post(state, a)
        return self._recv[key]

    def start(self, g: Sequence[str], d: FrozenSet[str]) -> Block:
        return (frozenset(d), tuple((s, None, None) for s in g))

    def steps(self, block: Block) -> Iterator[Tuple[Action, Block]]:
        """Read one send, plain (matched) or overlined (unmatched)."""
        d, rows = block
        for i, (s, mid, r) in enumerate(rows):
            for a, t in self.sends_from(i, s):
                j = self.index[a.peer]
                # unmatched: the receiver turns deaf
                nrows = rows[:i] + ((t, mid, r),) + rows[i + 1 :]
                yield a.bar(), (d | {a.peer}, nrows)
                if a.peer in d:
                    continue
                sj, midj, rj = nrows[j]
                rcv = a.matching_receive()
                if midj is None:
                    for m in self.send_closure(j, sj):
                        for r2 in self.receive(j, m, rcv):
                            yield a, (d, nrows[:j] + ((sj, m, r2),) + nrows[j + 1 :])
                else:
                    for r2 in self.receive(j, rj, rcv):
                        yield a, (d, nrows[:j] + ((sj, midj, r2),) + nrows[j + 1 :])

    @staticmethod
    def finish(block: Block) -> Optional[Tuple[Tuple[str, ...], FrozenSet[str]]]:
        """Boundary reached by closing the block, or None if some guess was wrong."""
        d, rows = block
        g = []
        for s, mid, r in rows:
            if mid is None:
                g.append(s)
            elif s != mid:
                return None
            else:
                g.append(r)
        return tuple(g), d

    def nfa(self, g, d, g2, d2) -> LazyNfa:
        """One exchange from (g, D) to (g2, D2), with separate start and end states."""
        g, g2 = tuple(g), tuple(g2)
        d, d2 = frozenset(d), frozenset(d2)
        goal = ("end", (g2, d2))

        def edges(st):
            if st[0] == "start":
                yield EPS, ("in", self.start(g, d))
            elif st[0] == "in":
                done = self.finish(st[1])
                if done is not None:
                    yield EPS, ("end", done)
                for a, b in self.steps(st[1]):
                    yield a, ("in", b)

        alphabet = {a for a in self.cfm.sends()} | {a.bar() for a in self.cfm.sends()}
        return LazyNfa([("start",)], edges, lambda st: st == goal, alphabet=alphabet, name="exchange")

    def successors(self, g, d, max_sends: Optional[int] = None):
        """Every boundary reachable by one exchange, with one ms-word reaching it (shortest first)."""
        from collections import deque

        start = self.start(g, d)
        seen = {start: ()}
        queue = deque([start])
        out: Dict = {}
        while queue:
            b = queue.popleft()
            w = seen[b]
            done = self.finish(b)
            if done is not None and done not in out:
                out[done] = w
            if max_sends is not None and len(w) >= max_sends:
                continue
            for a, b2 in self.steps(b):
                if b2 not in seen:
                    seen[b2] = w + (a,)
                    queue.append(b2)
        return out
