"""Recognizing ms-sequences of atomic mb-exchanges.

Two recognizers:

* `AtomicitySummary`, a deterministic streaming check. It keeps the
  communication graph of the exchange read so far, but only through a few
  interface vertices whose future edges are predictable: the first send
  (root), the last send of each process, the last matched send to each
  process, and one hub per process standing for its first receive. The
  remaining (closed) vertices are kept as (out-set, in-set) signatures over
  the interface until they are known to share the root's component.
* `list_automata`, the well-labeling list machines: one per process
  checking a path from its last to its first action, and one checking a
  cycle through every active process. Nondeterministic and exponential,
  used to cross-check the summary on small words.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..model import Action, Cfm
from .nfa import LetterNfa, Nfa, ProductNfa
from .exchange import ExchangeMachine

# state: (roles, reach, pending, active)
#   roles: node id per role slot [root, hub_0.., last_0.., lastm_0..], -1 if unset
#   reach: frozenset of (x, y), x != y, transitively closed
#   pending: frozenset of closed-node signatures (outs, ins)
#   active: bitmask of processes that receive in the block
Summary = Tuple[Tuple[int, ...], FrozenSet[Tuple[int, int]], FrozenSet[Tuple[FrozenSet[int], FrozenSet[int]]], int]


class AtomicitySummary:
    def __init__(self, processes: Sequence[str]):
        self.procs = tuple(processes)
        self.n = len(self.procs)
        self.index = {p: i for i, p in enumerate(self.procs)}
        self._memo: Dict[Tuple[Summary, Action], Summary] = {}

    def initial(self) -> Summary:
        n = self.n
        roles = (-1,) + tuple(range(n)) + (-1,) * (2 * n)
        return (roles, frozenset(), frozenset(), 0)

    def step(self, st: Summary, a: Action) -> Summary:
        key = (st, a)
        out = self._memo.get(key)
        if out is None:
            out = self._memo[key] = self._step(st, a)
        return out

    def _step(self, st: Summary, a: Action) -> Summary:
        n = self.n
        roles, reach, pending, active = st
        reach = set(reach)
        pending = [(set(o), set(i)) for o, i in pending]
        i, j = self.index[a.sender], self.index[a.receiver]
        matched = not a.barred
        new = max(r for r in roles) + 1
        hub_i, hub_j = roles[1 + i], roles[1 + j]
        edges = [(new, hub_i)]
        if roles[1 + n + i] >= 0:
            edges.append((roles[1 + n + i], new))
        if roles[1 + 2 * n + j] >= 0:
            edges.append((roles[1 + 2 * n + j], new))
        if matched:
            edges.append((hub_j, new))
            if not active >> j & 1:
                edges.append((new, hub_j))
                active |= 1 << j
        for x, y in edges:
            src = {x} | {u for u, v in reach if v == x}
            dst = {y} | {v for u, v in reach if u == y}
            for u in src:
                for v in dst:
                    if u != v:
                        reach.add((u, v))
            for outs, ins in pending:
                if x in outs:
                    outs |= dst
                if y in ins:
                    ins |= src
        roles = list(roles)
        if roles[0] < 0:
            roles[0] = new
        roles[1 + n + i] = new
        if matched:
            roles[1 + 2 * n + j] = new
        live = set(roles) - {-1}
        root = roles[0]
        old = set(st[0]) | {new}
        for x in sorted(old - live - {-1}):
            outs = {v for u, v in reach if u == x}
            ins = {u for u, v in reach if v == x}
            pending.append((outs, ins))
        reach = {(u, v) for u, v in reach if u in live and v in live}
        kept = []
        for outs, ins in pending:
            outs &= live
            ins &= live
            if root in outs and root in ins:
                continue
            kept.append((outs, ins))
        # canonical renumbering in role order
        ren: Dict[int, int] = {}
        for r in roles:
            if r >= 0 and r not in ren:
                ren[r] = len(ren)
        roles_t = tuple(ren[r] if r >= 0 else -1 for r in roles)
        reach_t = frozenset((ren[u], ren[v]) for u, v in reach)
        pend_t = frozenset(
            (frozenset(ren[v] for v in outs), frozenset(ren[v] for v in ins)) for outs, ins in kept
        )
        return (roles_t, reach_t, pend_t, active)

    def accepting(self, st: Summary) -> bool:
        roles, reach, pending, active = st
        root = roles[0]
        if root < 0 or pending:
            return False
        n = self.n
        nodes = {r for r in roles[1 + n :] if r >= 0}
        nodes |= {roles[1 + p] for p in range(n) if active >> p & 1}
        return all(x == root or ((x, root) in reach and (root, x) in reach) for x in nodes)

    def accepts(self, word: Sequence[Action]) -> bool:
        st = self.initial()
        for a in word:
            st = self.step(st, a)
        return self.accepting(st)

    def nfa(self) -> LetterNfa:
        return LetterNfa([self.initial()], lambda st, a: [self.step(st, a)], self.accepting, name="atomicity")


# -- well-labeling list machines -------------------------------------------

# list entry: (sender, receiver, matched, rank, extra)


def _on(entry, p: str) -> bool:
    return entry[0] == p or (entry[2] and entry[1] == p)


def _arc(e, f) -> bool:
    """Direct or indirect arc from entry e to entry f (ranks give sequence order)."""
    if e[3] < f[3] and (e[0] == f[0] or (e[1] == f[1] and e[2])):
        return True
    return f[2] and f[1] == e[0]


def _well(entries) -> bool:
    return all(_arc(entries[k], entries[k + 1]) for k in range(len(entries) - 1))


def _inserts(entries, new, bound):
    """Skip the letter, or insert its entry at any position (ranks are 0..len-1)."""
    yield entries
    if len(entries) < bound:
        for pos in range(len(entries) + 1):
            yield entries[:pos] + (new,) + entries[pos:]


def process_list_automaton(processes: Sequence[str], p: str, bound: Optional[int] = None) -> LetterNfa:
    """Accepts when a well-labeling runs from p's last action to p's first action.

    Receives are represented by their matching sends. Entry extra field:
    (first-of-kind, later send by p seen, later matched send to p seen).
    State: (entries, p sent, p received).
    """
    n = len(processes)
    bound = bound or n * n + n

    def step(st, a: Action):
        entries, sent, got = st
        matched = not a.barred
        by_p = a.sender == p
        to_p = matched and a.receiver == p
        upd = []
        for e in entries:
            first, ls, lr = e[4]
            upd.append(e[:4] + ((first, ls or by_p, lr or to_p),))
        first = ("S" if by_p and not sent else "") + ("R" if to_p and not got else "")
        new = (a.sender, a.receiver, matched, len(entries), (first, False, False))
        sent2, got2 = sent or by_p, got or to_p
        return [(es, sent2, got2) for es in _insert_variants(tuple(upd), new, bound)]

    def accepting(st):
        entries, sent, got = st
        if not (sent or got):
            return not entries
        if not entries or not _well(entries):
            return False
        head, tail = entries[0], entries[-1]
        if got:
            ok_head = head[2] and head[1] == p and not head[4][2]
        else:
            ok_head = head[0] == p and not head[4][1]
        ok_tail = ("S" in tail[4][0]) if sent else ("R" in tail[4][0])
        return ok_head and ok_tail

    return LetterNfa([((), False, False)], step, accepting, name=f"labels-{p}")


def _insert_variants(entries, new, bound):
    """Lists obtained by skipping or inserting `new`; ranks renumbered to 0..len-1 in sequence order."""
    for es in _inserts(entries, new, bound):
        order = sorted(range(len(es)), key=lambda k: es[k][3])
        rank = {k: r for r, k in enumerate(order)}
        yield tuple(e[:3] + (rank[k],) + e[4:] for k, e in enumerate(es))


def all_list_automaton(processes: Sequence[str], bound: Optional[int] = None) -> LetterNfa:
    """Accepts when a well-labeling visits every active process and ends on the process it starts on."""
    n = len(processes)
    bound = bound or n * (n * n + n)
    pidx = {p: i for i, p in enumerate(processes)}

    def step(st, a: Action):
        entries, active = st
        matched = not a.barred
        active |= 1 << pidx[a.sender]
        if matched:
            active |= 1 << pidx[a.receiver]
        big = len(entries) + 1  # larger than every rank in use
        new = (a.sender, a.receiver, matched, big, None)
        return [(es, active) for es in _insert_variants(entries, new, bound)]

    def accepting(st):
        entries, active = st
        if not entries or not _well(entries):
            return False
        for p in processes:
            if active >> pidx[p] & 1 and not any(_on(e, p) for e in entries):
                return False
        head, tail = entries[0], entries[-1]
        return any(_on(head, p) and _on(tail, p) for p in processes)

    return LetterNfa([((), 0)], step, accepting, name="labels-all")


def list_automata(processes: Sequence[str]) -> List[LetterNfa]:
    return [process_list_automaton(processes, p) for p in processes] + [all_list_automaton(processes)]


# -- atomic exchanges of a CFM ---------------------------------------------


def atomic_exchange_nfa(cfm: Cfm, g, d, g2, d2, method: str = "summary") -> ProductNfa:
    """ms-images of atomic mb-exchanges executable from (g, D) to (g2, D2)."""
    b = ExchangeMachine(cfm).nfa(g, d, g2, d2)
    if method == "summary":
        checks = [AtomicitySummary(cfm.processes).nfa()]
    elif method == "labels":
        checks = list_automata(cfm.processes)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ProductNfa([b] + checks, name="atomic-exchange")
