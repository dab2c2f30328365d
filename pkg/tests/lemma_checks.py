"""Exhaustive small-scope checks of the structural facts the engines rely on.

Each check enumerates every relevant object up to a size bound and returns
(objects checked, list of counterexamples).
"""

from __future__ import annotations

from itertools import permutations, product
from typing import Dict, Iterator, List, Sequence, Tuple

from mbsync.automata.atomic import AtomicitySummary
from mbsync.automata.nfa import eps_closure, post
from mbsync.automata.sync import SyncLift, async_product
from mbsync.commgraph import comm_graph, find_well_labeling, is_atomic, is_well_labeling, well_label_bound
from mbsync.model import MB, P2P, Action, Cfm, Network, is_viable, projection, recv, send
from mbsync.msc import equivalent, exchange_from_ms, is_valid, ms, msc_of, normalize_exchange, product as star
from mbsync.oracle import append_receive_viable, is_mbsim_by_search

PROCS = ("p", "q", "r")


def send_letters(procs=PROCS, msgs=("m",), barred=True) -> List[Action]:
    out = []
    for a in procs:
        for b in procs:
            if a != b:
                for m in msgs:
                    out.append(send(a, b, m))
                    if barred:
                        out.append(send(a, b, m).bar())
    return out


def all_letters(procs=PROCS, msgs=("m",)) -> List[Action]:
    out = []
    for s in send_letters(procs, msgs, barred=False):
        out += [s, s.matching_receive()]
    return out


def ms_words(max_sends: int, procs=PROCS, msgs=("m",)) -> Iterator[Tuple[Action, ...]]:
    letters = send_letters(procs, msgs)
    for n in range(max_sends + 1):
        yield from product(letters, repeat=n)


def genuine(word: Sequence[Action]) -> bool:
    """Is `word` the ms-sequence of some mb-exchange?"""
    u = exchange_from_ms(word)
    return is_viable(MB, u) and ms(u) == tuple(word)


def _mailboxes(trace: Sequence[Action]):
    boxes: Dict[str, List[Action]] = {}
    for a in trace:
        if a.is_send:
            boxes.setdefault(a.receiver, []).append(a)
        else:
            boxes[a.actor].pop(0)
    return tuple(sorted((q, tuple(v)) for q, v in boxes.items() if v))


def viable_traces(max_len: int, net: Network = MB, procs=PROCS, msgs=("m",)) -> List[Tuple[Action, ...]]:
    """One viable trace per (MSC, buffer contents), every length up to max_len.

    Two such traces have the same viable extensions, so this covers every MSC.
    """
    letters = all_letters(procs, msgs)
    layer = [()]
    out = [()]
    for _ in range(max_len):
        nxt = {}
        for t in layer:
            for a in letters:
                u = t + (a,)
                if a.is_receive and not is_viable(net, u):
                    continue
                key = (tuple(projection(u, p) for p in procs), _mailboxes(u) if net is MB else None)
                nxt.setdefault(key, u)
        layer = list(nxt.values())
        out += layer
    return out


# -- exchanges are determined by their ms-sequence ------------------------


def check_ms_equality(max_sends: int = 4, msgs=("m",)):
    """Exchanges with the same ms-sequence are equivalent, and reordering the
    receives as their sends gives an mb-viable equivalent exchange."""
    checked, bad = 0, []
    for w in ms_words(max_sends, msgs=msgs):
        sends = tuple(a.unbar() for a in w)
        recvs = [a.matching_receive() for a in w if not a.barred]
        exchanges = []
        for perm in set(permutations(recvs)):
            u = sends + perm
            if is_viable(MB, u) and ms(u) == w:
                exchanges.append(u)
        for u in exchanges:
            checked += 1
            if not equivalent(u, exchanges[0]):
                bad.append(("not equivalent", exchanges[0], u))
            hat = normalize_exchange(u)
            if not (is_viable(MB, hat) and equivalent(hat, u)):
                bad.append(("normal form", u, hat))
    return checked, bad


# -- the ms-level lift of an R-diamond automaton ---------------------------


def _lift_targets(lift: SyncLift, start, word):
    cur = eps_closure(lift, [start])
    for a in word:
        cur = eps_closure(lift, post(lift, cur, a))
        if not cur:
            break
    return {(s[1], s[2]) for s in cur if s[0] == "B"}


def _splits(word):
    n = len(word)
    for cuts in product((False, True), repeat=max(n - 1, 0)):
        blocks, cur = [], [word[0]] if n else []
        for k, cut in enumerate(cuts):
            if cut:
                blocks.append(tuple(cur))
                cur = []
            cur.append(word[k + 1])
        if cur:
            blocks.append(tuple(cur))
        yield blocks


def _run_marked(nfa, start, marked):
    cur = {start}
    for a in marked:
        cur = {t for s in cur for t in nfa.step(s, a)}
        if not cur:
            break
    return cur


def _brute_targets(nfa, start, deaf, word):
    """(l', D') for every mb-synchronous u with ms(u) = word, by splitting into exchanges."""
    out = set()
    for blocks in _splits(word) if word else [[]]:
        if not all(genuine(b) for b in blocks):
            continue
        d = set(deaf)
        ok = True
        marked: List[Action] = []
        for b in blocks:
            rcv = {a.receiver for a in b if not a.barred}
            if rcv & d:
                ok = False
                break
            d |= {a.receiver for a in b if a.barred}
            marked += list(b) + [a.matching_receive() for a in b if not a.barred]
        if ok:
            for t in _run_marked(nfa, start, marked):
                out.add((t, frozenset(d)))
    return out


def check_sync_lift(cfms: Sequence[Cfm], max_sends: int = 4):
    """Lifted automaton reaches (l', D') on v iff some mb-synchronous u with
    ms(u) = v leads the asynchronous product from (l, D) to (l', D')."""
    checked, bad = 0, []
    for cfm in cfms:
        q = async_product(cfm)
        lift = SyncLift(q)
        letters = sorted({a for a in cfm.sends()} | {a.bar() for a in cfm.sends()}, key=str)
        start = cfm.initial
        for n in range(max_sends + 1):
            for w in product(letters, repeat=n):
                checked += 1
                got = _lift_targets(lift, ("B", start, frozenset()), w)
                want = _brute_targets(q, start, frozenset(), w)
                if got != want:
                    bad.append((cfm.name, w, got ^ want))
    return checked, bad


# -- atomicity -------------------------------------------------------------


def _interleavings(trace):
    procs = sorted({a.actor for a in trace})
    proj = {p: projection(trace, p) for p in procs}
    idx = {p: 0 for p in procs}
    out: List[Action] = []

    def rec():
        if len(out) == len(trace):
            yield tuple(out)
            return
        for p in procs:
            k = idx[p]
            if k < len(proj[p]):
                out.append(proj[p][k])
                idx[p] = k + 1
                yield from rec()
                idx[p] = k
                out.pop()

    yield from rec()


def atomic_by_definition(u: Sequence[Action], net: Network) -> bool:
    """No u == v * w with v, w non-empty and net-viable."""
    for x in _interleavings(tuple(u)):
        for k in range(1, len(x)):
            v, w = x[:k], x[k:]
            if is_viable(net, v) and is_viable(net, w) and star(net, v, w) is not None:
                return False
    return True


def atomic_by_cuts(u: Sequence[Action], net: Network) -> bool:
    """Same as atomic_by_definition, over per-process prefix cuts.

    Actions name both peers, so the MSC of a sequence depends only on its
    projections; a cut splits u into v * w iff each side has some viable
    linearization and no receive of w reads a buffer holding an unmatched
    send of v.
    """
    u = tuple(u)
    procs = sorted({a.actor for a in u})
    sizes = [len(projection(u, p)) for p in procs]
    pos = {p: [] for p in procs}
    for k, a in enumerate(u):
        pos[a.actor].append(k)
    for cut in product(*(range(n + 1) for n in sizes)):
        total = sum(cut)
        if total == 0 or total == len(u):
            continue
        left = {k for p, c in zip(procs, cut) for k in pos[p][:c]}
        v = tuple(a for k, a in enumerate(u) if k in left)
        w = tuple(a for k, a in enumerate(u) if k not in left)
        sent: Dict[Tuple[str, str], int] = {}
        for a in v:
            if a.is_send:
                sent[(a.sender, a.receiver)] = sent.get((a.sender, a.receiver), 0) + 1
        for a in v:
            if a.is_receive:
                sent[(a.sender, a.receiver)] = sent.get((a.sender, a.receiver), 0) - 1
        if any(c < 0 for c in sent.values()):
            continue  # a receive of v whose send lies in w
        full = {net.bf(p, q) for (p, q), c in sent.items() if c > 0}
        if any(a.is_receive and net.bf(a.sender, a.receiver) in full for a in w):
            continue
        if is_valid(msc_of(v), net) and is_valid(msc_of(w), net):
            return False
    return True


def check_atomic_scc(max_len: int = 8, nets=(MB, P2P), definition_len: int = 6):
    """Atomic iff the communication graph is strongly connected; the cut-based
    definition is itself compared with the interleaving one up to definition_len."""
    checked, bad = 0, []
    for net in nets:
        seen = set()
        for u in viable_traces(max_len, net):
            key = tuple(projection(u, p) for p in PROCS)
            if not u or key in seen:
                continue  # atomicity depends on the MSC only
            seen.add(key)
            checked += 1
            want = atomic_by_cuts(u, net)
            if len(u) <= definition_len and want != atomic_by_definition(u, net):
                bad.append(("cuts", net.name, u))
            if is_atomic(u, net) != want:
                bad.append((net.name, u))
    return checked, bad


def _strongly_connected(u) -> bool:
    g = comm_graph(u, MB)
    succ = g.successors()
    n = g.size

    def reach(src, edges):
        seen = {src}
        stack = [src]
        while stack:
            x = stack.pop()
            for y in edges[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    pred = [[] for _ in range(n)]
    for a, bs in enumerate(succ):
        for b in bs:
            pred[b].append(a)
    return len(reach(0, succ)) == n and len(reach(0, pred)) == n


def check_atomic_summary(max_sends: int = 4, msgs=("m",)):
    """The streaming atomicity automaton accepts ms(u) iff H(u) is strongly connected."""
    checked, bad = 0, []
    summary = AtomicitySummary(PROCS)
    for w in ms_words(max_sends, msgs=msgs):
        if not w or not genuine(w):
            continue
        checked += 1
        u = exchange_from_ms(w)
        if summary.accepts(w) != _strongly_connected(u):
            bad.append(w)
    return checked, bad


# -- well-labelings --------------------------------------------------------


def check_well_labeling(max_sends: int = 4, msgs=("m",)):
    """Path between sends i, j of an exchange iff a well-labeling from i to j exists,
    and the shortest one has at most |P|^2 + |P| positions."""
    checked, bad = 0, []
    bound = well_label_bound(len(PROCS))
    for w in ms_words(max_sends, msgs=msgs):
        if not w or not genuine(w):
            continue
        u = exchange_from_ms(w)
        g = comm_graph(u, MB)
        succ = g.successors()
        n = len(w)
        for i in range(n):
            seen = {i}
            stack = [i]
            while stack:
                x = stack.pop()
                for y in succ[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            for j in range(n):
                checked += 1
                lab = find_well_labeling(w, i, j)
                if (lab is not None) != (j in seen):
                    bad.append(("iff", w, i, j))
                elif lab is not None and (len(lab) > bound or not is_well_labeling(w, lab.positions)):
                    bad.append(("size", w, i, j, lab))
    return checked, bad


# -- appending one receive -------------------------------------------------


def check_append_receive(max_len: int = 7, search_len: int = 5):
    """u.r is equivalent to an mb-viable sequence iff no unmatched send to r's
    process has a path to r's send; compared with mb-validity of the MSC and,
    for short u, with a search over all reorderings."""
    checked, bad = 0, []
    receives = [a for a in all_letters() if a.is_receive]
    for u in viable_traces(max_len, MB):
        for r in receives:
            w = u + (r,)
            if not is_viable(P2P, w):
                continue
            checked += 1
            crit = append_receive_viable(u, r)
            if crit != is_valid(msc_of(w), MB):
                bad.append(("validity", u, r))
            elif len(u) <= search_len and crit != is_mbsim_by_search(w):
                bad.append(("search", u, r))
    return checked, bad
