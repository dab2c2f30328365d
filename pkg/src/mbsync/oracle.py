"""Brute-force reference implementations.

Nothing here imports the msc, commgraph, automata or decide modules: the
point is to have a second, naive opinion on every engine answer.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .model import MB, P2P, Action, Cfm, Network, enabled, initial_configuration, is_viable, projection, step

Trace = Tuple[Action, ...]


def _pairs(trace: Sequence[Action]) -> Dict[int, int]:
    """send position -> receive position, k-th send with k-th receive per channel."""
    sends: Dict[Tuple[str, str], List[int]] = {}
    recvs: Dict[Tuple[str, str], List[int]] = {}
    for i, a in enumerate(trace):
        ch = (a.sender, a.receiver)
        (sends if a.is_send else recvs).setdefault(ch, []).append(i)
    out = {}
    for ch, rs in recvs.items():
        ss = sends.get(ch, [])
        assert len(ss) >= len(rs), "not p2p-viable"
        for s, r in zip(ss, rs):
            out[s] = r
    return out


def _relations(trace: Sequence[Action], net: Network):
    """(process-order pairs, msg pairs, buffer-order pairs), all as explicit pair sets."""
    n = len(trace)
    po = {(i, j) for i in range(n) for j in range(i + 1, n) if trace[i].actor == trace[j].actor}
    pairs = _pairs(trace)
    msg = set(pairs.items())
    sends = [(i, net.bf(a.sender, a.receiver)) for i, a in enumerate(trace) if a.is_send]
    bo = set()
    for e, be in sends:
        for f, bf in sends:
            if e == f or be != bf or e not in pairs:
                continue
            if f not in pairs or pairs[e] < pairs[f]:
                bo.add((e, f))
    return po, msg, bo


def _closure(n: int, edges) -> List[List[bool]]:
    reach = [[False] * n for _ in range(n)]
    for a, b in edges:
        reach[a][b] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    return reach


def path_exists(trace: Sequence[Action], net: Network, i: int, j: int) -> bool:
    """Reachability from event i to event j along hb and buffer-order arcs (i == j counts)."""
    if hasattr(trace, "labels"):
        trace = trace.labels
    if i == j:
        return True
    po, msg, bo = _relations(trace, net)
    return _closure(len(trace), po | msg | bo)[i][j]


def is_valid_bf(trace: Sequence[Action], net: Network) -> bool:
    po, msg, bo = _relations(trace, net)
    reach = _closure(len(trace), po | msg | bo)
    return not any(reach[i][i] for i in range(len(trace)))


def atomic_factors(trace: Sequence[Action], net: Network = MB) -> List[List[int]]:
    """Mutual-reachability classes of the communication graph, sorted so that arcs go forward."""
    n = len(trace)
    po, msg, bo = _relations(trace, net)
    edges = po | msg | {(b, a) for a, b in msg} | bo
    reach = _closure(n, edges)
    classes: List[List[int]] = []
    seen = set()
    for i in range(n):
        if i in seen:
            continue
        cls = [j for j in range(n) if j == i or (reach[i][j] and reach[j][i])]
        seen.update(cls)
        classes.append(cls)

    # order classes: c before d if some edge goes from c to d
    def key_before(c, d):
        return reach[c[0]][d[0]]

    ordered: List[List[int]] = []
    rest = list(classes)
    while rest:
        for c in rest:
            if not any(key_before(d, c) for d in rest if d is not c):
                ordered.append(c)
                rest.remove(c)
                break
    return ordered


def _sr_projection(trace: Sequence[Action], events: Sequence[int]) -> bool:
    seen_recv: Set[str] = set()
    for e in events:
        a = trace[e]
        if a.is_receive:
            seen_recv.add(a.actor)
        elif a.actor in seen_recv:
            return False
    return True


def is_synchronizable_bf(trace: Sequence[Action]) -> bool:
    """Every atomic factor has no process that sends after receiving."""
    return all(_sr_projection(trace, f) for f in atomic_factors(trace, MB))


def min_k(trace: Sequence[Action]) -> Optional[int]:
    """Least k with the trace equivalent to a product of k-exchanges (None if not synchronizable)."""
    best = 0
    for f in atomic_factors(trace, MB):
        if not _sr_projection(trace, f):
            return None
        best = max(best, sum(1 for e in f if trace[e].is_send))
    return best


def _interleavings(trace: Sequence[Action]):
    procs = sorted({a.actor for a in trace})
    proj = {p: projection(trace, p) for p in procs}
    n = len(trace)
    idx = {p: 0 for p in procs}
    out: List[Action] = []

    def rec():
        if len(out) == n:
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


def _greedy_synchronous(trace: Sequence[Action]) -> bool:
    blocks: List[List[Action]] = []
    prev_recv = True
    for a in trace:
        if a.is_send and prev_recv:
            blocks.append([])
        blocks[-1].append(a)
        prev_recv = a.is_receive
    deaf: Set[str] = set()
    for b in blocks:
        if not is_viable(MB, b):
            return False
        if any(a.is_receive and a.actor in deaf for a in b):
            return False
        pairs = _pairs(b)
        deaf |= {b[i].receiver for i, a in enumerate(b) if a.is_send and i not in pairs}
    return True


def _all_factorizations_synchronous(trace: Sequence[Action]) -> bool:
    """Definitional check: try every cut of the sequence into S*R* factors."""
    n = len(trace)

    def rec(start: int, deaf: FrozenSet[str]) -> bool:
        if start == n:
            return True
        for end in range(start + 1, n + 1):
            blk = trace[start:end]
            shape_ok = all(not (blk[i].is_receive and blk[i + 1].is_send) for i in range(len(blk) - 1))
            if not shape_ok:
                break
            if not is_viable(MB, blk) or any(a.is_receive and a.actor in deaf for a in blk):
                continue
            pairs = _pairs(blk)
            new = deaf | {blk[i].receiver for i, a in enumerate(blk) if a.is_send and i not in pairs}
            if rec(end, frozenset(new)):
                return True
        return False

    return rec(0, frozenset())


def is_synchronizable_by_search(trace: Sequence[Action], exhaustive_cuts: bool = False) -> bool:
    """Is some equivalent reordering mb-viable and synchronous?"""
    check = _all_factorizations_synchronous if exhaustive_cuts else _greedy_synchronous
    return any(is_viable(MB, w) and check(w) for w in _interleavings(trace))


def is_mbsim_bf(trace: Sequence[Action]) -> bool:
    return is_valid_bf(trace, MB)


def is_mbsim_by_search(trace: Sequence[Action]) -> bool:
    return any(is_viable(MB, w) for w in _interleavings(trace))


def append_receive_viable(u: Sequence[Action], r: Action) -> bool:
    """Is u.r equivalent to an mb-viable sequence? (path criterion from unmatched sends to r's process)"""
    u = tuple(u)
    w = u + (r,)
    pairs = _pairs(w)
    j = next(s for s, rr in pairs.items() if rr == len(u))
    pu = _pairs(u)
    q = r.actor
    cands = [i for i, a in enumerate(u) if a.is_send and a.receiver == q and i not in pu and i < j]
    if not cands:
        return True
    po, msg, bo = _relations(u, MB)
    reach = _closure(len(u), po | msg | bo)
    return not any(reach[i][j] for i in cands)


def linear_extension_count(trace: Sequence[Action], net: Network) -> int:
    """Number of orderings of the events compatible with hb and buffer order (permutation filter)."""
    po, msg, bo = _relations(trace, net)
    edges = po | msg | bo
    n = len(trace)
    count = 0
    for perm in permutations(range(n)):
        pos = {e: k for k, e in enumerate(perm)}
        if all(pos[a] < pos[b] for a, b in edges):
            count += 1
    return count


# -- whole-system verdicts -------------------------------------------------


def _traces(cfm: Cfm, net: Network, bound: int, cap: int):
    """{trace: set of configurations}, plus whether exploration got stuck before the bound.

    Traces with the same MSC and the same reached configurations have the
    same extensions and the same verdicts, so one representative each is kept.
    """
    layer = {(): {initial_configuration(cfm)}}
    allt = dict(layer)
    extendable = False
    for depth in range(bound + 1):
        nxt: Dict[Trace, Set] = {}
        for t, confs in layer.items():
            for c in confs:
                for a, c2 in enabled(cfm, net, c):
                    if depth == bound:
                        extendable = True
                        break
                    nxt.setdefault(t + (a,), set()).add(c2)
                if depth == bound and extendable:
                    break
        if depth == bound:
            break
        reps: Dict[Tuple, Trace] = {}
        for t in sorted(nxt):
            reps.setdefault((_msc_key(t), frozenset(nxt[t])), t)
        nxt = {t: nxt[t] for t in reps.values()}
        if len(allt) + len(nxt) > cap:
            raise RuntimeError(f"oracle passed {cap} traces")
        allt.update(nxt)
        layer = nxt
        if not layer:
            break
    return allt, extendable


def _msc_key(trace: Trace) -> Tuple:
    procs = sorted({a.actor for a in trace})
    return tuple((p, projection(trace, p)) for p in procs)


@dataclass
class Report:
    bound: int
    complete: bool  # no mb trace or p2p trace is longer than the bound
    sync: bool
    sync_witness: Optional[Trace]
    mbsim: bool
    mbsim_witness: Optional[Trace]
    k: Optional[int]  # max over traces of the per-trace minimal k (None if some trace is not synchronizable)
    k_witness: Dict[int, Trace] = field(default_factory=dict)  # shortest trace needing more than k
    reachable: FrozenSet[Tuple[str, ...]] = frozenset()
    mb_traces: int = 0
    p2p_traces: int = 0

    def ksync(self, k: int) -> bool:
        return self.k is not None and self.k <= k


def exhaustive_verdicts(cfm: Cfm, bound: int = 8, cap: int = 2 * 10**6) -> Report:
    mb, mb_more = _traces(cfm, MB, bound, cap)
    p2p, p2p_more = _traces(cfm, P2P, bound, cap)
    sync, sync_w = True, None
    kmax: Optional[int] = 0
    need: Dict[int, Trace] = {}
    cache: Dict[Tuple, Optional[int]] = {}
    for t in sorted(mb, key=lambda t: (len(t), str(t))):
        key = _msc_key(t)
        if key not in cache:
            cache[key] = min_k(t)
        k = cache[key]
        if k is None:
            if sync:
                sync, sync_w = False, t
            kmax = None
            continue
        if kmax is not None:
            kmax = max(kmax, k)
        for j in range(1, k):
            need.setdefault(j, t)
    mbsim, mbsim_w = True, None
    seen = {}
    for t in sorted(p2p, key=lambda t: (len(t), str(t))):
        key = _msc_key(t)
        if key not in seen:
            seen[key] = is_mbsim_bf(t)
        if not seen[key]:
            mbsim, mbsim_w = False, t
            break
    reach = frozenset(c.states for confs in mb.values() for c in confs)
    return Report(
        bound=bound,
        complete=not (mb_more or p2p_more),
        sync=sync,
        sync_witness=sync_w,
        mbsim=mbsim,
        mbsim_witness=mbsim_w,
        k=kmax,
        k_witness=need,
        reachable=reach,
        mb_traces=len(mb),
        p2p_traces=len(p2p),
    )


def replays(cfm: Cfm, net: Network, trace: Sequence[Action]) -> bool:
    confs = {initial_configuration(cfm)}
    for a in trace:
        confs = {c2 for c in confs for c2 in step(cfm, net, c, a)}
        if not confs:
            return False
    return True


def reaches(cfm: Cfm, trace: Sequence[Action], goal: Tuple[str, ...]) -> bool:
    confs = {initial_configuration(cfm)}
    for a in trace:
        confs = {c2 for c in confs for c2 in step(cfm, MB, c, a)}
    return any(c.states == tuple(goal) for c in confs)
