"""MSCs of viable sequences: happens-before, buffer order, validity, products, exchanges."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .model import MB, P2P, Action, BudgetExceeded, ModelError, Network, is_viable, projection, require_many_to_one


@dataclass(frozen=True)
class Msc:
    """Events are the positions 0..n-1 of the sequence the MSC was built from."""

    labels: Tuple[Action, ...]
    msg: Tuple[Tuple[int, int], ...]  # (send, receive) pairs

    @cached_property
    def partner(self) -> Dict[int, int]:
        d = {}
        for s, r in self.msg:
            d[s] = r
            d[r] = s
        return d

    def __len__(self):
        return len(self.labels)

    def matched(self, e: int) -> bool:
        return self.labels[e].is_send and e in self.partner

    def unmatched_sends(self) -> List[int]:
        return [e for e, a in enumerate(self.labels) if a.is_send and e not in self.partner]

    @cached_property
    def process_edges(self) -> Tuple[Tuple[int, int], ...]:
        """Immediate successor pairs of the process order."""
        last: Dict[str, int] = {}
        out = []
        for e, a in enumerate(self.labels):
            if a.actor in last:
                out.append((last[a.actor], e))
            last[a.actor] = e
        return tuple(out)

    def buffer_order(self, net: Network) -> Tuple[Tuple[int, int], ...]:
        """Pairs e <_N e' over sends to the same buffer."""
        require_many_to_one(net)
        sends = [e for e, a in enumerate(self.labels) if a.is_send]
        out = []
        for e in sends:
            if e not in self.partner:
                continue
            be = net.buffer_of(self.labels[e])
            for f in sends:
                if f == e or net.buffer_of(self.labels[f]) != be:
                    continue
                if f not in self.partner:
                    out.append((e, f))
                elif self.partner[e] < self.partner[f]:
                    out.append((e, f))
        return tuple(out)

    def hb_edges(self) -> Tuple[Tuple[int, int], ...]:
        return self.process_edges + self.msg

    def order_edges(self, net: Network) -> Tuple[Tuple[int, int], ...]:
        return self.hb_edges() + self.buffer_order(net)


def msc_of(trace: Sequence[Action]) -> Msc:
    """MSC of a p2p-viable sequence (k-th send matches k-th receive per channel)."""
    trace = tuple(trace)
    if any(a.barred for a in trace):
        raise ModelError("msc_of expects plain actions, not a marked word")
    if not is_viable(P2P, trace):
        raise ModelError("sequence is not p2p-viable")
    pending: Dict[Tuple[str, str], List[int]] = {}
    msg = []
    for e, a in enumerate(trace):
        if a.is_send:
            pending.setdefault(a.channel, []).append(e)
        else:
            msg.append((pending[a.channel].pop(0), e))
    return Msc(trace, tuple(msg))


def _acyclic(n: int, edges) -> bool:
    succ = [[] for _ in range(n)]
    indeg = [0] * n
    for a, b in edges:
        succ[a].append(b)
        indeg[b] += 1
    stack = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    return seen == n


def is_valid(msc: Msc, net: Network) -> bool:
    return _acyclic(len(msc), msc.order_edges(net))


def equivalent(u: Sequence[Action], v: Sequence[Action]) -> bool:
    """Same MSC up to isomorphism, i.e. same projection on every process."""
    procs = {a.actor for a in u} | {a.actor for a in v}
    return all(projection(u, p) == projection(v, p) for p in procs)


def linearizations(msc: Msc, net: Network, cap: int = 10**6) -> Iterator[Tuple[Action, ...]]:
    """Every linear extension of hb together with the buffer order."""
    n = len(msc)
    preds = [set() for _ in range(n)]
    for a, b in msc.order_edges(net):
        preds[b].add(a)
    count = [0]
    placed: List[int] = []
    used = [False] * n

    def rec():
        if len(placed) == n:
            count[0] += 1
            if count[0] > cap:
                raise BudgetExceeded(f"more than {cap} linearizations", count[0])
            yield tuple(msc.labels[e] for e in placed)
            return
        for e in range(n):
            if not used[e] and all(used[x] for x in preds[e]):
                used[e] = True
                placed.append(e)
                yield from rec()
                placed.pop()
                used[e] = False

    if not is_valid(msc, net):
        raise ModelError(f"MSC is not {net.name}-valid")
    yield from rec()


def some_linearization(msc: Msc, net: Network) -> Optional[Tuple[Action, ...]]:
    """A linear extension that keeps the original order where possible; None if invalid."""
    n = len(msc)
    succ = [[] for _ in range(n)]
    indeg = [0] * n
    for a, b in msc.order_edges(net):
        succ[a].append(b)
        indeg[b] += 1
    import heapq

    ready = [e for e in range(n) if indeg[e] == 0]
    heapq.heapify(ready)
    out = []
    while ready:
        e = heapq.heappop(ready)
        out.append(msc.labels[e])
        for f in succ[e]:
            indeg[f] -= 1
            if indeg[f] == 0:
                heapq.heappush(ready, f)
    return tuple(out) if len(out) == n else None


# -- marked words ----------------------------------------------------------


def mark(trace: Sequence[Action]) -> Tuple[Action, ...]:
    """Overline every unmatched send."""
    m = msc_of(trace)
    return tuple(a.bar() if a.is_send and e not in m.partner else a for e, a in enumerate(m.labels))


def ms(trace: Sequence[Action]) -> Tuple[Action, ...]:
    return tuple(a for a in mark(trace) if a.is_send)


def unmark(word: Sequence[Action]) -> Tuple[Action, ...]:
    return tuple(a.unbar() for a in word)


# -- products and exchanges ------------------------------------------------


def unmatched_buffers(net: Network, u: Sequence[Action]) -> Set[object]:
    m = msc_of(u)
    return {net.buffer_of(m.labels[e]) for e in m.unmatched_sends()}


def product(net: Network, u: Sequence[Action], v: Sequence[Action]) -> Optional[Tuple[Action, ...]]:
    """u *_N v, or None when an unmatched send to some buffer in u meets a receive from it in v."""
    blocked = unmatched_buffers(net, u)
    if any(a.is_receive and net.buffer_of(a) in blocked for a in v):
        return None
    return tuple(u) + tuple(v)


def product_all(net: Network, parts: Sequence[Sequence[Action]]) -> Optional[Tuple[Action, ...]]:
    out: Tuple[Action, ...] = ()
    for part in parts:
        out = product(net, out, part)
        if out is None:
            return None
    return out


def is_sr_shaped(trace: Sequence[Action]) -> bool:
    seen_recv = False
    for a in trace:
        if a.is_receive:
            seen_recv = True
        elif seen_recv:
            return False
    return True


def is_exchange(net: Network, trace: Sequence[Action]) -> bool:
    return is_sr_shaped(trace) and is_viable(net, trace)


def greedy_blocks(trace: Sequence[Action]) -> List[Tuple[Action, ...]]:
    """Cut before every send that follows a receive."""
    blocks: List[List[Action]] = []
    prev_recv = True
    for a in trace:
        if a.is_send and prev_recv:
            blocks.append([])
        if not blocks:
            blocks.append([])
        blocks[-1].append(a)
        prev_recv = a.is_receive
    return [tuple(b) for b in blocks]


def is_synchronous(net: Network, trace: Sequence[Action]) -> bool:
    """A *_N-product of N-exchanges; the greedy maximal cut is the only one to try."""
    blocks = greedy_blocks(trace)
    if not all(is_viable(net, b) for b in blocks):
        return False
    return product_all(net, blocks) is not None


def normalize_exchange(exchange: Sequence[Action]) -> Tuple[Action, ...]:
    """Sends unchanged, receives reordered as their matching sends; result is mb-viable."""
    exchange = tuple(exchange)
    if not is_sr_shaped(exchange):
        raise ModelError("not of shape S*R*")
    m = msc_of(exchange)
    sends = [a for a in exchange if a.is_send]
    recvs = sorted((r for s, r in m.msg), key=lambda r: m.partner[r])
    out = tuple(sends) + tuple(exchange[r] for r in recvs)
    if not is_viable(MB, out):
        raise ModelError("exchange cannot be made mb-viable")
    return out


def exchange_from_ms(word: Sequence[Action]) -> Tuple[Action, ...]:
    """The normalized mb-exchange whose ms-sequence is `word`."""
    sends = tuple(a.unbar() for a in word)
    recvs = tuple(a.matching_receive() for a in word if not a.barred)
    return sends + recvs


def trace_from_blocks(blocks: Sequence[Sequence[Action]]) -> Tuple[Action, ...]:
    return tuple(a for b in blocks for a in exchange_from_ms(b))


# -- DOT -------------------------------------------------------------------


def msc_to_dot(msc: Msc, processes: Sequence[str] = (), name: str = "msc") -> str:
    procs = list(processes)
    for a in msc.labels:
        for x in (a.actor, a.peer):
            if x not in procs:
                procs.append(x)
    out = [f'digraph "{name}" {{', "  newrank=true;", "  node [shape=point];", "  edge [arrowhead=normal];"]
    for i, p in enumerate(procs):
        out.append(f'  h{i} [shape=box, label="{p}"];')
    rows = []
    for e, a in enumerate(msc.labels):
        col = procs.index(a.actor)
        out.append(f'  e{e} [xlabel="{a}"];')
        rows.append((e, col))
    for i, p in enumerate(procs):
        chain = [f"h{i}"] + [f"e{e}" for e, c in rows if c == i] + [f"t{i}"]
        out.append(f"  t{i} [shape=none, label=\"\"];")
        out.append(f"  {' -> '.join(chain)} [arrowhead=none, style=solid, weight=100];")
    # invisible chain in sequence order puts event k on row k
    for e in range(len(rows) - 1):
        out.append(f"  e{e} -> e{e + 1} [style=invis];")
    for s, r in msc.msg:
        out.append(f"  e{s} -> e{r} [constraint=false];")
    for e in msc.unmatched_sends():
        a = msc.labels[e]
        out.append(f'  u{e} [shape=none, label="{a.msg}"];')
        out.append(f"  e{e} -> u{e} [arrowhead=onormal, style=dashed, constraint=false];")
        out.append(f"  {{rank=same; e{e}; u{e};}}")
    out.append("}")
    return "\n".join(out) + "\n"
