"""Communication graphs, SCC decomposition into atomic factors, skeletons, well-labelings."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .model import MB, Action, ModelError, Network, is_viable, require_many_to_one
from .msc import Msc, msc_of, product_all


@dataclass(frozen=True)
class CommGraph:
    msc: Msc
    edges: FrozenSet[Tuple[int, int]]

    @property
    def size(self) -> int:
        return len(self.msc)

    def successors(self) -> List[List[int]]:
        succ = [[] for _ in range(self.size)]
        for a, b in sorted(self.edges):
            succ[a].append(b)
        return succ


def comm_graph(trace: Sequence[Action], net: Network = MB) -> CommGraph:
    require_many_to_one(net)
    if not is_viable(net, trace):
        raise ModelError(f"sequence is not {net.name}-viable")
    m = msc_of(trace)
    edges: Set[Tuple[int, int]] = set()
    labels = m.labels
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            if labels[i].actor == labels[j].actor:
                edges.add((i, j))
    for s, r in m.msg:
        edges.add((s, r))
        edges.add((r, s))
    edges.update(m.buffer_order(net))
    return CommGraph(m, frozenset(edges))


def tarjan(n: int, succ: Sequence[Sequence[int]]) -> List[List[int]]:
    """Strongly connected components (iterative Tarjan), in reverse topological order."""
    index = [None] * n
    low = [0] * n
    onstack = [False] * n
    stack: List[int] = []
    comps: List[List[int]] = []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                onstack[v] = True
            recurse = False
            for k in range(i, len(succ[v])):
                w = succ[v][k]
                if index[w] is None:
                    work.append((v, k + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if onstack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return comps


def sccs(g: CommGraph) -> List[List[int]]:
    """SCCs in topological order, ties broken by smallest event position."""
    comps = tarjan(g.size, g.successors())
    where = {}
    for c, comp in enumerate(comps):
        for e in comp:
            where[e] = c
    dag: Dict[int, Set[int]] = {c: set() for c in range(len(comps))}
    indeg = [0] * len(comps)
    for a, b in g.edges:
        ca, cb = where[a], where[b]
        if ca != cb and cb not in dag[ca]:
            dag[ca].add(cb)
            indeg[cb] += 1
    ready = [(comps[c][0], c) for c in range(len(comps)) if indeg[c] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        _, c = heapq.heappop(ready)
        order.append(comps[c])
        for d in dag[c]:
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(ready, (comps[d][0], d))
    return order


def is_atomic(trace: Sequence[Action], net: Network = MB) -> bool:
    if not trace:
        return True
    return len(sccs(comm_graph(trace, net))) == 1


def decompose(trace: Sequence[Action], net: Network = MB) -> List[Tuple[Tuple[Action, ...], int]]:
    """Atomic non-empty factors, in topological SCC order, with their skeleton index."""
    g = comm_graph(trace, net)
    parts = [tuple(g.msc.labels[e] for e in comp) for comp in sccs(g)]
    if product_all(net, parts) is None:
        raise AssertionError("factors of a decomposition must have a defined product")
    return [(p, i) for i, p in enumerate(parts)]


@dataclass(frozen=True)
class Skeleton:
    size: int
    components: Tuple[Tuple[int, ...], ...]
    arcs: FrozenSet[Tuple[int, int]]  # i -> j from a process-order or buffer-order arc
    order: FrozenSet[Tuple[int, int]]  # strict part of the generated partial order

    def before(self, i: int, j: int) -> bool:
        return (i, j) in self.order


def skeleton(trace: Sequence[Action], net: Network = MB) -> Skeleton:
    g = comm_graph(trace, net)
    comps = sccs(g)
    where = {e: c for c, comp in enumerate(comps) for e in comp}
    m = g.msc
    arcs = set()
    labels = m.labels
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            if labels[i].actor == labels[j].actor and where[i] != where[j]:
                arcs.add((where[i], where[j]))
    for a, b in m.buffer_order(net):
        if where[a] != where[b]:
            arcs.add((where[a], where[b]))
    order = set(arcs)
    changed = True
    while changed:
        changed = False
        for a, b in list(order):
            for c, d in list(order):
                if b == c and (a, d) not in order:
                    order.add((a, d))
                    changed = True
    return Skeleton(len(comps), tuple(tuple(c) for c in comps), frozenset(arcs), frozenset(order))


def skeleton_of_factors(parts: Sequence[Sequence[Action]], net: Network = MB) -> Set[Tuple[int, int]]:
    """Direct relation between factors of a product: shared process, or same-buffer sends with the earlier matched."""
    info = []
    for part in parts:
        m = msc_of(part)
        actors = {a.actor for a in part}
        matched_bufs = {net.buffer_of(m.labels[s]) for s, _ in m.msg}
        bufs = {net.buffer_of(a) for a in part if a.is_send}
        info.append((actors, matched_bufs, bufs))
    rel = set()
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if info[i][0] & info[j][0] or info[i][1] & info[j][2]:
                rel.add((i, j))
    return rel


# -- well-labelings --------------------------------------------------------


@dataclass(frozen=True)
class WellLabeling:
    positions: Tuple[int, ...]  # positions[k] is the position labelled k
    kinds: Tuple[str, ...]  # "direct" or "indirect", one per consecutive pair

    def __len__(self):
        return len(self.positions)


def arc_kind(v: Sequence[Action], i: int, j: int) -> Optional[str]:
    a, b = v[i], v[j]
    if i < j and (a.sender == b.sender or (a.receiver == b.receiver and not a.barred)):
        return "direct"
    if not b.barred and b.receiver == a.sender and i != j:
        return "indirect"
    return None


def is_well_labeling(v: Sequence[Action], positions: Sequence[int]) -> bool:
    if len(set(positions)) != len(positions):
        return False
    return all(arc_kind(v, positions[k], positions[k + 1]) for k in range(len(positions) - 1))


def find_well_labeling(v: Sequence[Action], start: int, end: int) -> Optional[WellLabeling]:
    """Shortest well-labeling of the ms-sequence v from position start to position end."""
    n = len(v)
    if not (0 <= start < n and 0 <= end < n):
        raise IndexError("position out of range")
    if start == end:
        return WellLabeling((start,), ())
    parent = {start: None}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        for j in range(n):
            if j in parent:
                continue
            kind = arc_kind(v, i, j)
            if kind is None:
                continue
            parent[j] = (i, kind)
            if j == end:
                pos, kinds = [j], []
                while parent[pos[-1]] is not None:
                    prev, k = parent[pos[-1]]
                    pos.append(prev)
                    kinds.append(k)
                return WellLabeling(tuple(reversed(pos)), tuple(reversed(kinds)))
            queue.append(j)
    return None


def well_label_bound(nproc: int) -> int:
    return nproc * nproc + nproc


# -- DOT -------------------------------------------------------------------


def comm_graph_to_dot(g: CommGraph, name: str = "commgraph", condensed: bool = False) -> str:
    comps = sccs(g)
    out = [f'digraph "{name}" {{', "  node [shape=ellipse];"]
    if condensed:
        where = {e: c for c, comp in enumerate(comps) for e in comp}
        for c, comp in enumerate(comps):
            label = "\\n".join(str(g.msc.labels[e]) for e in comp)
            out.append(f'  c{c} [shape=box, label="{c + 1}: {label}"];')
        seen = set()
        for a, b in sorted(g.edges):
            ca, cb = where[a], where[b]
            if ca != cb and (ca, cb) not in seen:
                seen.add((ca, cb))
                out.append(f"  c{ca} -> c{cb};")
    else:
        for c, comp in enumerate(comps):
            out.append(f"  subgraph cluster_{c} {{ label=\"{c + 1}\";")
            for e in comp:
                out.append(f'    e{e} [label="{e}: {g.msc.labels[e]}"];')
            out.append("  }")
        for a, b in sorted(g.edges):
            out.append(f"  e{a} -> e{b};")
    out.append("}")
    return "\n".join(out) + "\n"
