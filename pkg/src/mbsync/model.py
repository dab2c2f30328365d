"""Processes, actions, CFMs, process networks and the global transition system."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

SEND = "!"
RECV = "?"
BSEND = "!!"  # unmatched (overlined) send, only used in marked words

_IDENT = r"[A-Za-z0-9_]+"
_ACTION_RE = re.compile(rf"^\s*({_IDENT})\s*(!!|!|\?)\s*({_IDENT})\s*\(\s*({_IDENT})\s*\)\s*$")


class ModelError(ValueError):
    """Malformed input; `line` is 1-based when known."""

    def __init__(self, msg: str, line: Optional[int] = None, source: Optional[str] = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {msg}" if where else msg)


class BudgetExceeded(RuntimeError):
    """Raised when an exploration passes its node cap."""

    def __init__(self, msg: str, explored: int = 0):
        super().__init__(msg)
        self.explored = explored


class Action(NamedTuple):
    """p!q(m), p?q(m) or the overlined send p!!q(m)."""

    kind: str
    actor: str
    peer: str
    msg: str

    def __str__(self):
        return f"{self.actor}{self.kind}{self.peer}({self.msg})"

    @property
    def is_send(self) -> bool:
        return self.kind != RECV

    @property
    def is_receive(self) -> bool:
        return self.kind == RECV

    @property
    def barred(self) -> bool:
        return self.kind == BSEND

    @property
    def sender(self) -> str:
        return self.peer if self.kind == RECV else self.actor

    @property
    def receiver(self) -> str:
        return self.actor if self.kind == RECV else self.peer

    @property
    def channel(self) -> Tuple[str, str]:
        return (self.sender, self.receiver)

    def bar(self) -> "Action":
        assert self.kind != RECV
        return Action(BSEND, self.actor, self.peer, self.msg)

    def unbar(self) -> "Action":
        return Action(SEND, self.actor, self.peer, self.msg) if self.kind == BSEND else self

    def matching_receive(self) -> "Action":
        assert self.kind != RECV
        return Action(RECV, self.peer, self.actor, self.msg)

    def matching_send(self) -> "Action":
        assert self.kind == RECV
        return Action(SEND, self.peer, self.actor, self.msg)


def send(p: str, q: str, m: str) -> Action:
    return Action(SEND, p, q, m)


def recv(q: str, p: str, m: str) -> Action:
    return Action(RECV, q, p, m)


def parse_action(text: str, allow_barred: bool = False) -> Action:
    mt = _ACTION_RE.match(text)
    if not mt:
        raise ModelError(f"malformed action {text.strip()!r}")
    a, kind, b, m = mt.groups()
    if kind == BSEND and not allow_barred:
        raise ModelError(f"overlined send not allowed here: {text.strip()!r}")
    if a == b:
        raise ModelError(f"self channel {a}{kind}{b} is not a channel")
    return Action(kind, a, b, m)


def parse_trace(text: str) -> Tuple[Action, ...]:
    """One action per line; blank lines and `#` comments are ignored."""
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(parse_action(line))
        except ModelError as e:
            raise ModelError(str(e), line=no) from None
    return tuple(out)


def render_trace(trace: Iterable[Action]) -> str:
    return "".join(f"{a}\n" for a in trace)


def fmt(trace: Iterable[Action]) -> str:
    return " ".join(str(a) for a in trace) or "ε"


# -- process networks ------------------------------------------------------


@dataclass(frozen=True)
class Network:
    """Buffer assignment for channels. `table` overrides the built-in rule."""

    name: str
    table: Optional[Tuple[Tuple[Tuple[str, str], object], ...]] = None

    def bf(self, p: str, q: str):
        if self.name == "mb":
            return q
        if self.name == "p2p":
            return (p, q)
        for ch, b in self.table or ():
            if ch == (p, q):
                return b
        raise KeyError(f"channel {p}->{q} has no buffer in network {self.name}")

    def buffer_of(self, a: Action):
        return self.bf(a.sender, a.receiver)

    def is_many_to_one(self) -> bool:
        if self.table is None:
            return True
        owner = {}
        for (p, q), b in self.table:
            if owner.setdefault(b, q) != q:
                return False
        return True

    @staticmethod
    def custom(name: str, mapping: Mapping[Tuple[str, str], object]) -> "Network":
        return Network(name, tuple(sorted(mapping.items(), key=repr)))

    def __str__(self):
        return self.name


P2P = Network("p2p")
MB = Network("mb")


def network(name: str) -> Network:
    if name == "mb":
        return MB
    if name == "p2p":
        return P2P
    raise ModelError(f"unknown network {name!r} (expected mb or p2p)")


def require_many_to_one(net: Network):
    if not net.is_many_to_one():
        raise ModelError(f"network {net.name} is not many-to-one")


# -- CFMs ------------------------------------------------------------------


@dataclass(frozen=True)
class Process:
    name: str
    initial: str
    states: FrozenSet[str]
    transitions: Tuple[Tuple[str, Action, str], ...]
    _out: Dict[str, Tuple[Tuple[Action, str], ...]] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.initial not in self.states:
            raise ModelError(f"process {self.name}: initial state {self.initial} unknown")
        out: Dict[str, list] = {s: [] for s in self.states}
        for src, a, dst in self.transitions:
            if a.actor != self.name:
                raise ModelError(f"process {self.name}: transition {src} -> {dst} labelled {a} has actor {a.actor}")
            if a.kind == BSEND:
                raise ModelError(f"process {self.name}: overlined send {a} in a process")
            if src not in self.states or dst not in self.states:
                raise ModelError(f"process {self.name}: unknown state in {src} -> {dst}")
            out[src].append((a, dst))
        object.__setattr__(self, "_out", {s: tuple(v) for s, v in out.items()})

    def out(self, state: str) -> Tuple[Tuple[Action, str], ...]:
        return self._out[state]

    def post(self, state: str, a: Action) -> Tuple[str, ...]:
        return tuple(dst for b, dst in self._out[state] if b == a)


@dataclass(frozen=True)
class Cfm:
    """A tuple of per-process finite LTSs (declaration order is the process order)."""

    name: str
    procs: Tuple[Process, ...]

    def __post_init__(self):
        if not self.procs:
            raise ModelError("a CFM needs at least one process")
        names = [p.name for p in self.procs]
        if len(set(names)) != len(names):
            raise ModelError("duplicate process names")
        for p in self.procs:
            for _, a, _ in p.transitions:
                if a.peer not in names:
                    raise ModelError(f"process {p.name}: unknown peer {a.peer} in {a}")

    @property
    def processes(self) -> Tuple[str, ...]:
        return tuple(p.name for p in self.procs)

    def index(self, p: str) -> int:
        return self.processes.index(p)

    def proc(self, p: str) -> Process:
        return self.procs[self.index(p)]

    @property
    def initial(self) -> Tuple[str, ...]:
        return tuple(p.initial for p in self.procs)

    @property
    def size(self) -> int:
        return sum(len(p.states) + len(p.transitions) for p in self.procs)

    def actions(self) -> FrozenSet[Action]:
        return frozenset(a for p in self.procs for _, a, _ in p.transitions)

    def sends(self) -> FrozenSet[Action]:
        return frozenset(a for a in self.actions() if a.is_send)

    def receives(self) -> FrozenSet[Action]:
        return frozenset(a for a in self.actions() if a.is_receive)

    def messages(self) -> FrozenSet[str]:
        return frozenset(a.msg for a in self.actions())

    def global_states(self) -> Iterator[Tuple[str, ...]]:
        from itertools import product

        return product(*(sorted(p.states) for p in self.procs))


def make_cfm(name: str, spec: Mapping[str, Tuple[str, Iterable[Tuple[str, str, str]]]]) -> Cfm:
    """Build from {proc: (initial, [(src, action text, dst), ...])}."""
    procs = []
    for pname, (init, trans) in spec.items():
        ts = tuple((s, parse_action(a), d) for s, a, d in trans)
        states = {init} | {s for s, _, _ in ts} | {d for _, _, d in ts}
        procs.append(Process(pname, init, frozenset(states), ts))
    return Cfm(name, tuple(procs))


def cfm_from_traces(name: str, traces: Iterable[Sequence[Action]], processes: Sequence[str] = ()) -> Cfm:
    """Smallest tree-shaped CFM whose process p accepts the p-projections of `traces`.

    Each process is the prefix tree of its projections, so every given
    trace is a trace of the result (if viable).
    """
    traces = [tuple(t) for t in traces]
    order = list(processes)
    for t in traces:
        for a in t:
            for x in (a.actor, a.peer):
                if x not in order:
                    order.append(x)
    procs = []
    for p in order:
        nodes = {(): "s0"}
        trans = []
        for t in traces:
            path = ()
            for a in projection(t, p):
                nxt = path + (a,)
                if nxt not in nodes:
                    nodes[nxt] = f"s{len(nodes)}"
                    trans.append((nodes[path], a, nodes[nxt]))
                path = nxt
        procs.append(Process(p, "s0", frozenset(nodes.values()), tuple(trans)))
    return Cfm(name, tuple(procs))


# -- configurations and the global transition system ----------------------


class Configuration(NamedTuple):
    """Global state plus the non-empty buffers, sorted by buffer name."""

    states: Tuple[str, ...]
    buffers: Tuple[Tuple[object, Tuple[Tuple[Tuple[str, str], str], ...]], ...] = ()

    def buffer(self, b) -> Tuple[Tuple[Tuple[str, str], str], ...]:
        for key, w in self.buffers:
            if key == b:
                return w
        return ()

    def with_buffer(self, b, w) -> Tuple:
        rest = [(k, v) for k, v in self.buffers if k != b]
        if w:
            rest.append((b, tuple(w)))
        rest.sort(key=lambda kv: repr(kv[0]))
        return tuple(rest)

    def __str__(self):
        bufs = ", ".join(f"{k}=[{' '.join(f'{c[0]}>{c[1]}:{m}' for c, m in w)}]" for k, w in self.buffers)
        return f"<{','.join(self.states)} | {bufs}>"


def initial_configuration(cfm: Cfm) -> Configuration:
    return Configuration(cfm.initial, ())


def step(cfm: Cfm, net: Network, conf: Configuration, act: Action) -> FrozenSet[Configuration]:
    """All successors of `conf` by `act`; empty means the action is blocked."""
    i = cfm.index(act.actor)
    targets = cfm.procs[i].post(conf.states[i], act)
    if not targets:
        return frozenset()
    b = net.bf(act.sender, act.receiver)
    w = conf.buffer(b)
    entry = ((act.sender, act.receiver), act.msg)
    if act.kind == SEND:
        bufs = conf.with_buffer(b, w + (entry,))
    elif act.kind == RECV:
        if not w or w[0] != entry:
            return frozenset()
        bufs = conf.with_buffer(b, w[1:])
    else:
        raise ModelError(f"cannot execute overlined send {act}")
    out = set()
    for t in targets:
        st = list(conf.states)
        st[i] = t
        out.add(Configuration(tuple(st), bufs))
    return frozenset(out)


def enabled(cfm: Cfm, net: Network, conf: Configuration) -> Iterator[Tuple[Action, Configuration]]:
    seen = set()
    for i, p in enumerate(cfm.procs):
        for a, _ in p.out(conf.states[i]):
            if a in seen:
                continue
            seen.add(a)
            for c in step(cfm, net, conf, a):
                yield a, c


def run(cfm: Cfm, net: Network, trace: Sequence[Action], start: Optional[Configuration] = None):
    """Set of configurations reached by `trace`, or the index of the first blocked action."""
    confs = {start or initial_configuration(cfm)}
    for k, a in enumerate(trace):
        nxt = set()
        for c in confs:
            nxt |= step(cfm, net, c, a)
        if not nxt:
            return k
        confs = nxt
    return frozenset(confs)


def is_trace(cfm: Cfm, net: Network, trace: Sequence[Action]) -> bool:
    return not isinstance(run(cfm, net, trace), int)


def is_viable(net: Network, trace: Sequence[Action]) -> bool:
    """Prefix counting plus k-th receive matches k-th send, for every buffer."""
    sends: Dict[object, List[Action]] = {}
    nrecv: Dict[object, int] = {}
    for a in trace:
        if a.kind == RECV:
            b = net.bf(a.sender, a.receiver)
            k = nrecv.get(b, 0)
            pending = sends.get(b, [])
            if k >= len(pending):
                return False
            s = pending[k]
            if (s.actor, s.peer, s.msg) != (a.peer, a.actor, a.msg):
                return False
            nrecv[b] = k + 1
        else:
            sends.setdefault(net.bf(a.sender, a.receiver), []).append(a)
    return True


def projection(trace: Iterable[Action], p: str) -> Tuple[Action, ...]:
    return tuple(a for a in trace if a.actor == p)


def traces_up_to(cfm: Cfm, net: Network, maxlen: int, cap: int = 10**6) -> FrozenSet[Tuple[Action, ...]]:
    """All traces of length <= maxlen, by breadth-first search."""
    if maxlen < 0:
        raise ValueError("maxlen must be >= 0")
    found = {(): frozenset([initial_configuration(cfm)])}
    frontier = dict(found)
    nodes = 1
    for _ in range(maxlen):
        nxt: Dict[Tuple[Action, ...], set] = {}
        for t, confs in frontier.items():
            for c in confs:
                for a, c2 in enabled(cfm, net, c):
                    nxt.setdefault(t + (a,), set()).add(c2)
                    nodes += 1
                    if nodes > cap:
                        raise BudgetExceeded(f"traces_up_to passed {cap} nodes", nodes)
        frontier = {t: frozenset(c) for t, c in nxt.items()}
        found.update(frontier)
        if not frontier:
            break
    return frozenset(found)


def reachable_configurations(cfm: Cfm, net: Network, max_buffer: Optional[int] = None, cap: int = 10**6):
    """Explicit BFS over configurations; buffers longer than max_buffer are pruned.

    Returns {configuration: predecessor (conf, action)} so that paths can be rebuilt.
    """
    c0 = initial_configuration(cfm)
    parent = {c0: None}
    queue = deque([c0])
    while queue:
        c = queue.popleft()
        for a, c2 in enabled(cfm, net, c):
            if c2 in parent:
                continue
            if max_buffer is not None and any(len(w) > max_buffer for _, w in c2.buffers):
                continue
            parent[c2] = (c, a)
            if len(parent) > cap:
                raise BudgetExceeded(f"configuration search passed {cap} nodes", len(parent))
            queue.append(c2)
    return parent


def path_to(parent, conf) -> Tuple[Action, ...]:
    out = []
    while parent[conf] is not None:
        conf, a = parent[conf]
        out.append(a)
    return tuple(reversed(out))


# -- .cfm text format ------------------------------------------------------

_TRANS_RE = re.compile(rf"^({_IDENT})\s*->\s*({_IDENT})\s*:\s*(.+)$")


def parse_cfm(text: str, source: Optional[str] = None) -> Cfm:
    name = None
    procs: List[Process] = []
    cur = None  # [pname, init, transitions, states, line]
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()

        def err(msg):
            return ModelError(msg, no, source)

        if words[0] == "system":
            if len(words) != 2 or not re.fullmatch(_IDENT, words[1]):
                raise err("expected `system NAME`")
            if name is not None:
                raise err("duplicate system header")
            name = words[1]
        elif words[0] == "process":
            if cur is not None:
                raise err(f"process {cur[0]} not closed by endprocess")
            if len(words) != 2 or not re.fullmatch(_IDENT, words[1]):
                raise err("expected `process P`")
            cur = [words[1], None, [], set(), no]
        elif words[0] == "init":
            if cur is None:
                raise err("`init` outside a process block")
            if len(words) != 2 or not re.fullmatch(_IDENT, words[1]):
                raise err("expected `init STATE`")
            if cur[1] is not None:
                raise err("duplicate init")
            cur[1] = words[1]
        elif words[0] == "endprocess":
            if cur is None:
                raise err("endprocess without process")
            pname, init, trans, states, start = cur
            if init is None:
                raise ModelError(f"process {pname} has no init", start, source)
            try:
                procs.append(Process(pname, init, frozenset(states | {init}), tuple(trans)))
            except ModelError as e:
                raise ModelError(str(e), start, source) from None
            cur = None
        else:
            mt = _TRANS_RE.match(line)
            if not mt:
                raise err(f"cannot parse {line!r}")
            if cur is None:
                raise err("transition outside a process block")
            try:
                a = parse_action(mt.group(3))
            except ModelError as e:
                raise err(str(e)) from None
            if a.actor != cur[0]:
                raise err(f"action {a} is not performed by process {cur[0]}")
            cur[2].append((mt.group(1), a, mt.group(2)))
            cur[3].update((mt.group(1), mt.group(2)))
    if cur is not None:
        raise ModelError(f"process {cur[0]} not closed by endprocess", cur[4], source)
    if name is None:
        raise ModelError("missing `system NAME` header", None, source)
    try:
        return Cfm(name, tuple(procs))
    except ModelError as e:
        raise ModelError(str(e), None, source) from None


def render_cfm(cfm: Cfm) -> str:
    lines = [f"system {cfm.name}"]
    for p in cfm.procs:
        lines.append(f"process {p.name}")
        lines.append(f"init {p.initial}")
        for s, a, d in p.transitions:
            lines.append(f"{s} -> {d} : {a}")
        isolated = p.states - {p.initial} - {s for s, _, _ in p.transitions} - {d for _, _, d in p.transitions}
        for s in sorted(isolated):
            lines.append(f"# isolated state {s}")
        lines.append("endprocess")
    return "\n".join(lines) + "\n"
