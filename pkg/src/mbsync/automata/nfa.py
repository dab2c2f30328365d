"""Lazy NFAs: successor functions instead of tables, plus the usual operations."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from ..model import BudgetExceeded, ModelError, parse_action

EPS = None
State = Hashable
Letter = Hashable


class Nfa:
    """Implicit automaton. Subclasses provide `initial`, `edges`, `accepting`."""

    alphabet: Optional[FrozenSet[Letter]] = None

    def initial(self) -> Iterable[State]:
        raise NotImplementedError

    def edges(self, state: State) -> Iterable[Tuple[Letter, State]]:
        """Outgoing (letter, target) pairs; letter None is an epsilon move."""
        raise NotImplementedError

    def accepting(self, state: State) -> bool:
        raise NotImplementedError

    def step(self, state: State, letter: Letter) -> Set[State]:
        return {t for a, t in self.edges(state) if a == letter}


class LazyNfa(Nfa):
    def __init__(self, initial, edges, accepting, alphabet=None, name="nfa"):
        self._initial = tuple(initial)
        self._edges = edges
        self._accepting = accepting
        self.alphabet = frozenset(alphabet) if alphabet is not None else None
        self.name = name

    def initial(self):
        return self._initial

    def edges(self, state):
        return self._edges(state)

    def accepting(self, state):
        return self._accepting(state)


class ExplicitNfa(Nfa):
    def __init__(self, states, initial, finals, transitions, alphabet=None, name="nfa"):
        self.name = name
        self.states = frozenset(states)
        self._initial = tuple(initial)
        self.finals = frozenset(finals)
        self.transitions = tuple(transitions)
        self._out: Dict[State, List[Tuple[Letter, State]]] = {s: [] for s in self.states}
        for s, a, t in self.transitions:
            self._out.setdefault(s, []).append((a, t))
            self._out.setdefault(t, [])
        letters = {a for _, a, _ in self.transitions if a is not EPS}
        self.alphabet = frozenset(alphabet) if alphabet is not None else frozenset(letters)

    def initial(self):
        return self._initial

    def edges(self, state):
        return self._out.get(state, ())

    def accepting(self, state):
        return state in self.finals

    def __repr__(self):
        return f"ExplicitNfa({self.name}, {len(self.states)} states, {len(self.transitions)} transitions)"


class LetterNfa(Nfa):
    """Epsilon-free automaton given by a step function; its letters come from the other factors of a product."""

    def __init__(self, initial, step, accepting, name="letters"):
        self._initial = tuple(initial)
        self._step = step
        self._accepting = accepting
        self.name = name

    def initial(self):
        return self._initial

    def edges(self, state):
        return ()

    def step(self, state, letter):
        return set(self._step(state, letter))

    def accepting(self, state):
        return self._accepting(state)


class ProductNfa(Nfa):
    """Synchronous product: letters move every component, epsilons move one at a time.

    The first component proposes letters; the others answer through `step`.
    """

    def __init__(self, components: Sequence[Nfa], name="product"):
        self.components = tuple(components)
        self.name = name
        self.alphabet = self.components[0].alphabet if self.components else None

    def initial(self):
        from itertools import product

        return [tuple(x) for x in product(*(list(c.initial()) for c in self.components))]

    def edges(self, state):
        from itertools import product

        first: Dict[Letter, List[State]] = {}
        for k, c in enumerate(self.components):
            for a, t in c.edges(state[k]):
                if a is EPS:
                    yield EPS, state[:k] + (t,) + state[k + 1 :]
                elif k == 0:
                    first.setdefault(a, []).append(t)
        for a, targets in first.items():
            rest = [sorted(c.step(s, a), key=repr) for c, s in zip(self.components[1:], state[1:])]
            if all(rest):
                for combo in product(targets, *rest):
                    yield a, tuple(combo)

    def accepting(self, state):
        return all(c.accepting(s) for c, s in zip(self.components, state))


def product(*nfas: Nfa) -> ProductNfa:
    return ProductNfa(nfas)


# -- basic algorithms ------------------------------------------------------


def eps_closure(nfa: Nfa, states: Iterable[State]) -> FrozenSet[State]:
    seen = set(states)
    stack = list(seen)
    while stack:
        s = stack.pop()
        for a, t in nfa.edges(s):
            if a is EPS and t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def post(nfa: Nfa, states: Iterable[State], letter: Letter) -> FrozenSet[State]:
    out = set()
    for s in states:
        out |= nfa.step(s, letter)
    return eps_closure(nfa, out)


def accepts(nfa: Nfa, word: Sequence[Letter]) -> bool:
    if isinstance(nfa, ProductNfa):
        return all(accepts(c, word) for c in nfa.components)
    cur = eps_closure(nfa, nfa.initial())
    for a in word:
        cur = post(nfa, cur, a)
        if not cur:
            return False
    return any(nfa.accepting(s) for s in cur)


def explore(nfa: Nfa, cap: int = 10**6) -> ExplicitNfa:
    """Materialize the reachable part."""
    init = list(nfa.initial())
    seen = set(init)
    queue = deque(init)
    trans = []
    while queue:
        s = queue.popleft()
        for a, t in nfa.edges(s):
            trans.append((s, a, t))
            if t not in seen:
                seen.add(t)
                if len(seen) > cap:
                    raise BudgetExceeded(f"automaton passed {cap} states", len(seen))
                queue.append(t)
    finals = {s for s in seen if nfa.accepting(s)}
    return ExplicitNfa(seen, init, finals, trans, alphabet=nfa.alphabet, name=getattr(nfa, "name", "nfa"))


@dataclass
class Witness:
    word: Tuple[Letter, ...]
    path: Tuple[State, ...]  # states visited, including epsilon steps
    letters: Tuple[Letter, ...]  # letter per step of `path` (None for epsilon)
    explored: int


@dataclass
class SearchStats:
    explored: int = 0


def emptiness(
    nfa: Nfa,
    weight: Optional[Callable[[Letter], int]] = None,
    cap: Optional[int] = None,
    stats: Optional[SearchStats] = None,
    cancel: Optional[Callable[[], bool]] = None,
) -> Optional[Witness]:
    """None if the language is empty, else a witness of least total weight.

    Weights must be 0 or 1 (default: letters 1, epsilon 0); 0-1 BFS.
    """
    wt = weight or (lambda a: 0 if a is EPS else 1)
    dist: Dict[State, int] = {}
    parent: Dict[State, Optional[Tuple[State, Letter]]] = {}
    dq: deque = deque()
    for s in nfa.initial():
        if s not in dist:
            dist[s] = 0
            parent[s] = None
            dq.append((0, s))
    done = set()
    while dq:
        d, s = dq.popleft()
        if s in done or d > dist[s]:
            continue
        done.add(s)
        if stats is not None:
            stats.explored = len(done)
        if cap is not None and len(done) > cap:
            raise BudgetExceeded(f"search passed {cap} states", len(done))
        if cancel is not None and len(done) % 4096 == 0 and cancel():
            raise BudgetExceeded("search cancelled", len(done))
        if nfa.accepting(s):
            path, letters = [s], []
            while parent[path[-1]] is not None:
                prev, a = parent[path[-1]]
                letters.append(a)
                path.append(prev)
            path.reverse()
            letters.reverse()
            word = tuple(a for a in letters if a is not EPS)
            return Witness(word, tuple(path), tuple(letters), len(done))
        for a, t in nfa.edges(s):
            w = wt(a)
            nd = d + w
            if t not in dist or nd < dist[t]:
                dist[t] = nd
                parent[t] = (s, a)
                if w == 0:
                    dq.appendleft((nd, t))
                else:
                    dq.append((nd, t))
    return None


# -- determinization, minimization, complement ----------------------------


def determinize(nfa: Nfa, alphabet: Optional[Iterable[Letter]] = None, cap: int = 10**6) -> ExplicitNfa:
    """Complete DFA over `alphabet`; states are frozensets (the empty set is the sink)."""
    alph = sorted(alphabet if alphabet is not None else nfa.alphabet, key=repr)
    start = eps_closure(nfa, nfa.initial())
    seen = {start}
    queue = deque([start])
    trans = []
    while queue:
        s = queue.popleft()
        for a in alph:
            t = post(nfa, s, a)
            trans.append((s, a, t))
            if t not in seen:
                seen.add(t)
                if len(seen) > cap:
                    raise BudgetExceeded(f"subset construction passed {cap} states", len(seen))
                queue.append(t)
    finals = {s for s in seen if any(nfa.accepting(x) for x in s)}
    return ExplicitNfa(seen, [start], finals, trans, alphabet=alph, name="dfa")


def minimize(dfa: ExplicitNfa) -> ExplicitNfa:
    """Moore partition refinement of a complete DFA; states become block numbers."""
    alph = sorted(dfa.alphabet, key=repr)
    delta = {(s, a): t for s, a, t in dfa.transitions}
    # restrict to reachable states
    start = dfa.initial()[0]
    reach = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for a in alph:
            t = delta[(s, a)]
            if t not in reach:
                reach.add(t)
                stack.append(t)
    states = sorted(reach, key=repr)
    block = {s: int(s in dfa.finals) for s in states}
    while True:
        sig = {s: (block[s],) + tuple(block[delta[(s, a)]] for a in alph) for s in states}
        ids: Dict[Tuple, int] = {}
        for s in states:
            ids.setdefault(sig[s], len(ids))
        new = {s: ids[sig[s]] for s in states}
        if len(set(new.values())) == len(set(block.values())):
            block = new
            break
        block = new
    trans = {(block[s], a, block[delta[(s, a)]]) for s in states for a in alph}
    finals = {block[s] for s in states if s in dfa.finals}
    return ExplicitNfa(set(block.values()), [block[start]], finals, sorted(trans, key=repr), alphabet=alph, name="min")


def complement_on_the_fly(nfa: Nfa, alphabet: Optional[Iterable[Letter]] = None) -> LazyNfa:
    """Subset states built on demand; accepting iff no member accepts."""
    alph = frozenset(alphabet if alphabet is not None else nfa.alphabet)
    if alph is None:
        raise ValueError("complement needs an alphabet")
    start = eps_closure(nfa, nfa.initial())

    def edges(s):
        for a in alph:
            yield a, post(nfa, s, a)

    return LazyNfa([start], edges, lambda s: not any(nfa.accepting(x) for x in s), alphabet=alph, name="complement")


# -- .nfa text format ------------------------------------------------------

_IDENT = r"[A-Za-z0-9_]+"
_TRANS_RE = re.compile(rf"^({_IDENT})\s*->\s*({_IDENT})\s*:\s*(.+)$")


def parse_nfa(text: str, source: Optional[str] = None) -> ExplicitNfa:
    name, init, finals = None, None, None
    states: Set[str] = set()
    trans = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "nfa":
            if len(words) != 2:
                raise ModelError("expected `nfa NAME`", no, source)
            name = words[1]
        elif words[0] == "init":
            if len(words) != 2:
                raise ModelError("expected `init STATE`", no, source)
            init = words[1]
        elif words[0] == "final":
            finals = set(words[1:])
        else:
            mt = _TRANS_RE.match(line)
            if not mt:
                raise ModelError(f"cannot parse {line!r}", no, source)
            label = mt.group(3).strip()
            if re.fullmatch(_IDENT, label):
                a = label  # plain letter, for NFAs fed to the benchmark generator
            else:
                try:
                    a = parse_action(label, allow_barred=True)
                except ModelError as e:
                    raise ModelError(str(e), no, source) from None
            trans.append((mt.group(1), a, mt.group(2)))
            states.update((mt.group(1), mt.group(2)))
    if name is None:
        raise ModelError("missing `nfa NAME` header", None, source)
    if init is None:
        raise ModelError("missing `init` line", None, source)
    finals = finals or set()
    return ExplicitNfa(states | {init} | finals, [init], finals, trans, name=name)


def render_nfa(nfa: ExplicitNfa) -> str:
    lines = [f"nfa {nfa.name}", f"init {nfa.initial()[0]}", "final " + " ".join(sorted(map(str, nfa.finals)))]
    for s, a, t in nfa.transitions:
        lines.append(f"{s} -> {t} : {a}")
    return "\n".join(lines) + "\n"


def nfa_to_dot(nfa: ExplicitNfa, name: str = "nfa") -> str:
    ids = {s: f"n{k}" for k, s in enumerate(sorted(nfa.states, key=repr))}
    out = [f'digraph "{name}" {{', "  rankdir=LR;", '  start [shape=point];']
    for s, i in ids.items():
        shape = "doublecircle" if s in nfa.finals else "circle"
        label = str(s).replace('"', "'")
        out.append(f'  {i} [shape={shape}, label="{label}"];')
    for s in nfa.initial():
        out.append(f"  start -> {ids[s]};")
    for s, a, t in nfa.transitions:
        lab = "ε" if a is EPS else str(a)
        out.append(f'  {ids[s]} -> {ids[t]} [label="{lab}"];')
    out.append("}")
    return "\n".join(out) + "\n"
