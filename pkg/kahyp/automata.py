"""Epsilon-NFAs with a single initial and a single final state.

Automata are immutable values.  Every construction returns a new ``Nfa``;
per-state epsilon closures and subset steps are cached on the value itself,
so a patched automaton never sees stale caches from its predecessor.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Optional,
    Tuple,
)

import graphviz

from .syntax import Atom, Expr, One, Seq, Star, Sum, Word, Zero

logger = logging.getLogger("kahyp.automata")

EPSILON = ""
DEFAULT_DETERMINIZE_BUDGET = 100_000

StateId = int
Transition = Tuple[StateId, str, StateId]
StateSet = FrozenSet[StateId]


class StateBudgetExceeded(RuntimeError):
    """Raised when a subset construction grows past its state budget."""

    def __init__(self, budget: int):
        super().__init__(f"subset construction exceeded {budget} states")
        self.budget = budget


class UnknownStateError(ValueError):
    """Raised when a state id does not belong to the automaton."""


@dataclass(frozen=True)
class PatchCopy:
    """Origin tag of a state that belongs to a patched-in copy."""

    round: int
    site: StateId
    copy_index: int

    def to_dict(self) -> Dict:
        return {"round": self.round, "site": self.site, "copy_index": self.copy_index}


Origin = Optional[PatchCopy]


@dataclass(frozen=True)
class Nfa:
    num_states: int
    transitions: FrozenSet[Transition]
    initial: StateId
    final: StateId
    origins: Tuple[Origin, ...] = ()

    def __post_init__(self):
        if self.num_states < 1:
            raise ValueError("an automaton needs at least one state")
        if not self.origins:
            object.__setattr__(self, "origins", (None,) * self.num_states)
        elif len(self.origins) != self.num_states:
            raise ValueError("origins must tag every state")
        for state in (self.initial, self.final):
            if not 0 <= state < self.num_states:
                raise ValueError(f"state {state} is out of range")
        for src, label, dst in self.transitions:
            if not (0 <= src < self.num_states and 0 <= dst < self.num_states):
                raise ValueError(f"transition {(src, label, dst)} leaves the state set")
            if len(label) > 1:
                raise ValueError(f"transition label {label!r} is not a letter")

    @property
    def states(self) -> range:
        return range(self.num_states)

    @cached_property
    def labels(self) -> FrozenSet[str]:
        return frozenset(label for _, label, _ in self.transitions if label)

    @cached_property
    def _epsilon_edges(self) -> List[List[StateId]]:
        edges: List[List[StateId]] = [[] for _ in self.states]
        for src, label, dst in sorted(self.transitions):
            if label == EPSILON:
                edges[src].append(dst)
        return edges

    @cached_property
    def _letter_edges(self) -> List[Dict[str, List[StateId]]]:
        edges: List[Dict[str, List[StateId]]] = [{} for _ in self.states]
        for src, label, dst in sorted(self.transitions):
            if label != EPSILON:
                edges[src].setdefault(label, []).append(dst)
        return edges

    @cached_property
    def _closure_cache(self) -> Dict[StateId, StateSet]:
        return {}

    @cached_property
    def _step_cache(self) -> Dict[Tuple[StateSet, str], StateSet]:
        return {}

    def check_state(self, x: StateId) -> None:
        if not 0 <= x < self.num_states:
            raise UnknownStateError(f"unknown state {x}")

    def state_closure(self, x: StateId) -> StateSet:
        cached = self._closure_cache.get(x)
        if cached is not None:
            return cached
        seen = {x}
        stack = [x]
        while stack:
            for nxt in self._epsilon_edges[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        result = frozenset(seen)
        self._closure_cache[x] = result
        return result

    def closure(self, states: Iterable[StateId]) -> StateSet:
        result: set = set()
        for x in states:
            result |= self.state_closure(x)
        return frozenset(result)

    def step(self, states: StateSet, letter: str) -> StateSet:
        """Letter successors of an epsilon-closed set, epsilon-closed again."""
        key = (states, letter)
        cached = self._step_cache.get(key)
        if cached is not None:
            return cached
        targets = set()
        for x in states:
            targets.update(self._letter_edges[x].get(letter, ()))
        result = self.closure(targets)
        self._step_cache[key] = result
        return result

    def size(self) -> Dict[str, int]:
        return {"states": self.num_states, "transitions": len(self.transitions)}


@dataclass(frozen=True)
class Dfa:
    """A complete DFA; state 0 is initial and the empty subset is the sink."""

    subsets: Tuple[StateSet, ...]
    alphabet: Tuple[str, ...]
    delta: Dict[Tuple[int, str], int] = field(compare=False)
    accepting: FrozenSet[int]
    initial: int = 0

    @property
    def states(self) -> range:
        return range(len(self.subsets))

    def accepts(self, u: Word) -> bool:
        state = self.initial
        for letter in u:
            if letter not in self.alphabet:
                return False
            state = self.delta[(state, letter)]
        return state in self.accepting


@dataclass(frozen=True)
class Comparison:
    """Outcome of an inclusion or equivalence check.

    Truthy iff the relation holds.  On failure ``witness`` is a shortest word
    in the difference and ``side`` says which automaton accepts it.
    """

    holds: bool
    witness: Optional[Word] = None
    side: Optional[str] = None

    def __bool__(self) -> bool:
        return self.holds


# Construction


def thompson(e: Expr) -> Nfa:
    """Thompson automaton of ``e`` with initial state 0 and final state 1."""
    transitions: List[Transition] = []
    counter = [2]

    def fresh() -> StateId:
        counter[0] += 1
        return counter[0] - 1

    def build(node: Expr, start: StateId, end: StateId) -> None:
        if isinstance(node, Zero):
            return
        if isinstance(node, One):
            transitions.append((start, EPSILON, end))
        elif isinstance(node, Atom):
            transitions.append((start, node.letter, end))
        elif isinstance(node, Seq):
            mid = fresh()
            build(node.left, start, mid)
            build(node.right, mid, end)
        elif isinstance(node, Sum):
            build(node.left, start, end)
            build(node.right, start, end)
        elif isinstance(node, Star):
            loop = fresh()
            transitions.append((start, EPSILON, loop))
            build(node.inner, loop, loop)
            transitions.append((loop, EPSILON, end))
        else:
            raise TypeError(f"not an expression: {node!r}")

    build(e, 0, 1)
    return Nfa(counter[0], frozenset(transitions), 0, 1)


def append_copy(
    m: Nfa, z: Nfa, origin: Origin = None
) -> Tuple[Nfa, int]:
    """Place ``z`` next to ``m`` with fresh state ids.

    Returns the combined automaton (rooted like ``m``) and the offset added
    to every state of ``z``.  Copied states are tagged with ``origin``.
    """
    offset = m.num_states
    shifted = {(s + offset, a, d + offset) for s, a, d in z.transitions}
    if origin is None:
        copy_origins = z.origins
    else:
        copy_origins = (origin,) * z.num_states
    combined = Nfa(
        m.num_states + z.num_states,
        m.transitions | frozenset(shifted),
        m.initial,
        m.final,
        m.origins + copy_origins,
    )
    return combined, offset


def concat_nfa(m1: Nfa, m2: Nfa) -> Nfa:
    """Automaton for ``L(m1) . L(m2)``."""
    combined, offset = append_copy(m1, m2)
    bridge = (m1.final, EPSILON, m2.initial + offset)
    return Nfa(
        combined.num_states,
        combined.transitions | {bridge},
        m1.initial,
        m2.final + offset,
        combined.origins,
    )


def fan_in(m: Nfa, sources: Iterable[StateId]) -> Nfa:
    """Re-root ``m`` at a fresh state with epsilon edges to every source."""
    root = m.num_states
    edges = {(root, EPSILON, x) for x in sources}
    return Nfa(
        m.num_states + 1,
        m.transitions | frozenset(edges),
        root,
        m.final,
        m.origins + (None,),
    )


# Queries


def accepts(m: Nfa, u: Word) -> bool:
    current = m.state_closure(m.initial)
    for letter in u:
        if not current:
            return False
        current = m.step(current, letter)
    return m.final in current


def state_language(m: Nfa, x: StateId) -> Nfa:
    """``m`` re-rooted at ``x``: its language is the language accepted by ``x``."""
    m.check_state(x)
    return Nfa(m.num_states, m.transitions, x, m.final, m.origins)


def w_reachable(m: Nfa, x: StateId, w: Word) -> StateSet:
    """All states reachable from ``x`` by reading ``w``, epsilon moves included."""
    m.check_state(x)
    current = m.state_closure(x)
    for letter in w:
        current = m.step(current, letter)
    return current


def reverse_nfa(m: Nfa) -> Nfa:
    return Nfa(
        m.num_states,
        frozenset((d, a, s) for s, a, d in m.transitions),
        m.final,
        m.initial,
        m.origins,
    )


def determinize(
    m: Nfa,
    alphabet: Optional[Iterable[str]] = None,
    budget: int = DEFAULT_DETERMINIZE_BUDGET,
) -> Dfa:
    """Subset construction over ``alphabet`` (default: the labels of ``m``)."""
    sigma = tuple(sorted(set(alphabet) if alphabet is not None else m.labels))
    start = m.state_closure(m.initial)
    index: Dict[StateSet, int] = {start: 0}
    subsets: List[StateSet] = [start]
    delta: Dict[Tuple[int, str], int] = {}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for letter in sigma:
            nxt = m.step(current, letter)
            if nxt not in index:
                if len(subsets) >= budget:
                    raise StateBudgetExceeded(budget)
                index[nxt] = len(subsets)
                subsets.append(nxt)
                queue.append(nxt)
            delta[(index[current], letter)] = index[nxt]
    if frozenset() not in index:
        if len(subsets) >= budget:
            raise StateBudgetExceeded(budget)
        sink = len(subsets)
        index[frozenset()] = sink
        subsets.append(frozenset())
        for letter in sigma:
            delta[(sink, letter)] = sink
    accepting = frozenset(i for i, s in enumerate(subsets) if m.final in s)
    logger.debug("Determinized %d NFA states into %d subsets", m.num_states, len(subsets))
    return Dfa(tuple(subsets), sigma, delta, accepting)


def _product_search(
    m1: Nfa,
    m2: Nfa,
    alphabet: Iterable[str],
    is_bad: Callable[[bool, bool], bool],
    is_dead: Callable[[StateSet, StateSet], bool],
    budget: int,
) -> Optional[Word]:
    """Breadth-first search of the subset product; returns a shortest bad word."""
    sigma = sorted(set(alphabet))
    start = (m1.state_closure(m1.initial), m2.state_closure(m2.initial))
    parent: Dict[Tuple[StateSet, StateSet], Optional[Tuple[Tuple[StateSet, StateSet], str]]] = {
        start: None
    }
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        left, right = pair
        if is_bad(m1.final in left, m2.final in right):
            letters: List[str] = []
            node = pair
            while parent[node] is not None:
                node, letter = parent[node]
                letters.append(letter)
            return "".join(reversed(letters))
        for letter in sigma:
            nxt = (m1.step(left, letter), m2.step(right, letter))
            if nxt in parent or is_dead(*nxt):
                continue
            if len(parent) >= budget:
                raise StateBudgetExceeded(budget)
            parent[nxt] = (pair, letter)
            queue.append(nxt)
    return None


def language_inclusion(
    m1: Nfa, m2: Nfa, budget: int = DEFAULT_DETERMINIZE_BUDGET
) -> Comparison:
    """Decide ``L(m1) ⊆ L(m2)``; a failure carries a shortest witness."""
    witness = _product_search(
        m1,
        m2,
        m1.labels,
        lambda acc1, acc2: acc1 and not acc2,
        lambda left, right: not left,
        budget,
    )
    if witness is None:
        return Comparison(True)
    return Comparison(False, witness, "left")


def language_equiv(
    m1: Nfa, m2: Nfa, budget: int = DEFAULT_DETERMINIZE_BUDGET
) -> Comparison:
    """Decide ``L(m1) = L(m2)``; ``side`` names the automaton accepting the witness."""
    witness = _product_search(
        m1,
        m2,
        m1.labels | m2.labels,
        lambda acc1, acc2: acc1 != acc2,
        lambda left, right: not left and not right,
        budget,
    )
    if witness is None:
        return Comparison(True)
    side = "left" if accepts(m1, witness) else "right"
    return Comparison(False, witness, side)


# Export

_COPY_COLOURS = ("cadetblue1", "lightgoldenrod1", "palegreen", "lightpink", "plum1")


def _edge_label(label: str) -> str:
    return label if label else "eps"


def to_dot(m: Nfa, name: str = "nfa") -> str:
    """DOT source with nodes in StateId order; patched-in copies are coloured per round."""
    dot = graphviz.Digraph(name)
    dot.attr("graph", rankdir="LR")
    dot.attr("node", fontname="Palatino")
    dot.attr("edge", fontname="Palatino")
    for state in m.states:
        origin = m.origins[state]
        if state == m.initial:
            colour = "green"
        elif origin is not None:
            colour = _COPY_COLOURS[(origin.round - 1) % len(_COPY_COLOURS)]
        else:
            colour = "gray"
        attrs = {
            "shape": "doublecircle" if state == m.final else "circle",
            "style": "filled",
            "color": colour,
        }
        if origin is not None:
            attrs["tooltip"] = f"round {origin.round} site {origin.site} copy {origin.copy_index}"
        dot.node(str(state), **attrs)
    for src, label, dst in sorted(m.transitions):
        if label == EPSILON:
            dot.edge(str(src), str(dst), label="eps", style="dotted", color="blue")
        else:
            dot.edge(str(src), str(dst), label=_edge_label(label), color="black")
    return dot.source


def nfa_to_dict(m: Nfa) -> Dict:
    """Stable JSON-ready form; epsilon edges are labelled ``"eps"``."""
    patch_origins = {
        str(state): origin.to_dict()
        for state, origin in enumerate(m.origins)
        if origin is not None
    }
    return {
        "states": m.num_states,
        "initial": m.initial,
        "final": m.final,
        "transitions": [[s, _edge_label(a), d] for s, a, d in sorted(m.transitions)],
        "origins": patch_origins,
    }


def nfa_from_dict(data: Dict) -> Nfa:
    try:
        num_states = int(data["states"])
        transitions = frozenset(
            (int(s), EPSILON if a == "eps" else str(a), int(d))
            for s, a, d in data["transitions"]
        )
        origins: List[Origin] = [None] * num_states
        for state, origin in data.get("origins", {}).items():
            origins[int(state)] = PatchCopy(
                int(origin["round"]), int(origin["site"]), int(origin["copy_index"])
            )
        return Nfa(
            num_states,
            transitions,
            int(data["initial"]),
            int(data["final"]),
            tuple(origins),
        )
    except (KeyError, TypeError, IndexError) as e:
        raise ValueError(f"Invalid automaton data: {e}")


__all__ = [
    "EPSILON",
    "DEFAULT_DETERMINIZE_BUDGET",
    "StateId",
    "StateSet",
    "Transition",
    "StateBudgetExceeded",
    "UnknownStateError",
    "PatchCopy",
    "Nfa",
    "Dfa",
    "Comparison",
    "thompson",
    "append_copy",
    "concat_nfa",
    "fan_in",
    "accepts",
    "state_language",
    "w_reachable",
    "reverse_nfa",
    "determinize",
    "language_inclusion",
    "language_equiv",
    "to_dot",
    "nfa_to_dict",
    "nfa_from_dict",
]
