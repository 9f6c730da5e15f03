"""Length-bounded brute-force semantics used as an independent oracle."""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Sequence, Set

from .syntax import Atom, Expr, Hypothesis, One, Seq, Star, Sum, Word, Zero

logger = logging.getLogger("kahyp.lang_oracle")

DEFAULT_SLACK = 4


def word_order(u: Word):
    """Sort key: shorter words first, then lexicographic."""
    return (len(u), u)


@dataclass(frozen=True)
class WordSet:
    """The fragment of a language made of its words of length at most ``bound``."""

    words: FrozenSet[Word]
    bound: int

    def __contains__(self, u: object) -> bool:
        return u in self.words

    def __iter__(self) -> Iterator[Word]:
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.words)

    def sorted(self) -> List[Word]:
        return sorted(self.words, key=word_order)

    def truncate(self, bound: int) -> "WordSet":
        return WordSet(frozenset(u for u in self.words if len(u) <= bound), bound)


@dataclass(frozen=True)
class ClosureSample:
    words: WordSet
    slack: int
    stable: bool


def _language(e: Expr, n: int, memo: Dict[Expr, FrozenSet[Word]]) -> FrozenSet[Word]:
    if e in memo:
        return memo[e]
    if isinstance(e, Zero):
        result: FrozenSet[Word] = frozenset()
    elif isinstance(e, One):
        result = frozenset({""})
    elif isinstance(e, Atom):
        result = frozenset({e.letter}) if n >= 1 else frozenset()
    elif isinstance(e, Sum):
        result = _language(e.left, n, memo) | _language(e.right, n, memo)
    elif isinstance(e, Seq):
        left = _language(e.left, n, memo)
        right = _language(e.right, n, memo)
        result = frozenset(u + v for u in left for v in right if len(u) + len(v) <= n)
    elif isinstance(e, Star):
        inner = [u for u in _language(e.inner, n, memo) if u]
        found: Set[Word] = {""}
        frontier = [""]
        while frontier:
            nxt = []
            for u in frontier:
                for v in inner:
                    uv = u + v
                    if len(uv) <= n and uv not in found:
                        found.add(uv)
                        nxt.append(uv)
            frontier = nxt
        result = frozenset(found)
    else:
        raise TypeError(f"not an expression: {e!r}")
    memo[e] = result
    return result


def enumerate_language(e: Expr, max_len: int) -> WordSet:
    """Every word of the language of ``e`` up to length ``max_len``."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    return WordSet(_language(e, max_len, {}), max_len)


def _occurrences(u: Word, w: Word) -> Iterator[int]:
    if not w:
        yield from range(len(u) + 1)
        return
    start = u.find(w)
    while start != -1:
        yield start
        start = u.find(w, start + 1)


def _rewrites(
    u: Word, hypotheses: Sequence[Hypothesis], lhs_words: Sequence[List[Word]], cap: int
) -> Iterator[Word]:
    """Words obtained from ``u`` by replacing one occurrence of a right side."""
    for h, words in zip(hypotheses, lhs_words):
        for i in _occurrences(u, h.rhs):
            prefix, suffix = u[:i], u[i + len(h.rhs):]
            room = cap - len(prefix) - len(suffix)
            for x in words:
                if len(x) > room:
                    break
                yield prefix + x + suffix


def _lhs_words(hypotheses: Sequence[Hypothesis], cap: int) -> List[List[Word]]:
    return [enumerate_language(h.lhs, cap).sorted() for h in hypotheses]


def one_step_closure(L: WordSet, H: Sequence[Hypothesis], cap: int) -> WordSet:
    """``L`` plus every single rewrite ``u w v -> u x v`` with ``x`` in the left side."""
    if cap < L.bound:
        raise ValueError("cap must be at least the bound of L")
    hypotheses = list(H)
    lhs_words = _lhs_words(hypotheses, cap)
    result = set(L.words)
    for u in L.words:
        result.update(_rewrites(u, hypotheses, lhs_words, cap))
    return WordSet(frozenset(result), cap)


def _close(start: Iterable[Word], H: Sequence[Hypothesis], cap: int) -> FrozenSet[Word]:
    hypotheses = list(H)
    lhs_words = _lhs_words(hypotheses, cap)
    found: Set[Word] = set(start)
    worklist = list(found)
    while worklist:
        u = worklist.pop()
        for v in _rewrites(u, hypotheses, lhs_words, cap):
            if v not in found:
                found.add(v)
                worklist.append(v)
    return frozenset(found)


def bounded_closure(
    e: Expr, H: Sequence[Hypothesis], max_len: int, slack: int = DEFAULT_SLACK
) -> WordSet:
    """Close the language of ``e`` at length ``max_len + slack``, then truncate to ``max_len``.

    The result is always a subset of the true closure fragment; intermediate
    words longer than the cap are never explored.
    """
    if slack < 0:
        raise ValueError("slack must be non-negative")
    cap = max_len + slack
    closed = _close(enumerate_language(e, cap).words, H, cap)
    return WordSet(frozenset(u for u in closed if len(u) <= max_len), max_len)


def stabilized_closure(
    e: Expr,
    H: Sequence[Hypothesis],
    max_len: int,
    slack: int = DEFAULT_SLACK,
    max_extra: int = 8,
) -> ClosureSample:
    """Raise the slack until three consecutive truncations agree.

    ``stable`` is False when ``max_extra`` increments did not settle; the
    sample is then only a lower bound on the closure fragment.
    """
    samples = [bounded_closure(e, H, max_len, slack), bounded_closure(e, H, max_len, slack + 1)]
    current = slack
    while True:
        samples.append(bounded_closure(e, H, max_len, current + 2))
        if samples[-1] == samples[-2] == samples[-3]:
            return ClosureSample(samples[-3], current, True)
        if current - slack >= max_extra:
            logger.warning(
                "Closure sample for %s did not stabilise up to slack %d", e, current + 2
            )
            return ClosureSample(samples[-1], current + 2, False)
        current += 1


def word_derivative(L: WordSet, w: Word) -> WordSet:
    """Left residual of the fragment by ``w``."""
    n = len(w)
    words = frozenset(u[n:] for u in L.words if u.startswith(w))
    return WordSet(words, max(L.bound - n, 0))


def residual_inclusion_bruteforce(L: WordSet, w: Word, e: Expr) -> bool:
    """Check ``x v`` in ``L`` for every ``v`` in ``w^-1 L`` and ``x`` in the language of ``e``.

    Only pairs fitting within ``L.bound`` are tested.
    """
    residual = word_derivative(L, w)
    insertions = enumerate_language(e, L.bound).words
    for v in residual.words:
        for x in insertions:
            if len(x) + len(v) <= L.bound and x + v not in L.words:
                return False
    return True


__all__ = [
    "DEFAULT_SLACK",
    "word_order",
    "WordSet",
    "ClosureSample",
    "enumerate_language",
    "one_step_closure",
    "bounded_closure",
    "stabilized_closure",
    "word_derivative",
    "residual_inclusion_bruteforce",
]
