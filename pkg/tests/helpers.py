import random
from itertools import product
from typing import Iterator, List

from kahyp.automata import Nfa, accepts
from kahyp.syntax import ONE, ZERO, Atom, Expr, Hypothesis, Seq, Star, Sum

SEED = 20241018


def make_rng(offset: int = 0) -> random.Random:
    return random.Random(SEED + offset)


def random_expr(rng: random.Random, size: int, alphabet: str = "ab") -> Expr:
    """A random expression with exactly ``size`` nodes."""
    if size <= 1:
        roll = rng.random()
        if roll < 0.05:
            return ZERO
        if roll < 0.15:
            return ONE
        return Atom(rng.choice(alphabet))
    if size == 2:
        return Star(random_expr(rng, 1, alphabet))
    kind = rng.choice(["seq", "seq", "sum", "star"])
    if kind == "star":
        return Star(random_expr(rng, size - 1, alphabet))
    left = rng.randint(1, size - 2)
    right = size - 1 - left
    cls = Seq if kind == "seq" else Sum
    return cls(random_expr(rng, left, alphabet), random_expr(rng, right, alphabet))


def random_word(rng: random.Random, length: int, alphabet: str = "ab") -> str:
    return "".join(rng.choice(alphabet) for _ in range(length))


def random_hypothesis(
    rng: random.Random, lhs_size: int = 4, max_rhs: int = 2, alphabet: str = "ab"
) -> Hypothesis:
    lhs = random_expr(rng, rng.randint(1, lhs_size), alphabet)
    return Hypothesis(lhs, random_word(rng, rng.randint(0, max_rhs), alphabet))


def all_words(max_len: int, alphabet: str = "ab") -> Iterator[str]:
    for n in range(max_len + 1):
        for letters in product(alphabet, repeat=n):
            yield "".join(letters)


def accepted_words(m: Nfa, max_len: int, alphabet: str = "ab") -> List[str]:
    return [u for u in all_words(max_len, alphabet) if accepts(m, u)]
