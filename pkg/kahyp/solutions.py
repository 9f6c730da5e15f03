"""Least solutions of automata: from an Nfa back to regular expressions.

Each state ``x`` contributes the equation

    X_x = sum(a . X_y for x -a-> y) + sum(X_y for x -eps-> y) + [x is final]

and the system is solved by Gaussian elimination, cheapest state first,
using ``X = c X + d  =>  X = c* d`` for self references.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Set

from .automata import (
    DEFAULT_DETERMINIZE_BUDGET,
    EPSILON,
    Nfa,
    StateId,
    language_equiv,
    language_inclusion,
    reverse_nfa,
    thompson,
)
from .syntax import (
    ONE,
    ZERO,
    Atom,
    Expr,
    One,
    Star,
    Zero,
    add,
    expr_size,
    mul,
    reverse_expr,
    simplify_expr,
)

logger = logging.getLogger("kahyp.solutions")

# row of the equation system; the ``None`` key holds the constant term
Row = Dict[Optional[StateId], Expr]


class ExpressionTooLarge(RuntimeError):
    """Raised when state elimination builds an expression past the size limit."""

    def __init__(self, size: int, limit: int):
        super().__init__(f"expression reached {size} nodes (limit {limit})")
        self.size = size
        self.limit = limit


@dataclass(frozen=True)
class Solution:
    assignment: Dict[StateId, Expr]

    def for_state(self, x: StateId) -> Expr:
        return self.assignment[x]

    def __getitem__(self, x: StateId) -> Expr:
        return self.assignment[x]


def _forward(m: Nfa, start: StateId) -> Set[StateId]:
    seen = {start}
    stack = [start]
    succ: Dict[StateId, List[StateId]] = {}
    for src, _, dst in m.transitions:
        succ.setdefault(src, []).append(dst)
    while stack:
        for nxt in succ.get(stack.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def live_states(m: Nfa) -> Set[StateId]:
    """States from which the final state is reachable."""
    return _forward(reverse_nfa(m), m.final)


def _equations(m: Nfa, states: Set[StateId]) -> Dict[StateId, Row]:
    rows: Dict[StateId, Row] = {x: {} for x in sorted(states)}
    if m.final in rows:
        rows[m.final][None] = ONE
    for src, label, dst in sorted(m.transitions):
        if src in rows and dst in rows:
            coefficient = ONE if label == EPSILON else Atom(label)
            row = rows[src]
            row[dst] = add(row.get(dst, ZERO), coefficient)
    return rows


def _solve_self(row: Row, x: StateId) -> None:
    loop = row.pop(x, None)
    if loop is None or isinstance(loop, (Zero, One)):
        return
    star = Star(loop)
    for key in list(row):
        row[key] = mul(star, row[key])


def _substitute(row: Row, x: StateId, solved_row: Row) -> None:
    coefficient = row.pop(x, None)
    if coefficient is None:
        return
    for key, value in solved_row.items():
        row[key] = add(row.get(key, ZERO), mul(coefficient, value))
        if isinstance(row[key], Zero):
            del row[key]


def _out_degree(row: Row, x: StateId) -> int:
    return sum(1 for key in row if key is not None and key != x)


def _row_size(row: Row) -> int:
    return sum(expr_size(value) for value in row.values())


def _eliminate(
    rows: Dict[StateId, Row],
    last: Optional[StateId] = None,
    max_size: Optional[int] = None,
) -> List[StateId]:
    """Eliminate every state, cheapest first, and return the elimination order.

    The cost of a state is its in-degree times its out-degree among the
    states still present; ``last`` is kept until nothing else is left.
    """
    remaining = set(rows)
    order: List[StateId] = []
    while remaining:
        in_degree = Counter(
            key for y in remaining for key in rows[y] if key is not None and key != y
        )
        candidates = remaining - {last} if remaining != {last} else remaining
        x = min(candidates, key=lambda y: (in_degree[y] * _out_degree(rows[y], y), y))
        _solve_self(rows[x], x)
        if max_size is not None:
            size = _row_size(rows[x])
            if size > max_size:
                raise ExpressionTooLarge(size, max_size)
        remaining.discard(x)
        for other in sorted(remaining):
            _substitute(rows[other], x, rows[x])
        order.append(x)
    return order


def least_solution(m: Nfa) -> Solution:
    """The least solution; states that cannot reach the final state get ``0``."""
    live = live_states(m)
    rows = _equations(m, live)
    order = _eliminate(rows)
    solved: Dict[StateId, Expr] = {}
    for x in reversed(order):
        expr: Expr = rows[x].get(None, ZERO)
        for key, coefficient in rows[x].items():
            if key is not None:
                expr = add(expr, mul(coefficient, solved[key]))
        solved[x] = simplify_expr(expr)
    assignment = {x: solved.get(x, ZERO) for x in m.states}
    logger.debug("Least solution computed for %d states (%d live)", m.num_states, len(live))
    return Solution(assignment)


def extract_expr(
    m: Nfa, state: Optional[StateId] = None, max_size: Optional[int] = None
) -> Expr:
    """Expression for the language accepted by ``state`` (default: the initial state).

    Only states both reachable from ``state`` and live take part, and
    ``state`` is eliminated last so no back substitution is needed.
    Raises ``ExpressionTooLarge`` once a solved row outgrows ``max_size``
    nodes.
    """
    target = m.initial if state is None else state
    m.check_state(target)
    relevant = _forward(m, target) & live_states(m)
    if target not in relevant:
        return ZERO
    rows = _equations(m, relevant)
    _eliminate(rows, last=target, max_size=max_size)
    return simplify_expr(rows[target].get(None, ZERO))


def verify_solution(
    m: Nfa, s: Solution, budget: int = DEFAULT_DETERMINIZE_BUDGET
) -> bool:
    """Check the three solution rules as language inclusions."""
    if set(s.assignment) != set(m.states):
        return False
    automata = {x: thompson(s[x]) for x in m.states}
    if not _accepts_empty(automata[m.final]):
        logger.debug("Final state assignment %s does not contain the empty word", s[m.final])
        return False
    for src, label, dst in sorted(m.transitions):
        lhs = automata[dst] if label == EPSILON else thompson(mul(Atom(label), s[dst]))
        if not language_inclusion(lhs, automata[src], budget):
            logger.debug("Rule for transition %s fails", (src, label, dst))
            return False
    return True


def _accepts_empty(m: Nfa) -> bool:
    return m.final in m.state_closure(m.initial)


def reverse_solution_check(m: Nfa, budget: int = DEFAULT_DETERMINIZE_BUDGET) -> bool:
    """The least reverse solution at the final state is the reversed least solution at the initial state."""
    forward = extract_expr(m)
    backward = extract_expr(reverse_nfa(m))
    return bool(
        language_equiv(thompson(backward), thompson(reverse_expr(forward)), budget)
    )


__all__ = [
    "ExpressionTooLarge",
    "Solution",
    "live_states",
    "least_solution",
    "extract_expr",
    "verify_solution",
    "reverse_solution_check",
]
