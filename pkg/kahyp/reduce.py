"""Reductions: expression -> closed automaton -> expression."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

from .automata import Nfa, StateBudgetExceeded, language_equiv, thompson
from .closure import (
    BudgetExhausted,
    BudgetReason,
    ClosureConfig,
    PatchRecord,
    closure_fixpoint,
    language_closed,
)
from .solutions import ExpressionTooLarge, extract_expr
from .syntax import Expr, Hypothesis, print_expr

logger = logging.getLogger("kahyp.reduce")


class ReductionError(RuntimeError):
    """Raised when an extracted expression disagrees with its automaton."""


@dataclass(frozen=True)
class Reduced:
    expr: Expr
    automaton: Nfa
    rounds: int
    patch_log: Tuple[PatchRecord, ...] = ()
    history: Tuple[Nfa, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class Undefined:
    reason: BudgetReason
    partial: Nfa
    rounds: int = 0
    failed_index: Optional[int] = None
    patch_log: Tuple[PatchRecord, ...] = ()
    history: Tuple[Nfa, ...] = field(default=(), compare=False)


ReductionOutcome = Union[Reduced, Undefined]


def _certify(expr: Expr, automaton: Nfa, cfg: ClosureConfig) -> None:
    check = language_equiv(thompson(expr), automaton, cfg.determinize_budget)
    if not check:
        raise ReductionError(
            f"extracted {print_expr(expr)} differs from its automaton on {check.witness!r}"
        )


def _read_back(
    g: Expr,
    closed: Nfa,
    rounds: int,
    log: Tuple[PatchRecord, ...],
    history: Tuple[Nfa, ...],
    cfg: ClosureConfig,
) -> ReductionOutcome:
    try:
        expr = extract_expr(closed, max_size=cfg.max_expr_size)
        _certify(expr, closed, cfg)
    except (ExpressionTooLarge, StateBudgetExceeded) as e:
        logger.warning("Could not read back reduction of %s: %s", print_expr(g), e)
        return Undefined(
            BudgetReason.STATE_BUDGET, closed, rounds, patch_log=log, history=history
        )
    logger.info("Reduced %s to %s", print_expr(g), print_expr(expr))
    return Reduced(expr, closed, rounds, log, history)


def reduce_expr(
    g: Expr, h: Hypothesis, cfg: Optional[ClosureConfig] = None
) -> ReductionOutcome:
    """Close the Thompson automaton of ``g`` under ``h`` and read the result back."""
    cfg = cfg or ClosureConfig()
    outcome = closure_fixpoint(thompson(g), h, cfg)
    if isinstance(outcome, BudgetExhausted):
        logger.info(
            "Reduction of %s under %s undefined: %s after %d rounds",
            print_expr(g),
            h,
            outcome.reason.value,
            outcome.rounds_used,
        )
        return Undefined(
            outcome.reason,
            outcome.partial,
            outcome.rounds_used,
            patch_log=outcome.patch_log,
            history=outcome.history,
        )
    return _read_back(
        g, outcome.result, outcome.rounds_used, outcome.patch_log, outcome.history, cfg
    )


def reduce_seq(
    g: Expr, hs: Sequence[Hypothesis], cfg: Optional[ClosureConfig] = None
) -> ReductionOutcome:
    """Close ``g`` under every hypothesis of ``hs`` together.

    One pass closes the automaton under each hypothesis in turn.  A later
    hypothesis can add words an earlier one acts on, so passes repeat
    until the accepted language is closed under all of ``hs``; each pass
    counts against ``max_rounds``.  ``rounds`` and ``patch_log``
    accumulate over all passes, and an ``Undefined`` result names the
    hypothesis whose closure ran out of budget (``None`` when the passes
    themselves did).
    """
    cfg = cfg or ClosureConfig()
    m = thompson(g)
    if not hs:
        return Reduced(extract_expr(m), m, 0, history=(m,))
    rounds = 0
    log: Tuple[PatchRecord, ...] = ()
    history: Tuple[Nfa, ...] = (m,)
    for pass_no in range(1, cfg.max_rounds + 1):
        patched = False
        for index, h in enumerate(hs):
            outcome = closure_fixpoint(m, h, cfg)
            rounds += outcome.rounds_used
            log += outcome.patch_log
            history += outcome.history[1:]
            if isinstance(outcome, BudgetExhausted):
                logger.info(
                    "Reduction of %s undefined on %s: %s after %d rounds",
                    print_expr(g),
                    h,
                    outcome.reason.value,
                    rounds,
                )
                return Undefined(outcome.reason, outcome.partial, rounds, index, log, history)
            patched = patched or bool(outcome.patch_log)
            m = outcome.result
        if not patched or len(hs) == 1:
            break
        try:
            if all(language_closed(m, h, cfg.determinize_budget) for h in hs):
                break
        except StateBudgetExceeded as e:
            logger.warning("Closure check of %s stopped: %s", print_expr(g), e)
            return Undefined(
                BudgetReason.STATE_BUDGET, m, rounds, patch_log=log, history=history
            )
        logger.info("Pass %d left the language of %s open, patching again", pass_no, print_expr(g))
    else:
        logger.warning(
            "Reduction of %s not closed under all hypotheses within %d passes",
            print_expr(g),
            cfg.max_rounds,
        )
        return Undefined(BudgetReason.ROUND_BUDGET, m, rounds, patch_log=log, history=history)
    return _read_back(g, m, rounds, log, history, cfg)


__all__ = [
    "ReductionError",
    "Reduced",
    "Undefined",
    "ReductionOutcome",
    "reduce_expr",
    "reduce_seq",
]
