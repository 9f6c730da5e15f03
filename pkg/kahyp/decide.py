"""Equivalence under hypotheses: reduce both sides, then compare languages."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence

from .automata import StateBudgetExceeded, language_equiv
from .closure import ClosureConfig
from .reduce import Reduced, Undefined, reduce_seq
from .syntax import Atom, Expr, Hypothesis, print_expr

logger = logging.getLogger("kahyp.decide")


class VerdictKind(str, Enum):
    EQUIVALENT = "equivalent"
    INEQUIVALENT = "inequivalent"
    UNKNOWN = "unknown"


class UnknownReason(str, Enum):
    LEFT_UNDEFINED = "left_undefined"
    RIGHT_UNDEFINED = "right_undefined"
    BOTH_UNDEFINED = "both_undefined"
    COMPARISON_BUDGET = "comparison_budget"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    witness: Optional[str] = None
    side: Optional[str] = None
    reason: Optional[UnknownReason] = None
    details: str = ""
    rounds: Dict[str, int] = field(default_factory=dict, compare=False)

    @property
    def equivalent(self) -> bool:
        return self.kind is VerdictKind.EQUIVALENT

    def to_dict(self) -> Dict:
        data: Dict = {"verdict": self.kind.value, "rounds": dict(self.rounds)}
        if self.witness is not None:
            data["witness"] = self.witness
            data["side"] = self.side
        if self.reason is not None:
            data["reason"] = self.reason.value
            data["details"] = self.details
        return data


def is_contraction(h: Hypothesis) -> bool:
    """Hypotheses ``a <= w`` whose left side is a single letter."""
    return isinstance(h.lhs, Atom)


def _describe(outcome: Undefined, hs: Sequence[Hypothesis]) -> str:
    text = f"{outcome.reason.value} after {outcome.rounds} rounds"
    if outcome.failed_index is not None and outcome.failed_index < len(hs):
        text += f" on hypothesis {hs[outcome.failed_index]}"
    return text


def ka_h_equiv(
    g: Expr,
    h_expr: Expr,
    hs: Sequence[Hypothesis],
    cfg: Optional[ClosureConfig] = None,
) -> Verdict:
    """Decide equivalence of ``g`` and ``h_expr`` under ``hs``.

    Returns ``UNKNOWN`` whenever a reduction is undefined; it never guesses.
    """
    cfg = cfg or ClosureConfig()
    left = reduce_seq(g, hs, cfg)
    right = reduce_seq(h_expr, hs, cfg)
    rounds = {"left": left.rounds, "right": right.rounds}

    if isinstance(left, Undefined) or isinstance(right, Undefined):
        if isinstance(left, Undefined) and isinstance(right, Undefined):
            reason = UnknownReason.BOTH_UNDEFINED
            details = f"left: {_describe(left, hs)}; right: {_describe(right, hs)}"
        elif isinstance(left, Undefined):
            reason = UnknownReason.LEFT_UNDEFINED
            details = f"left: {_describe(left, hs)}"
        else:
            reason = UnknownReason.RIGHT_UNDEFINED
            details = f"right: {_describe(right, hs)}"
        logger.info("Verdict unknown for %s vs %s: %s", print_expr(g), print_expr(h_expr), details)
        return Verdict(VerdictKind.UNKNOWN, reason=reason, details=details, rounds=rounds)

    assert isinstance(left, Reduced) and isinstance(right, Reduced)
    try:
        comparison = language_equiv(left.automaton, right.automaton, cfg.determinize_budget)
    except StateBudgetExceeded as e:
        logger.warning("Comparison of reduced automata stopped: %s", e)
        return Verdict(
            VerdictKind.UNKNOWN,
            reason=UnknownReason.COMPARISON_BUDGET,
            details=str(e),
            rounds=rounds,
        )
    if comparison:
        logger.info("%s and %s are equivalent", print_expr(g), print_expr(h_expr))
        return Verdict(VerdictKind.EQUIVALENT, rounds=rounds)
    logger.info(
        "%s and %s differ on %r (%s side)",
        print_expr(g),
        print_expr(h_expr),
        comparison.witness,
        comparison.side,
    )
    return Verdict(
        VerdictKind.INEQUIVALENT,
        witness=comparison.witness,
        side=comparison.side,
        rounds=rounds,
    )


__all__ = [
    "VerdictKind",
    "UnknownReason",
    "Verdict",
    "is_contraction",
    "ka_h_equiv",
]
