"""Hypothesis closure of automata by patching.

A round looks at every state of a snapshot automaton.  When the language of a
state ``x`` is not closed under the hypothesis ``e <= w`` (some word of
``e`` followed by a word of ``w^-1 l(x)`` is missing), a fresh copy of the
automaton for ``e`` is grafted onto ``x``: an epsilon edge into the copy and
epsilon edges from the copy's final state to every state reached from ``x``
by reading ``w``.  The ``th`` variant grafts a ``w``-saturated copy instead,
which lets the copy loop back on itself and keeps many closures finite that
the plain ``t0`` rounds would unfold forever.

Rounds repeat until one performs no patch (the automaton is closed) or a
budget runs out.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from pydantic import BaseModel, Field

from .automata import (
    DEFAULT_DETERMINIZE_BUDGET,
    EPSILON,
    Nfa,
    PatchCopy,
    StateBudgetExceeded,
    StateId,
    append_copy,
    concat_nfa,
    determinize,
    fan_in,
    language_inclusion,
    state_language,
    thompson,
    w_reachable,
)
from .syntax import Hypothesis, Word

logger = logging.getLogger("kahyp.closure")


class ClosureVariant(str, Enum):
    T0 = "t0"
    TH = "th"


class BudgetReason(str, Enum):
    ROUND_BUDGET = "round_budget"
    STATE_BUDGET = "state_budget"


class ClosureConfig(BaseModel):
    variant: ClosureVariant = ClosureVariant.TH
    max_rounds: int = Field(32, ge=1)
    max_states: int = Field(10_000, ge=1)
    determinize_budget: int = Field(DEFAULT_DETERMINIZE_BUDGET, ge=1)
    max_expr_size: int = Field(50_000, ge=1)


def closure_config_from(settings: Dict) -> ClosureConfig:
    """Build a ``ClosureConfig`` from the dict returned by ``_load_config``."""
    return ClosureConfig(
        variant=settings.get("variant", ClosureVariant.TH),
        max_rounds=settings.get("max_rounds", 32),
        max_states=settings.get("max_states", 10_000),
        determinize_budget=settings.get("determinize_budget", DEFAULT_DETERMINIZE_BUDGET),
        max_expr_size=settings.get("max_expr_size", 50_000),
    )


@dataclass(frozen=True)
class PatchRecord:
    round: int
    site: StateId
    copy_states: FrozenSet[StateId]
    return_targets: FrozenSet[StateId]

    def to_dict(self) -> Dict:
        return {
            "round": self.round,
            "site": self.site,
            "copy_size": len(self.copy_states),
            "copy_states": sorted(self.copy_states),
            "return_targets": sorted(self.return_targets),
        }


@dataclass(frozen=True)
class Closed:
    result: Nfa
    rounds_used: int
    patch_log: Tuple[PatchRecord, ...] = ()
    history: Tuple[Nfa, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class BudgetExhausted:
    partial: Nfa
    rounds_used: int
    reason: BudgetReason
    patch_log: Tuple[PatchRecord, ...] = ()
    history: Tuple[Nfa, ...] = field(default=(), compare=False)


ClosureOutcome = Union[Closed, BudgetExhausted]


def needs_patch(
    m_snapshot: Nfa,
    x: StateId,
    h: Hypothesis,
    budget: int = DEFAULT_DETERMINIZE_BUDGET,
) -> bool:
    """True when ``lang(e) . w^-1 l(x)`` is not contained in ``l(x)``."""
    targets = w_reachable(m_snapshot, x, h.rhs)
    if not targets:
        return False
    residual = fan_in(m_snapshot, targets)
    inserted = concat_nfa(thompson(h.lhs), residual)
    return not language_inclusion(inserted, state_language(m_snapshot, x), budget)


def language_closed(
    m: Nfa, h: Hypothesis, budget: int = DEFAULT_DETERMINIZE_BUDGET
) -> bool:
    """True when ``L(m)`` as a whole is closed under ``h``.

    Every residual ``u^-1 L(m)`` is the language of one subset state of
    the determinized automaton, so it is enough to check
    ``lang(e) . w^-1 R ⊆ R`` for each of those.  Individual states of
    ``m`` may still need patches.
    """
    lhs = thompson(h.lhs)
    for subset in determinize(m, budget=budget).subsets:
        if not subset:
            continue
        targets = subset
        for letter in h.rhs:
            targets = m.step(targets, letter)
        if not targets:
            continue
        inserted = concat_nfa(lhs, fan_in(m, targets))
        if not language_inclusion(inserted, fan_in(m, subset), budget):
            return False
    return True


def patch(
    m: Nfa,
    x: StateId,
    w: Word,
    z: Nfa,
    return_targets: Optional[Iterable[StateId]] = None,
    origin: Optional[PatchCopy] = None,
) -> Nfa:
    """Graft a renamed copy of ``z`` onto ``x``.

    Without explicit ``return_targets`` the copy returns to every state
    reached from ``x`` by reading ``w`` in ``m``.
    """
    m.check_state(x)
    if return_targets is None:
        targets = w_reachable(m, x, w)
    else:
        targets = frozenset(return_targets)
        for target in targets:
            m.check_state(target)
    combined, offset = append_copy(m, z, origin)
    edges = {(x, EPSILON, z.initial + offset)}
    edges.update((z.final + offset, EPSILON, target) for target in targets)
    return Nfa(
        combined.num_states,
        combined.transitions | frozenset(edges),
        m.initial,
        m.final,
        combined.origins,
    )


def saturate(z: Nfa, w: Word) -> Nfa:
    """The ``w``-saturation of ``z``.

    Adds ``y -eps-> initial`` whenever ``y`` reads ``w`` into the final state
    and ``final -eps-> y`` whenever the initial state reads ``w`` into ``y``,
    until nothing changes.  The state set is untouched; epsilon self loops
    are never added since they change no language.
    """
    current = z
    while True:
        resets = set()
        for y in current.states:
            if y != current.initial and current.final in w_reachable(current, y, w):
                resets.add((y, EPSILON, current.initial))
        for y in w_reachable(current, current.initial, w):
            if y != current.final:
                resets.add((current.final, EPSILON, y))
        new = resets - current.transitions
        if not new:
            return current
        logger.debug("Saturation by %r adds resets %s", w, sorted(new))
        current = Nfa(
            current.num_states,
            current.transitions | frozenset(new),
            current.initial,
            current.final,
            current.origins,
        )


def _patch_template(h: Hypothesis, variant: ClosureVariant) -> Nfa:
    z = thompson(h.lhs)
    if ClosureVariant(variant) is ClosureVariant.TH:
        return saturate(z, h.rhs)
    return z


def run_round(
    m: Nfa,
    h: Hypothesis,
    variant: ClosureVariant = ClosureVariant.TH,
    round_no: int = 1,
    budget: int = DEFAULT_DETERMINIZE_BUDGET,
    reverse_sites: bool = False,
) -> Tuple[Nfa, List[PatchRecord]]:
    """One simultaneous round: every check and return target is read from ``m``."""
    template = _patch_template(h, variant)
    current = m
    records: List[PatchRecord] = []
    for x in sorted(m.states, reverse=reverse_sites):
        if not needs_patch(m, x, h, budget):
            continue
        targets = w_reachable(m, x, h.rhs)
        copy_states = frozenset(range(current.num_states, current.num_states + template.num_states))
        current = patch(
            current,
            x,
            h.rhs,
            template,
            targets,
            PatchCopy(round_no, x, len(records)),
        )
        records.append(PatchRecord(round_no, x, copy_states, targets))
        logger.debug("Round %d: patched state %d, returns to %s", round_no, x, sorted(targets))
    return current, records


def closure_fixpoint(
    m: Nfa,
    h: Hypothesis,
    cfg: Optional[ClosureConfig] = None,
    reverse_sites: bool = False,
) -> ClosureOutcome:
    """Iterate rounds until one performs no patch or a budget runs out."""
    cfg = cfg or ClosureConfig()
    current = m
    history: List[Nfa] = [m]
    log: List[PatchRecord] = []
    for round_no in range(1, cfg.max_rounds + 1):
        try:
            nxt, records = run_round(
                current, h, cfg.variant, round_no, cfg.determinize_budget, reverse_sites
            )
        except StateBudgetExceeded as e:
            logger.warning("Closure for %s stopped in round %d: %s", h, round_no, e)
            return BudgetExhausted(
                current, round_no, BudgetReason.STATE_BUDGET, tuple(log), tuple(history)
            )
        if not records:
            logger.info(
                "Closure for %s reached after %d rounds (%d states, %d patches)",
                h,
                round_no,
                current.num_states,
                len(log),
            )
            return Closed(current, round_no, tuple(log), tuple(history))
        log.extend(records)
        history.append(nxt)
        current = nxt
        logger.info(
            "Round %d for %s: %d patches, %d states", round_no, h, len(records), current.num_states
        )
        if current.num_states > cfg.max_states:
            logger.warning(
                "Closure for %s exceeded %d states after %d rounds",
                h,
                cfg.max_states,
                round_no,
            )
            return BudgetExhausted(
                current, round_no, BudgetReason.STATE_BUDGET, tuple(log), tuple(history)
            )
    logger.warning("Closure for %s not reached within %d rounds", h, cfg.max_rounds)
    return BudgetExhausted(
        current, cfg.max_rounds, BudgetReason.ROUND_BUDGET, tuple(log), tuple(history)
    )


def canonical_labels(m: Nfa) -> Dict[StateId, Tuple]:
    """Labels that do not depend on the order in which copies were appended.

    An original state is labelled by its id; a copied state by its round,
    the label of the state it was grafted onto and its offset in the copy.
    """
    bases: Dict[Tuple[int, StateId], StateId] = {}
    for state, origin in enumerate(m.origins):
        if origin is not None:
            bases.setdefault((origin.round, origin.site), state)
    labels: Dict[StateId, Tuple] = {}
    for state, origin in enumerate(m.origins):
        if origin is None:
            labels[state] = ("state", state)
        else:
            base = bases[(origin.round, origin.site)]
            labels[state] = ("copy", origin.round, labels[origin.site], state - base)
    return labels


__all__ = [
    "ClosureVariant",
    "BudgetReason",
    "ClosureConfig",
    "closure_config_from",
    "PatchRecord",
    "Closed",
    "BudgetExhausted",
    "ClosureOutcome",
    "needs_patch",
    "language_closed",
    "patch",
    "saturate",
    "run_round",
    "closure_fixpoint",
    "canonical_labels",
]
