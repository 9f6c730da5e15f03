"""Regular expression equivalence under linear hypotheses ``e <= w``."""

from .automata import Nfa, language_equiv, language_inclusion, thompson
from .closure import ClosureConfig, ClosureVariant, closure_fixpoint
from .decide import Verdict, VerdictKind, ka_h_equiv
from .reduce import Reduced, Undefined, reduce_expr, reduce_seq
from .solutions import extract_expr, least_solution
from .syntax import Hypothesis, parse_expr, parse_hypothesis, print_expr

__version__ = "0.1.0"

__all__ = [
    "Nfa",
    "thompson",
    "language_equiv",
    "language_inclusion",
    "ClosureConfig",
    "ClosureVariant",
    "closure_fixpoint",
    "Verdict",
    "VerdictKind",
    "ka_h_equiv",
    "Reduced",
    "Undefined",
    "reduce_expr",
    "reduce_seq",
    "extract_expr",
    "least_solution",
    "Hypothesis",
    "parse_expr",
    "parse_hypothesis",
    "print_expr",
]
