"""Command line front end: ``kahyp reduce|equiv|closure-sample|dot``."""

import argparse
import json
import os
import sys
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, field_validator

from .automata import nfa_to_dict, thompson, to_dot
from .closure import ClosureConfig
from .config import _load_config, logger
from .decide import VerdictKind, is_contraction, ka_h_equiv
from .lang_oracle import stabilized_closure
from .reduce import Reduced, Undefined, reduce_seq
from .syntax import (
    ExprSyntaxError,
    Expr,
    Hypothesis,
    LETTERS,
    parse_expr,
    parse_hypotheses,
    parse_hypothesis,
    print_expr,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_UNDEFINED = 2
EXIT_UNKNOWN = 2
EXIT_INEQUIVALENT = 3

DEFAULT_FRAMES_DIR = "frames"


class RunConfig(BaseModel):
    command: str
    expressions: List[str]
    hypotheses: List[str] = []
    hypotheses_file: Optional[str] = None
    alphabet: Optional[str] = None
    variant: str = "th"
    max_rounds: int = Field(32, ge=1)
    max_states: int = Field(10_000, ge=1)
    determinize_budget: int = Field(100_000, ge=1)
    max_expr_size: int = Field(50_000, ge=1)
    oracle_len: int = Field(6, ge=0)
    oracle_slack: int = Field(4, ge=0)
    output_format: str = "text"
    trace: bool = False
    frames_dir: Optional[str] = None
    dot_output: Optional[str] = None
    closed: bool = False

    @field_validator("variant")
    @classmethod
    def validate_variant(cls, v: str) -> str:
        v = v.lower()
        if v not in {"t0", "th"}:
            raise ValueError("variant must be 't0' or 'th'")
        return v

    @field_validator("output_format")
    @classmethod
    def validate_output_format(cls, v: str) -> str:
        v = v.lower()
        if v not in {"text", "json"}:
            raise ValueError("format must be 'text' or 'json'")
        return v

    @field_validator("alphabet")
    @classmethod
    def validate_alphabet(cls, v: Optional[str]) -> Optional[str]:
        if v is None:
            return v
        letters = v.replace(",", "").replace(" ", "")
        if not letters or any(ch not in LETTERS for ch in letters):
            raise ValueError("alphabet must be a list of letters a-z")
        return "".join(sorted(set(letters)))

    def closure_config(self) -> ClosureConfig:
        return ClosureConfig(
            variant=self.variant,
            max_rounds=self.max_rounds,
            max_states=self.max_states,
            determinize_budget=self.determinize_budget,
            max_expr_size=self.max_expr_size,
        )


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-H",
        "--hypothesis",
        action="append",
        default=[],
        dest="hypotheses",
        help="Hypothesis 'e<=w' or 'u==w' (repeatable, applied in order)",
    )
    common.add_argument("--hypotheses-file", help="File with one hypothesis per line")
    common.add_argument("--alphabet", help="Declared alphabet, e.g. 'abtu'")
    common.add_argument("--variant", choices=["t0", "th"], help="Closure rounds to use")
    common.add_argument("--max-rounds", type=int, help="Round budget")
    common.add_argument("--max-states", type=int, help="State budget")
    common.add_argument("--format", choices=["text", "json"], dest="output_format")
    common.add_argument("--config", help="Path to config file")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="kahyp",
        description="Decide regular expression equivalence under linear hypotheses",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    reduce_cmd = sub.add_parser("reduce", parents=[common], help="Reduce an expression")
    reduce_cmd.add_argument("expr")
    reduce_cmd.add_argument(
        "--trace", action="store_true", help="Report every patch of every round"
    )
    reduce_cmd.add_argument(
        "--frames-dir",
        help=f"Directory for one DOT frame per round (default: ./{DEFAULT_FRAMES_DIR})",
    )

    equiv_cmd = sub.add_parser("equiv", parents=[common], help="Compare two expressions")
    equiv_cmd.add_argument("left")
    equiv_cmd.add_argument("right")

    sample_cmd = sub.add_parser(
        "closure-sample", parents=[common], help="Enumerate the closure up to a length"
    )
    sample_cmd.add_argument("expr")
    sample_cmd.add_argument("--len", type=int, dest="oracle_len")
    sample_cmd.add_argument("--slack", type=int, dest="oracle_slack")

    dot_cmd = sub.add_parser("dot", parents=[common], help="Export an automaton")
    dot_cmd.add_argument("expr")
    dot_cmd.add_argument("-o", "--output", dest="dot_output", help="Output file")
    dot_cmd.add_argument(
        "--closed", action="store_true", help="Export the closed automaton"
    )
    return parser


def _run_config(args: argparse.Namespace, settings: Dict) -> RunConfig:
    if args.command == "equiv":
        expressions = [args.left, args.right]
    else:
        expressions = [args.expr]
    values = {
        "command": args.command,
        "expressions": expressions,
        "hypotheses": args.hypotheses,
        "hypotheses_file": args.hypotheses_file,
        "alphabet": args.alphabet,
        "variant": settings["variant"],
        "max_rounds": settings["max_rounds"],
        "max_states": settings["max_states"],
        "determinize_budget": settings["determinize_budget"],
        "max_expr_size": settings["max_expr_size"],
        "oracle_len": settings["oracle_len"],
        "oracle_slack": settings["oracle_slack"],
        "output_format": settings["output_format"],
        "trace": getattr(args, "trace", False),
        "frames_dir": getattr(args, "frames_dir", None),
        "dot_output": getattr(args, "dot_output", None),
        "closed": getattr(args, "closed", False),
    }
    # explicit flags win over config file and environment
    for key in ("variant", "max_rounds", "max_states", "output_format", "oracle_len", "oracle_slack"):
        value = getattr(args, key, None)
        if value is not None:
            values[key] = value
    return RunConfig(**values)


def _parse_inputs(cfg: RunConfig) -> Tuple[List[Expr], List[Hypothesis]]:
    alphabet: Optional[FrozenSet[str]] = frozenset(cfg.alphabet) if cfg.alphabet else None
    hypotheses: List[Hypothesis] = []
    if cfg.hypotheses_file:
        with open(cfg.hypotheses_file, "r") as f:
            hypotheses.extend(parse_hypotheses(f.read(), alphabet))
    for text in cfg.hypotheses:
        hypotheses.extend(parse_hypothesis(text, alphabet))
    expressions = [parse_expr(text, alphabet) for text in cfg.expressions]
    return expressions, hypotheses


def _emit(data: Dict) -> None:
    print(json.dumps(data, sort_keys=True, indent=2))


def _write_frames(frames_dir: str, history: Sequence) -> List[str]:
    os.makedirs(frames_dir, exist_ok=True)
    paths = []
    for index, m in enumerate(history):
        path = os.path.join(frames_dir, f"frame_{index:03d}.dot")
        with open(path, "w") as f:
            f.write(to_dot(m, name=f"frame_{index:03d}"))
        paths.append(path)
    logger.info("Wrote %d DOT frames to %s", len(paths), frames_dir)
    return paths


def cmd_reduce(cfg: RunConfig) -> int:
    (g,), hypotheses = _parse_inputs(cfg)
    outcome = reduce_seq(g, hypotheses, cfg.closure_config())
    trace = [record.to_dict() for record in outcome.patch_log]
    frames: List[str] = []
    if cfg.trace:
        frames = _write_frames(cfg.frames_dir or DEFAULT_FRAMES_DIR, outcome.history)

    if cfg.output_format == "json":
        data: Dict = {
            "command": "reduce",
            "input": print_expr(g),
            "hypotheses": [str(h) for h in hypotheses],
            "variant": cfg.variant,
            "rounds": outcome.rounds,
        }
        if isinstance(outcome, Reduced):
            data.update(
                result="reduced",
                expr=print_expr(outcome.expr),
                states=outcome.automaton.num_states,
            )
        else:
            data.update(
                result="undefined",
                reason=outcome.reason.value,
                failed_index=outcome.failed_index,
                states=outcome.partial.num_states,
            )
        if cfg.trace:
            data["trace"] = trace
            data["frames"] = frames
        _emit(data)
    else:
        if isinstance(outcome, Reduced):
            print(print_expr(outcome.expr))
        else:
            line = f"UNDEFINED ({outcome.reason.value}) after {outcome.rounds} rounds"
            if outcome.failed_index is not None:
                line += f" on {hypotheses[outcome.failed_index]}"
            print(line)
            failed = hypotheses[outcome.failed_index or 0]
            if is_contraction(failed):
                logger.warning(
                    "%s is a contraction hypothesis; its closure is finite, "
                    "try a larger --max-rounds or --max-states",
                    failed,
                )
            elif cfg.variant == "t0":
                logger.info("Saturated rounds (--variant th) close more hypotheses")
        if cfg.trace:
            for record in trace:
                print(
                    f"round {record['round']}: site {record['site']} "
                    f"copy {record['copy_states']} returns {record['return_targets']}"
                )
    return EXIT_OK if isinstance(outcome, Reduced) else EXIT_UNDEFINED


def cmd_equiv(cfg: RunConfig) -> int:
    (left, right), hypotheses = _parse_inputs(cfg)
    verdict = ka_h_equiv(left, right, hypotheses, cfg.closure_config())
    if cfg.output_format == "json":
        data = verdict.to_dict()
        data.update(
            command="equiv",
            left=print_expr(left),
            right=print_expr(right),
            hypotheses=[str(h) for h in hypotheses],
        )
        _emit(data)
    elif verdict.kind is VerdictKind.EQUIVALENT:
        print("EQUIVALENT")
    elif verdict.kind is VerdictKind.INEQUIVALENT:
        print(f"INEQUIVALENT witness={verdict.witness or '1'} side={verdict.side}")
    else:
        print(f"UNKNOWN ({verdict.reason.value}) {verdict.details}")
    if verdict.kind is VerdictKind.EQUIVALENT:
        return EXIT_OK
    if verdict.kind is VerdictKind.INEQUIVALENT:
        return EXIT_INEQUIVALENT
    return EXIT_UNKNOWN


def cmd_closure_sample(cfg: RunConfig) -> int:
    (g,), hypotheses = _parse_inputs(cfg)
    sample = stabilized_closure(g, hypotheses, cfg.oracle_len, cfg.oracle_slack)
    words = sample.words.sorted()
    if cfg.output_format == "json":
        _emit(
            {
                "command": "closure-sample",
                "input": print_expr(g),
                "hypotheses": [str(h) for h in hypotheses],
                "len": cfg.oracle_len,
                "slack": sample.slack,
                "stable": sample.stable,
                "words": words,
            }
        )
    else:
        print(" ".join(u or "1" for u in words))
        marker = "stable" if sample.stable else "UNSTABLE"
        print(f"# {marker} at slack {sample.slack}")
    return EXIT_OK


def cmd_dot(cfg: RunConfig) -> int:
    (g,), hypotheses = _parse_inputs(cfg)
    m = thompson(g)
    if cfg.closed:
        outcome = reduce_seq(g, hypotheses, cfg.closure_config())
        if isinstance(outcome, Undefined):
            logger.warning(
                "Closure undefined (%s); exporting the partial automaton",
                outcome.reason.value,
            )
            m = outcome.partial
        else:
            m = outcome.automaton
    if cfg.output_format == "json":
        text = json.dumps(nfa_to_dict(m), sort_keys=True, indent=2) + "\n"
    else:
        text = to_dot(m)
    if cfg.dot_output:
        with open(cfg.dot_output, "w") as f:
            f.write(text)
        logger.info("Wrote %d states to %s", m.num_states, cfg.dot_output)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "reduce": cmd_reduce,
    "equiv": cmd_equiv,
    "closure-sample": cmd_closure_sample,
    "dot": cmd_dot,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse command line arguments and run the selected command."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.config:
        os.environ["CONFIG_FILE"] = args.config

    try:
        settings = _load_config()
        cfg = _run_config(args, settings)
    except ValueError as e:
        print(f"kahyp: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        return COMMANDS[cfg.command](cfg)
    except ExprSyntaxError as e:
        print(f"kahyp: syntax error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        print(f"kahyp: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


__all__ = [
    "EXIT_OK",
    "EXIT_INPUT_ERROR",
    "EXIT_UNDEFINED",
    "EXIT_UNKNOWN",
    "EXIT_INEQUIVALENT",
    "DEFAULT_FRAMES_DIR",
    "RunConfig",
    "build_parser",
    "cmd_reduce",
    "cmd_equiv",
    "cmd_closure_sample",
    "cmd_dot",
    "main",
]
