"""Regular expressions and linear hypotheses: AST, parsing and printing."""

import logging
import string
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Set

logger = logging.getLogger("kahyp.syntax")

LETTERS = frozenset(string.ascii_lowercase)

# Letters are single characters and words are plain strings; "" is epsilon.
Letter = str
Word = str


class ExprSyntaxError(ValueError):
    """Raised when expression or hypothesis text does not follow the grammar."""

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position
        self.text = text


class AlphabetError(ExprSyntaxError):
    """Raised when a letter is not part of the declared alphabet."""


class Expr:
    """Base class of the expression AST."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_expr(self)


@dataclass(frozen=True)
class Zero(Expr):
    pass


@dataclass(frozen=True)
class One(Expr):
    pass


@dataclass(frozen=True)
class Atom(Expr):
    letter: Letter


@dataclass(frozen=True)
class Seq(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sum(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Star(Expr):
    inner: Expr


ZERO = Zero()
ONE = One()


@dataclass(frozen=True)
class Hypothesis:
    """A linear hypothesis ``lhs <= rhs`` where ``rhs`` is a single word."""

    lhs: Expr
    rhs: Word

    def __str__(self) -> str:
        return f"{print_expr(self.lhs)}<={self.rhs or '1'}"


def make_seq(left: Expr, right: Expr) -> Expr:
    """Build ``left . right`` keeping sequences right-associated."""
    if isinstance(left, Seq):
        return Seq(left.left, make_seq(left.right, right))
    return Seq(left, right)


def make_sum(left: Expr, right: Expr) -> Expr:
    """Build ``left + right`` keeping sums right-associated."""
    if isinstance(left, Sum):
        return Sum(left.left, make_sum(left.right, right))
    return Sum(left, right)


def word_expr(word: Word) -> Expr:
    """The expression denoting exactly ``word``."""
    if not word:
        return ONE
    result: Expr = Atom(word[-1])
    for letter in reversed(word[:-1]):
        result = Seq(Atom(letter), result)
    return result


def summands(e: Expr) -> List[Expr]:
    """Top-level summands of a (right-associated) sum."""
    parts: List[Expr] = []
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Sum):
            stack.append(node.right)
            stack.append(node.left)
        else:
            parts.append(node)
    return parts


def expr_size(e: Expr) -> int:
    """Number of AST nodes."""
    size = 0
    stack = [e]
    while stack:
        node = stack.pop()
        size += 1
        if isinstance(node, (Seq, Sum)):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Star):
            stack.append(node.inner)
    return size


def letters_of(e: Expr) -> FrozenSet[Letter]:
    if isinstance(e, Atom):
        return frozenset(e.letter)
    if isinstance(e, (Seq, Sum)):
        return letters_of(e.left) | letters_of(e.right)
    if isinstance(e, Star):
        return letters_of(e.inner)
    return frozenset()


def alphabet_of(
    exprs: Iterable[Expr], hypotheses: Iterable[Hypothesis] = ()
) -> FrozenSet[Letter]:
    """Infer the alphabet as the letters appearing in the inputs."""
    found: Set[Letter] = set()
    for e in exprs:
        found |= letters_of(e)
    for h in hypotheses:
        found |= letters_of(h.lhs)
        found |= set(h.rhs)
    return frozenset(found)


# Parsing


class _Parser:
    def __init__(self, text: str, alphabet: Optional[FrozenSet[Letter]] = None):
        self.text = text
        self.alphabet = alphabet
        self.pos = 0

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> Optional[str]:
        self._skip()
        if self.pos < len(self.text):
            return self.text[self.pos]
        return None

    def _error(self, message: str) -> ExprSyntaxError:
        return ExprSyntaxError(message, self.pos, self.text)

    def parse(self) -> Expr:
        if self._peek() is None:
            raise self._error("empty expression")
        result = self.expr()
        if self._peek() is not None:
            raise self._error(f"unexpected {self.text[self.pos]!r}")
        return result

    def expr(self) -> Expr:
        terms = [self.term()]
        while self._peek() == "+":
            self.pos += 1
            terms.append(self.term())
        result = terms[-1]
        for t in reversed(terms[:-1]):
            result = make_sum(t, result)
        return result

    def _starts_factor(self, ch: Optional[str]) -> bool:
        return ch is not None and (ch in "01(" or ch in LETTERS)

    def term(self) -> Expr:
        if not self._starts_factor(self._peek()):
            found = self._peek()
            raise self._error(
                "expected expression" if found is None else f"unexpected {found!r}"
            )
        factors = [self.factor()]
        while self._starts_factor(self._peek()):
            factors.append(self.factor())
        result = factors[-1]
        for f in reversed(factors[:-1]):
            result = make_seq(f, result)
        return result

    def factor(self) -> Expr:
        result = self.base()
        while self._peek() == "*":
            self.pos += 1
            result = Star(result)
        return result

    def base(self) -> Expr:
        ch = self._peek()
        if ch == "0":
            self.pos += 1
            return ZERO
        if ch == "1":
            self.pos += 1
            return ONE
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            if self._peek() != ")":
                raise self._error("expected ')'")
            self.pos += 1
            return inner
        if ch is not None and ch in LETTERS:
            if self.alphabet is not None and ch not in self.alphabet:
                raise AlphabetError(
                    f"letter {ch!r} is not in the alphabet "
                    f"{{{','.join(sorted(self.alphabet))}}}",
                    self.pos,
                    self.text,
                )
            self.pos += 1
            return Atom(ch)
        raise self._error("expected expression")


def parse_expr(text: str, alphabet: Optional[Iterable[Letter]] = None) -> Expr:
    """Parse ``text`` into a right-associated expression AST."""
    sigma = frozenset(alphabet) if alphabet is not None else None
    return _Parser(text, sigma).parse()


def parse_word(
    text: str, alphabet: Optional[Iterable[Letter]] = None, offset: int = 0
) -> Word:
    """Parse a juxtaposition of letters; ``1`` (or nothing) is the empty word."""
    sigma = frozenset(alphabet) if alphabet is not None else None
    letters: List[str] = []
    for i, ch in enumerate(text):
        if ch.isspace() or ch == "1":
            continue
        if ch not in LETTERS:
            raise ExprSyntaxError(f"unexpected {ch!r} in word", offset + i, text)
        if sigma is not None and ch not in sigma:
            raise AlphabetError(
                f"letter {ch!r} is not in the alphabet", offset + i, text
            )
        letters.append(ch)
    return "".join(letters)


def parse_hypothesis(
    text: str, alphabet: Optional[Iterable[Letter]] = None
) -> List[Hypothesis]:
    """Parse ``e <= w`` or ``u == w``.

    An equality between two words becomes the pair of hypotheses
    ``u <= w`` and ``w <= u``.
    """
    if "<=" in text:
        left, right = text.split("<=", 1)
        lhs = _Parser(left, _frozen(alphabet)).parse()
        return [Hypothesis(lhs, parse_word(right, alphabet, len(left) + 2))]
    if "==" in text:
        left, right = text.split("==", 1)
        u = parse_word(left, alphabet)
        w = parse_word(right, alphabet, len(left) + 2)
        return [Hypothesis(word_expr(u), w), Hypothesis(word_expr(w), u)]
    raise ExprSyntaxError("expected '<=' or '=='", len(text), text)


def parse_hypotheses(
    text: str, alphabet: Optional[Iterable[Letter]] = None
) -> List[Hypothesis]:
    """Parse hypothesis file contents: one per line, ``#`` starts a comment."""
    result: List[Hypothesis] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            result.extend(parse_hypothesis(line, alphabet))
        except ExprSyntaxError as exc:
            raise type(exc)(
                f"line {line_no}: {exc.message}", exc.position, line
            ) from None
    return result


def _frozen(alphabet: Optional[Iterable[Letter]]) -> Optional[FrozenSet[Letter]]:
    return frozenset(alphabet) if alphabet is not None else None


# Printing

_PREC_SUM, _PREC_SEQ, _PREC_STAR, _PREC_ATOM = range(4)


def _precedence(e: Expr) -> int:
    if isinstance(e, Sum):
        return _PREC_SUM
    if isinstance(e, Seq):
        return _PREC_SEQ
    if isinstance(e, Star):
        return _PREC_STAR
    return _PREC_ATOM


def _wrap(e: Expr, minimum: int) -> str:
    text = print_expr(e)
    return f"({text})" if _precedence(e) < minimum else text


def print_expr(e: Expr) -> str:
    """Render ``e`` in the input grammar with minimal parentheses."""
    if isinstance(e, Zero):
        return "0"
    if isinstance(e, One):
        return "1"
    if isinstance(e, Atom):
        return e.letter
    if isinstance(e, Sum):
        return "+".join(print_expr(part) for part in summands(e))
    if isinstance(e, Seq):
        return _wrap(e.left, _PREC_SEQ) + _wrap(e.right, _PREC_SEQ)
    if isinstance(e, Star):
        return _wrap(e.inner, _PREC_STAR) + "*"
    raise TypeError(f"not an expression: {e!r}")


# Reversal


def reverse_expr(e: Expr) -> Expr:
    """Expression for the reversed language."""
    if isinstance(e, Seq):
        return make_seq(reverse_expr(e.right), reverse_expr(e.left))
    if isinstance(e, Sum):
        return make_sum(reverse_expr(e.left), reverse_expr(e.right))
    if isinstance(e, Star):
        return Star(reverse_expr(e.inner))
    return e


def reverse_hypothesis(h: Hypothesis) -> Hypothesis:
    return Hypothesis(reverse_expr(h.lhs), h.rhs[::-1])


# Simplification: unit and annihilator laws, idempotent sums.


def mul(left: Expr, right: Expr) -> Expr:
    """``left . right`` with the 0/1 laws applied at the top."""
    if isinstance(left, Zero) or isinstance(right, Zero):
        return ZERO
    if isinstance(left, One):
        return right
    if isinstance(right, One):
        return left
    return make_seq(left, right)


def add(left: Expr, right: Expr) -> Expr:
    """``left + right`` dropping 0 and structurally repeated summands."""
    if isinstance(left, Zero):
        return right
    if isinstance(right, Zero):
        return left
    if left == right:
        return left
    parts: List[Expr] = []
    seen: Set[Expr] = set()
    for part in summands(left) + summands(right):
        if part not in seen:
            seen.add(part)
            parts.append(part)
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Sum(part, result)
    return result


def simplify_expr(e: Expr) -> Expr:
    """Language-preserving cleanup using only the KA unit/zero/idempotence laws."""
    if isinstance(e, Seq):
        return mul(simplify_expr(e.left), simplify_expr(e.right))
    if isinstance(e, Sum):
        return add(simplify_expr(e.left), simplify_expr(e.right))
    if isinstance(e, Star):
        return Star(simplify_expr(e.inner))
    return e


__all__ = [
    "LETTERS",
    "Letter",
    "Word",
    "ExprSyntaxError",
    "AlphabetError",
    "Expr",
    "Zero",
    "One",
    "Atom",
    "Seq",
    "Sum",
    "Star",
    "ZERO",
    "ONE",
    "Hypothesis",
    "make_seq",
    "make_sum",
    "word_expr",
    "summands",
    "expr_size",
    "letters_of",
    "alphabet_of",
    "parse_expr",
    "parse_word",
    "parse_hypothesis",
    "parse_hypotheses",
    "print_expr",
    "reverse_expr",
    "reverse_hypothesis",
    "mul",
    "add",
    "simplify_expr",
]
