"""Propositional formulas: parsing, evaluation, truth tables, entailment.

Grammar (loosest binding first)::

    formula := iff
    iff     := implies ("<->" implies)*
    implies := or ("->" implies)?          # right associative
    or      := and ("|" and)*
    and     := not ("&" not)*
    not     := "!" not | atom
    atom    := IDENT | "(" formula ")"

Unicode operators and a few ASCII spellings are accepted as aliases.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

from .errors import ConfigurationError, EvaluationError, ParseError

MAX_VARIABLES = 20


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Var, Not, And, Or, Implies, Iff]
BINARY = (And, Or, Implies, Iff)


def conjoin(formulas: Sequence[Formula]) -> Formula:
    if not formulas:
        raise ConfigurationError("cannot conjoin an empty sentence list")
    out = formulas[0]
    for f in formulas[1:]:
        out = And(out, f)
    return out


@dataclass(frozen=True)
class KnowledgeBase:
    """Ordered sentences read as one conjunction."""

    sentences: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def formula(self) -> Formula:
        return conjoin(self.sentences)


# --------------------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<iff><->|<=>|⇔|↔)
  | (?P<implies>->|=>|⇒|→)
  | (?P<or>\|\|?|∨)
  | (?P<and>&&?|∧)
  | (?P<not>!|~|¬)
  | (?P<lparen>\()
  | (?P<rparen>\))
    """,
    re.VERBOSE,
)


class _Token(NamedTuple):
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unknown token {text[pos]!r}", pos, text)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def take(self, kind: str) -> _Token:
        tok = self.tok
        if tok.kind != kind:
            want = {"rparen": "')'", "eof": "end of input"}.get(kind, kind)
            got = repr(tok.text) if tok.text else "end of input"
            raise ParseError(f"expected {want}, found {got}", tok.pos, self.text)
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        self.take("eof")
        return f

    def iff(self):
        left = self.implies()
        while self.tok.kind == "iff":
            self.i += 1
            left = Iff(left, self.implies())
        return left

    def implies(self):
        left = self.or_()
        if self.tok.kind == "implies":
            self.i += 1
            return Implies(left, self.implies())
        return left

    def or_(self):
        left = self.and_()
        while self.tok.kind == "or":
            self.i += 1
            left = Or(left, self.and_())
        return left

    def and_(self):
        left = self.not_()
        while self.tok.kind == "and":
            self.i += 1
            left = And(left, self.not_())
        return left

    def not_(self):
        if self.tok.kind == "not":
            self.i += 1
            return Not(self.not_())
        return self.atom()

    def atom(self):
        tok = self.tok
        if tok.kind == "ident":
            self.i += 1
            return Var(tok.text)
        if tok.kind == "lparen":
            self.i += 1
            f = self.iff()
            self.take("rparen")
            return f
        got = repr(tok.text) if tok.text else "end of input"
        raise ParseError(f"expected a variable or '(', found {got}", tok.pos, self.text)


def parse(text: str) -> Formula:
    """Parse one formula.

    >>> parse("A => B")
    Implies(left=Var(name='A'), right=Var(name='B'))
    """
    return _Parser(text).parse()


def parse_kb(text: str) -> KnowledgeBase:
    """Parse sentences separated by ';' or newlines; '#' starts a comment line."""
    sentences = []
    offset = 0
    for line in text.splitlines(keepends=True):
        if not line.lstrip().startswith("#"):
            start = offset
            for chunk in line.split(";"):
                if chunk.strip():
                    try:
                        sentences.append(parse(chunk))
                    except ParseError as exc:
                        raise ParseError(exc.message, start + exc.position, text) from None
                start += len(chunk) + 1
        offset += len(line)
    if not sentences:
        raise ParseError("knowledge base has no sentences", 0, text)
    return KnowledgeBase(tuple(sentences))


_SYMBOL = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def to_text(f: Formula) -> str:
    """Render with full parenthesization of binary nodes; re-parses to ``f``."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        return "!" + to_text(f.child)
    return f"({to_text(f.left)} {_SYMBOL[type(f)]} {to_text(f.right)})"


# ------------------------------------------------------------------------ semantics

def _walk_vars(f: Formula, seen: dict):
    if isinstance(f, Var):
        seen.setdefault(f.name, None)
    elif isinstance(f, Not):
        _walk_vars(f.child, seen)
    else:
        _walk_vars(f.left, seen)
        _walk_vars(f.right, seen)


def free_variables(*formulas: Formula | KnowledgeBase) -> list[str]:
    """Variables in order of first appearance across all arguments."""
    seen: dict[str, None] = {}
    for f in formulas:
        for s in (f.sentences if isinstance(f, KnowledgeBase) else (f,)):
            _walk_vars(s, seen)
    return list(seen)


def evaluate(f: Formula, assignment: Mapping[str, bool]) -> bool:
    if isinstance(f, Var):
        try:
            return bool(assignment[f.name])
        except KeyError:
            raise EvaluationError(f"variable {f.name!r} is not bound") from None
    if isinstance(f, Not):
        return not evaluate(f.child, assignment)
    a = evaluate(f.left, assignment)
    b = evaluate(f.right, assignment)
    if isinstance(f, And):
        return a and b
    if isinstance(f, Or):
        return a or b
    if isinstance(f, Implies):
        return (not a) or b
    return a == b


def _check_cap(n: int):
    if n > MAX_VARIABLES:
        raise ConfigurationError(f"{n} variables exceeds the cap of {MAX_VARIABLES}")


def _columns(variables: Sequence[str]) -> dict[str, np.ndarray]:
    idx = np.arange(1 << len(variables))
    return {v: ((idx >> k) & 1).astype(bool) for k, v in enumerate(variables)}


def _eval_vec(f: Formula, cols: Mapping[str, np.ndarray]) -> np.ndarray:
    if isinstance(f, Var):
        try:
            return cols[f.name]
        except KeyError:
            raise EvaluationError(f"variable {f.name!r} is not in the variable list") from None
    if isinstance(f, Not):
        return ~_eval_vec(f.child, cols)
    a = _eval_vec(f.left, cols)
    b = _eval_vec(f.right, cols)
    if isinstance(f, And):
        return a & b
    if isinstance(f, Or):
        return a | b
    if isinstance(f, Implies):
        return ~a | b
    return a == b


def truth_table(f: Formula, variables: Sequence[str]) -> np.ndarray:
    """Boolean vector whose entry i is ``f`` with variable k bound to bit k of i."""
    _check_cap(len(variables))
    if len(set(variables)) != len(variables):
        raise ConfigurationError("variable list repeats a name")
    return np.array(_eval_vec(f, _columns(variables)), dtype=bool)


def assignment_from_index(index: int, variables: Sequence[str]) -> dict[str, bool]:
    return {v: bool((index >> k) & 1) for k, v in enumerate(variables)}


def assignments(variables: Sequence[str]) -> Iterable[dict[str, bool]]:
    """All assignments, in truth-table index order."""
    for i in range(1 << len(variables)):
        yield assignment_from_index(i, variables)


class Entailment(NamedTuple):
    entailed: bool
    violations: list[dict[str, bool]]
    variables: list[str]


def entails(kb: KnowledgeBase | Formula, query: Formula,
            variables: Sequence[str] | None = None) -> Entailment:
    """Model-check ``kb |= query`` by enumerating every assignment.

    ``variables`` may add names beyond those appearing in ``kb`` and ``query``;
    violations are then reported over the enlarged universe.
    """
    alpha = kb.formula() if isinstance(kb, KnowledgeBase) else kb
    universe = free_variables(alpha, query)
    if variables is not None:
        missing = [v for v in universe if v not in variables]
        if missing:
            raise ConfigurationError(f"variable list lacks {missing}")
        universe = list(variables)
    _check_cap(len(universe))
    bad = []
    for a in assignments(universe):
        if evaluate(alpha, a) and not evaluate(query, a):
            bad.append(a)
    return Entailment(not bad, bad, universe)


def table_rows(variables: Sequence[str]) -> Iterable[tuple[bool, ...]]:
    """Rows in textbook order (first variable slowest, F before T)."""
    return product((False, True), repeat=len(variables))
