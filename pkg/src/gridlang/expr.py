"""Expression DSL over two-dimensional word languages.

Expression trees combine single-cell atoms, unions, restricted
compositions, restricted iteration, and variables. Concrete syntax:

    sum    : term ('+' term)*
    term   : factor ('(' restriction ')' factor)*    left-associative
    factor : atom | variable | '(' sum ')' | factor '*(' restriction ')'

Atoms are single lowercase letters or digits; variables are identifiers
starting with an uppercase letter and may contain primes, so X5' is a
valid name. Postfix iteration binds tightest, then composition, then
union. Comments run from '--' to end of line.

An expression belongs to the extended class exactly when some selector
in some restriction carries an extremeness filter; `classify` reports
the class name. Evaluation substitutes word sets for variables and
keeps every intermediate result inside the given bounds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Union

from .compose import (
    Cursor,
    ParseError,
    Restriction,
    compose_langs,
    format_restriction,
    parse_restriction_at,
    star,
    uses_extremeness,
)
from .grid import Bounds, Budget, Word, normalize

N2RE = "n2RE"
X2RE = "x2RE"

_ATOM_CHARS = "abcdefghijklmnopqrstuvwxyz0123456789"
_VAR_AT = re.compile(r"[A-Z][A-Za-z0-9_']*")
_VAR_FULL = re.compile(r"^[A-Z][A-Za-z0-9_']*$")


@dataclass(frozen=True)
class Atom:
    """A single-cell word constant."""

    letter: str

    def __post_init__(self) -> None:
        if len(self.letter) != 1 or self.letter not in _ATOM_CHARS:
            raise ValueError(f"bad atom letter {self.letter!r}")


@dataclass(frozen=True)
class Sum:
    items: tuple["Expr", ...]

    def __post_init__(self) -> None:
        if len(self.items) < 2:
            raise ValueError("a sum needs at least two operands")


@dataclass(frozen=True)
class Compose:
    left: "Expr"
    restriction: Restriction
    right: "Expr"


@dataclass(frozen=True)
class Star:
    body: "Expr"
    restriction: Restriction


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self) -> None:
        if not _VAR_FULL.match(self.name):
            raise ValueError(f"bad variable name {self.name!r}")


Expr = Union[Atom, Sum, Compose, Star, Var]


# ---------------------------------------------------------------------------
# Parsing


def parse_expr(text: str) -> Expr:
    cur = Cursor(text)
    e = parse_expr_at(cur)
    if not cur.at_end():
        cur.fail("trailing input after expression")
    return e


def parse_expr_at(cur: Cursor) -> Expr:
    items = [_parse_term(cur)]
    while True:
        cur.skip_ws()
        if not cur.take("+"):
            break
        items.append(_parse_term(cur))
    return items[0] if len(items) == 1 else Sum(tuple(items))


def _parse_term(cur: Cursor) -> Expr:
    node = _parse_factor(cur)
    while True:
        cur.skip_ws()
        if cur.peek() != "(":
            break
        open_pos = cur.pos
        cur.take("(")
        cur.skip_ws()
        if cur.pos >= len(cur.text):
            raise ParseError(
                "unfinished composition: expected a restriction after '('",
                open_pos,
            )
        r = parse_restriction_at(cur)
        cur.skip_ws()
        cur.expect(")")
        right = _parse_factor(cur)
        node = Compose(node, r, right)
    return node


def _parse_factor(cur: Cursor) -> Expr:
    cur.skip_ws()
    ch = cur.peek()
    if ch == "(":
        cur.take("(")
        node: Expr = parse_expr_at(cur)
        cur.skip_ws()
        cur.expect(")")
    elif ch and ch in _ATOM_CHARS:
        cur.take(ch)
        node = Atom(ch)
    elif ch.isupper():
        m = _VAR_AT.match(cur.text, cur.pos)
        assert m is not None
        cur.pos = m.end()
        node = Var(m.group(0))
    else:
        cur.fail("expected an atom, a variable, or '('")
    while True:
        cur.skip_ws()
        if not cur.startswith("*"):
            break
        cur.take("*")
        cur.skip_ws()
        cur.expect("(")
        r = parse_restriction_at(cur)
        cur.skip_ws()
        cur.expect(")")
        node = Star(node, r)
    return node


# ---------------------------------------------------------------------------
# Printing


def format_expr(e: Expr) -> str:
    if isinstance(e, Atom):
        return e.letter
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Sum):
        return " + ".join(
            f"({format_expr(i)})" if isinstance(i, Sum) else format_expr(i)
            for i in e.items
        )
    if isinstance(e, Compose):
        left = format_expr(e.left)
        if isinstance(e.left, Sum):
            left = f"({left})"
        right = format_expr(e.right)
        if isinstance(e.right, (Sum, Compose)):
            right = f"({right})"
        return f"{left} ({format_restriction(e.restriction)}) {right}"
    if isinstance(e, Star):
        body = format_expr(e.body)
        if isinstance(e.body, (Sum, Compose)):
            body = f"({body})"
        return f"{body} *({format_restriction(e.restriction)})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Tree walks


def expr_vars(e: Expr) -> Iterator[str]:
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, Sum):
        for item in e.items:
            yield from expr_vars(item)
    elif isinstance(e, Compose):
        yield from expr_vars(e.left)
        yield from expr_vars(e.right)
    elif isinstance(e, Star):
        yield from expr_vars(e.body)


def expr_restrictions(e: Expr) -> Iterator[Restriction]:
    if isinstance(e, Sum):
        for item in e.items:
            yield from expr_restrictions(item)
    elif isinstance(e, Compose):
        yield e.restriction
        yield from expr_restrictions(e.left)
        yield from expr_restrictions(e.right)
    elif isinstance(e, Star):
        yield e.restriction
        yield from expr_restrictions(e.body)


def classify(e: Expr) -> str:
    """Class name: extended when any selector filters on extremeness."""
    if any(uses_extremeness(r) for r in expr_restrictions(e)):
        return X2RE
    return N2RE


# ---------------------------------------------------------------------------
# Equation systems


@dataclass(frozen=True)
class EquationSystem:
    """Ordered variable definitions; every referenced name is defined."""

    equations: tuple[tuple[str, Expr], ...]

    def __post_init__(self) -> None:
        if not self.equations:
            raise ValueError("no equations")
        names = [name for name, _ in self.equations]
        seen: set[str] = set()
        for name in names:
            if not _VAR_FULL.match(name):
                raise ValueError(f"bad variable name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate definition of {name}")
            seen.add(name)
        for name, rhs in self.equations:
            for ref in expr_vars(rhs):
                if ref not in seen:
                    raise ValueError(
                        f"undefined variable {ref} in the definition of {name}"
                    )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.equations)

    def right_hand_side(self, name: str) -> Expr:
        for n, rhs in self.equations:
            if n == name:
                return rhs
        raise KeyError(name)


_DEF_RE = re.compile(r"^([A-Z][A-Za-z0-9_']*)\s*=\s*(.+)$")


def parse_system(text: str) -> EquationSystem:
    """One `Name = expression` per line or semicolon-separated statement."""
    equations: list[tuple[str, Expr]] = []
    for raw in text.splitlines():
        line = raw.split("--", 1)[0]
        for piece in line.split(";"):
            piece = piece.strip()
            if not piece:
                continue
            m = _DEF_RE.match(piece)
            if not m:
                raise ValueError(f"expected 'Name = expression', got {piece!r}")
            equations.append((m.group(1), parse_expr(m.group(2))))
    return EquationSystem(tuple(equations))


def format_system(sys: EquationSystem) -> str:
    return "\n".join(f"{name} = {format_expr(rhs)}" for name, rhs in sys.equations) + "\n"


# ---------------------------------------------------------------------------
# Evaluation


def eval_expr(
    e: Expr,
    env: Mapping[str, Iterable[Word]],
    bounds: Bounds,
    budget: Optional[Budget] = None,
) -> frozenset[Word]:
    """Language of an expression under a variable environment, in bounds."""
    if isinstance(e, Atom):
        return frozenset({Word(((0, 0, e.letter),))})
    if isinstance(e, Var):
        if e.name not in env:
            raise ValueError(f"unbound variable {e.name}")
        return frozenset(
            w for w in map(normalize, env[e.name]) if bounds.admits(w)
        )
    if isinstance(e, Sum):
        out: frozenset[Word] = frozenset()
        for item in e.items:
            out |= eval_expr(item, env, bounds, budget)
        return out
    if isinstance(e, Compose):
        left = eval_expr(e.left, env, bounds, budget)
        right = eval_expr(e.right, env, bounds, budget)
        return compose_langs(left, right, e.restriction, bounds, budget)
    if isinstance(e, Star):
        base = eval_expr(e.body, env, bounds, budget)
        return star(base, e.restriction, bounds, budget)
    raise TypeError(f"not an expression node: {e!r}")
