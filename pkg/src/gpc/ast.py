"""Abstract syntax for patterns, queries, and rule sets.

All nodes are immutable and compared structurally; source positions are
carried for diagnostics but ignored by equality, so parse/render round
trips compare equal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union


Pos = Optional[tuple[int, int]]  # (line, column), 1-based


class Direction(enum.Enum):
    FORWARD = "->"
    BACKWARD = "<-"
    UNDIRECTED = "--"


class Restrictor(enum.Enum):
    SIMPLE = "SIMPLE"
    TRAIL = "TRAIL"
    SHORTEST = "SHORTEST"
    SHORTEST_SIMPLE = "SHORTEST SIMPLE"
    SHORTEST_TRAIL = "SHORTEST TRAIL"

    @property
    def has_shortest(self) -> bool:
        return self in (
            Restrictor.SHORTEST,
            Restrictor.SHORTEST_SIMPLE,
            Restrictor.SHORTEST_TRAIL,
        )

    @property
    def base(self) -> Optional["Restrictor"]:
        """The trail/simple component, if any."""
        if self in (Restrictor.SIMPLE, Restrictor.SHORTEST_SIMPLE):
            return Restrictor.SIMPLE
        if self in (Restrictor.TRAIL, Restrictor.SHORTEST_TRAIL):
            return Restrictor.TRAIL
        return None


@dataclass(frozen=True)
class Descriptor:
    """Optional variable and optional label of a node or edge pattern."""

    var: Optional[str] = None
    label: Optional[str] = None


# --- conditions ---------------------------------------------------------


@dataclass(frozen=True)
class PropEqConst:
    var: str
    key: str
    const: Union[str, int, bool]
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PropEqProp:
    var: str
    key: str
    other_var: str
    other_key: str
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    left: "Condition"
    right: "Condition"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    left: "Condition"
    right: "Condition"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    operand: "Condition"
    pos: Pos = field(default=None, compare=False, repr=False)


Condition = Union[PropEqConst, PropEqProp, And, Or, Not]


# --- patterns -----------------------------------------------------------


@dataclass(frozen=True)
class NodePat:
    descriptor: Descriptor = Descriptor()
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class EdgePat:
    direction: Direction
    descriptor: Descriptor = Descriptor()
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Union_:
    left: "Pattern"
    right: "Pattern"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Concat:
    left: "Pattern"
    right: "Pattern"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Cond:
    pattern: "Pattern"
    condition: Condition
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Repeat:
    """Repetition between lo and hi times; hi is None for an open bound."""

    pattern: "Pattern"
    lo: int
    hi: Optional[int]
    pos: Pos = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.lo < 0 or (self.hi is not None and self.hi < self.lo):
            raise ValueError(f"bad repetition bounds {{{self.lo}..{self.hi}}}")


Pattern = Union[NodePat, EdgePat, Union_, Concat, Cond, Repeat]


# --- queries ------------------------------------------------------------


@dataclass(frozen=True)
class Restricted:
    restrictor: Restrictor
    pattern: Pattern
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Bound:
    var: str
    restrictor: Restrictor
    pattern: Pattern
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Join:
    left: "Query"
    right: "Query"
    pos: Pos = field(default=None, compare=False, repr=False)


Query = Union[Restricted, Bound, Join]


@dataclass(frozen=True)
class Rule:
    head: tuple[str, ...]
    body: Query
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    pos: Pos = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.rules:
            raise ValueError("a rule set needs at least one rule")


Expr = Union[Pattern, Query, RuleSet]


def condition_vars(theta: Condition) -> set[str]:
    if isinstance(theta, PropEqConst):
        return {theta.var}
    if isinstance(theta, PropEqProp):
        return {theta.var, theta.other_var}
    if isinstance(theta, Not):
        return condition_vars(theta.operand)
    return condition_vars(theta.left) | condition_vars(theta.right)


def expr_vars(expr: Expr) -> set[str]:
    """Every variable syntactically used in the expression."""
    if isinstance(expr, NodePat) or isinstance(expr, EdgePat):
        return {expr.descriptor.var} if expr.descriptor.var else set()
    if isinstance(expr, (Union_, Concat)):
        return expr_vars(expr.left) | expr_vars(expr.right)
    if isinstance(expr, Cond):
        return expr_vars(expr.pattern) | condition_vars(expr.condition)
    if isinstance(expr, Repeat):
        return expr_vars(expr.pattern)
    if isinstance(expr, Restricted):
        return expr_vars(expr.pattern)
    if isinstance(expr, Bound):
        return {expr.var} | expr_vars(expr.pattern)
    if isinstance(expr, Join):
        return expr_vars(expr.left) | expr_vars(expr.right)
    if isinstance(expr, RuleSet):
        out: set[str] = set()
        for rule in expr.rules:
            out |= set(rule.head) | expr_vars(rule.body)
        return out
    raise TypeError(f"not an expression: {expr!r}")


def subpatterns(pat: Pattern):
    """Yield pat and all its subpatterns (conditions are not patterns)."""
    yield pat
    if isinstance(pat, (Union_, Concat)):
        yield from subpatterns(pat.left)
        yield from subpatterns(pat.right)
    elif isinstance(pat, (Cond, Repeat)):
        yield from subpatterns(pat.pattern)


def query_patterns(query: Query):
    """Yield the (restrictor, pattern) leaves of a query."""
    if isinstance(query, Restricted):
        yield query.restrictor, query.pattern
    elif isinstance(query, Bound):
        yield query.restrictor, query.pattern
    elif isinstance(query, Join):
        yield from query_patterns(query.left)
        yield from query_patterns(query.right)
    else:
        raise TypeError(f"not a query: {query!r}")


def pattern_size(pat) -> int:
    """Structural size: parse-tree node count plus bits of repetition bounds."""
    if isinstance(pat, (NodePat, EdgePat)):
        return 1
    if isinstance(pat, (Union_, Concat)):
        return 1 + pattern_size(pat.left) + pattern_size(pat.right)
    if isinstance(pat, Cond):
        return 1 + pattern_size(pat.pattern) + _condition_size(pat.condition)
    if isinstance(pat, Repeat):
        bits = max(pat.lo.bit_length(), 1)
        bits += max(pat.hi.bit_length(), 1) if pat.hi is not None else 1
        return 1 + pattern_size(pat.pattern) + bits
    if isinstance(pat, (Restricted, Bound)):
        return 1 + pattern_size(pat.pattern)
    if isinstance(pat, Join):
        return 1 + pattern_size(pat.left) + pattern_size(pat.right)
    raise TypeError(f"not a pattern: {pat!r}")


def _condition_size(theta: Condition) -> int:
    if isinstance(theta, (PropEqConst, PropEqProp)):
        return 1
    if isinstance(theta, Not):
        return 1 + _condition_size(theta.operand)
    return 1 + _condition_size(theta.left) + _condition_size(theta.right)
