"""Rule sets (projection plus top-level union) and translators from
two-way regular path queries, their conjunctions, and nested regular
expressions.

A rule set evaluates to the union over its rules of the head-variable
projections of each body's answers. The translators witness that those
classical query classes embed into the calculus: regex letters become
labeled edge patterns (inverse letters go backward), closures become
repetitions, conjunctive atoms become joined shortest path queries, and a
nested test walks out through the nested expression and back to its
anchor node, which a repeated variable pins down.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union as TUnion

from .ast import (
    Concat,
    Descriptor,
    Direction,
    EdgePat,
    Join,
    NodePat,
    Pattern,
    Query,
    Repeat,
    Restricted,
    Restrictor,
    Rule,
    RuleSet,
    Union_,
)
from .engine import EvalConfig, eval_query
from .graph import PropertyGraph
from .typecheck import check_ruleset, validate_for_mode
from .values import Value

FRESH_PREFIX = "_v"


# -- regular expressions over labels and inverse labels; Nest is the
#    bracketed existential test of nested regular expressions ---------------


@dataclass(frozen=True)
class Label:
    label: str


@dataclass(frozen=True)
class Inverse:
    label: str


@dataclass(frozen=True)
class NreConcat:
    left: "Nre"
    right: "Nre"


@dataclass(frozen=True)
class NreUnion:
    left: "Nre"
    right: "Nre"


@dataclass(frozen=True)
class NrePlus:
    operand: "Nre"


@dataclass(frozen=True)
class NreStar:
    operand: "Nre"


@dataclass(frozen=True)
class Nest:
    operand: "Nre"


Nre = TUnion[Label, Inverse, NreConcat, NreUnion, NrePlus, NreStar, Nest]


@dataclass(frozen=True)
class C2rpq:
    head: tuple[str, ...]
    atoms: tuple[tuple[str, Nre, str], ...]

    def __post_init__(self) -> None:
        atom_vars = {v for x, _, y in self.atoms for v in (x, y)}
        missing = [v for v in self.head if v not in atom_vars]
        if missing:
            raise ValueError(f"head variable {missing[0]!r} not used in any atom")


# -- rule-set evaluation ------------------------------------------------------

ValueTuple = tuple[Value, ...]


def eval_ruleset(
    graph: PropertyGraph, rules: RuleSet, cfg: Optional[EvalConfig] = None
) -> set[ValueTuple]:
    """Union over rules of the head projections of each body's answers."""
    cfg = cfg or EvalConfig()
    check_ruleset(rules)
    validate_for_mode(rules, cfg.collect_mode)
    out: set[ValueTuple] = set()
    for rule in rules.rules:
        for answer in eval_query(graph, rule.body, cfg):
            out.add(tuple(answer.bindings[var] for var in rule.head))
    return out


# -- translators --------------------------------------------------------------


def translate_2rpq(regex: Nre) -> Pattern:
    """Regex over labels/inverse labels as a pattern matching its words."""
    if isinstance(regex, Label):
        return EdgePat(Direction.FORWARD, Descriptor(label=regex.label))
    if isinstance(regex, Inverse):
        return EdgePat(Direction.BACKWARD, Descriptor(label=regex.label))
    if isinstance(regex, NreConcat):
        return Concat(translate_2rpq(regex.left), translate_2rpq(regex.right))
    if isinstance(regex, NreUnion):
        return Union_(translate_2rpq(regex.left), translate_2rpq(regex.right))
    if isinstance(regex, NrePlus):
        return Repeat(translate_2rpq(regex.operand), 1, None)
    if isinstance(regex, NreStar):
        return Repeat(translate_2rpq(regex.operand), 0, None)
    if isinstance(regex, Nest):
        raise ValueError("nested tests are not part of 2RPQ expressions")
    raise TypeError(f"not a regular expression: {regex!r}")


def _endpoint_query(x: str, pattern: Pattern, y: str) -> Query:
    wrapped = Concat(Concat(NodePat(Descriptor(var=x)), pattern), NodePat(Descriptor(var=y)))
    return Restricted(Restrictor.SHORTEST, wrapped)


def translate_c2rpq(query: C2rpq) -> RuleSet:
    """Each atom (x, r, y) becomes a shortest path query from x to y;
    atoms join on shared variables and the head is projected out.

    The result must run in grouping collect mode: translated closures can
    nest bodies that match edgeless paths.
    """
    body: Optional[Query] = None
    for x, regex, y in query.atoms:
        leg = _endpoint_query(x, translate_2rpq(regex), y)
        body = leg if body is None else Join(body, leg)
    assert body is not None
    return RuleSet((Rule(query.head, body),))


def translate_nre(expr: Nre) -> RuleSet:
    """A nested regular expression as a binary rule over path endpoints.

    A nested test [f] anchors a fresh variable z at the current node,
    walks out through the translation of f, and walks back to (z). For a
    single-label body the way back is plain unlabeled backward steps with
    the body's quantifier; for anything richer the way back is the
    direction-inverted, variable-free copy of the outgoing translation,
    so the excursion can always retrace its own steps.
    """
    counter = [0]

    def fresh() -> str:
        name = f"{FRESH_PREFIX}{counter[0]}"
        counter[0] += 1
        return name

    def build(e: Nre) -> Pattern:
        if isinstance(e, (Label, Inverse)):
            return translate_2rpq(e)
        if isinstance(e, NreConcat):
            return Concat(build(e.left), build(e.right))
        if isinstance(e, NreUnion):
            return Union_(build(e.left), build(e.right))
        if isinstance(e, NrePlus):
            return Repeat(build(e.operand), 1, None)
        if isinstance(e, NreStar):
            return Repeat(build(e.operand), 0, None)
        if isinstance(e, Nest):
            anchor = fresh()
            outward = build(e.operand)
            way_back = _nest_return(e.operand, outward)
            return Concat(
                Concat(
                    Concat(NodePat(Descriptor(var=anchor)), outward),
                    way_back,
                ),
                NodePat(Descriptor(var=anchor)),
            )
        raise TypeError(f"not an expression: {e!r}")

    pattern = build(expr)
    body = _endpoint_query("x", pattern, "y")
    return RuleSet((Rule(("x", "y"), body),))


def _nest_return(body: Nre, outward: Pattern) -> Pattern:
    back = EdgePat(Direction.BACKWARD, Descriptor())
    if isinstance(body, Label):
        return back
    if isinstance(body, NrePlus) and isinstance(body.operand, Label):
        return Repeat(back, 1, None)
    if isinstance(body, NreStar) and isinstance(body.operand, Label):
        return Repeat(back, 0, None)
    return _invert_anonymous(outward)


def _invert_anonymous(pat: Pattern) -> Pattern:
    """Mirror image of a pattern: directions flipped, order reversed,
    labels kept, variables dropped."""
    if isinstance(pat, NodePat):
        return NodePat(Descriptor(label=pat.descriptor.label))
    if isinstance(pat, EdgePat):
        flipped = {
            Direction.FORWARD: Direction.BACKWARD,
            Direction.BACKWARD: Direction.FORWARD,
            Direction.UNDIRECTED: Direction.UNDIRECTED,
        }[pat.direction]
        return EdgePat(flipped, Descriptor(label=pat.descriptor.label))
    if isinstance(pat, Concat):
        return Concat(_invert_anonymous(pat.right), _invert_anonymous(pat.left))
    if isinstance(pat, Union_):
        return Union_(_invert_anonymous(pat.left), _invert_anonymous(pat.right))
    if isinstance(pat, Repeat):
        return Repeat(_invert_anonymous(pat.pattern), pat.lo, pat.hi)
    raise TypeError(f"cannot invert {pat!r}")


# -- text formats: '#nre' and '#c2rpq' headed files ---------------------------


class _RegexParser:
    """Tokens: identifiers, ( ) [ ] | + * - , < and '.' as optional concat."""

    def __init__(self, text: str):
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text: str) -> list[str]:
        tokens = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch.isalpha() or ch == "_":
                j = i + 1
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                tokens.append(text[i:j])
                i = j
            elif ch in "()[]|+*-.,<":
                tokens.append(ch)
                i += 1
            else:
                raise ValueError(f"unexpected character {ch!r} in expression")
        tokens.append("<eof>")
        return tokens

    def peek(self) -> str:
        return self.tokens[self.pos]

    def advance(self) -> str:
        tok = self.tokens[self.pos]
        if tok != "<eof>":
            self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            raise ValueError(f"expected {tok!r}, found {self.peek()!r}")
        self.advance()

    def alternation(self) -> Nre:
        node = self.sequence()
        while self.peek() == "|":
            self.advance()
            node = NreUnion(node, self.sequence())
        return node

    def sequence(self) -> Nre:
        node = self.postfixed()
        while True:
            if self.peek() == ".":
                self.advance()
                node = NreConcat(node, self.postfixed())
            elif self.peek() == "(" or self.peek() == "[" or self.peek()[0].isalpha() or self.peek()[0] == "_":
                node = NreConcat(node, self.postfixed())
            else:
                return node

    def postfixed(self) -> Nre:
        node = self.base()
        while self.peek() in ("+", "*", "-"):
            op = self.advance()
            if op == "+":
                node = NrePlus(node)
            elif op == "*":
                node = NreStar(node)
            else:
                if not isinstance(node, Label):
                    raise ValueError("inverse applies to single labels only")
                node = Inverse(node.label)
        return node

    def base(self) -> Nre:
        tok = self.peek()
        if tok == "(":
            self.advance()
            node = self.alternation()
            self.expect(")")
            return node
        if tok == "[":
            self.advance()
            node = self.alternation()
            self.expect("]")
            return Nest(node)
        return Label(self.ident())

    def ident(self) -> str:
        tok = self.peek()
        if tok != "<eof>" and (tok[0].isalpha() or tok[0] == "_"):
            return self.advance()
        raise ValueError(f"expected a name, found {tok!r}")


def parse_nre(text: str) -> Nre:
    parser = _RegexParser(text)
    node = parser.alternation()
    parser.expect("<eof>")
    return node


def parse_c2rpq(text: str) -> C2rpq:
    parser = _RegexParser(text)
    if parser.advance().upper() != "ANS":
        raise ValueError("a conjunctive query starts with Ans(...)")
    parser.expect("(")
    head: list[str] = []
    if parser.peek() != ")":
        head.append(parser.ident())
        while parser.peek() == ",":
            parser.advance()
            head.append(parser.ident())
    parser.expect(")")
    parser.expect("<")
    parser.expect("-")
    atoms = [_c2rpq_atom(parser)]
    while parser.peek() == ",":
        parser.advance()
        atoms.append(_c2rpq_atom(parser))
    parser.expect("<eof>")
    return C2rpq(tuple(head), tuple(atoms))


def _c2rpq_atom(parser: _RegexParser) -> tuple[str, Nre, str]:
    parser.expect("(")
    x = parser.ident()
    parser.expect(",")
    regex = parser.alternation()
    if _contains_nest(regex):
        raise ValueError("conjunctive query atoms take plain regular expressions")
    parser.expect(",")
    y = parser.ident()
    parser.expect(")")
    return x, regex, y


def _contains_nest(e: Nre) -> bool:
    if isinstance(e, Nest):
        return True
    if isinstance(e, (NreConcat, NreUnion)):
        return _contains_nest(e.left) or _contains_nest(e.right)
    if isinstance(e, (NrePlus, NreStar)):
        return _contains_nest(e.operand)
    return False


def translate_source(text: str) -> RuleSet:
    """Translate a '#nre' or '#c2rpq' headed source file into a rule set."""
    lines = text.strip().splitlines()
    if not lines:
        raise ValueError("empty translator input")
    header = lines[0].strip().lower()
    body = "\n".join(lines[1:]).strip()
    if header == "#nre":
        return translate_nre(parse_nre(body))
    if header == "#c2rpq":
        return translate_c2rpq(parse_c2rpq(body))
    raise ValueError("translator input must start with '#nre' or '#c2rpq'")
