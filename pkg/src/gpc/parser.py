"""Lexer and recursive-descent parser for the pattern/query/rule-set syntax.

Grammar sketch (whitespace-insensitive, keywords case-insensitive):

    pattern    := concat ('+' concat)*              # '+' is union, binds loosest
    concat     := postfixed+                        # juxtaposition, left-assoc
    postfixed  := atom ( '<' condition '>' | '{' n ('..' m?)? '}' )*
    atom       := '(' descriptor? ')'
                | '-[' descriptor? ']->' | '<-[' descriptor? ']-'
                | '-[' descriptor? ']-'
                | '->' | '<-' | '--'
                | '[' pattern ']'
    descriptor := VAR | ':' LABEL | VAR ':' LABEL
    condition  := or-tree over 'x.key = const', 'x.key = y.key', AND/OR/NOT, parens
    query      := pathq (',' pathq)*                # ',' is join
    pathq      := (VAR '=')? restrictor pattern
    restrictor := SIMPLE | TRAIL | SHORTEST (SIMPLE | TRAIL)?
    ruleset    := rule (';' rule)* ';'?
    rule       := ANS '(' varlist ')' '<-' query

A '<' opens a condition only when not immediately followed by '-';
'<-' always begins a backward edge (and doubles as the rule arrow).
Postfix conditions and quantifiers bind to the nearest preceding atom.
Variables starting with the reserved prefix '_v' are rejected; that
prefix is kept for machine-generated rule sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .ast import (
    And,
    Bound,
    Concat,
    Cond,
    Condition,
    Descriptor,
    Direction,
    EdgePat,
    Join,
    NodePat,
    Not,
    Or,
    Pattern,
    PropEqConst,
    PropEqProp,
    Query,
    Repeat,
    Restricted,
    Restrictor,
    Rule,
    RuleSet,
    Union_,
    expr_vars,
)

RESERVED_VAR_PREFIX = "_v"

KEYWORDS = {"AND", "OR", "NOT", "SIMPLE", "TRAIL", "SHORTEST", "ANS", "TRUE", "FALSE"}

_PUNCT = [
    "<-[",
    "]->",
    "-[",
    "]-",
    "->",
    "<-",
    "--",
    "..",
    "(",
    ")",
    "[",
    "]",
    "{",
    "}",
    "<",
    ">",
    "+",
    ",",
    ";",
    "=",
    ":",
    ".",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: set[str]):
        detail = f"{message} at {line}:{column}"
        if expected:
            detail += " (expected %s)" % ", ".join(sorted(expected))
        super().__init__(detail)
        self.line = line
        self.column = column
        self.expected = expected


@dataclass(frozen=True)
class Token:
    kind: str  # punctuation literal, keyword name, 'IDENT', 'INT', 'STRING', 'EOF'
    value: Union[str, int, bool, None]
    line: int
    column: int


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == '"':
            j, out = i + 1, []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n and text[j + 1] in ('"', "\\"):
                    out.append(text[j + 1])
                    j += 2
                else:
                    out.append(text[j])
                    j += 1
            if j >= n:
                raise ParseError("unterminated string", line, col, {'"'})
            tokens.append(Token("STRING", "".join(out), line, col))
            step = j + 1 - i
            i, col = j + 1, col + step
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", int(text[i:j]), line, col))
            i, col = j, col + (j - i)
            continue
        if _is_ident_start(ch):
            j = i + 1
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            upper = word.upper()
            if upper in KEYWORDS:
                value: Union[str, bool] = upper
                if upper == "TRUE":
                    tokens.append(Token("BOOL", True, line, col))
                elif upper == "FALSE":
                    tokens.append(Token("BOOL", False, line, col))
                else:
                    tokens.append(Token(upper, value, line, col))
            else:
                tokens.append(Token("IDENT", word, line, col))
            i, col = j, col + (j - i)
            continue
        for punct in _PUNCT:
            if text.startswith(punct, i):
                tokens.append(Token(punct, punct, line, col))
                i, col = i + len(punct), col + len(punct)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col, set())
    tokens.append(Token("EOF", None, line, max(col, 1)))
    return tokens


_ATOM_STARTS = {"(", "-[", "<-[", "->", "<-", "--", "["}


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    # -- token plumbing --------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def accept(self, kind: str) -> Optional[Token]:
        if self.at(kind):
            return self.advance()
        return None

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"unexpected {self.describe(tok)}", {kind})
        return self.advance()

    def fail(self, message: str, expected: set[str]):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column, expected)

    @staticmethod
    def describe(tok: Token) -> str:
        if tok.kind == "EOF":
            return "end of input"
        return repr(tok.value)

    def expect_eof(self) -> None:
        if not self.at("EOF"):
            self.fail(f"trailing input {self.describe(self.peek())}", {"EOF"})

    def var_name(self, tok: Token) -> str:
        name = tok.value
        if isinstance(name, str) and name.startswith(RESERVED_VAR_PREFIX):
            raise ParseError(
                f"variable {name!r} uses the reserved prefix {RESERVED_VAR_PREFIX!r}",
                tok.line,
                tok.column,
                set(),
            )
        return name  # type: ignore[return-value]

    # -- patterns ---------------------------------------------------------

    def pattern(self) -> Pattern:
        node = self.concat()
        while self.accept("+"):
            right = self.concat()
            node = Union_(node, right, pos=_pos_of(node))
        return node

    def concat(self) -> Pattern:
        node = self.postfixed()
        while self.at(*_ATOM_STARTS):
            right = self.postfixed()
            node = Concat(node, right, pos=_pos_of(node))
        return node

    def postfixed(self) -> Pattern:
        node = self.atom()
        while True:
            if self.at("<"):
                self.advance()
                theta = self.condition()
                self.expect(">")
                node = Cond(node, theta, pos=_pos_of(node))
            elif self.at("{"):
                open_tok = self.advance()
                lo_tok = self.expect("INT")
                lo = lo_tok.value
                hi: Optional[int]
                if self.accept(".."):
                    hi = self.expect("INT").value if self.at("INT") else None
                else:
                    hi = lo
                self.expect("}")
                if lo < 0 or (hi is not None and hi < lo):
                    raise ParseError(
                        f"bad repetition bounds {{{lo}..{hi}}}",
                        open_tok.line,
                        open_tok.column,
                        set(),
                    )
                node = Repeat(node, lo, hi, pos=_pos_of(node))
            else:
                return node

    def atom(self) -> Pattern:
        tok = self.peek()
        where = (tok.line, tok.column)
        if self.accept("("):
            descr = self.descriptor({")"})
            self.expect(")")
            return NodePat(descr, pos=where)
        if self.accept("-["):
            descr = self.descriptor({"]->", "]-"})
            if self.accept("]->"):
                return EdgePat(Direction.FORWARD, descr, pos=where)
            self.expect("]-")
            return EdgePat(Direction.UNDIRECTED, descr, pos=where)
        if self.accept("<-["):
            descr = self.descriptor({"]-"})
            self.expect("]-")
            return EdgePat(Direction.BACKWARD, descr, pos=where)
        if self.accept("->"):
            return EdgePat(Direction.FORWARD, Descriptor(), pos=where)
        if self.accept("<-"):
            return EdgePat(Direction.BACKWARD, Descriptor(), pos=where)
        if self.accept("--"):
            return EdgePat(Direction.UNDIRECTED, Descriptor(), pos=where)
        if self.accept("["):
            inner = self.pattern()
            self.expect("]")
            return inner
        self.fail(f"unexpected {self.describe(tok)}", set(_ATOM_STARTS))
        raise AssertionError("unreachable")

    def descriptor(self, closers: set[str]) -> Descriptor:
        var = label = None
        if self.at("IDENT"):
            var = self.var_name(self.advance())
        if self.accept(":"):
            label = self.expect("IDENT").value
        if not self.at(*closers):
            self.fail(f"unexpected {self.describe(self.peek())}", closers)
        return Descriptor(var, label)

    # -- conditions --------------------------------------------------------

    def condition(self) -> Condition:
        node = self.and_condition()
        while self.accept("OR"):
            node = Or(node, self.and_condition(), pos=_pos_of(node))
        return node

    def and_condition(self) -> Condition:
        node = self.not_condition()
        while self.accept("AND"):
            node = And(node, self.not_condition(), pos=_pos_of(node))
        return node

    def not_condition(self) -> Condition:
        tok = self.peek()
        if self.accept("NOT"):
            return Not(self.not_condition(), pos=(tok.line, tok.column))
        if self.accept("("):
            inner = self.condition()
            self.expect(")")
            return inner
        return self.atom_condition()

    def atom_condition(self) -> Condition:
        tok = self.peek()
        if not self.at("IDENT"):
            self.fail(f"unexpected {self.describe(tok)}", {"IDENT", "NOT", "("})
        var = self.var_name(self.advance())
        self.expect(".")
        key = self.expect("IDENT").value
        self.expect("=")
        where = (tok.line, tok.column)
        if self.at("IDENT") and self.peek(1).kind == ".":
            other = self.var_name(self.advance())
            self.expect(".")
            other_key = self.expect("IDENT").value
            return PropEqProp(var, key, other, other_key, pos=where)
        if self.at("STRING", "INT", "BOOL"):
            const = self.advance().value
            return PropEqConst(var, key, const, pos=where)
        self.fail(
            f"unexpected {self.describe(self.peek())}",
            {"STRING", "INT", "TRUE", "FALSE", "IDENT"},
        )
        raise AssertionError("unreachable")

    # -- queries -----------------------------------------------------------

    def query(self) -> Query:
        node = self.path_query()
        while self.accept(","):
            node = Join(node, self.path_query(), pos=_pos_of(node))
        return node

    def path_query(self) -> Query:
        tok = self.peek()
        where = (tok.line, tok.column)
        var = None
        if self.at("IDENT") and self.peek(1).kind == "=":
            var = self.var_name(self.advance())
            self.expect("=")
        restrictor = self.restrictor()
        pattern = self.pattern()
        if var is not None:
            return Bound(var, restrictor, pattern, pos=where)
        return Restricted(restrictor, pattern, pos=where)

    def restrictor(self) -> Restrictor:
        if self.accept("SIMPLE"):
            return Restrictor.SIMPLE
        if self.accept("TRAIL"):
            return Restrictor.TRAIL
        if self.accept("SHORTEST"):
            if self.accept("SIMPLE"):
                return Restrictor.SHORTEST_SIMPLE
            if self.accept("TRAIL"):
                return Restrictor.SHORTEST_TRAIL
            return Restrictor.SHORTEST
        self.fail(
            f"unexpected {self.describe(self.peek())}",
            {"SIMPLE", "TRAIL", "SHORTEST"},
        )
        raise AssertionError("unreachable")

    # -- rule sets -----------------------------------------------------------

    def ruleset(self) -> RuleSet:
        rules = [self.rule()]
        while self.accept(";"):
            if self.at("EOF"):
                break
            rules.append(self.rule())
        arity = len(rules[0].head)
        for rule in rules[1:]:
            if len(rule.head) != arity:
                raise ParseError(
                    f"rule head arity {len(rule.head)} differs from {arity}",
                    rule.pos[0] if rule.pos else 1,
                    rule.pos[1] if rule.pos else 1,
                    set(),
                )
        return RuleSet(tuple(rules), pos=rules[0].pos)

    def rule(self) -> Rule:
        tok = self.peek()
        where = (tok.line, tok.column)
        self.expect("ANS")
        self.expect("(")
        head: list[str] = []
        if self.at("IDENT"):
            head.append(self.var_name(self.advance()))
            while self.accept(","):
                head.append(self.var_name(self.expect("IDENT")))
        self.expect(")")
        self.expect("<-")
        body = self.query()
        missing = [v for v in head if v not in expr_vars(body)]
        if missing:
            raise ParseError(
                f"head variable {missing[0]!r} does not occur in the rule body",
                where[0],
                where[1],
                set(),
            )
        return Rule(tuple(head), body, pos=where)


def _pos_of(node) -> Optional[tuple[int, int]]:
    return getattr(node, "pos", None)


def parse_pattern(text: str) -> Pattern:
    parser = _Parser(text)
    node = parser.pattern()
    parser.expect_eof()
    return node


def parse_query(text: str) -> Query:
    parser = _Parser(text)
    node = parser.query()
    parser.expect_eof()
    return node


def parse_ruleset(text: str) -> RuleSet:
    parser = _Parser(text)
    node = parser.ruleset()
    parser.expect_eof()
    return node
