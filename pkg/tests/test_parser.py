import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpc import (
    Bound,
    Concat,
    Cond,
    Descriptor,
    Direction,
    EdgePat,
    Join,
    NodePat,
    ParseError,
    Repeat,
    Restricted,
    Restrictor,
    Union_,
    parse_pattern,
    parse_query,
    parse_ruleset,
    render,
)
from gpc.ast import PropEqConst

import gen


def node(var=None, label=None):
    return NodePat(Descriptor(var, label))


def edge(direction, var=None, label=None):
    return EdgePat(direction, Descriptor(var, label))


def test_basic_edge_pattern():
    got = parse_pattern('(x:A) -[e:b]-> (y:A)')
    want = Concat(
        Concat(node("x", "A"), edge(Direction.FORWARD, "e", "b")), node("y", "A")
    )
    assert got == want


def test_empty_descriptor():
    assert parse_pattern("()") == node()


def test_quantified_edge():
    got = parse_pattern("(x:A) -[y]->{1..} (z:B)")
    want = Concat(
        Concat(node("x", "A"), Repeat(edge(Direction.FORWARD, "y"), 1, None)),
        node("z", "B"),
    )
    assert got == want


def test_unbound_condition_still_parses():
    got = parse_pattern('[()] <x.a = "5">')
    assert got == Cond(node(), PropEqConst("x", "a", "5"))


def test_precedence_example():
    got = parse_pattern('(a)(b)<x.k="1">+(c)')
    want = Union_(
        Concat(node("a"), Cond(node("b"), PropEqConst("x", "k", "1"))),
        node("c"),
    )
    assert got == want


def test_quantifier_sugar():
    assert parse_pattern("-[:a]->{3}") == parse_pattern("-[:a]->{3..3}")


def test_edge_shorthands():
    assert parse_pattern("->") == edge(Direction.FORWARD)
    assert parse_pattern("<-") == edge(Direction.BACKWARD)
    assert parse_pattern("--") == edge(Direction.UNDIRECTED)
    assert parse_pattern("-[u]-") == edge(Direction.UNDIRECTED, "u")
    assert parse_pattern("<-[w:a]-") == edge(Direction.BACKWARD, "w", "a")


def test_adjacent_edge_tokens_split_greedily():
    assert parse_pattern("-[x]--[y]-") == Concat(
        edge(Direction.UNDIRECTED, "x"), edge(Direction.UNDIRECTED, "y")
    )
    assert parse_pattern("-[x]-->(y)") == Concat(
        Concat(edge(Direction.UNDIRECTED, "x"), edge(Direction.FORWARD)),
        node("y"),
    )
    assert parse_pattern("(a)<-(b)") == Concat(
        Concat(node("a"), edge(Direction.BACKWARD)), node("b")
    )


def test_reserved_words_not_identifiers():
    for bad in ("(and)", "(trail)", "(x) <simple.k = 1>"):
        with pytest.raises(ParseError):
            parse_pattern(bad)


def test_keywords_case_insensitive():
    q = parse_query("shortest trail (x)")
    assert q.restrictor is Restrictor.SHORTEST_TRAIL
    assert parse_pattern('[(x)] <x.k = TRUE and not x.m = "1">') is not None


def test_condition_keywords_and_parens():
    got = parse_pattern('[(x)] <NOT (x.k = "1" AND x.m = true) OR x.k = 2>')
    assert isinstance(got, Cond)


def test_negative_integer_constant():
    got = parse_pattern("[(x)] <x.k = -3>")
    assert got == Cond(node("x"), PropEqConst("x", "k", -3))


def test_query_forms():
    q = parse_query("SHORTEST TRAIL (x) -> (y)")
    assert isinstance(q, Restricted)
    assert q.restrictor is Restrictor.SHORTEST_TRAIL
    b = parse_query("p = simple (x)")
    assert b == Bound("p", Restrictor.SIMPLE, node("x"))
    j = parse_query("TRAIL (x), SHORTEST (y)")
    assert isinstance(j, Join)


def test_ruleset():
    rs = parse_ruleset("Ans(x, y) <- SHORTEST (x) -> (y); Ans(y, x) <- TRAIL (x) -- (y)")
    assert len(rs.rules) == 2
    assert rs.rules[0].head == ("x", "y")


def test_ruleset_arity_mismatch():
    with pytest.raises(ParseError):
        parse_ruleset("Ans(x, y) <- SHORTEST (x) -> (y); Ans(x) <- TRAIL (x)")


def test_ruleset_head_var_not_in_body():
    with pytest.raises(ParseError):
        parse_ruleset("Ans(w) <- SHORTEST (x) -> (y)")


def test_reserved_variable_prefix_rejected():
    with pytest.raises(ParseError):
        parse_pattern("(_v0)")
    with pytest.raises(ParseError):
        parse_query("_v1 = SHORTEST ()")


def test_error_carries_location_and_expectations():
    with pytest.raises(ParseError) as err:
        parse_pattern("(x:A) -[e:b]-> (y:A")
    assert err.value.line == 1
    assert err.value.column == 20
    assert err.value.expected


def test_trailing_input_rejected():
    with pytest.raises(ParseError):
        parse_pattern("(x) (y) ]")


def test_bad_quantifier_bounds():
    with pytest.raises(ParseError):
        parse_pattern("-[:a]->{3..1}")


def test_render_examples():
    assert render(node("x", "A")) == "(x:A)"
    assert render(Repeat(edge(Direction.FORWARD, None, "a"), 0, None)) == "-[:a]->{0..}"
    assert render(Union_(node(None, "A"), node(None, "B"))) == "[(:A)] + [(:B)]"


def test_roundtrip_random_patterns():
    rng = random.Random(31)
    for _ in range(300):
        pat = gen.rand_pattern(rng, rng.randint(1, 4))
        assert parse_pattern(render(pat)) == pat, render(pat)


def test_roundtrip_random_queries():
    rng = random.Random(32)
    for _ in range(200):
        query = gen.rand_query(rng, 3)
        assert parse_query(render(query)) == query, render(query)


def test_roundtrip_rulesets():
    from gpc import Rule, RuleSet
    from gpc.ast import expr_vars

    rng = random.Random(33)
    for _ in range(100):
        rules = []
        arity = rng.randint(0, 2)
        for _ in range(rng.randint(1, 3)):
            body = gen.rand_query(rng, 3)
            in_scope = sorted(expr_vars(body))
            if len(in_scope) < arity:
                continue
            rules.append(Rule(tuple(rng.sample(in_scope, arity)), body))
        if not rules:
            continue
        ruleset = RuleSet(tuple(rules))
        assert parse_ruleset(render(ruleset)) == ruleset


def test_roundtrip_string_escapes():
    got = parse_pattern('[(x)] <x.k = "a\\"b\\\\c">')
    assert got == Cond(node("x"), PropEqConst("x", "k", 'a"b\\c'))
    assert parse_pattern(render(got)) == got


@st.composite
def patterns(draw, depth=3):
    rng = random.Random(draw(st.integers(min_value=0, max_value=2**32)))
    return gen.rand_pattern(rng, draw(st.integers(min_value=1, max_value=depth)))


@settings(max_examples=150, deadline=None)
@given(patterns())
def test_roundtrip_property(pat):
    assert parse_pattern(render(pat)) == pat
