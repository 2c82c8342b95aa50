import itertools
import random

import pytest

from gpc import (
    Concat,
    Join,
    Maybe,
    Group,
    TypeCheckError,
    Union_,
    check_condition,
    infer_schema,
    may_match_edgeless,
    maybe_wrap,
    parse_pattern,
    parse_query,
    validate_for_mode,
)
from gpc.ast import PropEqConst, PropEqProp, expr_vars
from gpc.typecheck import EDGE, NODE, PATH

import gen


def test_maybe_wrap():
    assert maybe_wrap(NODE) == Maybe(NODE)
    assert maybe_wrap(Maybe(EDGE)) == Maybe(EDGE)
    assert maybe_wrap(Group(NODE)) == Maybe(Group(NODE))


def test_node_edge_schema():
    assert infer_schema(parse_pattern("(x) -[y]-> ()")) == {"x": NODE, "y": EDGE}


def test_repeat_wraps_in_group():
    assert infer_schema(parse_pattern("[-[y]->]{1..3}")) == {"y": Group(EDGE)}


def test_one_sided_union_gets_maybe():
    schema = infer_schema(parse_pattern("[(x)-[e]->()] + [(x)]"))
    assert schema == {"x": NODE, "e": Maybe(EDGE)}


def test_node_vs_edge_conflict():
    with pytest.raises(TypeCheckError) as err:
        infer_schema(parse_pattern("(x) -[x]-> ()"))
    assert err.value.kind == "conflicting_types"
    assert err.value.variable == "x"


def test_path_var_reuse():
    with pytest.raises(TypeCheckError) as err:
        infer_schema(parse_query("p = SHORTEST (p)"))
    assert err.value.kind == "path_var_reuse"


def test_condition_over_group_rejected():
    with pytest.raises(TypeCheckError) as err:
        infer_schema(parse_pattern('[-[y]->{1..2}] <y.a = "1">'))
    assert err.value.kind == "condition_non_singleton"


def test_join_on_group_rejected():
    q = parse_query("TRAIL [-[g]->]{1..2}, TRAIL [-[g]->]{1..2}")
    with pytest.raises(TypeCheckError) as err:
        infer_schema(q)
    assert err.value.kind == "group_or_maybe_join"


def test_query_schema_with_binding():
    schema = infer_schema(parse_query("p = SHORTEST (x:A) -> (y:B)"))
    assert schema == {"p": PATH, "x": NODE, "y": NODE}


def test_join_inherits_and_merges():
    schema = infer_schema(
        parse_query("p1 = SHORTEST (x:A) ->(y:B), p2 = SHORTEST (y) -> (z:C)")
    )
    assert schema == {"p1": PATH, "p2": PATH, "x": NODE, "y": NODE, "z": NODE}


def test_check_condition_ok_and_errors():
    both_nodes = parse_pattern("(x:A)->(z:B)")
    check_condition(both_nodes, PropEqProp("x", "k", "z", "k"))
    with pytest.raises(TypeCheckError) as unbound:
        check_condition(parse_pattern("(x)"), PropEqConst("y", "k", "1"))
    assert unbound.value.kind == "unbound_condition_var"
    with pytest.raises(TypeCheckError) as grouped:
        check_condition(parse_pattern("[-[g]->]{0..}"), PropEqConst("g", "k", "1"))
    assert grouped.value.kind == "condition_non_singleton"


def test_node_vs_edge_property_comparison_allowed():
    check_condition(parse_pattern("(x:A)-[e]->()"), PropEqProp("x", "k", "e", "m"))


def test_may_match_edgeless():
    assert may_match_edgeless(parse_pattern("()")) is True
    assert may_match_edgeless(parse_pattern("-[:a]->")) is False
    assert may_match_edgeless(parse_pattern("[-[:a]->]{0..}")) is True
    assert may_match_edgeless(parse_pattern("[-[:a]->]{1..}")) is False
    assert may_match_edgeless(parse_pattern("[()] [-[:a]->]")) is False
    assert may_match_edgeless(parse_pattern("[->] + [()]")) is True
    assert may_match_edgeless(parse_pattern('[()] <x.k = "1">')) is True


def test_validate_for_mode():
    edgeless_star = parse_pattern("[()]{0..}")
    with pytest.raises(TypeCheckError) as err:
        validate_for_mode(edgeless_star, "syntactic")
    assert err.value.kind == "edgeless_repetition"
    validate_for_mode(edgeless_star, "grouping")
    validate_for_mode(edgeless_star, "dynamic")
    validate_for_mode(parse_pattern("[-[:a]->]{2..5}"), "syntactic")


def test_schema_domain_equals_vars():
    rng = random.Random(11)
    for _ in range(300):
        pat = gen.rand_pattern(rng, rng.randint(1, 4))
        try:
            schema = infer_schema(pat)
        except TypeCheckError:
            continue
        assert set(schema) == expr_vars(pat)


def _no_nested_maybe(t) -> bool:
    if isinstance(t, Maybe):
        return not isinstance(t.inner, Maybe) and _no_nested_maybe(t.inner)
    if isinstance(t, Group):
        return _no_nested_maybe(t.inner)
    return True


def test_no_nested_maybe_anywhere():
    rng = random.Random(12)
    for _ in range(500):
        pat = gen.rand_pattern(rng, rng.randint(1, 5))
        try:
            schema = infer_schema(pat)
        except TypeCheckError:
            continue
        assert all(_no_nested_maybe(t) for t in schema.values())


def _schema_or_error(expr):
    try:
        return ("ok", infer_schema(expr))
    except TypeCheckError:
        return ("error", None)


def test_operators_associative_commutative():
    rng = random.Random(13)
    pattern_ops = [Union_, Concat]
    for _ in range(200):
        parts = [gen.rand_pattern(rng, rng.randint(1, 3)) for _ in range(3)]
        for op in pattern_ops:
            a, b, c = parts
            assert _schema_or_error(op(op(a, b), c)) == _schema_or_error(
                op(a, op(b, c))
            )
            assert _schema_or_error(op(a, b)) == _schema_or_error(op(b, a))
    for _ in range(100):
        legs = [gen.rand_query(rng, 2) for _ in range(3)]
        a, b, c = legs
        assert _schema_or_error(Join(Join(a, b), c)) == _schema_or_error(
            Join(a, Join(b, c))
        )
        assert _schema_or_error(Join(a, b)) == _schema_or_error(Join(b, a))


def test_schema_compositionality():
    """sch(a op b) depends only on sch(a), sch(b), op."""
    rng = random.Random(14)
    pool: dict = {}
    for _ in range(400):
        pat = gen.rand_pattern(rng, rng.randint(1, 3))
        try:
            schema = infer_schema(pat)
        except TypeCheckError:
            continue
        pool.setdefault(tuple(sorted((v, str(t)) for v, t in schema.items())), []).append(pat)
    groups = [pats for pats in pool.values() if len(pats) >= 2]
    others = [pats[0] for pats in pool.values()]
    checked = 0
    for pats in groups[:20]:
        a, b = pats[0], pats[1]
        for other in others[:10]:
            for op in (Union_, Concat):
                assert _schema_or_error(op(a, other)) == _schema_or_error(op(b, other))
                assert _schema_or_error(op(other, a)) == _schema_or_error(op(other, b))
                checked += 1
    assert checked > 0


def test_union_rules_mutually_exclusive():
    """At most one union typing rule applies to any type pair."""
    base = [NODE, EDGE, PATH, Group(NODE), Maybe(NODE), Maybe(Group(EDGE))]
    types = base + [Group(t) for t in base]
    for t1, t2 in itertools.product(types, repeat=2):
        applicable = [
            t1 == t2,
            t1 == maybe_wrap(t2) and t1 != t2,
            t2 == maybe_wrap(t1) and t1 != t2,
        ]
        assert sum(applicable) <= 1
