"""Command-line front end.

Subcommands:
  check      infer and print the schema of a pattern, query, or rule set
  run        evaluate a query or rule set over a graph (NDJSON answers)
  match      raw pattern evaluation for debugging (NDJSON path/bindings)
  translate  turn a '#nre' or '#c2rpq' file into rule-set text

Exit codes: 0 success, 2 parse/type/graph-validation error, 1 resource or
runtime error, 3 oracle mismatch (with --oracle). Answers stream to
stdout in canonical order; diagnostics and the run report are JSON on
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from .ast import Bound, Join, Restricted, RuleSet, query_patterns
from .engine import (
    EvalConfig,
    ResourceLimitError,
    default_length_bound,
    eval_pattern,
    eval_query,
)
from .gpcplus import eval_ruleset, translate_source
from .graph import GraphValidationError, load_graph
from .oracle import BudgetExceededError, OracleBudget, brute_force_query
from .parser import ParseError, parse_pattern, parse_query, parse_ruleset
from .render import render
from .typecheck import TypeCheckError, check_ruleset, infer_schema, schema_json
from .values import answer_sort_key, serialize_answer, serialize_value


def _read_source(arg: str, allow_literal: bool = False) -> str:
    if arg == "-":
        return sys.stdin.read()
    try:
        with open(arg, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError:
        if allow_literal:
            return arg
        raise


def _parse_any(text: str):
    stripped = text.strip()
    if stripped.lower().startswith(("#nre", "#c2rpq")):
        return translate_source(stripped)
    if stripped.lower().startswith("ans"):
        return parse_ruleset(stripped)
    try:
        return parse_query(stripped)
    except ParseError as query_error:
        try:
            return parse_pattern(stripped)
        except ParseError:
            raise query_error


def _error_json(category: str, exc: Exception, **extra) -> str:
    payload = {"error": category, "message": str(exc)}
    payload.update(extra)
    return json.dumps(payload, sort_keys=True)


def cmd_check(args) -> int:
    text = _read_source(args.query, allow_literal=True)
    if args.graph:
        load_graph(args.graph)  # validation only; typing needs no graph
    expr = _parse_any(text)
    if isinstance(expr, RuleSet):
        schemas = check_ruleset(expr)
        print(json.dumps([schema_json(s) for s in schemas], sort_keys=True))
    else:
        print(json.dumps(schema_json(infer_schema(expr)), sort_keys=True))
    return 0


def _config_from(args) -> EvalConfig:
    return EvalConfig(
        collect_mode=args.collect_mode,
        max_len=args.max_len,
        max_answers=args.max_answers,
        lenient_unify=args.lenient_unify,
    )


def _bound_used(cfg: EvalConfig, graph, expr) -> int:
    if cfg.max_len is not None:
        return cfg.max_len
    rules = expr.rules if isinstance(expr, RuleSet) else None
    queries = [rule.body for rule in rules] if rules else [expr]
    bounds = [
        default_length_bound(restrictor, graph, pattern, cfg.bound_ceiling)
        for query in queries
        for restrictor, pattern in query_patterns(query)
    ]
    return max(bounds)


def _oracle_budget(cfg: EvalConfig, graph, expr) -> OracleBudget:
    return OracleBudget(
        max_path_len=max(_bound_used(cfg, graph, expr), 1),
        max_answers=cfg.max_answers,
    )


def cmd_run(args) -> int:
    graph = load_graph(args.graph)
    expr = _parse_any(_read_source(args.query))
    cfg = _config_from(args)
    started = time.monotonic()
    if isinstance(expr, RuleSet):
        tuples = eval_ruleset(graph, expr, cfg)
        if args.oracle:
            budget = _oracle_budget(cfg, graph, expr)
            expected = {
                tuple(ans.bindings[v] for v in rule.head)
                for rule in expr.rules
                for ans in brute_force_query(graph, rule.body, cfg, budget)
            }
            if expected != tuples:
                print(
                    _error_json(
                        "oracle-mismatch",
                        ValueError(
                            f"engine produced {len(tuples)} tuples, "
                            f"oracle {len(expected)}"
                        ),
                    ),
                    file=sys.stderr,
                )
                return 3
        records = sorted(
            json.dumps({"tuple": [serialize_value(v) for v in row]}, sort_keys=True)
            for row in tuples
        )
        count = len(tuples)
    elif isinstance(expr, (Restricted, Bound, Join)):
        answers = eval_query(graph, expr, cfg)
        if args.oracle:
            budget = _oracle_budget(cfg, graph, expr)
            expected = brute_force_query(graph, expr, cfg, budget)
            if expected != answers:
                print(
                    _error_json(
                        "oracle-mismatch",
                        ValueError(
                            f"engine produced {len(answers)} answers, "
                            f"oracle {len(expected)}"
                        ),
                    ),
                    file=sys.stderr,
                )
                return 3
        records = [
            json.dumps(serialize_answer(a), sort_keys=True)
            for a in sorted(answers, key=answer_sort_key)
        ]
        count = len(answers)
    else:
        raise ParseError("run expects a query or rule set, not a bare pattern", 1, 1, set())
    elapsed_ms = int((time.monotonic() - started) * 1000)
    for line in records:
        if args.format == "table":
            sys.stdout.write(_as_table_row(line) + "\n")
        else:
            sys.stdout.write(line + "\n")
    report = {
        "answer_count": count,
        "elapsed_ms": elapsed_ms,
        "mode": cfg.collect_mode,
        "bound_used": _bound_used(cfg, graph, expr),
        "truncated": False,
    }
    print(json.dumps(report, sort_keys=True), file=sys.stderr)
    return 0


def _as_table_row(record: str) -> str:
    data = json.loads(record)
    if "tuple" in data:
        return "\t".join(_value_text(v) for v in data["tuple"])
    paths = " | ".join("-".join(p["elements"]) for p in data["paths"])
    bindings = ", ".join(
        f"{var}={_value_text(val)}" for var, val in sorted(data["bindings"].items())
    )
    return f"{paths}\t{bindings}"


def _value_text(val: dict) -> str:
    kind = val["kind"]
    if kind in ("node", "edge"):
        return val["id"]
    if kind == "nothing":
        return "nothing"
    if kind == "path":
        return "-".join(val["elements"])
    return "[%s]" % ", ".join(
        "(%s, %s)" % ("-".join(p["elements"]), _value_text(v)) for p, v in val["items"]
    )


def cmd_match(args) -> int:
    graph = load_graph(args.graph)
    pattern = parse_pattern(_read_source(args.pattern, allow_literal=True))
    cfg = _config_from(args)
    if cfg.max_len is None:
        cfg.max_len = len(graph.nodes) + graph.edge_count
    results = eval_pattern(graph, pattern, cfg)
    records = sorted(
        json.dumps(
            {
                "path": {"elements": list(p.elements)},
                "bindings": {
                    var: serialize_value(val) for var, val in mu.items_sorted()
                },
            },
            sort_keys=True,
        )
        for p, mu in results
    )
    for line in records:
        sys.stdout.write(line + "\n")
    return 0


def cmd_translate(args) -> int:
    rules = translate_source(_read_source(args.input))
    print(render(rules))
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="gpc", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="type-check and print the schema")
    check.add_argument("query", help="query/pattern text, file path, or -")
    check.add_argument("--graph", help="optional graph file to validate")
    check.set_defaults(func=cmd_check)

    def eval_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--collect-mode",
            choices=("syntactic", "dynamic", "grouping"),
            default="grouping",
        )
        p.add_argument("--max-len", type=int, default=None)
        p.add_argument("--max-answers", type=int, default=100_000)
        p.add_argument("--lenient-unify", action="store_true")

    run = sub.add_parser("run", help="evaluate a query or rule set")
    run.add_argument("graph")
    run.add_argument("query", help="query file or - for stdin")
    eval_flags(run)
    run.add_argument("--oracle", action="store_true", help="cross-check results")
    run.add_argument("--format", choices=("ndjson", "table"), default="ndjson")
    run.set_defaults(func=cmd_run)

    match = sub.add_parser("match", help="raw pattern evaluation (debug)")
    match.add_argument("graph")
    match.add_argument("pattern")
    eval_flags(match)
    match.set_defaults(func=cmd_match)

    translate = sub.add_parser("translate", help="translate #nre/#c2rpq input")
    translate.add_argument("input")
    translate.set_defaults(func=cmd_translate)
    return top


def main(argv: Optional[list[str]] = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(
            _error_json(
                "parse", exc, line=exc.line, column=exc.column,
                expected=sorted(exc.expected),
            ),
            file=sys.stderr,
        )
        return 2
    except TypeCheckError as exc:
        print(
            _error_json(
                "type", exc, kind=exc.kind, variable=exc.variable,
                location=list(exc.location) if exc.location else None,
            ),
            file=sys.stderr,
        )
        return 2
    except GraphValidationError as exc:
        print(_error_json("graph", exc, violations=exc.violations), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(_error_json("input", exc), file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(_error_json("resource-limit", exc, truncated=True), file=sys.stderr)
        return 1
    except BudgetExceededError as exc:
        print(_error_json("oracle-budget", exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print(_error_json("io", exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
