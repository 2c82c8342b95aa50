"""Set-semantics evaluation of patterns and queries over a property graph.

Evaluation is compositional and bounded by a maximum path length: the
result for a pattern is exactly the set of its answers whose witness path
has length at most the bound. Repetitions run as a worklist over
incremental group states (closed groups plus the open run of edgeless
segments), so open upper bounds terminate without enumerating segment
counts. Restrictors filter at the query level; `shortest` evaluates its
operand in strata of increasing length and stops once every endpoint
pair that the pattern can connect has received its minimum.

A single evaluation is sequential; distinct evaluations may share one
graph concurrently since all inputs are immutable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .ast import (
    And,
    Bound,
    Concat,
    Cond,
    Condition,
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
    Union_,
    expr_vars,
    pattern_size,
)
from .graph import Path, PropertyGraph, const_eq
from .typecheck import (
    Schema,
    infer_schema,
    is_singleton,
    validate_for_mode,
)
from .values import (
    EMPTY,
    NOTHING,
    Answer,
    Assignment,
    EdgeVal,
    GroupVal,
    NodeVal,
    PathVal,
    Value,
)

COLLECT_MODES = ("syntactic", "dynamic", "grouping")


class ResourceLimitError(RuntimeError):
    """Evaluation exceeded the configured answer/state ceiling."""


@dataclass
class EvalConfig:
    collect_mode: str = "grouping"
    max_len: Optional[int] = None  # None resolves per restrictor
    max_answers: int = 100_000
    lenient_unify: bool = False
    bound_ceiling: int = 10**6

    def __post_init__(self) -> None:
        if self.collect_mode not in COLLECT_MODES:
            raise ValueError(f"unknown collect mode {self.collect_mode!r}")


# -- assignments and conditions -------------------------------------------


def unify(mu1: Assignment, mu2: Assignment, lenient: bool = False) -> Optional[Assignment]:
    """Merge two assignments agreeing on shared variables, or None.

    In lenient mode a shared variable also unifies when either side is
    Nothing, resolving to the non-Nothing value. Lenient unification only
    matters inside collect: the type system keeps shared variables of
    concatenations and joins at node/edge types, which never bind Nothing.
    """
    if len(mu2) > len(mu1):
        mu1, mu2 = mu2, mu1
    out = dict(mu1)
    for var, val in mu2.items():
        cur = out.get(var)
        if cur is None:
            out[var] = val
        elif cur == val:
            continue
        elif lenient and cur is NOTHING:
            out[var] = val
        elif lenient and val is NOTHING:
            continue
        else:
            return None
    return Assignment(out)


def satisfies(graph: PropertyGraph, mu: Assignment, theta: Condition) -> bool:
    """Boolean condition semantics; undefined properties make atoms false."""
    if isinstance(theta, PropEqConst):
        value = graph.prop(mu[theta.var].id, theta.key)  # type: ignore[union-attr]
        return value is not None and const_eq(value, theta.const)
    if isinstance(theta, PropEqProp):
        left = graph.prop(mu[theta.var].id, theta.key)  # type: ignore[union-attr]
        right = graph.prop(mu[theta.other_var].id, theta.other_key)  # type: ignore[union-attr]
        return left is not None and right is not None and const_eq(left, right)
    if isinstance(theta, And):
        return satisfies(graph, mu, theta.left) and satisfies(graph, mu, theta.right)
    if isinstance(theta, Or):
        return satisfies(graph, mu, theta.left) or satisfies(graph, mu, theta.right)
    if isinstance(theta, Not):
        return not satisfies(graph, mu, theta.operand)
    raise TypeError(f"not a condition: {theta!r}")


# -- collect ----------------------------------------------------------------


def refactor(lengths: list[int]) -> list[int]:
    """Group boundaries fusing maximal runs of zero lengths.

    Returns 0-based boundary positions b_0=0 < ... < b_l=len(lengths);
    group k spans lengths[b_k:b_{k+1}].
    """
    if not lengths:
        raise ValueError("refactor needs a non-empty sequence")
    bounds = [0]
    i, n = 0, len(lengths)
    while i < n:
        if lengths[i] > 0:
            i += 1
        else:
            while i < n and lengths[i] == 0:
                i += 1
        bounds.append(i)
    return bounds


def collect_fn(
    mode: str,
    segments: list[tuple[Path, Assignment]],
    lenient: bool = False,
) -> Optional[Assignment]:
    """Assemble per-segment bindings into path-tagged group lists.

    dynamic: undefined (None) when any segment is edgeless, else one list
    entry per segment. syntactic: one entry per segment (a validated
    pattern never produces edgeless segments here). grouping: fuse
    maximal runs of edgeless segments; each run's assignments must
    pairwise unify, else None.
    """
    if not segments:
        raise ValueError("collect needs at least one segment")
    for (p, _), (q, _) in zip(segments, segments[1:]):
        if p.tgt != q.src:
            raise ValueError("collect segments must concatenate")
    domain = list(segments[0][1])
    if mode == "dynamic" and any(p.length == 0 for p, _ in segments):
        return None
    if mode in ("dynamic", "syntactic"):
        groups = segments
    elif mode == "grouping":
        bounds = refactor([p.length for p, _ in segments])
        groups = []
        for k in range(len(bounds) - 1):
            chunk = segments[bounds[k] : bounds[k + 1]]
            merged = chunk[0][1]
            for _, mu in chunk[1:]:
                merged = unify(merged, mu, lenient)  # type: ignore[assignment]
                if merged is None:
                    return None
            group_path = chunk[0][0]
            for p, _ in chunk[1:]:
                group_path = group_path.concat(p)  # type: ignore[assignment]
            groups.append((group_path, merged))
    else:
        raise ValueError(f"unknown collect mode {mode!r}")
    return Assignment(
        {x: GroupVal(tuple((p, mu[x]) for p, mu in groups)) for x in domain}
    )


# -- length bounds -----------------------------------------------------------


def default_length_bound(
    restrictor: Restrictor,
    graph: PropertyGraph,
    pattern: Pattern,
    ceiling: int = 10**6,
) -> int:
    """Sound path-length cutoff per restrictor.

    simple: |N|; trail: total edge count; shortest:
    (|N| + |E|) * 2^size(pattern), capped at `ceiling`. Combined
    restrictors take the minimum of the applicable bounds.
    """
    bounds = []
    base = restrictor.base
    if base is Restrictor.SIMPLE:
        bounds.append(len(graph.nodes))
    elif base is Restrictor.TRAIL:
        bounds.append(graph.edge_count)
    if restrictor.has_shortest:
        size = pattern_size(pattern)
        if size >= ceiling.bit_length():
            bounds.append(ceiling)
        else:
            bounds.append(
                min((len(graph.nodes) + graph.edge_count) << size, ceiling)
            )
    return min(bounds)


# -- relation helpers (pair DP for the variable-free check) ------------------


def _compose(r1: frozenset, r2: frozenset) -> frozenset:
    by_src: dict = {}
    for s, t in r2:
        by_src.setdefault(s, []).append(t)
    return frozenset((s, u) for s, t in r1 for u in by_src.get(t, ()))


def _rel_power(rel: frozenset, n: int, domain: Iterable) -> frozenset:
    result = frozenset((x, x) for x in domain)
    base = rel
    while n:
        if n & 1:
            result = _compose(result, base)
        n >>= 1
        if n:
            base = _compose(base, base)
    return result


def _rel_star(rel: frozenset, domain: Iterable) -> frozenset:
    closure = frozenset((x, x) for x in domain)
    frontier = closure
    while True:
        new = _compose(frontier, rel) - closure
        if not new:
            return closure
        closure |= new
        frontier = new


def _rel_power_range(
    rel: frozenset, lo: int, hi: Optional[int], domain: Iterable
) -> frozenset:
    if hi is None:
        return _compose(_rel_power(rel, lo, domain), _rel_star(rel, domain))
    acc = cur = _rel_power(rel, lo, domain)
    seen = {cur}
    for _ in range(lo + 1, hi + 1):
        cur = _compose(cur, rel)
        if cur in seen:
            break
        seen.add(cur)
        acc |= cur
    return acc


def pairs_no_vars(graph: PropertyGraph, pattern: Pattern, p: Path) -> set[tuple[int, int]]:
    """Node-position pairs (i, j) whose subpath of p matches the pattern.

    Only defined for variable-free patterns, where every match binds the
    empty assignment; computed by a relational DP over subexpressions
    with squaring for repetition powers.
    """
    if expr_vars(pattern):
        raise ValueError("pairs_no_vars requires a variable-free pattern")
    positions = range(p.length + 1)
    nodes = p.nodes()
    edges = p.edges()

    def rel(pat: Pattern) -> frozenset:
        if isinstance(pat, NodePat):
            label = pat.descriptor.label
            return frozenset(
                (i, i)
                for i in positions
                if label is None or label in graph.label_set(nodes[i])
            )
        if isinstance(pat, EdgePat):
            label = pat.descriptor.label
            out = []
            for i in range(1, p.length + 1):
                edge = edges[i - 1]
                if label is not None and label not in graph.label_set(edge):
                    continue
                if pat.direction is Direction.FORWARD:
                    ok = edge in graph.directed_edges and graph.directed_edges[
                        edge
                    ] == (nodes[i - 1], nodes[i])
                elif pat.direction is Direction.BACKWARD:
                    ok = edge in graph.directed_edges and graph.directed_edges[
                        edge
                    ] == (nodes[i], nodes[i - 1])
                else:
                    ok = edge in graph.undirected_edges and graph.undirected_edges[
                        edge
                    ] == frozenset((nodes[i - 1], nodes[i]))
                if ok:
                    out.append((i - 1, i))
            return frozenset(out)
        if isinstance(pat, Concat):
            return _compose(rel(pat.left), rel(pat.right))
        if isinstance(pat, Union_):
            return rel(pat.left) | rel(pat.right)
        if isinstance(pat, Repeat):
            return _rel_power_range(rel(pat.pattern), pat.lo, pat.hi, positions)
        if isinstance(pat, Cond):
            raise ValueError("variable-free patterns cannot carry conditions")
        raise TypeError(f"not a pattern: {pat!r}")

    return set(rel(pattern))


# -- satisfiable endpoint pairs ----------------------------------------------
#
# For `shortest` we need to know when further strata cannot satisfy any new
# (src, tgt) pair. The analysis below computes, exactly, the endpoint pairs
# for which the pattern has at least one answer, by relational composition
# over (src, tgt, singleton-variable bindings, edgeless?) witnesses.
# Group/optional variables never constrain composition (the type system
# forbids sharing them), so projecting them away loses nothing; an
# edgeless run of a repetition can always reuse one segment's bindings,
# so pair reachability through repetitions is plain relational power.


class _SatOverflow(Exception):
    pass


def _z_compose(r1: frozenset, r2: frozenset) -> frozenset:
    by_src: dict = {}
    for s, t, z in r2:
        by_src.setdefault(s, []).append((t, z))
    return frozenset(
        (s, u, z1 and z2) for s, t, z1 in r1 for u, z2 in by_src.get(t, ())
    )


def _z_power(rel: frozenset, n: int, domain: Iterable) -> frozenset:
    result = frozenset((x, x, True) for x in domain)
    base = rel
    while n:
        if n & 1:
            result = _z_compose(result, base)
        n >>= 1
        if n:
            base = _z_compose(base, base)
    return result


def _z_star(rel: frozenset, domain: Iterable) -> frozenset:
    closure = frozenset((x, x, True) for x in domain)
    frontier = closure
    while True:
        new = _z_compose(frontier, rel) - closure
        if not new:
            return closure
        closure |= new
        frontier = new


def _z_power_range(
    rel: frozenset, lo: int, hi: Optional[int], domain: Iterable
) -> frozenset:
    if hi is None:
        return _z_compose(_z_power(rel, lo, domain), _z_star(rel, domain))
    acc = cur = _z_power(rel, lo, domain)
    seen = {cur}
    for _ in range(lo + 1, hi + 1):
        cur = _z_compose(cur, rel)
        if cur in seen:
            break
        seen.add(cur)
        acc |= cur
    return acc


def satisfiable_pairs(
    graph: PropertyGraph,
    pattern: Pattern,
    collect_mode: str = "grouping",
    limit: int = 500_000,
) -> set[tuple[str, str]]:
    """Exactly the (src, tgt) pairs for which the pattern has an answer.

    Falls back to the full node square if the intermediate witness
    relations outgrow `limit` (a sound overapproximation: callers use the
    result only to stop searching early).
    """
    try:
        entries = _sat_entries(graph, pattern, collect_mode, {}, limit)
    except _SatOverflow:
        return {(u, v) for u in graph.nodes for v in graph.nodes}
    return {(s, t) for s, t, _, _ in entries}


def _sat_entries(
    graph: PropertyGraph,
    pat: Pattern,
    mode: str,
    schema_cache: dict,
    limit: int,
) -> frozenset:
    """Witness entries (src, tgt, kept bindings, edgeless?)."""

    def schema_of(node: Pattern) -> Schema:
        if node not in schema_cache:
            schema_cache[node] = infer_schema(node)
        return schema_cache[node]

    def kept(node: Pattern) -> frozenset[str]:
        return frozenset(v for v, t in schema_of(node).items() if is_singleton(t))

    def restrict(mu: Assignment, keep: frozenset[str]) -> Assignment:
        if set(mu) == keep:
            return mu
        return Assignment({v: mu[v] for v in keep})

    def guard(entries: frozenset) -> frozenset:
        if len(entries) > limit:
            raise _SatOverflow
        return entries

    def walk(node: Pattern) -> frozenset:
        if isinstance(node, NodePat):
            var, label = node.descriptor.var, node.descriptor.label
            return frozenset(
                (
                    n,
                    n,
                    Assignment({var: NodeVal(n)}) if var else EMPTY,
                    True,
                )
                for n in graph.nodes
                if label is None or label in graph.label_set(n)
            )
        if isinstance(node, EdgePat):
            var, label = node.descriptor.var, node.descriptor.label
            out = []
            if node.direction in (Direction.FORWARD, Direction.BACKWARD):
                for e, (s, t) in graph.directed_edges.items():
                    if label is not None and label not in graph.label_set(e):
                        continue
                    mu = Assignment({var: EdgeVal(e)}) if var else EMPTY
                    if node.direction is Direction.FORWARD:
                        out.append((s, t, mu, False))
                    else:
                        out.append((t, s, mu, False))
            else:
                for e, ends in graph.undirected_edges.items():
                    if label is not None and label not in graph.label_set(e):
                        continue
                    mu = Assignment({var: EdgeVal(e)}) if var else EMPTY
                    pair = tuple(ends)
                    if len(pair) == 1:
                        out.append((pair[0], pair[0], mu, False))
                    else:
                        out.append((pair[0], pair[1], mu, False))
                        out.append((pair[1], pair[0], mu, False))
            return frozenset(out)
        if isinstance(node, Concat):
            left, right = walk(node.left), walk(node.right)
            keep = kept(node)
            by_src: dict = {}
            for s, t, mu, z in right:
                by_src.setdefault(s, []).append((t, mu, z))
            out = set()
            for s, t, mu1, z1 in left:
                for u, mu2, z2 in by_src.get(t, ()):
                    merged = unify(mu1, mu2)
                    if merged is not None:
                        out.add((s, u, restrict(merged, keep), z1 and z2))
            return guard(frozenset(out))
        if isinstance(node, Union_):
            keep = kept(node)
            return guard(
                frozenset(
                    (s, t, restrict(mu, keep), z)
                    for s, t, mu, z in walk(node.left) | walk(node.right)
                )
            )
        if isinstance(node, Cond):
            return frozenset(
                entry
                for entry in walk(node.pattern)
                if satisfies(graph, entry[2], node.condition)
            )
        if isinstance(node, Repeat):
            inner = walk(node.pattern)
            steps = frozenset(
                (s, t, z) for s, t, _, z in inner if mode == "grouping" or not z
            )
            pairs = _z_power_range(steps, node.lo, node.hi, graph.nodes)
            return guard(frozenset((s, t, EMPTY, z) for s, t, z in pairs))
        raise TypeError(f"not a pattern: {node!r}")

    return walk(pat)


# -- pattern evaluation -------------------------------------------------------


PatternAnswers = frozenset  # of (Path, Assignment)


class _Evaluator:
    """One bounded bottom-up evaluation; memoizes per subexpression."""

    def __init__(self, graph: PropertyGraph, cfg: EvalConfig, max_len: int):
        self.graph = graph
        self.cfg = cfg
        self.max_len = max_len
        self.memo: dict[Pattern, PatternAnswers] = {}
        self.schemas: dict[Pattern, Schema] = {}
        self.work = 0
        self.work_limit = max(cfg.max_answers * 20, 1_000_000)

    def schema(self, pat: Pattern) -> Schema:
        if pat not in self.schemas:
            self.schemas[pat] = infer_schema(pat)
        return self.schemas[pat]

    def charge(self, amount: int = 1) -> None:
        self.work += amount
        if self.work > self.work_limit:
            raise ResourceLimitError(
                f"evaluation exceeded {self.work_limit} intermediate states"
            )

    def check_size(self, answers) -> None:
        if len(answers) > self.cfg.max_answers:
            raise ResourceLimitError(
                f"answer set exceeded the ceiling of {self.cfg.max_answers}"
            )

    def answers(self, pat: Pattern) -> PatternAnswers:
        cached = self.memo.get(pat)
        if cached is not None:
            return cached
        result = frozenset(self._compute(pat))
        self.check_size(result)
        self.memo[pat] = result
        return result

    def _compute(self, pat: Pattern) -> set[tuple[Path, Assignment]]:
        graph = self.graph
        if isinstance(pat, NodePat):
            var, label = pat.descriptor.var, pat.descriptor.label
            return {
                (
                    Path((n,)),
                    Assignment({var: NodeVal(n)}) if var else EMPTY,
                )
                for n in graph.nodes
                if label is None or label in graph.label_set(n)
            }
        if isinstance(pat, EdgePat):
            if self.max_len < 1:
                return set()
            var, label = pat.descriptor.var, pat.descriptor.label
            out: set[tuple[Path, Assignment]] = set()
            if pat.direction in (Direction.FORWARD, Direction.BACKWARD):
                for e, (s, t) in graph.directed_edges.items():
                    if label is not None and label not in graph.label_set(e):
                        continue
                    mu = Assignment({var: EdgeVal(e)}) if var else EMPTY
                    if pat.direction is Direction.FORWARD:
                        out.add((Path((s, e, t)), mu))
                    else:
                        out.add((Path((t, e, s)), mu))
            else:
                for e, ends in graph.undirected_edges.items():
                    if label is not None and label not in graph.label_set(e):
                        continue
                    mu = Assignment({var: EdgeVal(e)}) if var else EMPTY
                    pair = tuple(ends)
                    if len(pair) == 1:
                        out.add((Path((pair[0], e, pair[0])), mu))
                    else:
                        out.add((Path((pair[0], e, pair[1])), mu))
                        out.add((Path((pair[1], e, pair[0])), mu))
            return out
        if isinstance(pat, Concat):
            left = self.answers(pat.left)
            right = self.answers(pat.right)
            by_src: dict = {}
            for p2, mu2 in right:
                by_src.setdefault(p2.src, []).append((p2, mu2))
            out = set()
            for p1, mu1 in left:
                budget = self.max_len - p1.length
                for p2, mu2 in by_src.get(p1.tgt, ()):
                    if p2.length > budget:
                        continue
                    self.charge()
                    merged = unify(mu1, mu2)
                    if merged is not None:
                        out.add((p1.concat(p2), merged))
            return out
        if isinstance(pat, Union_):
            domain = set(self.schema(pat))
            out = set()
            for p, mu in self.answers(pat.left) | self.answers(pat.right):
                if set(mu) != domain:
                    mu = Assignment(
                        {x: mu.get(x, NOTHING) for x in domain}
                    )
                out.add((p, mu))
            return out
        if isinstance(pat, Cond):
            return {
                (p, mu)
                for p, mu in self.answers(pat.pattern)
                if satisfies(self.graph, mu, pat.condition)
            }
        if isinstance(pat, Repeat):
            return self._repeat(pat)
        raise TypeError(f"not a pattern: {pat!r}")

    # -- repetition -----------------------------------------------------------

    def _repeat(self, pat: Repeat) -> set[tuple[Path, Assignment]]:
        body = self.answers(pat.pattern)
        domain = tuple(sorted(self.schema(pat.pattern)))
        lo, hi = self._clamp_counts(pat.lo, pat.hi, body)
        if not domain:
            return self._repeat_no_vars(lo, hi, body)
        if self.cfg.collect_mode == "grouping":
            return self._repeat_grouping(lo, hi, body, domain)
        return self._repeat_positive(lo, hi, body, domain)

    def _clamp_counts(self, lo: int, hi: Optional[int], body: PatternAnswers):
        """Clamp segment counts to the regime where powers are constant.

        Beyond B = (max_len+1)*(M+1) every bounded composition both pumps
        up (duplicate an edgeless segment; M counts the per-node choices
        that matter, 1 under strict unification) and collapses down (some
        run holds a segment it does not need), so the powers agree with
        the B-th one; without edgeless segments, counts past the length
        bound yield nothing at all.
        """
        if self.cfg.collect_mode != "grouping":
            return lo, hi  # positive-only machines are length-limited anyway
        zero_by_node: dict[str, int] = {}
        for p, _ in body:
            if p.length == 0:
                zero_by_node[p.src] = zero_by_node.get(p.src, 0) + 1
        if not zero_by_node:
            choices = 0
        elif self.cfg.lenient_unify:
            choices = max(zero_by_node.values())
        else:
            choices = 1
        stable = (self.max_len + 1) * (choices + 1)
        return min(lo, stable), hi if hi is None else min(hi, stable)

    def _bump(self, k: int, lo: int, hi: Optional[int]) -> int:
        # With an open upper bound only "reached lo" matters, so cap the count.
        return min(k + 1, lo) if hi is None else k + 1

    def _count_ok(self, k: int, lo: int, hi: Optional[int]) -> bool:
        return k >= lo if hi is None else lo <= k <= hi

    def _repeat_no_vars(self, lo: int, hi: Optional[int], body: PatternAnswers):
        """Variable-free body: only (path, segment count) matters."""
        by_src: dict = {}
        for p, _ in body:
            if self.cfg.collect_mode == "dynamic" and p.length == 0:
                continue
            by_src.setdefault(p.src, []).append(p)
        out: set[tuple[Path, Assignment]] = set()
        start = [(Path((n,)), 0) for n in self.graph.nodes]
        visited = set(start)
        queue = list(start)
        while queue:
            path_so_far, k = queue.pop()
            if self._count_ok(k, lo, hi):
                out.add((path_so_far, EMPTY))
            for seg in by_src.get(path_so_far.tgt, ()):
                if path_so_far.length + seg.length > self.max_len:
                    continue
                nk = self._bump(k, lo, hi)
                if hi is not None and nk > hi:
                    continue
                state = (path_so_far.concat(seg), nk)
                if state not in visited:
                    self.charge()
                    visited.add(state)
                    queue.append(state)
        return out

    def _repeat_positive(self, lo: int, hi: Optional[int], body: PatternAnswers, domain):
        """dynamic/syntactic collect: every segment keeps a group of its own.

        Edgeless segments are undefined in dynamic mode and, after
        validation, cannot occur in syntactic mode, so both skip them;
        segment counts are then bounded by the path length.
        """
        by_src: dict = {}
        for p, mu in body:
            if p.length == 0:
                continue
            by_src.setdefault(p.src, []).append((p, mu))
        out: set[tuple[Path, Assignment]] = set()

        def emit(path_so_far: Path, segments) -> None:
            out.add(
                (
                    path_so_far,
                    Assignment(
                        {
                            x: GroupVal(tuple((p, mu[x]) for p, mu in segments))
                            for x in domain
                        }
                    ),
                )
            )

        if lo == 0:
            for n in self.graph.nodes:
                emit(Path((n,)), ())
        queue: list[tuple[Path, tuple]] = [
            (p, ((p, mu),)) for p, mu in body if p.length > 0
        ]
        while queue:
            path_so_far, segments = queue.pop()
            k = len(segments)
            if hi is not None and k > hi:
                continue
            if self._count_ok(k, lo, hi):
                emit(path_so_far, segments)
            if hi is not None and k == hi:
                continue
            for seg, mu in by_src.get(path_so_far.tgt, ()):
                if path_so_far.length + seg.length > self.max_len:
                    continue
                self.charge()
                queue.append((path_so_far.concat(seg), segments + ((seg, mu),)))
        return out

    def _repeat_grouping(self, lo: int, hi: Optional[int], body: PatternAnswers, domain):
        """Grouping collect as an incremental state machine.

        A state is (path so far, closed groups, open edgeless run, count):
        consecutive edgeless segments merge into the open run, whose
        assignments must unify; a positive segment closes the run. The
        visited set makes open upper bounds terminate: path length is
        bounded, groups and runs come from finite sets, and counts are
        capped once the lower bound is reached.
        """
        lenient = self.cfg.lenient_unify
        by_src: dict = {}
        for p, mu in body:
            by_src.setdefault(p.src, []).append((p, mu))
        out: set[tuple[Path, Assignment]] = set()

        def emit(path_so_far: Path, closed, open_mu) -> None:
            groups = closed
            if open_mu is not None:
                groups = closed + ((Path((path_so_far.tgt,)), open_mu),)
            out.add(
                (
                    path_so_far,
                    Assignment(
                        {
                            x: GroupVal(tuple((p, mu[x]) for p, mu in groups))
                            for x in domain
                        }
                    ),
                )
            )

        start = [(Path((n,)), (), None, 0) for n in self.graph.nodes]
        visited = set(start)
        queue = list(start)
        while queue:
            path_so_far, closed, open_mu, k = queue.pop()
            if self._count_ok(k, lo, hi):
                emit(path_so_far, closed, open_mu)
            for seg, mu in by_src.get(path_so_far.tgt, ()):
                nk = self._bump(k, lo, hi)
                if hi is not None and nk > hi:
                    continue
                if seg.length == 0:
                    merged = mu if open_mu is None else unify(open_mu, mu, lenient)
                    if merged is None:
                        continue
                    state = (path_so_far, closed, merged, nk)
                else:
                    if path_so_far.length + seg.length > self.max_len:
                        continue
                    nclosed = closed
                    if open_mu is not None:
                        nclosed = nclosed + ((Path((path_so_far.tgt,)), open_mu),)
                    nclosed = nclosed + ((seg, mu),)
                    state = (path_so_far.concat(seg), nclosed, None, nk)
                if state not in visited:
                    self.charge()
                    visited.add(state)
                    queue.append(state)
        return out


def eval_pattern(
    graph: PropertyGraph, pattern: Pattern, cfg: EvalConfig
) -> set[tuple[Path, Assignment]]:
    """All (path, assignment) answers with path length <= cfg.max_len."""
    if cfg.max_len is None:
        raise ValueError("pattern evaluation needs an explicit max_len")
    infer_schema(pattern)
    validate_for_mode(pattern, cfg.collect_mode)
    return set(_Evaluator(graph, cfg, cfg.max_len).answers(pattern))


def power(
    graph: PropertyGraph, pattern: Pattern, i: int, cfg: EvalConfig
) -> set[tuple[Path, Assignment]]:
    """The i-th power of the pattern's answer set, length-bounded."""
    if i < 0:
        raise ValueError("power index must be non-negative")
    return eval_pattern(graph, Repeat(pattern, i, i), cfg)


# -- queries -------------------------------------------------------------


def _is_trail(p: Path) -> bool:
    edges = p.edges()
    return len(edges) == len(set(edges))


def _is_simple(p: Path) -> bool:
    nodes = p.nodes()
    return len(nodes) == len(set(nodes))


def _base_ok(base: Optional[Restrictor], p: Path) -> bool:
    if base is Restrictor.TRAIL:
        return _is_trail(p)
    if base is Restrictor.SIMPLE:
        return _is_simple(p)
    return True


def _walk_strata(
    graph: PropertyGraph, bound: int, limit: int
) -> Iterator[tuple[int, list[Path]]]:
    frontier = [Path((n,)) for n in graph.nodes]
    level = 0
    while frontier and level <= bound:
        yield level, frontier
        extended = set()
        for p in frontier:
            for edge, nxt in graph.steps_from(p.tgt):
                extended.add(Path(p.elements + (edge, nxt)))
                if len(extended) > limit:
                    raise ResourceLimitError(
                        f"walk frontier exceeded {limit} paths at length {level + 1}"
                    )
        frontier = sorted(extended, key=lambda q: q.elements)
        level += 1


def _iter_restricted_paths(
    graph: PropertyGraph, base: Restrictor, bound: int
) -> Iterator[Path]:
    """All trails (no repeated edge) or simple paths (no repeated node)."""
    track_nodes = base is Restrictor.SIMPLE
    for start in graph.nodes:
        stack = [(Path((start,)), frozenset((start,)) if track_nodes else frozenset())]
        while stack:
            p, used = stack.pop()
            yield p
            if p.length >= bound:
                continue
            for edge, nxt in graph.steps_from(p.tgt):
                if track_nodes:
                    if nxt in used:
                        continue
                    stack.append((Path(p.elements + (edge, nxt)), used | {nxt}))
                else:
                    if edge in used:
                        continue
                    stack.append((Path(p.elements + (edge, nxt)), used | {edge}))


def _eval_restricted(
    graph: PropertyGraph,
    restrictor: Restrictor,
    pattern: Pattern,
    cfg: EvalConfig,
) -> set[tuple[Path, Assignment]]:
    bound = (
        cfg.max_len
        if cfg.max_len is not None
        else default_length_bound(restrictor, graph, pattern, cfg.bound_ceiling)
    )
    base = restrictor.base
    # The subpath-relation check realizes grouping-mode repetition (its
    # relational powers pass through edgeless steps), so the fast path is
    # only taken in that mode.
    varfree = cfg.collect_mode == "grouping" and not expr_vars(pattern)

    if not restrictor.has_shortest:
        if varfree:
            out = set()
            for p in _iter_restricted_paths(graph, base, bound):
                if (0, p.length) in pairs_no_vars(graph, pattern, p):
                    out.add((p, EMPTY))
            return out
        answers = _Evaluator(graph, cfg, bound).answers(pattern)
        return {(p, mu) for p, mu in answers if _base_ok(base, p)}

    # shortest: stratify by length; a pair's first stratum is its minimum.
    sat = satisfiable_pairs(graph, pattern, cfg.collect_mode)
    best: dict[tuple[str, str], int] = {}
    kept: set[tuple[Path, Assignment]] = set()

    def strata() -> Iterator[tuple[int, Iterable[tuple[Path, Assignment]]]]:
        if varfree:
            if base is None:
                for level, walks in _walk_strata(graph, bound, cfg.max_answers):
                    yield level, (
                        (p, EMPTY)
                        for p in walks
                        if (0, p.length) in pairs_no_vars(graph, pattern, p)
                    )
            else:
                by_level: dict[int, list[Path]] = {}
                for p in _iter_restricted_paths(graph, base, bound):
                    by_level.setdefault(p.length, []).append(p)
                for level in sorted(by_level):
                    yield level, (
                        (p, EMPTY)
                        for p in by_level[level]
                        if (0, p.length) in pairs_no_vars(graph, pattern, p)
                    )
        else:
            for level in range(bound + 1):
                answers = _Evaluator(graph, cfg, level).answers(pattern)
                yield level, (
                    (p, mu)
                    for p, mu in answers
                    if p.length == level and _base_ok(base, p)
                )

    for level, stratum in strata():
        for p, mu in stratum:
            pair = (p.src, p.tgt)
            if best.setdefault(pair, level) == level:
                kept.add((p, mu))
        if sat <= best.keys():
            break
    return kept


def eval_query(
    graph: PropertyGraph, query: Query, cfg: Optional[EvalConfig] = None
) -> set[Answer]:
    """The answer set of a query: tuples of witness paths with bindings."""
    cfg = cfg or EvalConfig()
    infer_schema(query)
    validate_for_mode(query, cfg.collect_mode)
    answers = _eval_query(graph, query, cfg)
    if len(answers) > cfg.max_answers:
        raise ResourceLimitError(
            f"answer set exceeded the ceiling of {cfg.max_answers}"
        )
    return answers


def _eval_query(graph: PropertyGraph, query: Query, cfg: EvalConfig) -> set[Answer]:
    if isinstance(query, Restricted):
        pairs = _eval_restricted(graph, query.restrictor, query.pattern, cfg)
        return {Answer((p,), mu) for p, mu in pairs}
    if isinstance(query, Bound):
        pairs = _eval_restricted(graph, query.restrictor, query.pattern, cfg)
        return {
            Answer((p,), mu.with_binding(query.var, PathVal(p))) for p, mu in pairs
        }
    if isinstance(query, Join):
        left = _eval_query(graph, query.left, cfg)
        right = _eval_query(graph, query.right, cfg)
        out = set()
        for la, ra in itertools.product(left, right):
            merged = unify(la.bindings, ra.bindings)
            if merged is not None:
                out.add(Answer(la.paths + ra.paths, merged))
            if len(out) > cfg.max_answers:
                raise ResourceLimitError(
                    f"answer set exceeded the ceiling of {cfg.max_answers}"
                )
        return out
    raise TypeError(f"not a query: {query!r}")
