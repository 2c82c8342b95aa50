"""Property-graph data model: graphs, paths, validation, concatenation.

A property graph has three disjoint id spaces (nodes, directed edges,
undirected edges), label sets on every element, and a partial map from
(element, key) to a constant. A path is an alternating node/edge sequence
starting and ending with a node; an edge may be traversed forward,
backward, or as an undirected step.

Graphs are immutable after validation and safe to share between
concurrent evaluations. Paths are immutable values compared structurally
by their id sequence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

Constant = Union[str, int, bool]


def const_eq(a: Constant, b: Constant) -> bool:
    """Strict same-kind equality; cross-kind comparison is always false.

    ``bool`` is checked before ``int`` so that ``True != 1``.
    """
    return type(a) is type(b) and a == b


class GraphValidationError(ValueError):
    """Raised when a raw graph description violates the data-model invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class Path:
    """Alternating node/edge/node/.../node sequence (possibly one node)."""

    elements: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.elements) % 2 == 0 or not self.elements:
            raise ValueError("path must alternate node,edge,...,node (odd length >= 1)")

    @property
    def src(self) -> str:
        return self.elements[0]

    @property
    def tgt(self) -> str:
        return self.elements[-1]

    @property
    def length(self) -> int:
        """Number of edge occurrences."""
        return len(self.elements) // 2

    def nodes(self) -> tuple[str, ...]:
        return self.elements[0::2]

    def edges(self) -> tuple[str, ...]:
        return self.elements[1::2]

    def subpath(self, i: int, j: int) -> "Path":
        """Subpath from node position i to node position j (0-based, i <= j)."""
        if not 0 <= i <= j <= self.length:
            raise IndexError(f"subpath positions ({i}, {j}) out of range")
        return Path(self.elements[2 * i : 2 * j + 1])

    def concat(self, other: "Path") -> Optional["Path"]:
        """Concatenation, defined iff tgt(self) = src(other); else None."""
        if self.tgt != other.src:
            return None
        return Path(self.elements + other.elements[1:])

    def __repr__(self) -> str:
        return "path(%s)" % ",".join(self.elements)


def path(*elements: str) -> Path:
    return Path(tuple(elements))


@dataclass(frozen=True, eq=False)
class PropertyGraph:
    """The validated graph tuple; treat all fields as read-only."""

    nodes: frozenset[str]
    directed_edges: Mapping[str, tuple[str, str]]  # id -> (src, tgt)
    undirected_edges: Mapping[str, frozenset[str]]  # id -> endpoints, |.| in {1, 2}
    labels: Mapping[str, frozenset[str]]
    properties: Mapping[tuple[str, str], Constant]

    def label_set(self, element_id: str) -> frozenset[str]:
        return self.labels.get(element_id, frozenset())

    def prop(self, element_id: str, key: str) -> Optional[Constant]:
        return self.properties.get((element_id, key))

    def src(self, edge_id: str) -> str:
        return self.directed_edges[edge_id][0]

    def tgt(self, edge_id: str) -> str:
        return self.directed_edges[edge_id][1]

    def endpoints(self, edge_id: str) -> frozenset[str]:
        return self.undirected_edges[edge_id]

    @property
    def edge_count(self) -> int:
        return len(self.directed_edges) + len(self.undirected_edges)

    def element_ids(self) -> Iterator[str]:
        yield from self.nodes
        yield from self.directed_edges
        yield from self.undirected_edges

    def steps_from(self, node: str) -> Iterator[tuple[str, str]]:
        """All single-step traversals (edge_id, next_node) leaving `node`.

        A directed self-loop satisfies both the forward and the backward
        traversal clause but is still one step, so it is yielded once.
        """
        for e, (s, t) in self.directed_edges.items():
            if s == node:
                yield e, t
            if t == node and s != t:
                yield e, s
        for e, ends in self.undirected_edges.items():
            if node in ends:
                others = ends - {node}
                yield e, next(iter(others)) if others else node


def _check_property_map(
    raw: object, owner: str, violations: list[str]
) -> dict[str, Constant]:
    out: dict[str, Constant] = {}
    if raw is None:
        return out
    if not isinstance(raw, dict):
        violations.append(f"{owner}: properties must be an object")
        return out
    for key, value in raw.items():
        if not isinstance(key, str) or not key:
            violations.append(f"{owner}: property keys must be non-empty strings")
        elif isinstance(value, bool) or isinstance(value, (str, int)):
            out[key] = value
        else:
            violations.append(
                f"{owner}: property {key!r} must be a string, integer, or boolean"
            )
    return out


def _check_labels(raw: object, owner: str, violations: list[str]) -> frozenset[str]:
    if raw is None:
        return frozenset()
    if not isinstance(raw, list) or not all(isinstance(x, str) and x for x in raw):
        violations.append(f"{owner}: labels must be a list of non-empty strings")
        return frozenset()
    return frozenset(raw)


def validate_graph(data: dict) -> PropertyGraph:
    """Build a PropertyGraph from a raw JSON-style description.

    Raises GraphValidationError carrying every violation found: duplicate
    ids across the three id spaces, dangling src/tgt/endpoint references,
    and undirected edges whose endpoint set is not of size 1 or 2.
    """
    violations: list[str] = []
    nodes: set[str] = set()
    directed: dict[str, tuple[str, str]] = {}
    undirected: dict[str, frozenset[str]] = {}
    labels: dict[str, frozenset[str]] = {}
    properties: dict[tuple[str, str], Constant] = {}
    seen_ids: set[str] = set()

    def fresh_id(raw: object, kind: str) -> Optional[str]:
        if not isinstance(raw, str) or not raw:
            violations.append(f"{kind} id must be a non-empty string: {raw!r}")
            return None
        if raw in seen_ids:
            violations.append(f"duplicate id {raw!r}")
            return None
        seen_ids.add(raw)
        return raw

    def element_common(entry: dict, eid: str) -> None:
        labels[eid] = _check_labels(entry.get("labels"), eid, violations)
        for key, value in _check_property_map(
            entry.get("properties"), eid, violations
        ).items():
            properties[(eid, key)] = value

    for entry in data.get("nodes", []):
        eid = fresh_id(entry.get("id"), "node")
        if eid is None:
            continue
        nodes.add(eid)
        element_common(entry, eid)

    for entry in data.get("directed_edges", []):
        eid = fresh_id(entry.get("id"), "directed edge")
        if eid is None:
            continue
        src, tgt = entry.get("src"), entry.get("tgt")
        ok = True
        for name, ref in (("src", src), ("tgt", tgt)):
            if ref not in nodes:
                violations.append(f"dangling endpoint: {eid!r}.{name} = {ref!r}")
                ok = False
        if ok:
            directed[eid] = (src, tgt)
        element_common(entry, eid)

    for entry in data.get("undirected_edges", []):
        eid = fresh_id(entry.get("id"), "undirected edge")
        if eid is None:
            continue
        raw_ends = entry.get("endpoints", [])
        ends = frozenset(raw_ends) if isinstance(raw_ends, list) else frozenset()
        if len(ends) not in (1, 2):
            violations.append(f"undirected edge {eid!r} needs 1 or 2 endpoints")
        else:
            dangling = [n for n in ends if n not in nodes]
            if dangling:
                violations.append(
                    f"dangling endpoint: {eid!r}.endpoints includes {dangling[0]!r}"
                )
            else:
                undirected[eid] = ends
        element_common(entry, eid)

    if violations:
        raise GraphValidationError(violations)
    return PropertyGraph(
        nodes=frozenset(nodes),
        directed_edges=directed,
        undirected_edges=undirected,
        labels=labels,
        properties=properties,
    )


def load_graph(file_path: str) -> PropertyGraph:
    with open(file_path, "r", encoding="utf-8") as handle:
        return validate_graph(json.load(handle))


def path_is_valid(graph: PropertyGraph, p: Path) -> bool:
    """True iff every step traverses an edge forward, backward, or undirected."""
    elems = p.elements
    if elems[0] not in graph.nodes:
        return False
    for i in range(1, len(elems), 2):
        before, edge, after = elems[i - 1], elems[i], elems[i + 1]
        if after not in graph.nodes:
            return False
        if edge in graph.directed_edges:
            src, tgt = graph.directed_edges[edge]
            if (src, tgt) == (before, after) or (src, tgt) == (after, before):
                continue
            return False
        if edge in graph.undirected_edges:
            if graph.undirected_edges[edge] == frozenset((before, after)):
                continue
        return False
    return True


def path_concat(p: Path, q: Path) -> Optional[Path]:
    return p.concat(q)


def path_src(p: Path) -> str:
    return p.src


def path_tgt(p: Path) -> str:
    return p.tgt


def path_len(p: Path) -> int:
    return p.length
