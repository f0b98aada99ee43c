"""
Tool knowledge graph: typed nodes, typed dependency edges, validation,
depth-first dependency traversal and corpus statistics.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Literal

ToolKind = Literal["core", "regular"]
RelationType = Literal["tool_direct", "tool_indirect", "param_direct", "param_indirect"]

TOOL_KINDS: tuple[ToolKind, ...] = ("core", "regular")
RELATION_TYPES: tuple[RelationType, ...] = (
    "tool_direct",
    "tool_indirect",
    "param_direct",
    "param_indirect",
)
PARAMETER_RELATIONS: frozenset[str] = frozenset({"param_direct", "param_indirect"})


class ToolGraphError(Exception):
    """Base error for knowledge graph loading and lookup."""


class GraphParseError(ToolGraphError):
    """Raised when a KG document is malformed; carries line or field context."""

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None) -> None:
        context = []
        if line is not None:
            context.append(f"line {line}")
        if field is not None:
            context.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(context)})" if context else message)
        self.line = line
        self.field = field


class GraphValidationError(ToolGraphError):
    """Raised when a loaded graph breaks a structural invariant."""


class UnknownToolError(ToolGraphError, KeyError):
    """Raised when a tool id is not present in the graph."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown tool"


@dataclass(frozen=True)
class ToolParameter:
    name: str
    description: str = ""
    value_kind: str = "string"
    required: bool = False


@dataclass(frozen=True)
class ToolNode:
    id: str
    name: str
    description: str
    kind: ToolKind
    parameters: tuple[ToolParameter, ...] = ()

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return tuple(parameter.name for parameter in self.parameters)


@dataclass(frozen=True)
class DependencyEdge:
    source: str
    target: str
    relation: RelationType
    reason: str = ""
    parameter_name: str | None = None


@dataclass(frozen=True)
class GraphViolation:
    code: str
    message: str
    tool_id: str | None = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[GraphViolation, ...] = ()

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)


@dataclass(frozen=True)
class GraphStats:
    total_tools: int
    core_count: int
    regular_count: int
    avg_dependencies: float


@dataclass(frozen=True)
class ToolKnowledgeGraph:
    """
    Immutable tool graph.

    Nodes keep insertion order; out-edges per node keep declaration order,
    which is also the DFS child order.
    """

    nodes: Mapping[str, ToolNode]
    out_edges: Mapping[str, tuple[DependencyEdge, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        edges = {tool_id: tuple(self.out_edges.get(tool_id, ())) for tool_id in self.nodes}
        object.__setattr__(self, "nodes", MappingProxyType(dict(self.nodes)))
        object.__setattr__(self, "out_edges", MappingProxyType(edges))

    @classmethod
    def from_parts(
        cls,
        nodes: Iterable[ToolNode],
        edges: Iterable[DependencyEdge] = (),
    ) -> ToolKnowledgeGraph:
        """Build a graph, rejecting duplicate ids and dangling edge endpoints."""
        node_map: dict[str, ToolNode] = {}
        for node in nodes:
            if node.id in node_map:
                raise GraphValidationError(f"duplicate tool id {node.id}")
            node_map[node.id] = node

        out_edges: dict[str, list[DependencyEdge]] = {tool_id: [] for tool_id in node_map}
        for edge in edges:
            if edge.source not in node_map:
                raise GraphValidationError(
                    f"unknown source {edge.source} (edge {edge.source} -> {edge.target})"
                )
            if edge.target not in node_map:
                raise GraphValidationError(
                    f"unknown target {edge.target} (edge {edge.source} -> {edge.target})"
                )
            out_edges[edge.source].append(edge)
        return cls(nodes=node_map, out_edges={k: tuple(v) for k, v in out_edges.items()})

    def node(self, tool_id: str) -> ToolNode:
        try:
            return self.nodes[tool_id]
        except KeyError as exc:
            raise UnknownToolError(f"unknown tool id {tool_id}") from exc

    def edges_from(self, tool_id: str) -> tuple[DependencyEdge, ...]:
        if tool_id not in self.nodes:
            raise UnknownToolError(f"unknown tool id {tool_id}")
        return self.out_edges[tool_id]

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, tool_id: object) -> bool:
        return tool_id in self.nodes


def dependencies_dfs(graph: ToolKnowledgeGraph, root: str, d_limit: int) -> list[str]:
    """
    Pre-order depth-first enumeration of tools reachable from `root`.

    Children are visited in edge declaration order. The root is never returned,
    nothing is returned twice, and at most `d_limit` ids come back.
    """
    if d_limit < 0:
        raise ValueError(f"d_limit must be >= 0, got {d_limit}")
    graph.node(root)

    visited: set[str] = {root}
    order: list[str] = []
    # Stack holds children in reverse so the first-declared edge is popped first
    stack: list[str] = [edge.target for edge in reversed(graph.out_edges[root])]
    while stack and len(order) < d_limit:
        tool_id = stack.pop()
        if tool_id in visited:
            continue
        visited.add(tool_id)
        order.append(tool_id)
        stack.extend(edge.target for edge in reversed(graph.out_edges[tool_id]))
    return order


def reachable(graph: ToolKnowledgeGraph, root: str) -> frozenset[str]:
    """Full dependency closure of `root` (root excluded), breadth-first."""
    graph.node(root)
    seen: set[str] = {root}
    queue: deque[str] = deque([root])
    while queue:
        current = queue.popleft()
        for edge in graph.out_edges[current]:
            if edge.target not in seen:
                seen.add(edge.target)
                queue.append(edge.target)
    seen.discard(root)
    return frozenset(seen)


def graph_stats(graph: ToolKnowledgeGraph) -> GraphStats:
    total = len(graph.nodes)
    core = sum(1 for node in graph.nodes.values() if node.kind == "core")
    edge_count = sum(len(edges) for edges in graph.out_edges.values())
    return GraphStats(
        total_tools=total,
        core_count=core,
        regular_count=total - core,
        avg_dependencies=edge_count / total if total else 0.0,
    )


def validate_graph(graph: ToolKnowledgeGraph) -> ValidationReport:
    """Report every schema violation; an empty report means the graph is valid."""
    violations: list[GraphViolation] = []
    for key, node in graph.nodes.items():
        violations.extend(_node_violations(key, node))
    for source, edges in graph.out_edges.items():
        for edge in edges:
            violations.extend(_edge_violations(graph, source, edge))
    return ValidationReport(violations=tuple(violations))


def _node_violations(key: str, node: ToolNode) -> list[GraphViolation]:
    found: list[GraphViolation] = []
    if not node.id.strip():
        found.append(GraphViolation("empty_id", "tool id is empty", key))
    if node.id != key:
        found.append(
            GraphViolation("id_mismatch", f"tool {node.id} stored under key {key}", key)
        )
    if node.kind not in TOOL_KINDS:
        found.append(
            GraphViolation("invalid_kind", f"tool {key} has kind {node.kind!r}", key)
        )
    seen: set[str] = set()
    for parameter in node.parameters:
        if not parameter.name.strip():
            found.append(GraphViolation("empty_parameter", f"tool {key} has an unnamed parameter", key))
        elif parameter.name in seen:
            found.append(
                GraphViolation(
                    "duplicate_parameter",
                    f"tool {key} declares parameter {parameter.name} twice",
                    key,
                )
            )
        seen.add(parameter.name)
    return found


def _edge_violations(
    graph: ToolKnowledgeGraph, source: str, edge: DependencyEdge
) -> list[GraphViolation]:
    found: list[GraphViolation] = []
    label = f"edge {edge.source} -> {edge.target}"
    if edge.source != source:
        found.append(GraphViolation("misplaced_edge", f"{label} stored under {source}", source))
    if edge.source not in graph.nodes:
        found.append(GraphViolation("unknown_source", f"{label}: unknown source {edge.source}", source))
    if edge.target not in graph.nodes:
        found.append(GraphViolation("unknown_target", f"{label}: unknown target {edge.target}", source))
    if edge.relation not in RELATION_TYPES:
        found.append(
            GraphViolation("invalid_relation", f"{label}: relation {edge.relation!r}", source)
        )
        return found

    if edge.relation in PARAMETER_RELATIONS:
        if not edge.parameter_name:
            found.append(
                GraphViolation(
                    "missing_parameter_name", f"{label}: {edge.relation} needs parameter_name", source
                )
            )
        elif edge.source in graph.nodes and edge.parameter_name not in graph.nodes[edge.source].parameter_names:
            found.append(
                GraphViolation(
                    "unknown_parameter",
                    f"{label}: {edge.parameter_name} is not a parameter of {edge.source}",
                    source,
                )
            )
    elif edge.parameter_name is not None:
        found.append(
            GraphViolation(
                "unexpected_parameter_name",
                f"{label}: {edge.relation} must not carry parameter_name",
                source,
            )
        )
    return found
