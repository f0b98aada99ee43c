"""
Unit tests for the tool knowledge graph: construction, validation, DFS
expansion and statistics.
"""

import random
from collections import Counter, deque
from collections.abc import Callable

import pytest

from src.core.tool_graph import (
    DependencyEdge,
    GraphValidationError,
    ToolKnowledgeGraph,
    ToolNode,
    ToolParameter,
    UnknownToolError,
    dependencies_dfs,
    graph_stats,
    reachable,
    validate_graph,
)


def _tool(tool_id: str, kind: str = "regular", parameters: tuple[str, ...] = ()) -> ToolNode:
    return ToolNode(
        id=tool_id,
        name=tool_id,
        description=f"{tool_id} tool",
        kind=kind,  # type: ignore[arg-type]
        parameters=tuple(ToolParameter(name=p) for p in parameters),
    )


def _edge(source: str, target: str, relation: str = "tool_direct", parameter_name: str | None = None) -> DependencyEdge:
    return DependencyEdge(
        source=source,
        target=target,
        relation=relation,  # type: ignore[arg-type]
        parameter_name=parameter_name,
    )


def _graph(adjacency: dict[str, list[str]]) -> ToolKnowledgeGraph:
    ids = set(adjacency) | {t for targets in adjacency.values() for t in targets}
    nodes = [_tool(tool_id) for tool_id in sorted(ids)]
    edges = [_edge(source, target) for source, targets in adjacency.items() for target in targets]
    return ToolKnowledgeGraph.from_parts(nodes, edges)


def _bfs_reachable(adjacency: dict[str, list[str]], root: str) -> set[str]:
    seen = {root}
    queue = deque([root])
    while queue:
        for target in adjacency.get(queue.popleft(), []):
            if target not in seen:
                seen.add(target)
                queue.append(target)
    return seen - {root}


def _random_valid_parts(rng: random.Random) -> tuple[dict[str, ToolNode], dict[str, list[DependencyEdge]]]:
    ids = [f"t{i}" for i in range(rng.randint(2, 10))]
    nodes = {
        tool_id: _tool(tool_id, rng.choice(["core", "regular"]), tuple(f"p{j}" for j in range(rng.randint(0, 3))))
        for tool_id in ids
    }
    out_edges: dict[str, list[DependencyEdge]] = {tool_id: [] for tool_id in ids}
    for source in ids:
        params = nodes[source].parameter_names
        for target in rng.sample(ids, rng.randint(0, min(3, len(ids)))):
            if params and rng.random() < 0.5:
                relation = rng.choice(["param_direct", "param_indirect"])
                out_edges[source].append(_edge(source, target, relation, rng.choice(params)))
            else:
                out_edges[source].append(_edge(source, target, rng.choice(["tool_direct", "tool_indirect"])))
    return nodes, out_edges


def _frozen(out_edges: dict[str, list[DependencyEdge]]) -> dict[str, tuple[DependencyEdge, ...]]:
    return {source: tuple(edges) for source, edges in out_edges.items()}


# code -> (storage key, faulty tool)
NODE_FAULTS: dict[str, Callable[[int], tuple[str, ToolNode]]] = {
    "id_mismatch": lambda n: (f"alias{n}", _tool(f"real{n}")),
    "empty_id": lambda n: (" " * (n + 1), _tool(" " * (n + 1))),
    "invalid_kind": lambda n: (f"odd{n}", _tool(f"odd{n}", "helper")),
    "duplicate_parameter": lambda n: (f"twice{n}", _tool(f"twice{n}", parameters=("x", "x"))),
    "empty_parameter": lambda n: (f"blank{n}", _tool(f"blank{n}", parameters=(" ",))),
}

# codes -> faulty edge built from (storage key, another tool, any tool, fault index)
EDGE_FAULTS: dict[tuple[str, ...], Callable[[str, str, str, int], DependencyEdge]] = {
    ("misplaced_edge",): lambda source, stranger, other, n: _edge(stranger, other),
    ("misplaced_edge", "unknown_source"): lambda source, stranger, other, n: _edge(f"ghost{n}", other),
    ("unknown_target",): lambda source, stranger, other, n: _edge(source, f"ghost{n}"),
    ("invalid_relation",): lambda source, stranger, other, n: _edge(source, other, "uses", "x"),
    ("missing_parameter_name",): lambda source, stranger, other, n: _edge(source, other, "param_direct"),
    ("unknown_parameter",): lambda source, stranger, other, n: _edge(source, other, "param_indirect", "nope"),
}


class TestConstruction:
    def test_should_build_two_node_graph_with_one_edge(self) -> None:
        graph = ToolKnowledgeGraph.from_parts([_tool("A", "core"), _tool("B")], [_edge("B", "A")])

        assert len(graph) == 2
        assert graph.edges_from("B")[0].target == "A"
        assert graph.edges_from("A") == ()

    def test_should_reject_duplicate_tool_id(self) -> None:
        with pytest.raises(GraphValidationError, match="duplicate tool id A"):
            ToolKnowledgeGraph.from_parts([_tool("A"), _tool("A")])

    def test_should_name_source_and_target_for_dangling_edge(self) -> None:
        with pytest.raises(GraphValidationError, match="unknown target X") as exc_info:
            ToolKnowledgeGraph.from_parts([_tool("A")], [_edge("A", "X")])

        assert "A -> X" in str(exc_info.value)

    def test_should_keep_edge_declaration_order(self) -> None:
        graph = _graph({"A": ["C", "B", "D"]})

        assert [edge.target for edge in graph.edges_from("A")] == ["C", "B", "D"]

    def test_should_raise_lookup_error_for_unknown_tool(self) -> None:
        graph = _graph({"A": []})

        with pytest.raises(UnknownToolError):
            graph.node("missing")
        with pytest.raises(KeyError):
            graph.edges_from("missing")


class TestValidation:
    def test_should_report_nothing_for_valid_graph(self) -> None:
        graph = ToolKnowledgeGraph.from_parts([_tool("A", "core"), _tool("B")], [_edge("B", "A")])

        report = validate_graph(graph)

        assert report.is_valid
        assert len(report) == 0

    def test_should_flag_param_edge_without_parameter_name(self) -> None:
        graph = ToolKnowledgeGraph.from_parts(
            [_tool("A", "core"), _tool("B", parameters=("ticker",))],
            [_edge("B", "A", relation="param_direct")],
        )

        report = validate_graph(graph)

        assert [v.code for v in report.violations] == ["missing_parameter_name"]

    def test_should_flag_parameter_name_not_declared_on_source(self) -> None:
        graph = ToolKnowledgeGraph.from_parts(
            [_tool("A", "core"), _tool("B", parameters=("ticker",))],
            [_edge("B", "A", relation="param_indirect", parameter_name="symbol")],
        )

        report = validate_graph(graph)

        assert [v.code for v in report.violations] == ["unknown_parameter"]
        assert report.violations[0].tool_id == "B"

    def test_should_flag_parameter_name_on_tool_relation(self) -> None:
        graph = ToolKnowledgeGraph.from_parts(
            [_tool("A", "core"), _tool("B", parameters=("ticker",))],
            [_edge("B", "A", relation="tool_direct", parameter_name="ticker")],
        )

        assert [v.code for v in validate_graph(graph).violations] == ["unexpected_parameter_name"]

    def test_should_flag_duplicate_parameter_and_bad_kind(self) -> None:
        broken = ToolNode(
            id="A",
            name="A",
            description="",
            kind="helper",  # type: ignore[arg-type]
            parameters=(ToolParameter(name="x"), ToolParameter(name="x")),
        )
        graph = ToolKnowledgeGraph.from_parts([broken])

        codes = {v.code for v in validate_graph(graph).violations}

        assert codes == {"invalid_kind", "duplicate_parameter"}

    def test_should_accept_valid_param_edge(self) -> None:
        graph = ToolKnowledgeGraph.from_parts(
            [_tool("A", "core"), _tool("B", parameters=("ticker",))],
            [_edge("B", "A", relation="param_direct", parameter_name="ticker")],
        )

        assert validate_graph(graph).is_valid

    def test_should_report_exactly_the_injected_faults_on_random_graphs(self) -> None:
        rng = random.Random(13)
        for _ in range(200):
            nodes, out_edges = _random_valid_parts(rng)
            ids = list(nodes)
            assert validate_graph(ToolKnowledgeGraph(nodes=nodes, out_edges=_frozen(out_edges))).is_valid

            expected: Counter[tuple[str, str | None]] = Counter()
            for n in range(rng.randint(1, 8)):
                if rng.random() < 0.4:
                    code, make_node = rng.choice(list(NODE_FAULTS.items()))
                    key, node = make_node(n)
                    nodes[key] = node
                    expected[(code, key)] += 1
                    continue
                codes, make_edge = rng.choice(list(EDGE_FAULTS.items()))
                source, stranger = rng.sample(ids, 2)
                out_edges[source].append(make_edge(source, stranger, rng.choice(ids), n))
                expected.update((code, source) for code in codes)

            report = validate_graph(ToolKnowledgeGraph(nodes=nodes, out_edges=_frozen(out_edges)))

            assert Counter((v.code, v.tool_id) for v in report.violations) == expected


class TestDependenciesDfs:
    def test_should_enumerate_in_pre_order(self) -> None:
        graph = _graph({"A": ["B", "C"], "B": ["D"]})

        assert dependencies_dfs(graph, "A", 10) == ["B", "D", "C"]

    def test_should_truncate_at_d_limit(self) -> None:
        graph = _graph({"A": ["B", "C"], "B": ["D"]})

        assert dependencies_dfs(graph, "A", 2) == ["B", "D"]
        assert dependencies_dfs(graph, "A", 0) == []

    def test_should_break_cycles(self) -> None:
        graph = _graph({"A": ["B"], "B": ["A"]})

        assert dependencies_dfs(graph, "A", 10) == ["B"]

    def test_should_not_revisit_diamond_node(self) -> None:
        graph = _graph({"A": ["B", "C"], "B": ["D"], "C": ["D", "E"]})

        assert dependencies_dfs(graph, "A", 10) == ["B", "D", "C", "E"]

    def test_should_raise_for_unknown_root(self) -> None:
        with pytest.raises(UnknownToolError):
            dependencies_dfs(_graph({"A": []}), "Z", 3)

    def test_should_reject_negative_limit(self) -> None:
        with pytest.raises(ValueError):
            dependencies_dfs(_graph({"A": []}), "A", -1)

    @pytest.mark.parametrize(
        ("adjacency", "expected"),
        [
            ({"A": ["B"], "B": ["C"], "C": ["D"]}, ["B", "C", "D"]),
            ({"A": ["D", "C", "B"]}, ["D", "C", "B"]),
            ({"A": ["B", "C"], "B": ["C"], "C": ["B"]}, ["B", "C"]),
            ({"A": ["A", "B"]}, ["B"]),
            ({"A": ["B", "E"], "B": ["C", "D"], "E": ["F"]}, ["B", "C", "D", "E", "F"]),
            ({"A": ["C", "B"], "C": ["B"], "B": ["D"]}, ["C", "B", "D"]),
        ],
    )
    def test_should_follow_declaration_order_on_hand_built_graphs(
        self, adjacency: dict[str, list[str]], expected: list[str]
    ) -> None:
        assert dependencies_dfs(_graph(adjacency), "A", 100) == expected

    def test_should_match_bfs_reachability_on_random_graphs(self) -> None:
        rng = random.Random(7)
        for _ in range(500):
            size = rng.randint(1, 15)
            ids = [f"t{i}" for i in range(size)]
            adjacency = {
                tool_id: rng.sample(ids, rng.randint(0, min(4, size))) for tool_id in ids
            }
            graph = _graph(adjacency)
            root = rng.choice(ids)

            unbounded = dependencies_dfs(graph, root, len(ids))
            limit = rng.randint(0, 5)
            bounded = dependencies_dfs(graph, root, limit)

            assert set(unbounded) == _bfs_reachable(adjacency, root)
            assert set(unbounded) == reachable(graph, root)
            assert root not in unbounded
            assert len(unbounded) == len(set(unbounded))
            assert bounded == unbounded[:limit]


class TestGraphStats:
    def test_should_average_out_degree(self) -> None:
        graph = ToolKnowledgeGraph.from_parts([_tool("A", "core"), _tool("B")], [_edge("B", "A")])

        stats = graph_stats(graph)

        assert (stats.total_tools, stats.core_count, stats.regular_count) == (2, 1, 1)
        assert stats.avg_dependencies == pytest.approx(0.5)

    def test_should_return_zeros_for_empty_graph(self) -> None:
        stats = graph_stats(ToolKnowledgeGraph.from_parts([]))

        assert (stats.total_tools, stats.core_count, stats.regular_count) == (0, 0, 0)
        assert stats.avg_dependencies == 0.0
