"""
Deterministic synthetic benchmark: a core/regular tool graph, queries aimed
at regular tools, and hash-embedding fixtures for every text involved.

Every tool owns six pseudo-words (two in the name, three in the description,
one parameter) that no other tool uses, so a query built from a tool's words
is similar to that tool and dissimilar to its dependencies.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.adapters.embedding_cache import cache_key, format_record
from src.adapters.graph_document import save_graph
from src.adapters.hash_embedder import HashEmbedder
from src.adapters.instances import dump_instances
from src.adapters.text import render_tool_document
from src.core.eval_port import EvalInstance, SyntheticGenerationError
from src.core.tool_graph import (
    RELATION_TYPES,
    DependencyEdge,
    ToolKind,
    ToolKnowledgeGraph,
    ToolNode,
    ToolParameter,
    reachable,
)

logger = logging.getLogger(__name__)

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"
_FILLERS = ("please", "quickly", "now", "today", "help")
_CORE_SHARE = 0.1
_WORDS_PER_TOOL = 6
_QUERY_SEED_WORDS = 3
_CONFUSED_SEED_WORDS = 2
_CONFUSER_WORDS = 4


@dataclass(frozen=True)
class SyntheticBenchmark:
    graph: ToolKnowledgeGraph
    instances: list[EvalInstance]
    # Cache records of hash vectors for every tool document and query
    fixture: str

    def graph_document(self) -> str:
        return save_graph(self.graph)

    def instances_document(self) -> str:
        return dump_instances(self.instances)


def generate_synthetic(
    seed: int,
    tool_count: int,
    avg_deps: float,
    instance_count: int,
    confusion: float = 0.0,
    embedder: HashEmbedder | None = None,
) -> SyntheticBenchmark:
    """
    Build a benchmark; the same arguments always give byte-identical output.

    Core tools have no dependencies. Regular tools depend only on core tools,
    so every golden set is a seed plus its direct dependencies. With
    probability `confusion` a query mixes in words of another regular tool,
    which then usually outranks the seed.
    """
    core_count = _core_count(tool_count, avg_deps, instance_count, confusion)
    edge_total = round(avg_deps * tool_count)
    rng = np.random.default_rng(seed)
    words = _WordSource(rng)

    vocab: dict[str, list[str]] = {}
    nodes: list[ToolNode] = []
    for index in range(tool_count):
        kind: ToolKind = "core" if index < core_count else "regular"
        tool_words = words.take(_WORDS_PER_TOOL)
        node = ToolNode(
            id=f"{tool_words[0]}_{tool_words[1]}",
            name=f"{tool_words[0]}_{tool_words[1]}",
            description=f"{tool_words[2].capitalize()} {tool_words[3]} {tool_words[4]}.",
            kind=kind,
            parameters=(ToolParameter(name=tool_words[5], description="input", required=True),),
        )
        vocab[node.id] = tool_words
        nodes.append(node)

    core_ids = [node.id for node in nodes[:core_count]]
    regular = nodes[core_count:]
    edges = _edges(rng, regular, core_ids, edge_total)
    graph = ToolKnowledgeGraph.from_parts(nodes, edges)

    regular_ids = [node.id for node in regular]
    instances = [
        _instance(rng, index, graph, vocab, regular_ids, confusion) for index in range(instance_count)
    ]
    fixture = _fixture(embedder or HashEmbedder(), graph, instances)
    logger.info(
        f"🌱 Generated synthetic benchmark: {tool_count} tools ({core_count} core), "
        f"{len(edges)} edges, {instance_count} instances"
    )
    return SyntheticBenchmark(graph=graph, instances=instances, fixture=fixture)


def _core_count(tool_count: int, avg_deps: float, instance_count: int, confusion: float) -> int:
    if tool_count < 2:
        raise SyntheticGenerationError(f"tool_count must be >= 2, got {tool_count}")
    if avg_deps < 0 or tool_count < avg_deps + 1:
        raise SyntheticGenerationError(
            f"need 0 <= avg_deps <= tool_count - 1, got avg_deps={avg_deps} for {tool_count} tools"
        )
    if instance_count < 0:
        raise SyntheticGenerationError(f"instance_count must be >= 0, got {instance_count}")
    if not 0.0 <= confusion <= 1.0:
        raise SyntheticGenerationError(f"confusion must be in [0, 1], got {confusion}")

    edge_total = round(avg_deps * tool_count)
    # Smallest core set that can absorb every edge without repeats
    for core_count in range(max(1, math.ceil(_CORE_SHARE * tool_count)), tool_count):
        if math.ceil(edge_total / (tool_count - core_count)) <= core_count:
            return core_count
    raise SyntheticGenerationError(
        f"cannot place {edge_total} dependencies on core tools among {tool_count} tools"
    )


def _edges(
    rng: np.random.Generator,
    regular: list[ToolNode],
    core_ids: list[str],
    edge_total: int,
) -> list[DependencyEdge]:
    base, extra = divmod(edge_total, len(regular))
    heavier = set(rng.permutation(len(regular))[:extra].tolist())
    edges: list[DependencyEdge] = []
    for index, node in enumerate(regular):
        degree = base + (1 if index in heavier else 0)
        targets = rng.choice(len(core_ids), size=degree, replace=False).tolist()
        for target in targets:
            relation = RELATION_TYPES[int(rng.integers(len(RELATION_TYPES)))]
            parameter_name = node.parameters[0].name if relation.startswith("param") else None
            edges.append(
                DependencyEdge(
                    source=node.id,
                    target=core_ids[target],
                    relation=relation,
                    reason="needed before this tool can run",
                    parameter_name=parameter_name,
                )
            )
    return edges


def _instance(
    rng: np.random.Generator,
    index: int,
    graph: ToolKnowledgeGraph,
    vocab: dict[str, list[str]],
    regular_ids: list[str],
    confusion: float,
) -> EvalInstance:
    seed_id = regular_ids[int(rng.integers(len(regular_ids)))]
    seed_words = vocab[seed_id]
    confused = len(regular_ids) > 1 and float(rng.random()) < confusion
    if confused:
        others = [tool_id for tool_id in regular_ids if tool_id != seed_id]
        confuser = vocab[others[int(rng.integers(len(others)))]]
        picked = _sample(rng, seed_words, _CONFUSED_SEED_WORDS) + _sample(rng, confuser, _CONFUSER_WORDS)
    else:
        picked = _sample(rng, seed_words, _QUERY_SEED_WORDS)
    query_words = [_FILLERS[int(rng.integers(len(_FILLERS)))], *picked]
    order = rng.permutation(len(query_words)).tolist()
    return EvalInstance(
        id=f"synth-{index:04d}",
        query=" ".join(query_words[i] for i in order),
        golden_tools=frozenset({seed_id}) | reachable(graph, seed_id),
        seed_tool=seed_id,
    )


def _sample(rng: np.random.Generator, words: list[str], count: int) -> list[str]:
    return [words[i] for i in rng.choice(len(words), size=count, replace=False).tolist()]


def _fixture(embedder: HashEmbedder, graph: ToolKnowledgeGraph, instances: list[EvalInstance]) -> str:
    texts = [render_tool_document(node).text for node in graph.nodes.values()]
    texts.extend(instance.query for instance in instances)
    records = [
        format_record(cache_key(embedder.name, embedder.model, text), embedder.embed(text))
        for text in dict.fromkeys(texts)
    ]
    return "".join(records)


class _WordSource:
    """Unique pronounceable pseudo-words drawn from a seeded generator."""

    def __init__(self, rng: np.random.Generator) -> None:
        self._rng = rng
        self._used: set[str] = set(_FILLERS) | {"parameters", "input"}

    def take(self, count: int) -> list[str]:
        return [self._next() for _ in range(count)]

    def _next(self) -> str:
        while True:
            syllables = [
                _CONSONANTS[int(self._rng.integers(len(_CONSONANTS)))] + _VOWELS[int(self._rng.integers(len(_VOWELS)))]
                for _ in range(3)
            ]
            word = "".join(syllables)
            if word not in self._used:
                self._used.add(word)
                return word
