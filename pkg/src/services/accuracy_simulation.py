"""
Monte Carlo check of the expected-accuracy model against the real pipeline.

Each trial draws one of three query kinds on a fixed graph:

- with probability `vector_accuracy` the golden tool is a standalone tool
  the query names exactly, so the first pass finds it;
- with probability `dependency_gain` the golden tool is one of the N
  dependencies of the seed the query names, picked uniformly, so it
  survives iff it falls in the first K dependency slots;
- otherwise the golden tool is unreachable from anything the query hits.

The graph is queried with top_k = k, d_limit = N and final_top_k = K + 1,
so the seed takes one slot and K are left for its dependencies. The seed has
k edge-less twins sharing its description; they fill the remaining first-pass
slots, so an unreachable golden tool never enters as a seed of its own.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from src.adapters.hash_embedder import HashEmbedder
from src.adapters.text import render_tool_document
from src.core.accuracy_model import AccuracyEstimate, AccuracyModel, expected_accuracy
from src.core.retrieval_port import RetrievalConfig
from src.core.tool_graph import DependencyEdge, ToolKnowledgeGraph, ToolNode
from src.services.retrieval import RetrievalCorpus, build_corpus, retrieve

logger = logging.getLogger(__name__)

_TARGET = "standalone_target"
_SEED = "dependent_seed"
_ORPHAN = "orphan_tool"
_TWIN = "seed_twin"
_SEED_DESCRIPTION = "Plans velvet harbour logistics."


@dataclass(frozen=True)
class SimulationResult:
    trials: int
    successes: int
    expected: AccuracyEstimate

    @property
    def accuracy(self) -> float:
        return self.successes / self.trials

    @property
    def error(self) -> float:
        return self.accuracy - self.expected.value


def build_simulation_graph(dependency_count: int, twin_count: int = 0) -> ToolKnowledgeGraph:
    if dependency_count < 1:
        raise ValueError(f"dependency_count must be >= 1, got {dependency_count}")
    if twin_count < 0:
        raise ValueError(f"twin_count must be >= 0, got {twin_count}")
    dependencies = [
        ToolNode(
            id=f"dependency_{index}",
            name=f"dependency_{index}",
            description=f"Utility step dep{index}x needed by the seed.",
            kind="core",
        )
        for index in range(dependency_count)
    ]
    nodes = [
        ToolNode(id=_TARGET, name=_TARGET, description="Answers questions about tangerine orbits.", kind="regular"),
        ToolNode(id=_SEED, name=_SEED, description=_SEED_DESCRIPTION, kind="regular"),
        ToolNode(id=_ORPHAN, name=_ORPHAN, description="Sorts marble quartz inventories.", kind="regular"),
        *dependencies,
        *(
            ToolNode(id=f"{_TWIN}_{index}", name=f"{_TWIN}_{index}", description=_SEED_DESCRIPTION, kind="regular")
            for index in range(twin_count)
        ),
    ]
    edges = [
        DependencyEdge(source=_SEED, target=node.id, relation="tool_direct", reason="required step")
        for node in dependencies
    ]
    return ToolKnowledgeGraph.from_parts(nodes, edges)


def simulate_accuracy(model: AccuracyModel, trials: int = 10_000, seed: int = 0) -> SimulationResult:
    """Empirical accuracy of the full pipeline on a graph built to match `model`."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if model.vector_accuracy + model.dependency_gain > 1.0 + 1e-12:
        raise ValueError("vector_accuracy + dependency_gain must not exceed 1 for the simulation")
    expected = expected_accuracy(model)

    graph = build_simulation_graph(model.N, twin_count=max(1, model.k))
    corpus = build_corpus(graph, HashEmbedder())
    cfg = RetrievalConfig(
        mode="graph_fusion",
        first_pass="vector",
        top_k=max(1, model.k),
        final_top_k=model.K + 1,
        d_limit=model.N,
    )
    rng = np.random.default_rng(seed)
    draws = rng.random(trials)
    picks = rng.integers(0, model.N, size=trials)

    successes = 0
    for draw, pick in zip(draws.tolist(), picks.tolist(), strict=True):
        query, golden = _trial(corpus, model, draw, pick)
        ranked = retrieve(query, cfg, corpus, golden=golden)
        if golden <= set(ranked.tool_ids):
            successes += 1

    result = SimulationResult(trials=trials, successes=successes, expected=expected)
    logger.info(
        f"✅ Simulated {trials} trials: accuracy {result.accuracy:.4f} vs expected {expected.value:.4f}"
    )
    return result


def _trial(
    corpus: RetrievalCorpus, model: AccuracyModel, draw: float, pick: int
) -> tuple[str, frozenset[str]]:
    graph = corpus.graph
    if draw < model.vector_accuracy:
        return render_tool_document(graph.node(_TARGET)).text, frozenset({_TARGET})
    seed_query = render_tool_document(graph.node(_SEED)).text
    if draw < model.vector_accuracy + model.dependency_gain:
        return seed_query, frozenset({f"dependency_{pick}"})
    return seed_query, frozenset({_ORPHAN})
