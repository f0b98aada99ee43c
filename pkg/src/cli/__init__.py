"""Command-line surface: graph checks, indexing, retrieval and evaluation."""
