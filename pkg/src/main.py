import logging
import sys
from collections.abc import Sequence

from src.cli.commands import dispatch
from src.config import LOG_LEVEL

logger = logging.getLogger("tool_graph_retrieval.main")


def main(argv: Sequence[str] | None = None) -> int:
    # Logs go to stderr; stdout carries command output only
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )
    return dispatch(argv, sys.stdout)


def run() -> None:
    """Entry point for the `tool-graph-retrieval` script."""
    sys.exit(main())


if __name__ == "__main__":
    run()
