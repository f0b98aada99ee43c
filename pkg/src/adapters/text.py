import re

from src.core.embedding_port import ToolDocument
from src.core.tool_graph import ToolNode

# Letters and digits only; "_" counts as a separator
_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """
    Split text into lowercase alphanumeric tokens.

    "Get_Stock Price!" -> ["get", "stock", "price"]. No stemming, no stopwords.
    """
    if not text:
        return []
    return _TOKEN.findall(text.lower())


def render_tool_document(tool: ToolNode) -> ToolDocument:
    """Canonical embedding text: name, description, then the parameter names."""
    parameters = ", ".join(tool.parameter_names)
    return ToolDocument(
        tool_id=tool.id,
        text=f"{tool.name}\n{tool.description}\nParameters: {parameters}",
    )
