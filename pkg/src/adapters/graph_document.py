"""JSON codec for tool knowledge graph documents, plus the ToolLinkOS import adapter."""

from __future__ import annotations

import json
import re
from collections.abc import Mapping
from typing import IO, cast

from src.core.tool_graph import (
    PARAMETER_RELATIONS,
    DependencyEdge,
    GraphParseError,
    GraphValidationError,
    RelationType,
    ToolKind,
    ToolKnowledgeGraph,
    ToolNode,
    ToolParameter,
)

JsonObject = Mapping[str, object]
GraphDocument = str | bytes | IO[str] | IO[bytes]

# Canonical wire labels <-> internal relation enum
_RELATION_LABELS: dict[str, RelationType] = {
    "tool_directly_depends_on": "tool_direct",
    "tool_indirectly_depends_on": "tool_indirect",
    "parameter_directly_depends_on": "param_direct",
    "parameter_indirectly_depends_on": "param_indirect",
}
_RELATION_WIRE: dict[RelationType, str] = {v: k for k, v in _RELATION_LABELS.items()}


def load_graph(document: GraphDocument) -> ToolKnowledgeGraph:
    """
    Parse a canonical KG document into a graph.

    Tool ids are the tool names unless an explicit `id` is given. Edge order
    follows declaration order in the document.
    """
    payload = _decode_document(document)
    tools = _required_list(payload, "tools", "tools")
    nodes: list[ToolNode] = []
    edges: list[DependencyEdge] = []
    for index, item in enumerate(tools):
        path = f"tools[{index}]"
        tool = _as_object(item, path)
        node = _parse_tool(tool, path)
        nodes.append(node)
        for dep_index, dep in enumerate(_optional_list(tool, "dependencies", path)):
            dep_path = f"{path}.dependencies[{dep_index}]"
            edges.append(_parse_dependency(_as_object(dep, dep_path), node.id, dep_path))
    return ToolKnowledgeGraph.from_parts(nodes, edges)


def save_graph(graph: ToolKnowledgeGraph) -> str:
    """Serialize a graph to the canonical document; `load_graph` inverts it exactly."""
    tools: list[dict[str, object]] = []
    for node in graph.nodes.values():
        entry: dict[str, object] = {"name": node.name}
        if node.id != node.name:
            entry["id"] = node.id
        entry["description"] = node.description
        entry["type"] = node.kind
        entry["parameters"] = [
            {
                "name": parameter.name,
                "description": parameter.description,
                "type": parameter.value_kind,
                "required": parameter.required,
            }
            for parameter in node.parameters
        ]
        entry["dependencies"] = [_dependency_to_json(edge) for edge in graph.out_edges[node.id]]
        tools.append(entry)
    return json.dumps({"tools": tools}, indent=2, ensure_ascii=False) + "\n"


def import_toollinkos(document: GraphDocument) -> ToolKnowledgeGraph:
    """
    Map public ToolLinkOS-style field names onto the canonical schema.

    Accepts a list of tools, {"tools": [...]}, or a name -> tool mapping.
    Parameters may be a list or a JSON-schema object; relation labels are
    matched case- and spacing-insensitively.
    """
    decoded = _decode_any(document)
    canonical = {"tools": [_toollinkos_tool(item, i) for i, item in enumerate(_toollinkos_entries(decoded))]}
    return load_graph(json.dumps(canonical))


def normalize_relation_label(label: str) -> RelationType | None:
    """Resolve any spelling of the four relation labels to the internal enum."""
    normalized = re.sub(r"[^a-z]+", "_", label.strip().lower()).strip("_")
    if normalized in _RELATION_LABELS:
        return _RELATION_LABELS[normalized]
    if normalized in _RELATION_WIRE:
        return cast(RelationType, normalized)
    return None


def _decode_any(document: GraphDocument) -> object:
    try:
        raw = document.read() if hasattr(document, "read") else document
    except UnicodeDecodeError as exc:
        raise GraphParseError(f"document is not valid UTF-8: {exc.reason}") from exc
    text = _decode_utf8(raw) if isinstance(raw, bytes) else cast(str, raw)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc


def _decode_utf8(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw.count(b"\n", 0, exc.start) + 1
        raise GraphParseError(f"invalid UTF-8 byte at offset {exc.start}", line=line) from exc


def _decode_document(document: GraphDocument) -> JsonObject:
    decoded = _decode_any(document)
    return _as_object(decoded, "$")


def _parse_tool(tool: JsonObject, path: str) -> ToolNode:
    name = _required_str(tool, "name", path)
    tool_id = _optional_str(tool, "id", path) or name
    kind = _required_str(tool, "type", path)
    if kind not in ("core", "regular"):
        raise GraphParseError("tool type must be 'core' or 'regular'", field=f"{path}.type")
    parameters = tuple(
        _parse_parameter(_as_object(item, f"{path}.parameters[{i}]"), f"{path}.parameters[{i}]")
        for i, item in enumerate(_optional_list(tool, "parameters", path))
    )
    if not tool_id.strip():
        raise GraphValidationError(f"empty tool id at {path}")
    return ToolNode(
        id=tool_id,
        name=name,
        description=_optional_str(tool, "description", path) or "",
        kind=cast(ToolKind, kind),
        parameters=parameters,
    )


def _parse_parameter(item: JsonObject, path: str) -> ToolParameter:
    required = item.get("required", False)
    if not isinstance(required, bool):
        raise GraphParseError("parameter 'required' must be a boolean", field=f"{path}.required")
    return ToolParameter(
        name=_required_str(item, "name", path),
        description=_optional_str(item, "description", path) or "",
        value_kind=_optional_str(item, "type", path) or "string",
        required=required,
    )


def _parse_dependency(item: JsonObject, source: str, path: str) -> DependencyEdge:
    label = _required_str(item, "relation", path)
    relation = _RELATION_LABELS.get(label)
    if relation is None:
        raise GraphParseError(
            f"unknown relation {label!r}; expected one of: {', '.join(_RELATION_LABELS)}",
            field=f"{path}.relation",
        )
    return DependencyEdge(
        source=source,
        target=_required_str(item, "target", path),
        relation=relation,
        reason=_optional_str(item, "reason", path) or "",
        parameter_name=_optional_str(item, "parameter_name", path),
    )


def _dependency_to_json(edge: DependencyEdge) -> dict[str, object]:
    entry: dict[str, object] = {
        "target": edge.target,
        "relation": _RELATION_WIRE[edge.relation],
        "reason": edge.reason,
    }
    if edge.parameter_name is not None:
        entry["parameter_name"] = edge.parameter_name
    return entry


def _toollinkos_entries(decoded: object) -> list[object]:
    if isinstance(decoded, list):
        return decoded
    if isinstance(decoded, Mapping):
        tools = decoded.get("tools")
        if isinstance(tools, list):
            return tools
        # name -> tool mapping
        entries: list[object] = []
        for name, item in decoded.items():
            if isinstance(item, Mapping):
                entries.append({"name": name, **item})
        return entries
    raise GraphParseError("ToolLinkOS document must be a list or an object", field="$")


def _first_present(item: JsonObject, keys: tuple[str, ...]) -> object | None:
    for key in keys:
        if key in item and item[key] is not None:
            return item[key]
    return None


def _toollinkos_tool(item: object, index: int) -> dict[str, object]:
    path = f"tools[{index}]"
    tool = _as_object(item, path)
    name = _first_present(tool, ("name", "tool_name", "function_name"))
    if not isinstance(name, str):
        raise GraphParseError("tool is missing a name", field=f"{path}.name")
    kind_raw = _first_present(tool, ("type", "tool_type", "node_type", "kind"))
    kind = str(kind_raw).strip().lower() if kind_raw is not None else "regular"
    kind = "core" if kind.startswith("core") else "regular"
    description = _first_present(tool, ("description", "tool_description", "docstring"))
    deps_raw = _first_present(tool, ("dependencies", "relationships", "edges"))
    return {
        "name": name,
        "description": description if isinstance(description, str) else "",
        "type": kind,
        "parameters": _toollinkos_parameters(_first_present(tool, ("parameters", "params", "arguments")), path),
        "dependencies": [
            _toollinkos_dependency(dep, f"{path}.dependencies[{i}]")
            for i, dep in enumerate(deps_raw if isinstance(deps_raw, list) else [])
        ],
    }


def _toollinkos_parameters(raw: object, path: str) -> list[dict[str, object]]:
    if raw is None:
        return []
    if isinstance(raw, list):
        return [_toollinkos_parameter(_as_object(p, f"{path}.parameters[{i}]")) for i, p in enumerate(raw)]
    schema = _as_object(raw, f"{path}.parameters")
    properties = schema.get("properties")
    required_raw = schema.get("required")
    required = set(required_raw) if isinstance(required_raw, list) else set()
    if isinstance(properties, Mapping):
        return [
            {
                "name": str(name),
                "description": str(spec.get("description", "")) if isinstance(spec, Mapping) else "",
                "type": str(spec.get("type", "string")) if isinstance(spec, Mapping) else "string",
                "required": name in required,
            }
            for name, spec in properties.items()
        ]
    # plain name -> spec mapping
    return [
        {
            "name": str(name),
            "description": str(spec.get("description", "")) if isinstance(spec, Mapping) else str(spec),
            "type": str(spec.get("type", "string")) if isinstance(spec, Mapping) else "string",
            "required": bool(spec.get("required", False)) if isinstance(spec, Mapping) else False,
        }
        for name, spec in schema.items()
    ]


def _toollinkos_parameter(item: JsonObject) -> dict[str, object]:
    name = _first_present(item, ("name", "parameter_name"))
    value_kind = _first_present(item, ("type", "value_type", "data_type"))
    return {
        "name": str(name) if name is not None else "",
        "description": str(item.get("description", "")),
        "type": str(value_kind) if value_kind is not None else "string",
        "required": bool(item.get("required", False)),
    }


def _toollinkos_dependency(raw: object, path: str) -> dict[str, object]:
    dep = _as_object(raw, path)
    target = _first_present(dep, ("target", "tool_name", "depends_on", "name", "tool"))
    label = _first_present(dep, ("relation", "relationship", "type", "dependency_type"))
    if not isinstance(target, str):
        raise GraphParseError("dependency is missing a target tool", field=f"{path}.target")
    relation = normalize_relation_label(str(label)) if label is not None else None
    if relation is None:
        raise GraphParseError(f"unknown relation {label!r}", field=f"{path}.relation")
    entry: dict[str, object] = {
        "target": target,
        "relation": _RELATION_WIRE[relation],
        "reason": str(dep.get("reason", "")),
    }
    parameter_name = dep.get("parameter_name")
    if relation in PARAMETER_RELATIONS and isinstance(parameter_name, str) and parameter_name:
        entry["parameter_name"] = parameter_name
    return entry


def _as_object(value: object, path: str) -> JsonObject:
    if not isinstance(value, Mapping):
        raise GraphParseError("expected an object", field=path)
    return cast(JsonObject, value)


def _required_list(payload: JsonObject, key: str, path: str) -> list[object]:
    value = payload.get(key)
    if not isinstance(value, list):
        raise GraphParseError(f"'{key}' must be a list", field=path)
    return value


def _optional_list(payload: JsonObject, key: str, path: str) -> list[object]:
    value = payload.get(key)
    if value is None:
        return []
    if not isinstance(value, list):
        raise GraphParseError(f"'{key}' must be a list", field=f"{path}.{key}")
    return value


def _required_str(payload: JsonObject, key: str, path: str) -> str:
    value = payload.get(key)
    if not isinstance(value, str):
        raise GraphParseError(f"'{key}' must be a string", field=f"{path}.{key}")
    return value


def _optional_str(payload: JsonObject, key: str, path: str) -> str | None:
    value = payload.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise GraphParseError(f"'{key}' must be a string or null", field=f"{path}.{key}")
    return value
