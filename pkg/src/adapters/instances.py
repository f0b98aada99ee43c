"""JSONL codec for benchmark instances: one `{id, query, golden_tools, seed_tool?}` per line."""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Mapping, Set
from typing import cast

from src.core.eval_port import EvalInstance, InstanceParseError, InstanceValidationError

JsonObject = Mapping[str, object]


def load_instances(
    stream: Iterable[str] | Iterable[bytes], known_tool_ids: Set[str] | None = None
) -> list[EvalInstance]:
    """
    Parse and validate instances.

    Lines may be text or UTF-8 bytes. Blank lines are skipped. Encoding,
    syntax and shape errors stop at the first bad line;
    validation problems (unknown or empty golden sets, duplicate ids) are
    collected across the whole file and raised together.
    """
    instances: list[EvalInstance] = []
    problems: list[str] = []
    seen_ids: set[str] = set()
    for line_number, line in _numbered_lines(stream):
        if not line.strip():
            continue
        record = _decode_line(line, line_number)
        instance_id = _required_str(record, "id", line_number)
        query = _required_str(record, "query", line_number)
        golden = _required_str_list(record, "golden_tools", line_number)
        seed_tool = _optional_str(record, "seed_tool", line_number)

        line_problems = _validate(instance_id, golden, seed_tool, known_tool_ids, seen_ids)
        seen_ids.add(instance_id)
        if line_problems:
            problems.extend(f"line {line_number}: {problem}" for problem in line_problems)
            continue
        instances.append(
            EvalInstance(
                id=instance_id,
                query=query,
                golden_tools=frozenset(golden),
                seed_tool=seed_tool or golden[0],
            )
        )
    if problems:
        raise InstanceValidationError(problems)
    return instances


def dump_instances(instances: Iterable[EvalInstance]) -> str:
    """Inverse of `load_instances`; golden tools are written seed first, then sorted."""
    lines = []
    for instance in instances:
        golden = [instance.seed_tool, *sorted(instance.golden_tools - {instance.seed_tool})]
        record = {
            "id": instance.id,
            "query": instance.query,
            "golden_tools": golden,
            "seed_tool": instance.seed_tool,
        }
        lines.append(json.dumps(record, ensure_ascii=False) + "\n")
    return "".join(lines)


def _validate(
    instance_id: str,
    golden: list[str],
    seed_tool: str | None,
    known_tool_ids: Set[str] | None,
    seen_ids: set[str],
) -> list[str]:
    problems: list[str] = []
    if instance_id in seen_ids:
        problems.append(f"duplicate instance id {instance_id}")
    if not golden:
        problems.append(f"instance {instance_id} has an empty golden_tools list")
    if known_tool_ids is not None:
        problems.extend(
            f"instance {instance_id}: unknown golden tool {name}"
            for name in golden
            if name not in known_tool_ids
        )
    if seed_tool is not None and seed_tool not in golden:
        problems.append(f"instance {instance_id}: seed_tool {seed_tool} is not among golden_tools")
    return problems


def _numbered_lines(stream: Iterable[str] | Iterable[bytes]) -> Iterator[tuple[int, str]]:
    lines: Iterator[str | bytes] = iter(stream)
    line_number = 0
    while True:
        line_number += 1
        try:
            line = next(lines)
        except StopIteration:
            return
        except UnicodeDecodeError as exc:
            raise InstanceParseError(f"invalid UTF-8: {exc.reason}", line=line_number) from exc
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise InstanceParseError(
                    f"invalid UTF-8 byte at column {exc.start + 1}", line=line_number
                ) from exc
        yield line_number, line


def _decode_line(line: str, line_number: int) -> JsonObject:
    try:
        decoded: object = json.loads(line)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"invalid JSON: {exc.msg}", line=line_number) from exc
    if not isinstance(decoded, Mapping):
        raise InstanceParseError("record must be a JSON object", line=line_number)
    return cast(JsonObject, decoded)


def _required_str(record: JsonObject, key: str, line_number: int) -> str:
    value = record.get(key)
    if not isinstance(value, str):
        raise InstanceParseError(f"'{key}' must be a string", line=line_number)
    return value


def _optional_str(record: JsonObject, key: str, line_number: int) -> str | None:
    value = record.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise InstanceParseError(f"'{key}' must be a string or null", line=line_number)
    return value


def _required_str_list(record: JsonObject, key: str, line_number: int) -> list[str]:
    value = record.get(key)
    if not isinstance(value, list) or not all(isinstance(item, str) for item in value):
        raise InstanceParseError(f"'{key}' must be a list of strings", line=line_number)
    # Order kept: the first name is the default seed tool
    return list(dict.fromkeys(cast(list[str], value)))
