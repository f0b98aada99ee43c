import ast
import re
import subprocess
import sys
import textwrap
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

from src.core.eval_port import ERROR_CATEGORIES, METRICS
from src.core.hook_registry import list_all_query_transforms, list_all_rerankers
from src.core.provider_registry import list_all_providers
from src.core.retrieval_port import FIRST_PASS_MODES, FUSION_METHODS, RETRIEVAL_MODES
from src.services.benchmark import STANDARD_LINEUP

# Hard gate: maximum block nesting depth in any src/ function.
_MAX_NESTING_DEPTH = 5

# Files whose functions may exceed _MAX_NESTING_DEPTH, with their ceiling.
_NESTING_DEPTH_ALLOWLIST: dict[str, int] = {}

# Ruff rules counted as complexity suppressions.
_COMPLEXITY_RULES: frozenset[str] = frozenset({"C901", "PLR0911", "PLR0912", "PLR0915"})

# Files approved to suppress complexity rules. Do not add entries without a design note in DESIGN.md.
_APPROVED_COMPLEXITY_SUPPRESSED_FILES: frozenset[str] = frozenset({
    "tests/**/*.py",          # test code: fixtures and parametrized grids
    "src/cli/commands.py",    # argparse wiring for every subcommand in one parser
    "benchmarks/**/*.py",     # benchmark scaffolding
})

_BLOCK_STMT_TYPES: tuple[type[ast.stmt], ...] = (
    ast.If,
    ast.For,
    ast.While,
    ast.Try,
    ast.With,
    ast.AsyncWith,
    ast.AsyncFor,
)


def _workspace_root() -> Path:
    return Path(__file__).parent.parent.parent


def _parse_python_file(path: Path) -> ast.Module:
    return ast.parse(path.read_text(encoding="utf-8"), filename=str(path))


def _literal_alias(tree: ast.Module, alias_name: str) -> list[str]:
    """Values of a module-level `Name = Literal[...]` alias, in source order."""
    for node in tree.body:
        if not isinstance(node, ast.Assign):
            continue
        if not any(isinstance(target, ast.Name) and target.id == alias_name for target in node.targets):
            continue
        annotation = node.value
        if isinstance(annotation, ast.Subscript) and isinstance(annotation.value, ast.Name):
            if annotation.value.id == "Literal":
                items = annotation.slice.elts if isinstance(annotation.slice, ast.Tuple) else [annotation.slice]
                return [item.value for item in items if isinstance(item, ast.Constant) and isinstance(item.value, str)]
    raise AssertionError(f"Could not find Literal alias {alias_name}")


def _getenv_default_string(tree: ast.Module, variable_name: str) -> str:
    for child in ast.walk(tree):
        targets: list[ast.expr] = []
        value: ast.expr | None = None
        if isinstance(child, ast.Assign):
            targets, value = list(child.targets), child.value
        elif isinstance(child, ast.AnnAssign):
            targets, value = [child.target], child.value
        if not any(isinstance(target, ast.Name) and target.id == variable_name for target in targets):
            continue
        if (
            isinstance(value, ast.Call)
            and isinstance(value.func, ast.Attribute)
            and value.func.attr == "getenv"
            and len(value.args) >= 2
            and isinstance(value.args[1], ast.Constant)
            and isinstance(value.args[1].value, str)
        ):
            return value.args[1].value
    raise AssertionError(f"Could not find string default for {variable_name} in config.py")


def _child_stmt_bodies(stmt: ast.stmt) -> list[list[ast.stmt]]:
    """Direct child statement lists of a compound statement, except-handler bodies included."""
    result: list[list[ast.stmt]] = []
    for field, value in ast.iter_fields(stmt):
        if field == "handlers":
            result.extend(handler.body for handler in value if isinstance(handler, ast.ExceptHandler))
        elif isinstance(value, list) and value and isinstance(value[0], ast.stmt):
            result.append(value)  # type: ignore[arg-type]
    return result


def _max_block_depth(body: list[ast.stmt], depth: int = 0) -> int:
    """
    Maximum block nesting depth in a statement list.

    An elif chain stays at its parent's depth; a real else block (including
    `else: if`) counts one level deeper. Nested defs have their own budget.
    """
    max_d = depth
    for stmt in body:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            continue
        if not isinstance(stmt, _BLOCK_STMT_TYPES):
            continue
        child_depth = depth + 1
        max_d = max(max_d, child_depth)
        if isinstance(stmt, ast.If):
            max_d = max(max_d, _max_block_depth(stmt.body, child_depth))
            # `elif` sits at its parent's column; the `if` inside `else:` is indented further
            is_elif = (
                len(stmt.orelse) == 1
                and isinstance(stmt.orelse[0], ast.If)
                and stmt.orelse[0].col_offset == stmt.col_offset
            )
            max_d = max(max_d, _max_block_depth(stmt.orelse, depth if is_elif else child_depth))
        else:
            for child_body in _child_stmt_bodies(stmt):
                max_d = max(max_d, _max_block_depth(child_body, child_depth))
    return max_d


def test_readme_documents_all_hook_and_provider_aliases() -> None:
    """Every provider, reranker and query-transform alias must appear in README.md as `alias`."""
    readme_path = _workspace_root() / "README.md"
    assert readme_path.exists(), "README.md does not exist at project root"

    documented = set(re.findall(r"`([^`\s]+)`", readme_path.read_text(encoding="utf-8")))

    registries = {
        "provider_registry.py": [spec.alias for spec in list_all_providers()],
        "hook_registry.py (rerankers)": [spec.alias for spec in list_all_rerankers()],
        "hook_registry.py (query transforms)": [spec.alias for spec in list_all_query_transforms()],
    }
    for source, aliases in registries.items():
        assert aliases, f"{source} is empty"
        missing = [alias for alias in aliases if alias not in documented]
        assert not missing, f"Aliases {missing} registered in {source} are not documented in README.md."


def test_reranker_specs_declare_needs_golden_explicitly() -> None:
    """
    Every RerankerSpec in hook_registry.py must spell out `needs_golden`, so a
    hook that reads golden labels is never registered as an ordinary one.
    """
    tree = _parse_python_file(_workspace_root() / "src" / "core" / "hook_registry.py")

    calls = [
        node
        for node in ast.walk(tree)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "RerankerSpec"
    ]

    assert calls, "No RerankerSpec instantiations found in hook_registry.py"
    for call in calls:
        assert any(keyword.arg == "needs_golden" for keyword in call.keywords), (
            f"RerankerSpec at line {call.lineno} must pass needs_golden=True/False explicitly."
        )


def test_golden_reading_rerankers_stay_out_of_the_cli_defaults() -> None:
    """The standard line-up and CLI defaults must never rely on an evaluation-only hook."""
    evaluation_only = {spec.alias for spec in list_all_rerankers() if spec.needs_golden}
    for label, cfg in STANDARD_LINEUP:
        assert cfg.reranker not in evaluation_only, f"line-up entry '{label}' uses evaluation-only reranker"


def test_literal_aliases_match_runtime_tuples() -> None:
    """Literal type aliases and the tuples the CLI and reports iterate must list the same values."""
    root = _workspace_root() / "src" / "core"
    retrieval_port = _parse_python_file(root / "retrieval_port.py")
    eval_port = _parse_python_file(root / "eval_port.py")

    assert _literal_alias(retrieval_port, "RetrievalMode") == list(RETRIEVAL_MODES)
    assert _literal_alias(retrieval_port, "FirstPass") == list(FIRST_PASS_MODES)
    assert _literal_alias(retrieval_port, "FusionMethod") == list(FUSION_METHODS)
    assert _literal_alias(eval_port, "ErrorCategory") == list(ERROR_CATEGORIES)
    assert _literal_alias(eval_port, "MetricName") == list(METRICS)


def test_core_and_adapter_files_are_gated() -> None:
    """
    Gate src/core and src/adapters.

    Adding a file here means registering it in this test and in DESIGN.md.
    """
    workspace_root = _workspace_root()

    allowed = {
        "core": {
            "__init__.py",
            "accuracy_model.py",
            "embedding_port.py",
            "error_taxonomy.py",
            "eval_port.py",
            "factory.py",
            "fusion.py",
            "hook_registry.py",
            "index_port.py",
            "lexical_index.py",
            "metrics.py",
            "provider_registry.py",
            "rerankers.py",
            "retrieval_port.py",
            "tool_graph.py",
            "vector_index.py",
        },
        "adapters": {
            "__init__.py",
            "embedding_cache.py",
            "graph_document.py",
            "hash_embedder.py",
            "instances.py",
            "llm_reranker_client.py",
            "remote_embedder.py",
            "report.py",
            "reranker_prompt.py",
            "synthetic.py",
            "text.py",
        },
    }

    for package, allowed_files in allowed.items():
        package_dir = workspace_root / "src" / package
        assert package_dir.exists(), f"src/{package} directory does not exist"
        current = {f.name for f in package_dir.iterdir() if f.is_file() and not f.name.startswith(".")}
        unexpected = current - allowed_files
        assert not unexpected, (
            f"Unexpected files found in src/{package}: {unexpected}. "
            f"Register new modules in this test and in DESIGN.md."
        )


def test_config_default_provider_is_registered_and_offline() -> None:
    """The default embedding provider must be a registered alias that runs without network access."""
    tree = _parse_python_file(_workspace_root() / "src" / "config.py")

    default_provider = _getenv_default_string(tree, "EMBEDDING_PROVIDER")

    specs = {spec.alias: spec for spec in list_all_providers()}
    assert default_provider in specs, f"EMBEDDING_PROVIDER default '{default_provider}' is not registered"
    assert not specs[default_provider].needs_api_url, "default provider must not need EMBEDDING_API_URL"
    assert not specs[default_provider].needs_cache_path, "default provider must not need EMBEDDING_CACHE_PATH"


def test_tach_architecture_boundaries() -> None:
    """Module dependency directions must satisfy tach.toml."""
    result = subprocess.run(
        [sys.executable, "-m", "tach", "check"],
        capture_output=True,
        text=True,
        cwd=str(_workspace_root()),
        timeout=30,
    )
    assert result.returncode == 0, (
        f"Architecture boundary violation detected by tach:\n{result.stdout}{result.stderr}\n"
        "Change tach.toml only for an intentional, reviewed dependency."
    )


def test_src_functions_max_nesting_depth() -> None:
    """No function in src/ may nest blocks deeper than _MAX_NESTING_DEPTH; elif chains stay flat."""
    workspace_root = _workspace_root()

    violations: list[str] = []
    for py_file in sorted((workspace_root / "src").rglob("*.py")):
        rel_path = str(py_file.relative_to(workspace_root))
        allowed = _NESTING_DEPTH_ALLOWLIST.get(rel_path, _MAX_NESTING_DEPTH)
        for node in ast.walk(_parse_python_file(py_file)):
            if not isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
                continue
            depth = _max_block_depth(node.body)
            if depth > allowed:
                violations.append(f"  {rel_path}:{node.lineno} {node.name}() depth {depth} (max {allowed})")

    assert not violations, (
        f"Block nesting depth exceeded in {len(violations)} function(s):\n" + "\n".join(violations)
    )


def test_ruff_complexity_suppression_allowlist() -> None:
    """Files suppressing C901/PLR0911/PLR0912/PLR0915 must be listed in _APPROVED_COMPLEXITY_SUPPRESSED_FILES."""
    pyproject_path = _workspace_root() / "pyproject.toml"
    assert pyproject_path.exists(), "pyproject.toml not found"

    with pyproject_path.open("rb") as f:
        pyproject = tomllib.load(f)

    per_file_ignores: dict[str, list[str]] = (
        pyproject.get("tool", {}).get("ruff", {}).get("lint", {}).get("per-file-ignores", {})
    )
    suppressed = {pattern for pattern, rules in per_file_ignores.items() if _COMPLEXITY_RULES & set(rules)}

    new_suppressions = suppressed - _APPROVED_COMPLEXITY_SUPPRESSED_FILES
    assert not new_suppressions, (
        f"Unapproved Ruff complexity suppressions for: {new_suppressions}. "
        "Approve them in this test or refactor the code."
    )


def test_max_block_depth_elif_vs_else_if() -> None:
    """elif chains stay flat; `else: if` counts as a deeper block."""
    elif_source = textwrap.dedent("""\
        def f():
            if a:
                pass
            elif b:
                pass
            elif c:
                pass
    """)
    func_body = ast.parse(elif_source).body[0].body  # type: ignore[attr-defined]
    assert _max_block_depth(func_body) == 1

    else_if_source = textwrap.dedent("""\
        def f():
            if a:
                pass
            else:
                if b:
                    pass
    """)
    func_body = ast.parse(else_if_source).body[0].body  # type: ignore[attr-defined]
    assert _max_block_depth(func_body) == 2
