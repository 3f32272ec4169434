"""Generate one API page per wickfbm module, plus an overview page."""

import ast
import pathlib

SOURCE = pathlib.Path("wickfbm")
TARGET = pathlib.Path("docs/API_documentation/")

# Wrappers and test oracles are not part of the public API
SKIP = ("backend/*", "test_util.py")


def module_name(path: pathlib.Path) -> str:
    """Turn a file path into a dotted module name."""
    return ".".join(path.with_suffix("").parts)


def summary(path: pathlib.Path) -> str:
    """Return the first line of a module docstring."""
    docstring = ast.get_docstring(ast.parse(path.read_text(encoding="utf-8")))
    if not docstring:
        return ""
    return docstring.strip().splitlines()[0]


def public_modules(source: pathlib.Path) -> list:
    """List the documented modules in a stable order."""
    paths = sorted(source.rglob("*.py"))
    return [
        p
        for p in paths
        if not p.name.startswith("_") and not any(p.match(s) for s in SKIP)
    ]


def main() -> None:
    TARGET.mkdir(parents=True, exist_ok=True)
    overview = ["# API overview\n"]
    for path in public_modules(SOURCE):
        name = module_name(path)
        page = TARGET / f"{path.stem}.md"
        page.write_text(f"# {name}\n\n:::{name}\n", encoding="utf-8")
        overview.append(f"- [{name}]({path.stem}.md): {summary(path)}")
    (TARGET / "index.md").write_text("\n".join(overview) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
