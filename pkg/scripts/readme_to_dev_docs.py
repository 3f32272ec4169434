"""Split the README into the documentation index and developer pages."""

import pathlib
import re

SOURCE = pathlib.Path("README.md")
TARGET = pathlib.Path("docs/Developer_documentation/")


def snake_case(title: str, /) -> str:
    """Turn a section title into a file name, for example 'Run the tests'."""
    words = re.sub(r"[^0-9a-zA-Z]+", " ", title).split()
    return "_".join(w.lower() for w in words)


def split_sections(lines: list, /) -> list:
    """Split lines at every second-level header; the first block is the intro."""
    starts = [i for i, line in enumerate(lines) if line.startswith("## ")]
    bounds = [0, *starts, len(lines)]
    return [lines[a:b] for a, b in zip(bounds[:-1], bounds[1:])]


if __name__ == "__main__":
    TARGET.mkdir(parents=True, exist_ok=True)
    intro, *sections = split_sections(SOURCE.read_text().splitlines(keepends=True))
    pathlib.Path("docs/index.md").write_text("".join(intro))

    for i, block in enumerate(sections, start=1):
        # Promote the header so that every page has a title
        header = block[0][1:]
        name = snake_case(header.lstrip("# ").strip())
        (TARGET / f"{i}_{name}.md").write_text("".join([header, *block[1:]]))
