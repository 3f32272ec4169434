"""Transform the tutorial scripts into py:light notebooks for the docs.

https://jupytext.readthedocs.io/en/latest/formats-scripts.html#the-light-format
"""

import pathlib
import re

SOURCE = pathlib.Path("tutorials/")
TARGET = pathlib.Path("docs/Tutorials/")


def split_docstring(text: str, /) -> tuple:
    """Split a script into the lines of its module docstring and the rest."""
    match = re.match(r'[rf]?"""(.*?)"""\n', text, flags=re.DOTALL)
    if match is None:
        msg = "Every tutorial must start with a module docstring."
        raise ValueError(msg)
    return match.group(1).splitlines(), text[match.end() :]


def to_py_light(text: str, /) -> tuple:
    """Turn the docstring into a markdown header; return the title and the script."""
    (title, *details), rest = split_docstring(text)
    title = title.rstrip(".")
    markdown = [f"## {title}", *(f"# {line}".rstrip() for line in details)]
    return title, "\n".join(markdown) + "\n\n" + rest


if __name__ == "__main__":
    TARGET.mkdir(parents=True, exist_ok=True)
    for path in sorted(SOURCE.glob("[!_]*.py")):
        title, script = to_py_light(path.read_text())
        name = "_".join(re.sub(r"[^0-9a-zA-Z]+", " ", title).lower().split())
        (TARGET / f"{path.stem.split('_')[0]}_{name}.py").write_text(script)
