"""Line-oriented structured-text dialect shared by every artifact file.

A document is a header of ``key = value`` lines followed by named sections::

    # comment
    version = 1
    width = 4

    [cells]
    0 0 logic - - -

Section rows are whitespace-separated tokens.  Circuit files, Tanner graph
files, bisection graphs/trees and CLI config files all use this one parser.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path


class FormatError(ValueError):
    """Raised when a document cannot be parsed or lacks a required field."""


@dataclass
class Document:
    header: dict[str, str] = field(default_factory=dict)
    sections: dict[str, list[list[str]]] = field(default_factory=dict)

    def get(self, key: str, default: str | None = None) -> str | None:
        return self.header.get(key, default)

    def require(self, key: str) -> str:
        try:
            return self.header[key]
        except KeyError:
            raise FormatError(f"missing header field {key!r}") from None

    def rows(self, name: str) -> list[list[str]]:
        return self.sections.get(name, [])


def parse(text: str) -> Document:
    doc = Document()
    current: list[list[str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise FormatError(f"line {lineno}: empty section name")
            current = doc.sections.setdefault(name, [])
            continue
        if current is None:
            if "=" not in line:
                raise FormatError(f"line {lineno}: expected 'key = value' in header")
            key, value = line.split("=", 1)
            doc.header[key.strip()] = value.strip()
        else:
            current.append(line.split())
    return doc


def dump(doc: Document) -> str:
    lines = [f"{k} = {v}" for k, v in doc.header.items()]
    for name, rows in doc.sections.items():
        lines.append("")
        lines.append(f"[{name}]")
        lines.extend(" ".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def read(path: str | os.PathLike) -> Document:
    return parse(Path(path).read_text())


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
