"""Source units, locations and diagnostics shared by every pass."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True, order=True)
class Loc:
    file: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True, order=True)
class Diagnostic:
    loc: Loc
    message: str
    severity: str = "error"

    def render(self) -> str:
        return f"{self.loc}: {self.severity}: {self.message}"


@dataclass
class SourceUnit:
    path: str
    text: str
    lines: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.lines:
            starts = [0]
            for i, ch in enumerate(self.text):
                if ch == "\n":
                    starts.append(i + 1)
            self.lines = starts

    @classmethod
    def from_path(cls, path: str | Path) -> "SourceUnit":
        p = Path(path)
        return cls(str(p), p.read_text(encoding="utf-8"))

    def loc(self, offset: int) -> Loc:
        line = bisect.bisect_right(self.lines, offset) - 1
        return Loc(self.path, line + 1, offset - self.lines[line] + 1)

    def contains(self, loc: Loc) -> bool:
        if loc.file != self.path or not 1 <= loc.line <= len(self.lines):
            return False
        start = self.lines[loc.line - 1]
        end = self.lines[loc.line] if loc.line < len(self.lines) else len(self.text) + 1
        return 1 <= loc.col and start + loc.col - 1 <= max(end - 1, start)

    def line_text(self, line: int) -> str:
        start = self.lines[line - 1]
        end = self.lines[line] if line < len(self.lines) else len(self.text)
        return self.text[start:end].rstrip("\n")
