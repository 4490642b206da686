"""Lexing, parsing and resolution of SVL source units."""

from __future__ import annotations

from pathlib import Path

from . import ast
from .ast import Ast
from .parser import parse_text, parse_unit
from .resolver import ResolvedAst, resolve
from .source import Diagnostic, Loc, SourceUnit


def parse_units(units: list[SourceUnit]) -> tuple[Ast | None, list[Diagnostic]]:
    """Parse several units into one tree (packages in input order)."""
    packages: list = []
    sources: dict = {}
    diags: list[Diagnostic] = []
    for u in units:
        tree, ds = parse_unit(u)
        diags.extend(ds)
        sources[u.path] = u
        if tree is not None:
            packages.extend(tree.packages)
    if diags:
        return None, sorted(diags)
    return Ast(packages, sources), []


def load(paths: list[str | Path]) -> tuple[ResolvedAst | None, list[Diagnostic]]:
    """Read, parse and resolve source files."""
    units = [SourceUnit.from_path(p) for p in paths]
    return load_units(units)


def load_units(units: list[SourceUnit]) -> tuple[ResolvedAst | None, list[Diagnostic]]:
    tree, diags = parse_units(units)
    if tree is None:
        return None, diags
    return resolve(tree)


def load_text(text: str, path: str = "<input>.svl") -> tuple[ResolvedAst | None, list[Diagnostic]]:
    return load_units([SourceUnit(path, text)])


__all__ = [
    "Ast", "Diagnostic", "Loc", "ResolvedAst", "SourceUnit", "ast", "load", "load_text",
    "load_units", "parse_text", "parse_unit", "parse_units", "resolve",
]
