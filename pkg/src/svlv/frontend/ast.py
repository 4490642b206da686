"""AST node classes for SVL.

Locations and resolver annotations are excluded from equality so that two
trees compare equal when they are structurally identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

from .source import Loc, SourceUnit

_NOLOC = Loc("<none>", 0, 0)


def _loc() -> Loc:
    return field(default=_NOLOC, compare=False, repr=False)


def _ann():
    return field(default=None, compare=False, repr=False)


# -- expressions -----------------------------------------------------------

@dataclass(eq=True)
class IntLit:
    value: int
    loc: Loc = _loc()
    ty: object = _ann()


@dataclass(eq=True)
class RealLit:
    value: Fraction
    text: str = field(default="", compare=False)
    loc: Loc = _loc()
    ty: object = _ann()


@dataclass(eq=True)
class Name:
    ident: str
    loc: Loc = _loc()
    ty: object = _ann()
    ref: object = _ann()
    # set when the name denotes a parameterless function call
    is_call: bool = field(default=False, compare=False, repr=False)


@dataclass(eq=True)
class Apply:
    """``id(args)``: a call or an indexed component, decided by the resolver."""

    prefix: str
    args: list
    loc: Loc = _loc()
    ty: object = _ann()
    ref: object = _ann()
    kind: Optional[str] = field(default=None, compare=False, repr=False)  # 'call' | 'index'


@dataclass(eq=True)
class Slice:
    prefix: str
    lo: "Expr"
    hi: "Expr"
    loc: Loc = _loc()
    ty: object = _ann()
    ref: object = _ann()


@dataclass(eq=True)
class Attr:
    prefix: str
    attr: str  # lower case: first | last | length | result
    loc: Loc = _loc()
    ty: object = _ann()
    ref: object = _ann()


@dataclass(eq=True)
class Unary:
    op: str  # '-' | 'not'
    operand: "Expr"
    loc: Loc = _loc()
    ty: object = _ann()


@dataclass(eq=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Loc = _loc()
    ty: object = _ann()


@dataclass(eq=True)
class Aggregate:
    """``(others => value)``."""

    value: "Expr"
    loc: Loc = _loc()
    ty: object = _ann()


Expr = Union[IntLit, RealLit, Name, Apply, Slice, Attr, Unary, Binary, Aggregate]


# -- statements ------------------------------------------------------------

@dataclass(eq=True)
class Assign:
    target: Expr
    value: Expr
    loc: Loc = _loc()
    end: Loc = _loc()


@dataclass(eq=True)
class If:
    cond: Expr
    then_body: list
    else_body: Optional[list] = None
    loc: Loc = _loc()
    end: Loc = _loc()


@dataclass(eq=True)
class While:
    cond: Expr
    body: list
    loc: Loc = _loc()
    end: Loc = _loc()


@dataclass(eq=True)
class Return:
    value: Optional[Expr] = None
    loc: Loc = _loc()
    end: Loc = _loc()


@dataclass(eq=True)
class CallStmt:
    call: Expr  # Name or Apply
    loc: Loc = _loc()
    end: Loc = _loc()


@dataclass(eq=True)
class Pragma:
    name: str  # assert | assume | assert_and_cut | loop_invariant | annotate
    arg: Optional[Expr] = None
    message: Optional[str] = None
    loc: Loc = _loc()
    end: Loc = _loc()


Stmt = Union[Assign, If, While, Return, CallStmt, Pragma]


# -- declarations ----------------------------------------------------------

@dataclass(eq=True)
class SubtypeDecl:
    name: str
    base: str
    lo: Optional[Expr] = None
    hi: Optional[Expr] = None
    dims: Optional[tuple] = None  # ((dimension, Fraction), ...)
    loc: Loc = _loc()
    end: Loc = _loc()
    ty: object = _ann()


@dataclass(eq=True)
class ArrayTypeDecl:
    name: str
    first: int
    last: int
    elem: str
    loc: Loc = _loc()
    end: Loc = _loc()
    ty: object = _ann()


@dataclass(eq=True)
class ObjDecl:
    name: str
    type_name: str
    init: Optional[Expr] = None
    loc: Loc = _loc()
    end: Loc = _loc()
    ty: object = _ann()
    is_global: bool = field(default=False, compare=False, repr=False)
    owner: object = _ann()


@dataclass(eq=True)
class Param:
    name: str
    mode: str  # 'in' | 'out' | 'in out'
    type_name: str
    loc: Loc = _loc()
    ty: object = _ann()
    owner: object = _ann()


@dataclass(eq=True)
class Subprogram:
    kind: str  # 'function' | 'procedure'
    name: str
    params: list
    ret: Optional[str] = None
    pre: Optional[Expr] = None
    post: Optional[Expr] = None
    locals: Optional[list] = None
    body: Optional[list] = None  # None for spec-only declarations
    loc: Loc = _loc()
    end: Loc = _loc()
    ret_ty: object = _ann()
    package: object = _ann()

    @property
    def key(self) -> str:
        return self.name.lower()

    @property
    def has_body(self) -> bool:
        return self.body is not None


Decl = Union[SubtypeDecl, ArrayTypeDecl, ObjDecl, Subprogram]


@dataclass(eq=True)
class Package:
    name: str
    decls: list
    loc: Loc = _loc()
    end: Loc = _loc()

    @property
    def key(self) -> str:
        return self.name.lower()

    def subprograms(self) -> list[Subprogram]:
        return [d for d in self.decls if isinstance(d, Subprogram)]


@dataclass(eq=True)
class Ast:
    packages: list
    sources: dict = field(default_factory=dict, compare=False, repr=False)

    def subprograms(self) -> Iterator[tuple[Package, Subprogram]]:
        for pkg in self.packages:
            for sub in pkg.subprograms():
                yield pkg, sub


# -- traversal helpers -----------------------------------------------------

def children(node) -> list:
    """Direct sub-expressions of an expression node."""
    if isinstance(node, Apply):
        return list(node.args)
    if isinstance(node, Slice):
        return [node.lo, node.hi]
    if isinstance(node, Unary):
        return [node.operand]
    if isinstance(node, Binary):
        return [node.left, node.right]
    if isinstance(node, Aggregate):
        return [node.value]
    return []


def walk_expr(node) -> Iterator:
    yield node
    for c in children(node):
        yield from walk_expr(c)


def stmt_exprs(stmt) -> list:
    if isinstance(stmt, Assign):
        return [stmt.target, stmt.value]
    if isinstance(stmt, (If, While)):
        return [stmt.cond]
    if isinstance(stmt, Return):
        return [stmt.value] if stmt.value is not None else []
    if isinstance(stmt, CallStmt):
        return [stmt.call]
    if isinstance(stmt, Pragma):
        return [stmt.arg] if stmt.arg is not None else []
    return []


def walk_stmts(stmts) -> Iterator:
    for s in stmts or ():
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then_body)
            yield from walk_stmts(s.else_body)
        elif isinstance(s, While):
            yield from walk_stmts(s.body)


def start_loc(e) -> Loc:
    """Location of the leftmost token of an expression."""
    while isinstance(e, Binary):
        e = e.left
    return e.loc


def source_of(ast: Ast, loc: Loc) -> Optional[SourceUnit]:
    return ast.sources.get(loc.file)
