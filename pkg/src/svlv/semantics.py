"""Language rules shared by the interpreter and the VC generator.

These decide *where* a language-defined check exists; how it is evaluated
or proved is up to each consumer.
"""

from __future__ import annotations

from .frontend import ast as A
from .frontend.types import SemType
from .target import TargetConfig

PARTIAL_INT_OPS = {"+", "-", "*", "/", "rem"}


def type_bounds(ty: SemType, target: TargetConfig) -> tuple:
    """Static (lo, hi) of a scalar subtype, with integer bases taken from the target."""
    if ty.base == "integer":
        lo = target.int_first if ty.lo is None else ty.lo
        hi = target.int_last if ty.hi is None else ty.hi
        return lo, hi
    return ty.lo, ty.hi


def needs_range_check(ty: SemType, target: TargetConfig) -> bool:
    """Assignment into ``ty`` checks the value against the subtype range."""
    if ty.base == "integer":
        return ty.constrained and (ty.lo > target.int_first or ty.hi < target.int_last)
    if ty.base == "float":
        return ty.constrained
    return False


def needs_validity_check(ty: SemType) -> bool:
    return ty.base == "float" and ty.constrained


def range_contains(outer: SemType, inner: SemType, target: TargetConfig) -> bool:
    olo, ohi = type_bounds(outer, target)
    ilo, ihi = type_bounds(inner, target)
    if olo is None:
        return True
    if ilo is None:
        return False
    return olo <= ilo and ihi <= ohi


def needs_copy_back_check(actual: SemType, formal: SemType, target: TargetConfig) -> bool:
    """Copy-back of an ``out`` scalar into a narrower actual is range checked."""
    return actual.is_scalar and needs_range_check(actual, target) and not range_contains(actual, formal, target)


def tracks_init(decl) -> bool:
    """Objects that start uninitialized: locals without initializer and ``out`` parameters."""
    if isinstance(decl, A.Param):
        return decl.mode == "out"
    if isinstance(decl, A.ObjDecl):
        return decl.init is None and not decl.is_global
    return False


def is_array_formal(decl) -> bool:
    return isinstance(decl, A.Param) and decl.ty is not None and decl.ty.base == "array"


def is_partial(e) -> bool:
    """Operations that can raise a run-time error."""
    if isinstance(e, A.Binary):
        return e.op in PARTIAL_INT_OPS and e.ty is not None and e.ty.is_numeric
    if isinstance(e, A.Unary):
        return e.op == "-" and e.ty is not None and e.ty.base == "integer"
    if isinstance(e, A.Apply):
        return e.kind == "index"
    return isinstance(e, A.Slice)


def count_partial(e) -> int:
    return sum(1 for n in A.walk_expr(e) if is_partial(n))
