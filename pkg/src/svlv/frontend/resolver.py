"""Name and type resolution.

Annotates the parsed tree in place: every expression gets ``ty``, every
name gets ``ref``, and ``Apply`` nodes are classified as calls or indexed
components. Identifiers are case-insensitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .. import floats
from ..dimensions import DimVector
from . import ast as A
from .source import Diagnostic, Loc
from .types import BOOLEAN, FLOAT, INTEGER, SemType, compatible


@dataclass(frozen=True)
class Builtin:
    """A predefined constant (unit constants, prefixes, True/False)."""

    name: str
    ty: SemType
    value: object


@dataclass(frozen=True)
class BuiltinFunction:
    name: str
    params: tuple  # SemTypes
    ret: SemType


_ANGLE = DimVector.of(angle=1)
BUILTIN_CONSTANTS = {
    "true": Builtin("True", BOOLEAN, True),
    "false": Builtin("False", BOOLEAN, False),
    "degree": Builtin("Degree", SemType("float", "degree", dim=_ANGLE), floats.to_f32(Fraction(math.pi) / 180)),
    "radian": Builtin("Radian", SemType("float", "radian", dim=_ANGLE), 1.0),
    "second": Builtin("Second", SemType("float", "second", dim=DimVector.of(time=1)), 1.0),
    "meter": Builtin("Meter", SemType("float", "meter", dim=DimVector.of(length=1)), 1.0),
    "kilogram": Builtin("Kilogram", SemType("float", "kilogram", dim=DimVector.of(mass=1)), 1.0),
    "kelvin": Builtin("Kelvin", SemType("float", "kelvin", dim=DimVector.of(temperature=1)), 1.0),
    "ampere": Builtin("Ampere", SemType("float", "ampere", dim=DimVector.of(current=1)), 1.0),
    "milli": Builtin("Milli", FLOAT, floats.to_f32(Fraction(1, 1000))),
    "centi": Builtin("Centi", FLOAT, floats.to_f32(Fraction(1, 100))),
    "kilo": Builtin("Kilo", FLOAT, 1000.0),
    "mega": Builtin("Mega", FLOAT, 1000000.0),
}
SIN = BuiltinFunction("Sin", (FLOAT,), FLOAT)
BUILTIN_FUNCTIONS = {"sin": SIN}
BUILTIN_TYPES = {"integer": INTEGER, "float": FLOAT, "boolean": BOOLEAN}


class StaticError(Exception):
    pass


@dataclass
class PackageScope:
    package: A.Package
    types: dict = field(default_factory=dict)
    objects: dict = field(default_factory=dict)
    subprograms: dict = field(default_factory=dict)


@dataclass
class ResolvedAst:
    ast: A.Ast
    scopes: dict  # package key -> PackageScope

    @property
    def packages(self) -> list:
        return self.ast.packages

    @property
    def sources(self) -> dict:
        return self.ast.sources

    def subprograms(self):
        return self.ast.subprograms()

    def lookup_subprogram(self, pkg: A.Package, name: str):
        return self.scopes[pkg.key].subprograms.get(name.lower())


class Resolver:
    def __init__(self, tree: A.Ast):
        self.ast = tree
        self.diags: list[Diagnostic] = []
        self.scopes: dict[str, PackageScope] = {}
        # per-subprogram state
        self.sub: A.Subprogram | None = None
        self.locals: dict = {}
        self.in_post = False
        self.loop_depth = 0

    def error(self, loc: Loc, msg: str) -> None:
        self.diags.append(Diagnostic(loc, msg))

    def run(self) -> ResolvedAst:
        for pkg in self.ast.packages:
            if pkg.key in self.scopes:
                self.error(pkg.loc, f"duplicate package '{pkg.name}'")
                continue
            scope = PackageScope(pkg)
            self.scopes[pkg.key] = scope
            self.scope = scope
            self.declare_types(pkg)
            for d in pkg.decls:
                if isinstance(d, A.Subprogram):
                    self.declare_subprogram(d, pkg)
                elif isinstance(d, A.ObjDecl):
                    self.declare_global(d)
            for d in pkg.decls:
                if isinstance(d, A.Subprogram):
                    self.resolve_subprogram(d)
        return ResolvedAst(self.ast, self.scopes)

    # -- declarations ------------------------------------------------------

    def clash(self, name: str, loc: Loc) -> bool:
        key = name.lower()
        s = self.scope
        if key in s.types or key in s.objects or key in s.subprograms:
            self.error(loc, f"duplicate declaration of '{name}'")
            return True
        return False

    def lookup_type(self, name: str, loc: Loc) -> SemType | None:
        key = name.lower()
        if key in self.scope.types:
            return self.scope.types[key]
        if key in BUILTIN_TYPES:
            return BUILTIN_TYPES[key]
        self.error(loc, f"undefined type '{name}'")
        return None

    def declare_types(self, pkg: A.Package) -> None:
        for d in pkg.decls:
            if isinstance(d, A.SubtypeDecl):
                if self.clash(d.name, d.loc):
                    continue
                ty = self.subtype(d)
                if ty is not None:
                    d.ty = ty
                    self.scope.types[d.name.lower()] = ty
            elif isinstance(d, A.ArrayTypeDecl):
                if self.clash(d.name, d.loc):
                    continue
                elem = self.lookup_type(d.elem, d.loc)
                if elem is None:
                    continue
                if not elem.is_scalar:
                    self.error(d.loc, "array elements must be scalar")
                    continue
                if d.first > d.last:
                    self.error(d.loc, "array index range must be non-empty")
                    continue
                ty = SemType("array", d.name.lower(), element=elem, first=d.first, last=d.last)
                d.ty = ty
                self.scope.types[d.name.lower()] = ty

    def subtype(self, d: A.SubtypeDecl) -> SemType | None:
        parent = self.lookup_type(d.base, d.loc)
        if parent is None:
            return None
        if not parent.is_numeric:
            self.error(d.loc, f"subtype '{d.name}' needs a numeric parent type")
            return None
        dim = parent.dim
        if d.dims is not None:
            dim = DimVector.from_items(d.dims)
        lo, hi = parent.lo, parent.hi
        if d.lo is not None:
            try:
                lo = self.static_value(d.lo, parent)
                hi = self.static_value(d.hi, parent)
            except StaticError as exc:
                self.error(exc.args[1], exc.args[0])
                return None
            if lo > hi:
                self.error(d.loc, "empty range in subtype declaration")
                return None
            if parent.lo is not None and (lo < parent.lo or hi > parent.hi):
                self.error(d.loc, f"range of '{d.name}' is outside its parent subtype")
                return None
        return SemType(parent.base, d.name.lower(), lo, hi, dim=dim)

    def static_value(self, e, expected: SemType):
        """Evaluate a static range bound."""
        v = self._static(e)
        if expected.base == "integer":
            if not isinstance(v, int):
                raise StaticError("integer bound required", e.loc)
            return v
        if isinstance(v, int) and not isinstance(v, bool):
            raise StaticError("real bound required for a float subtype", e.loc)
        return v

    def _static(self, e):
        if isinstance(e, A.IntLit):
            return e.value
        if isinstance(e, A.RealLit):
            return floats.to_f32(e.value)
        if isinstance(e, A.Name):
            b = BUILTIN_CONSTANTS.get(e.ident.lower())
            if b is not None and b.ty.base == "float":
                return b.value
            raise StaticError(f"'{e.ident}' is not static", e.loc)
        if isinstance(e, A.Attr) and e.attr in ("first", "last"):
            ty = self.scope.types.get(e.prefix.lower())
            if ty is not None and ty.is_numeric and ty.constrained:
                return ty.lo if e.attr == "first" else ty.hi
            raise StaticError(f"'{e.prefix}'{e.attr.title()} is not static", e.loc)
        if isinstance(e, A.Unary) and e.op == "-":
            v = self._static(e.operand)
            return -v
        if isinstance(e, A.Binary) and e.op in ("+", "-", "*", "/"):
            a, b = self._static(e.left), self._static(e.right)
            if isinstance(a, float) != isinstance(b, float):
                raise StaticError("mixed integer and real operands", e.loc)
            if isinstance(a, float):
                return {"+": floats.add, "-": floats.sub, "*": floats.mul, "/": floats.div}[e.op](a, b)
            if e.op == "/":
                if b == 0:
                    raise StaticError("division by zero in static expression", e.loc)
                q = abs(a) // abs(b)
                return q if (a >= 0) == (b >= 0) else -q
            return {"+": a + b, "-": a - b, "*": a * b}[e.op]
        raise StaticError("static expression required", e.loc)

    def declare_subprogram(self, d: A.Subprogram, pkg: A.Package) -> None:
        d.package = pkg
        if self.clash(d.name, d.loc):
            return
        if d.key in BUILTIN_FUNCTIONS:
            self.error(d.loc, f"'{d.name}' redeclares a built-in function")
            return
        self.scope.subprograms[d.key] = d
        seen = set()
        for p in d.params:
            p.owner = d
            p.ty = self.lookup_type(p.type_name, p.loc)
            if p.name.lower() in seen:
                self.error(p.loc, f"duplicate parameter '{p.name}'")
            seen.add(p.name.lower())
            if d.kind == "function" and p.mode != "in":
                self.error(p.loc, "function parameters must have mode 'in'")
        if d.kind == "function":
            d.ret_ty = self.lookup_type(d.ret, d.loc)
            if d.ret_ty is not None and d.ret_ty.base == "array":
                self.error(d.loc, "functions must return a scalar type")
                d.ret_ty = None

    def declare_global(self, d: A.ObjDecl) -> None:
        d.is_global = True
        if self.clash(d.name, d.loc):
            return
        d.ty = self.lookup_type(d.type_name, d.loc)
        if d.init is None:
            self.error(d.loc, f"package-level object '{d.name}' needs an initial value")
        self.scope.objects[d.name.lower()] = d
        if d.ty is not None and d.init is not None:
            self.sub = None
            self.locals = {}
            self.expect(d.init, d.ty, "initial value")

    # -- subprograms -------------------------------------------------------

    def resolve_subprogram(self, d: A.Subprogram) -> None:
        self.sub = d
        self.locals = {p.name.lower(): p for p in d.params}
        if d.pre is not None:
            self.in_post = False
            self.expect(d.pre, BOOLEAN, "precondition")
        if d.post is not None:
            self.in_post = True
            self.expect(d.post, BOOLEAN, "postcondition")
            self.in_post = False
        if d.body is None:
            self.sub = None
            return
        for o in d.locals or []:
            o.owner = d
            if o.name.lower() in self.locals:
                self.error(o.loc, f"duplicate declaration of '{o.name}'")
                continue
            o.ty = self.lookup_type(o.type_name, o.loc)
            if o.init is not None and o.ty is not None:
                self.expect(o.init, o.ty, "initial value")
            self.locals[o.name.lower()] = o
        self.stmts(d.body)
        self.sub = None

    def stmts(self, body) -> None:
        for i, s in enumerate(body):
            self.stmt(s, first_in_loop=(i == 0 and self.loop_depth > 0 and body is self._loop_body))

    _loop_body: list | None = None

    def stmt(self, s, first_in_loop: bool = False) -> None:
        if isinstance(s, A.Assign):
            ty = self.target(s.target)
            if ty is not None:
                self.expect(s.value, ty, "assignment")
        elif isinstance(s, A.If):
            self.expect(s.cond, BOOLEAN, "condition")
            self.stmts(s.then_body)
            if s.else_body is not None:
                self.stmts(s.else_body)
        elif isinstance(s, A.While):
            self.expect(s.cond, BOOLEAN, "loop condition")
            saved = self._loop_body
            self._loop_body = s.body
            self.loop_depth += 1
            self.stmts(s.body)
            self.loop_depth -= 1
            self._loop_body = saved
        elif isinstance(s, A.Return):
            sub = self.sub
            if sub.kind == "function":
                if s.value is None:
                    self.error(s.loc, "function must return a value")
                elif sub.ret_ty is not None:
                    self.expect(s.value, sub.ret_ty, "return value")
            elif s.value is not None:
                self.error(s.loc, "procedure cannot return a value")
        elif isinstance(s, A.CallStmt):
            self.call_stmt(s)
        elif isinstance(s, A.Pragma):
            if s.name == "loop_invariant" and not first_in_loop:
                self.error(s.loc, "pragma Loop_Invariant must be the first statement of a loop body")
            if s.arg is not None:
                self.expect(s.arg, BOOLEAN, f"pragma {s.name}")

    def target(self, t) -> SemType | None:
        if isinstance(t, A.Name):
            d = self.variable(t.ident, t.loc)
            if d is None:
                return None
            t.ref = d
            t.ty = d.ty
            return d.ty
        if isinstance(t, A.Apply):
            d = self.variable(t.prefix, t.loc)
            if d is None:
                return None
            if d.ty is None or d.ty.base != "array" or len(t.args) != 1:
                self.error(t.loc, f"'{t.prefix}' is not an array")
                return None
            t.kind = "index"
            t.ref = d
            self.expect(t.args[0], INTEGER, "index")
            t.ty = d.ty.element
            return t.ty
        if isinstance(t, A.Slice):
            d = self.variable(t.prefix, t.loc)
            if d is None:
                return None
            if d.ty is None or d.ty.base != "array":
                self.error(t.loc, f"'{t.prefix}' is not an array")
                return None
            t.ref = d
            self.expect(t.lo, INTEGER, "slice bound")
            self.expect(t.hi, INTEGER, "slice bound")
            t.ty = d.ty
            return t.ty
        self.error(t.loc, "invalid assignment target")
        return None

    def variable(self, name: str, loc: Loc):
        d = self.locals.get(name.lower())
        if d is None:
            if name.lower() in self.scope.objects or name.lower() in BUILTIN_CONSTANTS:
                self.error(loc, f"'{name}' is a constant and cannot be assigned")
            else:
                self.error(loc, f"undefined name '{name}'")
            return None
        if isinstance(d, A.Param) and d.mode == "in":
            self.error(loc, f"'in' parameter '{name}' cannot be assigned")
            return None
        return d

    def call_stmt(self, s: A.CallStmt) -> None:
        c = s.call
        name = c.ident if isinstance(c, A.Name) else c.prefix
        args = [] if isinstance(c, A.Name) else c.args
        sub = self.scope.subprograms.get(name.lower())
        if sub is None or sub.kind != "procedure":
            if sub is None and name.lower() not in BUILTIN_FUNCTIONS:
                self.error(c.loc, f"undefined name '{name}'")
            else:
                self.error(c.loc, f"'{name}' is not a procedure")
            return
        c.ref = sub
        if isinstance(c, A.Apply):
            c.kind = "call"
        self.check_args(sub, args, c.loc)

    def check_args(self, sub: A.Subprogram, args: list, loc: Loc) -> None:
        if len(args) != len(sub.params):
            self.error(loc, f"'{sub.name}' expects {len(sub.params)} argument(s), got {len(args)}")
            for a in args:
                self.expr(a)
            return
        for p, a in zip(sub.params, args):
            if p.ty is None:
                self.expr(a)
                continue
            if p.mode != "in":
                if not isinstance(a, A.Name):
                    self.error(a.loc, f"actual for '{p.mode}' parameter '{p.name}' must be a variable")
                    self.expr(a)
                    continue
                d = self.variable(a.ident, a.loc)
                if d is None:
                    continue
                a.ref = d
                a.ty = d.ty
                if d.ty is not None and not compatible(p.ty, d.ty):
                    self.error(a.loc, f"type mismatch: expected {p.ty}, got {d.ty}")
                continue
            self.expect(a, p.ty, f"argument '{p.name}'")

    # -- expressions -------------------------------------------------------

    def expect(self, e, ty: SemType, what: str) -> None:
        got = self.expr(e, expected=ty)
        if got is None:
            return
        if not compatible(ty, got):
            self.error(e.loc, f"type mismatch in {what}: expected {ty}, got {got}")

    def expr(self, e, expected: SemType | None = None) -> SemType | None:
        ty = self._expr(e, expected)
        e.ty = ty
        return ty

    def _expr(self, e, expected):
        if isinstance(e, A.IntLit):
            return INTEGER
        if isinstance(e, A.RealLit):
            return FLOAT
        if isinstance(e, A.Name):
            return self.name(e)
        if isinstance(e, A.Attr):
            return self.attr(e)
        if isinstance(e, A.Apply):
            return self.apply(e)
        if isinstance(e, A.Slice):
            d = self.lookup_object(e.prefix, e.loc)
            if d is None:
                return None
            if d.ty is None or d.ty.base != "array":
                self.error(e.loc, f"'{e.prefix}' is not an array")
                return None
            e.ref = d
            self.expect(e.lo, INTEGER, "slice bound")
            self.expect(e.hi, INTEGER, "slice bound")
            return d.ty
        if isinstance(e, A.Aggregate):
            if expected is None or expected.base != "array":
                self.error(e.loc, "aggregate requires an array context")
                self.expr(e.value)
                return None
            self.expect(e.value, expected.element, "aggregate component")
            return expected
        if isinstance(e, A.Unary):
            if e.op == "not":
                self.expect(e.operand, BOOLEAN, "operand of 'not'")
                return BOOLEAN
            t = self.expr(e.operand)
            if t is None:
                return None
            if not t.is_numeric:
                self.error(e.loc, f"type mismatch: unary '-' needs a numeric operand, got {t}")
                return None
            return t.base_type()
        if isinstance(e, A.Binary):
            return self.binary(e)
        raise TypeError(e)

    def binary(self, e: A.Binary):
        if e.op in ("and", "or"):
            self.expect(e.left, BOOLEAN, f"operand of '{e.op}'")
            self.expect(e.right, BOOLEAN, f"operand of '{e.op}'")
            return BOOLEAN
        lt = self.expr(e.left)
        rt = self.expr(e.right)
        if lt is None or rt is None:
            return None if e.op not in ("=", "/=", "<", "<=", ">", ">=") else BOOLEAN
        if e.op in ("=", "/="):
            if lt.base != rt.base or lt.base == "array":
                self.error(e.loc, f"type mismatch: cannot compare {lt} with {rt}")
            return BOOLEAN
        if e.op in ("<", "<=", ">", ">="):
            if lt.base != rt.base or not lt.is_numeric:
                self.error(e.loc, f"type mismatch: cannot order {lt} and {rt}")
            return BOOLEAN
        if not (lt.is_numeric and lt.base == rt.base):
            self.error(e.loc, f"type mismatch: operator '{e.op}' on {lt} and {rt}")
            return None
        if e.op == "rem" and lt.base != "integer":
            self.error(e.loc, "type mismatch: 'rem' needs integer operands")
            return None
        return lt.base_type()

    def lookup_object(self, name: str, loc: Loc):
        key = name.lower()
        if key in self.locals:
            return self.locals[key]
        if key in self.scope.objects:
            return self.scope.objects[key]
        if key in BUILTIN_CONSTANTS:
            return BUILTIN_CONSTANTS[key]
        self.error(loc, f"undefined name '{name}'")
        return None

    def name(self, e: A.Name):
        key = e.ident.lower()
        if key in self.locals or key in self.scope.objects or key in BUILTIN_CONSTANTS:
            d = self.lookup_object(e.ident, e.loc)
            e.ref = d
            return d.ty
        sub = self.scope.subprograms.get(key)
        if sub is not None:
            if sub.kind != "function":
                self.error(e.loc, f"procedure '{e.ident}' used in an expression")
                return None
            if sub.params:
                self.error(e.loc, f"'{sub.name}' expects {len(sub.params)} argument(s), got 0")
                return None
            e.ref = sub
            e.is_call = True
            return sub.ret_ty
        self.error(e.loc, f"undefined name '{e.ident}'")
        return None

    def attr(self, e: A.Attr):
        key = e.prefix.lower()
        if e.attr == "result":
            if self.sub is None or not self.in_post or key != self.sub.key or self.sub.kind != "function":
                self.error(e.loc, "'Result is only allowed in the postcondition of the enclosing function")
                return None
            e.ref = self.sub
            return self.sub.ret_ty
        if key in self.locals or key in self.scope.objects:
            d = self.lookup_object(e.prefix, e.loc)
            e.ref = d
            ty = d.ty
            if ty is None:
                return None
            if ty.base != "array":
                self.error(e.loc, f"attribute '{e.attr.title()}' needs an array object or a type")
                return None
            return INTEGER
        ty = self.scope.types.get(key) or BUILTIN_TYPES.get(key)
        if ty is None:
            self.error(e.loc, f"undefined name '{e.prefix}'")
            return None
        e.ref = ty
        if ty.base == "array":
            return INTEGER
        if e.attr == "length" or ty.base == "boolean":
            self.error(e.loc, f"attribute '{e.attr.title()}' is not defined for {ty}")
            return None
        return ty

    def apply(self, e: A.Apply):
        key = e.prefix.lower()
        if key in self.locals or key in self.scope.objects:
            d = self.lookup_object(e.prefix, e.loc)
            if d.ty is None:
                return None
            if d.ty.base != "array" or len(e.args) != 1:
                self.error(e.loc, f"'{e.prefix}' is not an array")
                return None
            e.kind = "index"
            e.ref = d
            self.expect(e.args[0], INTEGER, "index")
            return d.ty.element
        if key in BUILTIN_FUNCTIONS:
            f = BUILTIN_FUNCTIONS[key]
            e.kind = "call"
            e.ref = f
            if len(e.args) != len(f.params):
                self.error(e.loc, f"'{f.name}' expects {len(f.params)} argument(s), got {len(e.args)}")
                return None
            for a, pt in zip(e.args, f.params):
                self.expect(a, pt, f"argument of '{f.name}'")
            return f.ret
        sub = self.scope.subprograms.get(key)
        if sub is None:
            self.error(e.loc, f"undefined name '{e.prefix}'")
            for a in e.args:
                self.expr(a)
            return None
        if sub.kind != "function":
            self.error(e.loc, f"procedure '{e.prefix}' used in an expression")
            return None
        e.kind = "call"
        e.ref = sub
        self.check_args(sub, e.args, e.loc)
        return sub.ret_ty


def resolve(tree: A.Ast) -> tuple[ResolvedAst | None, list[Diagnostic]]:
    r = Resolver(tree)
    resolved = r.run()
    diags = sorted(set(r.diags))
    return (None if diags else resolved), diags
