"""GNAT-style dimensionality checking over resolved SVL programs.

A dimension is a vector of rational exponents over seven base dimensions.
Products add exponents, quotients subtract them; sums, differences and
comparisons require equal dimensions on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

BASE_DIMENSIONS = ("length", "mass", "time", "temperature", "current", "angle", "aux")


@dataclass(frozen=True)
class DimVector:
    exponents: tuple = (Fraction(0),) * 7

    def __post_init__(self) -> None:
        if len(self.exponents) != 7:
            raise ValueError("a dimension has exactly seven exponents")
        object.__setattr__(self, "exponents", tuple(Fraction(e) for e in self.exponents))

    @classmethod
    def of(cls, **exps) -> "DimVector":
        unknown = set(exps) - set(BASE_DIMENSIONS)
        if unknown:
            raise ValueError(f"unknown dimension(s): {', '.join(sorted(unknown))}")
        return cls(tuple(Fraction(exps.get(n, 0)) for n in BASE_DIMENSIONS))

    @classmethod
    def from_items(cls, items: Iterable[tuple]) -> "DimVector":
        exps = dict.fromkeys(BASE_DIMENSIONS, Fraction(0))
        for name, e in items:
            exps[name] += Fraction(e)
        return cls(tuple(exps[n] for n in BASE_DIMENSIONS))

    @property
    def is_dimensionless(self) -> bool:
        return not any(self.exponents)

    def __getitem__(self, name: str) -> Fraction:
        return self.exponents[BASE_DIMENSIONS.index(name)]

    def __mul__(self, other: "DimVector") -> "DimVector":
        return dim_mul(self, other)

    def __truediv__(self, other: "DimVector") -> "DimVector":
        return dim_div(self, other)

    def __pow__(self, k) -> "DimVector":
        return dim_pow(self, k)

    def items(self) -> list[tuple[str, Fraction]]:
        return [(n, e) for n, e in zip(BASE_DIMENSIONS, self.exponents) if e]

    def pretty(self) -> str:
        """``angle.time**(-1)``: positive exponents first, then negative ones."""
        if self.is_dimensionless:
            return "dimensionless"
        parts = [(n, e) for n, e in self.items() if e > 0] + [(n, e) for n, e in self.items() if e < 0]
        out = []
        for n, e in parts:
            if e == 1:
                out.append(n)
            elif e.denominator == 1 and e > 0:
                out.append(f"{n}**{e.numerator}")
            else:
                out.append(f"{n}**({e})")
        return ".".join(out)

    def __str__(self) -> str:
        return self.pretty()


DIMENSIONLESS = DimVector()


def dim_mul(a: DimVector, b: DimVector) -> DimVector:
    return DimVector(tuple(x + y for x, y in zip(a.exponents, b.exponents)))


def dim_div(a: DimVector, b: DimVector) -> DimVector:
    return DimVector(tuple(x - y for x, y in zip(a.exponents, b.exponents)))


def dim_pow(a: DimVector, k) -> DimVector:
    k = Fraction(k)
    return DimVector(tuple(x * k for x in a.exponents))


# -- checking over resolved programs ---------------------------------------

CONTEXTS = ("assignment", "operator", "argument", "return")


@dataclass(frozen=True, order=True)
class DimDiagnostic:
    loc: object  # frontend.source.Loc
    expected: DimVector
    actual: DimVector
    context: str

    def __post_init__(self) -> None:
        if self.expected == self.actual:
            raise ValueError("a dimension diagnostic needs differing dimensions")
        if self.context not in CONTEXTS:
            raise ValueError(f"unknown context {self.context!r}")

    @property
    def message(self) -> str:
        return f"dimension mismatch: expected {self.expected.pretty()}, got {self.actual.pretty()}"

    def render(self) -> str:
        return f"{self.loc}: {self.message}"


def _sort_key(d: DimDiagnostic):
    return (d.loc, d.context, d.expected.exponents, d.actual.exponents)


class _DimChecker:
    def __init__(self) -> None:
        self.out: list[DimDiagnostic] = []

    def report(self, loc, expected: DimVector, actual: DimVector, context: str) -> None:
        if expected != actual:
            self.out.append(DimDiagnostic(loc, expected, actual, context))

    def run(self, resolved) -> list[DimDiagnostic]:
        from .frontend import ast as A

        self.A = A
        for pkg in resolved.packages:
            for d in pkg.decls:
                if isinstance(d, A.ObjDecl):
                    self.init(d)
                elif isinstance(d, A.Subprogram):
                    self.subprogram(d)
        return sorted(self.out, key=_sort_key)

    def init(self, d) -> None:
        if d.init is not None and d.ty is not None:
            self.report(start_loc(d.init), _dim_of(d.ty), self.expr(d.init), "assignment")

    def subprogram(self, sub) -> None:
        for e in (sub.pre, sub.post):
            if e is not None:
                self.expr(e)
        for o in sub.locals or ():
            self.init(o)
        self.stmts(sub.body or (), sub)

    def stmts(self, body, sub) -> None:
        A = self.A
        for s in body:
            if isinstance(s, A.Assign):
                target = self.expr(s.target)
                self.report(start_loc(s.value), target, self.expr(s.value), "assignment")
            elif isinstance(s, A.If):
                self.expr(s.cond)
                self.stmts(s.then_body, sub)
                self.stmts(s.else_body or (), sub)
            elif isinstance(s, A.While):
                self.expr(s.cond)
                self.stmts(s.body, sub)
            elif isinstance(s, A.Return):
                if s.value is not None and sub.ret_ty is not None:
                    self.report(start_loc(s.value), sub.ret_ty.dim, self.expr(s.value), "return")
            elif isinstance(s, A.CallStmt):
                self.expr(s.call)
            elif isinstance(s, A.Pragma) and s.arg is not None:
                self.expr(s.arg)

    def args(self, params, args) -> None:
        for pty, a in zip(params, args):
            got = self.expr(a)
            if pty is not None:
                self.report(start_loc(a), _dim_of(pty), got, "argument")

    def expr(self, e) -> DimVector:
        A = self.A
        if isinstance(e, (A.IntLit, A.RealLit)):
            return DIMENSIONLESS
        if isinstance(e, A.Name):
            if e.is_call:
                return e.ref.ret_ty.dim if e.ref.ret_ty is not None else DIMENSIONLESS
            return _dim_of(e.ty) if e.ty is not None else DIMENSIONLESS
        if isinstance(e, A.Attr):
            return _dim_of(e.ty) if e.ty is not None else DIMENSIONLESS
        if isinstance(e, A.Apply):
            if e.kind == "index":
                self.expr(e.args[0])
                return _dim_of(e.ty) if e.ty is not None else DIMENSIONLESS
            ref = e.ref
            if ref is None:
                for a in e.args:
                    self.expr(a)
                return DIMENSIONLESS
            if isinstance(ref, A.Subprogram):
                self.args([p.ty for p in ref.params], e.args)
                return ref.ret_ty.dim if ref.ret_ty is not None else DIMENSIONLESS
            # built-in Sin: angle in, dimensionless out
            self.report(start_loc(e.args[0]), DimVector.of(angle=1), self.expr(e.args[0]), "argument")
            return DIMENSIONLESS
        if isinstance(e, A.Slice):
            self.expr(e.lo)
            self.expr(e.hi)
            return _dim_of(e.ty) if e.ty is not None else DIMENSIONLESS
        if isinstance(e, A.Aggregate):
            return self.expr(e.value)
        if isinstance(e, A.Unary):
            d = self.expr(e.operand)
            return DIMENSIONLESS if e.op == "not" else d
        if isinstance(e, A.Binary):
            left = self.expr(e.left)
            right = self.expr(e.right)
            if e.op in ("and", "or"):
                return DIMENSIONLESS
            if e.op == "*":
                return dim_mul(left, right)
            if e.op == "/":
                return dim_div(left, right)
            self.report(e.loc, left, right, "operator")
            if e.op in ("+", "-", "rem"):
                return left
            return DIMENSIONLESS
        return DIMENSIONLESS


def _dim_of(ty) -> DimVector:
    if ty.base == "array":
        return ty.element.dim
    return ty.dim


def start_loc(e):
    from .frontend.ast import start_loc as _start

    return _start(e)


def check_dims(resolved) -> list[DimDiagnostic]:
    """Dimension diagnostics for a resolved program, ordered by location."""
    return _DimChecker().run(resolved)
