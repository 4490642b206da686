"""Hash-consed terms for verification conditions.

Every term is interned, so structural equality is identity and hashing is
cheap. Integer operators are mathematical (unbounded); overflow is a
separate obligation. Float operators are binary32 with round-to-nearest-even.

Sorts are the strings ``int``, ``float``, ``bool`` and ``arr:<elem>``.
"""

from __future__ import annotations

import math
import struct
from typing import Callable, Iterable

INT, FLOAT, BOOL = "int", "float", "bool"

INT_OPS = {"+", "-", "*", "neg", "/", "rem"}
FLOAT_OPS = {"f+", "f-", "f*", "f/", "fneg", "fabs", "sin"}
REL_OPS = {"=", "<", "<="}
BOOL_OPS = {"and", "or", "not", "=>"}


def arr_sort(elem: str) -> str:
    return "arr:" + elem


def elem_sort(sort: str) -> str:
    if not sort.startswith("arr:"):
        raise ValueError(f"not an array sort: {sort}")
    return sort[4:]


def _value_key(v):
    if isinstance(v, float):
        return ("f", struct.pack(">f", v) if not math.isnan(v) else b"nan")
    if isinstance(v, bool):
        return ("b", v)
    return (type(v).__name__, v)


class Term:
    __slots__ = ("op", "args", "value", "sort", "_fv", "_size", "__weakref__")

    op: str
    args: tuple
    value: object
    sort: str

    def __repr__(self) -> str:
        return f"Term({to_str(self)})"

    def __str__(self) -> str:
        return to_str(self)

    def __reduce__(self):
        return (_rebuild, (self.op, self.args, self.value, self.sort))

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    @property
    def is_var(self) -> bool:
        return self.op == "var"

    @property
    def name(self) -> str:
        return self.value

    @property
    def size(self) -> int:
        return self._size


_TABLE: dict = {}


def _mk(op: str, args: tuple, value, sort: str) -> Term:
    key = (op, args, _value_key(value), sort)
    t = _TABLE.get(key)
    if t is None:
        t = object.__new__(Term)
        t.op, t.args, t.value, t.sort = op, args, value, sort
        t._fv = None
        t._size = 1 + sum(a._size for a in args)
        _TABLE[key] = t
    return t


def _rebuild(op, args, value, sort):
    return _mk(op, args, value, sort)


# -- constructors ----------------------------------------------------------

def var(name: str, sort: str) -> Term:
    return _mk("var", (), name, sort)


def const(value, sort: str) -> Term:
    if sort == INT:
        value = int(value)
    elif sort == FLOAT:
        value = float(value)
    elif sort == BOOL:
        value = bool(value)
    return _mk("const", (), value, sort)


def int_(n: int) -> Term:
    return _mk("const", (), int(n), INT)


def flt(x: float) -> Term:
    return _mk("const", (), float(x), FLOAT)


TRUE = _mk("const", (), True, BOOL)
FALSE = _mk("const", (), False, BOOL)


def boolc(b: bool) -> Term:
    return TRUE if b else FALSE


def op(name: str, *args: Term) -> Term:
    """Build an operator term; the sort is derived from the operator."""
    if name in INT_OPS:
        sort = INT
    elif name in FLOAT_OPS:
        sort = FLOAT
    elif name in REL_OPS or name in BOOL_OPS or name in ("is_finite", "def"):
        sort = BOOL
    elif name == "ite":
        sort = args[1].sort
    elif name == "select":
        sort = elem_sort(args[0].sort)
    elif name == "store":
        sort = args[0].sort
    else:
        raise ValueError(f"unknown operator {name!r}")
    return _mk(name, tuple(args), None, sort)


def app(func: str, args: Iterable[Term], sort: str) -> Term:
    """Application of an uninterpreted (contract-only) function."""
    return _mk("app", tuple(args), func, sort)


def const_array(value: Term, sort: str) -> Term:
    return _mk("constarr", (value,), None, sort)


def forall(bound: Iterable[Term], body: Term) -> Term:
    bound = tuple(bound)
    if not bound:
        return body
    return _mk("forall", (body,), bound, BOOL)


# boolean smart constructors fold constants and flatten

def and_(*parts: Term) -> Term:
    out: list[Term] = []
    for p in parts:
        if p is TRUE:
            continue
        if p is FALSE:
            return FALSE
        if p.op == "and":
            out.extend(p.args)
        else:
            out.append(p)
    out = list(dict.fromkeys(out))
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return _mk("and", tuple(out), None, BOOL)


def or_(*parts: Term) -> Term:
    out: list[Term] = []
    for p in parts:
        if p is FALSE:
            continue
        if p is TRUE:
            return TRUE
        if p.op == "or":
            out.extend(p.args)
        else:
            out.append(p)
    out = list(dict.fromkeys(out))
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return _mk("or", tuple(out), None, BOOL)


def not_(p: Term) -> Term:
    if p is TRUE:
        return FALSE
    if p is FALSE:
        return TRUE
    if p.op == "not":
        return p.args[0]
    return _mk("not", (p,), None, BOOL)


def implies(a: Term, b: Term) -> Term:
    if a is TRUE:
        return b
    if a is FALSE or b is TRUE:
        return TRUE
    return _mk("=>", (a, b), None, BOOL)


def ite(c: Term, a: Term, b: Term) -> Term:
    if c is TRUE or a is b:
        return a
    if c is FALSE:
        return b
    return _mk("ite", (c, a, b), None, a.sort)


def eq(a: Term, b: Term) -> Term:
    return op("=", a, b)


def ne(a: Term, b: Term) -> Term:
    return not_(op("=", a, b))


def lt(a: Term, b: Term) -> Term:
    return op("<", a, b)


def le(a: Term, b: Term) -> Term:
    return op("<=", a, b)


def gt(a: Term, b: Term) -> Term:
    return op("<", b, a)


def ge(a: Term, b: Term) -> Term:
    return op("<=", b, a)


def between(lo: Term, x: Term, hi: Term) -> Term:
    return and_(le(lo, x), le(x, hi))


def define(symbol: Term, value: Term) -> Term:
    """``symbol`` denotes exactly ``value`` (bitwise for floats)."""
    return op("def", symbol, value)


RELATION = {"=": eq, "/=": ne, "<": lt, "<=": le, ">": gt, ">=": ge}


# -- traversal -------------------------------------------------------------

def free_vars(t: Term) -> frozenset:
    fv = t._fv
    if fv is None:
        if t.op == "var":
            fv = frozenset((t,))
        elif t.op == "forall":
            fv = free_vars(t.args[0]) - frozenset(t.value)
        elif not t.args:
            fv = frozenset()
        elif len(t.args) == 1:
            fv = free_vars(t.args[0])
        else:
            fv = frozenset().union(*(free_vars(a) for a in t.args))
        t._fv = fv
    return fv


def apps(t: Term) -> list[Term]:
    """Uninterpreted applications occurring in ``t`` (outside binders), innermost first."""
    out: list[Term] = []
    seen: set = set()

    def walk(u: Term) -> None:
        if u in seen or u.op == "forall":
            return
        seen.add(u)
        for a in u.args:
            walk(a)
        if u.op == "app":
            out.append(u)

    walk(t)
    return out


def substitute(t: Term, mapping: dict, memo: dict | None = None) -> Term:
    if not mapping:
        return t
    if memo is None:
        memo = {}
    return _subst(t, mapping, memo)


def _subst(t: Term, mapping: dict, memo: dict) -> Term:
    r = memo.get(t)
    if r is not None:
        return r
    if t in mapping:
        r = mapping[t]
    elif not t.args or not (free_vars(t) & mapping.keys() if t.op != "forall" else True):
        r = t
    elif t.op == "forall":
        inner = {k: v for k, v in mapping.items() if k not in t.value}
        r = forall(t.value, substitute(t.args[0], inner))
    else:
        r = rebuild(t, tuple(_subst(a, mapping, memo) for a in t.args))
    memo[t] = r
    return r


def rebuild(t: Term, args: tuple) -> Term:
    """Same operator as ``t`` over new arguments (folding booleans)."""
    if args == t.args:
        return t
    o = t.op
    if o == "and":
        return and_(*args)
    if o == "or":
        return or_(*args)
    if o == "not":
        return not_(args[0])
    if o == "=>":
        return implies(*args)
    if o == "ite":
        return ite(*args)
    if o == "app":
        return app(t.value, args, t.sort)
    if o == "constarr":
        return const_array(args[0], t.sort)
    if o == "forall":
        return forall(t.value, args[0])
    return _mk(o, args, t.value, t.sort)


def map_terms(t: Term, fn: Callable[[Term], Term | None], memo: dict | None = None) -> Term:
    """Bottom-up rewrite: ``fn`` may return a replacement or None to keep."""
    if memo is None:
        memo = {}
    r = memo.get(t)
    if r is not None:
        return r
    u = rebuild(t, tuple(map_terms(a, fn, memo) for a in t.args)) if t.args and t.op != "forall" else t
    v = fn(u)
    r = u if v is None else v
    memo[t] = r
    return r


def conjuncts(t: Term) -> list[Term]:
    if t.op == "and":
        return list(t.args)
    if t is TRUE:
        return []
    return [t]


# -- printing --------------------------------------------------------------

_INFIX = {
    "+": "+", "-": "-", "*": "*", "/": "/", "rem": "rem",
    "f+": "+", "f-": "-", "f*": "*", "f/": "/",
    "=": "=", "<": "<", "<=": "<=", "=>": "->", "def": "==",
}
_PREC = {"or": 1, "and": 2, "=>": 0, "not": 3, "=": 4, "<": 4, "<=": 4, "def": 4,
         "+": 5, "-": 5, "f+": 5, "f-": 5, "*": 6, "/": 6, "rem": 6, "f*": 6, "f/": 6}


def _fmt_const(t: Term) -> str:
    v = t.value
    if t.sort == BOOL:
        return "True" if v else "False"
    if t.sort == FLOAT:
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "+Inf" if v > 0 else "-Inf"
        return repr(v)
    return str(v)


def to_str(t: Term, outer: int = -1) -> str:
    o = t.op
    if o == "const":
        return _fmt_const(t)
    if o == "var":
        return t.value
    if o in ("and", "or"):
        p = _PREC[o]
        s = f" {o} ".join(to_str(a, p) for a in t.args)
        return f"({s})" if p <= outer else s
    if o in _INFIX:
        p = _PREC[o]
        s = f"{to_str(t.args[0], p)} {_INFIX[o]} {to_str(t.args[1], p)}"
        return f"({s})" if p <= outer else s
    if o == "not":
        inner = t.args[0]
        if inner.op == "=":
            s = f"{to_str(inner.args[0], 4)} /= {to_str(inner.args[1], 4)}"
            return f"({s})" if 4 <= outer else s
        return f"not {to_str(inner, 3)}"
    if o in ("neg", "fneg"):
        return f"-{to_str(t.args[0], 7)}"
    if o == "ite":
        return f"(if {to_str(t.args[0])} then {to_str(t.args[1])} else {to_str(t.args[2])})"
    if o == "select":
        return f"{to_str(t.args[0], 8)}[{to_str(t.args[1])}]"
    if o == "store":
        return f"{to_str(t.args[0], 8)}[{to_str(t.args[1])} := {to_str(t.args[2])}]"
    if o == "constarr":
        return f"(others => {to_str(t.args[0])})"
    if o == "app":
        return f"{t.value}({', '.join(to_str(a) for a in t.args)})"
    if o == "forall":
        names = ", ".join(b.value for b in t.value)
        return f"(forall {names}. {to_str(t.args[0])})"
    return f"{o}({', '.join(to_str(a) for a in t.args)})"
