"""Reference interpreter with every language-defined check enabled.

The interpreter is the ground truth the prover is measured against: it
executes resolved subprograms on concrete values, raising the first
run-time fault in execution order. ``pragma Assume`` is checked like an
assertion and ``pragma Annotate`` is ignored.

The module also hosts the concrete evaluator for VC terms, used to replay
solver models.
"""

from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import floats
from . import logic as L
from .frontend import ast as A
from .frontend.resolver import Builtin, BuiltinFunction, ResolvedAst
from .frontend.source import Loc
from .semantics import (
    is_array_formal,
    needs_copy_back_check,
    needs_range_check,
    needs_validity_check,
    tracks_init,
    type_bounds,
)
from .target import DEFAULT_TARGET, TargetConfig

FAULT_KINDS = (
    "overflow", "range", "index", "division", "precondition", "postcondition",
    "assertion", "loop_invariant", "float_validity", "initialization",
)
DEFAULT_FUEL = 10**6
DEFAULT_ENUM_LIMIT = 65536


# -- values ----------------------------------------------------------------

class _Uninit:
    def __repr__(self) -> str:
        return "<uninitialized>"


UNINIT = _Uninit()


class _Unit:
    def __repr__(self) -> str:
        return "()"


UNIT = _Unit()


class ArrayValue:
    """A view on array storage: bounds ``first..last`` over shared elements.

    Slices and by-reference parameters share ``store``; ``init`` holds one
    initialization flag per stored element.
    """

    __slots__ = ("store", "init", "base", "first", "last")

    def __init__(self, store: list, init: list, base: int, first: int, last: int):
        self.store, self.init, self.base = store, init, base
        self.first, self.last = first, last

    @classmethod
    def filled(cls, first: int, last: int, value, initialized: bool = True) -> "ArrayValue":
        n = last - first + 1
        return cls([value] * n, [initialized] * n, first, first, last)

    @classmethod
    def of(cls, first: int, values: Iterable) -> "ArrayValue":
        vals = list(values)
        return cls(vals, [True] * len(vals), first, first, first + len(vals) - 1)

    @property
    def length(self) -> int:
        return max(0, self.last - self.first + 1)

    def get(self, i: int):
        return self.store[i - self.base]

    def set(self, i: int, v) -> None:
        self.store[i - self.base] = v
        self.init[i - self.base] = True

    def is_init(self, i: int) -> bool:
        return self.init[i - self.base]

    def elements(self) -> list:
        return [self.get(i) for i in range(self.first, self.last + 1)]

    def all_init(self) -> bool:
        return all(self.is_init(i) for i in range(self.first, self.last + 1))

    def slice(self, lo: int, hi: int) -> "ArrayValue":
        return ArrayValue(self.store, self.init, self.base, lo, hi)

    def copy(self) -> "ArrayValue":
        return ArrayValue.of(self.first, self.elements())

    def __eq__(self, other) -> bool:
        return isinstance(other, ArrayValue) and (self.first, self.last, self.elements()) == (
            other.first, other.last, other.elements())

    def __repr__(self) -> str:
        return f"ArrayValue({self.first}..{self.last}: {self.elements()})"


# -- outcomes --------------------------------------------------------------

@dataclass(frozen=True)
class RuntimeFault:
    kind: str
    loc: Loc
    values: tuple = ()  # ((name, value), ...)
    detail: str = ""

    def __post_init__(self) -> None:
        if self.kind not in FAULT_KINDS:
            raise ValueError(f"unknown fault kind {self.kind!r}")

    def value(self, name: str = "value"):
        return dict(self.values).get(name)

    def render(self) -> str:
        vals = ", ".join(f"{k} = {_show(v)}" for k, v in self.values)
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.loc}: {self.kind} fault{extra}" + (f": {vals}" if vals else "")


@dataclass(frozen=True)
class FuelExhausted:
    loc: Loc
    fuel: int

    def render(self) -> str:
        return f"{self.loc}: fuel exhausted after {self.fuel} statements"


@dataclass(frozen=True)
class MissingBody:
    """Execution reached a call to a subprogram declared without a body."""

    name: str
    loc: Loc

    def render(self) -> str:
        return f"{self.loc}: cannot execute '{self.name}': no body"


@dataclass
class Success:
    value: object
    outputs: dict = field(default_factory=dict)

    def render(self) -> str:
        return f"returned {_show(self.value)}"


def _show(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "True" if v else "False"
    return repr(v)


class _Fault(Exception):
    def __init__(self, fault: RuntimeFault):
        self.fault = fault


class _Stop(Exception):
    def __init__(self, outcome):
        self.outcome = outcome


class _Return(Exception):
    def __init__(self, value, loc: Loc):
        self.value = value
        self.loc = loc


class DomainTooLarge(ValueError):
    pass


# -- interpreter -----------------------------------------------------------

class Cell:
    __slots__ = ("value", "decl")

    def __init__(self, value, decl):
        self.value = value
        self.decl = decl


class Interpreter:
    """Executes subprograms of one resolved program.

    ``recorder``, when given, is called with ``(kind, loc)`` every time a
    check is executed; loop-invariant checks report ``loop_invariant_init``
    or ``loop_invariant_preserve`` and assumptions report ``assume``.
    """

    def __init__(self, program: ResolvedAst, target: TargetConfig = DEFAULT_TARGET,
                 fuel: int = DEFAULT_FUEL, recorder: Callable | None = None):
        self.program = program
        self.target = target
        self.fuel_limit = fuel
        self.recorder = recorder
        self.globals: dict = {}
        self._real_cache: dict = {}

    # -- entry points --------------------------------------------------

    def run(self, sub: A.Subprogram, args: list):
        self.fuel = self.fuel_limit
        if len(args) != len(sub.params):
            raise ValueError(f"{sub.name} expects {len(sub.params)} argument(s)")
        frame = {}
        for p, v in zip(sub.params, args):
            if p.mode == "out":
                if isinstance(v, ArrayValue):
                    v = ArrayValue.filled(v.first, v.last, 0, False)
                elif p.ty.base == "array":
                    v = ArrayValue.filled(p.ty.first, p.ty.last, _zero(p.ty.element), False)
                else:
                    v = UNINIT
            elif isinstance(v, ArrayValue):
                v = v.copy()
            frame[p.name.lower()] = Cell(v, p)
        try:
            if sub.pre is not None and not self.eval(sub.pre, frame):
                raise _Fault(RuntimeFault("precondition", sub.loc, _param_values(frame, sub), "entry"))
            value = self.execute(sub, frame)
        except _Fault as f:
            return f.fault
        except _Stop as s:
            return s.outcome
        outputs = {p.name: frame[p.name.lower()].value for p in sub.params if p.mode != "in"}
        return Success(value, outputs)

    # -- declarations and frames --------------------------------------

    def global_value(self, decl: A.ObjDecl):
        key = id(decl)
        if key not in self.globals:
            saved, self.recorder = self.recorder, None
            try:
                self.globals[key] = self.initial_value(decl, {})
            finally:
                self.recorder = saved
        return self.globals[key]

    def initial_value(self, decl: A.ObjDecl, frame: dict):
        ty = decl.ty
        if ty.base == "array":
            arr = ArrayValue.filled(ty.first, ty.last, _zero(ty.element), decl.init is not None)
            if decl.init is not None:
                self.assign_array(arr, decl.init, decl, frame, decl.loc)
            return arr
        if decl.init is None:
            return UNINIT
        v = self.eval(decl.init, frame)
        self.value_checks(ty, v, decl.loc)
        return v

    def execute(self, sub: A.Subprogram, frame: dict):
        frame["'sub"] = Cell(sub, None)
        for o in sub.locals or ():
            frame[o.name.lower()] = Cell(None, o)
            frame[o.name.lower()].value = self.initial_value(o, frame)
        try:
            self.block(sub.body, frame)
        except _Return as r:
            return r.value
        if sub.kind == "function":
            raise _Fault(RuntimeFault("postcondition", sub.end, (), "function ended without return"))
        self.check_post(sub, frame, None, sub.end)
        return UNIT

    def check_post(self, sub, frame, result, loc) -> None:
        if sub.post is None:
            return
        if result is not None:
            frame["'result"] = Cell(result, None)
        self.record("postcondition", loc)
        if not self.eval(sub.post, frame):
            vals = _param_values(frame, sub)
            if result is not None:
                vals += (("result", result),)
            raise _Fault(RuntimeFault("postcondition", loc, vals))

    # -- statements -----------------------------------------------------

    def block(self, stmts: list, frame: dict) -> None:
        for s in stmts:
            self.fuel -= 1
            if self.fuel < 0:
                raise _Stop(FuelExhausted(s.loc, self.fuel_limit))
            self.stmt(s, frame)

    def stmt(self, s, frame: dict, iteration: int = 0) -> None:
        if isinstance(s, A.Assign):
            self.assign(s, frame)
        elif isinstance(s, A.If):
            if self.eval(s.cond, frame):
                self.block(s.then_body, frame)
            elif s.else_body is not None:
                self.block(s.else_body, frame)
        elif isinstance(s, A.While):
            self.loop(s, frame)
        elif isinstance(s, A.Return):
            sub = self.current(frame)
            value = None
            if s.value is not None:
                value = self.eval(s.value, frame)
                self.value_checks(sub.ret_ty, value, s.loc)
            self.check_post(sub, frame, value, s.loc)
            raise _Return(UNIT if value is None else value, s.loc)
        elif isinstance(s, A.CallStmt):
            c = s.call
            self.call(c.ref, [] if isinstance(c, A.Name) else c.args, c.loc, frame)
        elif isinstance(s, A.Pragma):
            self.pragma(s, frame, iteration)
        else:
            raise TypeError(s)

    def current(self, frame: dict) -> A.Subprogram:
        return frame["'sub"].value

    def pragma(self, s: A.Pragma, frame: dict, iteration: int) -> None:
        if s.name == "annotate":
            return
        if s.name == "loop_invariant":
            which = "init" if iteration == 0 else "preserve"
            self.record(f"loop_invariant_{which}", s.loc)
            if not self.eval(s.arg, frame):
                raise _Fault(RuntimeFault("loop_invariant", s.loc, (), which))
            return
        self.record("assume" if s.name == "assume" else "assertion", s.loc)
        if not self.eval(s.arg, frame):
            raise _Fault(RuntimeFault("assertion", s.loc, (), f"pragma {s.name}"))

    def loop(self, s: A.While, frame: dict) -> None:
        iteration = 0
        while self.eval(s.cond, frame):
            for st in s.body:
                self.fuel -= 1
                if self.fuel < 0:
                    raise _Stop(FuelExhausted(st.loc, self.fuel_limit))
                if isinstance(st, A.Pragma):
                    self.pragma(st, frame, iteration)
                else:
                    self.stmt(st, frame)
            iteration += 1
            self.fuel -= 1
            if self.fuel < 0:
                raise _Stop(FuelExhausted(s.loc, self.fuel_limit))

    def assign(self, s: A.Assign, frame: dict) -> None:
        t = s.target
        if isinstance(t, A.Name):
            cell = frame[t.ident.lower()]
            if t.ty.base == "array":
                self.assign_array(cell.value, s.value, cell.decl, frame, s.loc)
                return
            v = self.eval(s.value, frame)
            self.value_checks(t.ty, v, s.loc)
            cell.value = v
            return
        cell = frame[t.prefix.lower()]
        arr = cell.value
        if isinstance(t, A.Apply):
            i = self.eval(t.args[0], frame)
            self.index_check(arr, i, t.loc)
            v = self.eval(s.value, frame)
            self.value_checks(t.ty, v, s.loc)
            arr.set(i, v)
            return
        lo = self.eval(t.lo, frame)
        hi = self.eval(t.hi, frame)
        self.slice_check(arr, lo, hi, t.loc)
        self.assign_array(arr.slice(lo, hi), s.value, None, frame, s.loc)

    def assign_array(self, dest: ArrayValue, value, decl, frame: dict, loc: Loc) -> None:
        elem_ty = value.ty.element
        if isinstance(value, A.Aggregate):
            v = self.eval(value.value, frame)
            self.value_checks(elem_ty, v, loc)
            if decl is not None and is_array_formal(decl):
                # the aggregate takes the bounds of the object it initializes
                self.record("initialization", loc)
            for i in range(dest.first, dest.last + 1):
                dest.set(i, v)
            return
        src = self.eval_array(value, frame)
        self.record("range", loc)
        if src.length != dest.length:
            raise _Fault(RuntimeFault("range", loc, (("target length", dest.length), ("source length", src.length)),
                                      "array length mismatch"))
        vals = src.elements()
        for k, i in enumerate(range(dest.first, dest.last + 1)):
            dest.set(i, vals[k])

    # -- checks ---------------------------------------------------------

    def record(self, kind: str, loc: Loc) -> None:
        if self.recorder is not None:
            self.recorder(kind, loc)

    def value_checks(self, ty, v, loc: Loc) -> None:
        if needs_range_check(ty, self.target):
            self.record("range", loc)
            lo, hi = type_bounds(ty, self.target)
            if not (lo <= v <= hi):
                raise _Fault(RuntimeFault("range", loc, (("value", v),), f"not in {ty.name}"))
        if needs_validity_check(ty):
            self.record("float_validity", loc)
            if not floats.is_valid(v, self.target.supports_denorm):
                raise _Fault(RuntimeFault("float_validity", loc, (("value", v),), floats.classify(v)))

    def index_check(self, arr: ArrayValue, i: int, loc: Loc) -> None:
        self.record("index", loc)
        if not (arr.first <= i <= arr.last):
            raise _Fault(RuntimeFault("index", loc, (("index", i), ("first", arr.first), ("last", arr.last))))

    def slice_check(self, arr: ArrayValue, lo: int, hi: int, loc: Loc) -> None:
        self.record("index", loc)
        if lo <= hi and not (arr.first <= lo and hi <= arr.last):
            raise _Fault(RuntimeFault("index", loc, (("low", lo), ("high", hi), ("first", arr.first),
                                                     ("last", arr.last))))

    def init_check(self, decl, ok: bool, loc: Loc, name: str) -> None:
        if tracks_init(decl):
            self.record("initialization", loc)
            if not ok:
                raise _Fault(RuntimeFault("initialization", loc, (), f"'{name}' read before assignment"))

    def overflow(self, v: int, loc: Loc, operands: tuple) -> int:
        self.record("overflow", loc)
        if not (self.target.int_first <= v <= self.target.int_last):
            raise _Fault(RuntimeFault("overflow", loc, operands + (("result", v),)))
        return v

    def float_overflow(self, v: float, loc: Loc, operands: tuple) -> float:
        self.record("overflow", loc)
        if math.isinf(v) or math.isnan(v):
            raise _Fault(RuntimeFault("overflow", loc, operands + (("result", v),)))
        return v

    # -- calls ----------------------------------------------------------

    def call(self, sub, args: list, loc: Loc, frame: dict):
        if isinstance(sub, BuiltinFunction):
            x = self.eval(args[0], frame)
            return floats.sin(x)
        callee: dict = {}
        copy_back = []
        for p, a in zip(sub.params, args):
            key = p.name.lower()
            if p.ty.base == "array":
                view = self.eval_array(a, frame, read=p.mode != "out")
                if p.mode == "out":
                    own = ArrayValue(view.store, [False] * len(view.init), view.base, view.first, view.last)
                    callee[key] = Cell(own, p)
                    copy_back.append((own, view))
                else:
                    callee[key] = Cell(view, p)
                continue
            if p.mode == "out":
                callee[key] = Cell(UNINIT, p)
            else:
                v = self.eval(a, frame)
                self.value_checks(p.ty, v, A.start_loc(a))
                callee[key] = Cell(v, p)
            if p.mode != "in":
                copy_back.append((key, a, p))
        callee["'sub"] = Cell(sub, None)
        if sub.pre is not None:
            self.record("precondition", loc)
            if not self.eval(sub.pre, callee):
                    raise _Fault(RuntimeFault("precondition", loc, _param_values(callee, sub), f"call to {sub.name}"))
        if sub.body is None:
            raise _Stop(MissingBody(sub.name, loc))
        result = self.execute(sub, callee)
        for item in copy_back:
            if isinstance(item[0], ArrayValue):
                own, view = item
                for i in range(view.first, view.last + 1):
                    if own.is_init(i):
                        view.init[i - view.base] = True
                continue
            key, a, p = item
            v = callee[key].value
            cell = frame[a.ident.lower()]
            if needs_copy_back_check(cell.decl.ty, p.ty, self.target):
                self.record("range", A.start_loc(a))
                lo, hi = type_bounds(cell.decl.ty, self.target)
                if v is not UNINIT and not (lo <= v <= hi):
                    raise _Fault(RuntimeFault("range", A.start_loc(a), (("value", v),), "copy back"))
            cell.value = v
        return result

    # -- expressions ----------------------------------------------------

    def lookup(self, e, frame: dict):
        ref = e.ref
        if isinstance(ref, Builtin):
            return ref.value, None
        if isinstance(ref, A.ObjDecl) and ref.is_global:
            return self.global_value(ref), ref
        cell = frame[ref.name.lower()]
        return cell.value, cell.decl

    def eval_array(self, e, frame: dict, read: bool = True) -> ArrayValue:
        if isinstance(e, A.Name):
            arr, decl = self.lookup(e, frame)
            if read:
                self.init_check(decl, arr.all_init(), e.loc, e.ident)
            return arr
        if isinstance(e, A.Slice):
            arr, decl = self.lookup(e, frame)
            lo = self.eval(e.lo, frame)
            hi = self.eval(e.hi, frame)
            self.slice_check(arr, lo, hi, e.loc)
            view = arr.slice(lo, hi)
            if read:
                self.init_check(decl, view.all_init(), e.loc, e.prefix)
            return view
        raise TypeError(f"not an array expression: {e}")

    def eval(self, e, frame: dict):
        method = _DISPATCH[type(e)]
        return method(self, e, frame)

    def _int(self, e, frame):
        return e.value

    def _real(self, e, frame):
        v = self._real_cache.get(e.value)
        if v is None:
            v = self._real_cache[e.value] = floats.to_f32(e.value)
        return v

    def _name(self, e: A.Name, frame):
        if e.is_call:
            return self.call(e.ref, [], e.loc, frame)
        v, decl = self.lookup(e, frame)
        if isinstance(v, ArrayValue):
            return v
        self.init_check(decl, v is not UNINIT, e.loc, e.ident)
        return v

    def _attr(self, e: A.Attr, frame):
        if e.attr == "result":
            return frame["'result"].value
        ref = e.ref
        if isinstance(ref, (A.ObjDecl, A.Param)):
            arr, _ = self.lookup(e, frame)
            return {"first": arr.first, "last": arr.last, "length": arr.length}[e.attr]
        ty = ref
        if ty.base == "array":
            return {"first": ty.first, "last": ty.last, "length": ty.length}[e.attr]
        lo, hi = type_bounds(ty, self.target)
        return lo if e.attr == "first" else hi

    def _apply(self, e: A.Apply, frame):
        if e.kind == "call":
            return self.call(e.ref, e.args, e.loc, frame)
        arr, decl = self.lookup(e, frame)
        i = self.eval(e.args[0], frame)
        self.index_check(arr, i, e.loc)
        self.init_check(decl, arr.is_init(i), e.loc, e.prefix)
        return arr.get(i)

    def _slice(self, e: A.Slice, frame):
        return self.eval_array(e, frame)

    def _unary(self, e: A.Unary, frame):
        v = self.eval(e.operand, frame)
        if e.op == "not":
            return not v
        if isinstance(v, float):
            return -v
        return self.overflow(-v, e.loc, (("operand", v),))

    def _binary(self, e: A.Binary, frame):
        o = e.op
        a = self.eval(e.left, frame)
        b = self.eval(e.right, frame)
        if o == "and":
            return a and b
        if o == "or":
            return a or b
        if o in _REL:
            return _REL[o](a, b)
        operands = (("left", a), ("right", b))
        if isinstance(a, float):
            if o == "/":
                self.record("division", e.loc)
                if b == 0:
                    raise _Fault(RuntimeFault("division", e.loc, operands))
            r = _FLOAT_OP[o](a, b)
            return self.float_overflow(r, e.loc, operands)
        if o in ("/", "rem"):
            self.record("division", e.loc)
            if b == 0:
                raise _Fault(RuntimeFault("division", e.loc, operands))
            if o == "rem":
                return int_rem(a, b)
            return self.overflow(int_div(a, b), e.loc, operands)
        r = a + b if o == "+" else a - b if o == "-" else a * b
        return self.overflow(r, e.loc, operands)


_REL = {
    "=": lambda a, b: a == b,
    "/=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}
_FLOAT_OP = {"+": floats.add, "-": floats.sub, "*": floats.mul, "/": floats.div}

_DISPATCH = {
    A.IntLit: Interpreter._int,
    A.RealLit: Interpreter._real,
    A.Name: Interpreter._name,
    A.Attr: Interpreter._attr,
    A.Apply: Interpreter._apply,
    A.Slice: Interpreter._slice,
    A.Unary: Interpreter._unary,
    A.Binary: Interpreter._binary,
}


def int_div(a: int, b: int) -> int:
    """Integer division truncating toward zero."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def int_rem(a: int, b: int) -> int:
    """Remainder with the sign of the dividend."""
    return a - b * int_div(a, b)


def _zero(ty):
    return {"integer": 0, "float": 0.0, "boolean": False}[ty.base]


def _param_values(frame: dict, sub) -> tuple:
    out = []
    for p in sub.params:
        cell = frame.get(p.name.lower())
        if cell is not None and cell.value is not UNINIT:
            out.append((p.name, cell.value))
    return tuple(out)


# -- public API ------------------------------------------------------------

def run(program: ResolvedAst, sub: A.Subprogram, args: list, target: TargetConfig = DEFAULT_TARGET,
        fuel: int = DEFAULT_FUEL, recorder: Callable | None = None):
    """Execute ``sub`` on ``args``: Success, RuntimeFault, FuelExhausted or MissingBody."""
    return Interpreter(program, target, fuel, recorder).run(sub, args)


def default_domain(ty, target: TargetConfig, limit: int = DEFAULT_ENUM_LIMIT) -> list:
    """All values of a small scalar subtype."""
    if ty.base == "boolean":
        return [False, True]
    if ty.base == "integer":
        lo, hi = type_bounds(ty, target)
        if hi - lo + 1 > limit:
            raise DomainTooLarge(f"domain of {ty.name} has {hi - lo + 1} values")
        return list(range(lo, hi + 1))
    raise DomainTooLarge(f"no finite default domain for {ty.name}")


def enumerate_runs(program: ResolvedAst, sub: A.Subprogram, domains: dict | None = None,
                   target: TargetConfig = DEFAULT_TARGET, limit: int = DEFAULT_ENUM_LIMIT,
                   fuel: int = DEFAULT_FUEL, recorder: Callable | None = None) -> list:
    """Run ``sub`` on every tuple of the product of parameter domains.

    Domains default to the full range of each parameter's subtype. Output is
    in lexicographic order of argument tuples.
    """
    domains = dict(domains or {})
    lists = []
    total = 1
    for p in sub.params:
        if p.mode == "out":
            dom = [ArrayValue.filled(p.ty.first, p.ty.last, _zero(p.ty.element), False)] \
                if p.ty.base == "array" else [UNINIT]
        elif p.name in domains or p.name.lower() in domains:
            dom = sorted(domains.get(p.name, domains.get(p.name.lower())), key=_order_key)
        else:
            dom = default_domain(p.ty, target, limit)
        lists.append(dom)
        total *= len(dom)
        if total > limit:
            raise DomainTooLarge(f"{total} argument tuples exceed the limit of {limit}")
    interp = Interpreter(program, target, fuel, recorder)
    out = []
    for args in itertools.product(*lists):
        out.append((args, interp.run(sub, list(args))))
    return out


def _order_key(v):
    if isinstance(v, ArrayValue):
        return (v.first, v.elements())
    return v


def is_fault(outcome) -> bool:
    return isinstance(outcome, RuntimeFault)


# -- concrete evaluation of terms ------------------------------------------

class EvalError(Exception):
    pass


@dataclass(frozen=True)
class FArray:
    """A total functional array: ``default`` everywhere except ``entries``."""

    default: object
    entries: tuple = ()  # sorted ((index, value), ...)

    def get(self, i):
        for k, v in self.entries:
            if k == i:
                return v
        return self.default

    def store(self, i, v) -> "FArray":
        d = dict(self.entries)
        d[i] = v
        return FArray(self.default, tuple(sorted(d.items())))


def _bits(v) -> object:
    if isinstance(v, float):
        return b"nan" if math.isnan(v) else struct.pack(">f", v)
    return v


def eval_term(t: L.Term, model: dict, memo: dict | None = None):
    """Evaluate a term under ``model`` (maps var and app terms to values).

    Universally quantified axioms are checked at every instance whose
    application appears in the model.
    """
    if memo is None:
        memo = {}
    return _ev(t, model, memo)


def _ev(t: L.Term, model: dict, memo: dict):
    if t in memo:
        return memo[t]
    o = t.op
    if o == "const":
        r = t.value
    elif o == "var":
        if t not in model:
            raise EvalError(f"no value for {t.value}")
        r = model[t]
    elif o == "app":
        for a in t.args:
            _ev(a, model, memo)
        if t in model:
            r = model[t]
        else:
            r = _app_by_args(t, model, memo)
    elif o == "forall":
        r = _ev_forall(t, model, memo)
    elif o == "ite":
        r = _ev(t.args[1], model, memo) if _ev(t.args[0], model, memo) else _ev(t.args[2], model, memo)
    elif o == "and":
        r = all(_ev(a, model, memo) for a in t.args)
    elif o == "or":
        r = any(_ev(a, model, memo) for a in t.args)
    elif o == "=>":
        r = (not _ev(t.args[0], model, memo)) or _ev(t.args[1], model, memo)
    else:
        args = [_ev(a, model, memo) for a in t.args]
        r = _apply_op(o, args)
    memo[t] = r
    return r


def _app_by_args(t: L.Term, model: dict, memo: dict):
    """Value of an application from any model entry with equal arguments."""
    want = [_bits(_ev(a, model, memo)) for a in t.args]
    for k, v in model.items():
        if isinstance(k, L.Term) and k.op == "app" and k.value == t.value and len(k.args) == len(t.args):
            try:
                got = [_bits(_ev(a, model, memo)) for a in k.args]
            except EvalError:
                continue
            if got == want:
                return v
    raise EvalError(f"no value for {L.to_str(t)}")


def _ev_forall(t: L.Term, model: dict, memo: dict) -> bool:
    bound = t.value
    body = t.args[0]
    funcs = {a.value for a in L.apps(body)}
    for k in list(model):
        if not (isinstance(k, L.Term) and k.op == "app" and k.value in funcs and len(k.args) == len(bound)):
            continue
        try:
            vals = [_ev(a, model, memo) for a in k.args]
        except EvalError:
            continue
        inner = dict(model)
        inner.update(zip(bound, vals))
        if not eval_term(body, inner):
            return False
    return True


def _apply_op(o: str, args: list):
    if o == "+":
        return args[0] + args[1]
    if o == "-":
        return args[0] - args[1]
    if o == "*":
        return args[0] * args[1]
    if o == "neg":
        return -args[0]
    if o == "/":
        return int_div(args[0], args[1]) if args[1] != 0 else 0
    if o == "rem":
        return int_rem(args[0], args[1]) if args[1] != 0 else 0
    if o == "f+":
        return floats.add(*args)
    if o == "f-":
        return floats.sub(*args)
    if o == "f*":
        return floats.mul(*args)
    if o == "f/":
        return floats.div(*args)
    if o == "fneg":
        return -args[0]
    if o == "fabs":
        return abs(args[0])
    if o == "sin":
        return floats.sin(args[0])
    if o == "=":
        return args[0] == args[1]
    if o == "<":
        return args[0] < args[1]
    if o == "<=":
        return args[0] <= args[1]
    if o == "not":
        return not args[0]
    if o == "is_finite":
        return math.isfinite(args[0])
    if o == "def":
        return _bits(args[0]) == _bits(args[1]) if not isinstance(args[0], FArray) else args[0] == args[1]
    if o == "select":
        return args[0].get(args[1])
    if o == "store":
        return args[0].store(args[1], args[2])
    if o == "constarr":
        return FArray(args[0])
    raise EvalError(f"cannot evaluate operator {o!r}")
