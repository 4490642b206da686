"""A small decision procedure for the VC logic.

``check_sat`` decides a conjunction of formulas. It substitutes symbol
definitions, simplifies, propagates intervals (integers exactly, binary32
floats with outward rounding), splits on disjunctions and finally searches
for a model. A model is only reported after the term evaluator confirms it
on the formulas, so ``sat`` answers are never spurious with respect to the
logic. ``unsat`` comes from interval contradictions, exhausted case splits
or exhaustive enumeration of small domains.

Universally quantified function axioms are used in two ways: instantiated
at the applications occurring in the problem, and probed at boundary
values of their bound variables. A probe that falsifies an axiom makes the
whole hypothesis set inconsistent, which is how a contract-based prover
ends up proving anything from a contradictory postcondition.

Step accounting: one step for setting up, one per narrowing that changes a
domain, one per case-split branch, one per leaf and one per candidate value
tried during model search. The algorithm
does not depend on the budget except for where it stops, so a larger
budget never turns a verdict into ``unknown``.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field, replace

from . import floats
from . import logic as L
from .oracle import EvalError, FArray, eval_term, int_div, int_rem

DEFAULT_ENUM_LIMIT = 65536
MAX_SEARCH_NODES = 20000
MAX_ROUNDS = 40
INSTANTIATION_ROUNDS = 2
PROBE_LIMIT = 343


@dataclass(frozen=True)
class Budget:
    steps: int = 1000
    wall_time: float = 5.0  # seconds

    def __post_init__(self):
        if self.steps <= 0 or self.wall_time <= 0:
            raise ValueError("budget steps and wall time must be positive")


@dataclass(frozen=True)
class ProofStatus:
    state: str  # proved | failed | unknown
    reason: str | None = None  # stepout | timeout | incomplete, for unknown
    counterexample: tuple | None = None  # ((name, value), ...)
    steps: int = 0
    model: dict | None = field(default=None, compare=False, repr=False)
    spurious_possible: bool = False

    def label(self) -> str:
        return f"unknown({self.reason})" if self.state == "unknown" else self.state

    @property
    def proved(self) -> bool:
        return self.state == "proved"

    def render_counterexample(self) -> str:
        if not self.counterexample:
            return ""
        return ", ".join(f"{k} = {_show(v)}" for k, v in self.counterexample)


@dataclass
class SatResult:
    status: str  # sat | unsat | unknown
    model: dict | None = None  # var Term -> value
    steps: int = 0
    reason: str | None = None
    refuted_axiom: L.Term | None = None


def _show(v) -> str:
    if isinstance(v, bool):
        return "True" if v else "False"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, FArray):
        return "(" + ", ".join(f"{i} => {_show(x)}" for i, x in v.entries) + f", others => {_show(v.default)})"
    return str(v)


class _Stop(Exception):
    def __init__(self, reason: str):
        self.reason = reason


class _Empty(Exception):
    pass


class _GiveUp(Exception):
    pass


# -- definitions and simplification ------------------------------------------

def _definition(f: L.Term):
    """(symbol, value) if ``f`` defines a symbol, possibly under guards."""
    while f.op == "=>":
        f = f.args[1]
    if f.op == "def" and f.args[0].is_var:
        return f.args[0], f.args[1]
    return None


def _equation(f: L.Term):
    """Top-level ``symbol = constant`` for integer and boolean symbols."""
    if f.op == "=" and f.args[0].sort in (L.INT, L.BOOL):
        a, b = f.args
        if a.is_var and b.is_const:
            return a, b
        if b.is_var and a.is_const:
            return b, a
    return None


def eliminate_definitions(formulas: list) -> tuple[list, dict]:
    """Substitute defined symbols away; returns remaining formulas and the definitions."""
    defs: dict = {}
    rest = []
    for f in formulas:
        d = _definition(f) or _equation(f)
        if d is not None and d[0] not in defs and d[0] not in L.free_vars(d[1]):
            defs[d[0]] = d[1]
        else:
            rest.append(f)
    resolved: dict = {}
    memo: dict = {}
    for sym, value in defs.items():
        v = L.substitute(value, resolved, {}) if resolved else value
        resolved[sym] = v
    # definitions may refer to symbols defined later in the list
    for _ in range(len(resolved)):
        pending = [s for s, v in resolved.items() if L.free_vars(v) & resolved.keys()]
        if not pending:
            break
        for s in pending:
            resolved[s] = L.substitute(resolved[s], resolved, {})
    cyclic = {s for s, v in resolved.items() if L.free_vars(v) & resolved.keys()}
    for s in cyclic:
        rest.append(L.define(s, defs[s]))
        del resolved[s]
    out = [L.substitute(f, resolved, memo) for f in rest]
    return out, resolved


_FOLD_FLOAT = {"f+": floats.add, "f-": floats.sub, "f*": floats.mul, "f/": floats.div}


def simplify(t: L.Term, memo: dict | None = None) -> L.Term:
    """Constant folding and local rewriting; ``sin`` is never evaluated."""
    return L.map_terms(t, _simp_node, memo if memo is not None else {})


def _simp_node(t: L.Term):
    o = t.op
    args = t.args
    if o in ("var", "const", "forall", "app"):
        return None
    consts = all(a.is_const for a in args)
    if o == "select":
        arr, i = args
        while True:
            if arr.op == "constarr":
                return arr.args[0]
            if arr.op == "store":
                j = arr.args[1]
                if j is i:
                    return arr.args[2]
                if j.is_const and i.is_const:
                    arr = arr.args[0]
                    continue
                return L.ite(L.eq(j, i), arr.args[2], _simp_node(L.op("select", arr.args[0], i)) or
                             L.op("select", arr.args[0], i))
            if arr.op == "ite":
                a1 = L.op("select", arr.args[1], i)
                a2 = L.op("select", arr.args[2], i)
                return L.ite(arr.args[0], _simp_node(a1) or a1, _simp_node(a2) or a2)
            break
        return L.op("select", arr, i) if arr is not args[0] else None
    if o == "ite":
        return None  # the smart constructor already folded it
    if o in ("+", "-", "*"):
        a, b = args
        if consts:
            return L.int_({"+": a.value + b.value, "-": a.value - b.value, "*": a.value * b.value}[o])
        if o == "+" and a.is_const and a.value == 0:
            return b
        if o in ("+", "-") and b.is_const and b.value == 0:
            return a
        if o == "*" and ((a.is_const and a.value == 0) or (b.is_const and b.value == 0)):
            return L.int_(0)
        if o == "*" and a.is_const and a.value == 1:
            return b
        if o == "*" and b.is_const and b.value == 1:
            return a
        if o == "-" and a is b:
            return L.int_(0)
        return None
    if o == "neg":
        return L.int_(-args[0].value) if consts else None
    if o == "/" and consts:
        return L.int_(int_div(args[0].value, args[1].value) if args[1].value else 0)
    if o == "rem" and consts:
        return L.int_(int_rem(args[0].value, args[1].value) if args[1].value else 0)
    if o in _FOLD_FLOAT and consts:
        return L.flt(_FOLD_FLOAT[o](args[0].value, args[1].value))
    if o == "fneg" and consts:
        return L.flt(-args[0].value)
    if o == "fabs" and consts:
        return L.flt(abs(args[0].value))
    if o == "is_finite" and consts:
        return L.boolc(math.isfinite(args[0].value))
    if o in ("=", "<", "<="):
        a, b = args
        if consts:
            return L.boolc({"=": a.value == b.value, "<": a.value < b.value, "<=": a.value <= b.value}[o])
        if a is b and a.sort != L.FLOAT:
            return L.boolc(o != "<")
        if a.sort == L.BOOL and o == "=":
            if b.is_const:
                return a if b.value else L.not_(a)
            if a.is_const:
                return b if a.value else L.not_(b)
        return None
    if o == "def":
        a, b = args
        if a is b:
            return L.TRUE
        if consts:
            return L.boolc(_bits(a.value) == _bits(b.value))
        return None
    return None


def _bits(v):
    import struct

    if isinstance(v, float):
        return b"nan" if math.isnan(v) else struct.pack(">f", v)
    return v


def nnf(t: L.Term, positive: bool = True) -> L.Term:
    """Negation normal form over and/or; relations and atoms are kept as literals."""
    o = t.op
    if o == "not":
        return nnf(t.args[0], not positive)
    if o in ("and", "or"):
        parts = [nnf(a, positive) for a in t.args]
        use_and = (o == "and") == positive
        return L.and_(*parts) if use_and else L.or_(*parts)
    if o == "=>":
        a, b = t.args
        if positive:
            return L.or_(nnf(a, False), nnf(b, True))
        return L.and_(nnf(a, True), nnf(b, False))
    if o == "ite" and t.sort == L.BOOL:
        c, a, b = t.args
        if positive:
            return L.or_(L.and_(nnf(c), nnf(a)), L.and_(nnf(c, False), nnf(b)))
        return L.or_(L.and_(nnf(c), nnf(a, False)), L.and_(nnf(c, False), nnf(b, False)))
    if o == "const":
        return t if positive else L.not_(t)
    if not positive:
        if o in ("<", "<=") and t.args[0].sort == L.INT:
            a, b = t.args
            return L.le(b, a) if o == "<" else L.lt(b, a)
        return L.not_(t)
    return t


# -- intervals ---------------------------------------------------------------

@dataclass(frozen=True)
class FIv:
    lo: float
    hi: float
    nan: bool

    @property
    def empty(self) -> bool:
        return self.lo > self.hi and not self.nan

    @property
    def has_num(self) -> bool:
        return self.lo <= self.hi


FULL_FLOAT = FIv(-math.inf, math.inf, True)
BOOL_ANY = (True, True)


def _rd(x: float) -> float:
    if math.isnan(x):
        return -math.inf
    return floats.round_down(math.nextafter(x, -math.inf)) if math.isfinite(x) else x


def _ru(x: float) -> float:
    if math.isnan(x):
        return math.inf
    return floats.round_up(math.nextafter(x, math.inf)) if math.isfinite(x) else x


def _fmul(a: float, b: float) -> float:
    if (a == 0 and math.isinf(b)) or (b == 0 and math.isinf(a)):
        return 0.0
    return a * b


class Engine:
    """Interval domains for one branch of the search."""

    def __init__(self, int_lo: int, int_hi: int, doms: dict | None = None, shapes: dict | None = None):
        self.int_lo = int_lo
        self.int_hi = int_hi
        self.doms: dict = dict(doms) if doms else {}
        # bounds on linear combinations of two or more atoms, keyed by their coefficients
        self.shapes: dict = dict(shapes) if shapes else {}
        self.memo: dict = {}

    def copy(self) -> "Engine":
        return Engine(self.int_lo, self.int_hi, self.doms, self.shapes)

    # forward evaluation

    def iv(self, t: L.Term):
        r = self.memo.get(t)
        if r is None:
            r = self._iv(t)
            d = self.doms.get(t)
            if d is not None:
                r = self._meet(t.sort, r, d)
            self.memo[t] = r
        return r

    def default(self, sort: str):
        if sort == L.INT:
            return (self.int_lo, self.int_hi)
        if sort == L.FLOAT:
            return FULL_FLOAT
        return BOOL_ANY

    def _meet(self, sort: str, a, b):
        if sort == L.INT:
            return (max(a[0], b[0]), min(a[1], b[1]))
        if sort == L.FLOAT:
            return FIv(max(a.lo, b.lo), min(a.hi, b.hi), a.nan and b.nan)
        if sort == L.BOOL:
            return (a[0] and b[0], a[1] and b[1])
        return a

    def _iv(self, t: L.Term):
        o = t.op
        s = t.sort
        if o == "const":
            v = t.value
            if s == L.INT:
                return (v, v)
            if s == L.FLOAT:
                return FIv(1.0, 0.0, True) if math.isnan(v) else FIv(v, v, False)
            if s == L.BOOL:
                return (not v, v)
            return None
        if o in ("var", "app", "select") or s not in (L.INT, L.FLOAT, L.BOOL):
            return self.default(s)
        a = t.args
        if s == L.INT:
            return self._int_op(o, a)
        if s == L.FLOAT:
            return self._float_op(o, a)
        return self._bool_op(o, a)

    def _int_op(self, o: str, a: tuple):
        if o == "ite":
            c = self.iv(a[0])
            if not c[0]:
                return self.iv(a[1])
            if not c[1]:
                return self.iv(a[2])
            x, y = self.iv(a[1]), self.iv(a[2])
            return (min(x[0], y[0]), max(x[1], y[1]))
        if o == "neg":
            x = self.iv(a[0])
            return (-x[1], -x[0])
        x, y = self.iv(a[0]), self.iv(a[1])
        if x[0] > x[1] or y[0] > y[1]:
            raise _Empty()
        if o == "+":
            return (x[0] + y[0], x[1] + y[1])
        if o == "-":
            return (x[0] - y[1], x[1] - y[0])
        if o == "*":
            c = (x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1])
            return (min(c), max(c))
        if o == "/":
            cands = []
            for d in {y[0], y[1], -1, 1}:
                if d != 0 and y[0] <= d <= y[1]:
                    cands += [int_div(x[0], d), int_div(x[1], d)]
            if y[0] <= 0 <= y[1]:
                cands.append(0)
            if x[0] <= 0 <= x[1]:
                cands.append(0)
            return (min(cands), max(cands)) if cands else (0, 0)
        if o == "rem":
            m = max(abs(y[0]), abs(y[1])) - 1
            m = max(m, 0)
            lo = 0 if x[0] >= 0 else -min(m, -x[0])
            hi = 0 if x[1] <= 0 else min(m, x[1])
            return (lo, hi)
        return (self.int_lo, self.int_hi)

    def _float_op(self, o: str, a: tuple) -> FIv:
        if o == "ite":
            c = self.iv(a[0])
            if not c[0]:
                return self.iv(a[1])
            if not c[1]:
                return self.iv(a[2])
            x, y = self.iv(a[1]), self.iv(a[2])
            return FIv(min(x.lo, y.lo), max(x.hi, y.hi), x.nan or y.nan)
        if o == "fneg":
            x = self.iv(a[0])
            return FIv(-x.hi, -x.lo, x.nan)
        if o == "fabs":
            x = self.iv(a[0])
            if not x.has_num:
                return FIv(1.0, 0.0, x.nan)
            lo = 0.0 if x.lo <= 0 <= x.hi else min(abs(x.lo), abs(x.hi))
            return FIv(lo, max(abs(x.lo), abs(x.hi)), x.nan)
        if o == "sin":
            # contract only: |sin r| <= min(1, |r|), and sin r lies between 0 and r on [-3, 3]
            x = self.iv(a[0])
            if not x.has_num:
                return FIv(1.0, 0.0, True)
            inf = math.isinf(x.lo) or math.isinf(x.hi)
            m = min(1.0, max(abs(x.lo), abs(x.hi)))
            lo, hi = -m, m
            if -3.0 <= x.lo and x.hi <= 3.0:
                lo, hi = max(lo, min(x.lo, 0.0)), min(hi, max(x.hi, 0.0))
            return FIv(lo, hi, x.nan or inf)
        x, y = self.iv(a[0]), self.iv(a[1])
        nan = x.nan or y.nan
        if not x.has_num or not y.has_num:
            return FIv(1.0, 0.0, nan)
        if o in ("f+", "f-"):
            if o == "f-":
                y = FIv(-y.hi, -y.lo, y.nan)
            if (math.isinf(x.hi) and math.isinf(y.lo) and y.lo < 0 < x.hi) or \
               (math.isinf(x.lo) and math.isinf(y.hi) and x.lo < 0 < y.hi):
                nan = True
            lo = x.lo + y.lo if not (math.isinf(x.lo) and math.isinf(y.lo) and x.lo != y.lo) else -math.inf
            hi = x.hi + y.hi if not (math.isinf(x.hi) and math.isinf(y.hi) and x.hi != y.hi) else math.inf
            return FIv(_rd(lo), _ru(hi), nan)
        if o == "f*":
            c = [_fmul(p, q) for p in (x.lo, x.hi) for q in (y.lo, y.hi)]
            if (x.lo <= 0 <= x.hi and (math.isinf(y.lo) or math.isinf(y.hi))) or \
               (y.lo <= 0 <= y.hi and (math.isinf(x.lo) or math.isinf(x.hi))):
                nan = True
            return FIv(_rd(min(c)), _ru(max(c)), nan)
        if o == "f/":
            if y.lo <= 0 <= y.hi:
                lo, hi = -math.inf, math.inf
                if x.lo <= 0 <= x.hi:
                    nan = True
                if y.lo == 0 == y.hi:
                    return FIv(-math.inf, math.inf, nan)
                return FIv(lo, hi, nan)
            c = []
            for p in (x.lo, x.hi):
                for q in (y.lo, y.hi):
                    if math.isinf(p) and math.isinf(q):
                        nan = True
                        c.append(0.0)
                    else:
                        c.append(p / q)
            return FIv(_rd(min(c)), _ru(max(c)), nan)
        return FULL_FLOAT

    def _bool_op(self, o: str, a: tuple):
        if o == "not":
            x = self.iv(a[0])
            return (x[1], x[0])
        if o == "and":
            ivs = [self.iv(x) for x in a]
            return (any(i[0] for i in ivs), all(i[1] for i in ivs))
        if o == "or":
            ivs = [self.iv(x) for x in a]
            return (all(i[0] for i in ivs), any(i[1] for i in ivs))
        if o == "=>":
            p, q = self.iv(a[0]), self.iv(a[1])
            return (p[1] and q[0], p[0] or q[1])
        if o == "ite":
            c = self.iv(a[0])
            if not c[0]:
                return self.iv(a[1])
            if not c[1]:
                return self.iv(a[2])
            x, y = self.iv(a[1]), self.iv(a[2])
            return (x[0] or y[0], x[1] or y[1])
        if o == "is_finite":
            x = self.iv(a[0])
            can_true = x.has_num and not (x.lo == x.hi and math.isinf(x.lo))
            can_false = x.nan or (x.has_num and (math.isinf(x.lo) or math.isinf(x.hi)))
            return (can_false, can_true)
        if o in ("=", "<", "<=", "def"):
            return self._rel(o, a[0], a[1])
        return BOOL_ANY

    def _rel(self, o: str, p: L.Term, q: L.Term):
        s = p.sort
        if s == L.INT:
            lin = linear(L.op("-", p, q))
            lo, hi = self._lin_range(lin)
            if o in ("=", "def"):
                return (not (lo == 0 == hi), lo <= 0 <= hi)
            if o == "<":
                return (hi >= 0, lo < 0)
            return (hi > 0, lo <= 0)
        if s == L.BOOL:
            x, y = self.iv(p), self.iv(q)
            can_t = (x[0] and y[0]) or (x[1] and y[1])
            can_f = (x[0] and y[1]) or (x[1] and y[0])
            return (can_f, can_t)
        if s != L.FLOAT:
            return BOOL_ANY
        x, y = self.iv(p), self.iv(q)
        if o == "def":
            if x.has_num and y.has_num and x.lo == x.hi == y.lo == y.hi and not x.nan and not y.nan and x.lo != 0:
                return (False, True)
            disjoint = not (x.has_num and y.has_num and x.lo <= y.hi and y.lo <= x.hi)
            return (True, not disjoint or (x.nan and y.nan))
        num = x.has_num and y.has_num
        nan = x.nan or y.nan
        if o == "=":
            can_t = num and x.lo <= y.hi and y.lo <= x.hi
            sure = not nan and x.lo == x.hi == y.lo == y.hi
            return (not sure, can_t)
        if o == "<":
            can_t = num and x.lo < y.hi
            sure = not nan and num and x.hi < y.lo
        else:
            can_t = num and x.lo <= y.hi
            sure = not nan and num and x.hi <= y.lo
        return (not sure, can_t)

    def _lin_range(self, lin: tuple) -> tuple:
        coefs, k = lin
        lo = hi = k
        for t, c in coefs.items():
            a, b = self.iv(t)
            if a > b:
                raise _Empty()
            if c > 0:
                lo += c * a
                hi += c * b
            else:
                lo += c * b
                hi += c * a
        return lo, hi

    # narrowing

    def set_dom(self, t: L.Term, d) -> bool:
        """Intersect the domain of ``t``; True if it changed."""
        old = self.iv(t)
        new = self._meet(t.sort, old, d)
        if t.sort == L.INT:
            if new[0] > new[1]:
                raise _Empty()
        elif t.sort == L.FLOAT:
            if new.empty:
                raise _Empty()
        elif t.sort == L.BOOL and not (new[0] or new[1]):
            raise _Empty()
        if new == old:
            return False
        self.doms[t] = new
        self.memo = {}
        return True

    def narrow(self, lit: L.Term) -> bool:
        """Assume ``lit`` holds and shrink domains accordingly."""
        positive = True
        t = lit
        if t.op == "not":
            positive, t = False, t.args[0]
        if t.sort == L.BOOL and t.op in ("var", "app", "select"):
            return self.set_dom(t, (not positive, positive))
        o = t.op
        if o in ("=", "<", "<=", "def"):
            p, q = t.args
            if p.sort == L.INT:
                return self._narrow_int(o, p, q, positive)
            if p.sort == L.FLOAT and positive:
                return self._narrow_float(o, p, q)
            if p.sort == L.BOOL and o == "=":
                x, y = self.iv(p), self.iv(q)
                changed = False
                if positive:
                    if _is_atom(p):
                        changed |= self.set_dom(p, y)
                    if _is_atom(q):
                        changed |= self.set_dom(q, x)
                return changed
            return False
        if o == "is_finite" and positive and _is_atom(t.args[0]):
            return self.set_dom(t.args[0], FIv(-floats.MAX_FINITE, floats.MAX_FINITE, False))
        return False

    def _narrow_int(self, o: str, p: L.Term, q: L.Term, positive: bool) -> bool:
        coefs, k = linear(L.op("-", p, q))
        if not coefs:
            return False
        changed = False
        if not positive:
            if o not in ("=", "def"):
                return False
            # x /= v only narrows at the domain edges
            if len(coefs) == 1:
                (t, c), = coefs.items()
                if (-k) % c == 0:
                    v = -k // c
                    lo, hi = self.iv(t)
                    if lo == v:
                        changed |= self.set_dom(t, (v + 1, hi))
                    elif hi == v:
                        changed |= self.set_dom(t, (lo, v - 1))
            return changed
        # sum(c_i t_i) + k  <=  bound_hi   (and >= bound_lo for equality)
        upper = -1 if o == "<" else 0
        lower = 0 if o in ("=", "def") else None
        if len(coefs) > 1:
            self._bound_shape(coefs, lower - k if lower is not None else None, upper - k)
        for t, c in coefs.items():
            others_lo = others_hi = k
            for u, d in coefs.items():
                if u is t:
                    continue
                a, b = self.iv(u)
                if d > 0:
                    others_lo += d * a
                    others_hi += d * b
                else:
                    others_lo += d * b
                    others_hi += d * a
            # c*t <= upper - others_lo ; c*t >= lower - others_hi
            hi_bound = upper - others_lo
            lo_bound = (lower - others_hi) if lower is not None else None
            lo, hi = self.iv(t)
            if c > 0:
                hi = min(hi, hi_bound // c)
                if lo_bound is not None:
                    lo = max(lo, -((-lo_bound) // c))
            else:
                lo = max(lo, -((hi_bound) // (-c)))
                if lo_bound is not None:
                    hi = min(hi, (-lo_bound) // (-c))
            changed |= self.set_dom(t, (lo, hi))
        return changed

    def _bound_shape(self, coefs: dict, lo, hi) -> None:
        """Record lo <= sum(c_i t_i) <= hi; an empty meet with earlier bounds is a contradiction."""
        g = 0
        for c in coefs.values():
            g = math.gcd(g, c)
        key = frozenset((t, c // g) for t, c in coefs.items())
        neg = frozenset((t, -c // g) for t, c in coefs.items())
        lo = None if lo is None else -((-lo) // g)
        hi = hi // g
        if hash(neg) < hash(key):
            key, lo, hi = neg, -hi, (None if lo is None else -lo)
        old = self.shapes.get(key, (None, None))
        new_lo = lo if old[0] is None else (old[0] if lo is None else max(lo, old[0]))
        new_hi = hi if old[1] is None else (old[1] if hi is None else min(hi, old[1]))
        if new_lo is not None and new_hi is not None and new_lo > new_hi:
            raise _Empty()
        self.shapes[key] = (new_lo, new_hi)

    def _narrow_float(self, o: str, p: L.Term, q: L.Term) -> bool:
        x, y = self.iv(p), self.iv(q)
        changed = False
        if o in ("=", "def"):
            if _is_atom(p):
                changed |= self.set_dom(p, FIv(y.lo, y.hi, y.nan and o == "def"))
            if _is_atom(q):
                changed |= self.set_dom(q, FIv(x.lo, x.hi, x.nan and o == "def"))
            return changed
        strict = o == "<"
        if _is_atom(p):
            hi = floats.next_down(y.hi) if strict and math.isfinite(y.hi) else y.hi
            changed |= self.set_dom(p, FIv(-math.inf, hi, False))
        if _is_atom(q):
            x = self.iv(p)
            lo = floats.next_up(x.lo) if strict and math.isfinite(x.lo) else x.lo
            changed |= self.set_dom(q, FIv(lo, math.inf, False))
        return changed


@dataclass(frozen=True)
class Interval:
    """Result of ``interval_eval``: bounds, plus NaN and fault possibilities."""

    lo: object
    hi: object
    nan: bool = False
    may_fault: bool = False

    def __contains__(self, v) -> bool:
        if isinstance(v, float) and math.isnan(v):
            return self.nan
        return self.lo <= v <= self.hi


def interval_eval(t: L.Term, env: dict, int_width: int = 32) -> Interval:
    """Over-approximate the values of ``t`` for all valuations inside ``env``.

    ``env`` maps symbols to (lo, hi) pairs, or to Interval for floats. A
    division whose divisor may be zero sets ``may_fault``.
    """
    eng = Engine(-(2 ** (int_width - 1)), 2 ** (int_width - 1) - 1)
    for sym, iv in env.items():
        if sym.sort == L.FLOAT:
            iv = iv if isinstance(iv, Interval) else Interval(*iv)
            eng.doms[sym] = FIv(float(iv.lo), float(iv.hi), iv.nan)
        elif sym.sort == L.BOOL:
            eng.doms[sym] = (not iv[1], bool(iv[1])) if isinstance(iv, tuple) and len(iv) == 2 else BOOL_ANY
        else:
            lo, hi = (iv.lo, iv.hi) if isinstance(iv, Interval) else iv
            eng.doms[sym] = (lo, hi)
    may_fault = False
    for u in _subterms(t):
        if u.op in ("/", "rem", "f/"):
            d = eng.iv(u.args[1])
            zero = (d[0] <= 0 <= d[1]) if u.sort == L.INT else (d.has_num and d.lo <= 0.0 <= d.hi)
            may_fault |= zero
    r = eng.iv(t)
    if t.sort == L.INT:
        return Interval(r[0], r[1], False, may_fault)
    if t.sort == L.FLOAT:
        return Interval(r.lo, r.hi, r.nan, may_fault)
    return Interval(not r[1], r[1], False, may_fault)  # booleans as False <= v <= True bounds


def _subterms(t: L.Term) -> list:
    out, stack, seen = [], [t], set()
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        out.append(u)
        stack.extend(u.args)
    return out


def _is_atom(t: L.Term) -> bool:
    return t.op in ("var", "app", "select") or (t.sort == L.FLOAT and t.op == "sin")


def linear(t: L.Term, memo: dict | None = None) -> tuple:
    """Integer term as ({atom: coefficient}, constant)."""
    o = t.op
    if o == "const":
        return {}, t.value
    if o in ("+", "-"):
        a, ka = linear(t.args[0])
        b, kb = linear(t.args[1])
        s = 1 if o == "+" else -1
        out = dict(a)
        for u, c in b.items():
            out[u] = out.get(u, 0) + s * c
        return {u: c for u, c in out.items() if c}, ka + s * kb
    if o == "neg":
        a, k = linear(t.args[0])
        return {u: -c for u, c in a.items()}, -k
    if o == "*":
        x, y = t.args
        if x.is_const or y.is_const:
            c, other = (x.value, y) if x.is_const else (y.value, x)
            a, k = linear(other)
            return ({u: c * v for u, v in a.items() if c * v}, c * k)
    return {t: 1}, 0


# -- compiled evaluation for model search -------------------------------------

_PY = {"+": "({0} + {1})", "-": "({0} - {1})", "*": "({0} * {1})", "neg": "(-{0})",
       "<": "({0} < {1})", "<=": "({0} <= {1})", "=": "({0} == {1})",
       "not": "(not {0})", "=>": "((not {0}) or {1})"}


class _Compiler:
    def __init__(self, unknowns: dict):
        self.unknowns = unknowns  # term -> slot index
        self.consts: list = []
        self.memo: dict = {}

    def expr(self, t: L.Term) -> str:
        r = self.memo.get(t)
        if r is not None:
            return r
        r = self._expr(t)
        self.memo[t] = r
        return r

    def _expr(self, t: L.Term) -> str:
        if t in self.unknowns:
            return f"v[{self.unknowns[t]}]"
        o = t.op
        if o == "const":
            self.consts.append(t.value)
            return f"k[{len(self.consts) - 1}]"
        a = [self.expr(x) for x in t.args]
        if o in _PY:
            return _PY[o].format(*a)
        if o == "and":
            return "(" + " and ".join(a) + ")"
        if o == "or":
            return "(" + " or ".join(a) + ")"
        if o == "ite":
            return f"({a[1]} if {a[0]} else {a[2]})"
        if o in ("/", "rem", "f+", "f-", "f*", "f/", "fneg", "fabs", "sin", "is_finite", "def", "store", "select",
                 "constarr"):
            return f"F[{o!r}]({', '.join(a)})"
        raise EvalError(f"cannot compile {o}")


def _sel(arr, i):
    return arr.get(i)


_FUNCS = {
    "/": lambda a, b: int_div(a, b) if b else 0,
    "rem": lambda a, b: int_rem(a, b) if b else 0,
    "f+": floats.add, "f-": floats.sub, "f*": floats.mul, "f/": floats.div,
    "fneg": lambda a: -a, "fabs": abs, "sin": floats.sin, "is_finite": math.isfinite,
    "def": lambda a, b: _bits(a) == _bits(b),
    "store": lambda a, i, v: a.store(i, v), "select": _sel, "constarr": lambda v: FArray(v),
}


def _compile(lits: list, unknowns: dict):
    comp = _Compiler(unknowns)
    fns = []
    for lit in lits:
        src = comp.expr(lit)
        fns.append(eval(f"lambda v: {src}", {"k": comp.consts, "F": _FUNCS}))
    return fns


# -- search --------------------------------------------------------------------

class _Search:
    def __init__(self, originals: list, budget: Budget, int_lo: int, int_hi: int, enum_limit: int):
        self.originals = originals
        self.budget = budget
        self.deadline = time.monotonic() + budget.wall_time
        self.steps = 0
        self.int_lo, self.int_hi = int_lo, int_hi
        self.enum_limit = enum_limit
        self.incomplete = False

    def step(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.budget.steps:
            raise _Stop("stepout")
        if time.monotonic() > self.deadline:
            raise _Stop("timeout")

    def solve(self, lits: list, clauses: list, eng: Engine):
        """Returns a confirmed model, or None when this branch is unsat or undecided."""
        try:
            lits, clauses = self.propagate(lits, clauses, eng)
        except _Empty:
            self.step()
            return None
        if clauses:
            clause = min(clauses, key=lambda c: len(c.args))
            rest = [c for c in clauses if c is not clause]
            for d in clause.args:
                self.step()
                sub_lits, sub_clauses = list(lits), list(rest)
                _add(d, sub_lits, sub_clauses)
                m = self.solve(sub_lits, sub_clauses, eng.copy())
                if m is not None:
                    return m
            return None
        it = _find_ite(lits)
        if it is not None:
            return self.split_ite(it, lits, eng)
        self.step()
        return self.search(lits, eng)

    def split_ite(self, it: L.Term, lits: list, eng: Engine):
        """Case split on the condition of a numeric conditional term."""
        c, a, b = it.args
        may_false, may_true = eng.iv(c)
        options = []
        if may_true:
            options.append((c, a))
        if may_false:
            options.append((L.not_(c), b))
        for cond, value in options:
            if len(options) > 1:
                self.step()
            memo: dict = {}
            sub_lits, sub_clauses = [], []
            for lit in lits:
                lit = L.map_terms(lit, lambda u: value if u == it else None)
                _add(nnf(simplify(lit, memo)), sub_lits, sub_clauses)
            if len(options) > 1:
                _add(nnf(simplify(cond, memo)), sub_lits, sub_clauses)
            m = self.solve(sub_lits, sub_clauses, eng.copy())
            if m is not None:
                return m
        return None

    def propagate(self, lits: list, clauses: list, eng: Engine) -> tuple:
        for _ in range(MAX_ROUNDS):
            changed = False
            kept = []
            for lit in lits:
                f, t = eng.iv(lit)
                if not t:
                    raise _Empty()
                if not f and not _find_ite([lit]):
                    continue  # decided; literals over conditionals stay for splitting
                kept.append(lit)
                if eng.narrow(lit):
                    changed = True
                    self.step()
            lits = kept
            new_clauses = []
            for c in clauses:
                live = []
                sat = False
                for d in c.args:
                    f, t = eng.iv(d)
                    if not f:
                        sat = True
                        break
                    if t:
                        live.append(d)
                if sat:
                    continue
                if not live:
                    raise _Empty()
                if len(live) == 1:
                    _add(live[0], lits, new_clauses)
                    changed = True
                else:
                    new_clauses.append(c if len(live) == len(c.args) else L.or_(*live))
            clauses = new_clauses
            if not changed:
                return lits, clauses
        return lits, clauses

    # model search over the remaining literals

    def search(self, lits: list, eng: Engine):
        lits = lits + _domain_literals(eng)
        unknowns: list = []
        seen: set = set()
        for lit in lits:
            _collect_unknowns(lit, unknowns, seen)
        cands, complete = [], True
        for u in unknowns:
            try:
                c, full = self.candidates(u, eng, lits)
            except _Empty:
                return None
            complete &= full
            cands.append(c)
        total = 1
        for c in cands:
            total *= max(len(c), 1)
        if complete and total > self.enum_limit:
            complete = False
        if any(_has_op(lit, "sin") for lit in lits):
            complete = False  # sin is only known by its contract in proofs
        order = sorted(range(len(unknowns)), key=lambda i: len(cands[i]))
        unknowns = [unknowns[i] for i in order]
        cands = [cands[i] for i in order]
        index = {u: i for i, u in enumerate(unknowns)}
        try:
            fns = _compile(lits, index)
        except EvalError:
            self.incomplete = True
            return None
        # each literal is checked once its last unknown is assigned
        ready: list = [[] for _ in range(len(unknowns) + 1)]
        for lit, fn in zip(lits, fns):
            deps = [index[u] for u in _unknowns_of(lit, index)]
            ready[max(deps) + 1 if deps else 0].append(fn)
        values = [None] * len(unknowns)
        nodes = [0]
        rejected = [False]

        def check(level: int) -> bool:
            for fn in ready[level]:
                try:
                    if not fn(values):
                        return False
                except (ArithmeticError, EvalError, TypeError, ValueError, AttributeError):
                    return False
            return True

        def dfs(level: int):
            if level == len(unknowns):
                m = self.confirm(unknowns, values, eng)
                if m is None:
                    rejected[0] = True
                return m
            for v in cands[level]:
                nodes[0] += 1
                if nodes[0] > MAX_SEARCH_NODES:
                    raise _GiveUp()
                self.step()
                values[level] = v
                if check(level + 1):
                    m = dfs(level + 1)
                    if m is not None:
                        return m
            values[level] = None
            return None

        if not check(0):
            return None
        try:
            m = dfs(0)
        except _GiveUp:
            self.incomplete = True
            return None
        if m is None and (not complete or rejected[0]):
            self.incomplete = True
        return m

    def candidates(self, u: L.Term, eng: Engine, lits: list) -> tuple[list, bool]:
        d = eng.iv(u)
        if u.sort == L.BOOL:
            return [v for v, ok in ((False, d[0]), (True, d[1])) if ok], True
        if u.sort == L.INT:
            lo, hi = d
            if lo > hi:
                return [], True
            if hi - lo < 64:
                return list(range(lo, hi + 1)), True
            pts = {lo, lo + 1, hi - 1, hi, 0, 1, -1, 2, -2}
            for lit in lits:
                for c in _int_consts(lit):
                    pts.update((c - 1, c, c + 1))
            return sorted((p for p in pts if lo <= p <= hi), key=lambda p: (abs(p), p)), False
        pts = [0.0, 1.0, -1.0, floats.MIN_NORMAL, -floats.MIN_NORMAL, floats.MIN_SUBNORMAL, -floats.MIN_SUBNORMAL]
        if d.has_num:
            for b in (d.lo, d.hi):
                if math.isfinite(b):
                    pts += [b, floats.next_up(b), floats.next_down(b)]
                else:
                    pts.append(b)
            if math.isfinite(d.lo) and math.isfinite(d.hi):
                pts.append(floats.to_f32((d.lo + d.hi) / 2))
        for lit in lits:
            for c in _float_consts(lit):
                pts += [c, floats.next_up(c), floats.next_down(c)]
        out = sorted({p for p in pts if d.has_num and d.lo <= p <= d.hi}, key=lambda p: (abs(p), p))
        if d.nan:
            out.append(math.nan)
        return out, False

    def confirm(self, unknowns: list, values: list, eng: Engine):
        """Turn an assignment into a model of the original formulas, if possible."""
        model: dict = {}
        apps: dict = {}
        arrays: dict = {}
        for u, v in zip(unknowns, values):
            if u.op == "var":
                model[u] = v
        # array elements and function values must be functional
        for u, v in zip(unknowns, values):
            if u.op in ("app", "select"):
                for a in u.args:
                    for fv in L.free_vars(a):
                        if fv not in model:
                            model[fv] = _pick(eng, fv)
        for u, v in zip(unknowns, values):
            if u.op == "select" and u.args[0].is_var:
                try:
                    i = eval_term(u.args[1], model)
                except EvalError:
                    return None
                arrays.setdefault(u.args[0], {})
                if arrays[u.args[0]].get(i, v) != v and _bits(arrays[u.args[0]][i]) != _bits(v):
                    return None
                arrays[u.args[0]][i] = v
        for arr, entries in arrays.items():
            model[arr] = FArray(_zero(L.elem_sort(arr.sort)), tuple(sorted(entries.items())))
        for f in self.originals:
            for fv in L.free_vars(f):
                if fv not in model:
                    model[fv] = _pick(eng, fv)
        try:
            for u, v in zip(unknowns, values):
                if u.op == "app":
                    key = _app_key(u, model)
                    if key in apps and _bits(apps[key]) != _bits(v):
                        return None
                    apps[key] = v
                    model[u] = v
            for f in self.originals:
                for ap in L.apps(f):
                    if ap not in model:
                        model[ap] = apps.setdefault(_app_key(ap, model), _zero(ap.sort))
        except EvalError:
            return None
        try:
            for f in self.originals:
                if not eval_term(f, model):
                    return None
        except (EvalError, ArithmeticError, TypeError, AttributeError):
            return None
        return model


def _app_key(ap: L.Term, model: dict) -> tuple:
    args = (eval_term(a, model) for a in ap.args)
    return ap.value, tuple(x if isinstance(x, FArray) else _bits(x) for x in args)


def _domain_literals(eng: Engine) -> list:
    """Narrowed domains of compound terms, which the search must respect."""
    out = []
    for t, d in eng.doms.items():
        if _is_atom(t):
            continue
        if t.sort == L.INT:
            out.append(L.between(L.int_(d[0]), t, L.int_(d[1])))
        elif t.sort == L.FLOAT and not d.nan and d.has_num:
            if math.isfinite(d.lo):
                out.append(L.le(L.flt(d.lo), t))
            if math.isfinite(d.hi):
                out.append(L.le(t, L.flt(d.hi)))
    return [x for part in out for x in L.conjuncts(part)]


def _zero(sort: str):
    return {L.INT: 0, L.FLOAT: 0.0, L.BOOL: False}.get(sort, FArray(0))


def _pick(eng: Engine, t: L.Term):
    if t.sort.startswith("arr:"):
        return FArray(_zero(L.elem_sort(t.sort)))
    d = eng.iv(t)
    if t.sort == L.INT:
        return min(max(0, d[0]), d[1]) if d[0] <= d[1] else 0
    if t.sort == L.BOOL:
        return bool(d[1])
    if d.has_num:
        if d.lo <= 0.0 <= d.hi:
            return 0.0
        return d.lo if math.isfinite(d.lo) else d.hi
    return math.nan


def _add(t: L.Term, lits: list, clauses: list) -> None:
    if t.op == "and":
        for a in t.args:
            _add(a, lits, clauses)
    elif t.op == "or":
        clauses.append(t)
    else:
        lits.append(t)


def _find_ite(lits: list) -> L.Term | None:
    """First numeric if-then-else term inside the literals, outermost first."""
    seen: set = set()
    stack = list(reversed(lits))
    while stack:
        t = stack.pop()
        if t in seen or t.op == "forall":
            continue
        seen.add(t)
        if t.op == "ite" and t.sort in (L.INT, L.FLOAT):
            return t
        stack.extend(reversed(t.args))
    return None


def _collect_unknowns(t: L.Term, out: list, seen: set) -> None:
    if t in seen:
        return
    seen.add(t)
    if t.op == "var" and not t.sort.startswith("arr:"):
        out.append(t)
        return
    for a in t.args if t.op != "forall" else ():
        _collect_unknowns(a, out, seen)
    if t.op in ("app", "select"):
        out.append(t)


def _unknowns_of(t: L.Term, index: dict) -> set:
    out: set = set()
    stack = [t]
    seen = set()
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        if u in index:
            out.add(u)
            if u.op == "var":
                continue
        stack.extend(u.args)
    return out


def _consts(t: L.Term, sort: str) -> set:
    out = set()
    stack, seen = [t], set()
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        if u.is_const and u.sort == sort:
            out.add(u.value)
        stack.extend(u.args)
    return out


def _has_op(t: L.Term, name: str) -> bool:
    stack, seen = [t], set()
    while stack:
        u = stack.pop()
        if u.op == name:
            return True
        if u not in seen:
            seen.add(u)
            stack.extend(u.args)
    return False


def _int_consts(t: L.Term) -> set:
    return _consts(t, L.INT)


def _float_consts(t: L.Term) -> set:
    return {v for v in _consts(t, L.FLOAT) if math.isfinite(v)}


# -- axioms ------------------------------------------------------------------

def _own_apps_only(ax: L.Term) -> bool:
    funcs = {a.value for a in L.apps(ax.args[0])}
    return len(funcs) <= 1


_PROBE_CACHE: dict = {}


def probe_axiom(ax: L.Term, int_lo: int, int_hi: int) -> tuple[bool, int]:
    """Look for a boundary instance that falsifies a universal axiom.

    Returns (refuted, steps used). Axioms that mention other functions are
    not probed.
    """
    key = (ax, int_lo, int_hi)
    if key in _PROBE_CACHE:
        return _PROBE_CACHE[key]
    result = (False, 0)
    if _own_apps_only(ax):
        bound = ax.value
        body = ax.args[0]
        ante = body.args[0] if body.op == "=>" else L.TRUE
        eng = Engine(int_lo, int_hi)
        try:
            for _ in range(4):
                changed = False
                for c in L.conjuncts(ante):
                    changed |= eng.narrow(c)
                if not changed:
                    break
        except _Empty:
            _PROBE_CACHE[key] = result
            return result
        choices = []
        for b in bound:
            if b.sort == L.INT:
                lo, hi = eng.iv(b)
                pts = [p for p in dict.fromkeys((lo, lo + 1, -1, 0, 1, hi - 1, hi)) if lo <= p <= hi]
                choices.append([L.int_(p) for p in pts])
            elif b.sort == L.FLOAT:
                d = eng.iv(b)
                pts = [p for p in (d.lo, 0.0, 1.0, -1.0, d.hi) if d.has_num and math.isfinite(p) and d.lo <= p <= d.hi]
                choices.append([L.flt(p) for p in dict.fromkeys(pts)] or [b])
            elif b.sort == L.BOOL:
                choices.append([L.FALSE, L.TRUE])
            else:
                choices.append([b])  # left free: an unsat instance refutes for every value
        steps = 0
        count = 0
        for combo in itertools.product(*choices):
            count += 1
            if count > PROBE_LIMIT:
                break
            inst = simplify(L.substitute(body, dict(zip(bound, combo))))
            steps += 1
            if inst is L.FALSE:
                result = (True, steps)
                break
            r = _check(  # ground instance on its own
                [inst], Budget(steps=200, wall_time=1.0), int_lo, int_hi, DEFAULT_ENUM_LIMIT, probe=False)
            if r.status == "unsat":
                result = (True, steps + r.steps)
                break
    _PROBE_CACHE[key] = result
    return result


def instantiate(axioms: list, formulas: list) -> list:
    """Ground instances of the axioms at the applications present in the formulas."""
    out: list = []
    done: set = set()
    pool = list(formulas)
    for _ in range(INSTANTIATION_ROUNDS):
        ground = []
        for f in pool:
            ground.extend(L.apps(f))
        new = []
        for ax in axioms:
            funcs = {a.value: a for a in L.apps(ax.args[0])}
            for g in ground:
                if g.value not in funcs:
                    continue
                pattern = funcs[g.value]
                if len(pattern.args) != len(g.args) or not all(a in ax.value for a in pattern.args):
                    continue
                key = (ax, g)
                if key in done:
                    continue
                done.add(key)
                inst = L.substitute(ax.args[0], dict(zip(pattern.args, g.args)))
                new.append(inst)
        if not new:
            break
        out.extend(new)
        pool = new
    return out


# -- entry points ----------------------------------------------------------------

def check_sat(formulas: list, budget: Budget = Budget(), *, int_width: int = 32,
              enum_limit: int = DEFAULT_ENUM_LIMIT) -> SatResult:
    """Satisfiability of the conjunction of ``formulas``."""
    int_lo, int_hi = -(2 ** (int_width - 1)), 2 ** (int_width - 1) - 1
    return _check(formulas, budget, int_lo, int_hi, enum_limit)


def _check(formulas: list, budget: Budget, int_lo: int, int_hi: int, enum_limit: int,
           probe: bool = True) -> SatResult:
    search = _Search([], budget, int_lo, int_hi, enum_limit)
    try:
        search.step()
        substituted, defs = eliminate_definitions(list(formulas))
        memo: dict = {}
        flat = [simplify(f, memo) for f in substituted]
        axioms = [f for f in flat if f.op == "forall"]
        plain = [f for f in flat if f.op != "forall"]
        if any(f is L.FALSE for f in plain):
            search.step()
            return SatResult("unsat", steps=search.steps)
        if probe:
            for ax in axioms:
                refuted, used = probe_axiom(ax, int_lo, int_hi)
                if refuted:
                    search.step(1 + used)
                    return SatResult("unsat", steps=search.steps, refuted_axiom=ax)
        instances = [simplify(i, memo) for i in instantiate(axioms, plain)]
        search.originals = substituted
        lits, clauses = [], []
        for f in plain + instances:
            _add(nnf(f), lits, clauses)
        model = search.solve(lits, clauses, Engine(int_lo, int_hi))
    except _Stop as s:
        return SatResult("unknown", steps=search.steps, reason=s.reason)
    if model is None:
        if search.incomplete:
            return SatResult("unknown", steps=search.steps, reason="incomplete")
        return SatResult("unsat", steps=search.steps)
    full = dict(model)
    for sym, value in defs.items():
        try:
            full[sym] = eval_term(value, full)
        except EvalError:
            pass
    return SatResult("sat", model=full, steps=search.steps)


def _int_width(vc) -> int:
    for h in vc.hypotheses:
        p = h.predicate
        if h.provenance == "target_axiom" and p.op == "=" and p.args[0].is_var \
                and p.args[0].name == "target.int_width":
            return p.args[1].value
    return 32


def discharge(vc, budget: Budget = Budget(), target=None,
              enum_limit: int | None = None) -> ProofStatus:
    """Prove ``vc`` by refuting its hypotheses together with the negated goal.

    The integer width comes from ``target`` when given, otherwise from the
    VC's own target facts.
    """
    if simplify(vc.goal) is L.TRUE:
        return ProofStatus("proved", steps=0)
    width = target.int_width if target is not None else _int_width(vc)
    if enum_limit is None:
        enum_limit = target.max_enum_domain if target is not None else DEFAULT_ENUM_LIMIT
    formulas = [h.predicate for h in vc.hypotheses] + [L.not_(vc.goal)]
    r = check_sat(formulas, budget, int_width=width, enum_limit=enum_limit)
    if r.status == "unsat":
        return ProofStatus("proved", steps=r.steps)
    if r.status == "unknown":
        return ProofStatus("unknown", r.reason, steps=r.steps)
    model = r.model
    cex = []
    for v in sorted(L.free_vars(vc.goal), key=lambda t: t.name):
        if v in model:
            cex.append((v.name, model[v]))
    if vc.subject is not None:
        try:
            cex.append(("value", eval_term(vc.subject, model)))
        except EvalError:
            pass
    return ProofStatus("failed", None, tuple(cex), r.steps, model=model)


def hypotheses_consistent(facts: list, budget: Budget = Budget(), int_width: int = 32) -> SatResult:
    return check_sat([f.predicate for f in facts], budget, int_width=int_width)


# -- post-pass ------------------------------------------------------------------

def spurious_possible(vc, unproved_callees=frozenset()) -> bool:
    """Whether a counterexample may rest on something other than checked code.

    True when a hypothesis was assumed by a pragma, comes from a suppressed
    check, or is the postcondition of a callee that is not itself fully
    proved (including callees that have no body).
    """
    for h in vc.hypotheses:
        if h.provenance in ("pragma_assume", "suppression"):
            return True
        if h.provenance == "callee_postcondition" and h.source.lower() in unproved_callees:
            return True
    return False


def depends_on_abstraction(vc) -> bool:
    """Whether a model of ``vc`` may not be reachable from its inputs alone.

    Broader than ``spurious_possible``: any callee contract, assumed or
    suppressed fact, or symbol that is neither an input nor defined from
    inputs (havocked loop state, values returned through ``out``
    parameters) counts.
    """
    if L.apps(vc.goal):
        return True
    defined = set()
    syms = set(L.free_vars(vc.goal))
    for h in vc.hypotheses:
        if h.provenance in ("callee_postcondition", "pragma_assume", "suppression") or L.apps(h.predicate):
            return True
        d = _definition(h.predicate)
        if d is not None:
            defined.add(d[0])
        syms |= L.free_vars(h.predicate)
    allowed = set(vc.inputs) | defined
    return any(s not in allowed and not s.name.startswith("target.") for s in syms)


def unproved_subprograms(vcs: list, spec_only=()) -> set:
    """Lower-case names of subprograms with a VC that is neither proved nor suppressed."""
    out = {name.lower() for name in spec_only}
    for vc in vcs:
        if vc.status is not None and not vc.status.proved and not vc.suppressed:
            out.add(vc.subprogram)
    return out


def mark_spurious(vcs: list, unproved_callees=None) -> None:
    """Set ``spurious_possible`` on every failed VC status."""
    if unproved_callees is None:
        unproved_callees = unproved_subprograms(vcs)
    for vc in vcs:
        if vc.status is not None and vc.status.state == "failed":
            vc.status = replace(vc.status, spurious_possible=spurious_possible(vc, unproved_callees))


def prove_all(vcs: list, budget: Budget = Budget(), target=None, spec_only=()) -> list:
    for vc in vcs:
        vc.status = discharge(vc, budget, target)
    mark_spurious(vcs, unproved_subprograms(vcs, spec_only))
    return vcs
