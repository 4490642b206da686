"""Verification-condition generation by forward symbolic execution.

Each subprogram is analyzed on its own. Objects are tracked as SSA symbols
(``x@3``) whose definitions are recorded as facts, so every VC carries the
exact ordered list of facts it may use together with their provenance.
Callees are summarized by their contracts: a call contributes a
precondition obligation and, afterwards, the callee's postcondition as a
fact. Function postconditions are additionally stated as universal axioms
over the function symbol, as a theory-based prover would.

Pragma handling, loop obligations and check insertion are done in the same
walk, so every VC is built with the fact base in force at its check site.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import floats
from . import logic as L
from .frontend import ast as A
from .frontend.resolver import Builtin, BuiltinFunction, ResolvedAst
from .frontend.source import Diagnostic, Loc
from .semantics import (
    is_array_formal,
    needs_copy_back_check,
    needs_range_check,
    needs_validity_check,
    tracks_init,
    type_bounds,
)
from .target import DEFAULT_TARGET, TargetConfig

VC_KINDS = (
    "overflow", "range", "index", "division", "precondition", "postcondition", "assertion",
    "loop_invariant_init", "loop_invariant_preserve", "float_validity", "initialization",
)
PROVENANCES = (
    "path_condition", "prior_check_success", "callee_postcondition", "pragma_assume",
    "suppression", "subtype_range", "target_axiom",
)
DENORM = L.var("target.denorm", L.BOOL)
INT_WIDTH = L.var("target.int_width", L.INT)


class VcGenError(Exception):
    def __init__(self, loc: Loc, message: str):
        super().__init__(f"{loc}: {message}")
        self.diagnostic = Diagnostic(loc, message)


@dataclass(frozen=True)
class Fact:
    predicate: L.Term
    provenance: str
    source: str = ""  # callee name, location, VC id or target key, by provenance

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def label(self) -> str:
        return f"{self.provenance}({self.source})" if self.source else self.provenance

    def guarded(self, cond: L.Term) -> "Fact":
        return Fact(L.implies(cond, self.predicate), self.provenance, self.source)


@dataclass(frozen=True)
class Suppression:
    loc: Loc  # location of the suppressed check
    justification: str
    pragma_loc: Loc


@dataclass
class VC:
    id: str
    kind: str
    loc: Loc
    goal: L.Term
    hypotheses: tuple
    package: str
    subprogram: str
    origin: str = "body"  # pre | body | post
    subject: L.Term | None = None
    suppression: Suppression | None = None
    status: object = None  # solver.ProofStatus
    probes: dict = field(default_factory=dict)  # cached consistency probes, filled by audit
    inputs: frozenset = frozenset()  # symbols standing for the subprogram's input values

    def __post_init__(self) -> None:
        if self.kind not in VC_KINDS:
            raise ValueError(f"unknown VC kind {self.kind!r}")

    @property
    def suppressed(self) -> bool:
        return self.suppression is not None

    def facts(self, provenance: str) -> list[Fact]:
        return [f for f in self.hypotheses if f.provenance == provenance]

    def status_label(self) -> str:
        if self.suppressed:
            return "suppressed"
        if self.status is None:
            return "pending"
        return self.status.label()

    def dump(self) -> str:
        return f"{self.id} {self.kind} {self.loc} {self.status_label()}"


@dataclass(frozen=True)
class View:
    """An array as seen by the analysis: element map plus bounds."""

    elems: L.Term
    first: L.Term
    last: L.Term

    def length(self) -> L.Term:
        if self.first.is_const and self.last.is_const:
            return L.int_(max(0, self.last.value - self.first.value + 1))
        n = L.op("+", L.op("-", self.last, self.first), L.int_(1))
        return L.ite(L.le(self.first, self.last), n, L.int_(0))


@dataclass
class State:
    env: dict  # object key -> Term | View
    init: dict  # object key -> bool Term, for objects that start uninitialized
    facts: list
    alive: bool = True

    def copy(self) -> "State":
        return State(dict(self.env), dict(self.init), list(self.facts), self.alive)


@dataclass
class SubprogramVCs:
    sub: A.Subprogram
    vcs: list
    notes: list  # (loc, message) for analysis remarks such as loops without invariant
    exports: list  # suppression facts visible to callers, over formal symbols
    formal_symbols: dict  # formal key -> (initial symbols, final symbols or None)
    callees: list  # keys of called subprograms, in first-call order
    axioms: list  # function axioms used


@dataclass
class ProgramVCs:
    program: ResolvedAst
    target: TargetConfig
    results: list  # SubprogramVCs, declaration order
    errors: list  # Diagnostics

    @property
    def vcs(self) -> list:
        return [vc for r in self.results for vc in r.vcs]

    def for_subprogram(self, key: str) -> SubprogramVCs | None:
        for r in self.results:
            if qualified(r.sub) == key or r.sub.key == key:
                return r
        return None


def qualified(sub: A.Subprogram) -> str:
    pkg = sub.package.key if sub.package is not None else ""
    return f"{pkg}.{sub.key}" if pkg else sub.key


def sort_of(ty) -> str:
    if ty.base == "array":
        return L.arr_sort(sort_of(ty.element))
    return {"integer": L.INT, "float": L.FLOAT, "boolean": L.BOOL}[ty.base]


def _const_of(ty, v) -> L.Term:
    return L.const(v, sort_of(ty))


def range_predicate(ty, t: L.Term, target: TargetConfig) -> L.Term:
    """What membership in scalar subtype ``ty`` means for term ``t``."""
    if ty.base == "integer":
        lo, hi = type_bounds(ty, target)
        return L.between(L.int_(lo), t, L.int_(hi))
    if ty.base == "float":
        if ty.constrained:
            return L.between(L.flt(ty.lo), t, L.flt(ty.hi))
        return L.op("is_finite", t)
    return L.TRUE


def validity_predicate(t: L.Term) -> L.Term:
    """Finite, and either subnormals are supported or the value is zero or normal."""
    return L.and_(
        L.op("is_finite", t),
        L.or_(DENORM, L.eq(t, L.flt(0.0)), L.le(L.flt(floats.MIN_NORMAL), L.op("fabs", t))),
    )


# -- expression translation ---------------------------------------------------

class _Ctx:
    """Translation context: where names point and whether checks are emitted."""

    def __init__(self, gen: "SubprogramGenerator | None", state: State | None, env: dict,
                 result: L.Term | None = None, emit: bool = True, origin: str = "body"):
        self.gen = gen
        self.state = state
        self.env = env
        self.result = result
        self.emit = emit and gen is not None
        self.origin = origin


class Translator:
    """Turns expressions into terms; in emitting mode also inserts checks."""

    def __init__(self, target: TargetConfig, axioms: "AxiomTable"):
        self.target = target
        self.axioms = axioms

    def check(self, ctx: _Ctx, kind: str, loc: Loc, goal: L.Term, subject: L.Term | None = None) -> None:
        if ctx.emit:
            ctx.gen.check(ctx.state, kind, loc, goal, subject, ctx.origin)

    def fact(self, ctx: _Ctx, pred: L.Term, provenance: str, source: str = "") -> None:
        if ctx.emit and pred is not L.TRUE:
            ctx.state.facts.append(Fact(pred, provenance, source))

    def range_fact(self, ctx: _Ctx, ty, t: L.Term) -> None:
        if ctx.emit:
            ctx.gen.add_range(ty, t, ctx.state)

    # scalars

    def expr(self, e, ctx: _Ctx) -> L.Term:
        if isinstance(e, A.IntLit):
            return L.int_(e.value)
        if isinstance(e, A.RealLit):
            return L.flt(floats.to_f32(e.value))
        if isinstance(e, A.Name):
            return self.name(e, ctx)
        if isinstance(e, A.Attr):
            return self.attr(e, ctx)
        if isinstance(e, A.Apply):
            if e.kind == "call":
                return self.call(e.ref, e.args, e.loc, ctx)
            return self.index(e, ctx)
        if isinstance(e, A.Unary):
            v = self.expr(e.operand, ctx)
            if e.op == "not":
                return L.not_(v)
            if v.sort == L.FLOAT:
                return L.op("fneg", v)
            r = L.op("neg", v)
            self.check(ctx, "overflow", e.loc, self.in_base(r), r)
            return r
        if isinstance(e, A.Binary):
            return self.binary(e, ctx)
        raise VcGenError(e.loc, f"unsupported expression {type(e).__name__}")

    def in_base(self, t: L.Term) -> L.Term:
        return L.between(L.int_(self.target.int_first), t, L.int_(self.target.int_last))

    def binary(self, e: A.Binary, ctx: _Ctx) -> L.Term:
        o = e.op
        a = self.expr(e.left, ctx)
        b = self.expr(e.right, ctx)
        if o == "and":
            return L.and_(a, b)
        if o == "or":
            return L.or_(a, b)
        if o in L.RELATION:
            return L.RELATION[o](a, b)
        if a.sort == L.FLOAT:
            if o == "/":
                self.check(ctx, "division", e.loc, L.ne(b, L.flt(0.0)), b)
            r = L.op({"+": "f+", "-": "f-", "*": "f*", "/": "f/"}[o], a, b)
            self.check(ctx, "overflow", e.loc, L.op("is_finite", r), r)
            return r
        if o in ("/", "rem"):
            self.check(ctx, "division", e.loc, L.ne(b, L.int_(0)), b)
            r = L.op(o, a, b)
            if o == "/":
                self.check(ctx, "overflow", e.loc, self.in_base(r), r)
            return r
        r = L.op(o, a, b)
        self.check(ctx, "overflow", e.loc, self.in_base(r), r)
        return r

    def lookup(self, ref, ctx: _Ctx):
        key = ref.name.lower()
        if key not in ctx.env:
            raise VcGenError(getattr(ref, "loc", None), f"'{ref.name}' is not visible here")
        return ctx.env[key]

    def name(self, e: A.Name, ctx: _Ctx) -> L.Term:
        ref = e.ref
        if e.is_call:
            return self.call(ref, [], e.loc, ctx)
        if isinstance(ref, Builtin):
            return _const_of(ref.ty, ref.value)
        if isinstance(ref, A.ObjDecl) and ref.is_global:
            return self.global_value(ref)
        v = self.lookup(ref, ctx)
        if isinstance(v, View):
            raise VcGenError(e.loc, "array used as a scalar")
        self.init_check(ref, e.loc, ctx)
        return v

    def global_value(self, decl: A.ObjDecl) -> L.Term:
        # package-level objects are constants: their value is their initializer
        return self.expr(decl.init, _Ctx(None, None, {}, emit=False))

    def init_check(self, decl, loc: Loc, ctx: _Ctx) -> None:
        if ctx.emit and tracks_init(decl):
            flag = ctx.state.init.get(decl.name.lower(), L.FALSE)
            self.check(ctx, "initialization", loc, flag)

    def attr(self, e: A.Attr, ctx: _Ctx) -> L.Term:
        if e.attr == "result":
            if ctx.result is None:
                raise VcGenError(e.loc, "'Result outside a postcondition")
            return ctx.result
        ref = e.ref
        if isinstance(ref, (A.ObjDecl, A.Param)):
            view = self.array_ref(ref, ctx)
            if e.attr == "first":
                return view.first
            if e.attr == "last":
                return view.last
            return view.length()
        ty = ref
        if ty.base == "array":
            return L.int_({"first": ty.first, "last": ty.last, "length": ty.length}[e.attr])
        lo, hi = type_bounds(ty, self.target)
        return _const_of(ty, lo if e.attr == "first" else hi)

    def index(self, e: A.Apply, ctx: _Ctx) -> L.Term:
        view = self.array_ref(e.ref, ctx)
        i = self.expr(e.args[0], ctx)
        self.check(ctx, "index", e.loc, L.between(view.first, i, view.last), i)
        self.init_check(e.ref, e.loc, ctx)
        t = L.op("select", view.elems, i)
        self.range_fact(ctx, e.ref.ty.element, t)
        return t

    def array_ref(self, ref, ctx: _Ctx) -> View:
        if isinstance(ref, A.ObjDecl) and ref.is_global:
            ty = ref.ty
            init = self.expr(ref.init.value, _Ctx(None, None, {}, emit=False))
            return View(L.const_array(init, sort_of(ty)), L.int_(ty.first), L.int_(ty.last))
        return self.lookup(ref, ctx)

    def array(self, e, ctx: _Ctx, read: bool = True) -> View:
        """An array-valued expression (object or slice) as a view."""
        if isinstance(e, A.Name):
            view = self.array_ref(e.ref, ctx)
            if read:
                self.init_check(e.ref, e.loc, ctx)
            return view
        if isinstance(e, A.Slice):
            base = self.array_ref(e.ref, ctx)
            lo = self.expr(e.lo, ctx)
            hi = self.expr(e.hi, ctx)
            self.check(ctx, "index", e.loc, slice_ok(base, lo, hi))
            if read:
                self.init_check(e.ref, e.loc, ctx)
            return View(base.elems, lo, hi)
        raise VcGenError(e.loc, "array expression expected")

    # calls

    def call(self, sub, args: list, loc: Loc, ctx: _Ctx) -> L.Term:
        if isinstance(sub, BuiltinFunction):
            return L.op("sin", self.expr(args[0], ctx))
        actuals = self.actuals(sub, args, ctx)
        binding = formal_binding(sub, actuals)
        if sub.pre is not None:
            pre = self.contract(sub.pre, binding)
            self.check(ctx, "precondition", loc, pre)
        self.axioms.require(sub)
        result = L.app(qualified(sub), flatten(sub, actuals), sort_of(sub.ret_ty))
        if ctx.emit:
            self.range_fact(ctx, sub.ret_ty, result)
            if sub.post is not None:
                post = self.contract(sub.post, binding, result)
                self.fact(ctx, post, "callee_postcondition", sub.name)
        return result

    def actuals(self, sub: A.Subprogram, args: list, ctx: _Ctx) -> list:
        """Evaluate actuals left to right, with range checks on ``in`` values."""
        out = []
        for p, a in zip(sub.params, args):
            if p.ty.base == "array":
                out.append(self.array(a, ctx, read=p.mode != "out"))
                continue
            if p.mode == "out":
                out.append(None)
                continue
            v = self.expr(a, ctx)
            self.value_checks(p.ty, v, A.start_loc(a), ctx)
            out.append(v)
        return out

    def value_checks(self, ty, v: L.Term, loc: Loc, ctx: _Ctx) -> None:
        if needs_range_check(ty, self.target):
            self.check(ctx, "range", loc, range_predicate(ty, v, self.target), v)
        if needs_validity_check(ty):
            self.check(ctx, "float_validity", loc, validity_predicate(v), v)

    def contract(self, e, binding: dict, result: L.Term | None = None) -> L.Term:
        """A callee's contract expression over the given formal binding (no checks)."""
        return self.expr(e, _Ctx(None, None, binding, result, emit=False))


def slice_ok(base: View, lo: L.Term, hi: L.Term) -> L.Term:
    return L.or_(L.lt(hi, lo), L.and_(L.le(base.first, lo), L.le(hi, base.last)))


def formal_binding(sub: A.Subprogram, actuals: list) -> dict:
    return {p.name.lower(): a for p, a in zip(sub.params, actuals) if a is not None}


def flatten(sub: A.Subprogram, actuals: list) -> list:
    out = []
    for a in actuals:
        if isinstance(a, View):
            out.extend((a.elems, a.first, a.last))
        else:
            out.append(a)
    return out


# -- function axioms -------------------------------------------------------

class AxiomTable:
    """Universal axioms stating each called function's contract."""

    def __init__(self, target: TargetConfig):
        self.target = target
        self.facts: dict = {}  # function key -> Fact
        self.order: list = []
        self.translator = Translator(target, self)
        self._building: set = set()

    def require(self, sub: A.Subprogram) -> None:
        key = qualified(sub)
        if key in self.facts or key in self._building:
            return
        self._building.add(key)
        try:
            self.facts[key] = self.build(sub)
            self.order.append(key)
        finally:
            self._building.discard(key)

    def build(self, sub: A.Subprogram) -> Fact:
        bound, actuals, domain = [], [], []
        for p in sub.params:
            name = f"{sub.key}.{p.name.lower()}"
            if p.ty.base == "array":
                v = View(L.var(name, sort_of(p.ty)), L.var(name + "'first", L.INT), L.var(name + "'last", L.INT))
                bound.extend((v.elems, v.first, v.last))
                domain.append(L.le(v.first, L.op("+", v.last, L.int_(1))))
                actuals.append(v)
            else:
                v = L.var(name, sort_of(p.ty))
                bound.append(v)
                domain.append(range_predicate(p.ty, v, self.target))
                actuals.append(v)
        binding = formal_binding(sub, actuals)
        result = L.app(qualified(sub), flatten(sub, actuals), sort_of(sub.ret_ty))
        tr = self.translator
        hyp = L.and_(*domain, tr.contract(sub.pre, binding) if sub.pre is not None else L.TRUE)
        concl = range_predicate(sub.ret_ty, result, self.target)
        if sub.post is not None:
            concl = L.and_(tr.contract(sub.post, binding, result), concl)
        return Fact(L.forall(bound, L.implies(hyp, concl)), "callee_postcondition", sub.name)

    def list(self) -> list[Fact]:
        return [self.facts[k] for k in self.order]


def called_functions(sub: A.Subprogram) -> list:
    """Functions whose contracts a subprogram's VCs may mention, in first-use order."""
    seen: dict = {}
    todo = [sub]
    visited = set()
    while todo:
        s = todo.pop(0)
        if id(s) in visited:
            continue
        visited.add(id(s))
        exprs = [e for e in (s.pre, s.post) if e is not None]
        if s is sub:
            for o in s.locals or ():
                if o.init is not None:
                    exprs.append(o.init)
            for st in A.walk_stmts(s.body):
                exprs.extend(A.stmt_exprs(st))
        for e in exprs:
            for n in A.walk_expr(e):
                ref = getattr(n, "ref", None)
                is_call = (isinstance(n, A.Apply) and n.kind == "call") or (isinstance(n, A.Name) and n.is_call)
                if is_call and isinstance(ref, A.Subprogram):
                    if ref.kind == "function":
                        seen.setdefault(qualified(ref), ref)
                    todo.append(ref)
    return list(seen.values())


# -- per-subprogram generation ------------------------------------------------

class SubprogramGenerator:
    def __init__(self, program: "ProgramGenerator", sub: A.Subprogram):
        self.program = program
        self.sub = sub
        self.target = program.target
        self.axioms = AxiomTable(self.target)
        self.tr = Translator(self.target, self.axioms)
        self.vcs: list[VC] = []
        self.ranges: list[Fact] = []
        self.versions: dict = {}
        self.notes: list = []
        self.exit_facts: list = []
        self.callees: list = []
        self.target_facts: list[Fact] = []
        self.uses_floats = False
        self.inputs: frozenset = frozenset()

    # bookkeeping

    def fresh(self, name: str, sort: str) -> L.Term:
        n = self.versions.get(name, -1) + 1
        self.versions[name] = n
        return L.var(f"{name}@{n}", sort)

    def add_range(self, ty, t: L.Term, state: State | None = None) -> None:
        """Record that ``t`` lies in ``ty``: globally for inputs, on the path otherwise."""
        if ty is None:
            return
        pred = range_predicate(ty, t, self.target)
        if pred is not L.TRUE:
            (self.ranges if state is None else state.facts).append(Fact(pred, "subtype_range", ty.name))

    def hypotheses(self, state: State) -> tuple:
        pre = [f for f in state.facts if f.source == "precondition"]
        ranges = [f for f in state.facts if f.provenance == "subtype_range"]
        rest = [f for f in state.facts if f.source != "precondition" and f.provenance != "subtype_range"]
        return tuple(pre + self.ranges + ranges + self.target_facts + self.axioms.list() + rest)

    def check(self, state: State, kind: str, loc: Loc, goal: L.Term, subject, origin: str) -> VC:
        pkg = self.sub.package.key if self.sub.package is not None else ""
        vc = VC(
            id=f"{pkg}.{self.sub.key}.{len(self.vcs) + 1}",
            kind=kind, loc=loc, goal=goal, hypotheses=self.hypotheses(state),
            package=pkg, subprogram=self.sub.key, origin=origin, subject=subject, inputs=self.inputs,
        )
        self.vcs.append(vc)
        if goal is not L.TRUE:
            state.facts.append(Fact(goal, "prior_check_success", vc.id))
        return vc

    def ctx(self, state: State, result: L.Term | None = None, origin: str = "body") -> _Ctx:
        return _Ctx(self, state, state.env, result, True, origin)

    # entry

    def run(self) -> SubprogramVCs:
        sub = self.sub
        self.uses_floats = _mentions_floats(sub)
        self.target_facts.append(Fact(L.eq(INT_WIDTH, L.int_(self.target.int_width)), "target_axiom", "int_width"))
        if self.uses_floats:
            self.target_facts.append(
                Fact(L.eq(DENORM, L.boolc(self.target.supports_denorm)), "target_axiom", "denorm"))
        for f in called_functions(sub):
            self.axioms.require(f)

        state = State({}, {}, [])
        formal_initial: dict = {}
        for p in sub.params:
            key = p.name.lower()
            if p.ty.base == "array":
                first, last = L.var(f"{key}'first", L.INT), L.var(f"{key}'last", L.INT)
                view = View(self.fresh(key, sort_of(p.ty)), first, last)
                self.add_range(_INDEX_TY, first)
                self.add_range(_INDEX_TY, last)
                self.ranges.append(Fact(L.le(first, L.op("+", last, L.int_(1))), "subtype_range", p.ty.name))
                state.env[key] = view
                formal_initial[key] = (view.elems, first, last)
            else:
                v = self.fresh(key, sort_of(p.ty))
                state.env[key] = v
                if p.mode != "out":
                    self.add_range(p.ty, v)
                formal_initial[key] = (v,)
            if tracks_init(p):
                state.init[key] = L.FALSE
        # an out parameter's incoming value is not an input, but an out array's bounds are
        self.inputs = frozenset(
            t for p in sub.params
            for t in formal_initial[p.name.lower()][(1 if p.mode == "out" else 0):])

        if sub.pre is not None:
            pre_state = State(state.env, state.init, [])
            pre = self.tr.expr(sub.pre, self.ctx(pre_state, origin="pre"))
            state.facts.append(Fact(pre, "path_condition", "precondition"))

        if sub.body is not None:
            for o in sub.locals or ():
                self.declare(o, state)
            self.block(sub.body, state)
            if state.alive:
                self.exit(state, None, sub.end)

        exports, finals = self.exports(formal_initial)
        return SubprogramVCs(
            sub, self.vcs, self.notes, exports, {k: (v, finals.get(k)) for k, v in formal_initial.items()},
            self.callees, self.axioms.list(),
        )

    def exports(self, formal_initial: dict) -> tuple[list, dict]:
        """Suppression facts present at every exit and mentioning only formals."""
        if not self.exit_facts:
            return [], {}
        finals: dict = {}
        if len(self.exit_facts) == 1:
            env = self.exit_facts[0][1]
            for p in self.sub.params:
                v = env[p.name.lower()]
                finals[p.name.lower()] = (v.elems,) if isinstance(v, View) else (v,)
        allowed = set()
        for syms in formal_initial.values():
            allowed.update(syms)
        for syms in finals.values():
            allowed.update(syms)
        common = None
        for facts, _ in self.exit_facts:
            s = {f for f in facts if f.provenance == "suppression"}
            common = s if common is None else common & s
        first = self.exit_facts[0][0]
        out = [f for f in first if f in common and L.free_vars(f.predicate) <= allowed]
        return out, finals

    # declarations and statements

    def declare(self, o: A.ObjDecl, state: State) -> None:
        key = o.name.lower()
        ty = o.ty
        if ty.base == "array":
            view = View(self.fresh(key, sort_of(ty)), L.int_(ty.first), L.int_(ty.last))
            state.env[key] = view
            if o.init is not None:
                self.assign_array(view, o.init, o, state, o.loc, key)
            else:
                state.init[key] = L.FALSE
            return
        if o.init is None:
            state.env[key] = self.fresh(key, sort_of(ty))
            state.init[key] = L.FALSE
            return
        v = self.tr.expr(o.init, self.ctx(state))
        self.tr.value_checks(ty, v, o.loc, self.ctx(state))
        self.bind(state, key, ty, v)

    def bind(self, state: State, key: str, ty, value: L.Term) -> L.Term:
        sym = self.fresh(key, value.sort)
        state.env[key] = sym
        state.facts.append(Fact(L.define(sym, value), "path_condition", "assignment"))
        self.add_range(ty, sym, state)
        if key in state.init:
            state.init[key] = L.TRUE
        return sym

    def block(self, stmts: list, state: State) -> None:
        for s in stmts:
            if not state.alive:
                return
            self.stmt(s, state)

    def stmt(self, s, state: State) -> None:
        if isinstance(s, A.Assign):
            self.assign(s, state)
        elif isinstance(s, A.If):
            self.if_(s, state)
        elif isinstance(s, A.While):
            self.loop(s, state)
        elif isinstance(s, A.Return):
            value = None
            if s.value is not None:
                value = self.tr.expr(s.value, self.ctx(state))
                self.tr.value_checks(self.sub.ret_ty, value, s.loc, self.ctx(state))
            self.exit(state, value, s.loc)
        elif isinstance(s, A.CallStmt):
            c = s.call
            self.proc_call(c.ref, [] if isinstance(c, A.Name) else c.args, c.loc, state)
        elif isinstance(s, A.Pragma):
            self.pragma(s, state)
        else:
            raise VcGenError(s.loc, f"unsupported statement {type(s).__name__}")

    def exit(self, state: State, value, loc: Loc) -> None:
        sub = self.sub
        if sub.kind == "function" and value is None:
            self.check(state, "postcondition", loc, L.FALSE, None, "post")
        elif sub.post is not None:
            post = self.tr.expr(sub.post, self.ctx(state, value, origin="post"))
            self.check(state, "postcondition", loc, post, value, "post")
        self.exit_facts.append((list(state.facts), dict(state.env)))
        state.alive = False

    def assign(self, s: A.Assign, state: State) -> None:
        t = s.target
        ctx = self.ctx(state)
        if isinstance(t, A.Name):
            key = t.ident.lower()
            if t.ty.base == "array":
                self.assign_array(state.env[key], s.value, t.ref, state, s.loc, key)
                return
            v = self.tr.expr(s.value, ctx)
            self.tr.value_checks(t.ty, v, s.loc, ctx)
            self.bind(state, key, t.ty, v)
            return
        key = t.prefix.lower()
        view = state.env[key]
        if isinstance(t, A.Apply):
            i = self.tr.expr(t.args[0], ctx)
            self.check(state, "index", t.loc, L.between(view.first, i, view.last), i, "body")
            v = self.tr.expr(s.value, ctx)
            self.tr.value_checks(t.ty, v, s.loc, ctx)
            elems = self.fresh(key, view.elems.sort)
            state.facts.append(Fact(L.define(elems, L.op("store", view.elems, i, v)), "path_condition", "assignment"))
            state.env[key] = View(elems, view.first, view.last)
            return
        lo = self.tr.expr(t.lo, ctx)
        hi = self.tr.expr(t.hi, ctx)
        self.check(state, "index", t.loc, slice_ok(view, lo, hi), None, "body")
        target_view = View(view.elems, lo, hi)
        self.assign_array(target_view, s.value, None, state, s.loc, key, whole=view)

    def assign_array(self, dest: View, value, decl, state: State, loc: Loc, key: str,
                     whole: View | None = None) -> None:
        ctx = self.ctx(state)
        elem_ty = value.ty.element
        if isinstance(value, A.Aggregate):
            v = self.tr.expr(value.value, ctx)
            self.tr.value_checks(elem_ty, v, loc, ctx)
            if decl is not None and is_array_formal(decl):
                # the analysis checks the aggregate against the formal's nominal bounds
                self.check(state, "initialization", loc, L.eq(dest.length(), L.int_(decl.ty.length)),
                           dest.length(), "body")
            new = L.const_array(v, dest.elems.sort) if whole is None else None
        else:
            src = self.tr.array(value, ctx)
            self.check(state, "range", loc, L.eq(dest.length(), src.length()), None, "body")
            same_origin = whole is None and dest.first is src.first
            new = src.elems if same_origin else None
        elems = self.fresh(key, dest.elems.sort)
        if new is not None:
            state.facts.append(Fact(L.define(elems, new), "path_condition", "assignment"))
        base = whole or dest
        state.env[key] = View(elems, base.first, base.last)
        if key in state.init and whole is None:
            state.init[key] = L.TRUE

    def if_(self, s: A.If, state: State) -> None:
        c = self.tr.expr(s.cond, self.ctx(state))
        then_state = state.copy()
        then_state.facts.append(Fact(c, "path_condition", "branch"))
        self.block(s.then_body, then_state)
        else_state = state.copy()
        else_state.facts.append(Fact(L.not_(c), "path_condition", "branch"))
        if s.else_body is not None:
            self.block(s.else_body, else_state)
        self.merge(state, c, then_state, else_state)

    def merge(self, state: State, c: L.Term, t: State, e: State) -> None:
        if not t.alive and not e.alive:
            state.alive = False
            return
        if not t.alive or not e.alive:
            live = t if t.alive else e
            state.env, state.init, state.facts = live.env, live.init, live.facts
            return
        t_set, e_set = set(t.facts), set(e.facts)
        facts = [f for f in t.facts if f in e_set]
        facts += [f.guarded(c) for f in t.facts if f not in e_set]
        facts += [f.guarded(L.not_(c)) for f in e.facts if f not in t_set]
        env = dict(t.env)
        for key, tv in t.env.items():
            ev = e.env[key]
            if tv is ev:
                continue
            if isinstance(tv, View):
                elems = self.fresh(key, tv.elems.sort)
                facts.append(Fact(L.define(elems, L.ite(c, tv.elems, ev.elems)), "path_condition", "merge"))
                env[key] = View(elems, tv.first, tv.last)
            else:
                sym = self.fresh(key, tv.sort)
                facts.append(Fact(L.define(sym, L.ite(c, tv, ev)), "path_condition", "merge"))
                ty = self.object_type(key)
                if range_predicate(ty, sym, self.target) is not L.TRUE:
                    facts.append(Fact(range_predicate(ty, sym, self.target), "subtype_range", ty.name))
                env[key] = sym
        init = {k: L.ite(c, t.init[k], e.init[k]) for k in t.init}
        state.env, state.init, state.facts = env, init, facts

    def object_type(self, key: str):
        for p in self.sub.params:
            if p.name.lower() == key:
                return p.ty
        for o in self.sub.locals or ():
            if o.name.lower() == key:
                return o.ty
        return None

    def loop(self, s: A.While, state: State) -> None:
        invariant = s.body[0] if s.body and isinstance(s.body[0], A.Pragma) and s.body[0].name == "loop_invariant" \
            else None
        entry = state.copy()
        if invariant is not None:
            quiet = _Ctx(self, entry, entry.env, emit=False)
            c0 = self.tr.expr(s.cond, quiet)
            inv0 = self.tr.expr(invariant.arg, quiet)
            probe = entry.copy()
            probe.facts.append(Fact(c0, "path_condition", "loop entry"))
            self.check(probe, "loop_invariant_init", invariant.loc, inv0, None, "body")

        havoc = state.copy()
        for key in sorted(assigned_in(s.body)):
            cur = havoc.env.get(key)
            if cur is None:
                continue
            if isinstance(cur, View):
                havoc.env[key] = View(self.fresh(key, cur.elems.sort), cur.first, cur.last)
            else:
                sym = self.fresh(key, cur.sort)
                havoc.env[key] = sym
                self.add_range(self.object_type(key), sym, havoc)
            if key in havoc.init and havoc.init[key] is not L.TRUE:
                havoc.init[key] = self.fresh(key + "'init", L.BOOL)
        if invariant is None:
            self.notes.append((s.loc, "loop without Loop_Invariant: body facts reduced to subtype ranges"))
            havoc.facts = [f for f in havoc.facts if f.provenance in ("subtype_range", "target_axiom")]
        after_facts = list(havoc.facts)
        body_state = havoc.copy()
        c = self.tr.expr(s.cond, self.ctx(body_state))
        body_state.facts.append(Fact(c, "path_condition", "loop condition"))
        rest = s.body
        if invariant is not None:
            inv = self.tr.expr(invariant.arg, self.ctx(body_state))
            body_state.facts.append(Fact(inv, "path_condition", "loop invariant"))
            rest = s.body[1:]
        self.block(rest, body_state)
        if invariant is not None and body_state.alive:
            quiet = _Ctx(self, body_state, body_state.env, emit=False)
            c1 = self.tr.expr(s.cond, quiet)
            inv1 = self.tr.expr(invariant.arg, quiet)
            self.check(body_state, "loop_invariant_preserve", invariant.loc, L.implies(c1, inv1), None, "body")
        # after the loop: the havoc state, with the condition false
        if invariant is None:
            after_facts = [f for f in entry.facts]
        state.env, state.init = havoc.env, havoc.init
        state.facts = after_facts + [Fact(L.not_(c), "path_condition", "loop exit")]

    def proc_call(self, sub, args: list, loc: Loc, state: State) -> None:
        ctx = self.ctx(state)
        self.callees.append(qualified(sub))
        actuals = self.tr.actuals(sub, args, ctx)
        binding = formal_binding(sub, actuals)
        if sub.pre is not None:
            self.check(state, "precondition", loc, self.tr.contract(sub.pre, binding), None, "body")
        # effects on out and in out actuals
        after = list(actuals)
        copy_back = []
        for k, (p, a) in enumerate(zip(sub.params, args)):
            if p.mode == "in":
                continue
            if p.ty.base == "array":
                key = a.ref.name.lower()
                old = actuals[k]
                elems = self.fresh(key, old.elems.sort)
                cur = state.env[key]
                state.env[key] = View(elems, cur.first, cur.last)
                after[k] = View(elems, old.first, old.last)
                if p.mode == "out" and key in state.init and isinstance(a, A.Name):
                    state.init[key] = L.TRUE
                continue
            key = a.ref.name.lower()
            sym = self.fresh(key, sort_of(p.ty))
            self.add_range(p.ty, sym, state)
            state.env[key] = sym
            after[k] = sym
            if key in state.init:
                state.init[key] = L.TRUE
            copy_back.append((a, p, sym))
        binding_after = formal_binding(sub, after)
        if sub.post is not None:
            post = self.tr.contract(sub.post, binding_after)
            if post is not L.TRUE:
                state.facts.append(Fact(post, "callee_postcondition", sub.name))
        for fact in self.program.exports_of(sub, binding, binding_after):
            state.facts.append(fact)
        for a, p, sym in copy_back:
            decl_ty = a.ref.ty
            if needs_copy_back_check(decl_ty, p.ty, self.target):
                self.check(state, "range", A.start_loc(a), range_predicate(decl_ty, sym, self.target), sym, "body")
            self.add_range(decl_ty, sym, state)

    def pragma(self, s: A.Pragma, state: State) -> None:
        name = s.name
        if name == "annotate":
            self.suppress(s, state)
            return
        if name == "loop_invariant":
            return  # handled by the enclosing loop
        p = self.tr.expr(s.arg, self.ctx(state))
        if name == "assume":
            state.facts.append(Fact(p, "pragma_assume", str(s.loc)))
        elif name == "assert":
            self.check(state, "assertion", s.loc, p, None, "body")
        elif name == "assert_and_cut":
            vc = self.check(state, "assertion", s.loc, p, None, "body")
            kept = [f for f in state.facts if f.provenance == "subtype_range"]
            state.facts = kept + ([Fact(p, "prior_check_success", vc.id)] if p is not L.TRUE else [])

    def suppress(self, s: A.Pragma, state: State) -> None:
        if not self.vcs:
            raise VcGenError(s.loc, "pragma Annotate without a preceding check")
        vc = self.vcs[-1]
        if vc.suppressed:
            raise VcGenError(s.loc, "pragma Annotate without a preceding check")
        vc.suppression = Suppression(vc.loc, s.message or "", s.loc)
        state.facts = [f for f in state.facts if not (f.provenance == "prior_check_success" and f.source == vc.id)]
        if vc.goal is not L.TRUE:
            state.facts.append(Fact(vc.goal, "suppression", str(vc.loc)))


_INDEX_TY = None  # set below to the Integer subtype


def _mentions_floats(sub: A.Subprogram) -> bool:
    def is_float(ty) -> bool:
        return ty is not None and (ty.base == "float" or (ty.base == "array" and ty.element.base == "float"))

    if any(is_float(p.ty) for p in sub.params) or is_float(sub.ret_ty):
        return True
    if any(is_float(o.ty) for o in sub.locals or ()):
        return True
    exprs = [e for e in (sub.pre, sub.post) if e is not None]
    for st in A.walk_stmts(sub.body):
        exprs.extend(A.stmt_exprs(st))
    return any(is_float(n.ty) for e in exprs for n in A.walk_expr(e))


def assigned_in(stmts: list) -> set:
    """Objects a statement list may modify."""
    out = set()
    for s in A.walk_stmts(stmts):
        if isinstance(s, A.Assign):
            t = s.target
            out.add((t.ident if isinstance(t, A.Name) else t.prefix).lower())
        elif isinstance(s, A.CallStmt) and isinstance(s.call, A.Apply):
            sub = s.call.ref
            for p, a in zip(sub.params, s.call.args):
                if p.mode != "in":
                    out.add((a.ident if isinstance(a, A.Name) else a.prefix).lower())
    return out


# -- whole programs ----------------------------------------------------------

class ProgramGenerator:
    def __init__(self, program: ResolvedAst | None, target: TargetConfig = DEFAULT_TARGET):
        self.program = program
        self.target = target
        self.cache: dict = {}
        self.in_progress: set = set()

    def generate(self, sub: A.Subprogram) -> SubprogramVCs:
        key = id(sub)
        if key not in self.cache:
            self.in_progress.add(key)
            try:
                self.cache[key] = SubprogramGenerator(self, sub).run()
            finally:
                self.in_progress.discard(key)
        return self.cache[key]

    def exports_of(self, sub: A.Subprogram, before: dict, after: dict) -> list[Fact]:
        """Suppression facts of a callee, restated over the caller's actuals."""
        if sub.body is None or id(sub) in self.in_progress:
            return []
        res = self.generate(sub)
        if not res.exports:
            return []
        mapping = {}
        for p in sub.params:
            key = p.name.lower()
            initial, final = res.formal_symbols[key]
            b, a = before.get(key), after.get(key)
            if isinstance(b, View):
                mapping.update(zip(initial, (b.elems, b.first, b.last)))
                if final is not None and isinstance(a, View):
                    mapping[final[0]] = a.elems
            else:
                if b is not None:
                    mapping[initial[0]] = b
                if final is not None and a is not None:
                    mapping[final[0]] = a
        out = []
        for f in res.exports:
            if L.free_vars(f.predicate) <= mapping.keys():
                out.append(Fact(L.substitute(f.predicate, mapping), "suppression", f.source))
        return out


def generate_program(program: ResolvedAst, target: TargetConfig = DEFAULT_TARGET) -> ProgramVCs:
    gen = ProgramGenerator(program, target)
    results, errors = [], []
    for _, sub in program.subprograms():
        try:
            results.append(gen.generate(sub))
        except VcGenError as exc:
            errors.append(exc.diagnostic)
            results.append(SubprogramVCs(sub, [], [], [], {}, [], []))
    return ProgramVCs(program, target, results, sorted(errors))


def generate_vcs(sub: A.Subprogram, target: TargetConfig = DEFAULT_TARGET) -> list[VC]:
    """VCs of one subprogram, in control-flow order; spec-only subprograms yield none."""
    if sub.body is None:
        return []
    return ProgramGenerator(None, target).generate(sub).vcs


def apply_pragmas(vcs: list[VC], sub: A.Subprogram) -> list[VC]:
    """Pragma effects are applied during generation; this returns the VCs unchanged.

    Kept as a separate entry point so callers can state the pipeline step
    explicitly and check that every Annotate found a check to suppress.
    """
    annotates = [s for s in A.walk_stmts(sub.body) if isinstance(s, A.Pragma) and s.name == "annotate"]
    if len([v for v in vcs if v.suppressed]) != len(annotates):
        raise VcGenError(sub.loc, "pragma Annotate without a preceding check")
    return vcs


def loop_obligations(loop: A.While, vcs: list[VC]) -> tuple[VC, VC]:
    """The (init, preserve) VCs of a loop carrying a Loop_Invariant."""
    if not loop.body or not (isinstance(loop.body[0], A.Pragma) and loop.body[0].name == "loop_invariant"):
        raise VcGenError(loop.loc, "loop without Loop_Invariant")
    loc = loop.body[0].loc
    init = next(v for v in vcs if v.kind == "loop_invariant_init" and v.loc == loc)
    preserve = [v for v in vcs if v.kind == "loop_invariant_preserve" and v.loc == loc]
    return init, (preserve[0] if preserve else None)


def _index_type():
    from .frontend.types import INTEGER

    return INTEGER


_INDEX_TY = _index_type()
