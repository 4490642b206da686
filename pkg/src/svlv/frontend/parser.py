"""Recursive-descent parser for SVL.

On a syntax error the parser records a diagnostic and skips to the next
statement (or declaration) boundary, so one run reports every independent
error.
"""

from __future__ import annotations

from fractions import Fraction

from . import ast as A
from .lexer import Token, tokenize
from .source import Diagnostic, Loc, SourceUnit

DIMENSION_NAMES = ("length", "mass", "time", "temperature", "current", "angle", "aux")
PRAGMAS = {"assert", "assume", "assert_and_cut", "loop_invariant", "annotate"}
ATTRIBUTES = {"first", "last", "length", "result"}
RELOPS = {"=", "/=", "<", "<=", ">", ">="}


class _Abort(Exception):
    """Raised to unwind to the nearest recovery point."""


class Parser:
    def __init__(self, src: SourceUnit):
        self.src = src
        self.toks, self.diags = tokenize(src)
        self.pos = 0

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.tok.is_(kind, text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        self.error(self.tok, f"expected {what or repr(text or kind)}")
        raise _Abort

    def error(self, tok: Token, msg: str) -> None:
        if tok.kind == "eof":
            self.diags.append(Diagnostic(tok.loc, f"unterminated construct: {msg}, found end of file"))
        else:
            self.diags.append(Diagnostic(tok.loc, f"syntax error: {msg}, found {tok.text!r}"))

    def prev_end(self) -> Loc:
        t = self.toks[self.pos - 1] if self.pos else self.tok
        return self.src.loc(max(t.end - 1, 0))

    def sync(self, stop_kw: tuple = ("end", "else", "begin")) -> None:
        while not self.at("eof"):
            if self.at("sym", ";"):
                self.advance()
                return
            if self.tok.kind == "kw" and self.tok.text.lower() in stop_kw:
                return
            self.advance()

    # -- units -------------------------------------------------------------

    def parse(self) -> A.Ast:
        pkgs = []
        while not self.at("eof"):
            start = self.pos
            try:
                pkgs.append(self.package())
            except _Abort:
                self.sync(stop_kw=("package",))
                if self.pos == start:
                    self.advance()
        if not pkgs and not self.diags:
            self.error(self.tok, "expected 'package'")
        return A.Ast(pkgs, {self.src.path: self.src})

    def package(self) -> A.Package:
        start = self.expect("kw", "package")
        name = self.expect("id", what="package name").text
        self.expect("kw", "is")
        decls = []
        while not self.at("kw", "end"):
            if self.at("eof"):
                self.error(self.tok, f"expected 'end {name};'")
                raise _Abort
            before = self.pos
            try:
                d = self.decl()
                if d is not None:
                    decls.append(d)
            except _Abort:
                self.sync(stop_kw=("end", "subtype", "type", "function", "procedure"))
                if self.pos == before:
                    self.advance()
        self.advance()
        end_name = self.expect("id", what="package name after 'end'")
        if end_name.text.lower() != name.lower():
            self.error(end_name, f"expected 'end {name}'")
        self.expect("sym", ";")
        return A.Package(name, decls, start.loc, self.prev_end())

    def decl(self):
        if self.at("kw", "subtype"):
            return self.subtype_decl()
        if self.at("kw", "type"):
            return self.array_decl()
        if self.at("kw", "function") or self.at("kw", "procedure"):
            return self.subprogram()
        if self.at("id"):
            return self.obj_decl()
        self.error(self.tok, "expected a declaration")
        raise _Abort

    def subtype_decl(self) -> A.SubtypeDecl:
        start = self.advance()
        name = self.expect("id", what="subtype name").text
        self.expect("kw", "is")
        base = self.expect("id", what="base type name").text
        lo = hi = None
        dims = None
        if self.accept("kw", "range"):
            lo = self.expr()
            self.expect("sym", "..")
            hi = self.expr()
        if self.accept("kw", "dim"):
            self.expect("sym", "(")
            items = [self.dim_item()]
            while self.accept("sym", ","):
                items.append(self.dim_item())
            self.expect("sym", ")")
            dims = tuple(items)
        self.expect("sym", ";")
        return A.SubtypeDecl(name, base, lo, hi, dims, start.loc, self.prev_end())

    def dim_item(self) -> tuple:
        t = self.tok
        if t.kind not in ("id", "kw") or t.text.lower() not in DIMENSION_NAMES:
            self.error(t, "expected a dimension name")
            raise _Abort
        self.advance()
        self.expect("sym", "=>")
        return (t.text.lower(), self.rational())

    def rational(self) -> Fraction:
        neg = bool(self.accept("sym", "-"))
        num = self.expect("int", what="integer exponent").value
        den = 1
        if self.accept("sym", "/"):
            d = self.expect("int", what="integer denominator")
            den = d.value
            if den == 0:
                self.diags.append(Diagnostic(d.loc, "malformed literal: zero denominator"))
                den = 1
        value = Fraction(num, den)
        return -value if neg else value

    def signed_int(self) -> int:
        neg = bool(self.accept("sym", "-"))
        v = self.expect("int", what="integer literal").value
        return -v if neg else v

    def array_decl(self) -> A.ArrayTypeDecl:
        start = self.advance()
        name = self.expect("id", what="type name").text
        self.expect("kw", "is")
        self.expect("kw", "array")
        self.expect("sym", "(")
        first = self.signed_int()
        self.expect("sym", "..")
        last = self.signed_int()
        self.expect("sym", ")")
        self.expect("kw", "of")
        elem = self.expect("id", what="element type").text
        self.expect("sym", ";")
        return A.ArrayTypeDecl(name, first, last, elem, start.loc, self.prev_end())

    def obj_decl(self) -> A.ObjDecl:
        start = self.advance()
        self.expect("sym", ":")
        type_name = self.expect("id", what="type name").text
        init = None
        if self.accept("sym", ":="):
            init = self.expr()
        self.expect("sym", ";")
        return A.ObjDecl(start.text, type_name, init, start.loc, self.prev_end())

    def subprogram(self) -> A.Subprogram:
        start = self.advance()
        kind = start.text.lower()
        name = self.expect("id", what="subprogram name").text
        params = []
        if self.accept("sym", "("):
            if not self.at("sym", ")"):
                params.append(self.param())
                while self.accept("sym", ";"):
                    params.append(self.param())
            self.expect("sym", ")")
        ret = None
        if kind == "function":
            self.expect("kw", "return")
            ret = self.expect("id", what="return type").text
        pre = post = None
        if self.accept("kw", "with"):
            while True:
                t = self.expect("id", what="'Pre' or 'Post'")
                aspect = t.text.lower()
                if aspect not in ("pre", "post"):
                    self.error(t, "expected 'Pre' or 'Post'")
                    raise _Abort
                self.expect("sym", "=>")
                e = self.expr()
                if aspect == "pre":
                    pre = e
                else:
                    post = e
                if not self.accept("sym", ","):
                    break
        if self.accept("sym", ";"):
            return A.Subprogram(kind, name, params, ret, pre, post, None, None, start.loc, self.prev_end())
        self.expect("kw", "is")
        local_decls = []
        while not self.at("kw", "begin"):
            if self.at("eof") or self.at("kw", "end"):
                self.error(self.tok, "expected 'begin'")
                raise _Abort
            before = self.pos
            try:
                local_decls.append(self.obj_decl())
            except _Abort:
                self.sync(stop_kw=("begin", "end"))
                if self.pos == before:
                    self.advance()
        self.advance()
        body = self.stmts(("end",))
        self.expect("kw", "end", what=f"'end {name};'")
        end_name = self.expect("id", what="subprogram name after 'end'")
        if end_name.text.lower() != name.lower():
            self.error(end_name, f"expected 'end {name}'")
        self.expect("sym", ";")
        return A.Subprogram(kind, name, params, ret, pre, post, local_decls, body, start.loc, self.prev_end())

    def param(self) -> A.Param:
        t = self.expect("id", what="parameter name")
        self.expect("sym", ":")
        mode = "in"
        if self.accept("kw", "in"):
            mode = "in out" if self.accept("kw", "out") else "in"
        elif self.accept("kw", "out"):
            mode = "out"
        type_name = self.expect("id", what="parameter type").text
        return A.Param(t.text, mode, type_name, t.loc)

    # -- statements --------------------------------------------------------

    def stmts(self, terminators: tuple) -> list:
        out = []
        while True:
            if self.tok.kind == "kw" and self.tok.text.lower() in terminators:
                return out
            if self.at("eof"):
                return out
            before = self.pos
            try:
                out.append(self.stmt())
            except _Abort:
                self.sync()
                if self.pos == before:
                    self.advance()

    def stmt(self):
        t = self.tok
        if t.is_("kw", "if"):
            self.advance()
            cond = self.expr()
            self.expect("kw", "then")
            then_body = self.stmts(("else", "end"))
            else_body = None
            if self.accept("kw", "else"):
                else_body = self.stmts(("end",))
            self.expect("kw", "end", what="'end if'")
            self.expect("kw", "if")
            self.expect("sym", ";")
            return A.If(cond, then_body, else_body, t.loc, self.prev_end())
        if t.is_("kw", "while"):
            self.advance()
            cond = self.expr()
            self.expect("kw", "loop")
            body = self.stmts(("end",))
            self.expect("kw", "end", what="'end loop'")
            self.expect("kw", "loop")
            self.expect("sym", ";")
            return A.While(cond, body, t.loc, self.prev_end())
        if t.is_("kw", "return"):
            self.advance()
            value = None if self.at("sym", ";") else self.expr()
            self.expect("sym", ";")
            return A.Return(value, t.loc, self.prev_end())
        if t.is_("kw", "pragma"):
            return self.pragma()
        if t.kind == "id":
            target = self.name()
            if self.accept("sym", ":="):
                value = self.expr()
                self.expect("sym", ";")
                return A.Assign(target, value, t.loc, self.prev_end())
            if isinstance(target, (A.Name, A.Apply)):
                self.expect("sym", ";", what="':=' or ';'")
                return A.CallStmt(target, t.loc, self.prev_end())
            self.error(self.tok, "expected ':='")
            raise _Abort
        self.error(t, "expected a statement")
        raise _Abort

    def pragma(self) -> A.Pragma:
        start = self.advance()
        t = self.expect("id", what="pragma name")
        name = t.text.lower()
        if name not in PRAGMAS:
            self.error(t, "unknown pragma")
            raise _Abort
        self.expect("sym", "(")
        if name == "annotate":
            # the tool name is optional: Annotate (GNATprove, False_Positive, "...")
            if self.at("id", "gnatprove"):
                self.advance()
                self.expect("sym", ",")
            self.expect("id", "false_positive", what="'False_Positive'")
            self.expect("sym", ",")
            msg = self.expect("str", what="justification string").value
            while self.accept("sym", ","):
                # trailing justification fields are accepted and ignored
                if not (self.accept("str") or self.accept("id")):
                    self.error(self.tok, "expected a string")
                    raise _Abort
            self.expect("sym", ")")
            self.expect("sym", ";")
            return A.Pragma(name, None, msg, start.loc, self.prev_end())
        arg = self.expr()
        self.expect("sym", ")")
        self.expect("sym", ";")
        return A.Pragma(name, arg, None, start.loc, self.prev_end())

    # -- expressions -------------------------------------------------------

    def expr(self):
        left = self.and_expr()
        while self.at("kw", "or"):
            op = self.advance()
            left = A.Binary("or", left, self.and_expr(), op.loc)
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.at("kw", "and"):
            op = self.advance()
            left = A.Binary("and", left, self.not_expr(), op.loc)
        return left

    def not_expr(self):
        if self.at("kw", "not"):
            op = self.advance()
            return A.Unary("not", self.not_expr(), op.loc)
        return self.relation()

    def relation(self):
        left = self.additive()
        if self.tok.kind == "sym" and self.tok.text in RELOPS:
            op = self.advance()
            left = A.Binary(op.text, left, self.additive(), op.loc)
            if self.tok.kind == "sym" and self.tok.text in RELOPS:
                self.error(self.tok, "relational operators do not associate")
                raise _Abort
        return left

    def additive(self):
        left = self.mult()
        while self.tok.kind == "sym" and self.tok.text in ("+", "-"):
            op = self.advance()
            left = A.Binary(op.text, left, self.mult(), op.loc)
        return left

    def mult(self):
        left = self.unary()
        while (self.tok.kind == "sym" and self.tok.text in ("*", "/")) or self.at("kw", "rem"):
            op = self.advance()
            left = A.Binary(op.text.lower(), left, self.unary(), op.loc)
        return left

    def unary(self):
        if self.at("sym", "-"):
            op = self.advance()
            return A.Unary("-", self.unary(), op.loc)
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return A.IntLit(t.value, t.loc)
        if t.kind == "real":
            self.advance()
            return A.RealLit(t.value, t.text, t.loc)
        if t.is_("sym", "("):
            self.advance()
            if self.accept("kw", "others"):
                self.expect("sym", "=>")
                value = self.expr()
                self.expect("sym", ")")
                return A.Aggregate(value, t.loc)
            e = self.expr()
            self.expect("sym", ")")
            return e
        if t.kind == "id":
            return self.name()
        self.error(t, "expected an expression")
        raise _Abort

    def name(self):
        t = self.expect("id", what="a name")
        if self.at("sym", "'"):
            self.advance()
            a = self.tok
            if a.kind != "id" or a.text.lower() not in ATTRIBUTES:
                self.error(a, "expected 'First', 'Last', 'Length' or 'Result'")
                raise _Abort
            self.advance()
            return A.Attr(t.text, a.text.lower(), t.loc)
        if self.at("sym", "("):
            self.advance()
            if self.accept("sym", ")"):
                return A.Apply(t.text, [], t.loc)
            first = self.expr()
            if self.accept("sym", ".."):
                hi = self.expr()
                self.expect("sym", ")")
                return A.Slice(t.text, first, hi, t.loc)
            args = [first]
            while self.accept("sym", ","):
                args.append(self.expr())
            self.expect("sym", ")")
            return A.Apply(t.text, args, t.loc)
        return A.Name(t.text, t.loc)


def parse_unit(src: SourceUnit) -> tuple[A.Ast | None, list[Diagnostic]]:
    """Parse one source unit. Returns (ast, diagnostics); ast is None on error."""
    p = Parser(src)
    tree = p.parse()
    diags = sorted(set(p.diags))
    return (None if diags else tree), diags


def parse_text(text: str, path: str = "<input>.svl") -> tuple[A.Ast | None, list[Diagnostic]]:
    return parse_unit(SourceUnit(path, text))
