"""Render an AST back to SVL source text."""

from __future__ import annotations

from fractions import Fraction

from . import ast as A

_PREC = {"or": 1, "and": 2, "=": 4, "/=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6, "/": 6, "rem": 6}
_ATTR = {"first": "First", "last": "Last", "length": "Length", "result": "Result"}
_PRAGMA = {"assert": "Assert", "assume": "Assume", "assert_and_cut": "Assert_And_Cut",
           "loop_invariant": "Loop_Invariant", "annotate": "Annotate"}


def _real_text(node: A.RealLit) -> str:
    if node.text:
        return node.text
    v = Fraction(node.value)
    s = f"{float(v)!r}"
    if Fraction(s) != v:
        raise ValueError(f"real literal {v} has no exact short decimal form")
    return s if ("." in s or "e" in s) else s + ".0"


def _prec(e) -> int:
    if isinstance(e, A.Binary):
        return _PREC[e.op]
    if isinstance(e, A.Unary):
        return 3 if e.op == "not" else 7
    return 8


def expr(e, need: int = 0) -> str:
    s = _expr(e)
    return f"({s})" if _prec(e) < need else s


def _expr(e) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.RealLit):
        return _real_text(e)
    if isinstance(e, A.Name):
        return e.ident
    if isinstance(e, A.Attr):
        return f"{e.prefix}'{_ATTR[e.attr]}"
    if isinstance(e, A.Apply):
        return f"{e.prefix}({', '.join(expr(a) for a in e.args)})"
    if isinstance(e, A.Slice):
        return f"{e.prefix}({expr(e.lo)} .. {expr(e.hi)})"
    if isinstance(e, A.Aggregate):
        return f"(others => {expr(e.value)})"
    if isinstance(e, A.Unary):
        if e.op == "not":
            return f"not {expr(e.operand, 3)}"
        inner = expr(e.operand, 7)
        # '--' would start a comment
        return f"-({inner})" if inner.startswith("-") else f"-{inner}"
    if isinstance(e, A.Binary):
        p = _PREC[e.op]
        if p == 4:
            return f"{expr(e.left, 5)} {e.op} {expr(e.right, 5)}"
        return f"{expr(e.left, p)} {e.op} {expr(e.right, p + 1)}"
    raise TypeError(f"not an expression: {e!r}")


def stmts(body, indent: int) -> list[str]:
    out = []
    pad = "   " * indent
    for s in body:
        if isinstance(s, A.Assign):
            out.append(f"{pad}{expr(s.target)} := {expr(s.value)};")
        elif isinstance(s, A.If):
            out.append(f"{pad}if {expr(s.cond)} then")
            out += stmts(s.then_body, indent + 1)
            if s.else_body is not None:
                out.append(f"{pad}else")
                out += stmts(s.else_body, indent + 1)
            out.append(f"{pad}end if;")
        elif isinstance(s, A.While):
            out.append(f"{pad}while {expr(s.cond)} loop")
            out += stmts(s.body, indent + 1)
            out.append(f"{pad}end loop;")
        elif isinstance(s, A.Return):
            out.append(f"{pad}return;" if s.value is None else f"{pad}return {expr(s.value)};")
        elif isinstance(s, A.CallStmt):
            out.append(f"{pad}{expr(s.call)};")
        elif isinstance(s, A.Pragma):
            if s.name == "annotate":
                msg = s.message.replace('"', "")
                out.append(f'{pad}pragma Annotate (False_Positive, "{msg}");')
            else:
                out.append(f"{pad}pragma {_PRAGMA[s.name]} ({expr(s.arg)});")
        else:
            raise TypeError(f"not a statement: {s!r}")
    return out


def _rational(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def decl(d, indent: int = 1) -> list[str]:
    pad = "   " * indent
    if isinstance(d, A.SubtypeDecl):
        s = f"{pad}subtype {d.name} is {d.base}"
        if d.lo is not None:
            s += f" range {expr(d.lo)} .. {expr(d.hi)}"
        if d.dims is not None:
            s += " dim (" + ", ".join(f"{n} => {_rational(r)}" for n, r in d.dims) + ")"
        return [s + ";"]
    if isinstance(d, A.ArrayTypeDecl):
        return [f"{pad}type {d.name} is array ({d.first} .. {d.last}) of {d.elem};"]
    if isinstance(d, A.ObjDecl):
        init = f" := {expr(d.init)}" if d.init is not None else ""
        return [f"{pad}{d.name} : {d.type_name}{init};"]
    if isinstance(d, A.Subprogram):
        params = "; ".join(
            f"{p.name} : {'' if p.mode == 'in' else p.mode + ' '}{p.type_name}" for p in d.params
        )
        head = f"{pad}{d.kind} {d.name} ({params})"
        if d.kind == "function":
            head += f" return {d.ret}"
        aspects = []
        if d.pre is not None:
            aspects.append(f"Pre => {expr(d.pre)}")
        if d.post is not None:
            aspects.append(f"Post => {expr(d.post)}")
        if aspects:
            head += " with " + ", ".join(aspects)
        if d.body is None:
            return [head + ";"]
        lines = [head + " is"]
        for o in d.locals or []:
            lines += decl(o, indent + 1)
        lines.append(f"{pad}begin")
        lines += stmts(d.body, indent + 1)
        lines.append(f"{pad}end {d.name};")
        return lines
    raise TypeError(f"not a declaration: {d!r}")


def unit(tree: A.Ast) -> str:
    lines: list[str] = []
    for pkg in tree.packages:
        lines.append(f"package {pkg.name} is")
        for d in pkg.decls:
            lines += decl(d)
        lines.append(f"end {pkg.name};")
    return "\n".join(lines) + "\n"
