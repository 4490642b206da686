"""Random small SVL programs for differential testing against the interpreter.

Programs are pragma-free procedures over at most three integer objects whose
subtypes lie within -8 .. 7, so every input tuple can be enumerated.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

OPS = ("+", "-", "*", "/", "rem")
RELS = ("=", "/=", "<", "<=", ">", ">=")


@dataclass
class Generated:
    text: str
    procedure: str
    int_width: int


class ProgramGenerator:
    def __init__(self, seed: int, max_statements: int = 12):
        self.rng = random.Random(seed)
        self.max_statements = max_statements
        self.budget = 0

    def subtype(self) -> tuple[int, int]:
        lo = self.rng.randint(-8, 7)
        hi = self.rng.randint(lo, 7)
        return lo, hi

    def program(self) -> Generated:
        rng = self.rng
        types = {f"S{i}": self.subtype() for i in range(1, rng.randint(1, 2) + 1)}
        names = ["A", "B", "C"][: rng.randint(1, 3)]
        n_params = rng.randint(0, min(2, len(names)))
        params, locals_ = [], []
        for i, n in enumerate(names):
            ty = rng.choice(sorted(types))
            if i < n_params:
                mode = rng.choices(["in", "in out", "out"], weights=[4, 3, 1])[0]
                params.append((n, mode, ty))
            else:
                init = rng.random() < 0.7
                lo, hi = types[ty]
                locals_.append((n, ty, rng.randint(lo, hi) if init else None))
        self.writable = [n for n, mode, _ in params if mode != "in"] + [n for n, _, _ in locals_]
        self.readable = list(names)
        self.budget = self.max_statements
        body = self.block(depth=0) or ["null_stmt"]
        lines = ["package Gen is"]
        for name, (lo, hi) in types.items():
            lines.append(f"   subtype {name} is Integer range {lo} .. {hi};")
        sig = "; ".join(f"{n} : {m} {t}" for n, m, t in params)
        lines.append(f"   procedure P{' (' + sig + ')' if sig else ''} is")
        for n, t, init in locals_:
            lines.append(f"      {n} : {t}{f' := {init}' if init is not None else ''};")
        lines.append("   begin")
        lines.extend(self.render(body, 6))
        lines.append("   end P;")
        lines.append("end Gen;")
        return Generated("\n".join(lines) + "\n", "P", rng.choice([8, 32]))

    def block(self, depth: int) -> list:
        out = []
        n = self.rng.randint(1, 4)
        for _ in range(n):
            if self.budget <= 0:
                break
            self.budget -= 1
            out.append(self.statement(depth))
        return out

    def statement(self, depth: int):
        rng = self.rng
        r = rng.random()
        if not self.writable:
            r = 0.6 + 0.3 * r
        if r < 0.6:
            return ("assign", rng.choice(self.writable), self.expr(2))
        if r < 0.87 and depth < 2:
            els = self.block(depth + 1) if rng.random() < 0.5 else None
            return ("if", self.cond(), self.block(depth + 1), els)
        if r < 0.96 and depth < 2 and self.writable:
            v = rng.choice(self.writable)
            return ("while", v, rng.randint(-2, 3), self.block(depth + 1))
        if r < 0.96 and self.writable:
            return ("assign", rng.choice(self.writable), self.expr(2))
        return ("return",)

    def expr(self, depth: int) -> str:
        rng = self.rng
        if depth == 0 or rng.random() < 0.35:
            if rng.random() < 0.6:
                return rng.choice(self.readable)
            return str(rng.randint(0, 8))
        if rng.random() < 0.1:
            return f"(-{self.expr(depth - 1)})"
        return f"({self.expr(depth - 1)} {rng.choice(OPS)} {self.expr(depth - 1)})"

    def cond(self) -> str:
        c = f"{self.expr(1)} {self.rng.choice(RELS)} {self.expr(1)}"
        if self.rng.random() < 0.2:
            c = f"({c}) {self.rng.choice(['and', 'or'])} ({self.expr(1)} {self.rng.choice(RELS)} {self.expr(1)})"
        return c

    def render(self, stmts: list, indent: int) -> list:
        pad = " " * indent
        out = []
        for s in stmts:
            if s == "null_stmt":
                out.append(f"{pad}return;")
            elif s[0] == "assign":
                out.append(f"{pad}{s[1]} := {s[2]};")
            elif s[0] == "if":
                out.append(f"{pad}if {s[1]} then")
                out.extend(self.render(s[2] or ["null_stmt"], indent + 3))
                if s[3]:
                    out.append(f"{pad}else")
                    out.extend(self.render(s[3], indent + 3))
                out.append(f"{pad}end if;")
            elif s[0] == "while":
                # loops count their variable upwards so they terminate unless the body interferes
                v, bound, body = s[1], s[2], s[3]
                out.append(f"{pad}while {v} < {bound} loop")
                out.extend(self.render(body, indent + 3))
                out.append(f"{pad}   {v} := {v} + 1;")
                out.append(f"{pad}end loop;")
            else:
                out.append(f"{pad}return;")
        return out


def generate(seed: int) -> Generated:
    return ProgramGenerator(seed).program()


class CallPairGenerator(ProgramGenerator):
    """A function ``F`` with a postcondition and a procedure ``P`` calling it.

    The caller and the callee's contract depend only on ``seed``; the callee's
    body depends only on ``body_seed``, so two programs with the same seed
    differ exactly in the body of ``F``.
    """

    def __init__(self, seed: int, body_seed: int, max_statements: int = 8):
        super().__init__(seed, max_statements)
        self.body_rng = random.Random(body_seed)
        self.in_function = False
        self.calls = False

    def program(self) -> Generated:
        rng = self.rng
        lo, hi = self.subtype()
        post = f"F'Result {rng.choice(['>=', '<=', '/='])} {rng.randint(-8, 7)}"
        if rng.random() < 0.3:
            post = f"({post}) and F'Result {rng.choice(RELS)} {rng.choice(['A', 'B'])}"
        caller = self.caller_body()
        body = self.callee_body()
        lines = [
            "package Gen is",
            f"   subtype S1 is Integer range {lo} .. {hi};",
            "   function F (A : S1; B : S1) return Integer",
            f"     with Post => {post} is",
            "      C : Integer := A;",
            "   begin",
            *body,
            "   end F;",
            "   procedure P (A : in out S1; B : S1) is",
            "      C : Integer := 0;",
            "   begin",
            *caller,
            "   end P;",
            "end Gen;",
        ]
        return Generated("\n".join(lines) + "\n", "P", 32)

    def caller_body(self) -> list:
        self.writable, self.readable = ["A", "C"], ["A", "B", "C"]
        self.budget, self.calls = self.max_statements, True
        stmts = self.block(depth=0)
        stmts.append(("assign", "C", f"F ({self.expr(1)}, B)"))
        return self.render(stmts, 6)

    def callee_body(self) -> list:
        saved = self.rng
        self.rng = self.body_rng
        try:
            self.writable, self.readable = ["C"], ["A", "B", "C"]
            self.budget, self.calls, self.in_function = self.max_statements, False, True
            stmts = self.block(depth=0) or []
            out = self.render(stmts, 6)
            out.append(f"      return {self.expr(2)};")
            return out
        finally:
            self.rng = saved
            self.in_function = False

    def expr(self, depth: int) -> str:
        if self.calls and depth > 0 and self.rng.random() < 0.15:
            return f"F ({self.expr(0)}, {self.expr(0)})"
        return super().expr(depth)

    def render(self, stmts: list, indent: int) -> list:
        out = super().render(stmts, indent)
        if self.in_function:
            out = [line.replace("return;", f"return {self.rng.choice(self.readable)};") for line in out]
        return out


def call_pair(seed: int, body_seed: int) -> Generated:
    return CallPairGenerator(seed, body_seed).program()
