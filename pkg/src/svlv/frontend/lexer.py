"""Tokenizer for SVL source text."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .source import Diagnostic, Loc, SourceUnit

KEYWORDS = frozenset(
    {
        "package", "is", "end", "subtype", "range", "dim", "type", "array", "of",
        "function", "procedure", "return", "with", "begin", "in", "out", "if",
        "then", "else", "while", "loop", "pragma", "and", "or", "not", "rem",
        "others",
    }
)

# longest first so that ':=' wins over ':'
SYMBOLS = (":=", "..", "=>", "/=", "<=", ">=", "**", "<", ">", "=", "+", "-", "*", "/",
           "(", ")", ";", ",", ":", "'")


@dataclass(frozen=True)
class Token:
    kind: str  # 'id', 'kw', 'int', 'real', 'str', 'sym', 'eof'
    text: str
    loc: Loc
    value: object = None
    end: int = 0  # offset one past the token

    def is_(self, kind: str, text: str | None = None) -> bool:
        if self.kind != kind:
            return False
        return text is None or self.text.lower() == text


class LexError(Exception):
    pass


def tokenize(src: SourceUnit) -> tuple[list[Token], list[Diagnostic]]:
    text = src.text
    n = len(text)
    i = 0
    toks: list[Token] = []
    diags: list[Diagnostic] = []
    while i < n:
        ch = text[i]
        if ch in " \t\r\n\f":
            i += 1
            continue
        if text.startswith("--", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        start = i
        loc = src.loc(i)
        if ch.isalpha():
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            kind = "kw" if word.lower() in KEYWORDS else "id"
            toks.append(Token(kind, word, loc, end=i))
            continue
        if ch.isdigit():
            i, tok, err = _number(src, start)
            if err:
                diags.append(Diagnostic(loc, err))
            else:
                toks.append(tok)
            continue
        if ch == '"':
            j = text.find('"', i + 1)
            nl = text.find("\n", i + 1)
            if j < 0 or (0 <= nl < j):
                diags.append(Diagnostic(loc, "malformed literal: unterminated string"))
                i = n if nl < 0 else nl
                continue
            toks.append(Token("str", text[start:j + 1], loc, text[i + 1:j], end=j + 1))
            i = j + 1
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("sym", sym, loc, end=i + len(sym)))
                i += len(sym)
                break
        else:
            diags.append(Diagnostic(loc, f"unexpected character {ch!r}"))
            i += 1
    toks.append(Token("eof", "", src.loc(n), end=n))
    return toks, diags


def _digits(text: str, i: int) -> int:
    n = len(text)
    while i < n and (text[i].isdigit() or (text[i] == "_" and i + 1 < n and text[i + 1].isdigit())):
        i += 1
    return i


def _number(src: SourceUnit, start: int) -> tuple[int, Token | None, str | None]:
    text = src.text
    n = len(text)
    i = _digits(text, start)
    is_real = False
    # '..' after an integer is a range, not a fraction
    if i < n and text[i] == "." and not text.startswith("..", i):
        if i + 1 < n and text[i + 1].isdigit():
            i = _digits(text, i + 1)
            is_real = True
        else:
            return i + 1, None, f"malformed literal {text[start:i + 1]!r}"
    if i < n and text[i] in "eE":
        j = i + 1
        if j < n and text[j] in "+-":
            j += 1
        if j < n and text[j].isdigit():
            i = _digits(text, j)
            if not is_real and text[j - 1] == "-":
                # negative exponent on an integer literal is not an integer
                return i, None, f"malformed literal {text[start:i]!r}"
        else:
            return j, None, f"malformed literal {text[start:j]!r}"
    if i < n and (text[i].isalpha() or text[i] == "_"):
        j = i
        while j < n and (text[j].isalnum() or text[j] == "_"):
            j += 1
        return j, None, f"malformed literal {text[start:j]!r}"
    lexeme = text[start:i]
    clean = lexeme.replace("_", "")
    loc = src.loc(start)
    if is_real:
        return i, Token("real", lexeme, loc, Fraction(clean), end=i), None
    if "e" in clean.lower():
        mant, exp = clean.lower().split("e")
        return i, Token("int", lexeme, loc, int(mant) * 10 ** int(exp), end=i), None
    return i, Token("int", lexeme, loc, int(clean), end=i), None
