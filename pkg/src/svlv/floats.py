"""IEEE-754 binary32 arithmetic on Python floats.

Values are carried as Python floats that are exactly representable in
binary32. Operations round to nearest-even through numpy's float32, which
keeps subnormals (no flush-to-zero).
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

MIN_NORMAL = 2.0 ** -126
MIN_SUBNORMAL = 2.0 ** -149
MAX_FINITE = float(np.finfo(np.float32).max)
INF = math.inf

_f32 = np.float32


def to_f32(x) -> float:
    """Round an exact value (int, Fraction, float) to the nearest binary32."""
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return x
        x = Fraction(x)
    x = Fraction(x)
    if x == 0:
        return 0.0
    sign = -1.0 if x < 0 else 1.0
    a = abs(x)
    # exponent e with 2**e <= a < 2**(e+1)
    e = a.numerator.bit_length() - a.denominator.bit_length()
    if Fraction(2) ** e > a:
        e -= 1
    e = max(e, -126)
    quantum = Fraction(2) ** (e - 23)
    q = a / quantum
    n = math.floor(q)
    rem = q - n
    if rem > Fraction(1, 2) or (rem == Fraction(1, 2) and n % 2 == 1):
        n += 1
    value = Fraction(n) * quantum
    if value > Fraction(MAX_FINITE):
        return sign * INF
    return sign * float(value)


def add(a: float, b: float) -> float:
    with np.errstate(all="ignore"):
        return float(_f32(a) + _f32(b))


def sub(a: float, b: float) -> float:
    with np.errstate(all="ignore"):
        return float(_f32(a) - _f32(b))


def mul(a: float, b: float) -> float:
    with np.errstate(all="ignore"):
        return float(_f32(a) * _f32(b))


def div(a: float, b: float) -> float:
    with np.errstate(all="ignore"):
        return float(_f32(a) / _f32(b))


def neg(a: float) -> float:
    return -a


def sin(a: float) -> float:
    if math.isinf(a) or math.isnan(a):
        return math.nan
    return to_f32(math.sin(a))


def next_up(a: float) -> float:
    return float(np.nextafter(_f32(a), _f32(INF)))


def next_down(a: float) -> float:
    return float(np.nextafter(_f32(a), _f32(-INF)))


def classify(a: float) -> str:
    if math.isnan(a):
        return "nan"
    if math.isinf(a):
        return "infinite"
    if a == 0:
        return "zero"
    if abs(a) < MIN_NORMAL:
        return "subnormal"
    return "normal"


def is_valid(a: float, denorm: bool) -> bool:
    """Float validity as checked on the target: finite, and normal unless subnormals are supported."""
    if math.isnan(a) or math.isinf(a):
        return False
    return denorm or a == 0 or abs(a) >= MIN_NORMAL


def round_down(x: float) -> float:
    """Largest binary32 value <= x (x a double)."""
    if math.isnan(x) or math.isinf(x):
        return x
    r = float(_f32(x))
    if r > x:
        r = next_down(r)
    return r


def round_up(x: float) -> float:
    """Smallest binary32 value >= x (x a double)."""
    if math.isnan(x) or math.isinf(x):
        return x
    r = float(_f32(x))
    if r < x:
        r = next_up(r)
    return r
