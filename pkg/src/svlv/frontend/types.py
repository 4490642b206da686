"""Semantic types attached to resolved SVL expressions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..dimensions import DIMENSIONLESS, DimVector


@dataclass(frozen=True)
class SemType:
    base: str  # 'integer' | 'float' | 'boolean' | 'array'
    name: str
    lo: object = None  # static bounds of a constrained scalar subtype
    hi: object = None
    element: Optional["SemType"] = None
    first: Optional[int] = None  # array index bounds
    last: Optional[int] = None
    dim: DimVector = field(default=DIMENSIONLESS)

    def __post_init__(self) -> None:
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise ValueError(f"empty range {self.lo} .. {self.hi} for {self.name}")
        if self.base == "array" and (self.first is None or self.last is None or self.first > self.last):
            raise ValueError(f"bad index bounds for array type {self.name}")
        if self.base == "boolean" and not self.dim.is_dimensionless:
            raise ValueError("booleans are dimensionless")

    @property
    def constrained(self) -> bool:
        return self.lo is not None

    @property
    def is_scalar(self) -> bool:
        return self.base in ("integer", "float", "boolean")

    @property
    def is_numeric(self) -> bool:
        return self.base in ("integer", "float")

    @property
    def length(self) -> int:
        return self.last - self.first + 1

    def base_type(self) -> "SemType":
        return {"integer": INTEGER, "float": FLOAT, "boolean": BOOLEAN}.get(self.base, self)

    def __str__(self) -> str:
        return self.name


INTEGER = SemType("integer", "integer")
FLOAT = SemType("float", "float")
BOOLEAN = SemType("boolean", "boolean")
UNIT = SemType("boolean", "<unit>")


def compatible(target: SemType, value: SemType) -> bool:
    """Assignment/parameter compatibility, ignoring dimensions."""
    if target.base != value.base:
        return False
    if target.base == "array":
        return target.element.name == value.element.name
    return True
