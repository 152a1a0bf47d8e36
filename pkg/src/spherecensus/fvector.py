"""Closed-form screening of f-vectors of 4-polytopes and 3-spheres."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple


class FVector(NamedTuple):
    f0: int
    f1: int
    f2: int
    f3: int

    @classmethod
    def parse(cls, text: str) -> "FVector":
        parts = [int(p) for p in text.replace(" ", "").split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated integers, got {text!r}")
        return cls(*parts)

    def reversed(self) -> "FVector":
        return FVector(self.f3, self.f2, self.f1, self.f0)

    def __str__(self) -> str:
        return ",".join(str(x) for x in self)


class FVector3(NamedTuple):
    f0: int
    f1: int
    f2: int


# Condition identifiers reported by screen(), in reporting order.
CONDITIONS = (
    "euler",
    "f1>=2f0",
    "f2>=2f3",
    "f3<=f0(f0-3)/2",
    "f0<=f3(f3-3)/2",
    "f0>=5",
    "f3>=5",
    "f1<=f0(f0-1)/2",
    "f2<=f3(f3-1)/2",
)


@dataclass(frozen=True)
class FilterReport:
    vector: FVector
    violated: tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violated

    def __str__(self) -> str:
        if self.passed:
            return f"{self.vector}: passed"
        return f"{self.vector}: violated {', '.join(self.violated)}"


def steinitz3_member(v: FVector3 | tuple[int, int, int]) -> bool:
    """True iff (f0, f1, f2) is the f-vector of a 3-polytope."""
    f0, f1, f2 = v
    return f0 - f1 + f2 == 2 and f2 <= 2 * f0 - 4 and f0 <= 2 * f2 - 4


def _checks(v: FVector) -> dict[str, bool]:
    f0, f1, f2, f3 = v
    return {
        "euler": f0 - f1 + f2 - f3 == 0,
        "f1>=2f0": f1 >= 2 * f0,
        "f2>=2f3": f2 >= 2 * f3,
        # doubled to stay in integers
        "f3<=f0(f0-3)/2": 2 * f3 <= f0 * (f0 - 3),
        "f0<=f3(f3-3)/2": 2 * f0 <= f3 * (f3 - 3),
        "f0>=5": f0 >= 5,
        "f3>=5": f3 >= 5,
        # the graph and the dual graph are simple
        "f1<=f0(f0-1)/2": 2 * f1 <= f0 * (f0 - 1),
        "f2<=f3(f3-1)/2": 2 * f2 <= f3 * (f3 - 1),
    }


def screen(v: FVector | tuple[int, int, int, int], conditions=CONDITIONS) -> FilterReport:
    """Report every necessary condition in ``conditions`` that ``v`` violates."""
    v = FVector(*v)
    checks = _checks(v)
    return FilterReport(v, tuple(name for name in conditions if not checks[name]))


def size(v) -> int:
    f0, _, _, f3 = v
    return f0 + f3 - 10


def fatness(v) -> Fraction:
    """(f1 + f2 - 20) / (f0 + f3 - 10) as an exact rational."""
    f0, f1, f2, f3 = v
    denom = f0 + f3 - 10
    if denom == 0:
        raise ZeroDivisionError("fatness is undefined when f0 + f3 = 10 (the simplex)")
    return Fraction(f1 + f2 - 20, denom)


def candidate_stream(max_size: int) -> Iterator[FVector]:
    """All f-vectors of size <= max_size that pass screen(), lexicographically.

    With f0 + f3 fixed, Euler gives f2 = f1 - f0 + f3 and f1 is squeezed between
    2 f0 and the number of vertex pairs, so each slice is finite.
    """
    if max_size < 0:
        return
    top = 10 + max_size
    found = []
    for f0 in range(5, top - 5 + 1):
        for f3 in range(5, top - f0 + 1):
            for f1 in range(2 * f0, f0 * (f0 - 1) // 2 + 1):
                v = FVector(f0, f1, f1 - f0 + f3, f3)
                if screen(v).passed:
                    found.append(v)
    yield from sorted(found)
