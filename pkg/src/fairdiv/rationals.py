"""Exact rational helpers shared by the combinatorial modules.

Coordinates, cut positions and measures are `fractions.Fraction` throughout;
floats only ever appear in the tolerance-driven kkm solvers.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]


def frac(value) -> Fraction:
    """Coerce ints, strings like '2/3' and floats-free inputs to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        # Floats are accepted at API boundaries but converted exactly.
        return Fraction(value).limit_denominator(10**12)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_frac(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vec(values: Iterable) -> Vec:
    return tuple(frac(v) for v in values)


def vec_add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(a: Sequence[Fraction], s: Fraction) -> Vec:
    return tuple(x * s for x in a)


def linf(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return max(abs(x - y) for x, y in zip(a, b))


def average(points: Sequence[Sequence[Fraction]]) -> Vec:
    n = len(points)
    return tuple(sum(col, Fraction(0)) / n for col in zip(*points))


def is_simplex_point(x: Sequence[Fraction]) -> bool:
    return all(c >= 0 for c in x) and sum(x) == 1
