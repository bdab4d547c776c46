"""Small helpers for exact rationals: parsing, formatting, exact power comparisons."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Q = Union[int, Fraction]


def as_q(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction. Floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def norm(value: Q) -> Q:
    """Demote integral Fractions to int (keeps dict-heavy loops fast)."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def fmt_q(value) -> str:
    """``p`` for integers, ``p/q`` otherwise. Never a decimal."""
    value = as_q(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def fmt_pq(value) -> str:
    """Always ``p/q``, including ``n/1`` for integers."""
    value = as_q(value)
    return f"{value.numerator}/{value.denominator}"


def is_integer(value) -> bool:
    return as_q(value).denominator == 1


def cmp_power(base: Fraction, exponent: Fraction, bound: Fraction) -> int:
    """Sign of ``base**exponent - bound`` for ``base > 0`` and rational exponent.

    With ``exponent = p/q`` (q > 0) both sides are raised to the q-th power,
    which preserves order for non-negative quantities.
    """
    base, exponent, bound = as_q(base), as_q(exponent), as_q(bound)
    if base <= 0:
        raise ValueError("base must be positive")
    if bound <= 0:
        return 1
    p, q = exponent.numerator, exponent.denominator
    lhs = base ** p
    rhs = bound ** q
    return (lhs > rhs) - (lhs < rhs)
