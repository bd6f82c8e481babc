"""Exact rational arithmetic for certificate checking.

Values are ``fractions.Fraction`` over Python's arbitrary-precision integers,
so every operation here is exact and every comparison is a true integer
cross-multiplication.  Floating point never enters through this module.
"""

from __future__ import annotations

from fractions import Fraction

from .exceptions import InvalidInputError

MAX_TAYLOR_ORDER = 64


def rational(value) -> Fraction:
    """Coerce ints, strings like ``"p/q"``, or Fractions to an exact Fraction.

    Floats are rejected: a float has already lost exactness, and silently
    converting one would poison a certificate chain.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise InvalidInputError(f"cannot interpret {type(value).__name__} as an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or a plain integer literal."""
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/")
            return Fraction(int(num.strip()), int(den.strip()))
        return Fraction(int(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"not a rational literal: {text!r}") from exc


def format_rational(r: Fraction) -> str:
    """Canonical ``p/q`` form (plain integer when the denominator is 1)."""
    r = Fraction(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def exp_taylor_partial(x, m: int) -> Fraction:
    """Exact partial sum of the exponential series through degree m.

    For x > 0 this lower-bounds e^x.  For x < 0 and odd m the Lagrange
    remainder is positive, so the value lower-bounds e^x as well; even m
    gives an upper bound.
    """
    if m < 0:
        raise InvalidInputError("order m must be nonnegative")
    if m > MAX_TAYLOR_ORDER:
        raise InvalidInputError(f"order m={m} exceeds guard {MAX_TAYLOR_ORDER}")
    x = rational(x)
    total = Fraction(1)
    term = Fraction(1)
    for k in range(1, m + 1):
        term = term * x / k
        total += term
    return total


def strictly_greater(lhs, rhs) -> bool:
    """Exact strict comparison of integer or rational expressions."""
    return rational(lhs) > rational(rhs)
