"""Exact rational scalars.

Every lattice value, polynomial coefficient and invariant in this package is
an arbitrary-precision rational.  ``gmpy2.mpq`` is used when available (it is
several times faster on the fraction-free determinant paths); the stdlib
``fractions.Fraction`` is a drop-in fallback with identical semantics:
always reduced, positive denominator, exact field arithmetic.
"""

from __future__ import annotations

try:  # pragma: no cover - environment dependent
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rational

__all__ = ["Rational", "rat", "parse_rational", "format_rational"]


def rat(numerator, denominator=1):
    """Build a Rational from integers (or pass an existing one through)."""
    return Rational(numerator, denominator)


def parse_rational(text: str):
    """Parse the wire form ``"p/q"`` (denominator omitted when 1)."""
    try:
        return Rational(text.strip())
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def format_rational(value) -> str:
    """Wire form ``"p/q"``; plain ``"p"`` when the denominator is 1."""
    return str(value)
