"""Exact rational scalars.

Everything in this library that is a number is an arbitrary-precision
rational; no float ever participates in a verdict.  gmpy2's mpq is used
when available because it is substantially faster on the dense exact
linear algebra; fractions.Fraction is a drop-in fallback.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

ZERO = Q(0)
ONE = Q(1)


def rat(value, den=None):
    """Build an exact rational from an int, a rational, or a 'p/q' string."""
    if den is not None:
        return Q(value, den)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            p, q = text.split("/", 1)
            return Q(int(p), int(q))
        return Q(int(text))
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an int, rational, or 'p/q' string")
    return Q(value)


def rat_str(q) -> str:
    """Serialize as 'p/q', or just 'p' for integers."""
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def falling(x, j: int):
    """x(x-1)...(x-j+1) as an exact rational; empty product for j=0."""
    out = ONE
    for i in range(j):
        out *= Q(x) - i
    return out
