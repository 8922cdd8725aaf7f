"""Scalar backends shared by every module.

Probabilities and matrix entries are plain Python numbers.  The default
backend keeps everything as exact ``Fraction``/``int`` values so that all
algebraic identities can be asserted with ``==``; the float backend trades
exactness for speed in dimension sweeps and is always paired with an
absolute, entrywise tolerance (default 1e-12).
"""

from __future__ import annotations

from fractions import Fraction

RATIONAL = "rational"
FLOAT = "float"
BACKENDS = (RATIONAL, FLOAT)

DEFAULT_TOL = 1e-12

HALF = Fraction(1, 2)


def parse_number(text: str) -> Fraction:
    """Parse ``"3"``, ``"1/2"`` or ``"0.25"`` into an exact Fraction."""
    t = text.strip()
    if "/" in t:
        num, den = t.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(t)


def to_backend(value, backend: str):
    if backend == FLOAT:
        return float(value)
    return value


def close(a, b, tol=0) -> bool:
    """Equality up to an absolute tolerance; exact when ``tol`` is 0."""
    if tol:
        return abs(a - b) <= tol
    return a == b


def number_json(x):
    """JSON form of a scalar: ``[num, den]`` when exact, a float otherwise."""
    if isinstance(x, float):
        return x
    f = Fraction(x)
    return [f.numerator, f.denominator]


def number_from_json(value):
    if isinstance(value, list):
        return Fraction(value[0], value[1])
    if isinstance(value, float):
        return value
    return Fraction(int(value))
