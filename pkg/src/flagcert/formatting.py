"""Text formatting for exact values: rationals, decimal annotations,
linear forms in matrix entries, and polynomials.

Verification output stays exact; decimals appear only as annotations
(``~0.0384``) when asked for.
"""

from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence

from flagcert.linalg import format_rational

# Matrix names used for the first three types in symbolic expressions
TYPE_LETTERS = ("p", "q", "r")

# Prefix on every machine-readable output line
MACHINE_PREFIX = "@"


def approx(value: Fraction | int, digits: int = 6) -> str:
    """Decimal approximation with ``digits`` significant digits, marked with ``~``."""
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits
        decimal = Decimal(value.numerator) / Decimal(value.denominator)
    return f"~{decimal:g}" if decimal != 0 else "~0"


def exact(value: Fraction | int, digits: int | None = None) -> str:
    """``num/den``, optionally followed by a decimal annotation."""
    text = format_rational(value)
    if digits is not None and Fraction(value).denominator != 1:
        return f"{text} ({approx(value, digits)})"
    return text


def matrix_name(type_index: int, type_count: int) -> str:
    """p, q, r for up to three types, otherwise m1, m2, ..."""
    if type_count <= len(TYPE_LETTERS):
        return TYPE_LETTERS[type_index]
    return f"m{type_index + 1}_"


def entry_name(matrix: str, a: int, b: int) -> str:
    """``p12`` for 1-based indices below 10, ``p10,11`` otherwise."""
    if a < 10 and b < 10:
        return f"{matrix}{a}{b}"
    return f"{matrix}{a},{b}"


def format_linear_form(terms: Iterable[tuple[int, str]], constant: int = 0) -> str:
    """``12p11 + 24p12 - 4q33 + 120``; zero coefficients are dropped."""
    parts: list[str] = []
    for coefficient, name in terms:
        if coefficient == 0:
            continue
        magnitude = abs(coefficient)
        body = name if magnitude == 1 else f"{magnitude}{name}"
        parts.append(_signed(coefficient, body, first=not parts))
    if constant:
        parts.append(_signed(constant, str(abs(constant)), first=not parts))
    return " ".join(parts) if parts else "0"


def _signed(value: int, body: str, first: bool) -> str:
    if first:
        return f"-{body}" if value < 0 else body
    return f"- {body}" if value < 0 else f"+ {body}"


def format_polynomial(coefficients: Sequence[Fraction], variable: str = "x") -> str:
    """Leading coefficient first, e.g. ``x^3 - 930x^2 + 53766x``."""
    degree = len(coefficients) - 1
    parts: list[str] = []
    for k, c in enumerate(coefficients):
        if c == 0:
            continue
        power = degree - k
        if power == 0:
            body = format_rational(abs(c))
        else:
            monomial = variable if power == 1 else f"{variable}^{power}"
            body = monomial if abs(c) == 1 else f"{format_rational(abs(c))}{monomial}"
        parts.append(_signed(1 if c > 0 else -1, body, first=not parts))
    return " ".join(parts) if parts else "0"


def format_vector(values: Sequence[Fraction]) -> str:
    return "(" + ", ".join(format_rational(v) for v in values) + ")"
