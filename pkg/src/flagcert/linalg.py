"""Exact rational linear algebra: symmetric matrices, PSD certification by
LDLᵀ elimination, characteristic polynomials, quadratic forms.

Everything here is Fraction arithmetic; no floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from flagcert.errors import ArgumentError, SizeError

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")

MAX_CHARPOLY_DIM = 10


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"num/den"`` or ``"num"``; integers and Fractions pass through."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    match = _RATIONAL.match(str(text))
    if not match:
        raise ArgumentError(f"Not an exact rational: {text!r} (expected 'num/den' or 'num')")
    num, den = match.group(1), match.group(2)
    if den is not None and int(den) == 0:
        raise ArgumentError(f"Zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(value: Fraction | int) -> str:
    """``"num/den"``, or ``"num"`` when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class RationalMatrix:
    """Square matrix of exact rationals."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.rows)
        for i, row in enumerate(self.rows):
            if len(row) != n:
                raise ArgumentError(f"Row {i + 1} has {len(row)} entries, expected {n}")

    @classmethod
    def of(cls, rows: Iterable[Iterable[Fraction | int | str]]) -> RationalMatrix:
        return cls(tuple(tuple(parse_rational(x) for x in row) for row in rows))

    @classmethod
    def zeros(cls, dim: int) -> RationalMatrix:
        return cls(tuple((Fraction(0),) * dim for _ in range(dim)))

    @classmethod
    def identity(cls, dim: int) -> RationalMatrix:
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.rows[i][j]

    def is_symmetric(self) -> bool:
        n = self.dim
        return all(self.rows[i][j] == self.rows[j][i] for i in range(n) for j in range(i + 1, n))

    def scaled(self, factor: Fraction | int) -> RationalMatrix:
        return RationalMatrix(tuple(tuple(x * factor for x in row) for row in self.rows))

    def __add__(self, other: RationalMatrix) -> RationalMatrix:
        if other.dim != self.dim:
            raise ArgumentError(f"Cannot add {self.dim}x{self.dim} and {other.dim}x{other.dim} matrices")
        return RationalMatrix(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        )

    def __matmul__(self, other: RationalMatrix) -> RationalMatrix:
        n = self.dim
        cols = list(zip(*other.rows))
        return RationalMatrix(
            tuple(tuple(sum((a * b for a, b in zip(self.rows[i], cols[j])), Fraction(0)) for j in range(n))
                  for i in range(n))
        )

    def transpose(self) -> RationalMatrix:
        return RationalMatrix(tuple(zip(*self.rows)))

    def trace(self) -> Fraction:
        return sum((self.rows[i][i] for i in range(self.dim)), Fraction(0))

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(x) for x in row] for row in self.rows]


def quadratic_form(m: RationalMatrix, x: Sequence[Fraction | int]) -> Fraction:
    """Exact xᵀMx."""
    if len(x) != m.dim:
        raise ArgumentError(f"Vector of length {len(x)} does not match a {m.dim}x{m.dim} matrix")
    xs = [Fraction(v) for v in x]
    total = Fraction(0)
    for i, xi in enumerate(xs):
        if xi:
            row = m.rows[i]
            total += xi * sum((row[j] * xj for j, xj in enumerate(xs) if xj), Fraction(0))
    return total


# =============================================================================
# PSD certification
# =============================================================================


@dataclass(frozen=True)
class PsdVerdict:
    """Outcome of :func:`psd_check`.

    On success ``lower`` (unit lower triangular) and ``pivots`` satisfy
    M = L·diag(pivots)·Lᵀ with every pivot >= 0. On failure ``witness`` is a
    rational vector with negative ``witness_value`` = xᵀMx.
    """

    is_psd: bool
    pivots: tuple[Fraction, ...] = ()
    lower: RationalMatrix | None = None
    witness: tuple[Fraction, ...] | None = None
    witness_value: Fraction | None = None

    def reconstruct(self) -> RationalMatrix:
        """L·D·Lᵀ, which equals the checked matrix when ``is_psd``."""
        if self.lower is None:
            raise ArgumentError("No factorization on a failed PSD verdict")
        n = self.lower.dim
        diag = RationalMatrix(
            tuple(tuple(self.pivots[i] if i == j else Fraction(0) for j in range(n)) for i in range(n))
        )
        return self.lower @ diag @ self.lower.transpose()


def _simple_witness(m: RationalMatrix) -> tuple[Fraction, ...] | None:
    """Try e_i, then e_i - e_j and e_i + e_j; small witnesses read better in reports."""
    n = m.dim
    for i in range(n):
        if m.rows[i][i] < 0:
            return tuple(Fraction(int(k == i)) for k in range(n))
    for sign in (-1, 1):
        for i in range(n):
            for j in range(i + 1, n):
                if m.rows[i][i] + m.rows[j][j] + 2 * sign * m.rows[i][j] < 0:
                    return tuple(Fraction(1 if k == i else sign if k == j else 0) for k in range(n))
    return None


def _back_substitute(lower: list[list[Fraction]], y: list[Fraction]) -> tuple[Fraction, ...]:
    """Solve Lᵀx = y for unit lower triangular L."""
    n = len(y)
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        x[i] = y[i] - sum((lower[j][i] * x[j] for j in range(i + 1, n)), Fraction(0))
    return tuple(x)


def psd_check(m: RationalMatrix) -> PsdVerdict:
    """Decide positive semidefiniteness exactly.

    Symmetric Gaussian elimination without pivoting. A zero pivot is allowed
    only when the rest of its row in the Schur complement is zero; a
    negative pivot, or a zero pivot with a nonzero row, produces a witness.

    Raises:
        ArgumentError: If ``m`` is not symmetric.
    """
    if not m.is_symmetric():
        raise ArgumentError("PSD check needs a symmetric matrix")
    n = m.dim
    schur = [list(row) for row in m.rows]
    lower = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    pivots: list[Fraction] = []

    for k in range(n):
        pivot = schur[k][k]
        y = None
        if pivot < 0:
            y = [Fraction(int(i == k)) for i in range(n)]
        elif pivot == 0:
            j = next((j for j in range(k + 1, n) if schur[k][j] != 0), None)
            if j is not None:
                # (t e_k + e_j)ᵀ S (t e_k + e_j) = 2 t S_kj + S_jj = -1
                t = -(schur[j][j] + 1) / (2 * schur[k][j])
                y = [t if i == k else Fraction(int(i == j)) for i in range(n)]
        if y is not None:
            witness = _simple_witness(m) or _back_substitute(lower, y)
            return PsdVerdict(False, witness=witness, witness_value=quadratic_form(m, witness))

        pivots.append(pivot)
        if pivot == 0:
            continue
        for i in range(k + 1, n):
            lower[i][k] = schur[i][k] / pivot
        for i in range(k + 1, n):
            factor = lower[i][k]
            if factor:
                for j in range(k + 1, n):
                    schur[i][j] -= factor * schur[k][j]
        for i in range(k + 1, n):
            schur[i][k] = schur[k][i] = Fraction(0)

    return PsdVerdict(
        True,
        pivots=tuple(pivots),
        lower=RationalMatrix(tuple(tuple(row) for row in lower)),
    )


# =============================================================================
# Polynomials
# =============================================================================


@dataclass(frozen=True)
class CharPoly:
    """Characteristic polynomial, coefficients from the leading term down."""

    coefficients: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def det_m_minus_x(self) -> tuple[Fraction, ...]:
        """Coefficients of det(M - xI) = (-1)^n det(xI - M)."""
        sign = -1 if self.degree % 2 else 1
        return tuple(sign * c for c in self.coefficients)


def char_poly(m: RationalMatrix) -> CharPoly:
    """det(xI - M) by the Faddeev-LeVerrier recurrence.

    Raises:
        SizeError: For dimensions above 10.
    """
    n = m.dim
    if n > MAX_CHARPOLY_DIM:
        raise SizeError(f"Characteristic polynomials are limited to dimension {MAX_CHARPOLY_DIM}, got {n}")
    coeffs = [Fraction(1)]
    aux = RationalMatrix.zeros(n)
    identity = RationalMatrix.identity(n)
    for k in range(1, n + 1):
        aux = m @ aux + identity.scaled(coeffs[-1])
        coeffs.append(-(m @ aux).trace() / k)
    return CharPoly(tuple(coeffs))


def poly_mul(p: Sequence[Fraction | int], q: Sequence[Fraction | int]) -> tuple[Fraction, ...]:
    """Product of two coefficient lists (leading term first)."""
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += Fraction(a) * Fraction(b)
    return tuple(out)


def expand_factors(*factors: Sequence[Fraction | int]) -> tuple[Fraction, ...]:
    result: tuple[Fraction, ...] = (Fraction(1),)
    for factor in factors:
        result = poly_mul(result, factor)
    return result


def descartes_nonnegative(coefficients: Sequence[Fraction]) -> bool:
    """Whether the signs of det(xI - M) weakly alternate.

    For a symmetric matrix (all roots real) this holds iff every eigenvalue
    is nonnegative.
    """
    for k, c in enumerate(coefficients):
        if c != 0 and (c > 0) != (k % 2 == 0):
            return False
    return True
