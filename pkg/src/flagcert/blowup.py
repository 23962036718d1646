"""Blow-ups and the finite pentagon-count check.

A triangle-free graph on n vertices with more than (n/5)^5 pentagons would
give balanced blow-ups whose pentagon density tends to
24/625 + 120·eps/n^5 > 24/625, against the certified bound. The helpers
here compute both sides exactly for graphs up to 32 vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import prod

from flagcert.errors import ArgumentError, SizeError
from flagcert.graphs import (
    MAX_VERTICES,
    ForbiddenFamily,
    Graph,
    complete_graph,
    contains_forbidden,
    count_induced_copies,
    cycle_graph,
    enumerate_free_graphs,
    induced_density,
    write_graph6,
)
from flagcert.linalg import format_rational

PENTAGON = cycle_graph(5)
TRIANGLE_FREE = ForbiddenFamily.of(complete_graph(3))
PENTAGON_BOUND = Fraction(24, 625)


@dataclass(frozen=True)
class BlowupSpec:
    """Replace base vertex v by ``factors[v]`` independent vertices."""

    base: Graph
    factors: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.factors) != self.base.n:
            raise ArgumentError(f"Need {self.base.n} factors, got {len(self.factors)}")
        if any(f < 1 for f in self.factors):
            raise ArgumentError(f"Factors must be positive, got {list(self.factors)}")
        if self.order > MAX_VERTICES:
            raise SizeError(f"Blow-up would have {self.order} vertices, more than {MAX_VERTICES}")

    @classmethod
    def uniform(cls, base: Graph, factor: int) -> BlowupSpec:
        return cls(base, (factor,) * base.n)

    @property
    def order(self) -> int:
        return sum(self.factors)


def blow_up(spec: BlowupSpec) -> Graph:
    """Parts are independent sets, joined completely iff their base vertices are adjacent."""
    base = spec.base
    starts = [0]
    for f in spec.factors:
        starts.append(starts[-1] + f)
    masks = [((1 << f) - 1) << starts[v] for v, f in enumerate(spec.factors)]

    rows = []
    for v, f in enumerate(spec.factors):
        row = 0
        for u in base.neighbors(v):
            row |= masks[u]
        rows.extend([row] * f)
    return Graph(spec.order, tuple(rows))


class Verdict(str, Enum):
    BELOW = "below"
    TIGHT = "tight"
    VIOLATION = "VIOLATION"


@dataclass(frozen=True)
class PentagonCount:
    graph: Graph
    count: int
    cap: Fraction

    @property
    def verdict(self) -> Verdict:
        if self.count < self.cap:
            return Verdict.BELOW
        if self.count == self.cap:
            return Verdict.TIGHT
        return Verdict.VIOLATION

    @property
    def margin(self) -> Fraction:
        """cap − count; negative only for a violation."""
        return self.cap - self.count

    def __str__(self) -> str:
        return f"{self.count} ≤ {format_rational(self.cap)}: {self.verdict.value}"


def _require_triangle_free(g: Graph) -> None:
    if contains_forbidden(g, TRIANGLE_FREE):
        raise ArgumentError(f"{write_graph6(g)} contains a triangle")


def erdos_check(g: Graph) -> PentagonCount:
    """Pentagon count of a triangle-free graph against (n/5)^5.

    Raises:
        ArgumentError: If ``g`` has a triangle.
    """
    _require_triangle_free(g)
    return PentagonCount(g, count_induced_copies(g, PENTAGON), Fraction(g.n, 5) ** 5)


def sweep_triangle_free(max_order: int) -> list[PentagonCount]:
    """``erdos_check`` on every triangle-free graph of order 1..max_order, up to isomorphism."""
    return [erdos_check(g) for n in range(1, max_order + 1) for g in enumerate_free_graphs(n, TRIANGLE_FREE)]


def density_trend(base: Graph, a: Graph, n_max: int) -> list[tuple[int, Fraction]]:
    """Exact d_A of the uniform blow-ups of ``base`` for N = 1..n_max.

    Raises:
        ArgumentError: If ``base`` has a triangle.
        SizeError: If |V(base)|·n_max exceeds 32.
    """
    _require_triangle_free(base)
    if n_max < 1 or base.n * n_max > MAX_VERTICES:
        raise SizeError(f"Need 1 <= N and {base.n}·N <= {MAX_VERTICES}, got N = {n_max}")
    out = []
    for factor in range(1, n_max + 1):
        g = blow_up(BlowupSpec.uniform(base, factor))
        out.append((factor, induced_density(g, a) if a.n <= g.n else Fraction(0)))
    return out


def balanced_c5_density(factor: int) -> Fraction:
    """Pentagon density of the N-fold balanced pentagon blow-up: N^5·5!/(5N)_5."""
    if factor < 1:
        raise ArgumentError(f"Blow-up factor must be positive, got {factor}")
    n = 5 * factor
    return Fraction(120 * factor**5, prod(n - i for i in range(5)))


def blowup_limit_density(g: Graph) -> Fraction:
    """Limit of the pentagon density of the balanced blow-ups of ``g``: 120·count/n^5."""
    _require_triangle_free(g)
    return Fraction(120 * count_induced_copies(g, PENTAGON), g.n**5)


def reduction_demo(g: Graph) -> str:
    """Walk through the count-to-density reduction with the actual numbers for ``g``."""
    check = erdos_check(g)
    n = g.n
    epsilon = check.count - check.cap
    limit = Fraction(120 * check.count, n**5)
    lines = [
        f"graph: {write_graph6(g)} (n = {n})",
        f"pentagons: {check.count}",
        f"cap (n/5)^5: {format_rational(check.cap)}",
        f"excess eps = count - cap: {format_rational(epsilon)}",
        f"limit density of balanced blow-ups: 120·{check.count}/{n}^5 = {format_rational(limit)}",
        f"  = 24/625 + 120·eps/n^5 = 24/625 {_signed(limit - PENTAGON_BOUND)}",
    ]
    if check.verdict is Verdict.VIOLATION:
        lines.append("limit exceeds the certified bound 24/625: contradiction")
    elif check.verdict is Verdict.TIGHT:
        lines.append("tight: the limit equals the certified bound 24/625 (margin 0)")
    else:
        lines.append(f"below: margin {format_rational(check.margin)} copies under the cap")
    lines.append(f"verdict: {check}")
    return "\n".join(lines) + "\n"


def parse_factors(text: str, base: Graph) -> tuple[int, ...]:
    """``"2"`` (uniform) or ``"1,2,1,1,3"`` (per vertex)."""
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ArgumentError(f"Invalid blow-up factors: {text!r}")
    if len(values) == 1:
        return values * base.n
    return values


def _signed(value: Fraction) -> str:
    return f"- {format_rational(-value)}" if value < 0 else f"+ {format_rational(value)}"
