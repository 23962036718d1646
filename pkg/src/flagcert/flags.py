"""Types, flags, flag bases and exact pair-density tables.

A flag of order m over a type on s vertices is stored as an m-vertex graph
plus the 0-based vertices carrying labels 1..s. Two flags are compared by a
labelled canonical code: labels first in label order, the unlabelled
vertices permuted inside cells of equal invariant (adjacency to each label,
degree, neighbour degrees) to minimise the upper-triangle code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

from flagcert.errors import ArgumentError, IdentityViolation, SizeError
from flagcert.graphs import (
    MAX_CANONICAL,
    CanonicalForm,
    CodeClassifier,
    ForbiddenFamily,
    Graph,
    contains_forbidden,
    empty_graph,
    enumerate_free_graphs,
    induced_density,
    minimal_code,
    named_graph,
    subset_code,
    write_graph6,
)
from flagcert.linalg import RationalMatrix, format_rational


@dataclass(frozen=True, slots=True)
class FlagType:
    """A fully labelled graph: vertex i carries label i + 1."""

    graph: Graph
    name: str | None = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return self.graph.n

    @property
    def code(self) -> int:
        return self.graph.code()

    def __str__(self) -> str:
        return self.name or write_graph6(self.graph)


def make_type(g: Graph, name: str | None = None) -> FlagType:
    """Type on ``g`` with the identity labelling.

    Raises:
        SizeError: If ``g`` has more than 8 vertices.
    """
    if g.n > MAX_CANONICAL:
        raise SizeError(f"Types may have at most {MAX_CANONICAL} vertices, got {g.n}")
    return FlagType(g, name)


SIGMA0 = make_type(empty_graph(3), "sigma0")
SIGMA1 = make_type(Graph.from_edges(3, [(0, 1)]), "sigma1")
SIGMA2 = make_type(Graph.from_edges(3, [(0, 1), (1, 2)]), "sigma2")

NAMED_TYPES = {t.name: t for t in (SIGMA0, SIGMA1, SIGMA2)}


def named_type(spec: str) -> FlagType:
    """Resolve ``sigma0``/``sigma1``/``sigma2``, a graph spec, or ``<graph>:<v1,v2,...>``.

    With the ``:`` form, label i goes to the i-th listed (1-based) vertex.
    """
    text = spec.strip()
    if text.lower() in NAMED_TYPES:
        return NAMED_TYPES[text.lower()]
    graph_part, _, labels_part = text.partition(":")
    g = named_graph(graph_part)
    if labels_part:
        try:
            order = [int(v) - 1 for v in labels_part.split(",")]
        except ValueError:
            raise ArgumentError(f"Invalid type labels in {spec!r}")
        if sorted(order) != list(range(g.n)):
            raise ArgumentError(f"Type labels must be a permutation of 1..{g.n}, got {labels_part!r}")
        g = Graph.from_code(g.n, g.code(order))
    return make_type(g)


# =============================================================================
# Flags
# =============================================================================


@lru_cache(maxsize=1 << 16)
def _labelled_code(m: int, s: int, code: int) -> int:
    """Canonical code of the flag whose identity-ordered code is ``code``, labels on 0..s-1."""
    best, _ = minimal_code(Graph.from_code(m, code).adj, range(s), range(s, m))
    return best


@dataclass(frozen=True, slots=True)
class Flag:
    """An m-vertex graph with labels 1..s on ``labels[0..s-1]`` (0-based vertices)."""

    type: FlagType
    graph: Graph
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        s, m = self.type.size, self.graph.n
        if len(self.labels) != s:
            raise ArgumentError(f"Flag needs {s} labels, got {len(self.labels)}")
        if len(set(self.labels)) != s or any(not 0 <= v < m for v in self.labels):
            raise ArgumentError(f"Labels {[v + 1 for v in self.labels]} are not distinct vertices of 1..{m}")
        if m > MAX_CANONICAL:
            raise SizeError(f"Flags may have at most {MAX_CANONICAL} vertices, got {m}")
        if subset_code(self.graph.adj, self.labels) != self.type.code:
            raise ArgumentError(f"Labelled vertices of {write_graph6(self.graph)} do not induce type {self.type}")

    @classmethod
    def from_one_based(cls, t: FlagType, graph: Graph, labels: Sequence[int]) -> Flag:
        return cls(t, graph, tuple(v - 1 for v in labels))

    @property
    def m(self) -> int:
        return self.graph.n

    @property
    def order(self) -> tuple[int, ...]:
        """Labelled vertices in label order, then the rest ascending."""
        rest = tuple(v for v in range(self.m) if v not in self.labels)
        return self.labels + rest

    @property
    def key(self) -> tuple[int, int, int]:
        """(type code, m, labelled canonical code); equal iff flag-isomorphic."""
        code = subset_code(self.graph.adj, self.order)
        return (self.type.code, self.m, _labelled_code(self.m, self.type.size, code))

    @property
    def edge_count(self) -> int:
        return self.graph.edge_count

    def extension_mask(self, vertex: int) -> int:
        """Labels adjacent to ``vertex`` as a bitmask, label i on bit i - 1."""
        row = self.graph.adj[vertex]
        return sum(1 << i for i, v in enumerate(self.labels) if (row >> v) & 1)

    def to_record(self) -> dict:
        return {"graph": write_graph6(self.graph), "labels": [v + 1 for v in self.labels]}

    def __str__(self) -> str:
        return f"{write_graph6(self.graph)}:{','.join(str(v + 1) for v in self.labels)}"


def flag_isomorphic(f1: Flag, f2: Flag) -> bool:
    """Whether a label-preserving isomorphism maps ``f1`` onto ``f2``.

    Raises:
        ArgumentError: If the flags have different types.
    """
    if f1.type != f2.type:
        raise ArgumentError(f"Flags have different types ({f1.type} vs {f2.type})")
    return f1.m == f2.m and f1.key == f2.key


@dataclass
class FlagBasis:
    """Ordered, duplicate-free list of σ-flags of one order."""

    type: FlagType
    m: int
    flags: tuple[Flag, ...]
    _index: dict[tuple[int, int, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._index = {}
        for i, f in enumerate(self.flags):
            if f.type != self.type or f.m != self.m:
                raise ArgumentError(f"Flag {i + 1} ({f}) is not a {self.type}-flag of order {self.m}")
            if f.key in self._index:
                raise ArgumentError(f"Flags {self._index[f.key] + 1} and {i + 1} are isomorphic")
            self._index[f.key] = i

    def __len__(self) -> int:
        return len(self.flags)

    def __iter__(self) -> Iterator[Flag]:
        return iter(self.flags)

    def __getitem__(self, i: int) -> Flag:
        return self.flags[i]

    def index(self, f: Flag) -> int | None:
        """Position of the flag isomorphic to ``f``, or None."""
        return self._index.get(f.key)

    def code_index(self) -> dict[int, int]:
        """Map labelled canonical code → basis position."""
        return {key[2]: i for key, i in self._index.items()}


def _flag_sort_key(f: Flag) -> tuple[int, int]:
    return (f.edge_count, f.key[2])


def enumerate_flags(t: FlagType, m: int, fam: ForbiddenFamily) -> FlagBasis:
    """All admissible ``t``-flags of order ``m`` up to flag isomorphism.

    Flags are grown one unlabelled vertex at a time; admissibility is
    hereditary under deleting unlabelled vertices, so nothing is missed.
    Sorted by (edge count, labelled canonical code).

    Raises:
        SizeError: Unless |σ| <= m <= 8.
    """
    s = t.size
    if not s <= m <= MAX_CANONICAL:
        raise SizeError(f"Flag order must lie in {s}..{MAX_CANONICAL}, got {m}")
    if contains_forbidden(t.graph, fam):
        return FlagBasis(t, m, ())

    level = {t.graph.code(): t.graph}
    for k in range(s, m):
        grown: dict[int, Graph] = {}
        for g in level.values():
            for mask in range(1 << k):
                rows = list(g.adj) + [mask]
                for u in range(k):
                    if (mask >> u) & 1:
                        rows[u] |= 1 << k
                h = Graph(k + 1, tuple(rows))
                if contains_forbidden(h, fam):
                    continue
                code = _labelled_code(k + 1, s, h.code())
                if code not in grown:
                    grown[code] = Graph.from_code(k + 1, code)
        level = grown

    labels = tuple(range(s))
    flags = sorted((Flag(t, g, labels) for g in level.values()), key=_flag_sort_key)
    return FlagBasis(t, m, tuple(flags))


# =============================================================================
# Single-flag densities
# =============================================================================


def _check_theta(t: FlagType, theta: Sequence[int], g: Graph) -> tuple[int, ...]:
    theta = tuple(theta)
    if len(theta) != t.size or len(set(theta)) != t.size or any(not 0 <= v < g.n for v in theta):
        raise ArgumentError(f"theta must be {t.size} distinct vertices of 1..{g.n}, got {[v + 1 for v in theta]}")
    if subset_code(g.adj, theta) != t.code:
        raise ArgumentError(f"Vertices {[v + 1 for v in theta]} do not induce type {t}")
    return theta


def flag_density_vector(basis: FlagBasis, theta: Sequence[int], g: Graph) -> list[Fraction]:
    """x_a for every basis flag: probability that a uniform m-set containing
    im(theta) induces a flag isomorphic to flag a (labels placed by theta).

    Raises:
        ArgumentError: If theta does not induce the basis type.
        SizeError: If m exceeds the order of ``g``.
    """
    t, m = basis.type, basis.m
    theta = _check_theta(t, theta, g)
    if m > g.n:
        raise SizeError(f"Flag order {m} exceeds graph order {g.n}")
    rest = [v for v in range(g.n) if v not in theta]
    lookup = basis.code_index()
    counts = [0] * len(basis)
    total = 0
    for extra in itertools.combinations(rest, m - t.size):
        total += 1
        index = lookup.get(_labelled_code(m, t.size, subset_code(g.adj, theta + extra)))
        if index is not None:
            counts[index] += 1
    return [Fraction(c, total) for c in counts]


def flag_density(f: Flag, theta: Sequence[int], g: Graph) -> Fraction:
    """Density of the single flag ``f`` at the labelled vertices ``theta`` of ``g``."""
    return flag_density_vector(FlagBasis(f.type, f.m, (f,)), theta, g)[0]


# =============================================================================
# Pair densities
# =============================================================================


@dataclass(frozen=True)
class PairDensityTable:
    """Averaged pair densities t_ab = counts[a][b] / configurations."""

    basis: FlagBasis
    host: Graph
    counts: tuple[tuple[int, ...], ...]
    configurations: int

    @property
    def entries(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(Fraction(c, self.configurations) for c in row) for row in self.counts)

    def entry(self, a: int, b: int) -> Fraction:
        return Fraction(self.counts[a][b], self.configurations)

    def total(self) -> Fraction:
        return Fraction(sum(map(sum, self.counts)), self.configurations)

    def contract(self, q: RationalMatrix) -> Fraction:
        """Σ_ab q_ab t_ab over ordered pairs."""
        if q.dim != len(self.basis):
            raise ArgumentError(f"Matrix is {q.dim}x{q.dim} but the basis has {len(self.basis)} flags")
        if not q.is_symmetric():
            raise ArgumentError("Matrix must be symmetric")
        acc = Fraction(0)
        for a, row in enumerate(self.counts):
            for b, c in enumerate(row):
                if c:
                    acc += q[a, b] * c
        return acc / self.configurations

    def to_lines(self) -> list[str]:
        """``a b num/den`` per nonzero ordered pair, 1-based."""
        return [
            f"{a + 1} {b + 1} {format_rational(self.entry(a, b))}"
            for a, row in enumerate(self.counts)
            for b, c in enumerate(row)
            if c
        ]


def pair_configurations(n: int, s: int, m: int) -> int:
    """|Θ|·C(n−s, m−s)·C(n−m, m−s): ordered (θ, V_a, V_b) choices on n vertices."""
    injections = 1
    for i in range(s):
        injections *= n - i
    return injections * comb(n - s, m - s) * comb(n - m, m - s)


def pair_density_table(basis: FlagBasis, h: Graph) -> PairDensityTable:
    """Exact averaged pair densities of ``basis`` on host ``h``.

    Averages over all injections θ of the labels into V(h); θ whose image
    does not induce the type contributes zero. For each θ, V_a ranges over
    the m-sets containing im θ and V_b over those meeting V_a exactly in im θ.

    Raises:
        SizeError: If |V(h)| < 2m − |σ|.
    """
    t, m, s = basis.type, basis.m, basis.type.size
    if h.n < 2 * m - s:
        raise SizeError(f"Host order {h.n} is below 2m - |sigma| = {2 * m - s}")
    lookup = basis.code_index()
    size = len(basis)
    counts = [[0] * size for _ in range(size)]

    for theta in itertools.permutations(range(h.n), s):
        if subset_code(h.adj, theta) != t.code:
            continue
        rest = [v for v in range(h.n) if v not in theta]
        for va in itertools.combinations(rest, m - s):
            a = lookup.get(_labelled_code(m, s, subset_code(h.adj, theta + va)))
            if a is None:
                continue
            remaining = [v for v in rest if v not in va]
            for vb in itertools.combinations(remaining, m - s):
                b = lookup.get(_labelled_code(m, s, subset_code(h.adj, theta + vb)))
                if b is not None:
                    counts[a][b] += 1

    return PairDensityTable(
        basis=basis,
        host=h,
        counts=tuple(tuple(row) for row in counts),
        configurations=pair_configurations(h.n, s, m),
    )


def c_h(basis: FlagBasis, q: RationalMatrix, h: Graph) -> Fraction:
    """c_H(σ, m, Q) = Σ_ab q_ab t_ab."""
    return pair_density_table(basis, h).contract(q)


# =============================================================================
# Host distributions and the averaging identity
# =============================================================================


def subgraph_distribution(g: Graph, l: int, fam: ForbiddenFamily) -> dict[int, Fraction]:
    """p(H; g) for every host H in ``enumerate_free_graphs(l, fam)``, by host index.

    Raises:
        ArgumentError: If ``g`` is not ``fam``-free.
        SizeError: If l exceeds the order of ``g``.
    """
    if l > g.n:
        raise SizeError(f"Host order {l} exceeds graph order {g.n}")
    if contains_forbidden(g, fam):
        raise ArgumentError(f"{write_graph6(g)} contains a forbidden graph")
    hosts = enumerate_free_graphs(l, fam)
    index: dict[CanonicalForm, int] = {}
    classify = CodeClassifier(l)
    for i, host in enumerate(hosts):
        index[classify(host.code())] = i

    counts = [0] * len(hosts)
    for verts in itertools.combinations(range(g.n), l):
        counts[index[classify(subset_code(g.adj, verts))]] += 1
    total = comb(g.n, l)
    return {i: Fraction(c, total) for i, c in enumerate(counts)}


def averaging_identity_check(g: Graph, a: Graph, l: int, fam: ForbiddenFamily) -> tuple[Fraction, Fraction]:
    """Check d_A(g) = Σ_H d_A(H)·p(H; g) exactly.

    Returns:
        Tuple of (lhs, rhs), which are equal.

    Raises:
        SizeError: Unless |V(a)| <= l <= |V(g)|.
        IdentityViolation: If the two sides differ.
    """
    if not a.n <= l <= g.n:
        raise SizeError(f"Need |V(A)| <= l <= |V(G)|, got {a.n}, {l}, {g.n}")
    lhs = induced_density(g, a)
    hosts = enumerate_free_graphs(l, fam)
    distribution = subgraph_distribution(g, l, fam)
    rhs = sum(
        (induced_density(hosts[i], a) * p for i, p in distribution.items() if p),
        Fraction(0),
    )
    if lhs != rhs:
        raise IdentityViolation(f"Averaging identity failed on {write_graph6(g)}: {lhs} != {rhs}")
    return lhs, rhs


def lemma_sum(
    terms: Sequence[tuple[FlagBasis, RationalMatrix]],
    g: Graph,
    l: int,
    fam: ForbiddenFamily,
) -> Fraction:
    """Σ_H p(H; g)·Σ_i c_H(σ_i, m_i, Q_i): the quadratic-form side averaged over ``g``."""
    hosts = enumerate_free_graphs(l, fam)
    total = Fraction(0)
    for i, p in subgraph_distribution(g, l, fam).items():
        if p:
            total += p * sum((c_h(basis, q, hosts[i]) for basis, q in terms), Fraction(0))
    return total
