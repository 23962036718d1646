"""Small simple graphs: bit-row adjacency, graph6 I/O, canonical forms,
isomorph-free enumeration of forbidden-subgraph-free graphs, and
induced-subgraph counting.

Vertices are 0-based everywhere in this module. Anything user facing
(CLI, certificate files) converts to 1-based at the boundary.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

import networkx as nx

from flagcert.errors import ArgumentError, Graph6Error, SizeError, UnsupportedSizeError

MAX_VERTICES = 32
MAX_CANONICAL = 8  # brute-force canonical forms stop here

_GRAPH6_OFFSET = 63


@lru_cache(maxsize=None)
def _pairs(n: int) -> tuple[tuple[int, int], ...]:
    """Upper-triangle vertex pairs in row order: (0,1), (0,2), ..., (1,2), ..."""
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


def subset_code(adj: Sequence[int], verts: Sequence[int]) -> int:
    """Upper-triangle bit code of the subgraph induced on ``verts`` in that order.

    The first pair is the most significant bit, so comparing codes as integers
    compares the bitstrings lexicographically.
    """
    code = 0
    k = len(verts)
    for i in range(k):
        row = adj[verts[i]]
        for j in range(i + 1, k):
            code = (code << 1) | ((row >> verts[j]) & 1)
    return code


@dataclass(frozen=True, slots=True)
class Graph:
    """Undirected simple graph; bit ``u`` of ``adj[v]`` is set iff {u, v} is an edge."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_VERTICES:
            raise SizeError(f"Graph must have 1..{MAX_VERTICES} vertices, got {self.n}")
        if len(self.adj) != self.n:
            raise ArgumentError(f"Expected {self.n} adjacency rows, got {len(self.adj)}")
        mask = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row < 0 or row & ~mask:
                raise ArgumentError(f"Row {v + 1} has bits beyond vertex {self.n}")
            if (row >> v) & 1:
                raise ArgumentError(f"Self-loop at vertex {v + 1}")
            for u in range(self.n):
                if (row >> u) & 1 and not (self.adj[u] >> v) & 1:
                    raise ArgumentError(f"Asymmetric adjacency between {v + 1} and {u + 1}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        """Build a graph from 0-based edge pairs."""
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ArgumentError(f"Self-loop at vertex {u + 1}")
            if not (0 <= u < n and 0 <= v < n):
                raise ArgumentError(f"Edge ({u + 1}, {v + 1}) outside 1..{n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def from_code(cls, n: int, code: int) -> Graph:
        """Inverse of :meth:`code` for the identity order."""
        rows = [0] * n
        pairs = _pairs(n)
        total = len(pairs)
        for idx, (i, j) in enumerate(pairs):
            if (code >> (total - 1 - idx)) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
        return cls(n, tuple(rows))

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        row = self.adj[v]
        return [u for u in range(self.n) if (row >> u) & 1]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in _pairs(self.n) if (self.adj[i] >> j) & 1]

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def code(self, order: Sequence[int] | None = None) -> int:
        return subset_code(self.adj, range(self.n) if order is None else order)

    def __str__(self) -> str:
        return write_graph6(self)


@dataclass(frozen=True, slots=True, order=True)
class CanonicalForm:
    """Lexicographically smallest upper-triangle code over all vertex orders."""

    n: int
    bits: int

    @property
    def bitstring(self) -> str:
        width = self.n * (self.n - 1) // 2
        return format(self.bits, f"0{width}b") if width else ""


@dataclass(frozen=True)
class ForbiddenFamily:
    """Nonempty set of pairwise non-isomorphic graphs, each with at least one edge."""

    members: tuple[Graph, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ArgumentError("Forbidden family must have at least one member")
        seen: set[CanonicalForm] = set()
        canonical = []
        for g in self.members:
            if g.edge_count == 0:
                raise ArgumentError(f"Forbidden graph {write_graph6(g)} has no edges")
            form = canonical_form(g)
            if form in seen:
                raise ArgumentError(f"Forbidden family has isomorphic members ({write_graph6(g)})")
            seen.add(form)
            canonical.append(canonical_graph(g))
        object.__setattr__(self, "members", tuple(canonical))

    @classmethod
    def of(cls, *graphs: Graph) -> ForbiddenFamily:
        return cls(tuple(graphs))

    def graph6(self) -> list[str]:
        return [write_graph6(g) for g in self.members]


# =============================================================================
# graph6
# =============================================================================


def parse_graph6(text: str) -> Graph:
    """Parse a headerless graph6 string for a graph on 1..32 vertices.

    Raises:
        Graph6Error: Naming the byte offset of the first problem.
    """
    data = text.strip()
    if not data:
        raise Graph6Error("Empty graph6 string", offset=0)
    if data.startswith(">>graph6<<"):
        raise Graph6Error("graph6 headers are not supported", offset=0)
    for i, ch in enumerate(data):
        if not _GRAPH6_OFFSET <= ord(ch) <= 126:
            raise Graph6Error(f"Character {ch!r} outside the graph6 range", offset=i)

    n = ord(data[0]) - _GRAPH6_OFFSET
    if n == 63:
        raise Graph6Error("Long-form vertex counts are not supported", offset=0)
    if not 1 <= n <= MAX_VERTICES:
        raise Graph6Error(f"Vertex count {n} outside 1..{MAX_VERTICES}", offset=0)

    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    if len(data) != 1 + nbytes:
        raise Graph6Error(
            f"Expected {1 + nbytes} bytes for {n} vertices, got {len(data)}",
            offset=min(len(data), 1 + nbytes),
        )

    bits = []
    for ch in data[1:]:
        value = ord(ch) - _GRAPH6_OFFSET
        bits.extend((value >> shift) & 1 for shift in range(5, -1, -1))
    if any(bits[nbits:]):
        raise Graph6Error("Nonzero padding bits", offset=len(data) - 1)

    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    return Graph(n, tuple(rows))


def write_graph6(g: Graph) -> str:
    """Standard headerless graph6 encoding."""
    bits = [(g.adj[i] >> j) & 1 for j in range(1, g.n) for i in range(j)]
    bits.extend([0] * (-len(bits) % 6))
    chars = [chr(_GRAPH6_OFFSET + g.n)]
    for start in range(0, len(bits), 6):
        value = 0
        for b in bits[start:start + 6]:
            value = (value << 1) | b
        chars.append(chr(_GRAPH6_OFFSET + value))
    return "".join(chars)


# =============================================================================
# Construction helpers and named graphs
# =============================================================================


def empty_graph(n: int) -> Graph:
    return Graph(n, (0,) * n)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, _pairs(n))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ArgumentError(f"Cycles need at least 3 vertices, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def single_edge_graph(n: int) -> Graph:
    """One edge on vertices 1, 2 plus n-2 isolated vertices."""
    if n < 2:
        raise ArgumentError(f"A single edge needs at least 2 vertices, got {n}")
    return Graph.from_edges(n, [(0, 1)])


def from_networkx(nx_graph: nx.Graph) -> Graph:
    """Convert a networkx graph; vertices are numbered in sorted node order."""
    nodes = sorted(nx_graph.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    return Graph.from_edges(len(nodes), [(index[u], index[v]) for u, v in nx_graph.edges()])


def to_networkx(g: Graph) -> nx.Graph:
    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(range(g.n))
    nx_graph.add_edges_from(g.edges())
    return nx_graph


def petersen_graph() -> Graph:
    return from_networkx(nx.petersen_graph())


_NAMED_SIZED = re.compile(r"^(empty|edge):(\d+)$")
_NAMED_FAMILY = re.compile(r"^([kcp])(\d+)$")


def named_graph(spec: str) -> Graph:
    """Resolve a CLI graph argument: a keyword or a graph6 string.

    Keywords: ``k3``, ``c5``, ``petersen``, ``empty:<n>``, ``edge:<n>``,
    and more generally ``k<n>`` (complete), ``c<n>`` (cycle), ``p<n>`` (path).
    """
    text = spec.strip()
    key = text.lower()
    if key == "petersen":
        return petersen_graph()
    if match := _NAMED_SIZED.match(key):
        kind, n = match.group(1), int(match.group(2))
        return empty_graph(n) if kind == "empty" else single_edge_graph(n)
    if match := _NAMED_FAMILY.match(key):
        kind, n = match.group(1), int(match.group(2))
        builders = {"k": complete_graph, "c": cycle_graph, "p": path_graph}
        return builders[kind](n)
    return parse_graph6(text)


def named_family(specs: Iterable[str]) -> ForbiddenFamily:
    return ForbiddenFamily(tuple(named_graph(s) for s in specs))


# =============================================================================
# Subgraphs, relabeling, forbidden containment
# =============================================================================


def relabel(g: Graph, order: Sequence[int]) -> Graph:
    """Graph whose vertex i is ``order[i]`` of ``g``; ``order`` must be a permutation."""
    if sorted(order) != list(range(g.n)):
        raise ArgumentError(f"Not a permutation of 1..{g.n}: {[v + 1 for v in order]}")
    return Graph.from_code(g.n, subset_code(g.adj, order))


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    """Subgraph induced on ``s``, relabeled by increasing original index."""
    verts = sorted(set(s))
    if not verts:
        raise ArgumentError("Vertex subset must be nonempty")
    if verts[0] < 0 or verts[-1] >= g.n:
        raise ArgumentError(f"Vertex subset {[v + 1 for v in verts]} outside 1..{g.n}")
    return Graph.from_code(len(verts), subset_code(g.adj, verts))


def _has_clique(adj: Sequence[int], k: int, candidates: int) -> bool:
    if k == 0:
        return True
    while candidates:
        if candidates.bit_count() < k:
            return False
        v = candidates.bit_length() - 1
        candidates &= ~(1 << v)
        if _has_clique(adj, k - 1, candidates & adj[v]):
            return True
    return False


def _spans(sub: Graph, member: Graph, member_edges: list[tuple[int, int]]) -> bool:
    """True iff ``member`` embeds into ``sub`` (same order) as a spanning subgraph."""
    for perm in itertools.permutations(range(sub.n)):
        if all((sub.adj[perm[u]] >> perm[v]) & 1 for u, v in member_edges):
            return True
    return False


def _contains_member(g: Graph, member: Graph) -> bool:
    k = member.n
    if k > g.n or member.edge_count > g.edge_count:
        return False
    if member.edge_count == k * (k - 1) // 2:
        return _has_clique(g.adj, k, (1 << g.n) - 1)

    member_edges = member.edges()
    need = len(member_edges)
    min_degree = min(member.degree(v) for v in range(k))
    candidates = [v for v in range(g.n) if g.degree(v) >= min_degree]
    cache: dict[int, bool] = {}
    for verts in itertools.combinations(candidates, k):
        code = subset_code(g.adj, verts)
        if code.bit_count() < need:
            continue
        hit = cache.get(code)
        if hit is None:
            hit = cache[code] = _spans(Graph.from_code(k, code), member, member_edges)
        if hit:
            return True
    return False


def contains_forbidden(g: Graph, fam: ForbiddenFamily) -> bool:
    """True iff some member of ``fam`` is a (not necessarily induced) subgraph of ``g``."""
    return any(_contains_member(g, member) for member in fam.members)


def is_free(g: Graph, fam: ForbiddenFamily) -> bool:
    return not contains_forbidden(g, fam)


# =============================================================================
# Canonical forms
# =============================================================================


def minimal_code(
    adj: Sequence[int],
    prefix: Sequence[int],
    free: Iterable[int],
) -> tuple[int, tuple[int, ...]]:
    """Smallest code over all orders that start with ``prefix`` and permute ``free``.

    Positions are filled left to right. Once a vertex is placed, every later cell
    is split into its non-neighbours followed by its neighbours, which fixes the
    smallest possible row for that vertex; only branches whose code so far is
    minimal survive. Rows of later positions never involve placed vertices, so
    branches with equal codes and equal remaining cells are merged.

    Returns:
        Tuple of (code, vertex order attaining it).
    """
    prefix = tuple(prefix)
    free = tuple(free)
    n = len(prefix) + len(free)
    states: list[tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]] = [((), (free,) if free else ())]
    best = 0
    for i in range(n):
        level: dict[tuple, tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]] = {}
        level_best: int | None = None
        for placed, cells in states:
            if i < len(prefix):
                candidates = [(prefix[i], cells)]
            else:
                first, *others = cells
                candidates = [
                    (v, ((tuple(u for u in first if u != v),) if len(first) > 1 else ()) + tuple(others))
                    for v in first
                ]
            for v, rest in candidates:
                row = 0
                for u in prefix[i + 1 :]:
                    row = (row << 1) | ((adj[v] >> u) & 1)
                split: list[tuple[int, ...]] = []
                for cell in rest:
                    outside = tuple(u for u in cell if not (adj[v] >> u) & 1)
                    inside = tuple(u for u in cell if (adj[v] >> u) & 1)
                    row = (row << len(cell)) | ((1 << len(inside)) - 1)
                    split.extend(c for c in (outside, inside) if c)
                code = (best << (n - 1 - i)) | row
                if level_best is not None and code > level_best:
                    continue
                if level_best is None or code < level_best:
                    level_best, level = code, {}
                key = tuple(frozenset(c) for c in split)
                level.setdefault(key, (placed + (v,), tuple(split)))
        best = level_best or 0
        states = list(level.values())
    order = states[0][0] if states else ()
    return best, order


@lru_cache(maxsize=1 << 16)
def _canonical(g: Graph) -> tuple[int, tuple[int, ...]]:
    if g.n > MAX_CANONICAL:
        raise UnsupportedSizeError(
            f"Canonical forms are computed by brute force for at most {MAX_CANONICAL} vertices, got {g.n}"
        )
    return minimal_code(g.adj, (), range(g.n))


def canonical_form(g: Graph) -> CanonicalForm:
    """Canonical code of ``g``; equal for two graphs iff they are isomorphic.

    Raises:
        UnsupportedSizeError: If ``g`` has more than 8 vertices.
    """
    code, _ = _canonical(g)
    return CanonicalForm(g.n, code)


def canonical_graph(g: Graph) -> Graph:
    """The representative of ``g``'s isomorphism class whose identity code is canonical."""
    code, _ = _canonical(g)
    return Graph.from_code(g.n, code)


class CodeClassifier:
    """Memoised map from raw induced-subgraph codes on k vertices to canonical forms."""

    def __init__(self, k: int):
        self.k = k
        self._cache: dict[int, CanonicalForm] = {}

    def __call__(self, code: int) -> CanonicalForm:
        form = self._cache.get(code)
        if form is None:
            form = self._cache[code] = canonical_form(Graph.from_code(self.k, code))
        return form


# =============================================================================
# Enumeration
# =============================================================================


def graph_sort_key(g: Graph) -> tuple[int, int]:
    return (g.edge_count, canonical_form(g).bits)


@lru_cache(maxsize=64)
def _enumerate_free(l: int, fam: ForbiddenFamily) -> tuple[Graph, ...]:
    level = {canonical_form(empty_graph(1)): empty_graph(1)}
    for k in range(1, l):
        grown: dict[CanonicalForm, Graph] = {}
        for g in level.values():
            for mask in range(1 << k):
                rows = list(g.adj) + [mask]
                for u in range(k):
                    if (mask >> u) & 1:
                        rows[u] |= 1 << k
                h = Graph(k + 1, tuple(rows))
                if contains_forbidden(h, fam):
                    continue
                form = canonical_form(h)
                if form not in grown:
                    grown[form] = canonical_graph(h)
        level = grown
    return tuple(sorted(level.values(), key=graph_sort_key))


def enumerate_free_graphs(l: int, fam: ForbiddenFamily) -> list[Graph]:
    """All ``fam``-free graphs on ``l`` vertices up to isomorphism.

    Grows graphs one vertex at a time keeping canonical representatives;
    being ``fam``-free is hereditary, so every free graph is reached.
    Output is sorted by (edge count, canonical bits).
    """
    if not 1 <= l <= MAX_CANONICAL:
        raise SizeError(f"Enumeration supports 1..{MAX_CANONICAL} vertices, got {l}")
    return list(_enumerate_free(l, fam))


# =============================================================================
# Counting
# =============================================================================


def count_induced_copies(g: Graph, a: Graph) -> int:
    """Number of |V(a)|-subsets of ``g`` inducing a graph isomorphic to ``a``."""
    k = a.n
    if k > MAX_CANONICAL:
        raise UnsupportedSizeError(f"Pattern graphs may have at most {MAX_CANONICAL} vertices, got {k}")
    if k > g.n:
        return 0
    target = canonical_form(a)
    need = a.edge_count
    min_degree = min(a.degree(v) for v in range(k))
    candidates = [v for v in range(g.n) if g.degree(v) >= min_degree]

    classify = CodeClassifier(k)
    count = 0
    for verts in itertools.combinations(candidates, k):
        code = subset_code(g.adj, verts)
        if code.bit_count() == need and classify(code) == target:
            count += 1
    return count


def induced_density(g: Graph, a: Graph) -> Fraction:
    """d_A(G): induced copies of ``a`` over C(n, k)."""
    if a.n > g.n:
        raise SizeError(f"Pattern has {a.n} vertices but the graph only {g.n}")
    return Fraction(count_induced_copies(g, a), comb(g.n, a.n))
