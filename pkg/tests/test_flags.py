"""Tests for types, flag enumeration, flag densities and pair-density tables."""

import itertools
import random
from fractions import Fraction

import pytest

from flagcert.blowup import BlowupSpec, balanced_c5_density, blow_up
from flagcert.errors import ArgumentError, SizeError
from flagcert.flags import (
    SIGMA0,
    SIGMA1,
    SIGMA2,
    Flag,
    FlagBasis,
    averaging_identity_check,
    c_h,
    enumerate_flags,
    flag_density,
    flag_density_vector,
    flag_isomorphic,
    lemma_sum,
    named_type,
    pair_configurations,
    pair_density_table,
    subgraph_distribution,
)
from flagcert.graphs import (
    ForbiddenFamily,
    Graph,
    canonical_form,
    complete_graph,
    cycle_graph,
    empty_graph,
    enumerate_free_graphs,
    petersen_graph,
    single_edge_graph,
)
from flagcert.linalg import RationalMatrix, quadratic_form

C5 = cycle_graph(5)
TRIANGLE_FREE = ForbiddenFamily.of(complete_graph(3))


@pytest.fixture(scope="module")
def bases():
    return [enumerate_flags(t, 4, TRIANGLE_FREE) for t in (SIGMA0, SIGMA1, SIGMA2)]


@pytest.fixture(scope="module")
def shipped():
    from flagcert.certificate import load_shipped_certificate

    return load_shipped_certificate()


def one_vertex_flag(t, mask: int) -> Flag:
    """Order-4 flag whose extra vertex is joined to the labels in ``mask``."""
    edges = [(u, v) for u, v in itertools.combinations(range(3), 2) if t.graph.has_edge(u, v)]
    edges += [(i, 3) for i in range(3) if (mask >> i) & 1]
    return Flag(t, Graph.from_edges(4, edges), (0, 1, 2))


def random_triangle_free(rng: random.Random, n: int) -> Graph:
    """Greedy random triangle-free graph: add shuffled pairs while no triangle closes."""
    pairs = list(itertools.combinations(range(n), 2))
    rng.shuffle(pairs)
    rows = [0] * n
    for u, v in pairs:
        if rng.random() < 0.6 and not rows[u] & rows[v]:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
    return Graph(n, tuple(rows))


# ---------------------------------------------------------------------------
# Types and flags
# ---------------------------------------------------------------------------


def test_named_types():
    """Test the three three-vertex types and the labelled form."""
    assert named_type("sigma0") == SIGMA0
    assert SIGMA1.graph.edges() == [(0, 1)]
    assert SIGMA2.graph.edges() == [(0, 1), (1, 2)]
    # the path 1-2-3 with label 1 on the middle vertex
    relabelled = named_type("p3:2,1,3")
    assert relabelled.graph.edges() == [(0, 1), (0, 2)]
    with pytest.raises(ArgumentError):
        named_type("p3:1,1,3")


def test_flag_counts(bases):
    """Test 8, 6 and 5 admissible order-4 flags for the three types."""
    assert [len(b) for b in bases] == [8, 6, 5]


def test_flag_extension_masks(bases):
    """Test that each basis lists every admissible neighbourhood of the extra vertex once."""
    expected = {
        "sigma0": set(range(8)),
        "sigma1": {0b000, 0b001, 0b010, 0b100, 0b101, 0b110},
        "sigma2": {0b000, 0b001, 0b010, 0b100, 0b101},
    }
    for basis in bases:
        masks = [f.extension_mask(3) for f in basis]
        assert len(set(masks)) == len(masks)
        assert set(masks) == expected[basis.type.name]


def test_flags_of_type_with_forbidden_graph():
    """Test that a type containing a forbidden graph has no flags."""
    from flagcert.flags import make_type

    assert len(enumerate_flags(make_type(complete_graph(3)), 4, TRIANGLE_FREE)) == 0


def test_flag_order_limits():
    """Test the m range."""
    with pytest.raises(SizeError):
        enumerate_flags(SIGMA0, 2, TRIANGLE_FREE)
    with pytest.raises(SizeError):
        enumerate_flags(SIGMA0, 9, TRIANGLE_FREE)


def test_flag_rejects_wrong_labels():
    """Test that labels must induce the type."""
    with pytest.raises(ArgumentError):
        Flag(SIGMA1, empty_graph(4), (0, 1, 2))
    with pytest.raises(ArgumentError):
        Flag(SIGMA0, empty_graph(4), (0, 0, 1))


def test_flag_isomorphism_respects_labels():
    """Test that unlabelled vertices may move but labels may not."""
    to_first = one_vertex_flag(SIGMA0, 0b001)
    to_second = one_vertex_flag(SIGMA0, 0b010)
    assert not flag_isomorphic(to_first, to_second)

    a = Flag(SIGMA0, Graph.from_edges(5, [(0, 3), (1, 4)]), (0, 1, 2))
    b = Flag(SIGMA0, Graph.from_edges(5, [(1, 3), (0, 4)]), (0, 1, 2))
    assert flag_isomorphic(a, b)

    # extra vertex joined to label 1, with the labels stored on other vertices
    moved = Flag(SIGMA0, Graph.from_edges(4, [(3, 0)]), (3, 1, 2))
    assert flag_isomorphic(to_first, moved)
    assert not flag_isomorphic(to_second, moved)
    assert flag_isomorphic(one_vertex_flag(SIGMA0, 0b000), Flag(SIGMA0, empty_graph(4), (2, 0, 1)))

    with pytest.raises(ArgumentError):
        flag_isomorphic(to_first, one_vertex_flag(SIGMA1, 0))


def test_basis_rejects_duplicates():
    """Test that isomorphic flags cannot share a basis."""
    f = one_vertex_flag(SIGMA0, 0b011)
    with pytest.raises(ArgumentError):
        FlagBasis(SIGMA0, 4, (f, f))


def test_labelled_code_is_minimum_over_unlabelled_orders():
    """Test the flag key against min over every order of the unlabelled vertices."""
    from flagcert.flags import make_type

    rng = random.Random(37)
    for _ in range(80):
        m = rng.randint(4, 6)
        s = rng.randint(1, 3)
        g = Graph.from_edges(m, [(i, j) for i in range(m) for j in range(i + 1, m) if rng.random() < 0.5])
        labels = tuple(rng.sample(range(m), s))
        t = make_type(Graph.from_code(s, g.code(labels)))
        rest = [v for v in range(m) if v not in labels]
        expected = min(g.code(labels + p) for p in itertools.permutations(rest))
        assert Flag(t, g, labels).key[2] == expected


# ---------------------------------------------------------------------------
# Single-flag densities
# ---------------------------------------------------------------------------


def test_flag_density_examples():
    """Test densities at a fixed labelling."""
    isolated = one_vertex_flag(SIGMA1, 0)
    assert flag_density(isolated, (0, 1, 2), single_edge_graph(5)) == 1

    g = Graph.from_edges(5, [(0, 1), (2, 3)])
    to_third = one_vertex_flag(SIGMA1, 0b100)
    assert flag_density(to_third, (0, 1, 2), g) == Fraction(1, 2)
    assert flag_density(isolated, (0, 1, 2), g) == Fraction(1, 2)


def test_flag_density_rejects_bad_theta(bases):
    """Test that theta must induce the type."""
    with pytest.raises(ArgumentError):
        flag_density_vector(bases[1], (0, 1, 2), empty_graph(5))
    with pytest.raises(ArgumentError):
        flag_density_vector(bases[0], (0, 1), empty_graph(5))


def test_flag_density_vector_sums_to_one(bases):
    """Test that in a triangle-free graph the densities at theta sum to one."""
    rng = random.Random(29)
    for _ in range(60):
        g = random_triangle_free(rng, rng.randint(5, 9))
        basis = rng.choice(bases)
        thetas = [th for th in itertools.permutations(range(g.n), 3) if g.code(th) == basis.type.code]
        if not thetas:
            continue
        assert sum(flag_density_vector(basis, rng.choice(thetas), g)) == 1


def test_quadratic_form_of_densities_nonnegative(bases):
    """Test xᵀQx >= 0 for random PSD Q and random labelled triangle-free graphs."""
    rng = random.Random(31)
    checked = 0
    while checked < 1000:
        g = random_triangle_free(rng, rng.randint(4, 9))
        basis = rng.choice(bases)
        thetas = [th for th in itertools.permutations(range(g.n), 3) if g.code(th) == basis.type.code]
        if not thetas:
            continue
        dim = len(basis)
        b = [[rng.randint(-4, 4) for _ in range(dim)] for _ in range(rng.randint(1, dim))]
        q = RationalMatrix.of([[sum(r[i] * r[j] for r in b) for j in range(dim)] for i in range(dim)])
        x = flag_density_vector(basis, rng.choice(thetas), g)
        assert quadratic_form(q, x) >= 0
        checked += 1


# ---------------------------------------------------------------------------
# Pair-density tables
# ---------------------------------------------------------------------------


def test_pair_configurations():
    """Test the normalisation for five-vertex hosts and three-vertex types."""
    assert pair_configurations(5, 3, 4) == 120
    assert pair_configurations(6, 3, 4) == 120 * 3 * 2


def test_single_edge_host_sigma1(bases):
    """Test t_11 = 1/10 for the isolated-extension sigma1 flag on a single edge."""
    basis = bases[1]
    table = pair_density_table(basis, single_edge_graph(5))
    a = basis.index(one_vertex_flag(SIGMA1, 0))
    assert table.entry(a, a) == Fraction(1, 10)
    assert table.total() == Fraction(1, 10)


def test_single_edge_host_sigma0(bases):
    """Test the sigma0 table on a single edge."""
    basis = bases[0]
    table = pair_density_table(basis, single_edge_graph(5))
    empty = basis.index(one_vertex_flag(SIGMA0, 0))
    assert table.entry(empty, empty) == Fraction(1, 10)
    for label in range(3):
        other = basis.index(one_vertex_flag(SIGMA0, 1 << label))
        assert table.entry(empty, other) + table.entry(other, empty) == Fraction(1, 5)
    assert table.total() == Fraction(7, 10)


def test_edgeless_host_sigma0(bases):
    """Test that on the edgeless host every configuration is the isolated pair."""
    basis = bases[0]
    table = pair_density_table(basis, empty_graph(5))
    a = basis.index(one_vertex_flag(SIGMA0, 0))
    assert table.entry(a, a) == 1
    assert table.total() == 1


def test_table_symmetry_and_row_sums(bases):
    """Test t_ab = t_ba and that the entries sum to the share of theta inducing the type."""
    for h in enumerate_free_graphs(5, TRIANGLE_FREE):
        for basis in bases:
            table = pair_density_table(basis, h)
            size = len(basis)
            assert all(table.entry(a, b) == table.entry(b, a) for a in range(size) for b in range(size))
            inducing = sum(1 for th in itertools.permutations(range(5), 3) if h.code(th) == basis.type.code)
            assert table.total() == Fraction(inducing, 60)


def test_table_needs_room(bases):
    """Test that the host must fit two flags overlapping in the type."""
    with pytest.raises(SizeError):
        pair_density_table(bases[0], empty_graph(4))


def test_c_h_on_single_edge(bases, shipped):
    """Test c_H for the single-edge host with the shipped matrices."""
    host = single_edge_graph(5)
    total = sum(c_h(block.basis, block.matrix, host) for block in shipped.types)
    assert total == Fraction(24, 625)


def test_off_diagonal_entries_count_twice(shipped):
    """Test that raising q_ab and q_ba by d changes c_H by 2 t_ab d."""
    delta = Fraction(1, 7)
    for block in shipped.types:
        a, b = 1, 3
        rows = [list(row) for row in block.matrix.rows]
        rows[a][b] += delta
        rows[b][a] += delta
        shifted = RationalMatrix.of(rows)
        for host in enumerate_free_graphs(5, TRIANGLE_FREE):
            t_ab = pair_density_table(block.basis, host).entry(a, b)
            change = c_h(block.basis, shifted, host) - c_h(block.basis, block.matrix, host)
            assert change == 2 * t_ab * delta


def test_contract_rejects_wrong_size(bases):
    """Test that the matrix must match the basis."""
    table = pair_density_table(bases[2], C5)
    with pytest.raises(ArgumentError):
        table.contract(RationalMatrix.zeros(4))


# ---------------------------------------------------------------------------
# Host distributions, averaging, quadratic-form side
# ---------------------------------------------------------------------------


def test_subgraph_distribution_of_blowup():
    """Test p(C5; C5[2]) = 32/252 and that the distribution sums to one."""
    g = blow_up(BlowupSpec.uniform(C5, 2))
    distribution = subgraph_distribution(g, 5, TRIANGLE_FREE)
    hosts = enumerate_free_graphs(5, TRIANGLE_FREE)
    c5 = next(i for i, h in enumerate(hosts) if canonical_form(h) == canonical_form(C5))
    assert distribution[c5] == Fraction(32, 252)
    assert sum(distribution.values()) == 1
    assert len(distribution) == 14


def test_subgraph_distribution_rejects_triangle():
    """Test that the graph itself must be free."""
    with pytest.raises(ArgumentError):
        subgraph_distribution(complete_graph(5), 5, TRIANGLE_FREE)


def test_averaging_identity_named_graphs():
    """Test the identity on the blow-up and the Petersen graph."""
    g = blow_up(BlowupSpec.uniform(C5, 2))
    assert averaging_identity_check(g, C5, 5, TRIANGLE_FREE) == (Fraction(8, 63), Fraction(8, 63))
    assert averaging_identity_check(petersen_graph(), C5, 5, TRIANGLE_FREE)[0] == Fraction(1, 21)


def test_averaging_identity_random_graphs():
    """Test the identity on random triangle-free graphs of order 6..10."""
    rng = random.Random(37)
    for _ in range(200):
        g = random_triangle_free(rng, rng.randint(6, 10))
        lhs, rhs = averaging_identity_check(g, C5, 5, TRIANGLE_FREE)
        assert lhs == rhs


def test_averaging_identity_size_check():
    """Test that l must lie between |V(A)| and |V(G)|."""
    with pytest.raises(SizeError):
        averaging_identity_check(cycle_graph(6), C5, 4, TRIANGLE_FREE)


@pytest.mark.parametrize("factor", [2, 3, 4, 5])
def test_quadratic_side_on_blowups(shipped, factor):
    """Test the averaged quadratic-form side on balanced pentagon blow-ups.

    Every five-vertex induced subgraph of a pentagon blow-up has b_H = 24/625,
    so the side equals 24/625 minus the pentagon density.
    """
    g = blow_up(BlowupSpec.uniform(C5, factor))
    terms = [(block.basis, block.matrix) for block in shipped.types]
    value = lemma_sum(terms, g, 5, TRIANGLE_FREE)
    assert value == Fraction(24, 625) - balanced_c5_density(factor)
    assert value >= Fraction(-1, factor)
