"""Densities, products, averaging, and objective vectors."""

import random
from fractions import Fraction
from itertools import combinations

import pytest

from flagcert.algebra import (
    SizeBudgetError,
    averaging_map,
    density,
    expand,
    joint_density,
    objective_vector,
    product_table,
    quadratic_form_image,
)
from flagcert.enumeration import enumerate_flags, enumerate_types
from flagcert.graphs import (
    EMPTY_TYPE,
    Flag,
    Graph,
    TypeGraph,
    TypeMismatchError,
    complete_graph,
    graph_flag,
)

from oracles import density_oracle, joint_density_oracle
from smallflags import (
    EDGE_TYPE,
    NONEDGE_TYPE,
    POINT_TYPE,
    cherry_at_first,
    cherry_at_second,
    cycle4,
    cycle4_adjacent_roots,
    cycle4_opposite_roots,
    diamond,
    diamond_deg2_root,
    diamond_deg3_root,
    edge2,
    nonedge2,
    path3_both_leaves,
    path3_center_root,
    path3_leaf_root,
    rooted_cycle4,
    rooted_edge,
    rooted_nonedge,
    rooted_triangle,
    triangle,
)

F = Fraction

# densities of the named small flags, all exact
SINGLE_DENSITIES = [
    (edge2, triangle, F(1)),
    (edge2, cycle4, F(2, 3)),
    (edge2, diamond, F(5, 6)),
    (nonedge2, triangle, F(0)),
    (nonedge2, diamond, F(1, 6)),
    (triangle, cycle4, F(0)),
    (triangle, diamond, F(1, 2)),
    (rooted_edge, rooted_triangle, F(1)),
    (rooted_edge, path3_center_root, F(1)),
    (rooted_edge, path3_leaf_root, F(1, 2)),
    (rooted_edge, rooted_cycle4, F(2, 3)),
    (rooted_edge, diamond_deg3_root, F(1)),
    (rooted_edge, diamond_deg2_root, F(2, 3)),
    (rooted_triangle, rooted_cycle4, F(0)),
    (rooted_triangle, diamond_deg3_root, F(2, 3)),
    (rooted_triangle, diamond_deg2_root, F(1, 3)),
    (cherry_at_first, cycle4_adjacent_roots, F(1, 2)),
    (path3_both_leaves, cycle4_opposite_roots, F(1)),
]

JOINT_DENSITIES = [
    ([edge2, edge2], cycle4, F(2, 3)),
    ([nonedge2, nonedge2], cycle4, F(1, 3)),
    ([edge2, nonedge2], cycle4, F(0)),
    ([edge2, edge2], diamond, F(2, 3)),
    ([edge2, nonedge2], diamond, F(1, 6)),
    ([nonedge2, edge2], diamond, F(1, 6)),
    ([nonedge2, nonedge2], diamond, F(0)),
    ([rooted_nonedge, rooted_triangle], diamond_deg2_root, F(1, 3)),
    ([rooted_edge, rooted_nonedge], rooted_cycle4, F(1, 3)),
    ([rooted_nonedge, rooted_edge], rooted_cycle4, F(1, 3)),
    ([cherry_at_first, cherry_at_first], cycle4_adjacent_roots, F(0)),
    ([cherry_at_first, cherry_at_second], cycle4_adjacent_roots, F(1, 2)),
]


def test_single_density_table():
    for f1, f, expected in SINGLE_DENSITIES:
        assert density(f1, f) == expected, (f1, f)


def test_joint_density_table():
    for flags, f, expected in JOINT_DENSITIES:
        assert joint_density(flags, f) == expected, (flags, f)


def test_density_of_flag_in_itself():
    for f in (triangle, rooted_cycle4, cycle4_adjacent_roots):
        assert density(f, f) == 1


def test_density_errors():
    with pytest.raises(TypeMismatchError):
        density(rooted_edge, triangle)
    with pytest.raises(SizeBudgetError):
        density(diamond, triangle)
    with pytest.raises(SizeBudgetError):
        joint_density([edge2, edge2, edge2], cycle4)


def test_joint_density_matches_single():
    for f1, f, expected in SINGLE_DENSITIES[:6]:
        assert joint_density([f1], f) == expected


def test_joint_density_symmetry():
    rng = random.Random(5)
    basis2 = enumerate_flags(POINT_TYPE, 2)
    basis5 = enumerate_flags(POINT_TYPE, 5)
    for _ in range(25):
        a, b = rng.choice(basis2.flags), rng.choice(basis2.flags)
        host = rng.choice(basis5.flags)
        assert joint_density([a, b], host) == joint_density([b, a], host)


def test_density_against_oracle_sampled():
    rng = random.Random(23)
    for type_ in (EMPTY_TYPE, POINT_TYPE, EDGE_TYPE, NONEDGE_TYPE):
        small = enumerate_flags(type_, type_.s + 2).flags
        hosts = enumerate_flags(type_, type_.s + 3).flags
        for _ in range(15):
            f1, host = rng.choice(small), rng.choice(hosts)
            assert density(f1, host) == density_oracle(f1, host)


def test_joint_density_against_oracle_sampled():
    rng = random.Random(29)
    for type_ in (EMPTY_TYPE, POINT_TYPE):
        s = type_.s
        small = enumerate_flags(type_, s + 1).flags + enumerate_flags(type_, s + 2).flags
        hosts = enumerate_flags(type_, s + 4).flags
        for _ in range(20):
            pair = [rng.choice(small), rng.choice(small)]
            host = rng.choice(hosts)
            if sum(g.size - s for g in pair) > host.size - s:
                continue
            assert joint_density(pair, host) == joint_density_oracle(pair, host)


def test_complement_duality_of_density():
    rng = random.Random(31)
    basis3 = enumerate_flags(POINT_TYPE, 3)
    basis5 = enumerate_flags(POINT_TYPE, 5)
    for _ in range(20):
        f1, f = rng.choice(basis3.flags), rng.choice(basis5.flags)
        assert density(f1, f) == density(f1.complement(), f.complement())


def test_expand_edge_over_three_vertex_basis(zero_bases):
    vec = expand(edge2, zero_bases[3])
    assert vec.coeffs == (F(0), F(1, 3), F(2, 3), F(1))


def test_expand_is_indicator_at_own_size(zero_bases):
    basis = zero_bases[4]
    for i, f in enumerate(basis):
        vec = expand(f, basis)
        assert all(
            c == (1 if j == i else 0) for j, c in enumerate(vec.coeffs)
        )


def test_expand_objective_entry_for_complete_graph(zero_bases):
    k4 = graph_flag(complete_graph(4))
    basis = zero_bases[5]
    k5 = graph_flag(complete_graph(5))
    vec = expand(k4, basis)
    assert vec[basis.index_of(k5)] == 1


def test_chain_rule_small():
    # density(f1, G) must expand through every intermediate size
    for type_ in (EMPTY_TYPE, POINT_TYPE):
        s = type_.s
        f1s = enumerate_flags(type_, s + 1)
        hosts = enumerate_flags(type_, s + 3)
        mid = enumerate_flags(type_, s + 2)
        for f1 in f1s:
            for g in hosts:
                total = sum(
                    density(f1, m) * density(m, g) for m in mid
                )
                assert total == density(f1, g)


def test_product_table_point_type():
    table = product_table(POINT_TYPE, 2)
    assert table.large_size == 3
    assert table.denominator == 2
    # every split realizes exactly one ordered pair of subflags
    for j in table.rows:
        total = sum(
            num * (1 if a == b else 2) for (a, b), num in table.rows[j].items()
        )
        assert total == table.denominator


def test_product_table_matches_joint_density():
    table = product_table(POINT_TYPE, 2)
    small, large = table.small_basis, table.large_basis
    for j, host in enumerate(large):
        for a, fa in enumerate(small):
            for b, fb in enumerate(small):
                assert table.entry(j, a, b) == joint_density([fa, fb], host)


def test_product_chain_consistency():
    # products expanded at l2 and re-expanded into a larger host agree
    # with the direct sunflower density in that host
    table = product_table(POINT_TYPE, 2)
    small, large = table.small_basis, table.large_basis
    hosts = enumerate_flags(POINT_TYPE, 4)
    for host in hosts.flags[:6]:
        for a, fa in enumerate(small):
            for b, fb in enumerate(small):
                via_table = sum(
                    table.entry(j, a, b) * density(fj, host)
                    for j, fj in enumerate(large)
                )
                assert via_table == joint_density([fa, fb], host)


def test_product_table_requires_room():
    with pytest.raises(ValueError):
        product_table(POINT_TYPE, 1)


def test_averaging_rooted_edge():
    avg = averaging_map(POINT_TYPE, 2)
    basis = enumerate_flags(POINT_TYPE, 2)
    zero = enumerate_flags(EMPTY_TYPE, 2)
    assert avg.denominator == 2
    k, q = avg.rows[basis.index_of(rooted_edge)]
    assert q == 1 and zero[k] == edge2
    k, q = avg.rows[basis.index_of(rooted_nonedge)]
    assert q == 1 and zero[k] == nonedge2


def test_averaging_path_root_placements():
    avg = averaging_map(POINT_TYPE, 3)
    basis = enumerate_flags(POINT_TYPE, 3)
    zero = enumerate_flags(EMPTY_TYPE, 3)
    k, q = avg.rows[basis.index_of(path3_leaf_root)]
    assert q == F(2, 3)
    assert zero[k].graph.edge_count == 2
    k, q = avg.rows[basis.index_of(path3_center_root)]
    assert q == F(1, 3)


def test_averaging_weights_sum_per_graph():
    # the weights of all flags over one underlying graph sum to the
    # fraction of root placements inducing the type at all
    for type_ in (POINT_TYPE, EDGE_TYPE):
        l = 4
        avg = averaging_map(type_, l)
        zero = enumerate_flags(EMPTY_TYPE, l)
        per_graph = {}
        for idx, (k, q) in avg.rows.items():
            per_graph[k] = per_graph.get(k, F(0)) + q
        from itertools import permutations as perms

        for k, zf in enumerate(zero):
            g = zf.graph
            match = sum(
                1
                for psi in perms(range(l), type_.s)
                if all(
                    g.has_edge(psi[i], psi[j]) == type_.has_edge(i, j)
                    for i in range(type_.s)
                    for j in range(i + 1, type_.s)
                )
            )
            assert per_graph.get(k, F(0)) == F(match, avg.denominator)


def test_averaging_rejects_zero_type():
    with pytest.raises(ValueError):
        averaging_map(EMPTY_TYPE, 3)


def test_quadratic_form_zero_matrix(zero_bases):
    table = product_table(POINT_TYPE, 2)
    avg = averaging_map(POINT_TYPE, 3)
    dim = len(table.small_basis)
    zero_m = [[F(0)] * dim for _ in range(dim)]
    vec = quadratic_form_image(table, avg, zero_m, zero_bases[3])
    assert all(c == 0 for c in vec.coeffs)


def test_quadratic_form_unit_matrix_entry(zero_bases):
    table = product_table(POINT_TYPE, 2)
    avg = averaging_map(POINT_TYPE, 3)
    dim = len(table.small_basis)
    for a in range(dim):
        m = [[F(0)] * dim for _ in range(dim)]
        m[a][a] = F(1)
        vec = quadratic_form_image(table, avg, m, zero_bases[3])
        expected = [F(0)] * len(zero_bases[3])
        for j, (k, q) in avg.rows.items():
            expected[k] += q * table.entry(j, a, a)
        assert list(vec.coeffs) == expected


def test_quadratic_form_validation(zero_bases):
    table = product_table(POINT_TYPE, 2)
    avg = averaging_map(POINT_TYPE, 3)
    with pytest.raises(ValueError):
        quadratic_form_image(table, avg, [[F(1)]], zero_bases[3])
    bad = [[F(0), F(1)], [F(2), F(0)]]
    with pytest.raises(ValueError):
        quadratic_form_image(table, avg, bad, zero_bases[3])


def test_objective_vector_three_vertices(zero_bases):
    vec = objective_vector(3, zero_bases[3])
    assert vec.coeffs == (F(1), F(0), F(0), F(1))


def test_objective_vector_complete_graph(zero_bases):
    basis = zero_bases[5]
    vec = objective_vector(4, basis)
    k5 = graph_flag(complete_graph(5))
    assert vec[basis.index_of(k5)] == 1


def test_objective_vector_cycle5_is_zero(zero_bases):
    basis = zero_bases[5]
    c5 = graph_flag(Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]))
    vec = objective_vector(4, basis)
    assert vec[basis.index_of(c5)] == 0


def test_objective_vector_size_error(zero_bases):
    with pytest.raises(ValueError):
        objective_vector(4, zero_bases[3])


def test_all_densities_reduced():
    for f1, f, _ in SINGLE_DENSITIES:
        d = density(f1, f)
        assert d.denominator > 0
        from math import gcd

        assert gcd(d.numerator, d.denominator) == 1
