from fractions import Fraction

import pytest
from hypothesis import given, settings

import oracles
from conftest import closed_patterns
from idealteich.linalg import mat_vec
from idealteich.pattern import BUILTIN_NAMES, PatternError, analyze, builtin, parse_pattern
from idealteich.teich import (
    angle_relation_system,
    basis_edges,
    build_similarity_system,
    chart_for,
    dimension_formula,
    dimension_skeleton,
    kernel_basis,
    partner,
)

EXPECTED_DIM = {"example1_thurston": 0, "figure_eight": 1, "example3_genus3": 1, "whitehead": 2}


def test_partner_pairs():
    assert [partner(0, q) for q in range(3)] == [1, 2, 3]
    assert [partner(3, q) for q in range(3)] == [2, 1, 0]
    for v in range(4):
        for q in range(3):
            assert partner(partner(v, q), q) == v


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_dimension_three_ways(name):
    p = builtin(name)
    want = EXPECTED_DIM[name]
    assert dimension_formula(p) == want
    assert dimension_skeleton(p).dim == want
    assert chart_for(p).dim == want
    assert oracles.kernel_dimension(p) == want


def test_skeleton_report_figure_eight():
    rep = dimension_skeleton(builtin("figure_eight"))
    # F = 4 faces, E = 2 edges; one torus link of 12 sides and 4 vertices
    assert (rep.faces, rep.edges, rep.d0, rep.ranks, rep.dim) == (4, 2, 10, (9,), 1)


def test_kernel_contains_cusp_scalings():
    for name in BUILTIN_NAMES:
        ch = chart_for(builtin(name))
        for vec in ch.cusp_scale_vectors:
            assert not any(mat_vec(ch.system.rows, vec))
        for vec in ch.normalized_basis:
            assert not any(mat_vec(ch.system.rows, vec))
            assert all(vec[g] == 0 for g in ch.gauge_sides)


def test_formula_requires_closed():
    p = parse_pattern("tetrahedra 1\nallow_free\n")
    with pytest.raises(PatternError):
        dimension_formula(p)
    with pytest.raises(PatternError):
        dimension_skeleton(p)


def test_free_tetrahedron_chart():
    # four separate triangles of one shape: two shape parameters
    p = parse_pattern("tetrahedra 1\nallow_free\n")
    ch = kernel_basis(build_similarity_system(p))
    assert ch.nullity == 6 and ch.dim == 2


def test_single_tetrahedron_relations_rank_four():
    ars = angle_relation_system(parse_pattern("tetrahedra 1\nallow_free\n"))
    assert ars.rank == 4
    assert all(b for b in ars.boundary_edges)
    assert oracles.same_up_to_permutation(ars.matrix, oracles.single_tet_incidence())
    # each boundary triangle: three defects pi - theta sum to pi * chi(sphere)
    assert ars.rhs_pi == (2, 2, 2, 2)
    assert ars.theta_rhs_pi() == (1, 1, 1, 1)


def test_example3_relation():
    ars = angle_relation_system(builtin("example3_genus3"))
    assert ars.matrix == ((2, 2),)
    assert ars.rhs_pi == (-8,)
    be = basis_edges(builtin("example3_genus3"))
    assert be.basis == (1,)
    assert be.expressions[0] == (Fraction(8), {1: Fraction(-1)})


def test_figure_eight_relation():
    be = basis_edges(builtin("figure_eight"))
    assert len(be.basis) == 1
    const, coeffs = be.expressions[1 - be.basis[0]]
    assert const == 4 and list(coeffs.values()) == [-1]


@settings(max_examples=50)
@given(closed_patterns())
def test_dimension_agreement_random(p):
    d = dimension_formula(p)
    assert dimension_skeleton(p).dim == d
    assert chart_for(p).dim == d
    assert oracles.kernel_dimension(p) == d


@settings(max_examples=50)
@given(closed_patterns())
def test_relation_rank_is_cusp_count(p):
    ars = angle_relation_system(p)
    assert ars.rank == len(analyze(p).cusps)
    be = basis_edges(p)
    assert len(be.basis) == len(analyze(p).edges) - len(analyze(p).cusps)


@pytest.mark.parametrize(
    "name, n_vars, n_rows, rank",
    [("figure_eight", 12, 12, 10), ("whitehead", 24, 24, 20), ("example1_thurston", 12, 12, 11)],
)
def test_similarity_system_sizes(name, n_vars, n_rows, rank):
    sys_ = build_similarity_system(builtin(name))
    assert (sys_.n_vars, len(sys_.rows), sys_.rank) == (n_vars, n_rows, rank)
    assert sys_.nullity - len(analyze(builtin(name)).cusps) == EXPECTED_DIM[name]


def test_free_tetrahedron_system_size():
    sys_ = build_similarity_system(parse_pattern("tetrahedra 1\nallow_free\n"))
    assert (sys_.n_vars, len(sys_.rows), sys_.nullity) == (12, 6, 6)


def test_relation_shapes():
    f8 = angle_relation_system(builtin("figure_eight"))
    assert f8.matrix == ((2, 2),) and f8.rank == 1
    wh = angle_relation_system(builtin("whitehead"))
    assert len(wh.matrix) == 2 and len(wh.matrix[0]) == 4 and wh.rank == 2
    assert len(basis_edges(builtin("whitehead")).basis) == 2
    ex1 = basis_edges(builtin("example1_thurston"))
    # one edge of valence 12 on a genus-2 link: theta forced to 4pi
    assert ex1.basis == () and ex1.expressions[0] == (Fraction(4), {})
