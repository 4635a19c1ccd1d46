import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reflexive_oracle import (
    interior_and_boundary_counts,
    search_reflexive_polygons,
)

from mixedfrob import polytope as pt
from mixedfrob.polytope import LatticePolytope

P2 = LatticePolytope.from_vertices([(1, 0), (0, 1), (-1, -1)])
SQUARE = LatticePolytope.from_vertices([(1, 1), (1, -1), (-1, 1), (-1, -1)])


def test_lattice_points_degree_zero():
    assert pt.lattice_points(P2, 0).points == ((0, 0),)


def test_lattice_points_degree_one():
    assert set(pt.lattice_points(P2, 1).points) == {(1, 0), (0, 1), (-1, -1), (0, 0)}


def test_lattice_points_degree_two_count():
    assert len(pt.lattice_points(P2, 2).points) == 10


def test_lattice_points_match_oracle_up_to_degree_four():
    hull = [(1, 0), (0, 1), (-1, -1)]
    for k in range(5):
        n, pts = interior_and_boundary_counts(hull, max(k, 1))
        if k == 0:
            assert len(pt.lattice_points(P2, 0).points) == 1
        else:
            assert set(pt.lattice_points(P2, k).points) == set(pts)


def test_is_reflexive_examples():
    assert pt.is_reflexive(P2)
    assert pt.is_reflexive(SQUARE)
    double = LatticePolytope.from_vertices([(2, 0), (0, 2), (-2, -2)])
    assert not pt.is_reflexive(double)


def test_dual_of_p2():
    # dual with the convention {u : <m, u> >= -1 for all m in Delta}
    d = pt.dual_polytope(P2)
    assert set(d.vertices) == {(-1, -1), (2, -1), (-1, 2)}
    assert pt.is_reflexive(d)


def test_duality_involution():
    assert pt.dual_polytope(pt.dual_polytope(P2)) == P2
    assert pt.dual_polytope(pt.dual_polytope(SQUARE)) == SQUARE


def test_semigroup_product_closure():
    s1 = pt.lattice_points(P2, 1).points
    s2 = set(pt.lattice_points(P2, 2).points)
    for p in s1:
        for q in s1:
            assert tuple(a + b for a, b in zip(p, q)) in s2


def test_weight_index_sets_examples():
    # interior point (1, (0,0)) lies on no proper face
    assert pt.min_face_codim(P2, (1, 0, 0)) == 0
    for ell in range(1, 4):
        assert pt.in_weight_index_set(P2, ell, (1, 0, 0))
    # ray generator (1, (1,0)) spans a 1-dim face of the cone: codim 2
    assert pt.min_face_codim(P2, (1, 1, 0)) == 2
    assert not pt.in_weight_index_set(P2, 2, (1, 1, 0))
    assert pt.in_weight_index_set(P2, 3, (1, 1, 0))
    # apex
    assert pt.min_face_codim(P2, (0, 0, 0)) == 3
    for ell in range(0, 4):
        assert not pt.in_weight_index_set(P2, ell, (0, 0, 0))


def test_weight_index_sets_monotone():
    pts = [(1,) + p for p in pt.lattice_points(P2, 1).points]
    pts += [(2,) + p for p in pt.lattice_points(P2, 2).points]
    for point in pts:
        codim = pt.min_face_codim(P2, point)
        for ell in range(0, 4):
            assert pt.in_weight_index_set(P2, ell, point) == (codim < ell)


def test_edge_point_has_codim_one():
    # (1, 0) to (0, 1) edge of the square contains no lattice points, use
    # the square's edge midpoint (1, 0) on facet x = 1
    assert pt.min_face_codim(SQUARE, (1, 1, 0)) == 1


def test_degree_one_generates_reflexive():
    assert pt.degree_one_generates(P2, 5) == (True, None)
    assert pt.degree_one_generates(SQUARE, 5) == (True, None)


def test_degree_one_generates_brute_force_on_non_reflexive():
    # shifted simplex with 0 interior but a non-unimodular structure still
    # answers by brute force (here: generation happens to hold)
    tri = LatticePolytope.from_vertices([(1, 0), (-1, 2), (-1, -2)])
    ok, fail_deg = pt.degree_one_generates(tri, 4)
    assert isinstance(ok, bool)
    if not ok:
        assert fail_deg is not None and fail_deg >= 2


def test_fano_polygon_check():
    # normal fan of the 4-point triangle is the P^2/Z_3 fan: not smooth
    assert not pt.is_fano_polygon(P2)
    # its dual (anticanonical triangle of P^2) and the square are smooth
    assert pt.is_fano_polygon(pt.dual_polytope(P2))
    assert pt.is_fano_polygon(SQUARE)
    with pytest.raises(pt.UnsupportedDimension):
        pt.is_fano_polygon(LatticePolytope.from_vertices(
            [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)]))


def test_not_full_dimensional_rejected():
    with pytest.raises(pt.NotFullDimensional):
        LatticePolytope.from_vertices([(0, 0), (1, 0), (2, 0)])


def test_polytope_io_round_trip():
    text = pt.write_polytope(P2)
    assert pt.read_polytope(text) == P2


def test_sixteen_reflexive_polygons_full_suite():
    """Acceptance-style: every class found by the independent search passes
    reflexivity, the duality involution, and degree-one generation."""
    classes = search_reflexive_polygons()
    assert len(classes) == 16
    for hull in classes:
        delta = LatticePolytope.from_vertices(hull)
        assert pt.is_reflexive(delta)
        dual = pt.dual_polytope(delta)
        assert pt.is_reflexive(dual)
        assert pt.dual_polytope(dual) == delta
        assert pt.degree_one_generates(delta, 5) == (True, None)
        # library point counts against the oracle box scan
        for k in (1, 2):
            n, pts = interior_and_boundary_counts(hull, k)
            assert set(pt.lattice_points(delta, k).points) == set(pts)
