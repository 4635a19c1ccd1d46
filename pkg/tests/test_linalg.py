from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from mixedfrob import linalg
from mixedfrob.linalg import Flag, QSubspace


def test_rref_basic():
    red, piv = linalg.rref([[2, 4], [1, 2]])
    assert red == [[F(1), F(2)]]
    assert piv == [0]


def test_kernel_example():
    # kernel([[0,1],[0,0]]) = span{(1,0)}
    ks = linalg.kernel_space([[0, 1], [0, 0]])
    assert ks.basis == ((F(1), F(0)),)


def test_image_example():
    # image([[0,1],[0,0]]) = span{(1,0)}  (column space)
    im = linalg.image_space([[0, 1], [0, 0]])
    assert im.basis == ((F(1), F(0)),)


def test_quotient_projection_section_identity():
    q = linalg.quotient_space(None, QSubspace.from_rows(2, [[1, 0]]))
    assert q.reps == ((F(0), F(1)),)
    # projection (a, b) -> b
    assert linalg.mat_vec([list(r) for r in q.projection], [F(5), F(7)]) == [F(7)]
    ps = linalg.mat_mul([list(r) for r in q.projection],
                        [list(r) for r in q.section])
    assert ps == linalg.identity(1)


def test_sum_and_intersection():
    u = QSubspace.from_rows(3, [[1, 0, 0]])
    v = QSubspace.from_rows(3, [[1, 1, 0]])
    s = linalg.sum_spaces(u, v)
    assert s.dim == 2
    w = linalg.intersect_spaces(s, QSubspace.from_rows(3, [[0, 1, 0], [0, 0, 1]]))
    assert w.basis == ((F(0), F(1), F(0)),)


def test_solve_inconsistent():
    x, ker = linalg.solve([[1, 1], [0, 0]], [1, 1])
    assert x is None


def test_solve_particular_plus_kernel():
    x, ker = linalg.solve([[1, 1]], [3])
    assert x == [F(3), F(0)]
    assert ker == [[F(1), F(-1)]]


def test_inverse_round_trip():
    a = [[F(2), F(1)], [F(1), F(1)]]
    assert linalg.mat_mul(a, linalg.inverse(a)) == linalg.identity(2)


def test_flag_validation_and_grading():
    w1 = QSubspace.from_rows(3, [[1, 0, 0]])
    w2 = QSubspace.from_rows(3, [[1, 0, 0], [0, 1, 0]])
    w3 = QSubspace.full(3)
    f = Flag.from_steps(3, [(0, w1), (2, w2), (4, w3)])
    assert f.graded_dims() == {0: 1, 2: 1, 4: 1}
    assert f.space_at(1).dim == 1
    assert f.space_at(-1).dim == 0
    assert f.weight_of([0, 1, 0]) == 2


def test_flag_rejects_non_nested():
    w1 = QSubspace.from_rows(2, [[1, 0]])
    w2 = QSubspace.from_rows(2, [[0, 1]])
    with pytest.raises(ValueError):
        Flag.from_steps(2, [(0, w1), (1, w2)])


small_frac = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small_frac, min_size=3, max_size=3), min_size=1, max_size=4))
def test_subspace_normal_form_idempotent(rows):
    s = QSubspace.from_rows(3, rows)
    again = QSubspace.from_rows(3, [list(r) for r in s.basis])
    assert s == again


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small_frac, min_size=3, max_size=3), min_size=1, max_size=3),
       st.lists(st.lists(small_frac, min_size=3, max_size=3), min_size=1, max_size=3))
def test_intersection_inside_both(rows_u, rows_v):
    u = QSubspace.from_rows(3, rows_u)
    v = QSubspace.from_rows(3, rows_v)
    w = linalg.intersect_spaces(u, v)
    assert u.contains_space(w) and v.contains_space(w)
    assert w.dim == u.dim + v.dim - linalg.sum_spaces(u, v).dim
