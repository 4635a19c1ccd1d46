from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from mixedfrob import jets
from mixedfrob.jets import Jet, JetMatrix, JetRing, NoSolution, NotFlat


R2 = JetRing(2, 4)          # two base variables, order 4
RY = JetRing(1, 3, 1, 2)    # t to order 3, one y to order 2


def test_ring_constructors():
    t0 = R2.var(0)
    assert t0.coeff((1, 0)) == 1
    assert (t0 * t0 * t0 * t0 * t0).is_zero()  # degree 5 beyond D=4
    assert R2.const(F(3, 2)).at0() == F(3, 2)


def test_mixed_truncation():
    t, y = RY.var(0), RY.var(1)
    p = (1 + t + y) ** 5
    assert p.coeff((3, 2)) != 0
    assert p.coeff((4, 0)) == 0  # t-degree capped at 3
    assert p.coeff((0, 3)) == 0  # y-degree capped at 2


def test_diff_and_integrate():
    t, y = RY.var(0), RY.var(1)
    p = t * t * y
    assert p.diff(0) == 2 * t * y
    assert p.diff(1) == t * t
    assert (t * t).integrate(1) == p * F(1, 1) - (p - t * t * y)  # t^2 dy -> t^2 y
    assert (y.integrate(1)) == y * y * F(1, 2)


jet_strategy = st.builds(
    lambda terms: Jet.build(R2, [((e1, e2), c) for (e1, e2, c) in terms]),
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3),
                       st.fractions(min_value=-3, max_value=3, max_denominator=4)),
             max_size=5),
)


@settings(max_examples=60, deadline=None)
@given(jet_strategy, jet_strategy, jet_strategy)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40, deadline=None)
@given(jet_strategy, jet_strategy)
def test_leibniz_within_truncation(a, b):
    # derivative drops the top order, so compare after truncating one below
    lhs = (a * b).diff(0).truncate(R2.base_order - 1)
    rhs = (a.diff(0) * b + a * b.diff(0)).truncate(R2.base_order - 1)
    assert lhs == rhs


def test_subs_and_invert_map():
    r = JetRing(2, 4)
    x, y = r.var(0), r.var(1)
    f = [x + x * y, y + y * y]
    t = jets.invert_map(f)
    back = [fi.subs(t) for fi in f]
    assert back[0] == x and back[1] == y


def test_jetmatrix_inverse():
    r = JetRing(1, 4)
    t = r.var(0)
    m = JetMatrix(r, [[r.one() + t, t], [r.zero(), r.one()]])
    inv = m.inv()
    assert (m @ inv) == JetMatrix.identity(r, 2)


# --- solve_linear (spec examples) -----------------------------------------

def test_solve_identity_case():
    r = JetRing(1, 3)
    a = JetMatrix.identity(r, 2)
    b = [r.one(), r.var(0)]
    x, ker = jets.solve_linear(a, b)
    assert x == b
    assert ker == []


def test_solve_rank_deficient_inconsistent():
    r = JetRing(1, 3)
    a = JetMatrix.from_rational(r, [[1, 1], [0, 0]])
    with pytest.raises(NoSolution):
        jets.solve_linear(a, [r.one(), r.one()])


def test_solve_with_y_coupling():
    # A = [[1, y],[0,1]], b = (t_1, 1), N = 2 -> x = (t_1 - y, 1)
    r = JetRing(1, 3, 1, 2)
    t, y = r.var(0), r.var(1)
    a = JetMatrix(r, [[r.one(), y], [r.zero(), r.one()]])
    b = [t, r.one()]
    x, _ = jets.solve_linear(a, b)
    assert x == [t - y, r.one()]
    # substitute back, exact within truncation
    assert a.apply(x) == b


def test_solve_ring_mismatch():
    a = JetMatrix.identity(JetRing(1, 3), 1)
    with pytest.raises(jets.InconsistentTruncation):
        jets.solve_linear(a, [JetRing(2, 3).zero()])


# --- flat gauge (spec examples) --------------------------------------------

def test_flat_gauge_zero_connection():
    r = JetRing(2, 3)
    a = [JetMatrix.zeros(r, 2), JetMatrix.zeros(r, 2)]
    g = jets.flat_gauge(a)
    assert g == JetMatrix.identity(r, 2)


def test_flat_gauge_constant_matrix_is_exp():
    # m = 1, A_1 = M constant -> g = exp(-M t) truncated
    r = JetRing(1, 4)
    m = [[F(0), F(1)], [F(-1), F(0)]]
    a = JetMatrix.from_rational(r, m)
    g = jets.flat_gauge([a])
    t = r.var(0)
    expected = JetMatrix.identity(r, 2)
    term = JetMatrix.identity(r, 2)
    mneg = JetMatrix.from_rational(r, [[-x for x in row] for row in m])
    for k in range(1, 5):
        term = (term @ mneg).map(lambda u, k=k: u * t * F(1, k))
        expected = expected + term
    assert g == expected
    # transformed connection vanishes at every retained order
    res = (g.diff(0) + a @ g).truncate(3)
    assert res.is_zero()


def test_flat_gauge_rejects_nonflat():
    r = JetRing(2, 3)
    a1 = JetMatrix.from_rational(r, [[0, 1], [0, 0]])
    a2 = JetMatrix.from_rational(r, [[0, 0], [1, 0]])
    with pytest.raises(NotFlat):
        jets.flat_gauge([a1, a2])


@settings(max_examples=15, deadline=None)
@given(st.lists(st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=2),
                         min_size=4, max_size=4), min_size=2, max_size=2))
def test_flat_gauge_single_variable_always_flat(rows):
    # any single-direction connection is flat; check the gauge identity
    r = JetRing(1, 3)
    t = r.var(0)
    a = JetMatrix(r, [[r.const(rows[i][2 * j]) + r.const(rows[i][2 * j + 1]) * t
                       for j in range(2)] for i in range(2)])
    g = jets.flat_gauge([a])
    assert g.at0() == [[F(1), F(0)], [F(0), F(1)]]
    assert (g.diff(0) + a @ g).truncate(2).is_zero()
