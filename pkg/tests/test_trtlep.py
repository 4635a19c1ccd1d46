from fractions import Fraction as F

import pytest

from mixedfrob import trtlep
from mixedfrob.jets import JetMatrix, JetRing
from mixedfrob.linalg import Flag, QSubspace
from mixedfrob.trtlep import (FrobTypeStructure, GradedPairingSet,
                              MixedTrTLEPData, lambda_connection_curvature,
                              check_frob_type, check_mixed_trtlep,
                              section_conditions, tate_twist,
                              trtlep_from_single_weight)


def rank1_structure(w, ring=None):
    ring = ring or JetRing(0, 3)
    return FrobTypeStructure(ring, (), JetMatrix.zeros(ring, 1),
                             JetMatrix.from_rational(ring, [[w]]))


def test_check_frob_type_zero_structure():
    ring = JetRing(2, 3)
    f = FrobTypeStructure(ring, (JetMatrix.zeros(ring, 2), JetMatrix.zeros(ring, 2)),
                          JetMatrix.zeros(ring, 2), JetMatrix.zeros(ring, 2))
    assert check_frob_type(f).ok


def test_check_frob_type_linear_u_example():
    # m=1, C1 = const M, V = 0, U = -t M passes; U = +t M fails (B)
    ring = JetRing(1, 3)
    t = ring.var(0)
    m = [[F(0), F(1)], [F(0), F(0)]]
    c1 = JetMatrix.from_rational(ring, m)
    v = JetMatrix.zeros(ring, 2)
    u_good = c1.map(lambda a: a * (-t))
    f = FrobTypeStructure(ring, (c1,), u_good, v)
    assert check_frob_type(f).ok
    u_bad = c1.map(lambda a: a * t)
    f_bad = FrobTypeStructure(ring, (c1,), u_bad, v)
    cert = check_frob_type(f_bad)
    assert not cert.ok
    assert any("B:" in c.name for c in cert.failures())


def test_curvature_cross_check_matches_checker():
    ring = JetRing(1, 3)
    t = ring.var(0)
    m = [[F(0), F(1)], [F(0), F(0)]]
    c1 = JetMatrix.from_rational(ring, m)
    v = JetMatrix.zeros(ring, 2)
    f = FrobTypeStructure(ring, (c1,), c1.map(lambda a: a * (-t)), v)
    assert check_frob_type(f).ok
    assert lambda_connection_curvature(f) == {}
    f_bad = FrobTypeStructure(ring, (c1,), c1.map(lambda a: a * t), v)
    assert not check_frob_type(f_bad).ok
    assert lambda_connection_curvature(f_bad) != {}


def rank1_mixed(w, weight):
    f = rank1_structure(w)
    return trtlep_from_single_weight(f, [[1]], weight)


def test_mixed_rank1_weight_identity():
    # V = (w) on the weight-2w piece passes; V = (w+1) fails
    t = rank1_mixed(2, 4)
    assert check_mixed_trtlep(t).ok
    t_bad = rank1_mixed(3, 4)
    cert = check_mixed_trtlep(t_bad)
    assert not cert.ok
    assert any("V-weight" in c.name for c in cert.failures())


def test_mixed_flag_preservation_failure():
    # U maps the weight-0 line out of itself
    ring = JetRing(0, 2)
    u = JetMatrix.from_rational(ring, [[0, 0], [1, 0]])
    v = JetMatrix.from_rational(ring, [[0, 0], [0, 1]])
    f = FrobTypeStructure(ring, (), u, v)
    flag = Flag.from_steps(2, [(0, QSubspace.from_rows(2, [[1, 0]])),
                               (2, QSubspace.full(2))])
    pair = GradedPairingSet.build({0: [[1]], 2: [[1]]})
    cert = check_mixed_trtlep(MixedTrTLEPData(f, flag, pair))
    assert not cert.ok
    assert any("W-preserved-by-U" in c.name for c in cert.failures())


# --- Tate twist -------------------------------------------------------------

def test_tate_twist_identity():
    t = rank1_mixed(2, 4)
    tw = tate_twist(t, 0)
    assert tw.structure.v == t.structure.v
    assert tw.weights.steps == t.weights.steps


def test_tate_twist_minus_half():
    # V = (2), weight 4; ell = -1/2 gives V = (3/2) and weight index 3
    t = rank1_mixed(2, 4)
    tw = tate_twist(t, F(-1, 2))
    assert tw.structure.v.at0() == [[F(3, 2)]]
    assert tw.weights.graded_dims() == {3: 1}
    assert tw.pairings.weights == [3]
    assert check_mixed_trtlep(tw).ok


def test_tate_twist_involution():
    t = rank1_mixed(2, 4)
    back = tate_twist(tate_twist(t, F(1, 2)), F(-1, 2))
    assert back.structure.v == t.structure.v
    assert back.weights.steps == t.weights.steps
    assert back.pairings.matrices == t.pairings.matrices


def test_tate_twist_shifts_eigenvalue_condition():
    t = rank1_mixed(2, 4)
    c0 = section_conditions(t.structure, [1], 4)
    assert c0.eigenvalue
    tw = tate_twist(t, F(1, 2))
    c1 = section_conditions(tw.structure, [1], 5)
    assert c1.eigenvalue  # EC_4 before <-> EC_{4+2*(1/2)} after


# --- section conditions ------------------------------------------------------

def test_section_conditions_rank1():
    t = rank1_mixed(2, 4)
    cond = section_conditions(t.structure, [1], 4)
    assert cond.generation and cond.eigenvalue
    assert cond.injectivity            # vacuous with no directions
    assert not cond.identity           # 0 directions != rank 1


def test_section_conditions_2x2_needs_u():
    ring = JetRing(1, 2)
    c1 = JetMatrix.zeros(ring, 2)
    u = JetMatrix.from_rational(ring, [[0, 1], [1, 0]])
    v = JetMatrix.zeros(ring, 2)
    f = FrobTypeStructure(ring, (c1,), u, v)
    cond = section_conditions(f, [1, 0], 0)
    assert cond.generation            # U-orbit spans
    assert not cond.injectivity       # C_1 zeta = 0
    f2 = FrobTypeStructure(ring, (c1,), JetMatrix.zeros(ring, 2), v)
    cond2 = section_conditions(f2, [1, 0], 0)
    assert not cond2.generation


def test_section_conditions_zero_vector():
    t = rank1_mixed(2, 4)
    with pytest.raises(trtlep.ZeroVector):
        section_conditions(t.structure, [0], 4)
