import numpy as np
import pytest

from druryarveson.drury import (
    ContractiveTuple,
    PatternError,
    defect_operator,
    direct_vanishing_test,
    isometry_residual,
    make_random_commuting_tuple,
    make_scaled_backshift_tuple,
    psi_isometry_check,
    psi_slack,
    theta_sums,
    verify_inequality,
)
from druryarveson.multiindex import DegreeBox
from druryarveson.opmodel import (
    OperatorTuple,
    Polynomial,
    commutator_defect,
    gramian,
    op_norm,
    poly_apply,
    power_vanishing,
    row_defect,
)
from druryarveson.staircase import ExplicitSet, StaircaseSet


def custom_tuple(mats, r):
    return ContractiveTuple(OperatorTuple(tuple(np.asarray(m, dtype=complex) for m in mats)), r)


def test_scaled_backshift_point_is_zero():
    T = make_scaled_backshift_tuple(StaircaseSet.point(2), DegreeBox(2, 3), 0.7)
    assert T.size == 1 and not np.any(T.A.mats[0])
    assert np.allclose(defect_operator(T).D, np.eye(1))


def test_scaled_backshift_row_defect():
    T = make_scaled_backshift_tuple(StaircaseSet.full(2), DegreeBox(2, 2), 0.9)
    assert row_defect(T.A) == pytest.approx(0.81, abs=1e-14)


def test_scaled_backshift_pattern():
    X = StaircaseSet(2, ((2, 0), (0, 2)))
    box = DegreeBox(2, 4)
    T = make_scaled_backshift_tuple(X, box, 0.5)
    assert commutator_defect(T.A) == 0
    assert power_vanishing(T.A, box) == {n for n in box.indices() if not X.member(n)}


def test_scaled_backshift_rejects_non_commuting_sets():
    S = ExplicitSet(2, frozenset({(0, 0), (1, 0), (1, 1)}))
    with pytest.raises(ValueError):
        make_scaled_backshift_tuple(S, DegreeBox(2, 2), 0.5)


def test_random_tuple_scalar_case():
    T = make_random_commuting_tuple(3, 1, 1, 0.6)
    assert abs(T.A.mats[0][0, 0]) == pytest.approx(0.6, abs=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_random_tuple_is_commuting_and_scaled(seed):
    T = make_random_commuting_tuple(seed, 5, 3, 0.8)
    assert commutator_defect(T.A) <= 1e-12
    assert row_defect(T.A) == pytest.approx(0.64, abs=1e-10)


def test_random_tuple_is_deterministic():
    a = make_random_commuting_tuple(11, 4, 2, 0.5)
    b = make_random_commuting_tuple(11, 4, 2, 0.5)
    assert all(np.array_equal(x, y) for x, y in zip(a.A.mats, b.A.mats))


def test_defect_operator_examples():
    zero = custom_tuple([np.zeros((2, 2)), np.zeros((2, 2))], 0.5)
    assert np.allclose(defect_operator(zero).D, np.eye(2))
    r = 0.6
    T = custom_tuple([[[0, r], [0, 0]]], r)
    assert np.allclose(defect_operator(T).D, np.diag([1, np.sqrt(1 - r**2)]), atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_defect_square_identity(seed):
    T = make_random_commuting_tuple(seed, 4, 2, 0.9)
    D = defect_operator(T).D
    assert np.allclose(D, D.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(D).min() >= -1e-12
    assert np.allclose(D @ D + gramian(T.A), np.eye(4), atol=1e-10)


def test_defect_operator_rejects_non_contractions():
    with pytest.raises(ValueError):
        defect_operator(custom_tuple([[[2.0]]], 0.5))


def test_isometry_residual_examples():
    zero = custom_tuple([np.zeros((2, 2))] * 2, 0.5)
    assert isometry_residual(zero, np.array([1.0, 2.0]), 0) == pytest.approx(0, abs=1e-15)
    r = 0.6
    T = custom_tuple([[[0, r], [0, 0]]], r)
    inside, outside, tail = theta_sums(T, np.array([0, 1.0]), 0)
    assert inside == pytest.approx(1 - r**2) and tail == pytest.approx(r**2)
    assert outside == 0


@pytest.mark.parametrize("seed", range(6))
def test_isometry_residual_random(seed):
    T = make_random_commuting_tuple(seed, 4, 2 + seed % 2, 0.9)
    h = np.random.default_rng(seed).standard_normal(4) + 0j
    assert isometry_residual(T, h, 8) <= 1e-9 * np.vdot(h, h).real


def test_psi_check_cases():
    X = StaircaseSet(2, ((2, 1), (0, 3)))
    T = make_scaled_backshift_tuple(X, DegreeBox(2, 6), 0.7)
    assert psi_isometry_check(T, X, 8)
    assert psi_isometry_check(T, StaircaseSet.full(2), 8)
    assert not psi_isometry_check(T, StaircaseSet.point(2), 8)
    R = make_random_commuting_tuple(1, 3, 2, 0.7)
    assert psi_isometry_check(R, StaircaseSet.full(2), 8)
    assert not psi_isometry_check(R, StaircaseSet.slab(2, 0, 2), 8)


def test_psi_sum_within_stated_slack():
    X = StaircaseSet(2, ((3, 0), (1, 2)))
    T = make_scaled_backshift_tuple(X, DegreeBox(2, 12), 0.8)
    for i in range(T.size):
        h = np.zeros(T.size, dtype=complex)
        h[i] = 1
        inside, outside, _ = theta_sums(T, h, 5, X)
        assert outside == 0
        assert abs(inside - 1) <= 1e-9 + psi_slack(0.8, 5)


def test_mass_split_adds_up():
    T = make_random_commuting_tuple(4, 3, 2, 0.8)
    h = np.array([1.0, -2.0, 0.5j])
    inside, outside, tail = theta_sums(T, h, 7, StaircaseSet.slab(2, 1, 2))
    assert outside > 0
    assert inside + outside + tail == pytest.approx(np.vdot(h, h).real, rel=1e-12)


def test_psi_check_agrees_with_direct_test():
    X = StaircaseSet(2, ((2, 2),))
    T = make_scaled_backshift_tuple(X, DegreeBox(2, 6), 0.5)
    for Y in (X, StaircaseSet(2, ((2, 1),)), StaircaseSet(2, ((3, 2), (1, 4))), StaircaseSet.full(2)):
        assert psi_isometry_check(T, Y, 8) == direct_vanishing_test(T, Y, 8)


def test_verify_inequality_trivial_poly():
    T = make_random_commuting_tuple(0, 3, 2, 0.5)
    rep = verify_inequality(Polynomial.constant(2), T, StaircaseSet.full(2), [2, 3])
    assert rep.norm_QA == pytest.approx(1) and rep.qbx[-1] == pytest.approx(1)
    assert rep.passed and rep.converged


def test_verify_inequality_self_model():
    X = StaircaseSet(2, ((3, 0), (1, 1), (0, 3)))
    Q = Polynomial(2, {(2, 0): 1.0, (1, 1): 0.5, (0, 2): 2.0})
    box = DegreeBox(2, 6)
    norms = []
    for r in (0.5, 0.9, 0.99):
        rep = verify_inequality(Q, make_scaled_backshift_tuple(X, box, r), X, [4, 6])
        assert rep.passed
        assert rep.norm_QA == pytest.approx(r**2 * rep.qbx[-1], rel=1e-12)
        norms.append(rep.norm_QA)
    assert norms == sorted(norms)


def test_r_monotonicity_nonnegative_coefficients():
    X = StaircaseSet(3, ((2, 0, 0), (0, 1, 1)))
    Q = Polynomial(3, {(0, 0, 0): 1.0, (1, 0, 0): 0.5, (0, 1, 1): 2.0, (0, 0, 2): 1.5})
    box = DegreeBox(3, 5)
    vals = [op_norm(poly_apply(Q, make_scaled_backshift_tuple(X, box, r).A))
            for r in (0.25, 0.5, 0.75, 0.99)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_verify_inequality_pattern_precondition():
    T = make_random_commuting_tuple(0, 3, 2, 0.5)
    with pytest.raises(PatternError):
        verify_inequality(Polynomial.constant(2), T, StaircaseSet.point(2), [2])
    S = make_scaled_backshift_tuple(StaircaseSet(2, ((2, 0), (0, 2))), DegreeBox(2, 4), 0.5)
    with pytest.raises(PatternError):
        verify_inequality(Polynomial.constant(2), S, StaircaseSet(2, ((1, 0),)), [2])
    # a larger X is allowed
    assert verify_inequality(Polynomial.monomial((1, 1)), S, StaircaseSet(2, ((3, 0),)), [4]).passed
