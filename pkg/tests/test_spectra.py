import numpy as np
import pytest

from freeconvex.algebra import (HermitianTuple, LinearPencil, ball_pencil,
                                direct_sum, evaluate_pencil, lambda_min,
                                monic_tuple, pencil_from_tuple)
from freeconvex.corpus import (ex_fails, interval_pencil, interval_tuple,
                               scalar_tuple, tv_lift, tv_monic_lift,
                               tv_dual_boundary, tv_screen_value)
from freeconvex.rand import rng, rand_hermitian, rand_tuple, rand_unitary
from freeconvex.sdp import SolveStatus
from freeconvex.spectra import (Spectrahedrop, dominates, drop_level1_bounded,
                                drop_membership, drop_polar_membership,
                                has_zero_interior, hull_of_union, is_bounded,
                                monicize, polar_dual_lift, polar_membership,
                                spectrahedron_membership)

LA, LB = ex_fails()
TV = Spectrahedrop(tv_lift())
TVM = Spectrahedrop(tv_monic_lift())
INTERVAL = interval_tuple(-1.0, 1.0)


def pt(*vals):
    return scalar_tuple(*vals)


# -- membership -------------------------------------------------------------


def test_membership_examples():
    assert bool(spectrahedron_membership(LB, pt(0.0)))
    res = spectrahedron_membership(LB, pt(-1.0))
    assert not res and abs(res.lam_min + 1.0) < 1e-12
    assert bool(spectrahedron_membership(LA, pt(-1.0)))   # boundary


def test_membership_rejects_lifted_pencil():
    with pytest.raises(ValueError):
        spectrahedron_membership(tv_lift(), pt(0.0, 0.0))


# -- boundedness ------------------------------------------------------------


def test_halfline_unbounded():
    assert not is_bounded(LB)


def test_interval_bounded():
    assert is_bounded(pencil_from_tuple(INTERVAL))


def test_tv_joint_spectrahedron_bounded():
    assert is_bounded(tv_lift().as_x_pencil())
    assert drop_level1_bounded(TV)
    assert drop_level1_bounded(TVM)


def test_drop_with_unbounded_projection():
    # lift {(x, y): [[1, x],[x, y]] >= 0} projects onto all of R
    a0 = np.diag([1.0, 0.0])
    x = np.zeros((2, 2))
    x[0, 1] = x[1, 0] = 1.0
    y = np.diag([0.0, 1.0])
    drop = Spectrahedrop(LinearPencil(a0, [x], [y]))
    assert not drop_level1_bounded(drop)


# -- domination -------------------------------------------------------------


def test_halfline_domination_contraction():
    res = dominates(LA, LB)
    assert bool(res) and not res.isometry
    vv = res.certificate.V.conj().T @ res.certificate.V
    assert np.abs(vv - 0.5).max() <= 1e-6
    assert res.certificate.reconstruction_residual(*[monic_tuple(p)[0]
                                                     for p in (LA, LB)]) <= 1e-6


def test_halfline_domination_isometry_fails():
    assert not bool(dominates(LA, LB, isometry=True))


def test_domination_reflexive_and_transitive():
    lc = LinearPencil(np.eye(1), [4.0 * np.eye(1)])
    assert bool(dominates(LA, LA))
    assert bool(dominates(LB, LB))
    assert bool(dominates(LA, LB)) and bool(dominates(LB, lc))
    assert bool(dominates(LA, lc))
    # and the reverse inclusions fail
    assert not bool(dominates(LB, LA))


# -- polar duals ------------------------------------------------------------


def test_polar_interval_oracle():
    # dual of the operator interval is the operator ball
    gen = rng(3)
    assert bool(polar_membership(INTERVAL, pt(0.0)))
    assert bool(polar_membership(INTERVAL, pt(0.5)))
    assert not bool(polar_membership(INTERVAL, pt(1.5)))
    for _ in range(8):
        x = HermitianTuple([rand_hermitian(gen, 2, scale=0.8)])
        member = bool(polar_membership(INTERVAL, x))
        assert member == (np.linalg.norm(x[0], 2) <= 1 + 1e-9)


def test_polar_halfline_monic_forms():
    assert bool(polar_membership(HermitianTuple([np.array([[-2.0]])]),
                                 pt(-1.0)))


def test_polar_certificate_representation():
    res = polar_membership(INTERVAL, pt(0.5), bounded=True)
    v = res.certificate.V
    # X = V*(I (x) Omega)V with V an isometry in the bounded case
    assert np.abs(v.conj().T @ v - np.eye(1)).max() <= 1e-6


def test_norm_ball_polar_sandwich():
    g, eps = 2, 1.0
    ball, _ = monic_tuple(ball_pencil(g, eps))
    gen = rng(8)
    for _ in range(6):
        x = rand_tuple(gen, g, 2)
        x = x.scale((1.0 / (g * eps)) / max(x.norm(), 1e-9) * 0.98)
        assert bool(polar_membership(ball, x, bounded=True))
    for _ in range(6):
        x = rand_tuple(gen, g, 2)
        x = x.scale((np.sqrt(g) / eps + 1e-3) / max(x.norm(), 1e-9) * 1.05)
        assert not bool(polar_membership(ball, x, bounded=True))


def test_bipolar_consistency_samples():
    gen = rng(13)
    members, duals = [], []
    for _ in range(8):
        h = rand_hermitian(gen, 2)
        x = HermitianTuple([h / np.linalg.norm(h, 2) * gen.uniform(0.1, 0.99)])
        assert bool(spectrahedron_membership(pencil_from_tuple(INTERVAL), x))
        members.append(x)
        h = rand_hermitian(gen, 2)
        a = HermitianTuple([h / np.linalg.norm(h, 2) * gen.uniform(0.1, 0.99)])
        assert bool(polar_membership(INTERVAL, a))
        duals.append(a)
    for x in members:
        for a in duals:
            val = lambda_min(evaluate_pencil(pencil_from_tuple(a), x))
            assert val >= -1e-8


# -- drops ------------------------------------------------------------------


def test_tv_drop_membership_examples():
    assert bool(drop_membership(TV, pt(0.0, 0.0)))
    assert not bool(drop_membership(TV, pt(1.0, 1.0)))
    res = drop_membership(TV, pt(0.9, 0.5))
    assert bool(res)
    y = float(res.y_witness[0][0, 0].real)
    assert y >= 0.25 - 1e-6 and 0.81 + y * y <= 1 + 1e-6


def test_drop_membership_matrix_convexity_samples():
    gen = rng(21)
    pts = [pt(0.5, 0.5), pt(-0.7, 0.3)]
    assert all(bool(drop_membership(TV, p)) for p in pts)
    both = direct_sum(pts[0], pts[1])
    assert bool(drop_membership(TV, both))
    # isometry compression of a member stays a member
    v = rand_unitary(gen, 2)[:, :1]
    compressed = both.conjugate(v)
    assert bool(drop_membership(TV, compressed))


def test_projection_duality_on_tv():
    # A in (proj K) polar iff (A, 0) in K polar
    lift = TVM.lift
    joint, _ = monic_tuple(lift.as_x_pencil())
    gen = rng(5)
    for a_vals in [(0.5, 0.5), (1.2, 0.0), (0.0, 0.9), (-0.8, -0.8)]:
        a = pt(*a_vals)
        left = drop_polar_membership(TVM, a, bounded=True)
        padded = HermitianTuple(list(a) + [np.zeros((1, 1))])
        right = polar_membership(joint, padded, bounded=True)
        assert bool(left) == bool(right), a_vals


def test_drop_polar_requires_monic():
    with pytest.raises(ValueError):
        drop_polar_membership(TV, pt(0.0, 0.0))


def test_tv_dual_examples():
    assert bool(drop_polar_membership(TVM, pt(0.5, 0.5), bounded=True))
    assert not bool(drop_polar_membership(TVM, pt(1.2, 0.0), bounded=True))
    assert bool(drop_polar_membership(TVM, pt(0.0, 0.0), bounded=True))


def test_tv_dual_against_boundary_octic_spot():
    gen = rng(2)
    for _ in range(10):
        c = gen.uniform(-1.4, 1.4, size=2)
        q = tv_dual_boundary(*c)
        if abs(q) < 1e-2:
            continue
        got = bool(drop_polar_membership(TVM, pt(*c), bounded=True))
        assert got == (q > 0), (c, q)


# -- monicize ----------------------------------------------------------------


def test_monicize_unchanged_when_monic():
    out = monicize(LA, [0.0])
    assert out.pencil.monic
    assert np.abs(out.pencil.x_coeffs[0] - LA.x_coeffs[0]).max() < 1e-12


def test_monicize_diag_scaling():
    pencil = LinearPencil(2.0 * np.eye(2), [np.diag([-1.0, 1.0])])
    out = monicize(pencil, [0.0])
    assert out.pencil.monic
    assert np.abs(out.pencil.x_coeffs[0] - np.diag([-0.5, 0.5])).max() < 1e-12


def test_monicize_rejects_boundary_point():
    with pytest.raises(ValueError):
        monicize(tv_lift(), [0.0, 0.0, 0.0])   # value I_3 (+) diag(1, 0)


def test_monicize_preserves_tv_projection():
    gen = rng(31)
    for _ in range(12):
        x = pt(*gen.uniform(-1.2, 1.2, size=2))
        a = drop_membership(TV, x).status
        b = drop_membership(TVM, x).status
        assert a == b


# -- explicit dual lifts ------------------------------------------------------


def test_polar_dual_lift_interval_cross_oracle():
    dual = polar_dual_lift(INTERVAL)
    gen = rng(7)
    for _ in range(10):
        x = pt(float(gen.uniform(-1.6, 1.6)))
        via = bool(drop_membership(dual, x))
        direct = bool(polar_membership(INTERVAL, x, bounded=True))
        assert via == direct
    for _ in range(6):
        x = HermitianTuple([rand_hermitian(gen, 2, scale=0.9)])
        assert bool(drop_membership(dual, x)) == \
            bool(polar_membership(INTERVAL, x, bounded=True))


def test_polar_dual_lift_padded_unbounded_case():
    # D = {X <= I} is unbounded; its dual is built from the padded tuple
    omega = HermitianTuple([np.array([[1.0]])])
    padded = HermitianTuple([np.diag([1.0, 0.0])])
    dual = polar_dual_lift(padded)
    gen = rng(9)
    for _ in range(10):
        x = pt(float(gen.uniform(-1.5, 1.5)))
        via = bool(drop_membership(dual, x))
        direct = bool(polar_membership(omega, x, bounded=False))
        assert via == direct
        # the dual of {X <= 1} is the interval [0, 1]
        assert via == (0.0 - 1e-9 <= float(x[0][0, 0].real) <= 1.0 + 1e-9)


def test_polar_dual_lift_contains_its_tuple():
    dual = polar_dual_lift(INTERVAL)
    assert bool(drop_membership(dual, INTERVAL))


def test_tv_dual_lift_cross_oracle():
    omega, gamma = monic_tuple(TVM.lift)
    dual = polar_dual_lift(omega, gamma)
    gen = rng(11)
    for _ in range(8):
        c = pt(*gen.uniform(-1.4, 1.4, size=2))
        via = bool(drop_membership(dual, c))
        direct = bool(drop_polar_membership(TVM, c, bounded=True))
        assert via == direct, c


# -- hulls --------------------------------------------------------------------


def test_zero_interior_probe():
    assert has_zero_interior(TV)
    assert has_zero_interior(Spectrahedrop(interval_pencil(-1.0, 0.5)))


def test_hull_of_single_drop_matches_input():
    d1 = Spectrahedrop(interval_pencil(-1.0, 0.5))
    hull = hull_of_union([d1])
    gen = rng(15)
    for _ in range(8):
        x = pt(float(gen.uniform(-1.3, 1.3)))
        assert bool(drop_membership(hull, x)) == bool(drop_membership(d1, x))


def test_hull_of_interval_union():
    d1 = Spectrahedrop(interval_pencil(-1.0, 0.5))
    d2 = Spectrahedrop(interval_pencil(-0.5, 1.0))
    hull = hull_of_union([d1, d2])
    for v, expect in [(0.9, True), (-0.9, True), (1.1, False), (-1.1, False),
                      (0.0, True)]:
        assert bool(drop_membership(hull, pt(v))) == expect, v


def test_hull_contains_tv_and_square():
    square = Spectrahedrop(pencil_from_tuple(HermitianTuple(
        [np.diag([2.0, -2.0, 0.0, 0.0]), np.diag([0.0, 0.0, 2.0, -2.0])])))
    hull = hull_of_union([TVM, square])
    for p in [pt(0.45, 0.45), pt(0.0, 0.9), pt(0.9, 0.0), pt(-0.3, 0.2)]:
        assert bool(drop_membership(square, p)) or bool(drop_membership(TVM, p))
        assert bool(drop_membership(hull, p))
    assert not bool(drop_membership(hull, pt(1.3, 1.3)))
