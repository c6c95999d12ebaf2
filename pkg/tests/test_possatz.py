import numpy as np
import pytest

from freeconvex.algebra import (HermitianTuple, LinearPencil, NCPolynomial,
                                lambda_min, pencil_from_tuple)
from freeconvex.corpus import (interval_tuple, linear_form_poly, scalar_tuple,
                               tv_dual_boundary, tv_monic_lift)
from freeconvex.possatz import (Certificate, WordBasis, expand_certificate,
                                extract_weights, search_certificate,
                                verify_certificate)
from freeconvex.rand import rng
from freeconvex.sdp import SolveStatus
from freeconvex.spectra import (Spectrahedrop, dominates, drop_membership,
                                drop_polar_membership)

TVM = tv_monic_lift()
HALF = LinearPencil(np.eye(1), [2.0 * np.eye(1)])   # 1 + 2x


def test_word_basis_counts_and_order():
    basis = WordBasis(2, 2)
    assert len(basis) == 1 + 2 + 4
    assert basis.words[:4] == ((), (1,), (2,), (1, 1))


def test_expand_halfline_certificate():
    cert = Certificate(1, 1, 1, 0, np.array([[0.5]]), np.array([[0.5]]))
    out = expand_certificate(cert, HALF)
    want = NCPolynomial(1, 1, 1, {(): np.array([[1.0]]),
                                  (1,): np.array([[1.0]])})
    assert out.max_coeff_diff(want) < 1e-14


def test_expand_trivial_certificates():
    one = Certificate(1, 1, 1, 0, np.eye(1), np.zeros((1, 1)))
    assert expand_certificate(one, HALF).max_coeff_diff(
        NCPolynomial.scalar(1.0, 1)) < 1e-14
    zero = Certificate(1, 1, 1, 0, np.zeros((1, 1)), np.zeros((1, 1)))
    assert not expand_certificate(zero, HALF).terms


def test_verify_halfline():
    want = NCPolynomial(1, 1, 1, {(): np.array([[1.0]]),
                                  (1,): np.array([[1.0]])})
    cert = Certificate(1, 1, 1, 0, np.array([[0.5]]), np.array([[0.5]]))
    ok, resid = verify_certificate(want, cert, HALF)
    assert ok and resid < 1e-12
    zero = Certificate(1, 1, 1, 0, np.zeros((1, 1)), np.zeros((1, 1)))
    ok, resid = verify_certificate(want, zero, HALF)
    assert not ok and abs(resid - 1.0) < 1e-12


def test_expand_rejects_surviving_y():
    cert = Certificate(2, 5, 1, 0, np.zeros((1, 1)), np.eye(5))
    with pytest.raises(ValueError):
        expand_certificate(cert, TVM)


def test_search_constant_one():
    res = search_certificate(NCPolynomial.scalar(1.0, 2), TVM, 0)
    assert bool(res) and res.residual <= 1e-6


def test_search_linear_forms_on_tv():
    res = search_certificate(linear_form_poly(0.5, 0.5), TVM, 0)
    assert bool(res) and res.residual <= 1e-6
    res = search_certificate(linear_form_poly(1.2, 0.0), TVM, 0)
    assert not bool(res)


def test_search_requires_monic():
    from freeconvex.corpus import tv_lift
    with pytest.raises(ValueError):
        search_certificate(linear_form_poly(0.1, 0.1), tv_lift(), 0)


def test_degree_bound_enforced():
    p = NCPolynomial(2, 1, 1, {(1, 1): np.array([[1.0]])})
    with pytest.raises(ValueError):
        search_certificate(p, TVM, 0)


def test_search_degree_one_quadratics():
    strict = NCPolynomial(2, 1, 1, {(): np.array([[1.1]]),
                                    (1, 1): np.array([[-1.0]])})
    res = search_certificate(strict, TVM, 1)
    assert bool(res) and res.residual <= 1e-6
    assert expand_certificate(res.certificate, TVM).degree <= 3
    false = NCPolynomial(2, 1, 1, {(): np.array([[1.0]]),
                                   (1, 1): np.array([[-3.0]])})
    assert not bool(search_certificate(false, TVM, 1))


def test_boundary_polynomial_reports_honestly():
    # touches zero on the drop: the Gram problem sits on the cone boundary
    boundary = NCPolynomial(2, 1, 1, {(): np.array([[1.0]]),
                                      (1, 1): np.array([[-1.0]])})
    res = search_certificate(boundary, TVM, 1)
    assert res.status in (SolveStatus.FEASIBLE, SolveStatus.MARGINAL)


def test_extraction_identity():
    strict = NCPolynomial(2, 1, 1, {(): np.array([[1.1]]),
                                    (1, 1): np.array([[-1.0]])})
    res = search_certificate(strict, TVM, 1)
    sos, weights = extract_weights(res.certificate)
    l3 = NCPolynomial(3, 5, 5, {(): np.asarray(TVM.A0),
                                (1,): np.asarray(TVM.x_coeffs[0]),
                                (2,): np.asarray(TVM.x_coeffs[1]),
                                (3,): np.asarray(TVM.y_coeffs[0])})

    def promote(q):
        return NCPolynomial(3, q.rows, q.cols, dict(q.terms))

    total = NCPolynomial(3, 1, 1, {})
    for h in sos:
        h3 = promote(h)
        total = total + h3.adjoint() * h3
    for q in weights:
        q3 = promote(q)
        total = total + q3.adjoint() * (l3 * q3)
    assert total.max_coeff_diff(promote(strict)) <= 1e-6


def test_r0_agrees_with_drop_polar():
    gen = rng(3)
    drop = Spectrahedrop(TVM)
    for _ in range(10):
        c = gen.uniform(-1.3, 1.3, size=2)
        if abs(tv_dual_boundary(*c)) < 1e-2:
            continue
        via_cert = bool(search_certificate(linear_form_poly(*c), TVM, 0))
        via_dual = bool(drop_polar_membership(drop, scalar_tuple(*c),
                                              bounded=True))
        assert via_cert == via_dual


def test_no_y_reduction_matches_domination():
    om = pencil_from_tuple(interval_tuple(-1.0, 1.0))
    for c, expect in [(0.8, True), (1.3, False)]:
        p = NCPolynomial(1, 1, 1, {(): np.array([[1.0]]),
                                   (1,): np.array([[-c]])})
        res = search_certificate(p, om, 0)
        la = pencil_from_tuple(HermitianTuple([np.array([[c]])]))
        assert bool(res) == bool(dominates(la, om)) == expect


def test_soundness_on_drop_samples():
    # FEASIBLE certificates mean p is PSD at actual drop points
    gen = rng(14)
    drop = Spectrahedrop(TVM)
    p = linear_form_poly(0.4, 0.4)
    res = search_certificate(p, TVM, 0)
    assert bool(res)
    found = 0
    while found < 8:
        n = int(gen.integers(1, 4))
        x = HermitianTuple([np.asarray(m) * 0.6
                            for m in (np.diag(gen.uniform(-1, 1, n)),
                                      np.diag(gen.uniform(-1, 1, n)))])
        if not drop_membership(drop, x).feasible:
            continue
        val = lambda_min(p.evaluate(x))
        assert val >= -1e-6
        found += 1
