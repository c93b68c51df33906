from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superquant_toolkit.kahler import service as kahler_service
from superquant_toolkit.kahler.service import InvalidPotential, NewtonParams, Potential, Term
from superquant_toolkit.quantize import service as quantize_service
from superquant_utils import linalg

F = Fraction


def _term(c, *weight):
    return Term(c, tuple(F(a) for a in weight))


# frame coordinates of the su(1,1|1) rays (-1,0,0) and (-1,-1,0)
MODEL = Potential((_term(1.0, -1, 0), _term(1.0, -1, -1)), 2, None, "model")
WITH_QUAD = Potential((_term(0.5, -1, 0), _term(2.0, 1, 2)), 2, ((F(1), F(0)), (F(0), F(2))), "mixed")


def _central_gradient(p, x, h=1e-5):
    out = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (kahler_service.value(p, x + e) - kahler_service.value(p, x - e)) / (2 * h)
    return out


_points = st.tuples(st.floats(-2, 2), st.floats(-2, 2)).map(np.array)


@given(_points, st.sampled_from([MODEL, WITH_QUAD]))
@settings(max_examples=100, deadline=None)
def test_gradient_matches_central_differences(x, p):
    np.testing.assert_allclose(kahler_service.grad(p, x), _central_gradient(p, x), rtol=1e-6, atol=1e-6)


@given(_points, st.sampled_from([MODEL, WITH_QUAD]))
@settings(max_examples=50, deadline=None)
def test_hessian_is_symmetric_positive_semidefinite(x, p):
    h = kahler_service.hess(p, x)
    np.testing.assert_allclose(h, h.T)
    assert np.linalg.eigvalsh(h).min() >= -1e-9


def test_moment_is_half_gradient():
    x = np.array([0.3, -0.7])
    np.testing.assert_allclose(kahler_service.moment(MODEL, x), 0.5 * kahler_service.grad(MODEL, x))


@given(_points)
@settings(max_examples=40, deadline=None)
def test_newton_recovers_the_preimage(x):
    target = kahler_service.moment(MODEL, x)
    result = kahler_service.in_moment_image(MODEL, [F(v).limit_denominator(10 ** 12) for v in target])
    assert result.member
    np.testing.assert_allclose(result.point, x, atol=1e-6)


@pytest.mark.parametrize("terms,dim,quad", [
    ((_term(0.0, -1, 0),), 2, None),
    ((_term(-1.0, -1, 0),), 2, None),
    ((_term(1.0, -1, 0, 0),), 2, None),
    ((_term(1.0, -1, 0),), 2, ((F(1), F(1)), (F(0), F(1)))),
    ((_term(1.0, -1, 0),), 2, ((F(-1), F(0)), (F(0), F(1)))),
    ((_term(1.0, -1, 0),), 2, ((F(1), F(0)),)),
])
def test_invalid_potentials_are_rejected(terms, dim, quad):
    with pytest.raises(InvalidPotential):
        Potential(terms, dim, quad)


def test_model_detection():
    assert MODEL.is_model
    assert not WITH_QUAD.is_model
    assert not Potential((_term(1.0, -1, 0), _term(1.0, -2, 0)), 2).is_model


def test_image_of_model_is_the_open_ray_cone():
    for y1 in range(-7, 8):
        for y2 in range(-7, 8):
            expected = y2 < 0 and y1 < y2
            result = kahler_service.in_moment_image(MODEL, (y1, y2))
            assert result.member == expected, (y1, y2)
            if not expected:
                assert result.certificate is not None


def test_boundary_weight_gets_a_certificate():
    result = kahler_service.in_moment_image(MODEL, (-3, 0))
    assert not result.member
    d = result.certificate
    assert all(linalg.dot(t.weight, d) <= 0 for t in MODEL.terms)
    assert linalg.dot((F(-3), F(0)), d) >= 0


def test_recession_certificate_is_none_inside():
    assert kahler_service.recession_certificate(MODEL, (-3, -1)) is None
    d = kahler_service.recession_certificate(MODEL, (1, 0))
    assert d is not None
    assert linalg.dot((F(1), F(0)), d) >= 0


def test_membership_dimension_is_checked():
    with pytest.raises(InvalidPotential):
        kahler_service.in_moment_image(MODEL, (-3, -1, 0))


def test_quadratic_potential_image_is_everything():
    p = Potential((), 2, ((F(1), F(0)), (F(0), F(1))), "quadratic")
    result = kahler_service.in_moment_image(p, (5, -2), NewtonParams(tol=1e-10))
    assert result.member
    np.testing.assert_allclose(result.point, [10.0, -4.0], atol=1e-8)


def test_scaled_potential_scales_the_moment():
    x = np.array([0.2, 0.1])
    np.testing.assert_allclose(kahler_service.moment(MODEL.scaled(3.0), x), 3.0 * kahler_service.moment(MODEL, x))


def test_model_classification_is_analytic(su11_cell):
    p = quantize_service.model_potential(su11_cell)
    verdict = kahler_service.classify_form(p, su11_cell)
    assert verdict.analytic
    assert verdict.pseudo_kahler and verdict.image_in_regular and verdict.strictly_convex


def test_sampled_classification(su11_cell):
    extra = Potential(MODEL.terms + (_term(1.0, -2, -1),), 2, None, "three terms")
    verdict = kahler_service.classify_form(extra, su11_cell)
    assert not verdict.analytic
    assert verdict.nondegenerate and verdict.image_in_regular
    assert verdict.certificates[0].startswith("sampled")


def test_degenerate_form_is_detected(su11_cell):
    flat = Potential((_term(1.0, -1, 0),), 2, None, "one term")
    verdict = kahler_service.classify_form(flat, su11_cell)
    assert not verdict.nondegenerate
    assert not verdict.pseudo_kahler


def test_classification_checks_the_cell_dimension(su211_cells):
    with pytest.raises(InvalidPotential):
        kahler_service.classify_form(MODEL, su211_cells[0])


def test_random_integral_weights_inside_and_outside_the_image():
    rng = np.random.default_rng(11)
    inside = []
    while len(inside) < 200:
        y2 = int(rng.integers(-20, 0))
        inside.append((int(rng.integers(y2 - 20, y2)), y2))
    outside = []
    while len(outside) < 200:
        y1, y2 = (int(v) for v in rng.integers(-20, 21, size=2))
        if not (y2 <= 0 and y1 <= y2):
            outside.append((y1, y2))
    for y in inside:
        result = kahler_service.in_moment_image(MODEL, y)
        assert result.member and result.residual <= 1e-8, y
    for y in outside:
        assert not kahler_service.in_moment_image(MODEL, y).member, y


def test_wall_crossing_image_is_not_regular(su11_cell):
    crossing = Potential((_term(1.0, 1, 0), _term(1.0, -1, 0), _term(1.0, 0, 1)), 2, None, "crossing")
    verdict = kahler_service.classify_form(crossing, su11_cell)
    assert not verdict.analytic
    assert verdict.nondegenerate
    assert not verdict.image_in_regular
    assert not verdict.pseudo_kahler


COERCIVE = Potential((_term(1.0, -2, -3), _term(1.0, -3, 1), _term(1.0, 1, -2), _term(1.0, 3, 2)), 2, None,
                     "coercive")


def test_coercive_potential_has_no_recession_direction():
    assert kahler_service.recession_certificate(COERCIVE, (-3, -3)) is None
    result = kahler_service.in_moment_image(COERCIVE, (-3, -3))
    assert result.member and result.residual <= 1e-8


@given(st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
@settings(max_examples=60, deadline=None)
def test_certificates_are_genuine_directions(lam):
    d = kahler_service.recession_certificate(COERCIVE, lam)
    assert d is None
    d = kahler_service.recession_certificate(MODEL, lam)
    if d is not None:
        assert all(linalg.dot(t.weight, d) <= 0 for t in MODEL.terms)
        assert linalg.dot(linalg.as_vector(lam), d) >= 0
