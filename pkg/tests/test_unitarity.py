import logging
from fractions import Fraction

import pytest

from superquant_toolkit.unitarity import service as unitarity_service
from superquant_toolkit.unitarity.service import InvalidParameters, JakobsenParamsOsp

F = Fraction


@pytest.mark.parametrize("m,n", [(m, n) for m in range(1, 4) for n in range(1, 4)])
def test_rho_matches_the_expected_shifts(m, n):
    ctx = unitarity_service._osp_context(m, n)
    assert ctx.ps.rho == unitarity_service.expected_rho_osp(m, n)


def test_expected_rho_for_osp_5_4():
    assert unitarity_service.expected_rho_osp(2, 2) == (F(3, 2), F(1, 2), F(-1, 2), F(-3, 2))


def test_osp_3_2_boundary():
    inside = unitarity_service.osp_unitarizable(JakobsenParamsOsp.build(1, 1, (0,), -3))
    assert inside.in_C
    assert (inside.binding_root, inside.binding_value) == ("e1-d1", -3)
    outside = unitarity_service.osp_unitarizable(JakobsenParamsOsp.build(1, 1, (0,), 0))
    assert not outside.in_C
    assert outside.binding_value == 0


def test_osp_5_4_binding_row():
    verdict = unitarity_service.osp_unitarizable(JakobsenParamsOsp.build(2, 2, (1, 0), -5, (0,)))
    assert verdict.in_C
    row = next(r for r in verdict.rows if r.root == "e1-d1")
    assert row.value == -3
    assert verdict.binding_value == -3


@pytest.mark.parametrize("m,n,mu,lam,a", [
    (1, 1, (0,), -3, ()),
    (1, 1, (2,), -7, ()),
    (2, 2, (1, 0), -5, (0,)),
    (2, 2, (3, 1), -9, (1,)),
    (3, 2, (2, 1, 0), -6, (1,)),
])
def test_binding_value_is_mu1_plus_lambda_plus_n_minus_1(m, n, mu, lam, a):
    verdict = unitarity_service.osp_unitarizable(JakobsenParamsOsp.build(m, n, mu, lam, a))
    assert verdict.binding_root == "e1-d1"
    assert verdict.binding_value == mu[0] + lam + n - 1


def test_binding_value_grows_with_mu():
    values = [unitarity_service.osp_unitarizable(JakobsenParamsOsp.build(2, 2, (k, 0), -8, (0,))).binding_value
              for k in range(4)]
    assert values == sorted(values)
    assert len(set(values)) == len(values)


def test_highest_weight_and_scaling():
    p = JakobsenParamsOsp.build(2, 3, (2, 1), -4, (1, 3))
    assert p.highest_weight == (2, 1, -4, -5, -7)
    assert p.scaled(2).highest_weight == (4, 2, -8, -10, -14)


@pytest.mark.parametrize("args", [
    (1, 0, (0,), -3, ()),
    (2, 1, (0,), -3, ()),
    (2, 1, (0, 1), -3, ()),
    (1, 1, (-1,), -3, ()),
    (1, 2, (0,), -3, ()),
    (1, 3, (0,), -3, (2, 1)),
    (1, 2, (0,), -3, (-1,)),
])
def test_invalid_parameters(args):
    with pytest.raises(InvalidParameters):
        JakobsenParamsOsp.build(*args)


def test_parameters_must_match_the_positive_system(su211_ctx):
    with pytest.raises(InvalidParameters):
        unitarity_service.lambda_plus_rho_osp(JakobsenParamsOsp.build(1, 1, (0,), -3), su211_ctx.ps)


def test_inequality_table_inside_and_outside_C(su211_ctx):
    ps = su211_ctx.ps
    rows = unitarity_service.inequality_table(su211_ctx, (-4, -5, -1, 0))
    assert len(rows) == len(ps.compact_positive) + 2 * len(ps.q_plus)
    assert all(r.satisfied for r in rows)
    assert {r.kind for r in rows} == {"hc_cone", "shifted"}
    rows = unitarity_service.inequality_table(su211_ctx, (-1, -5, -1, 0))
    assert not all(r.satisfied for r in rows)


@pytest.mark.parametrize("mu,c_holds,u_holds", [(-20, True, True), (-10, True, False), (-7, False, False)])
def test_g3_exception_flags(mu, c_holds, u_holds):
    verdict = unitarity_service.exception_flags("G3", {"a": 1, "b": 2, "mu": mu})
    assert (verdict.c_holds, verdict.unitarizable_holds) == (c_holds, u_holds)
    assert verdict.agree == (c_holds == u_holds)
    assert verdict.c_condition == "mu < a+b-10"
    assert verdict.unitarizable_condition == "mu < -3a-3b-9"


def test_f4_thresholds_are_missing(caplog):
    with caplog.at_level(logging.WARNING):
        assert unitarity_service.exception_flags("F4", {"a": 1, "b": 2, "mu": -20}) is None
    assert unitarity_service.F4_GAP in caplog.text


@pytest.mark.parametrize("family,params", [
    ("B", {"a": 1, "b": 2, "mu": 0}),
    ("G3", {"a": 1, "b": 2}),
    ("G3", {"a": 2, "b": 1, "mu": 0}),
    ("G3", {"a": 0, "b": 1, "mu": 0}),
])
def test_exception_flags_reject_bad_input(family, params):
    with pytest.raises(InvalidParameters):
        unitarity_service.exception_flags(family, params)
