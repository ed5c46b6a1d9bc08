"""Truncated multivariate Taylor arithmetic and Poisson brackets."""

import math

import numpy as np
import pytest

from mhlab.jets import (
    Jet,
    OrderBudgetError,
    ScalarField,
    bracket_jets,
    exp,
    jet_seed,
    log,
    poisson_bracket,
    sqrt,
)


def test_seed_reproduces_point_and_identity_partials():
    q, p = jet_seed((0.7, -1.3), 2)
    assert q.value == 0.7 and p.value == -1.3
    assert q.coefficient((1, 0)) == 1.0 and q.coefficient((0, 1)) == 0.0
    assert p.coefficient((0, 1)) == 1.0 and p.coefficient((1, 0)) == 0.0


def test_polynomial_coefficients_match_closed_form():
    # f = (q + 2p)^3 expanded about (0.5, 0.25)
    q, p = jet_seed((0.5, 0.25), 3)
    f = (q + 2.0 * p) ** 3
    s = 0.5 + 2.0 * 0.25
    assert f.value == pytest.approx(s ** 3, rel=1e-15)
    assert f.coefficient((1, 0)) == pytest.approx(3.0 * s ** 2, rel=1e-14)
    assert f.coefficient((0, 1)) == pytest.approx(6.0 * s ** 2, rel=1e-14)
    assert f.coefficient((2, 1)) == pytest.approx(6.0, rel=1e-14)
    assert f.coefficient((3, 0)) == pytest.approx(1.0, rel=1e-14)


def test_division_and_chain_rule():
    (x,) = jet_seed((0.4,), 4)
    f = 1.0 / (1.0 - x)
    # geometric-series Taylor coefficients 1/(1-a)^{k+1}
    a = 0.4
    for k in range(5):
        assert f.coefficient((k,)) == pytest.approx((1 - a) ** -(k + 1),
                                                    rel=1e-13)


def test_transcendental_jets_match_series():
    (x,) = jet_seed((0.3,), 5)
    le = log(exp(x))
    assert le.value == pytest.approx(0.3, abs=1e-15)
    for k in range(1, 6):
        want = 1.0 if k == 1 else 0.0
        assert le.coefficient((k,)) == pytest.approx(want, abs=1e-13)
    sq = sqrt(x * x)  # |x| around positive base
    assert sq.value == pytest.approx(0.3, rel=1e-15)
    assert sq.coefficient((1,)) == pytest.approx(1.0, rel=1e-13)


def test_sqrt_of_negative_base_raises():
    (x,) = jet_seed((-2.0,), 2)
    with pytest.raises(Exception):
        sqrt(x)


def test_canonical_pair_brackets():
    q, p = jet_seed((0.8, -0.1), 2)
    one = bracket_jets(q, p, 1)
    assert one.value == pytest.approx(1.0, abs=1e-15)
    assert bracket_jets(p, q, 1).value == pytest.approx(-1.0, abs=1e-15)
    assert bracket_jets(q, q, 1).value == 0.0


def test_bracket_satisfies_jacobi_identity():
    q1, q2, p1, p2 = jet_seed((0.3, -0.5, 0.7, 0.2), 4)
    f = q1 * q1 * p2 + exp(q2 * 0.3)
    g = p1 * p2 + q1 * q2
    h = q2 ** 2 * p1 - 0.4 * q1
    total = (bracket_jets(f, bracket_jets(g, h, 2), 2).value
             + bracket_jets(g, bracket_jets(h, f, 2), 2).value
             + bracket_jets(h, bracket_jets(f, g, 2), 2).value)
    assert abs(total) < 1e-12


def test_bracket_leibniz_rule():
    q, p = jet_seed((0.6, -0.9), 3)
    f = q * q + p
    g = p * p - q
    h = q * p
    lhs = bracket_jets(f * g, h, 1).value
    rhs = f.value * bracket_jets(g, h, 1).value \
        + g.value * bracket_jets(f, h, 1).value
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_scalar_field_bracket_against_hand_derivation():
    # F = q^2 p, G = q + p^2: {F,G} computable by hand
    F = ScalarField(2, lambda a: a[0] * a[0] * a[1])
    G = ScalarField(2, lambda a: a[0] + a[1] * a[1])
    z = (1.2, -0.7)
    # {F,G} = F_q G_p − F_p G_q = (2qp)(2p) − q²·1
    want = 2 * z[0] * z[1] * 2 * z[1] - z[0] ** 2
    got = poisson_bracket(F, G, z, 2)
    assert got.value == pytest.approx(want, rel=1e-14)


def test_first_partials_gradient():
    q, p = jet_seed((0.25, 0.5), 1)
    f = log(1.0 + q) * p
    grad = f.first_partials()
    assert grad[0] == pytest.approx(0.5 / 1.25, rel=1e-14)
    assert grad[1] == pytest.approx(math.log(1.25), rel=1e-14)


def test_order_budget_is_enforced():
    q, p = jet_seed((0.1, 0.2), 1)
    with pytest.raises(OrderBudgetError):
        bracket_jets(bracket_jets(q * p, p, 1), q, 1)


def test_truncate_drops_high_orders():
    (x,) = jet_seed((0.5,), 4)
    f = (1.0 + x) ** 4
    t = f.truncate(2)
    assert t.order == 2
    assert t.value == f.value
    assert t.coefficient((2,)) == f.coefficient((2,))
