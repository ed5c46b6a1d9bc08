"""Monodromy structure, separation variables, brackets, and difference flows."""

import math

import numpy as np
import pytest

from mhlab.maps import (
    MapParams,
    PhasePoint,
    invariants,
    map_for,
    orbit,
)
from mhlab.spectral import (
    NonSeparableError,
    build_monodromy,
    canonicity_check,
    dubrovin_residual_discrete,
    entry_bracket_check,
    lax_L,
    mu_initial_slice_g2,
    poly_eval,
    printed_from_raw,
    raw_from_printed,
    raw_trace_coeffs,
    separation_closed_form_g1,
    separation_coordinates,
    spectral_data,
    zs_residual,
)

from conftest import sample_points


# ----------------------------------------------------------------------
# single-site factor and monodromy structure
# ----------------------------------------------------------------------

def test_lax_factor_at_origin(kdv2):
    L = lax_L(0.0, 0.0, None, kdv2)
    w = kdv2.omega
    assert np.allclose(L.a, [-w, 1.0])
    assert np.allclose(L.b, [0.0])
    assert np.allclose(L.c, [0.0, 0.0])
    assert np.allclose(L.d, [0.0, 1.0])


def test_lax_factor_determinant_exact(kdv2):
    L = lax_L(0.7, -0.4, None, kdv2)
    # det = λ(λ − ω) exactly, any site values
    assert np.allclose(L.det(), [0.0, -kdv2.omega, 1.0], atol=0.0)


@pytest.mark.parametrize("period,coords", [
    (2, (0.3, -0.2)),
    (3, (0.2, -0.1, 0.3, 0.15)),
])
def test_monodromy_grading_and_determinant(period, coords):
    par = MapParams(family="kdv", period=period, epsilon=2.0, delta=0.05)
    T = build_monodromy(PhasePoint(coords), par)
    assert T.grading_residual(par.period - 1, par.omega) < 1e-12


def test_trace_coefficients_conserved_along_orbit(kdv3):
    step = map_for(kdv3)
    z = PhasePoint((0.2, -0.1, 0.3, 0.15))
    base = raw_trace_coeffs(z, kdv3)
    for _ in range(50):
        z = step(z, kdv3)
    drift = np.abs(raw_trace_coeffs(z, kdv3) - base)
    assert np.max(drift / np.maximum(np.abs(base), 1.0)) < 1e-10


def test_trace_cubic_matches_printed_invariants(kdv3):
    """tr T(λ) = 2λ³ + 3(3ε²−ω)λ² + P₂λ + P₁ with the invariant values
    tied to the conserved product-form variant by the stored offsets."""
    e, w = kdv3.epsilon, kdv3.omega
    rng = np.random.default_rng(10)
    for z in sample_points(kdv3, 20, seed=10):
        tr = build_monodromy(z, kdv3).trace()
        p1, p2 = raw_from_printed(invariants(z, kdv3), kdv3)
        for lam in rng.uniform(-2.0, 2.0, 20):
            want = 2.0 * lam ** 3 + 3.0 * (3.0 * e * e - w) * lam ** 2 \
                + p2 * lam + p1
            got = poly_eval(tr, lam)
            assert abs(got - want) / max(abs(want), 1.0) < 1e-11


def test_printed_raw_conversions_are_inverse(kdv3):
    z = PhasePoint((0.2, -0.1, 0.3, 0.15))
    raw = raw_trace_coeffs(z, kdv3)[:2]
    printed = printed_from_raw(raw, kdv3)
    assert printed == pytest.approx(np.asarray(invariants(z, kdv3)), rel=1e-12)
    assert raw_from_printed(printed, kdv3) == pytest.approx(raw, rel=1e-12)


def test_casimirs_match_family_constants(kdv2, kdv3):
    sd1 = spectral_data(PhasePoint((0.3, -0.2)), kdv2)
    assert sd1.B_top == pytest.approx(2.0 * kdv2.epsilon, rel=1e-14)
    assert sd1.C_top == pytest.approx(2.0 * kdv2.epsilon, rel=1e-14)
    sd2 = spectral_data(PhasePoint((0.2, -0.1, 0.3, 0.15)), kdv3)
    assert sd2.B_top == pytest.approx(3.0 * kdv3.epsilon, rel=1e-14)
    assert sd2.C_top == pytest.approx(3.0 * kdv3.epsilon, rel=1e-14)


def test_discriminant_equals_trace_square_minus_det(kdv3):
    z = PhasePoint((0.2, -0.1, 0.3, 0.15))
    sd = spectral_data(z, kdv3)
    tr = build_monodromy(z, kdv3).trace()
    w, g = kdv3.omega, sd.genus
    lam = 0.77
    want = poly_eval(tr, lam) ** 2 \
        - 4.0 * lam ** (g + 1) * (lam - w) ** (g + 1)
    got = poly_eval(np.asarray(sd.R_coeffs), lam)
    assert got == pytest.approx(want, rel=1e-10)


def test_genus2_discriminant_closed_form(kdv3):
    """R(λ) written out in the two trace invariants, degree five in λ."""
    z = PhasePoint((0.2, -0.1, 0.3, 0.15))
    sd = spectral_data(z, kdv3)
    p1, p2 = sd.invariants
    e, w = kdv3.epsilon, kdv3.omega
    want = np.array([
        p1 * p1,
        2.0 * p1 * p2,
        18.0 * e * e * p1 - 6.0 * w * p1 + p2 * p2,
        2.0 * (9.0 * e * e * p2 - 3.0 * w * p2 + 2.0 * p1 + 2.0 * w ** 3),
        4.0 * p2 - 3.0 * w * w - 54.0 * e * e * w + 81.0 * e ** 4,
        36.0 * e * e,
        0.0,
    ])
    got = np.asarray(sd.R_coeffs)
    assert got == pytest.approx(want, rel=1e-10, abs=1e-10)


# ----------------------------------------------------------------------
# Zakharov–Shabat compatibility
# ----------------------------------------------------------------------

def test_zs_residual_machine_small(kdv2, kdv3):
    assert zs_residual(PhasePoint((0.31, -0.17)), kdv2) < 1e-11
    assert zs_residual(PhasePoint((0.2, -0.1, 0.3, 0.15)), kdv3) < 1e-11


def test_zs_residual_zero_at_identity():
    par = MapParams(family="kdv", period=2, epsilon=2.0, delta=0.0)
    assert zs_residual(PhasePoint((0.31, -0.17)), par) == 0.0


# ----------------------------------------------------------------------
# separation variables
# ----------------------------------------------------------------------

def _entry_at(coeffs, x):
    return poly_eval(np.asarray(coeffs), x)


@pytest.mark.parametrize("period,coords", [
    (2, (0.3, -0.2)),
    (3, (0.2, -0.1, 0.3, 0.15)),
])
def test_separation_state_sits_on_curve(period, coords):
    par = MapParams(family="kdv", period=period, epsilon=2.0, delta=0.05)
    z = PhasePoint(coords)
    T = build_monodromy(z, par)
    sd = spectral_data(z, par)
    state = separation_coordinates(z, par)
    bscale = max(abs(v) for v in T.b)
    for mu, nu, kap in zip(state.mu, state.nu, state.kappa):
        assert abs(_entry_at(T.b, mu)) < 1e-9 * max(bscale, 1.0)
        A, D = _entry_at(T.a, mu), _entry_at(T.d, mu)
        assert math.exp(2.0 * nu) == pytest.approx(A / D, rel=1e-10)
        # sheet sign convention: κ√R = A − D at the separation point
        R = _entry_at(np.asarray(sd.R_coeffs), mu)
        assert kap * math.sqrt(max(R, 0.0)) == pytest.approx(A - D, rel=1e-9)
        # both eigenvalues multiply to det T(μ)
        det = _entry_at(T.det(), mu)
        assert A * D == pytest.approx(det, rel=1e-10)


def test_separation_g1_closed_form_agrees(kdv2):
    worst = 0.0
    for z in sample_points(kdv2, 100, seed=11):
        state = separation_coordinates(z, kdv2)
        mu_cf, nu_cf = separation_closed_form_g1(z, kdv2)
        worst = max(worst, abs(state.mu[0] - mu_cf), abs(state.nu[0] - nu_cf))
    assert worst < 1e-10


def test_separation_g1_nu_vanishes_on_axis(kdv2):
    state = separation_coordinates(PhasePoint((0.0, -0.4)), kdv2)
    assert abs(state.nu[0]) < 1e-14


def test_separation_g2_initial_slice_closed_form(kdv3):
    z = PhasePoint((0.0, 0.0, 0.3, 0.15))
    state = separation_coordinates(z, kdv3)
    mu_formula = mu_initial_slice_g2(0.3, 0.15, kdv3)
    assert sorted(state.mu) == pytest.approx(sorted(mu_formula), rel=1e-10)


def test_nonseparable_point_is_reported(kdv3):
    # a phase point whose off-diagonal entry has complex roots
    z = PhasePoint((-0.8805965590039821, -1.4313664791349332,
                    -1.4817665698417697, 1.4881137748075148))
    b = np.asarray(build_monodromy(z, kdv3).b)
    assert b[1] ** 2 - 4.0 * b[0] * b[2] < 0.0
    with pytest.raises(NonSeparableError):
        separation_coordinates(z, kdv3)


# ----------------------------------------------------------------------
# bracket tables
# ----------------------------------------------------------------------

def test_canonicity_genus1(kdv2):
    worst = max(np.max(np.abs(canonicity_check(z, kdv2)))
                for z in sample_points(kdv2, 20, seed=13))
    assert worst < 1e-10


def test_canonicity_genus2(kdv3):
    worst = max(np.max(np.abs(canonicity_check(z, kdv3)))
                for z in sample_points(kdv3, 20, seed=14))
    assert worst < 1e-9


def test_entry_brackets_all_relations(kdv3):
    rng = np.random.default_rng(15)
    worst = {}
    for z in sample_points(kdv3, 20, seed=15):
        l1, l2 = rng.uniform(-1.5, 1.5, 2)
        if abs(l1 - l2) < 0.1 or abs(l1) < 0.1 or abs(l2) < 0.1:
            l1, l2 = 1.3, 0.7
        res = entry_bracket_check(float(l1), float(l2), z, kdv3)
        for key, val in res.items():
            worst[key] = max(worst.get(key, 0.0), abs(val))
    assert set(worst) == {"AA", "AB", "AD", "BB", "BD", "DD"}
    assert worst["BB"] < 1e-10 and worst["DD"] < 1e-10
    assert max(worst.values()) < 1e-9


def test_entry_brackets_coincident_points_rejected(kdv3):
    z = PhasePoint((0.2, -0.1, 0.3, 0.15))
    with pytest.raises(Exception):
        entry_bracket_check(0.8, 0.8, z, kdv3)


# ----------------------------------------------------------------------
# discrete difference-equation residuals
# ----------------------------------------------------------------------

def test_dubrovin_genus1_random_points(kdv2):
    worst = max(np.max(np.abs(dubrovin_residual_discrete(z, kdv2)))
                for z in sample_points(kdv2, 50, seed=16))
    assert worst < 1e-9


def test_dubrovin_genus2_along_orbit(kdv3):
    z = PhasePoint((0.2, -0.1, 0.3, 0.15))
    step = map_for(kdv3)
    worst = 0.0
    for _ in range(100):
        res = dubrovin_residual_discrete(z, kdv3)
        assert len(res) == 3
        worst = max(worst, float(np.max(np.abs(res))))
        z = step(z, kdv3)
    assert worst < 1e-8


def test_dubrovin_identity_step_is_exact():
    par = MapParams(family="kdv", period=2, epsilon=2.0, delta=0.0)
    res = dubrovin_residual_discrete(PhasePoint((0.3, -0.2)), par)
    assert np.max(np.abs(res)) < 1e-12
