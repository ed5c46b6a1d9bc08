"""Frequencies, quadrature modified Hamiltonians, flows, and inversions."""

import math

import numpy as np
import pytest

from mhlab.actionangle import (
    BranchPathError,
    DomainError,
    FrequencyReport,
    QuadratureSpec,
    abel_endpoint_integral,
    abel_step_sum,
    frequencies_g2,
    frequency_g1_kdv,
    frequency_g1_mkdv,
    frequency_sweep_g1,
    frequency_sweep_g2,
    generating_function_checks,
    interpolating_flow_g1,
    interpolating_flow_g2,
    jacobi_inversion_check,
    mh_g1_kdv,
    mh_g1_mkdv,
    mh_g2,
)
from mhlab.maps import (
    InvalidStateError,
    MapParams,
    PhasePoint,
    invariant_kdv_p2,
    invariant_mkdv_p2,
    map_for,
)
from mhlab.mh import series_invariant
from mhlab.spectral import separation_closed_form_g1, spectral_data

# Frozen reference values, produced by this package's quadratures and
# cross-validated against an independent ODE time-of-flight oracle
# (integrate the invariant's Hamilton equations until the map image is
# reached; the elapsed time is the frequency).
NU_KDV2 = 0.0063967143833720949          # eps=2, delta=0.05, P=-0.36
NU_MKDV = -0.0087181914069684816         # rho=1.08, P=I(0.25,-0.15)
P_MKDV = 13.331014251768462
G2_BASE = (0.2, -0.1, 0.3, 0.15)
G2_NU1 = 0.0016054746498678216           # eps=2, delta=0.05, at G2_BASE
G2_NU2 = 7.8226335002055101e-05
G2_LSTAR = 0.048724740068923203
G2_ALT_NU1 = 0.0021944882056479536       # eps=1.7, delta=0.03
G2_ALT_NU2 = 5.4941090490127992e-05
G2_ALT_LSTAR = 0.025035947037093262


def _raw_invariants(z, params):
    return spectral_data(PhasePoint(z), params).invariants


# ----------------------------------------------------------------------
# report and spec validation
# ----------------------------------------------------------------------

def test_quadrature_spec_validation():
    with pytest.raises(InvalidStateError):
        QuadratureSpec(abs_tol=-1e-12)
    with pytest.raises(InvalidStateError):
        QuadratureSpec(max_subdivisions=8)
    with pytest.raises(InvalidStateError):
        QuadratureSpec(endpoint_handling="taylor")
    spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11)
    assert spec.max_subdivisions >= 16


def test_frequency_report_validation():
    with pytest.raises(InvalidStateError):
        FrequencyReport(genus=3, nu1=0.1)
    with pytest.raises(InvalidStateError):
        FrequencyReport(genus=2, nu1=0.1)          # nu2, lambda_star missing
    with pytest.raises(InvalidStateError):
        FrequencyReport(genus=2, nu1=0.1, nu2=0.2, lambda_star=7.0)
    rep = FrequencyReport(genus=2, nu1=0.1, nu2=0.02, lambda_star=0.2)
    assert rep.nu2 == pytest.approx(rep.lambda_star * rep.nu1)


# ----------------------------------------------------------------------
# genus-1 frequencies
# ----------------------------------------------------------------------

def test_frequency_kdv2_golden(kdv2):
    pval = invariant_kdv_p2(0.0, 0.3, kdv2.epsilon, kdv2.delta)
    assert pval == pytest.approx(-0.36, rel=1e-15)
    assert frequency_g1_kdv(pval, kdv2) == pytest.approx(NU_KDV2, rel=1e-10)


def test_frequency_kdv2_zero_at_zero_grading():
    par = MapParams(family="kdv", period=2, epsilon=2.0, delta=0.0)
    assert frequency_g1_kdv(-0.36, par) == 0.0


def test_frequency_kdv2_domain_errors(kdv2):
    with pytest.raises(DomainError) as info:
        frequency_g1_kdv(0.5, kdv2)
    assert info.value.location == 0.5
    with pytest.raises(DomainError):
        frequency_g1_kdv(-kdv2.epsilon ** 4 - 0.5, kdv2)


def test_frequency_mkdv_golden_and_sign(mkdv):
    pval = invariant_mkdv_p2(0.25, -0.15, mkdv.rho)
    assert pval == pytest.approx(P_MKDV, rel=1e-15)
    assert frequency_g1_mkdv(pval, mkdv) == pytest.approx(NU_MKDV, rel=1e-10)
    # the signed frequency flips with the side of rho = 1
    par_lo = MapParams(family="mkdv", period=2, rho=0.92)
    assert frequency_g1_mkdv(pval, par_lo) > 0.0
    par_id = MapParams(family="mkdv", period=2, rho=1.0)
    assert frequency_g1_mkdv(pval, par_id) == 0.0


def test_frequency_mkdv_domain_error(mkdv):
    bound = 2.0 * mkdv.rho ** 2 + 8.0 * mkdv.rho + 2.0
    with pytest.raises(DomainError):
        frequency_g1_mkdv(bound - 0.1, mkdv)


# ----------------------------------------------------------------------
# genus-1 interpolating flow lands on the map
# ----------------------------------------------------------------------

def _landing_error_g1(coords, params):
    z = PhasePoint(coords)
    if params.family == "kdv":
        pval = invariant_kdv_p2(coords[0], coords[1], params.epsilon,
                                params.delta)
        nu = frequency_g1_kdv(pval, params)
    else:
        pval = invariant_mkdv_p2(coords[0], coords[1], params.rho)
        nu = frequency_g1_mkdv(pval, params)
    z_flow = interpolating_flow_g1(z, params, nu)
    z_map = map_for(params)(z, params)
    return max(abs(a - b) for a, b in zip(z_flow.coords, z_map.coords))


def test_landing_kdv2_both_momentum_branches(kdv2):
    for coords in [(0.2, -0.3), (0.3, 0.4), (0.0, 0.3), (-0.25, 0.35)]:
        assert _landing_error_g1(coords, kdv2) < 1e-8


def test_landing_mkdv_both_parameter_sides(mkdv):
    par_lo = MapParams(family="mkdv", period=2, rho=0.92)
    for par in (mkdv, par_lo):
        for coords in [(0.25, -0.15), (0.4, 0.2)]:
            assert _landing_error_g1(coords, par) < 1e-8


def test_flow_g1_zero_duration_is_identity(kdv2):
    z = PhasePoint((0.2, -0.3))
    assert interpolating_flow_g1(z, kdv2, 0.0).coords == z.coords


def test_flow_g1_conserves_invariant(kdv2):
    z = PhasePoint((0.2, -0.3))
    before = invariant_kdv_p2(0.2, -0.3, kdv2.epsilon, kdv2.delta)
    out = interpolating_flow_g1(z, kdv2, 0.37)
    after = invariant_kdv_p2(out.coords[0], out.coords[1], kdv2.epsilon,
                             kdv2.delta)
    assert abs(after - before) < 1e-10


# ----------------------------------------------------------------------
# genus-2 frequencies and the distinguished spectral value
# ----------------------------------------------------------------------

def test_frequencies_g2_golden(kdv3):
    p1, p2 = _raw_invariants(G2_BASE, kdv3)
    rep = frequencies_g2(p1, p2, kdv3)
    assert rep.genus == 2
    assert rep.nu1 == pytest.approx(G2_NU1, rel=1e-10)
    assert rep.nu2 == pytest.approx(G2_NU2, rel=1e-10)
    assert rep.lambda_star == pytest.approx(G2_LSTAR, rel=1e-10)
    assert abs(rep.nu2 - rep.lambda_star * rep.nu1) <= 1e-10 * abs(rep.nu2)


def test_frequencies_g2_second_parameter_set():
    par = MapParams(family="kdv", period=3, epsilon=1.7, delta=0.03)
    p1, p2 = _raw_invariants((0.11, 0.07, -0.12, 0.2), par)
    rep = frequencies_g2(p1, p2, par)
    assert rep.nu1 == pytest.approx(G2_ALT_NU1, rel=1e-10)
    assert rep.nu2 == pytest.approx(G2_ALT_NU2, rel=1e-10)
    assert rep.lambda_star == pytest.approx(G2_ALT_LSTAR, rel=1e-10)


def test_frequencies_g2_zero_at_zero_grading():
    par = MapParams(family="kdv", period=3, epsilon=2.0, delta=0.0)
    rep = frequencies_g2(50.0, 90.0, par)
    assert rep.nu1 == 0.0 and rep.nu2 == 0.0


def test_frequencies_g2_obstructed_path_reports_location(kdv3):
    with pytest.raises(BranchPathError) as info:
        frequencies_g2(0.0, 0.0, kdv3)
    assert info.value.location is not None


def test_frequencies_g2_rejects_other_maps(kdv2):
    with pytest.raises(InvalidStateError):
        frequencies_g2(50.0, 90.0, kdv2)


# ----------------------------------------------------------------------
# step sums, endpoint integrals, Jacobi inversion
# ----------------------------------------------------------------------

def test_abel_step_sum_matches_endpoint_integrals(kdv3):
    z = PhasePoint(G2_BASE)
    p1, p2 = _raw_invariants(G2_BASE, kdv3)
    rep = frequencies_g2(p1, p2, kdv3)
    sums = abel_step_sum(z, kdv3)
    for k, nu in ((0, rep.nu1), (1, rep.nu2)):
        endpoint = abel_endpoint_integral(k, p1, p2, kdv3)
        assert abs(sums[k] - endpoint) < 1e-7
        assert abs(sums[k] - nu) < 1e-7


def test_abel_endpoint_integral_k_validation(kdv3):
    with pytest.raises(InvalidStateError):
        abel_endpoint_integral(2, 57.7, 91.8, kdv3)


def test_jacobi_inversion_residuals(kdv3):
    z = PhasePoint(G2_BASE)
    p1, p2 = _raw_invariants(G2_BASE, kdv3)
    rep = frequencies_g2(p1, p2, kdv3)
    res = jacobi_inversion_check(z, kdv3, rep.lambda_star, rep.nu1)
    assert res["k0"] < 1e-6
    assert res["k1"] < 1e-6


def test_jacobi_inversion_zero_time(kdv3):
    res = jacobi_inversion_check(PhasePoint(G2_BASE), kdv3, G2_LSTAR, 0.0)
    assert res["k0"] == 0.0 and res["k1"] == 0.0


# ----------------------------------------------------------------------
# genus-2 interpolating flow
# ----------------------------------------------------------------------

def test_landing_g2_reference_point():
    par = MapParams(family="kdv", period=3, epsilon=2.0, delta=0.03)
    z = PhasePoint(G2_BASE)
    p1, p2 = _raw_invariants(G2_BASE, par)
    rep = frequencies_g2(p1, p2, par)
    z_flow = interpolating_flow_g2(z, par, rep.lambda_star, rep.nu1)
    z_map = map_for(par)(z, par)
    assert max(abs(a - b)
               for a, b in zip(z_flow.coords, z_map.coords)) < 1e-7


def test_flow_g2_conserves_both_invariants(kdv3):
    z = PhasePoint(G2_BASE)
    before = np.array(_raw_invariants(G2_BASE, kdv3))
    out = interpolating_flow_g2(z, kdv3, G2_LSTAR, 0.5 * G2_NU1)
    after = np.array(_raw_invariants(out.coords, kdv3))
    assert np.max(np.abs(after - before)) < 1e-9 * np.max(np.abs(before))


def test_flow_g2_zero_duration_is_identity(kdv3):
    z = PhasePoint(G2_BASE)
    assert interpolating_flow_g2(z, kdv3, G2_LSTAR, 0.0).coords == z.coords


# ----------------------------------------------------------------------
# quadrature modified Hamiltonians: difference structure
# ----------------------------------------------------------------------

def test_mh_g1_kdv_difference_properties(kdv2):
    assert mh_g1_kdv(-0.36, -0.36, kdv2) == 0.0
    ab = mh_g1_kdv(-0.36, -0.9, kdv2)
    assert mh_g1_kdv(-0.9, -0.36, kdv2) == pytest.approx(-ab, rel=1e-12)
    mid = mh_g1_kdv(-0.36, -0.6, kdv2) + mh_g1_kdv(-0.6, -0.9, kdv2)
    assert mid == pytest.approx(ab, rel=1e-12)


def test_mh_g1_kdv_derivative_is_frequency(kdv2):
    p0, h = -0.5, 1e-5
    deriv = (mh_g1_kdv(-0.36, p0 + h, kdv2)
             - mh_g1_kdv(-0.36, p0 - h, kdv2)) / (2.0 * h)
    assert abs(deriv - frequency_g1_kdv(p0, kdv2)) < 1e-6


def test_mh_g1_mkdv_derivative_is_frequency(mkdv):
    p0, h = 14.0, 1e-5
    deriv = (mh_g1_mkdv(13.5, p0 + h, mkdv)
             - mh_g1_mkdv(13.5, p0 - h, mkdv)) / (2.0 * h)
    assert abs(deriv - frequency_g1_mkdv(p0, mkdv)) < 1e-6


def test_mh_g1_kdv_domain_error(kdv2):
    with pytest.raises(DomainError):
        mh_g1_kdv(-0.36, 0.25, kdv2)


# ----------------------------------------------------------------------
# quadrature MH vs invariant-variable series: residual scaling
# ----------------------------------------------------------------------

def _kdv_series_residual(delta):
    par = MapParams(family="kdv", period=2, epsilon=2.0, delta=delta)
    diff = mh_g1_kdv(-0.36, -0.9, par)
    ser = (series_invariant((-0.9,), par, "KdV2")
           - series_invariant((-0.36,), par, "KdV2"))
    return abs(diff - ser)


def test_mh_g1_kdv_series_agreement_slope():
    gradings = (0.08, 0.04, 0.02)
    res = [_kdv_series_residual(d) for d in gradings]
    slope = np.polyfit(np.log(gradings), np.log(res), 1)[0]
    # odd-only tail: printed order 5, first surviving correction order 7
    assert slope >= 6.0
    assert slope == pytest.approx(7.0, abs=0.25)


def _mkdv_series_residual(tau):
    par = MapParams(family="mkdv", period=2, rho=1.0 + tau)
    diff = mh_g1_mkdv(13.5, 14.5, par)
    ser = (series_invariant((14.5,), par, "MKdV2")
           - series_invariant((13.5,), par, "MKdV2"))
    return abs(diff - ser)


def test_mh_g1_mkdv_series_agreement_two_sided():
    """The residual beyond the printed order is O(tau^4); its tau^5
    correction is odd under tau -> -tau, so the one-sided fitted slopes
    straddle 4 symmetrically and the symmetrized residual (geometric
    mean over the two parameter sides) measures the even-order rate."""
    gradings = (0.08, 0.04, 0.02)
    logs = np.log(gradings)
    res_plus = [_mkdv_series_residual(t) for t in gradings]
    res_minus = [_mkdv_series_residual(-t) for t in gradings]
    slope_plus = np.polyfit(logs, np.log(res_plus), 1)[0]
    slope_minus = np.polyfit(logs, np.log(res_minus), 1)[0]
    assert slope_plus == pytest.approx(4.0, abs=0.1)
    assert slope_minus == pytest.approx(4.0, abs=0.1)
    sym = np.sqrt(np.array(res_plus) * np.array(res_minus))
    slope_sym = np.polyfit(logs, np.log(sym), 1)[0]
    assert slope_sym >= 4.0


# ----------------------------------------------------------------------
# genus-2 line-integral MH: conservativity and leading order
# ----------------------------------------------------------------------

def test_mh_g2_closed_loop_vanishes(kdv3):
    p1, p2 = _raw_invariants(G2_BASE, kdv3)
    corners = [(p1 * a, p2 * b) for a, b in
               ((0.98, 0.98), (1.02, 0.98), (1.02, 1.02), (0.98, 1.02),
                (0.98, 0.98))]
    assert abs(mh_g2(corners, kdv3)) < 1e-7


def test_mh_g2_path_independence(kdv3):
    p1, p2 = _raw_invariants(G2_BASE, kdv3)
    a, b = (p1, p2), (1.03 * p1, 0.97 * p2)
    direct = mh_g2([a, b], kdv3)
    corner = mh_g2([a, (a[0], b[1]), b], kdv3)
    assert direct == pytest.approx(corner, rel=1e-9)


def test_mh_g2_cross_derivatives_match(kdv3):
    p1, p2 = _raw_invariants(G2_BASE, kdv3)
    h = 1e-4
    d_nu1_d2 = (frequencies_g2(p1, p2 + h, kdv3).nu1
                - frequencies_g2(p1, p2 - h, kdv3).nu1) / (2.0 * h)
    d_nu2_d1 = (frequencies_g2(p1 + h, p2, kdv3).nu2
                - frequencies_g2(p1 - h, p2, kdv3).nu2) / (2.0 * h)
    assert abs(d_nu1_d2 - d_nu2_d1) < 1e-6


def test_mh_g2_leading_order_scaling():
    from mhlab.spectral import raw_from_printed
    printed_a, printed_b = np.array([57.0, 91.0]), np.array([70.0, 100.0])
    res = []
    gradings = (0.08, 0.04, 0.02)
    for d in gradings:
        par = MapParams(family="kdv", period=3, epsilon=2.0, delta=d)
        val = mh_g2([raw_from_printed(printed_a, par),
                     raw_from_printed(printed_b, par)], par)
        lead = d * par.epsilon * math.log(printed_b[0] / printed_a[0])
        res.append(abs(val - lead))
    slope = np.polyfit(np.log(gradings), np.log(res), 1)[0]
    assert slope == pytest.approx(3.0, abs=0.2)


def test_mh_g2_path_validation(kdv3):
    with pytest.raises(InvalidStateError):
        mh_g2([(57.7, 91.8)], kdv3)
    with pytest.raises(InvalidStateError):
        mh_g2([(57.7, 91.8, 1.0), (58.0, 92.0, 1.0)], kdv3)


# ----------------------------------------------------------------------
# generating functions
# ----------------------------------------------------------------------

def test_generating_function_residuals_g1(kdv2):
    out = generating_function_checks(PhasePoint((0.3, -0.4)), kdv2)
    assert set(out) == {"dF_dq", "dF_dmu", "dS_dq", "dG_dmu"}
    assert max(out.values()) < 1e-8
    assert out["dF_dmu"] < 1e-12


def test_generating_function_residuals_g1_axis_point(kdv2):
    out = generating_function_checks(PhasePoint((0.0, 0.3)), kdv2)
    assert out["dF_dq"] < 1e-10
    assert out["dF_dmu"] < 1e-12


def test_generating_function_residuals_g2(kdv3):
    out = generating_function_checks(PhasePoint(G2_BASE), kdv3)
    assert set(out) == {"dG_dmu_1", "dG_dmu_2"}
    assert max(out.values()) < 1e-8


def test_generating_function_checks_family_guard(mkdv):
    with pytest.raises(InvalidStateError):
        generating_function_checks(PhasePoint((0.25, -0.15)), mkdv)


# ----------------------------------------------------------------------
# chart round trip: separation variables commute with the dynamics
# ----------------------------------------------------------------------

def _chart_inverse_g1(mu, nu, params):
    e, w = params.epsilon, params.omega
    q = e * (math.exp(nu) - 1.0) / (math.exp(nu) + 1.0)
    p = (2.0 * e * mu - e * w + w * q + e ** 3 - e * q * q) / (q * q - e * e)
    return PhasePoint((q, p))


def test_commuting_diagram_g1(kdv2):
    for coords in [(0.3, -0.4), (0.2, 0.5), (-0.45, 0.1)]:
        z = PhasePoint(coords)
        mu, nu = separation_closed_form_g1(z, kdv2)
        z_rec = _chart_inverse_g1(mu, nu, kdv2)
        pval = invariant_kdv_p2(coords[0], coords[1], kdv2.epsilon,
                                kdv2.delta)
        z_flow = interpolating_flow_g1(z_rec, kdv2,
                                       frequency_g1_kdv(pval, kdv2))
        z_map = map_for(kdv2)(z, kdv2)
        assert max(abs(a - b)
                   for a, b in zip(z_flow.coords, z_map.coords)) < 1e-7


# ----------------------------------------------------------------------
# sweep helpers
# ----------------------------------------------------------------------

def test_frequency_sweep_g1_rows_match_direct_calls(kdv2):
    pvals = (-0.9, -0.6, -0.36)
    rows = frequency_sweep_g1(pvals, kdv2)
    assert [row["P"] for row in rows] == list(pvals)
    for row in rows:
        assert row["nu"] == frequency_g1_kdv(row["P"], kdv2)
        assert row["err_est"] > 0.0


def test_frequency_sweep_g2_rows(kdv3):
    p1, p2 = _raw_invariants(G2_BASE, kdv3)
    rows = frequency_sweep_g2([(p1, p2), (1.02 * p1, p2)], kdv3)
    assert len(rows) == 2
    for row in rows:
        assert row["nu2"] == pytest.approx(row["lambda_star"] * row["nu1"],
                                           rel=1e-10)
