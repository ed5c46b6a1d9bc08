"""Bracket-series, printed-series, and defect-scaling behaviour."""

import math

import numpy as np
import pytest

from mhlab.jets import ScalarField
from mhlab.maps import (
    InvalidStateError,
    MapParams,
    PhasePoint,
    generating_hamiltonian,
    invariants,
    map_for,
)
from mhlab.mh import (
    bch_grading_coefficients,
    bch_mh,
    bch_series,
    bch_terms,
    defect_scan,
    invariant_series,
    printed_series,
    series_invariant,
    series_match,
    series_phase,
    tag_for,
    window_defect,
    with_grading,
)

from conftest import sample_points


# ----------------------------------------------------------------------
# bracket series construction
# ----------------------------------------------------------------------

def test_commuting_split_reduces_to_sum():
    T = ScalarField(2, lambda a: a[1] ** 3 - 2.0 * a[1])
    V = ScalarField(2, lambda a: 0.0 * a[0])
    z = (0.7, -0.4)
    for depth in (1, 2, 3, 4):
        want = (-0.4) ** 3 - 2.0 * (-0.4)
        assert bch_mh(T, V, z, depth) == pytest.approx(want, rel=1e-14)


def test_depth_cap_enforced(kdv2):
    T, V = generating_hamiltonian(kdv2)
    with pytest.raises(InvalidStateError):
        bch_terms(T, V, (0.2, -0.3), depth=5)


def test_bch_depth3_matches_printed_truncation_kdv2(kdv2):
    T, V = generating_hamiltonian(kdv2)
    for z in sample_points(kdv2, 50, seed=20):
        got = bch_mh(T, V, z.coords, depth=3)
        want = series_phase(z.coords, kdv2, "KdV2", order=3)
        assert got == pytest.approx(want, rel=1e-9)


def test_bch_depth4_matches_printed_order4_kdv2(kdv2):
    T, V = generating_hamiltonian(kdv2)
    for z in sample_points(kdv2, 20, seed=21):
        got = bch_mh(T, V, z.coords, depth=4)
        want = series_phase(z.coords, kdv2, "KdV2", order=4)
        assert got == pytest.approx(want, rel=1e-9)


def test_bch_depth2_matches_printed_order2_kdv3(kdv3):
    T, V = generating_hamiltonian(kdv3)
    for z in sample_points(kdv3, 50, seed=22):
        got = sum(bch_terms(T, V, z.coords, depth=3)[:2])
        want = series_phase(z.coords, kdv3, "KdV3", order=2)
        assert got == pytest.approx(want, rel=1e-8)


def test_bch_matches_printed_coefficient_differences_mkdv(mkdv):
    """The exponential-family printed series absorbs point-independent
    constants at each grading order, so the comparison is between
    two-point differences of the per-order coefficients."""
    za, zb = (0.25, -0.15), (-0.3, 0.4)
    bch_diff = (bch_grading_coefficients(za, mkdv, depth=3)
                - bch_grading_coefficients(zb, mkdv, depth=3))
    tau = mkdv.tau
    printed_diff = np.zeros(4)
    for k in (1, 2, 3):
        term_a = (series_phase(za, mkdv, "MKdV2", order=k)
                  - (series_phase(za, mkdv, "MKdV2", order=k - 1)
                     if k > 1 else 0.0))
        term_b = (series_phase(zb, mkdv, "MKdV2", order=k)
                  - (series_phase(zb, mkdv, "MKdV2", order=k - 1)
                     if k > 1 else 0.0))
        printed_diff[k] = (term_a - term_b) / tau ** k
    scale = np.max(np.abs(printed_diff))
    assert np.max(np.abs(bch_diff - printed_diff)) < 1e-8 * scale


# ----------------------------------------------------------------------
# printed series in phase variables
# ----------------------------------------------------------------------

def test_phase_series_vanishes_at_zero_grading():
    par = MapParams(family="kdv", period=2, epsilon=2.0, delta=0.0)
    assert series_phase((0.4, -0.3), par, "KdV2") == 0.0


def test_phase_series_mkdv_origin_golden_expression(mkdv):
    # at p = q = 0 every printed bracket collapses to rationals and log 4
    tau = mkdv.tau
    ell = -2.0 * math.log(4.0)
    t1 = tau * 2.0 * ell
    t2 = -tau ** 2 * (ell + 2.0)
    frac = (3.0 * 4.0 + 2.0 * (3.0 + 8.0 + 3.0)) / 16.0
    t3 = tau ** 3 * (2.0 / 3.0) * (frac + ell)
    got = series_phase((0.0, 0.0), mkdv, "MKdV2")
    assert got == pytest.approx(t1 + t2 + t3, rel=1e-14)


def test_phase_series_kdv3_order2_term_is_bracket_product(kdv3):
    z = (0.3, 0.1, -0.2, 0.25)
    e, d = kdv3.epsilon, kdv3.delta
    q1, q2, p1, p2 = z
    fx = (e + p1 - p2, e - p1, e + p2)
    fy = (e + q1 + q2, e - q1, e - q2)
    bracket = ((1.0 / fx[0] - 1.0 / fx[1]) * (1.0 / fy[0] - 1.0 / fy[1])
               - (1.0 / fx[0] - 1.0 / fx[2]) * (1.0 / fy[0] - 1.0 / fy[2]))
    want = -(e * e / 2.0) * bracket * d * d
    got = series_phase(z, kdv3, "KdV3", order=2) \
        - series_phase(z, kdv3, "KdV3", order=1)
    assert got == pytest.approx(want, rel=1e-13)


# ----------------------------------------------------------------------
# printed series in invariants
# ----------------------------------------------------------------------

def test_invariant_series_leading_terms(kdv2, kdv3, mkdv):
    e, d = kdv2.epsilon, kdv2.delta
    P = -0.36
    assert series_invariant((P,), kdv2, "KdV2", order=1) == pytest.approx(
        d * e * math.log(P + e ** 4), rel=1e-14)
    Pm = 13.4
    assert series_invariant((Pm,), mkdv, "MKdV2", order=1) == pytest.approx(
        -2.0 * mkdv.tau * math.log(Pm + 4.0), rel=1e-14)
    assert series_invariant((57.7, 91.8), kdv3, "KdV3") == pytest.approx(
        d * e * math.log(57.7), rel=1e-14)


def test_invariant_series_rejects_log_domain_violation(kdv2):
    with pytest.raises(InvalidStateError):
        series_invariant((-17.0,), kdv2, "KdV2")


def test_invariant_series_exactly_conserved_on_orbit(kdv2):
    ser = invariant_series("KdV2")
    z = PhasePoint((0.2, -0.3))
    step = map_for(kdv2)
    vals = []
    for _ in range(200):
        vals.append(ser(z, kdv2))
        z = step(z, kdv2)
    assert np.ptp(vals) < 1e-12


# ----------------------------------------------------------------------
# phase series vs invariant series, coefficient by coefficient
# ----------------------------------------------------------------------

@pytest.mark.parametrize("tag,coords,top", [
    ("KdV2", (0.2, -0.3), 4),
    ("MKdV2", (0.25, -0.15), 3),
    ("KdV3", (0.2, -0.1, 0.3, 0.15), 2),
])
def test_series_match_coefficients_vanish(tag, coords, top):
    if tag == "MKdV2":
        par = MapParams(family="mkdv", period=2, rho=1.08)
    else:
        par = MapParams(family="kdv", period=int(tag[-1]), epsilon=2.0,
                        delta=0.05)
    res = series_match(PhasePoint(coords), par, tag)
    assert len(res) >= top + 1
    assert np.max(np.abs(res[:top + 1])) < 1e-9


def test_series_match_order2_coefficient_kdv3_tiny(kdv3):
    res = series_match(PhasePoint((0.2, -0.1, 0.3, 0.15)), kdv3, "KdV3")
    assert abs(res[2]) < 1e-10


# ----------------------------------------------------------------------
# defect scaling
# ----------------------------------------------------------------------

def test_defect_halving_shrinks_by_two_to_the_fourth(kdv2):
    ser = bch_series("KdV2", depth=3)
    d1, _ = window_defect(None, ser, PhasePoint((0.2, -0.3)),
                          with_grading(kdv2, "delta", 0.04))
    d2, _ = window_defect(None, ser, PhasePoint((0.2, -0.3)),
                          with_grading(kdv2, "delta", 0.02))
    assert d1 / d2 == pytest.approx(16.0, rel=0.15)


def test_defect_scan_printed_kdv2_slope_five(kdv2):
    table = defect_scan(None, printed_series("KdV2"), PhasePoint((0.2, -0.3)),
                        (0.08, 0.055, 0.04, 0.028, 0.02, 0.014, 0.01), kdv2)
    assert not table.conserved
    assert table.slope == pytest.approx(5.0, abs=0.15)


def test_defect_scan_printed_kdv3_slope_three(kdv3):
    table = defect_scan(None, printed_series("KdV3"),
                        PhasePoint((0.2, -0.1, 0.3, 0.15)),
                        (0.08, 0.055, 0.04, 0.028, 0.02, 0.014, 0.01), kdv3)
    assert not table.conserved
    assert table.slope == pytest.approx(3.0, abs=0.15)


def test_defect_scan_flags_exact_series_conserved(kdv2):
    table = defect_scan(None, invariant_series("KdV2"), PhasePoint((0.2, -0.3)),
                        (0.08, 0.04, 0.02), kdv2)
    assert table.conserved and table.slope is None
    assert max(table.defects) < 1e-12


def test_defect_table_csv_footer(kdv2):
    table = defect_scan(None, printed_series("KdV2"), PhasePoint((0.2, -0.3)),
                        (0.08, 0.04, 0.02), kdv2)
    lines = table.to_csv().strip().split("\n")
    assert lines[0] == "grading,defect"
    assert lines[-1].startswith("fitted_slope,")


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------

def test_tag_and_grading_roundtrip(kdv2, mkdv):
    assert tag_for(kdv2) == "KdV2"
    assert tag_for(mkdv) == "MKdV2"
    par = with_grading(kdv2, "delta", 0.01)
    assert par.delta == 0.01 and par.epsilon == kdv2.epsilon
    parm = with_grading(mkdv, "tau", 0.04)
    assert parm.tau == pytest.approx(0.04, abs=1e-15)
