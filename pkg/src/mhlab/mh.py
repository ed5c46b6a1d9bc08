"""Modified-Hamiltonian construction, closed-form truncations, defects.

Every map in this package composes two shear flows: a potential kick
generated by V(q) followed by a kinetic drift generated by T(p).  Such a
composition interpolates the flow of a modified Hamiltonian H* given by
the Baker-Campbell-Hausdorff series in nested Poisson brackets of T and
V.  The truncation of H* at order K in the grading parameter (the
lattice-parameter product for KdV maps, the parameter-ratio offset for
MKdV maps) is conserved by the map up to a defect of order K+1.

Three views of H* live here, together with the tools that play them
against each other:

* :func:`bch_mh` evaluates the bracket series generically through jet
  arithmetic, with no family-specific algebra;
* :func:`series_phase` and :func:`series_invariant` evaluate the
  closed-form truncated series in phase variables and in invariants;
* :func:`series_match` verifies coefficient-by-coefficient in the
  grading parameter that the two closed forms describe one function;
* :func:`defect_scan` measures conservation defects along orbits and
  fits their scaling order on log-log axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .jets import (
    Jet,
    OrderBudgetError,
    ScalarField,
    bracket_jets,
    jet_seed,
    log,
)
from .maps import (
    InvalidStateError,
    MapParams,
    PhasePoint,
    generating_hamiltonian,
    invariant_kdv_p2,
    invariant_mkdv_p2,
    invariants_kdv_p3,
    map_for,
    mkdv_potential_multivar,
)

__all__ = [
    "MHSeries",
    "DefectTable",
    "bch_mh",
    "bch_terms",
    "bch_grading_coefficients",
    "series_phase",
    "series_invariant",
    "series_match",
    "defect_scan",
    "window_defect",
    "printed_series",
    "bch_series",
    "invariant_series",
    "tag_for",
    "with_grading",
]

#: Deepest nested bracket the series evaluator will combine.  The
#: coefficient table is standard through this depth and each entry is
#: re-validated here by defect scaling, so going deeper would add
#: transcription risk without adding test value.
BCH_MAX_DEPTH = 4

_FAMILY_OF_TAG = {"KdV2": ("kdv", 2), "MKdV2": ("mkdv", 2), "KdV3": ("kdv", 3)}
_GRADING_OF_TAG = {"KdV2": "delta", "MKdV2": "tau", "KdV3": "delta"}
#: Highest grading order retained by the closed-form phase-variable series.
PHASE_ORDERS = {"KdV2": 4, "MKdV2": 3, "KdV3": 2}
#: Grading orders at which the invariant-variable series has terms.
_INVARIANT_TERM_ORDERS = {"KdV2": (1, 3, 5), "MKdV2": (1, 2, 3), "KdV3": (1,)}
#: Order through which the two closed forms can be compared.
MATCH_ORDERS = {"KdV2": 4, "MKdV2": 3, "KdV3": 2}

#: Fixed phase points at which the additive constant between the two
#: closed forms is measured once and then reused (the constant is fixed
#: only up to convention, so only differences across points are tested).
_REFERENCE_POINTS = {
    "KdV2": (0.31, 0.17),
    "MKdV2": (0.27, -0.18),
    "KdV3": (0.16, -0.21, 0.12, 0.23),
}

_ALIGNMENT_CACHE: dict = {}


# ----------------------------------------------------------------------
# family tags and grading bookkeeping
# ----------------------------------------------------------------------

def tag_for(params: MapParams) -> str:
    """Series tag ("KdV2", "MKdV2" or "KdV3") for a parameter set."""
    for tag, (fam, per) in _FAMILY_OF_TAG.items():
        if params.family == fam and params.period == per:
            return tag
    raise InvalidStateError(
        f"no closed-form modified-Hamiltonian series for "
        f"family={params.family!r} period={params.period}")


def _check_tag(params: MapParams, which: str) -> str:
    if which not in _FAMILY_OF_TAG:
        raise InvalidStateError(f"unknown series tag {which!r}; "
                                f"expected one of {sorted(_FAMILY_OF_TAG)}")
    fam, per = _FAMILY_OF_TAG[which]
    if params.family != fam or params.period != per:
        raise InvalidStateError(
            f"series {which} needs family={fam!r} period={per}, got "
            f"family={params.family!r} period={params.period}")
    return which


def with_grading(params: MapParams, grading: str, value: float) -> MapParams:
    """Copy of ``params`` with the grading parameter set to ``value``."""
    if grading == "delta":
        return replace(params, delta=float(value))
    if grading == "tau":
        return replace(params, rho=1.0 + float(value))
    raise InvalidStateError(f"unknown grading {grading!r}")


def _grading_value(params: MapParams, which: str) -> float:
    return params.delta if _GRADING_OF_TAG[which] == "delta" else params.tau


def _coords_of(z) -> tuple:
    if isinstance(z, PhasePoint):
        if z.layout != "canonical":
            raise InvalidStateError(
                "modified-Hamiltonian series expect canonical coordinates")
        return z.coords
    return tuple(float(c) for c in z)


def _require_positive(value, name: str):
    v = value.value if isinstance(value, Jet) else float(value)
    if not v > 0.0:
        raise InvalidStateError(f"log argument {name} = {v:.6g} must be positive")
    return value


# ----------------------------------------------------------------------
# closed-form truncated series, term by term in the grading
# ----------------------------------------------------------------------
# Each helper returns the list of per-order terms [h_1, h_2, ...] where
# h_k already carries its grading^k factor; the grading argument may be
# a float or a jet, which is how coefficient extraction works.

def _phase_terms_kdv2(coords, eps: float, delta):
    q, p = coords
    a = _require_positive(eps * eps - p * p, "eps^2 - p^2")
    b = _require_positive(eps * eps - q * q, "eps^2 - q^2")
    e2 = eps * eps
    t1 = delta * (eps * (log(a) + log(b)))
    t2 = delta ** 2 * (-2.0 * e2 * p * q / (a * b))
    t3 = delta ** 3 * (-2.0 * eps ** 3 * (e2 * p * p + e2 * q * q
                                          + 2.0 * p * p * q * q)
                       / (3.0 * a ** 2 * b ** 2))
    t4 = delta ** 4 * (-4.0 * eps ** 4 * p * q * (e2 + p * p) * (e2 + q * q)
                       / (3.0 * a ** 3 * b ** 3))
    return [t1, t2, t3, t4]


def _phase_terms_mkdv2(coords, tau):
    q, p = coords
    ep, eq = math.exp(p), math.exp(q)
    fp, fq = 1.0 + ep, 1.0 + eq
    ell = p + q - 2.0 * math.log(fp * fq)
    t1 = tau * (2.0 * ell)
    t2 = tau ** 2 * (-(ell + 4.0 * (ep * eq + 1.0) / (fp * fq)))
    frac = (3.0 * (ep * eq * eq + ep * ep * eq + ep + eq)
            + 2.0 * (3.0 * (ep * eq) ** 2 + 8.0 * ep * eq + 3.0)) \
        / (fp * fp * fq * fq)
    t3 = tau ** 3 * ((2.0 / 3.0) * (frac + ell))
    return [t1, t2, t3]


def _phase_terms_kdv3(coords, eps: float, delta):
    q1, q2, p1, p2 = coords
    fx = (_require_positive(eps + p1 - p2, "eps + p1 - p2"),
          _require_positive(eps - p1, "eps - p1"),
          _require_positive(eps + p2, "eps + p2"))
    fy = (_require_positive(eps + q1 + q2, "eps + q1 + q2"),
          _require_positive(eps - q1, "eps - q1"),
          _require_positive(eps - q2, "eps - q2"))
    t1 = delta * (eps * (log(fx[0] * fx[1] * fx[2]) + log(fy[0] * fy[1] * fy[2])))
    bracket = ((1.0 / fx[0] - 1.0 / fx[1]) * (1.0 / fy[0] - 1.0 / fy[1])
               - (1.0 / fx[0] - 1.0 / fx[2]) * (1.0 / fy[0] - 1.0 / fy[2]))
    t2 = delta ** 2 * (-(eps * eps / 2.0) * bracket)
    return [t1, t2]


def _invariant_terms_kdv2(pval, eps: float, delta):
    base = _require_positive(pval + eps ** 4, "P + eps^4")
    t1 = delta * (eps * log(base))
    t3 = delta ** 3 * ((2.0 * eps ** 3 / 3.0) * pval / base ** 2)
    t5 = delta ** 5 * (-(4.0 * eps ** 5 / 15.0) * pval * (pval - 2.0 * eps ** 4)
                       / base ** 4)
    return {1: t1, 3: t3, 5: t5}


def _invariant_terms_mkdv2(pval, tau):
    base = _require_positive(pval + 4.0, "P + 4")
    lg = log(base)
    t1 = tau * (-2.0 * lg)
    t2 = tau ** 2 * (lg - 8.0 / base)
    t3 = tau ** 3 * (-(2.0 / 3.0) * (lg - 4.0 / base - 24.0 / base ** 2))
    return {1: t1, 2: t2, 3: t3}


def _invariant_terms_kdv3(pval, eps: float, delta):
    base = _require_positive(pval, "P1")
    return {1: delta * (eps * log(base))}


def series_phase(z, params: MapParams, which: str, order: int | None = None):
    """Closed-form truncated modified Hamiltonian in phase variables.

    Parameters
    ----------
    z : PhasePoint or sequence
        Canonical coordinates (q's then p's).
    params : MapParams
        Supplies epsilon and the grading value.
    which : {"KdV2", "MKdV2", "KdV3"}
        Which family's series to evaluate.
    order : int, optional
        Truncate after this grading order (defaults to the full
        closed-form order: 4, 3 and 2 respectively).
    """
    _check_tag(params, which)
    coords = _coords_of(z)
    top = PHASE_ORDERS[which]
    k = top if order is None else int(order)
    if not 1 <= k <= top:
        raise InvalidStateError(
            f"{which} phase series holds orders 1..{top}, not {k}")
    terms = _phase_terms(coords, params, which, _grading_value(params, which))
    return sum(terms[:k])


def _phase_terms(coords, params: MapParams, which: str, grading):
    if which == "KdV2":
        if len(coords) != 2:
            raise InvalidStateError("KdV2 series needs one canonical pair")
        return _phase_terms_kdv2(coords, params.epsilon, grading)
    if which == "MKdV2":
        if len(coords) != 2:
            raise InvalidStateError("MKdV2 series needs one canonical pair")
        return _phase_terms_mkdv2(coords, grading)
    if len(coords) != 4:
        raise InvalidStateError("KdV3 series needs two canonical pairs")
    return _phase_terms_kdv3(coords, params.epsilon, grading)


def series_invariant(pvals: Sequence, params: MapParams, which: str,
                     order: int | None = None, grading=None):
    """Closed-form truncated modified Hamiltonian in the invariants.

    ``pvals`` holds the invariant values (one for the period-2 families,
    the first of the two for KdV3); entries and the optional ``grading``
    override may be jets, which is how grading coefficients and the
    vanishing even-order terms are exposed.
    """
    _check_tag(params, which)
    pvals = list(pvals)
    if not pvals:
        raise InvalidStateError("need at least one invariant value")
    g = _grading_value(params, which) if grading is None else grading
    if which == "KdV2":
        terms = _invariant_terms_kdv2(pvals[0], params.epsilon, g)
    elif which == "MKdV2":
        terms = _invariant_terms_mkdv2(pvals[0], g)
    else:
        terms = _invariant_terms_kdv3(pvals[0], params.epsilon, g)
    top = max(terms)
    k = top if order is None else int(order)
    if not 1 <= k <= top:
        raise InvalidStateError(
            f"{which} invariant series holds orders 1..{top}, not {k}")
    return sum(t for o, t in sorted(terms.items()) if o <= k)


def _invariant_values(coords, params: MapParams, which: str, grading=None):
    """Invariant values at a phase point, optionally at a jet grading."""
    if which == "KdV2":
        d = params.delta if grading is None else grading
        return [invariant_kdv_p2(coords[0], coords[1], params.epsilon, d)]
    if which == "MKdV2":
        r = params.rho if grading is None else 1.0 + grading
        return [invariant_mkdv_p2(coords[0], coords[1], r)]
    d = params.delta if grading is None else grading
    q1, q2, p1, p2 = coords
    return list(invariants_kdv_p3(q1, q2, p1, p2, params.epsilon, d))


def _match_difference(coords, params: MapParams, which: str, order: int) -> Jet:
    """Invariant-series minus phase-series as a jet in the grading at 0."""
    d = jet_seed([0.0], order)[0]
    pvals = _invariant_values(coords, params, which, grading=d)
    inv = series_invariant(pvals, params, which, grading=d)
    ph = sum(_phase_terms(coords, params, which, d))
    return inv - ph


def _alignment(params: MapParams, which: str, order: int) -> np.ndarray:
    key = (which, float(params.epsilon) if which.startswith("KdV") else None)
    out = _ALIGNMENT_CACHE.get(key)
    if out is None:
        diff = _match_difference(_REFERENCE_POINTS[which], params, which, order)
        out = np.array([diff.coefficient((k,)) for k in range(order + 1)])
        _ALIGNMENT_CACHE[key] = out
    return out


def series_match(z, params: MapParams, which: str) -> np.ndarray:
    """Grading coefficients of (invariant series − phase series) at ``z``.

    The two closed forms describe the same function of phase space up to
    an additive constant fixed only by convention; that constant (itself
    a series in the grading) is measured once at a fixed reference point
    and subtracted.  The returned coefficients, orders 0 through the
    common truncation order, should all vanish to roundoff for any
    admissible point — that is the whole claim of the closed forms.
    """
    _check_tag(params, which)
    coords = _coords_of(z)
    order = MATCH_ORDERS[which]
    diff = _match_difference(coords, params, which, order)
    raw = np.array([diff.coefficient((k,)) for k in range(order + 1)])
    return raw - _alignment(params, which, order)


# ----------------------------------------------------------------------
# BCH composition through jets
# ----------------------------------------------------------------------

def _as_jet(x, like: Jet) -> Jet:
    if isinstance(x, Jet):
        return x
    return Jet.constant(float(x), like.nvars, like.order, like.base)


def _bch_term_jets(Tj, Vj, npairs: int, depth: int) -> list:
    """Per-depth contributions of the bracket series, as jets.

    Coefficients: depth 1 → T+V, depth 2 → +(1/2){T,V},
    depth 3 → +(1/12)({T,{T,V}} + {V,{V,T}}),
    depth 4 → −(1/24){{{T,V},V},T}.
    """
    if not 1 <= depth <= BCH_MAX_DEPTH:
        raise InvalidStateError(
            f"bracket depth must lie in 1..{BCH_MAX_DEPTH}, got {depth}")
    if not isinstance(Tj, Jet) and not isinstance(Vj, Jet):
        raise InvalidStateError("at least one split part must be a jet")
    Tj = _as_jet(Tj, Vj if isinstance(Vj, Jet) else Tj)
    Vj = _as_jet(Vj, Tj)
    have = min(Tj.order, Vj.order)
    if have < depth + 2:
        raise OrderBudgetError(
            f"depth-{depth} bracket series needs seed order >= {depth + 2}, "
            f"jets carry order {have}")
    terms = [Tj + Vj]
    if depth >= 2:
        b1 = bracket_jets(Tj, Vj, npairs)
        terms.append(0.5 * b1)
    if depth >= 3:
        ttv = bracket_jets(Tj, b1, npairs)
        vvt = bracket_jets(Vj, bracket_jets(Vj, Tj, npairs), npairs)
        terms.append((ttv + vvt) / 12.0)
    if depth >= 4:
        w = bracket_jets(bracket_jets(b1, Vj, npairs), Tj, npairs)
        terms.append(-w / 24.0)
    return terms


def bch_terms(T: ScalarField, V: ScalarField, z, depth: int = 3) -> list:
    """Values of the per-depth bracket-series contributions at ``z``.

    For the KdV families both split parts are exactly linear in the
    grading, so the depth-k entry is exactly the grading-order-k part of
    the modified Hamiltonian; summing the list gives :func:`bch_mh`.
    """
    coords = _coords_of(z)
    if T.arity != len(coords) or V.arity != len(coords):
        raise InvalidStateError(
            f"split parts of arity {T.arity}/{V.arity} cannot take "
            f"{len(coords)} coordinates")
    jets = jet_seed(coords, depth + 2)
    terms = _bch_term_jets(T(jets), V(jets), len(coords) // 2, depth)
    return [float(t.value) for t in terms]


def bch_mh(T: ScalarField, V: ScalarField, z, depth: int = 3) -> float:
    """Modified Hamiltonian of the kick-drift composition of (T, V).

    Evaluates the nested-bracket series through total depth ``depth``
    (at most 4) by seeding jets of order ``depth + 2`` at ``z`` and
    forming Poisson brackets by term-by-term differentiation.  When the
    parts commute (e.g. V = 0) every bracket vanishes and the result is
    exactly T + V.
    """
    return float(sum(bch_terms(T, V, z, depth)))


def bch_grading_coefficients(z, params: MapParams, depth: int = 3) -> np.ndarray:
    """Grading coefficients c_0..c_depth of the depth-``depth`` series.

    For KdV parameter sets the split parts are linear in the grading, so
    each per-depth term is homogeneous and the coefficients follow by
    rescaling.  For MKdV the dependence on the ratio is smooth rather
    than graded, so the split parts are expanded jointly in the phase
    variables and the ratio offset, and the coefficients are read off a
    three-variable jet.
    """
    tag = tag_for(params)
    coords = _coords_of(z)
    if _GRADING_OF_TAG[tag] == "delta":
        g = params.delta
        if g == 0.0:
            return np.zeros(depth + 1)
        T, V = generating_hamiltonian(params)
        vals = bch_terms(T, V, coords, depth)
        return np.array([0.0] + [vals[k - 1] / g ** k
                                 for k in range(1, depth + 1)])
    # joint expansion in (q, p, tau) around tau = 0
    order = max(depth + 2, 2 * depth - 1)
    qj, pj, tj = jet_seed((coords[0], coords[1], 0.0), order)
    rho_j = tj + 1.0
    Tj = mkdv_potential_multivar(pj, rho_j)
    Vj = mkdv_potential_multivar(qj, rho_j)
    total = None
    for t in _bch_term_jets(Tj, Vj, 1, depth):
        total = t if total is None else total + t
    return np.array([total.coefficient((0, 0, k)) for k in range(depth + 1)])


# ----------------------------------------------------------------------
# truncated-series containers and defect scaling
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class MHSeries:
    """A truncated modified Hamiltonian, evaluable at any grading value.

    Parameters
    ----------
    tag : str
        Family/period tag ("KdV2", "MKdV2", "KdV3").
    order : int
        Truncation order K in the grading parameter.
    evaluator : callable
        ``evaluator(coords, params) -> float``; re-derives anything it
        needs from ``params`` so the same series works across a grading
        sweep.
    grading : {"delta", "tau"}
        Which parameter grades the series.
    """

    tag: str
    order: int
    evaluator: Callable
    grading: str

    def __call__(self, z, params: MapParams) -> float:
        return float(self.evaluator(_coords_of(z), params))

    def field(self, params: MapParams) -> ScalarField:
        """The series at fixed parameters, as a plain scalar field."""
        _, per = _FAMILY_OF_TAG[self.tag]
        arity = 2 * (per - 1)
        return ScalarField(arity,
                           lambda args: self.evaluator(tuple(args), params))


def printed_series(which: str, order: int | None = None) -> MHSeries:
    """Closed-form phase-variable series truncated at ``order``."""
    if which not in _FAMILY_OF_TAG:
        raise InvalidStateError(f"unknown series tag {which!r}")
    k = PHASE_ORDERS[which] if order is None else int(order)

    def ev(coords, par):
        return series_phase(coords, par, which, order=k)

    return MHSeries(which, k, ev, _GRADING_OF_TAG[which])


def bch_series(which: str, depth: int = 3) -> MHSeries:
    """Bracket-series modified Hamiltonian truncated at bracket depth."""
    if which not in _FAMILY_OF_TAG:
        raise InvalidStateError(f"unknown series tag {which!r}")

    def ev(coords, par):
        T, V = generating_hamiltonian(par)
        return bch_mh(T, V, coords, depth)

    return MHSeries(which, depth, ev, _GRADING_OF_TAG[which])


def invariant_series(which: str, order: int | None = None) -> MHSeries:
    """Invariant-variable series composed with the invariants.

    Because the invariants are exactly conserved, this evaluator is an
    exact conserved quantity of the map at every truncation order; a
    defect scan flags it "conserved" rather than fitting a slope.
    """
    if which not in _FAMILY_OF_TAG:
        raise InvalidStateError(f"unknown series tag {which!r}")
    k = max(_INVARIANT_TERM_ORDERS[which]) if order is None else int(order)

    def ev(coords, par):
        pvals = _invariant_values(coords, par, which)
        return series_invariant(pvals, par, which, order=k)

    return MHSeries(which, k, ev, _GRADING_OF_TAG[which])


@dataclass(frozen=True)
class DefectTable:
    """Conservation defects of a truncated series across grading values."""

    tag: str
    order: int
    gradings: tuple
    defects: tuple
    slope: float | None
    conserved: bool

    def to_csv(self) -> str:
        lines = ["grading,defect"]
        for g, d in zip(self.gradings, self.defects):
            lines.append(f"{g:.17g},{d:.17g}")
        tail = "conserved" if self.conserved else f"{self.slope:.17g}"
        lines.append(f"fitted_slope,{tail}")
        return "\n".join(lines) + "\n"


def window_defect(map_fn, series: MHSeries, z0, params: MapParams,
                  window: float = 3.0) -> tuple[float, float]:
    """Worst defect max_k |H(z_k) − H(z_0)| over one orbit window.

    The window covers a fixed interval of interpolating-flow time, so
    the number of map steps is ceil(window / grading); returns the
    defect together with |H(z_0)| for scale reference.  ``map_fn`` may
    be None to pick the map matching ``params``.
    """
    g = params.delta if series.grading == "delta" else params.tau
    if g <= 0.0:
        raise InvalidStateError("window defect needs a positive grading")
    z_init = z0 if isinstance(z0, PhasePoint) else PhasePoint(tuple(z0))
    step = map_for(params) if map_fn is None else map_fn
    n = max(4, math.ceil(window / g))
    h0 = series.evaluator(z_init.coords, params)
    z = z_init
    worst = 0.0
    for _ in range(n):
        z = step(z, params)
        worst = max(worst, abs(series.evaluator(z.coords, params) - h0))
    return worst, abs(h0)


def defect_scan(map_fn, series: MHSeries, z0, grading_values,
                params: MapParams, window: float = 3.0) -> DefectTable:
    """Worst conservation defect of ``series`` along orbit windows.

    For each grading value g the map is rebuilt at that value and
    iterated for ceil(window / g) steps — a fixed interval of
    interpolating-flow time, long enough to sweep the level set — and
    the defect is max_k |H_K(z_k) − H_K(z_0)|.  A log-log line is fitted
    through (g, defect); for an order-K truncation its slope is K+1.
    An exactly conserved evaluator is flagged instead of fitted.

    ``map_fn`` may be None, in which case the map is chosen from the
    rebuilt parameters each time.
    """
    gs = [float(g) for g in grading_values]
    if len(gs) < 2:
        raise InvalidStateError("need at least two grading values")
    if any(g <= 0.0 for g in gs) or any(a <= b for a, b in zip(gs, gs[1:])):
        raise InvalidStateError(
            "grading values must be positive and strictly decreasing")
    defects = []
    scale = 1.0
    for g in gs:
        par = with_grading(params, series.grading, g)
        worst, h_scale = window_defect(map_fn, series, z0, par, window)
        scale = max(scale, h_scale)
        defects.append(worst)
    conserved = all(d <= 1e-12 * scale for d in defects)
    slope = None
    if not conserved:
        xs = np.log(gs)
        ys = np.log([max(d, 1e-300) for d in defects])
        slope = float(np.polyfit(xs, ys, 1)[0])
    return DefectTable(series.tag, series.order, tuple(gs), tuple(defects),
                       slope, conserved)
