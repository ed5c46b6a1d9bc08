"""Action-angle quadratures, interpolating flows, and inversion checks.

The invariants of each map generate continuous Hamiltonian flows that
interpolate the discrete dynamics: one map step equals the time-ν flow
of an invariant-built Hamiltonian, where the frequency ν depends on the
invariants alone.  This module evaluates those frequencies as complete
Abelian integrals (closed form up to quadrature, rather than truncated
series), reconstructs modified Hamiltonians by integrating frequencies
over invariant space, drives the interpolating flows with jet-derived
vector fields so that landing on map iterates can be tested to
tolerance, and checks the supporting canonical structure: generating
functions, Jacobi inversion, and conservativity of the frequency field.

Genus-1 integrals run over a phase-variable interval with square-root
endpoint substitutions where turning points are hit; the genus-2
frequencies are integrals of μ^k dμ/√R(μ) between the two zeros of the
one-step transition determinant, with the printed endpoint-at-infinity
form recoverable as the difference of two inverse-substitution tail
integrals (both realizations are exposed so their agreement is a test).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp

from .jets import jet_seed
from .maps import (
    InvalidStateError,
    MapParams,
    PhasePoint,
    invariant_kdv_p2,
    invariant_mkdv_p2,
    map_for,
)
from .spectral import (
    SeparationState,
    _monodromy_from_coords,
    discriminant_from_trace,
    poly_eval,
    separation_coordinates,
    spectral_data,
    synthesize_trace,
)

__all__ = [
    "QuadratureSpec",
    "FrequencyReport",
    "DomainError",
    "BranchPathError",
    "frequency_g1_kdv",
    "mh_g1_kdv",
    "frequency_g1_mkdv",
    "mh_g1_mkdv",
    "frequencies_g2",
    "mh_g2",
    "abel_step_sum",
    "abel_endpoint_integral",
    "interpolating_flow_g1",
    "interpolating_flow_g2",
    "jacobi_inversion_check",
    "generating_function_checks",
    "frequency_sweep_g1",
    "frequency_sweep_g2",
]


class DomainError(ValueError):
    """An integrand left its positivity domain; carries the location."""

    def __init__(self, message: str, location: float | None = None):
        super().__init__(message)
        self.location = location


class BranchPathError(ValueError):
    """The discriminant changes sign on the requested real path."""

    def __init__(self, message: str, location: float | None = None):
        super().__init__(message)
        self.location = location


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and endpoint policy for the Abelian integrals.

    ``endpoint_handling`` selects how endpoint square-root zeros are
    treated: "none" detects them automatically (a substitution is applied
    when an endpoint sits within 1e-6 of a radicand root),
    "sqrt_substitution" forces the substitution at both endpoints, and
    "inverse_substitution" marks specs intended for tails running to
    infinity (the tail integrals always substitute regardless).
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    endpoint_handling: str = "none"

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise InvalidStateError("quadrature tolerances must be positive")
        if self.max_subdivisions < 16:
            raise InvalidStateError("max_subdivisions must be at least 16")
        if self.endpoint_handling not in ("none", "sqrt_substitution",
                                          "inverse_substitution"):
            raise InvalidStateError(
                f"unknown endpoint handling {self.endpoint_handling!r}")


DEFAULT_QUAD = QuadratureSpec()

#: An endpoint counts as sitting on a radicand root within this distance.
_ENDPOINT_ROOT_WINDOW = 1e-6


@dataclass(frozen=True)
class FrequencyReport:
    """Frequencies of the interpolating flow at fixed invariants."""

    genus: int
    nu1: float
    nu2: float | None = None
    lambda_star: float | None = None
    nu1_err: float = 0.0
    nu2_err: float = 0.0

    def __post_init__(self):
        if self.genus not in (1, 2):
            raise InvalidStateError("frequency reports cover genus 1 and 2")
        if self.genus == 2:
            if self.nu2 is None or self.lambda_star is None:
                raise InvalidStateError(
                    "genus-2 reports need nu2 and lambda_star")
            scale = max(abs(self.nu2), 1e-30)
            if abs(self.nu2 - self.lambda_star * self.nu1) > 1e-8 * scale:
                raise InvalidStateError(
                    "inconsistent report: nu2 != lambda_star * nu1")


# ----------------------------------------------------------------------
# square-root quadrature with endpoint substitutions
# ----------------------------------------------------------------------

def _near_root(x: float, roots) -> bool:
    return any(abs(x - r) <= _ENDPOINT_ROOT_WINDOW for r in roots)


def _sqrt_quad(numer: Callable, rad: Callable, a: float, b: float,
               spec: QuadratureSpec, rad_roots=(), what: str = "radicand"):
    """∫_a^b numer(x)/sqrt(rad(x)) dx with endpoint turning-point care.

    The interior of the path is checked for positivity by sampling; the
    offending location is reported on failure.  When an endpoint lies on
    (or within 1e-6 of) a root of the radicand, the integral is split at
    the midpoint and the singular half is mapped by x = endpoint ± s²,
    which removes the inverse-square-root endpoint behavior exactly.
    """
    if a == b:
        return 0.0, 0.0
    lo, hi = (a, b) if a < b else (b, a)
    sign = 1.0 if a < b else -1.0
    for x in np.linspace(lo, hi, 65)[1:-1]:
        if not rad(x) > 0.0:
            raise DomainError(
                f"{what} is not positive at {x:.12g} on the integration path",
                location=float(x))
    force = spec.endpoint_handling == "sqrt_substitution"
    sub_lo = force or _near_root(lo, rad_roots)
    sub_hi = force or _near_root(hi, rad_roots)

    def f(x):
        return numer(x) / math.sqrt(rad(x))

    kw = dict(epsabs=spec.abs_tol, epsrel=spec.rel_tol,
              limit=spec.max_subdivisions)
    mid = 0.5 * (lo + hi)
    total, err = 0.0, 0.0
    if sub_lo:
        width = math.sqrt(mid - lo)
        v, e = quad(lambda s: 2.0 * s * f(lo + s * s), 0.0, width, **kw)
    else:
        v, e = quad(f, lo, mid, **kw)
    total, err = total + v, err + e
    if sub_hi:
        width = math.sqrt(hi - mid)
        v, e = quad(lambda s: 2.0 * s * f(hi - s * s), 0.0, width, **kw)
    else:
        v, e = quad(f, mid, hi, **kw)
    total, err = total + v, err + e
    return sign * total, err


# ----------------------------------------------------------------------
# genus 1: KdV
# ----------------------------------------------------------------------

def _kdv_rad_poly(pval: float, params: MapParams) -> np.ndarray:
    """Ascending coefficients of the phase-interval radicand in q."""
    e2 = params.epsilon ** 2
    w = params.omega
    return np.array([-e2 * pval, 0.0, pval + w * w - e2 * e2, 0.0, e2])


def _check_g1_kdv_domain(pval: float, params: MapParams):
    e4 = params.epsilon ** 4
    if not -e4 < pval < 0.0:
        raise DomainError(
            f"invariant P = {pval:.12g} outside the oscillation interval "
            f"({-e4:.12g}, 0)", location=pval)


def _kdv_qbar0(pval: float, params: MapParams) -> float:
    e = params.epsilon
    return 2.0 * e * e * params.delta * math.sqrt(-pval) / (e ** 4 + pval)


def frequency_g1_kdv(pval: float, params: MapParams,
                     quad_spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """One-step frequency of the period-2 KdV map at invariant value P.

    The angle advance of a single map step, computed as the definite
    integral of dq/(2√rad) from 0 to the one-step image of q = 0, where
    rad(q) = ω²q² − (ε²−q²)(ε²q²+P).  Positive for δ > 0 and zero at
    δ = 0 (the upper limit collapses).
    """
    _check_g1_kdv_domain(pval, params)
    if params.delta == 0.0:
        return 0.0
    upper = _kdv_qbar0(pval, params)
    coeffs = _kdv_rad_poly(pval, params)
    roots = [r.real for r in np.roots(coeffs[::-1]) if abs(r.imag) < 1e-12]
    val, _ = _sqrt_quad(lambda q: 0.5, lambda q: poly_eval(coeffs, q),
                        0.0, upper, quad_spec, rad_roots=roots,
                        what="KdV oscillation radicand")
    return val


def _angle_g1_kdv(q_from: float, q_to: float, pval: float, params: MapParams,
                  quad_spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Angle integral ∫ dq/(2√rad) between two phase positions."""
    coeffs = _kdv_rad_poly(pval, params)
    roots = [r.real for r in np.roots(coeffs[::-1]) if abs(r.imag) < 1e-12]
    val, _ = _sqrt_quad(lambda q: 0.5, lambda q: poly_eval(coeffs, q),
                        q_from, q_to, quad_spec, rad_roots=roots,
                        what="KdV oscillation radicand")
    return val


_GL_NODES = {n: np.polynomial.legendre.leggauss(n) for n in (32,)}


def _smooth_quad(fn, a: float, b: float, panels: int = 4) -> float:
    """Composite Gauss-Legendre integral of a smooth scalar function.

    The outer integrals over the invariant feed on inner quadrature
    values whose noise floor sits near machine precision; an adaptive
    rule would chase that noise, so a fixed high-order rule is used
    instead (the integrands are analytic on admissible intervals).
    """
    edges = np.linspace(a, b, panels + 1)
    xs, ws = _GL_NODES[32]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        total += half * sum(w * fn(mid + half * x) for x, w in zip(xs, ws))
    return total


def mh_g1_kdv(p_a: float, p_b: float, params: MapParams,
              quad_spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Modified-Hamiltonian difference H*(P_b) − H*(P_a), period-2 KdV.

    The closed form is the indefinite integral of the frequency over the
    invariant, so only differences are well defined; they are computed
    by integrating the frequency between the two invariant values.
    """
    _check_g1_kdv_domain(p_a, params)
    _check_g1_kdv_domain(p_b, params)
    if p_a == p_b:
        return 0.0
    return _smooth_quad(lambda p: frequency_g1_kdv(p, params, quad_spec),
                        p_a, p_b)


# ----------------------------------------------------------------------
# genus 1: MKdV
# ----------------------------------------------------------------------

def _mkdv_rad_const(pval: float, params: MapParams) -> float:
    return 2.0 * params.rho ** 2 + pval + 2.0


def _mkdv_rad_factor(q: float, pval: float, params: MapParams) -> float:
    r = params.rho
    return pval - 2.0 * r * r - 2.0 - 4.0 * r * (math.exp(q) + math.exp(-q))


def _check_g1_mkdv_domain(pval: float, params: MapParams):
    r = params.rho
    bound = 2.0 * r * r + 8.0 * r + 2.0
    if not pval > bound:
        raise DomainError(
            f"invariant P = {pval:.12g} must exceed {bound:.12g} for a real "
            f"oscillation interval", location=pval)


def _mkdv_qbar0(pval: float, params: MapParams) -> float:
    r = params.rho
    disc = (2.0 * r * r + pval + 2.0) * (pval - 2.0 * r * r - 8.0 * r - 2.0)
    delta_sep = (pval - 4.0 * r - math.sqrt(disc)) / (2.0 * (1.0 + r) ** 2)
    num, den = r + delta_sep, 1.0 + r * delta_sep
    if not (num > 0.0 and den > 0.0):
        raise DomainError(
            f"one-step image logarithm undefined: rho+Delta = {num:.6g}, "
            f"1+rho*Delta = {den:.6g}")
    return 2.0 * math.log(num / den)


def frequency_g1_mkdv(pval: float, params: MapParams,
                      quad_spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Signed one-step frequency of the period-2 MKdV map at invariant P.

    Magnitude: the integral of dq/√((2ρ²+P+2)(P−2ρ²−4ρe^q−4ρe^{−q}−2))
    from 0 to the one-step image of q = 0.  Sign: the map advances
    *against* the orientation of its invariant's Hamiltonian flow, so
    the signed frequency (the flow duration reproducing one map step,
    and the derivative dH*/dP of the modified Hamiltonian) is the
    negative of that oriented integral — negative for ρ > 1, positive
    for ρ < 1, zero at ρ = 1 where the map is the identity.
    """
    if params.rho == 1.0:
        return 0.0
    _check_g1_mkdv_domain(pval, params)
    upper = _mkdv_qbar0(pval, params)
    c1 = _mkdv_rad_const(pval, params)
    # turning points: 2 cosh q = (P − 2ρ² − 2) / (4ρ)
    arg = (pval - 2.0 * params.rho ** 2 - 2.0) / (8.0 * params.rho)
    roots = [math.acosh(arg), -math.acosh(arg)] if arg >= 1.0 else []
    val, _ = _sqrt_quad(lambda q: 1.0,
                        lambda q: c1 * _mkdv_rad_factor(q, pval, params),
                        0.0, upper, quad_spec, rad_roots=roots,
                        what="MKdV oscillation radicand")
    return -val


def mh_g1_mkdv(p_a: float, p_b: float, params: MapParams,
               quad_spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Modified-Hamiltonian difference H*(P_b) − H*(P_a), period-2 MKdV."""
    _check_g1_mkdv_domain(p_a, params)
    _check_g1_mkdv_domain(p_b, params)
    if p_a == p_b:
        return 0.0
    return _smooth_quad(lambda p: frequency_g1_mkdv(p, params, quad_spec),
                        p_a, p_b)


# ----------------------------------------------------------------------
# genus 2: frequencies between the transition-determinant zeros
# ----------------------------------------------------------------------

def _require_g2(params: MapParams):
    if params.family != "kdv" or params.period != 3:
        raise InvalidStateError(
            "genus-2 frequencies are defined for the period-3 KdV map")


def _g2_discriminant(p1: float, p2: float, params: MapParams) -> np.ndarray:
    """Degree-5 discriminant coefficients from trace-coefficient invariants."""
    tr = synthesize_trace(2, np.array([p1, p2]), params)
    return discriminant_from_trace(tr, 2, params.omega)


def _check_positive_on(rpoly, lo: float, hi: float, what: str):
    xs = np.linspace(lo, hi, 129)
    vals = np.polyval(rpoly[::-1], xs)
    if np.all(vals > 0.0):
        return
    bad = int(np.argmax(vals <= 0.0))
    x0 = xs[max(bad - 1, 0)]
    x1 = xs[bad]
    # bisect to the sign change for the report
    for _ in range(60):
        xm = 0.5 * (x0 + x1)
        if np.polyval(rpoly[::-1], xm) > 0.0:
            x0 = xm
        else:
            x1 = xm
    raise BranchPathError(
        f"{what} changes sign near {x1:.12g} on the real path",
        location=float(x1))


def frequencies_g2(p1: float, p2: float, params: MapParams,
                   quad_spec: QuadratureSpec = DEFAULT_QUAD) -> FrequencyReport:
    """One-step frequencies (ν₁, ν₂) of the period-3 KdV map.

    ``p1`` and ``p2`` are the conserved low coefficients (λ⁰ and λ¹) of
    the monodromy trace — the coordinates on invariant space in which
    (ν₁, ν₂) is the exact gradient of the modified Hamiltonian.  They
    are read off a phase point with ``spectral_data(z, params)`` and are
    an affine transform (``raw_from_printed``) of the closed-form
    invariant values.

    Both frequencies are Abelian integrals of μ^k dμ/√R(μ), k = 0 and
    1, between the two zeros (0 and ω) of the one-step transition
    determinant, taken on the positive branch of √R along the real
    segment.  Their ratio is the distinguished spectral value λ* at
    which the trace-generated flow advances both angles in one map
    step.
    """
    _require_g2(params)
    w = params.omega
    if w == 0.0:
        return FrequencyReport(2, 0.0, 0.0, 0.0)
    rpoly = _g2_discriminant(p1, p2, params)
    lo, hi = (0.0, w) if w > 0.0 else (w, 0.0)
    _check_positive_on(rpoly, lo, hi, "discriminant")
    roots = [r.real for r in np.roots(rpoly[::-1]) if abs(r.imag) < 1e-10]
    rad = lambda u: poly_eval(rpoly, u)
    nu1, e1 = _sqrt_quad(lambda u: 1.0, rad, 0.0, w, quad_spec,
                         rad_roots=roots, what="discriminant")
    nu2, e2 = _sqrt_quad(lambda u: u, rad, 0.0, w, quad_spec,
                         rad_roots=roots, what="discriminant")
    return FrequencyReport(2, nu1, nu2, nu2 / nu1, e1, e2)


def abel_endpoint_integral(k: int, p1: float, p2: float, params: MapParams,
                           quad_spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """The frequency ν_{k+1} realized through integrals with ∞ endpoints.

    Evaluates ∫_0^∞ μ^k dμ/√R − ∫_ω^∞ μ^k dμ/√R, each tail mapped by the
    inverse substitution μ = e + 1/u² (the integrands decay as μ^{k−5/2},
    so the substituted integrands are bounded).  Agreement with
    :func:`frequencies_g2` ties the endpoint-at-infinity form of the
    frequencies to the direct between-the-zeros form.  ``p1``/``p2`` are
    trace-coefficient invariants as in :func:`frequencies_g2`.
    """
    _require_g2(params)
    if k not in (0, 1):
        raise InvalidStateError("only the k = 0 and k = 1 differentials exist")
    w = params.omega
    if w == 0.0:
        return 0.0
    rpoly = _g2_discriminant(p1, p2, params)
    roots = [r.real for r in np.roots(rpoly[::-1]) if abs(r.imag) < 1e-10]
    top = max([r for r in roots] + [0.0, w])
    _check_positive_on(rpoly, min(0.0, w), max(top + 1.0, 10.0),
                       "discriminant")

    def f(u):
        return u ** k / math.sqrt(poly_eval(rpoly, u))

    kw = dict(epsabs=quad_spec.abs_tol, epsrel=quad_spec.rel_tol,
              limit=quad_spec.max_subdivisions)

    def tail_from(e0: float) -> float:
        head, _ = quad(f, e0, e0 + 1.0, **kw)
        # mu = e0 + 1/u^2, du measure 2/u^3; bounded integrand as u -> 0
        tail, _ = quad(lambda u: 2.0 * f(e0 + u ** -2) * u ** -3, 0.0, 1.0,
                       **kw)
        return head + tail

    lo, hi = (0.0, w) if w > 0.0 else (w, 0.0)
    return (tail_from(lo) - tail_from(hi)) * (1.0 if w > 0.0 else -1.0)


def _mu_path_integral(mu_a: float, kap_a: float, mu_b: float, kap_b: float,
                      rpoly: np.ndarray, k: int,
                      quad_spec: QuadratureSpec) -> float:
    """∫ μ^k dμ/√R along the real curve path from (μ_a,κ_a) to (μ_b,κ_b).

    With equal sheet signs the path stays inside one band; a sign flip
    means the trajectory touched a band edge (a root of R) and came
    back, so the integral splits there with square-root substitutions.
    """
    numer = (lambda u: 1.0) if k == 0 else (lambda u: u ** k)
    rad = lambda u: poly_eval(rpoly, u)
    roots = [r.real for r in np.roots(rpoly[::-1]) if abs(r.imag) < 1e-10]
    if kap_a == kap_b:
        val, _ = _sqrt_quad(numer, rad, mu_a, mu_b, quad_spec,
                            rad_roots=roots, what="discriminant")
        return kap_a * val
    hi_side = [r for r in roots if r >= max(mu_a, mu_b) - 1e-12]
    lo_side = [r for r in roots if r <= min(mu_a, mu_b) + 1e-12]
    cand = []
    if hi_side:
        cand.append(min(hi_side))
    if lo_side:
        cand.append(max(lo_side))
    if not cand:
        raise DomainError(
            f"sheet flip between {mu_a:.9g} and {mu_b:.9g} with no adjacent "
            f"band edge")
    edge = min(cand, key=lambda r: abs(r - 0.5 * (mu_a + mu_b)))
    v1, _ = _sqrt_quad(numer, rad, mu_a, edge, quad_spec, rad_roots=roots,
                       what="discriminant")
    v2, _ = _sqrt_quad(numer, rad, edge, mu_b, quad_spec, rad_roots=roots,
                       what="discriminant")
    return kap_a * v1 + kap_b * v2


def abel_step_sum(z: PhasePoint, params: MapParams,
                  quad_spec: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """One-step sums Σ_j ∫_{μ_j}^{μ̄_j} μ^k dμ/√R for k = 0, 1.

    The auxiliary spectrum is taken at ``z`` and at its map image; each
    root contributes on its own sheet of √R (the sign the separation
    data assigns).  By the curve's addition structure the sums equal the
    between-the-zeros frequency integrals, independent of the point.
    """
    _require_g2(params)
    data = spectral_data(z, params)
    rpoly = np.array(data.R_coeffs)
    sep_a = separation_coordinates(z, params)
    sep_b = separation_coordinates(map_for(params)(z, params), params)
    out = np.zeros(2)
    for k in (0, 1):
        tot = 0.0
        for j in range(2):
            tot += _mu_path_integral(sep_a.mu[j], sep_a.kappa[j],
                                     sep_b.mu[j], sep_b.kappa[j],
                                     rpoly, k, quad_spec)
        out[k] = tot
    return out


def mh_g2(path: Sequence, params: MapParams,
          quad_spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Line integral ∫ (ν₁ dP₁ + ν₂ dP₂) along a polyline of invariants.

    The genus-2 modified Hamiltonian is reconstructed from its gradient
    (the frequency field), so only differences along paths are defined;
    conservativity of the field makes the value path-independent, which
    is itself a testable property (closed loops integrate to zero).
    Path vertices are (P₁, P₂) in trace-coefficient coordinates, the
    chart in which the frequency field is conservative (see
    :func:`frequencies_g2`).
    """
    _require_g2(params)
    pts = [np.asarray(p, dtype=float) for p in path]
    if len(pts) < 2 or any(p.shape != (2,) for p in pts):
        raise InvalidStateError("path must hold at least two (P1, P2) points")
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        dp = b - a

        def integrand(s):
            rep = frequencies_g2(a[0] + s * dp[0], a[1] + s * dp[1],
                                 params, quad_spec)
            return rep.nu1 * dp[0] + rep.nu2 * dp[1]

        total += _smooth_quad(integrand, 0.0, 1.0)
    return total


# ----------------------------------------------------------------------
# interpolating flows (jet-derived vector fields)
# ----------------------------------------------------------------------

def _g1_hamiltonian(params: MapParams):
    if params.family == "kdv" and params.period == 2:
        return lambda qj, pj: invariant_kdv_p2(qj, pj, params.epsilon,
                                               params.delta)
    if params.family == "mkdv" and params.period == 2:
        return lambda qj, pj: invariant_mkdv_p2(qj, pj, params.rho)
    raise InvalidStateError(
        "one-degree-of-freedom interpolating flow needs a period-2 map")


def _flow(rhs, y0: tuple, duration: float, ode_tol: float) -> np.ndarray:
    sol = solve_ivp(rhs, (0.0, duration), y0, method="DOP853",
                    rtol=ode_tol, atol=ode_tol * 1e-2)
    if not sol.success:
        raise InvalidStateError(f"interpolating flow failed: {sol.message}")
    return sol.y[:, -1]


def interpolating_flow_g1(z: PhasePoint, params: MapParams, duration: float,
                          ode_tol: float = 1e-11) -> PhasePoint:
    """Hamiltonian flow of the invariant for the given duration.

    The vector field q̇ = ∂I/∂p, ṗ = −∂I/∂q is read off first-order
    jets of the invariant at each step, so no derivative formulas enter
    by hand.  Flowing for one frequency ν(P) reproduces one map step.
    """
    ham = _g1_hamiltonian(params)
    if duration == 0.0:
        return z

    def rhs(_t, y):
        qj, pj = jet_seed(y, 1)
        grad = ham(qj, pj).first_partials()
        return [grad[1], -grad[0]]

    out = _flow(rhs, tuple(z.coords), duration, ode_tol)
    return PhasePoint(tuple(out))


def interpolating_flow_g2(z: PhasePoint, params: MapParams,
                          lambda_star: float, duration: float,
                          ode_tol: float = 1e-11) -> PhasePoint:
    """Canonical flow of the trace of the monodromy at λ = λ*.

    H(z) = tr T(λ*; z) generates a flow conserving both invariants; at
    the distinguished λ* (ratio of the two frequencies) flowing for the
    first frequency ν₁ advances both angle variables by exactly one map
    step.  Gradients are read off first-order jets of the monodromy
    trace.
    """
    _require_g2(params)
    if duration == 0.0:
        return z

    def rhs(_t, y):
        jets = jet_seed(y, 1)
        tr = _monodromy_from_coords(tuple(jets), params).trace()
        grad = poly_eval(tr, lambda_star).first_partials()
        return [grad[2], grad[3], -grad[0], -grad[1]]

    out = _flow(rhs, tuple(z.coords), duration, ode_tol)
    return PhasePoint(tuple(out))


def jacobi_inversion_check(z: PhasePoint, params: MapParams,
                           lambda_star: float, t: float,
                           n_checkpoints: int = 5,
                           ode_tol: float = 1e-11,
                           quad_spec: QuadratureSpec = DEFAULT_QUAD) -> dict:
    """Residuals of the inversion identities λ*^k·t = Σ_j ∫ μ^k dμ/√R.

    The trace-generated flow is integrated to a set of checkpoint times;
    at each checkpoint the auxiliary spectrum is extracted and the curve
    integrals are quadratured along the numerically observed μ paths
    (sheet signs from the separation data).  Returned are the worst
    absolute residuals for the two differentials over all checkpoints.
    """
    _require_g2(params)
    data = spectral_data(z, params)
    rpoly = np.array(data.R_coeffs)
    times = np.linspace(0.0, t, n_checkpoints + 1)
    seps = [separation_coordinates(z, params)]
    for t_next in times[1:]:
        zt = interpolating_flow_g2(z, params, lambda_star, float(t_next),
                                   ode_tol)
        seps.append(separation_coordinates(zt, params))
    res = {"k0": 0.0, "k1": 0.0}
    for k in (0, 1):
        acc = 0.0
        for i in range(len(times) - 1):
            a, b = seps[i], seps[i + 1]
            for j in range(2):
                acc += _mu_path_integral(a.mu[j], a.kappa[j], b.mu[j],
                                         b.kappa[j], rpoly, k, quad_spec)
            target = lambda_star ** k * (times[i + 1] - times[0])
            res[f"k{k}"] = max(res[f"k{k}"], abs(acc - target))
    return res


# ----------------------------------------------------------------------
# generating-function checks
# ----------------------------------------------------------------------

def _trace_poly_g1(z: PhasePoint, params: MapParams) -> np.ndarray:
    data = spectral_data(z, params)
    return synthesize_trace(1, np.array(data.invariants), params)


def generating_function_checks(z: PhasePoint, params: MapParams) -> dict:
    """Residuals of the defining relations of the generating functions.

    For period-2 KdV points: the separating canonical pair (μ, ν_sep)
    has generating function F(q, μ) = (ω−μ)log(ε+q) + μ log(ε−q) − εq
    with p = ∂F/∂q and ν_sep = −∂F/∂μ; the action generating function S
    has p = ∂S/∂q (the integrand of S at the endpoint); and the
    angle-side generating function G has ∂G/∂μ = arccosh(tr T(μ) /
    (2√det T(μ))) matching |ν_sep|.  For period-3 points the same
    ∂G/∂μ_j relation is checked at both roots of the auxiliary
    spectrum.  All derivatives of F are taken through jets.
    """
    if params.family != "kdv":
        raise InvalidStateError(
            "generating-function checks cover the KdV family")
    sep = separation_coordinates(z, params)
    out = {}
    if params.period == 2:
        q, p = z.coords
        e, w = params.epsilon, params.omega
        mu, nu = sep.mu[0], sep.nu[0]
        qj, muj = jet_seed((q, mu), 1)
        f_jet = (w - muj) * _safe_log(e + qj) + muj * _safe_log(e - qj) \
            - e * qj
        grads = f_jet.first_partials()
        out["dF_dq"] = abs(grads[0] - p)
        out["dF_dmu"] = abs(-grads[1] - nu)
        # S integrand at the endpoint is the exact upper-limit derivative
        pval = invariant_kdv_p2(q, p, e, params.delta)
        rad = poly_eval(_kdv_rad_poly(pval, params), q)
        if rad < 0.0:
            raise DomainError(
                f"oscillation radicand negative at q = {q:.9g}", location=q)
        branch = math.copysign(1.0, p * (q * q - e * e) - w * q)
        ds_dq = (w * q + branch * math.sqrt(rad)) / (q * q - e * e)
        out["dS_dq"] = abs(ds_dq - p)
        out["dG_dmu"] = abs(_dg_dmu(mu, _trace_poly_g1(z, params), 1,
                                    params.omega) - abs(nu))
        return out
    if params.period == 3:
        data = spectral_data(z, params)
        tr = synthesize_trace(2, np.array(data.invariants), params)
        for j in range(2):
            out[f"dG_dmu_{j + 1}"] = abs(
                _dg_dmu(sep.mu[j], tr, 2, params.omega) - abs(sep.nu[j]))
        return out
    raise InvalidStateError("generating-function checks cover periods 2 and 3")


def _safe_log(x):
    from .jets import log as jl
    v = x.value if hasattr(x, "value") else x
    if not v > 0.0:
        raise DomainError(f"log argument {v:.9g} must be positive")
    return jl(x)


def _dg_dmu(mu: float, tr_coeffs, genus: int, omega: float) -> float:
    """∂G/∂μ = arccosh(tr T(μ) / (2 √det T(μ))) on the auxiliary spectrum."""
    trv = poly_eval(list(tr_coeffs), mu)
    det = (mu * (mu - omega)) ** (genus + 1)
    if det <= 0.0:
        raise DomainError(
            f"det T nonpositive at mu = {mu:.9g}; between the determinant "
            f"zeros the arccosh form does not apply", location=mu)
    x = abs(trv) / (2.0 * math.sqrt(det))
    if x < 1.0:
        raise DomainError(
            f"trace ratio {x:.12g} below 1 at mu = {mu:.9g}", location=mu)
    return math.acosh(x)


# ----------------------------------------------------------------------
# sweep helpers for reporting
# ----------------------------------------------------------------------

def frequency_sweep_g1(pvals: Sequence[float], params: MapParams,
                       quad_spec: QuadratureSpec = DEFAULT_QUAD) -> list:
    """Frequency table over invariant values (one row per value)."""
    rows = []
    freq = frequency_g1_kdv if params.family == "kdv" else frequency_g1_mkdv
    for pv in pvals:
        rows.append({"P": float(pv), "nu": freq(float(pv), params, quad_spec),
                     "err_est": quad_spec.abs_tol})
    return rows


def frequency_sweep_g2(points: Sequence, params: MapParams,
                       quad_spec: QuadratureSpec = DEFAULT_QUAD) -> list:
    """Frequency table over (P1, P2) pairs (one row per pair)."""
    rows = []
    for p1, p2 in points:
        rep = frequencies_g2(float(p1), float(p2), params, quad_spec)
        rows.append({"P1": float(p1), "P2": float(p2), "nu1": rep.nu1,
                     "nu2": rep.nu2, "lambda_star": rep.lambda_star,
                     "err_est": max(rep.nu1_err, rep.nu2_err)})
    return rows
