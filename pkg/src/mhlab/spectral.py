"""Lax and monodromy machinery for the staircase lattice maps.

Builds 2x2 polynomial Lax matrices per chain site, glues them into a
monodromy matrix, extracts conserved trace coefficients, Casimirs and
the spectral-curve discriminant, computes separation variables
(auxiliary spectrum mu_j with conjugate nu_j and sheet signs kappa_j),
and provides machine-precision residual checks: Zakharov-Shabat
compatibility, the non-ultralocal entry bracket relations, canonicity of
the separation variables, and the discrete Dubrovin difference
equations.

All polynomial arithmetic is done on ascending coefficient sequences and
is polymorphic in the coefficient type, so the same code paths run on
floats (orbits, residuals) and on jets (Poisson brackets, canonicity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .jets import Jet, bracket_jets, jet_seed, log, sqrt
from .maps import (
    InvalidStateError,
    MapParams,
    PhasePoint,
    invariant_kdv_p2,
    invariants_kdv_p3,
    kdv_map_generalP,
    map_for,
    mkdv_map_generalP,
)

__all__ = [
    "PolyMat2",
    "SpectralData",
    "SeparationState",
    "NonSeparableError",
    "DegenerateStepError",
    "lax_L",
    "lax_M",
    "build_monodromy",
    "spectral_data",
    "zs_residual",
    "separation_coordinates",
    "canonicity_check",
    "entry_bracket_check",
    "dubrovin_residual_discrete",
    "poly_add",
    "poly_sub",
    "poly_mul",
    "poly_eval",
    "synthesize_trace",
    "discriminant_from_trace",
    "raw_trace_coeffs",
    "printed_from_raw",
    "raw_from_printed",
    "mu_initial_slice_g2",
    "separation_closed_form_g1",
]


class NonSeparableError(RuntimeError):
    """Auxiliary spectrum is not real and simple at this point."""


class DegenerateStepError(RuntimeError):
    """A difference-equation denominator degenerates at this orbit step."""


# ----------------------------------------------------------------------
# polynomial helpers (ascending coefficients, float- or jet-valued)
# ----------------------------------------------------------------------

def poly_add(a, b):
    """Coefficientwise sum of two ascending coefficient sequences."""
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0.0) + (b[i] if i < len(b) else 0.0)
            for i in range(n)]


def poly_sub(a, b):
    """Coefficientwise difference of two ascending coefficient sequences."""
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0.0) - (b[i] if i < len(b) else 0.0)
            for i in range(n)]


def poly_mul(a, b):
    """Cauchy product of two ascending coefficient sequences."""
    out = [0.0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return out


def poly_eval(coeffs, lam):
    """Horner evaluation; both arguments may be float- or jet-valued."""
    result = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        result = result * lam + c
    return result


def _poly_scale(a, s):
    return [s * ai for ai in a]


@dataclass(frozen=True)
class PolyMat2:
    """2x2 matrix with polynomial entries in the spectral parameter.

    Entries are ascending coefficient tuples; ``a``/``b``/``c``/``d``
    are the (1,1), (1,2), (2,1), (2,2) entries.  The monodromy of a
    genus-g chain obeys the grading: ``a`` monic of degree g+1, ``b`` of
    degree g, ``c`` divisible by the spectral parameter, ``d`` equal to
    the spectral parameter times a monic polynomial of degree g.
    """

    a: tuple
    b: tuple
    c: tuple
    d: tuple

    def __matmul__(self, other: "PolyMat2") -> "PolyMat2":
        return PolyMat2(
            tuple(poly_add(poly_mul(self.a, other.a), poly_mul(self.b, other.c))),
            tuple(poly_add(poly_mul(self.a, other.b), poly_mul(self.b, other.d))),
            tuple(poly_add(poly_mul(self.c, other.a), poly_mul(self.d, other.c))),
            tuple(poly_add(poly_mul(self.c, other.b), poly_mul(self.d, other.d))),
        )

    def trace(self):
        return poly_add(self.a, self.d)

    def det(self):
        return poly_sub(poly_mul(self.a, self.d), poly_mul(self.b, self.c))

    def eval(self, lam):
        """Entries evaluated at a spectral value; returns a nested list."""
        return [[poly_eval(self.a, lam), poly_eval(self.b, lam)],
                [poly_eval(self.c, lam), poly_eval(self.d, lam)]]

    def grading_residual(self, genus: int, omega: float) -> float:
        """Max violation of the degree/monicity/determinant structure."""
        g = genus
        res = 0.0
        res = max(res, abs(len(self.a) - (g + 2)), abs(self.a[-1] - 1.0))
        if len(self.b) > g + 1:
            res = max(res, max(abs(v) for v in self.b[g + 1:]))
        res = max(res, abs(self.c[0]))
        res = max(res, abs(self.d[0]), abs(len(self.d) - (g + 2)),
                  abs(self.d[-1] - 1.0))
        target = poly_mul([0.0] * (g + 1) + [1.0],
                          _binomial_power([-omega, 1.0], g + 1))
        diff = poly_sub(self.det(), target)
        # cancellation in a·d − b·c is measured against operand magnitude
        scale = max(1.0, max(abs(t) for t in target),
                    max(abs(v) for v in poly_mul(self.a, self.d)))
        res = max(res, max(abs(v) for v in diff) / scale)
        return float(res)


def _binomial_power(lin, n):
    out = [1.0]
    for _ in range(n):
        out = poly_mul(out, lin)
    return out


# ----------------------------------------------------------------------
# Lax factors and monodromy
# ----------------------------------------------------------------------

def lax_L(x, y, lambda_unused=None, params: MapParams | None = None):
    """Single-site Lax factor [[λ + x·y − ω, y], [λ·x, λ]].

    Coefficientwise identical to the product of the two elementary
    translation factors [[y, 1], [λ, 0]]·[[x, 1], [λ−ω, 0]]; its
    determinant is λ(λ−ω) exactly.  ``lambda_unused`` is accepted for
    signature uniformity with evaluated-matrix callers and ignored.
    """
    if params is None:
        raise InvalidStateError("lax_L needs params to supply omega")
    w = params.omega
    return PolyMat2((x * y - w, 1.0), (y,), (0.0, x), (0.0, 1.0))


def lax_L_product_form(x, y, params: MapParams) -> PolyMat2:
    """The same site factor assembled from its two elementary factors."""
    w = params.omega
    left = PolyMat2((y,), (1.0,), (0.0, 1.0), (0.0,))
    right = PolyMat2((x,), (1.0,), (-w, 1.0), (0.0,))
    return left @ right


def lax_M(x, y, xbar, params: MapParams) -> PolyMat2:
    """Intertwining factor of the Zakharov-Shabat pair at one site.

    Product of [[−ω/x̄, 1], [λ, −x̄]] and [[x − ω/y, 1], [λ, 0]]; its
    determinant is λ(λ−ω) exactly, like the site factor itself.
    """
    w = params.omega
    left = PolyMat2((-w / xbar,), (1.0,), (0.0, 1.0), (-xbar,))
    right = PolyMat2((x - w / y,), (1.0,), (0.0, 1.0), (0.0,))
    return left @ right


def _xy_from_coords(coords, params: MapParams):
    """Zero-sum staircase variables (X_1..X_P, Y_0..Y_{P-1}) from coords.

    Polymorphic in the coordinate type; canonical layouts are embedded
    through the documented identifications, reduced layouts pass through.
    """
    P = params.period
    if len(coords) == 2 * P:
        return list(coords[:P]), list(coords[P:])
    if P == 2 and len(coords) == 2:
        q, p = coords
        return [p, -p], [-q, q]
    if P == 3 and len(coords) == 4:
        q1, q2, p1, p2 = coords
        return [p1, p2 - p1, -p2], [-q1 - q2, q1, q2]
    raise InvalidStateError(
        f"cannot infer staircase variables from {len(coords)} coordinates "
        f"at period {P}")


def _chain_sites(coords, params: MapParams):
    """Per-site (x_j, y_j) pairs j = 1..P feeding the Lax factors.

    The product base (first site) is a genuine convention: rotating it
    leaves the trace, determinant and compatibility residuals unchanged
    but moves the auxiliary spectrum.  The four-coordinate layout of the
    three-site chain starts at the site carrying the summed variables,
    which is the base that reproduces the closed-form auxiliary-spectrum
    expressions; all other layouts start at site 1.
    """
    xs, ys = _xy_from_coords(coords, params)
    P = params.period
    e = params.epsilon
    if params.family == "kdv":
        sites = [(e - xs[j], e - ys[(j + 1) % P]) for j in range(P)]
    else:
        sites = [(_jet_exp(xs[j]), _jet_exp(ys[(j + 1) % P])) for j in range(P)]
    if P == 3 and len(coords) == 4:
        sites = sites[2:] + sites[:2]
    return sites


def _jet_exp(v):
    from .jets import exp as jexp
    return jexp(v)


def lax_L_mkdv(x, y, rho: float) -> PolyMat2:
    """Single-site Lax factor of the exponential-family chain.

    Product of [[1, y], [λ, y]] and [[ρ, x], [λ, ρx]] where x, y are the
    exponentiated staircase variables and λ stands for the squared
    spectral wavenumber.
    """
    left = PolyMat2((1.0,), (y,), (0.0, 1.0), (y,))
    right = PolyMat2((rho,), (x,), (0.0, 1.0), (rho * x,))
    return left @ right


def _monodromy_from_coords(coords, params: MapParams) -> PolyMat2:
    sites = _chain_sites(coords, params)
    if params.family == "kdv":
        mats = [lax_L(x, y, None, params) for x, y in sites]
    else:
        mats = [lax_L_mkdv(x, y, params.rho) for x, y in sites]
    T = mats[-1]
    for m in reversed(mats[:-1]):
        T = T @ m
    return T


def build_monodromy(z: PhasePoint, params: MapParams) -> PolyMat2:
    """Ordered (right-to-left) product of site factors over one period."""
    return _monodromy_from_coords(z.coords, params)


def genus_of(params: MapParams) -> int:
    """Spectral-curve genus of the period-P chain (P − 1)."""
    return params.period - 1


# ----------------------------------------------------------------------
# trace coefficients, printed-invariant link, discriminant
# ----------------------------------------------------------------------

def raw_trace_coeffs(z: PhasePoint, params: MapParams) -> np.ndarray:
    """Monodromy trace coefficients [λ^0 .. λ^{g+1}], ascending."""
    tr = build_monodromy(z, params).trace()
    return np.array([float(c) for c in tr])


@lru_cache(maxsize=None)
def _printed_link(family: str, period: int, epsilon: float, delta: float):
    """Affine link between raw trace coefficients and closed-form invariants.

    Fitted once per parameter set from reference points: the closed-form
    invariants equal M·(raw low coefficients) + c with M unit upper
    triangular.  Returns (M, c) as small ndarrays; the fit residual is
    validated on a held-out point.
    """
    par = MapParams(family, period, epsilon, delta)
    if family != "kdv" or period not in (2, 3):
        raise InvalidStateError(
            "closed-form invariants are linked to trace coefficients for "
            "the rational family at periods 2 and 3 only")
    if period == 2:
        pts = [(0.31, 0.17), (-0.23, 0.11)]
        raws, printeds = [], []
        for q, p in pts:
            raws.append(raw_trace_coeffs(PhasePoint((q, p)), par)[:1])
            printeds.append([invariant_kdv_p2(q, p, epsilon, delta)])
        m = np.array([[1.0]])
        c = np.array([printeds[0][0] - raws[0][0]])
        check = m @ raws[1] + c
        _validate_link(check, printeds[1])
        return m, c
    pts = [(0.2, -0.1, 0.3, 0.15), (0.11, 0.07, -0.12, 0.2),
           (-0.15, 0.22, 0.08, -0.19)]
    raws, printeds = [], []
    for cs in pts:
        raws.append(raw_trace_coeffs(PhasePoint(cs), par)[:2])
        printeds.append(list(invariants_kdv_p3(*cs, epsilon, delta)))
    # printed_1 = raw_0 + m01*raw_1 + c0 ; printed_2 = raw_1 + c1
    d_raw1 = raws[0][1] - raws[1][1]
    if abs(d_raw1) < 1e-9:
        raise InvalidStateError("degenerate reference points for link fit")
    m01 = ((printeds[0][0] - raws[0][0]) - (printeds[1][0] - raws[1][0])) / d_raw1
    c0 = printeds[0][0] - raws[0][0] - m01 * raws[0][1]
    c1 = printeds[0][1] - raws[0][1]
    m = np.array([[1.0, m01], [0.0, 1.0]])
    c = np.array([c0, c1])
    check = m @ raws[2] + c
    _validate_link(check, printeds[2])
    return m, c


def _validate_link(got, want):
    want = np.asarray(want, dtype=float)
    err = np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want)))
    if err > 1e-9:
        raise InvalidStateError(
            f"trace-to-invariant link fit failed validation ({err:.3e})")


def printed_from_raw(raw_low: np.ndarray, params: MapParams) -> np.ndarray:
    """Closed-form invariants from the low raw trace coefficients."""
    m, c = _printed_link(params.family, params.period, params.epsilon,
                         params.delta)
    return m @ np.asarray(raw_low, dtype=float) + c


def raw_from_printed(printed: np.ndarray, params: MapParams) -> np.ndarray:
    """Low raw trace coefficients from the closed-form invariants."""
    m, c = _printed_link(params.family, params.period, params.epsilon,
                         params.delta)
    return np.linalg.solve(m, np.asarray(printed, dtype=float) - c)


def synthesize_trace(genus: int, invariants, params: MapParams) -> np.ndarray:
    """Trace polynomial [λ^0..λ^{g+1}] from raw invariant values.

    The λ^g coefficient is the Casimir (g+1)·((g+1)ε² − ω) and the top
    coefficient is 2, matching the chain monodromy.
    """
    e, w = params.epsilon, params.omega
    n = genus + 1
    casimir = n * (n * e * e - w)
    return np.array(list(invariants) + [casimir, 2.0])


def discriminant_from_trace(tr_coeffs, genus: int, omega: float) -> np.ndarray:
    """R(λ) = (tr T)² − 4λ^{g+1}(λ−ω)^{g+1}, ascending coefficients."""
    tr = list(tr_coeffs)
    det = poly_mul([0.0] * (genus + 1) + [1.0],
                   _binomial_power([-omega, 1.0], genus + 1))
    return np.array(poly_sub(poly_mul(tr, tr), _poly_scale(det, 4.0)),
                    dtype=float)


@dataclass(frozen=True)
class SpectralData:
    """Spectral summary of the monodromy at one phase point.

    ``invariants`` are the conserved low trace coefficients (λ^0..λ^{g−1});
    ``casimir_top`` is the λ^g coefficient (parameter-only Casimir);
    ``B_top``/``C_top`` are the top coefficients of the off-diagonal
    entries; ``R_coeffs`` is the degree-(2g+2) discriminant;
    ``printed_offset`` stores the affine link (matrix row-major, then
    offset vector) tying the invariants to their closed-form counterparts.
    """

    genus: int
    invariants: tuple
    casimir_top: float
    B_top: float
    C_top: float
    R_coeffs: tuple
    printed_offset: tuple

    def as_dict(self) -> dict:
        return {
            "genus": self.genus,
            "invariants": list(self.invariants),
            "casimirs": [self.casimir_top, self.B_top, self.C_top],
            "R_coeffs": list(self.R_coeffs),
        }


@dataclass(frozen=True)
class SeparationState:
    """Separation variables at one phase point.

    ``mu`` holds the g real roots of the off-diagonal entry B(λ)
    (ascending), ``nu`` the conjugate variables from the eigenvalue
    ratio, ``kappa`` the per-root sheet signs.
    """

    mu: tuple
    nu: tuple
    kappa: tuple

    def as_dict(self) -> dict:
        return {"mu": list(self.mu), "nu": list(self.nu),
                "kappa": list(self.kappa)}


def spectral_data(z: PhasePoint, params: MapParams) -> SpectralData:
    """Extract trace invariants, Casimirs and discriminant at a point."""
    g = genus_of(params)
    T = build_monodromy(z, params)
    tr = [float(c) for c in T.trace()]
    R = discriminant_from_trace(tr, g, params.omega)
    if params.family == "kdv" and params.period in (2, 3):
        m, c = _printed_link(params.family, params.period, params.epsilon,
                             params.delta)
        offset = tuple(m.ravel()) + tuple(c)
    else:
        offset = ()
    return SpectralData(
        genus=g,
        invariants=tuple(tr[:g]),
        casimir_top=tr[g],
        B_top=float(T.b[-1]),
        C_top=float(T.c[-1]),
        R_coeffs=tuple(R),
        printed_offset=offset,
    )


# ----------------------------------------------------------------------
# Zakharov-Shabat compatibility
# ----------------------------------------------------------------------

def zs_residual(z: PhasePoint, params: MapParams) -> float:
    """Max coefficient residual of L̄_j M_j − M_{j+1} L_j over one period.

    Certifies that the map conjugates the monodromy, hence conserves its
    trace.  Implemented for the rational family (both layouts).
    """
    if params.family != "kdv":
        raise InvalidStateError(
            "Zakharov-Shabat residual implemented for the rational family")
    P = params.period
    xs, ys = _xy_from_coords(z.coords, params)
    zr = PhasePoint(tuple(xs) + tuple(ys), "reducedXY")
    zb = kdv_map_generalP(zr, params)
    xbs, ybs = list(zb.coords[:P]), list(zb.coords[P:])
    e = params.epsilon
    sx = [e - v for v in xs]
    sy = [e - ys[(j + 1) % P] for j in range(P)]
    sxb = [e - v for v in xbs]
    syb = [e - ybs[(j + 1) % P] for j in range(P)]
    L = [lax_L(sx[j], sy[j], None, params) for j in range(P)]
    Lb = [lax_L(sxb[j], syb[j], None, params) for j in range(P)]
    M = [lax_M(sx[j], sy[j], sxb[j], params) for j in range(P)]
    worst = 0.0
    for j in range(P):
        lhs = Lb[j] @ M[j]
        rhs = M[(j + 1) % P] @ L[j]
        for key in ("a", "b", "c", "d"):
            diff = poly_sub(getattr(lhs, key), getattr(rhs, key))
            worst = max(worst, max(abs(float(v)) for v in diff))
    return worst


# ----------------------------------------------------------------------
# separation variables
# ----------------------------------------------------------------------

def _value(v):
    return v.value if isinstance(v, Jet) else v


def _separation_from_monodromy(T: PolyMat2, genus: int):
    """Roots of B, conjugate nu, sheet signs; polymorphic in coefficients."""
    b = list(T.b)
    if genus == 1:
        if abs(_value(b[1])) < 1e-13:
            raise NonSeparableError("top coefficient of B vanishes")
        mu = [-b[0] / b[1]]
    elif genus == 2:
        if abs(_value(b[2])) < 1e-13:
            raise NonSeparableError("top coefficient of B vanishes")
        disc = b[1] * b[1] - 4.0 * b[2] * b[0]
        if _value(disc) <= 0.0:
            raise NonSeparableError(
                f"complex or multiple auxiliary spectrum (disc = "
                f"{_value(disc):.3e})")
        root = sqrt(disc)
        mu = [(-b[1] - root) / (2.0 * b[2]), (-b[1] + root) / (2.0 * b[2])]
        if _value(b[2]) < 0.0:
            mu = [mu[1], mu[0]]
    else:
        raise InvalidStateError("separation implemented for genus 1 and 2")
    nu, kappa = [], []
    for m in mu:
        a_val = poly_eval(list(T.a), m)
        d_val = poly_eval(list(T.d), m)
        ratio = a_val / d_val
        if _value(ratio) <= 0.0:
            raise NonSeparableError(
                "eigenvalue ratio non-positive; conjugate variable undefined")
        nu.append(0.5 * log(ratio))
        kappa.append(1.0 if _value(a_val - d_val) >= 0.0 else -1.0)
    return mu, nu, kappa


def separation_coordinates(z: PhasePoint, params: MapParams) -> SeparationState:
    """Auxiliary spectrum (ascending), conjugates, and sheet signs."""
    T = build_monodromy(z, params)
    mu, nu, kappa = _separation_from_monodromy(T, genus_of(params))
    return SeparationState(tuple(float(m) for m in mu),
                           tuple(float(n) for n in nu),
                           tuple(kappa))


def separation_closed_form_g1(z: PhasePoint, params: MapParams):
    """Closed-form genus-1 separation pair for the rational family."""
    q, p = z.coords
    e, w = params.epsilon, params.omega
    mu = (e * w - w * q - e ** 3 - e * e * p + e * q * q + p * q * q) / (2.0 * e)
    nu = math.log((e + q) / (e - q))
    return mu, nu


def mu_initial_slice_g2(p1: float, p2: float, params: MapParams):
    """Genus-2 auxiliary spectrum on the q₁ = q₂ = 0 slice, closed form.

    Uses the closed-form invariant of the two-degrees chain (not the raw
    trace coefficient) in the discriminant, matching the root path of
    :func:`separation_coordinates` on that slice.
    """
    e, w = params.epsilon, params.omega
    P2 = invariants_kdv_p3(0.0, 0.0, p1, p2, params.epsilon, params.delta)[1]
    disc = 40.0 * e ** 4 - 4.0 * e ** 3 * p2 - 8.0 * e * e * p2 * p2 \
        - 6.0 * P2 - 3.0 * w * w
    if disc < 0.0:
        raise NonSeparableError("initial-slice discriminant negative")
    s = math.sqrt(disc)
    lo = (3.0 * w + 2.0 * e * p2 - 4.0 * e * e - s) / 6.0
    hi = (3.0 * w + 2.0 * e * p2 - 4.0 * e * e + s) / 6.0
    return lo, hi


# ----------------------------------------------------------------------
# Poisson-bracket checks via jets
# ----------------------------------------------------------------------

def canonicity_check(z: PhasePoint, params: MapParams) -> np.ndarray:
    """Residual matrix of the separation-variable bracket table.

    Returns the (2g)x(2g) matrix {u_i, u_j} − Ω_ij for the stacked
    variables u = (μ_1..μ_g, ν_1..ν_g), computed with order-2 jets in
    the canonical coordinates.  All entries vanish when the separation
    variables are canonical.
    """
    if z.layout != "canonical":
        raise InvalidStateError("canonicity check needs canonical layout")
    g = genus_of(params)
    npairs = len(z.coords) // 2
    jets = jet_seed(z.coords, 2)
    T = _monodromy_from_coords(jets, params)
    mu, nu, _ = _separation_from_monodromy(T, g)
    u = list(mu) + list(nu)
    omega = np.zeros((2 * g, 2 * g))
    omega[:g, g:] = np.eye(g)
    omega[g:, :g] = -np.eye(g)
    out = np.zeros((2 * g, 2 * g))
    for i in range(2 * g):
        for j in range(2 * g):
            br = bracket_jets(u[i], u[j], npairs)
            out[i, j] = br.value - omega[i, j]
    return out


_ENTRY_RELATIONS = ("AA", "AB", "AD", "BB", "BD", "DD")


def entry_bracket_check(lambda1: float, lambda2: float, z: PhasePoint,
                        params: MapParams) -> dict:
    """Residuals of the six non-ultralocal monodromy-entry brackets.

    Both sides of each relation are evaluated numerically: the left
    sides as Poisson brackets of entries at the two spectral values via
    jets, the right sides from entry values.  Keys name the entry pair;
    e.g. ``"AB"`` is {A(λ₁), B(λ₂)}.
    """
    if lambda1 == lambda2:
        raise InvalidStateError("entry brackets need distinct spectral values")
    if lambda1 == 0.0 or lambda2 == 0.0:
        raise InvalidStateError("entry brackets need nonzero spectral values")
    if z.layout != "canonical":
        raise InvalidStateError("entry bracket check needs canonical layout")
    npairs = len(z.coords) // 2
    jets = jet_seed(z.coords, 1)
    T = _monodromy_from_coords(jets, params)
    l1, l2 = lambda1, lambda2
    ent = {}
    for name, coeffs in (("A", T.a), ("B", T.b), ("C", T.c), ("D", T.d)):
        ent[name, 1] = poly_eval(list(coeffs), l1)
        ent[name, 2] = poly_eval(list(coeffs), l2)
    val = {k: v.value for k, v in ent.items()}

    def br(x, y):
        return bracket_jets(ent[x, 1], ent[y, 2], npairs).value

    dl = l1 - l2
    res = {}
    res["AA"] = br("A", "A") - (val["B", 1] * val["C", 2] / l2
                                - val["B", 2] * val["C", 1] / l1)
    res["AB"] = br("A", "B") - ((val["A", 2] * val["B", 1]
                                 - val["B", 2] * val["A", 1]) / dl
                                + val["B", 1] * val["D", 2] / l2)
    res["AD"] = br("A", "D") - ((l1 * val["B", 1] * val["C", 2]
                                 - l2 * val["B", 2] * val["C", 1])
                                / (l1 * dl))
    res["BB"] = br("B", "B")
    res["BD"] = br("B", "D") - ((l1 * val["B", 1] * val["D", 2]
                                 - l2 * val["D", 1] * val["B", 2])
                                / (l1 * dl))
    res["DD"] = br("D", "D")
    return res


# ----------------------------------------------------------------------
# discrete Dubrovin residuals
# ----------------------------------------------------------------------

def _sqrtR_sheeted(T: PolyMat2, mu_values):
    """(A − D)(μ_j): the sheet-resolved root of R at the auxiliary spectrum."""
    amd = poly_sub(list(T.a), list(T.d))
    return [float(poly_eval(amd, m)) for m in mu_values]


def dubrovin_residual_discrete(z: PhasePoint, params: MapParams):
    """Residuals of the one-step difference equations for the spectrum.

    Genus 1 returns the single second-degree residual; genus 2 returns
    the three first-order residuals.  The square root of the
    discriminant at each μ_j is taken as (A − D)(μ_j), which resolves
    the sheet sign exactly.
    """
    if params.family != "kdv":
        raise InvalidStateError(
            "discrete difference-equation residuals implemented for the "
            "rational family")
    g = genus_of(params)
    e, w = params.epsilon, params.omega
    T = build_monodromy(z, params)
    zb = map_for(params)(z, params)
    Tb = build_monodromy(zb, params)
    mu, _, _ = _separation_from_monodromy(T, g)
    mub, _, _ = _separation_from_monodromy(Tb, g)
    mu = [float(m) for m in mu]
    mub = [float(m) for m in mub]
    r = _sqrtR_sheeted(T, mu)
    rb = _sqrtR_sheeted(Tb, mub)
    tr = [float(c) for c in T.trace()]
    I0 = tr[0]
    B_top = float(T.b[-1])
    C_top = float(T.c[-1])
    if g == 1:
        m, mb = mu[0], mub[0]
        sm, smb = r[0], rb[0]
        lhs = (m - mb - w) * ((smb - I0) / mb) ** 2 \
            - (m - mb + w) * ((sm + I0) / m) ** 2
        rhs = (2.0 * w / (m * mb)) * (smb - I0) * (sm + I0) \
            - 4.0 * B_top * C_top * (m - mb) ** 2
        return np.array([lhs - rhs])
    # genus 2
    if abs(mu[0] - mu[1]) < 1e-12 or abs(mub[0] - mub[1]) < 1e-12:
        raise DegenerateStepError("auxiliary spectrum collision at this step")
    xbar = float(_chain_sites(zb.coords, params)[0][0])
    m1, m2 = mu
    mb1, mb2 = mub
    s1, s2 = r
    sb1, sb2 = rb

    def f0(a, b, sa, sb):
        return (sa / a - sb / b) / (a - b)

    def f2(a, b, sa, sb):
        return ((b / a) * sa - (a / b) * sb) / (a - b)

    res1 = (f0(m1, m2, s1, s2) - f0(mb1, mb2, sb1, sb2)) \
        - (I0 * (1.0 / (m1 * m2) + 1.0 / (mb1 * mb2))
           - 2.0 * B_top * xbar + 2.0 * C_top * w / xbar)
    if w == 0.0:
        # identity step: μ̄ ≡ μ, and the two equations carrying 1/ω reduce
        # to 0 = 0 once cleared of the grading constant
        return np.array([res1, 0.0, 0.0])
    res2 = (f0(m1, m2, s1, s2) + f0(mb1, mb2, sb1, sb2)) \
        - (I0 * (1.0 / (m1 * m2) - 1.0 / (mb1 * mb2))
           + 2.0 * B_top * (xbar / w) * (m1 - mb1 + m2 - mb2))
    res3 = (f2(m1, m2, s1, s2) + f2(mb1, mb2, sb1, sb2)) \
        - (I0 * ((m1 + m2) / (m1 * m2) - (mb1 + mb2) / (mb1 * mb2))
           + 2.0 * B_top * (xbar / w) * (m1 * m2 - mb1 * mb2))
    return np.array([res1, res2, res3])
