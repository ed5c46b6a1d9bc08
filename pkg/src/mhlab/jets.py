"""Truncated multivariate Taylor (jet) arithmetic.

A jet stores the Taylor coefficients of a scalar function about a base
point, truncated at a fixed total degree.  Sums, products, quotients and
the elementary transcendental functions are closed on jets and keep every
retained coefficient exact (the only error is the truncation itself), so
jets provide exact pointwise partial derivatives of any formula composed
from these operations.  Poisson brackets are assembled from jet
derivatives, which is the differentiation backbone used by all other
modules: Jacobians, bracket residuals and nested-bracket series are all
computed here, never by finite differences.

Storage is dense over the simplex of multi-indices of total degree
``<= order``, in graded lexicographic order.  The graded ordering makes
truncation a prefix slice, which the arithmetic exploits throughout.
Each derivative (and hence each Poisson bracket) lowers the retained
order by one; operations that would need coefficients beyond the
retained order raise :class:`OrderBudgetError` instead of silently
returning a less accurate result, so callers must over-seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Jet",
    "JetError",
    "OrderBudgetError",
    "ScalarField",
    "jet_seed",
    "jet_elementary",
    "poisson_bracket",
    "bracket_jets",
    "log",
    "exp",
    "sqrt",
]

#: Hard caps on the dense tables.  Everything in this package fits
#: comfortably below these bounds; they exist to catch runaway requests.
MAX_NVARS = 6
MAX_ORDER = 12


class JetError(ValueError):
    """Raised for invalid jet operations (domain, shape or base mismatch)."""


class OrderBudgetError(JetError):
    """Raised when an operation would need more retained order than present.

    Differentiation consumes one order per application.  Rather than
    quietly producing a lower-order answer, the engine refuses, so that
    order bookkeeping mistakes surface at the call site.
    """


# ----------------------------------------------------------------------
# index tables (cached per (nvars, order))
# ----------------------------------------------------------------------

def _simplex_size(nvars: int, order: int) -> int:
    return math.comb(nvars + order, order)


@lru_cache(maxsize=None)
def _simplex(nvars: int, order: int):
    """Multi-indices of total degree <= order, graded-lex sorted.

    Returns (exponents tuple-of-tuples, position dict).  Because the
    primary sort key is the total degree, the first ``_simplex_size(n, k)``
    entries coincide with the full table for order ``k < order``; all
    truncation logic relies on this prefix property.
    """
    def gen(n, cap):
        if n == 0:
            yield ()
            return
        for d in range(cap + 1):
            for rest in gen(n - 1, cap - d):
                yield (d,) + rest

    exps = sorted(gen(nvars, order), key=lambda a: (sum(a), a))
    pos = {a: i for i, a in enumerate(exps)}
    return tuple(exps), pos


@lru_cache(maxsize=None)
def _mult_table(nvars: int, order: int):
    """Index triples (i, j, k) with exps[i] + exps[j] = exps[k], all degrees <= order."""
    exps, pos = _simplex(nvars, order)
    degs = [sum(a) for a in exps]
    ii, jj, kk = [], [], []
    for i, a in enumerate(exps):
        da = degs[i]
        for j, b in enumerate(exps):
            if da + degs[j] > order:
                continue
            ii.append(i)
            jj.append(j)
            kk.append(pos[tuple(x + y for x, y in zip(a, b))])
    return (np.asarray(ii, dtype=np.int64),
            np.asarray(jj, dtype=np.int64),
            np.asarray(kk, dtype=np.int64))


@lru_cache(maxsize=None)
def _diff_table(nvars: int, order: int, var: int):
    """Source positions and factors mapping an order-K jet to its ∂/∂x_var."""
    exps_lo, _ = _simplex(nvars, order - 1)
    _, pos_hi = _simplex(nvars, order)
    src = np.empty(len(exps_lo), dtype=np.int64)
    fac = np.empty(len(exps_lo))
    for t, b in enumerate(exps_lo):
        a = list(b)
        a[var] += 1
        src[t] = pos_hi[tuple(a)]
        fac[t] = b[var] + 1
    return src, fac


def _mul_arrays(a: np.ndarray, b: np.ndarray, nvars: int, order: int) -> np.ndarray:
    ii, jj, kk = _mult_table(nvars, order)
    out = np.zeros(_simplex_size(nvars, order))
    np.add.at(out, kk, a[ii] * b[jj])
    return out


# ----------------------------------------------------------------------
# Jet
# ----------------------------------------------------------------------

class Jet:
    """Truncated Taylor expansion of a scalar function at a point.

    Parameters
    ----------
    nvars : int
        Number of independent variables.
    order : int
        Maximum total degree retained.
    base : tuple of float
        Expansion point (one entry per variable).
    coeffs : ndarray
        Dense coefficient vector over the degree-``order`` simplex in
        graded lexicographic multi-index order.  ``coeffs[0]`` is the
        function value at ``base``.

    Notes
    -----
    Jets are immutable values; all arithmetic returns new instances.
    Binary operations require identical ``nvars`` and ``base`` and
    truncate to the smaller of the two orders.
    """

    __slots__ = ("nvars", "order", "base", "coeffs")

    def __init__(self, nvars: int, order: int, base, coeffs):
        if not (1 <= nvars <= MAX_NVARS):
            raise JetError(f"nvars={nvars} outside supported range 1..{MAX_NVARS}")
        if not (0 <= order <= MAX_ORDER):
            raise JetError(f"order={order} outside supported range 0..{MAX_ORDER}")
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (_simplex_size(nvars, order),):
            raise JetError("coefficient vector length does not match (nvars, order)")
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "base", tuple(float(b) for b in base))
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):  # immutability
        raise AttributeError("Jet instances are immutable")

    # -- constructors --------------------------------------------------

    @staticmethod
    def constant(value: float, nvars: int, order: int, base) -> "Jet":
        c = np.zeros(_simplex_size(nvars, order))
        c[0] = value
        return Jet(nvars, order, base, c)

    # -- basic queries ---------------------------------------------------

    @property
    def value(self) -> float:
        """Function value at the base point (zero multi-index coefficient)."""
        return float(self.coeffs[0])

    def coefficient(self, alpha: Sequence[int]) -> float:
        """Taylor coefficient for the given multi-index."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.nvars:
            raise JetError("multi-index length does not match nvars")
        if sum(alpha) > self.order:
            raise JetError("multi-index degree exceeds retained order")
        _, pos = _simplex(self.nvars, self.order)
        return float(self.coeffs[pos[alpha]])

    def partial(self, alpha: Sequence[int]) -> float:
        """Partial derivative value ∂^|α| f / ∂x^α at the base point."""
        fac = 1.0
        for a in alpha:
            fac *= math.factorial(int(a))
        return self.coefficient(alpha) * fac

    def first_partials(self) -> np.ndarray:
        """Gradient at the base point as a length-``nvars`` vector."""
        _, pos = _simplex(self.nvars, self.order)
        out = np.empty(self.nvars)
        for i in range(self.nvars):
            e = tuple(1 if k == i else 0 for k in range(self.nvars))
            out[i] = self.coeffs[pos[e]]
        return out

    def truncate(self, order: int) -> "Jet":
        """Restriction to a lower retained order (prefix slice)."""
        if order > self.order:
            raise OrderBudgetError(
                f"cannot raise order {self.order} to {order}; re-seed instead")
        if order == self.order:
            return self
        return Jet(self.nvars, order, self.base,
                   self.coeffs[:_simplex_size(self.nvars, order)].copy())

    def diff(self, var: int) -> "Jet":
        """Derivative jet ∂/∂x_var; retained order drops by one."""
        if not (0 <= var < self.nvars):
            raise JetError(f"variable index {var} out of range")
        if self.order < 1:
            raise OrderBudgetError(
                "differentiating an order-0 jet: over-seed the inputs")
        src, fac = _diff_table(self.nvars, self.order, var)
        return Jet(self.nvars, self.order - 1, self.base, self.coeffs[src] * fac)

    # -- arithmetic ------------------------------------------------------

    def _align(self, other: "Jet"):
        if self.nvars != other.nvars:
            raise JetError("jets have different variable counts")
        if self.base != other.base:
            raise JetError("jets have different base points")
        k = min(self.order, other.order)
        return self.truncate(k), other.truncate(k), k

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b, k = self._align(other)
            return Jet(self.nvars, k, self.base, a.coeffs + b.coeffs)
        c = self.coeffs.copy()
        c[0] += float(other)
        return Jet(self.nvars, self.order, self.base, c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.nvars, self.order, self.base, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -float(other))

    def __rsub__(self, other):
        return (-self) + float(other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b, k = self._align(other)
            return Jet(self.nvars, k, self.base,
                       _mul_arrays(a.coeffs, b.coeffs, self.nvars, k))
        return Jet(self.nvars, self.order, self.base, self.coeffs * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * _reciprocal(other)
        return self * (1.0 / float(other))

    def __rtruediv__(self, other):
        return _reciprocal(self) * float(other)

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise JetError("jet exponent must be an integer; use sqrt/log/exp")
        return _powi(self, int(n))

    def __repr__(self):
        return (f"Jet(nvars={self.nvars}, order={self.order}, "
                f"value={self.value!r})")


# ----------------------------------------------------------------------
# elementary functions by series composition
# ----------------------------------------------------------------------

def _compose(x: Jet, series: np.ndarray) -> Jet:
    """Evaluate sum_m series[m] * (x - x.value)^m, truncated, by Horner."""
    k = x.order
    h = x.coeffs.copy()
    h[0] = 0.0
    out = np.zeros_like(h)
    out[0] = series[k]
    for m in range(k - 1, -1, -1):
        out = _mul_arrays(out, h, x.nvars, k)
        out[0] += series[m]
    return Jet(x.nvars, k, x.base, out)


def _log(x: Jet) -> Jet:
    a = x.value
    if a <= 0.0:
        raise JetError(f"log of jet with non-positive value {a!r}")
    c = np.empty(x.order + 1)
    c[0] = math.log(a)
    for m in range(1, x.order + 1):
        c[m] = (-1.0) ** (m + 1) / (m * a ** m)
    return _compose(x, c)


def _exp(x: Jet) -> Jet:
    a = math.exp(x.value)
    c = np.array([a / math.factorial(m) for m in range(x.order + 1)])
    return _compose(x, c)


def _sqrt(x: Jet) -> Jet:
    a = x.value
    if a <= 0.0:
        raise JetError(f"sqrt of jet with non-positive value {a!r}")
    c = np.empty(x.order + 1)
    binom = 1.0
    for m in range(x.order + 1):
        c[m] = binom * a ** (0.5 - m)
        binom *= (0.5 - m) / (m + 1)
    return _compose(x, c)


def _reciprocal(x: Jet) -> Jet:
    a = x.value
    if a == 0.0:
        raise JetError("division by a jet with zero value")
    c = np.array([(-1.0) ** m * a ** (-(m + 1)) for m in range(x.order + 1)])
    return _compose(x, c)


def _powi(x: Jet, n: int) -> Jet:
    if n < 0:
        return _powi(_reciprocal(x), -n)
    out = Jet.constant(1.0, x.nvars, x.order, x.base)
    b = x
    while n:
        if n & 1:
            out = out * b
        b = b * b
        n >>= 1
    return out


def log(x):
    """Natural logarithm, accepting a Jet or a plain number."""
    return _log(x) if isinstance(x, Jet) else math.log(x)


def exp(x):
    """Exponential, accepting a Jet or a plain number."""
    return _exp(x) if isinstance(x, Jet) else math.exp(x)


def sqrt(x):
    """Square root, accepting a Jet or a plain number."""
    return _sqrt(x) if isinstance(x, Jet) else math.sqrt(x)


# ----------------------------------------------------------------------
# public seeding / elementary API
# ----------------------------------------------------------------------

def jet_seed(point: Sequence[float], order: int) -> list[Jet]:
    """Seed identity jets, one per coordinate of ``point``.

    Parameters
    ----------
    point : sequence of float
        Expansion point; its length fixes the variable count.
    order : int
        Retained total degree; must be at least 1 so that at least one
        derivative (hence one Poisson bracket) can be taken.

    Returns
    -------
    list of Jet
        The i-th jet represents the coordinate function x_i: its value
        is ``point[i]`` and its only nonzero higher coefficient is a
        unit at the i-th first-order multi-index.
    """
    pt = tuple(float(v) for v in point)
    if len(pt) == 0:
        raise JetError("cannot seed jets over zero variables")
    if order < 1:
        raise JetError("seeding order must be >= 1")
    n = len(pt)
    _, pos = _simplex(n, order)
    out = []
    for i, v in enumerate(pt):
        c = np.zeros(_simplex_size(n, order))
        c[0] = v
        e = tuple(1 if k == i else 0 for k in range(n))
        c[pos[e]] = 1.0
        out.append(Jet(n, order, pt, c))
    return out


_BINARY_KINDS = {"add", "sub", "mul", "div"}
_UNARY_KINDS = {"log", "exp", "sqrt"}


def jet_elementary(x: Jet, kind: str, other=None, exponent: int | None = None) -> Jet:
    """Apply one elementary operation to a jet.

    Parameters
    ----------
    x : Jet
        Principal operand.
    kind : str
        One of ``add``, ``sub``, ``mul``, ``div`` (binary; ``other``
        required), ``log``, ``exp``, ``sqrt`` (unary) or ``powi``
        (``exponent`` required, integer).
    other : Jet or float, optional
        Second operand for the binary kinds.
    exponent : int, optional
        Integer power for ``powi``.

    Returns
    -------
    Jet
        The correctly truncated composition; every retained coefficient
        is exact.
    """
    if kind in _BINARY_KINDS:
        if other is None:
            raise JetError(f"operation {kind!r} needs a second operand")
        return {"add": x.__add__, "sub": x.__sub__,
                "mul": x.__mul__, "div": x.__truediv__}[kind](other)
    if kind in _UNARY_KINDS:
        return {"log": _log, "exp": _exp, "sqrt": _sqrt}[kind](x)
    if kind == "powi":
        if exponent is None:
            raise JetError("powi needs an integer exponent")
        return _powi(x, int(exponent))
    raise JetError(f"unknown elementary kind {kind!r}")


# ----------------------------------------------------------------------
# scalar fields and Poisson brackets
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarField:
    """A pure rule mapping one jet per variable to a result jet.

    Parameters
    ----------
    arity : int
        Number of phase variables the evaluator consumes.
    evaluator : callable
        Maps a sequence of ``arity`` jets (or floats, since the rules
        are polymorphic) to a single jet (or float).
    """

    arity: int
    evaluator: Callable

    def __call__(self, args):
        if len(args) != self.arity:
            raise JetError(
                f"field of arity {self.arity} called with {len(args)} arguments")
        return self.evaluator(args)


def bracket_jets(f: Jet, g: Jet, npairs: int) -> Jet:
    """Poisson bracket of two jets over ``npairs`` canonical pairs.

    Variable layout is (q_1..q_N, p_1..p_N, extras...); variables beyond
    ``2 * npairs`` (grading parameters riding along) are passive.  The
    result order is ``min(f.order, g.order) - 1``.
    """
    if f.nvars != g.nvars or f.base != g.base:
        raise JetError("bracket operands live at different points")
    if 2 * npairs > f.nvars:
        raise JetError(f"{npairs} canonical pairs need {2 * npairs} variables, "
                       f"jets have {f.nvars}")
    if min(f.order, g.order) < 1:
        raise OrderBudgetError(
            "bracket of order-0 jets: seed inputs one order higher")
    acc = None
    for j in range(npairs):
        term = f.diff(j) * g.diff(npairs + j) - f.diff(npairs + j) * g.diff(j)
        acc = term if acc is None else acc + term
    return acc


def poisson_bracket(F: ScalarField, G: ScalarField, z, order: int) -> Jet:
    """Jet of the canonical Poisson bracket {F, G} at a phase point.

    Parameters
    ----------
    F, G : ScalarField
        Fields of equal (even) arity 2N over canonical coordinates
        ordered (q_1..q_N, p_1..p_N).
    z : PhasePoint or sequence of float
        Evaluation point; anything with a ``coords`` attribute or a
        plain coordinate sequence.
    order : int
        Requested retained order of the result.  Inputs are seeded one
        order higher internally, because the bracket consumes one order.

    Returns
    -------
    Jet
        {F, G} = Σ_j (∂F/∂q_j ∂G/∂p_j − ∂F/∂p_j ∂G/∂q_j) to ``order``.
    """
    if F.arity != G.arity:
        raise JetError("bracket of fields with different arities")
    if F.arity % 2:
        raise JetError("canonical bracket needs an even number of variables")
    npairs = F.arity // 2
    coords = getattr(z, "coords", z)
    if len(coords) != F.arity:
        raise JetError("phase point dimension does not match field arity")
    if order < 0:
        raise JetError("requested order must be nonnegative")
    jets = jet_seed(coords, order + 1)
    return bracket_jets(F(jets), G(jets), npairs)
