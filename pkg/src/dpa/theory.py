"""Analytic degree densities and edge-correlation constants.

Notation used throughout, for parameters (alpha, beta, gamma, delta_in,
delta_out) with a = alpha / (alpha + gamma):

* ``cbar_in  = (1 - gamma) / (1 + delta_in  * (alpha + gamma))``
* ``cbar_out = (1 - alpha) / (1 + delta_out * (alpha + gamma))``
* ``c_in(x)  = (1 - (1 - a) x) / (1 + delta_in  x)``
* ``c_out(x) = (1 - a x)       / (1 + delta_out x)``

so that ``c_in(alpha + gamma) = cbar_in`` and likewise for the out side.

The stationary in-degree density is

* ``fbar(0) = alpha / (1 + delta_in cbar_in)``
* ``fbar(d) = C_in Gamma(d + delta_in) / Gamma(d + delta_in + 1 + 1/cbar_in)``
  with ``C_in = Gamma(delta_in + 1/cbar_in) / Gamma(1 + delta_in)
  * (1 - cbar_in) / cbar_in**2``,

a power law with tail exponent ``-1 - 1/cbar_in``.  ``f_in(d, x)`` and
``f_out(d, x)`` are the conditional densities given a vertex fraction
``x = n/t``; ``fbar(d) = f_in(d, alpha + gamma)``.

The special function

``kappa(c1, c2, r, x) = x**c1 * int_0^1 z^{c1-1} dz
int_0^inf tau^{c1 r + c2 - 1} exp(-tau - x z tau^r) dtau``

carries the large-degree behaviour of the region integrals ``I1`` and
``I2`` (defined over ``0 <= v**c1 <= w**c2 <= 1``), which in turn build
the limiting edge density ``g`` and the edge-correlation constant
``c_X``.  Each special function has two independent evaluation routes
(adaptive quadrature and an exact recursion for integer exponents) so
one can cross-check the other.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import betaln, gammainc, gammaln

from .core import ModelParams, validate_params

REGIME_TOL = 1e-6

REGIME_SUM_LT_1 = "sum_lt_1"
REGIME_SUM_EQ_1 = "sum_eq_1"
REGIME_SUM_GT_1 = "sum_gt_1"


class DegenerateRegimeError(ValueError):
    """A requested quantity is undefined because cbar_in or cbar_out
    sits at an endpoint of (0, 1)."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested accuracy."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy request for the adaptive integrators.

    ``max_depth`` bounds the number of subinterval bisections per
    integral.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_depth: int = 200


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class TheoryParams:
    """Derived constants of a parameter set.

    ``C_in`` / ``C_out`` are None when the corresponding cbar is
    degenerate (0 or 1) and the power-law form does not apply.
    ``regime`` is one of 'sum_lt_1', 'sum_eq_1', 'sum_gt_1' according
    to cbar_in + cbar_out, with tolerance 1e-6 around 1.
    """

    params: ModelParams
    a: float
    cbar_in: float
    cbar_out: float
    C_in: float | None
    C_out: float | None
    regime: str


def _power_law_const(delta: float, cbar: float) -> float | None:
    if not 0.0 < cbar < 1.0:
        return None
    return math.exp(gammaln(delta + 1.0 / cbar) - gammaln(1.0 + delta)) * (
        (1.0 - cbar) / cbar**2
    )


def derive_theory(params: ModelParams) -> TheoryParams:
    """Validate params and compute the derived constants."""
    p, _ = validate_params(params)
    ag = p.alpha + p.gamma
    a = p.alpha / ag
    cbar_in = (1.0 - p.gamma) / (1.0 + p.delta_in * ag)
    cbar_out = (1.0 - p.alpha) / (1.0 + p.delta_out * ag)
    s = cbar_in + cbar_out
    if abs(s - 1.0) < REGIME_TOL:
        regime = REGIME_SUM_EQ_1
    elif s < 1.0:
        regime = REGIME_SUM_LT_1
    else:
        regime = REGIME_SUM_GT_1
    return TheoryParams(
        params=p,
        a=a,
        cbar_in=cbar_in,
        cbar_out=cbar_out,
        C_in=_power_law_const(p.delta_in, cbar_in),
        C_out=_power_law_const(p.delta_out, cbar_out),
        regime=regime,
    )


def c_in_of(x: float, params: ModelParams) -> float:
    """Exponent function of the in-degree evolution at vertex fraction x."""
    ag = params.alpha + params.gamma
    return (1.0 - (params.gamma / ag) * x) / (1.0 + params.delta_in * x)


def c_out_of(x: float, params: ModelParams) -> float:
    ag = params.alpha + params.gamma
    return (1.0 - (params.alpha / ag) * x) / (1.0 + params.delta_out * x)


def tail_exponent(th: TheoryParams, side: str = "in") -> float:
    """Power-law tail exponent of the degree density (-1 - 1/cbar)."""
    cbar = th.cbar_in if side == "in" else th.cbar_out
    if not 0.0 < cbar < 1.0:
        raise DegenerateRegimeError(f"cbar_{side}={cbar} admits no power law")
    return -1.0 - 1.0 / cbar


def fbar(d, th: TheoryParams):
    """Stationary in-degree density: lim E n_in(t, d) / t.

    Accepts a scalar or array of degrees.  Raises
    :class:`DegenerateRegimeError` when cbar_in is 0 or 1.
    """
    cbar = th.cbar_in
    if not 0.0 < cbar < 1.0:
        raise DegenerateRegimeError(
            f"cbar_in={cbar}: the in-degree density is degenerate"
        )
    d_arr = np.asarray(d)
    scalar = d_arr.ndim == 0
    d_arr = np.atleast_1d(d_arr).astype(np.float64)
    delta = th.params.delta_in
    out = np.empty_like(d_arr)
    zero = d_arr == 0
    out[zero] = th.params.alpha / (1.0 + delta * cbar)
    pos = ~zero
    if pos.any():
        dp = d_arr[pos]
        out[pos] = th.C_in * np.exp(
            gammaln(dp + delta) - gammaln(dp + delta + 1.0 + 1.0 / cbar)
        )
    return float(out[0]) if scalar else out


def _f_side(d: int, x: float, p0: float, p1: float, delta: float, c: float) -> float:
    """Shared machinery of f_in / f_out.

    p0 is the weight of the i=0 term (mass at the degree created with
    the vertex being 0), p1 of the i=1 term; c is the side's exponent
    function at x.
    """
    if d < 0:
        return 0.0
    if d == 0:
        return p0 * x / (1.0 + c * delta)
    if delta > 0.0 and c > 0.0 and x > 0.0:
        # closed Gamma-ratio form
        total = 0.0
        for i, w in ((0, p0), (1, p1)):
            if d < i or w == 0.0:
                continue
            total += w * math.exp(
                gammaln(i + delta + 1.0 / c)
                - gammaln(i + delta)
                + gammaln(d + delta)
                - gammaln(d + 1.0 + delta + 1.0 / c)
            )
        return x * total / c
    # product form, valid for all parameter values
    val = (1.0 - c) / ((1.0 + c * delta) * (1.0 + c * (delta + 1.0)))
    for i in range(2, d + 1):
        val *= c * (delta + i - 1.0) / (1.0 + c * (delta + i))
    return val


def f_in(d: int, x: float, params: ModelParams) -> float:
    """Conditional in-degree density f_d(x) at vertex fraction x in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    ag = params.alpha + params.gamma
    return _f_side(
        d, x, params.alpha / ag, params.gamma / ag,
        params.delta_in, c_in_of(x, params),
    )


def f_out(d: int, x: float, params: ModelParams) -> float:
    """Conditional out-degree density at vertex fraction x in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    ag = params.alpha + params.gamma
    return _f_side(
        d, x, params.gamma / ag, params.alpha / ag,
        params.delta_out, c_out_of(x, params),
    )


# ---------------------------------------------------------------------------
# kappa: the tail special function
# ---------------------------------------------------------------------------


def _quad(f, lo, hi, q: QuadratureSpec, scale: float = 1.0) -> float:
    eps_abs = q.abs_tol * scale
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, lo, hi, epsabs=eps_abs, epsrel=q.rel_tol, limit=q.max_depth)
    if not math.isfinite(val) or err > 1e3 * max(eps_abs, abs(val) * q.rel_tol) + 1e-280:
        raise QuadratureError(
            f"integral did not converge: value={val!r}, error estimate={err!r}"
        )
    return val


def _kappa_impl(c1, c2, r, x, q, weight=None, scale=1.0):
    if c1 <= 0.0 or c2 <= 0.0 or r <= 0.0:
        raise ValueError(f"kappa requires c1, c2, r > 0, got ({c1}, {c2}, {r})")
    if x < 0.0:
        raise ValueError(f"kappa requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    # Integrating the z variable out first collapses the double
    # integral to
    #   Gamma(c1) int_0^inf tau^{c2-1} e^{-tau} P(c1, x tau^r) [w] dtau
    # with P the regularized lower incomplete gamma.  P is monotone
    # into [0, 1], so the integrand keeps the same Gamma(c2) profile
    # at every x; large x only saturates the P factor earlier.
    gc1 = math.exp(gammaln(c1))
    ic2 = 1.0 / c2
    rc2 = r / c2
    e1 = math.exp(-1.0)

    if weight is None:
        # head tau in (0, 1): tau = s**(1/c2) absorbs the endpoint power
        def f_head(s):
            return math.exp(-(s ** ic2)) * gammainc(c1, x * s ** rc2) / c2

        # tail tau in (1, inf): tau = 1 - ln(u), e^{-tau} cancels 1/u
        def f_tail(u):
            tau = 1.0 - math.log(u)
            return e1 * tau ** (c2 - 1.0) * gammainc(c1, x * tau ** r)
    else:
        def f_head(s):
            tau = s ** ic2
            return weight(tau) * math.exp(-tau) * gammainc(c1, x * tau ** r) / c2

        def f_tail(u):
            tau = 1.0 - math.log(u)
            return weight(tau) * e1 * tau ** (c2 - 1.0) * gammainc(c1, x * tau ** r)

    # At large x the P factor saturates except below tau ~ (k/x)^{1/r},
    # a layer too thin for the sampler to notice on its own; cut the
    # head there explicitly so the dip to zero is always resolved.
    sat = (45.0 + 5.0 * c1) / x
    s_split = sat ** (c2 / r) if sat < 1.0 else 1.0
    if 1e-280 < s_split < 0.9:
        head = _quad(f_head, 0.0, s_split, q, scale)
        head += _quad(f_head, s_split, 1.0, q, scale)
    else:
        head = _quad(f_head, 0.0, 1.0, q, scale)
    tail = _quad(f_tail, 0.0, 1.0, q, scale)
    return gc1 * (head + tail)


@lru_cache(maxsize=4096)
def _kappa_cached(c1, c2, r, x, q):
    return _kappa_impl(c1, c2, r, x, q)


def kappa(c1: float, c2: float, r: float, x: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """The tail integral; increases from 0 to Gamma(c1)Gamma(c2) in x.

    For r = 1 it reduces to an incomplete beta function; the reflection
    identity ``kappa(c1,c2,r,x) = Gamma(c1)Gamma(c2)
    - kappa(c2,c1,1/r,x**(-1/r))`` links the two tails.
    """
    return _kappa_cached(float(c1), float(c2), float(r), float(x), q)


def kappa_limit(c1: float, c2: float) -> float:
    """x -> infinity limit of kappa: Gamma(c1) * Gamma(c2)."""
    return math.exp(gammaln(c1) + gammaln(c2))


@lru_cache(maxsize=4096)
def _kappa_dc2_cached(c1, c2, r, x, q):
    return _kappa_impl(c1, c2, r, x, q, weight=math.log)


def kappa_dc2(c1: float, c2: float, r: float, x: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Partial derivative of kappa in its second parameter.

    Same integral as kappa with an extra ln(tau) factor.
    """
    return _kappa_dc2_cached(float(c1), float(c2), float(r), float(x), q)


@lru_cache(maxsize=4096)
def _kappa_diff_c2_cached(c1, c2, dc2, r, x, q):
    if dc2 == 0.0:
        return 0.0

    def w(tau):
        return math.expm1(dc2 * math.log(tau))

    return _kappa_impl(c1, c2, r, x, q, weight=w, scale=min(1.0, abs(dc2)))


def kappa_diff_c2(c1, c2, dc2, r, x, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """kappa(c1, c2 + dc2, r, x) - kappa(c1, c2, r, x) in one integral.

    The difference is evaluated with an expm1 weight instead of
    subtracting two nearly equal integrals, so it stays relatively
    accurate as dc2 -> 0.
    """
    return _kappa_diff_c2_cached(float(c1), float(c2), float(dc2), float(r), float(x), q)


# ---------------------------------------------------------------------------
# Region integrals I1 and I2 over 0 <= v**c1 <= w**c2 <= 1
# ---------------------------------------------------------------------------


def _inner_v(W: float, xi1: float, xi2: float, q: QuadratureSpec) -> float:
    """int_0^W v^{xi1-1} (1-v)^{xi2} dv via v = W u**(1/xi1)."""
    if W <= 0.0:
        return 0.0
    ix1 = 1.0 / xi1

    def f(u):
        return (1.0 - W * u ** ix1) ** xi2

    inner = QuadratureSpec(q.abs_tol * 0.1, q.rel_tol * 0.1, q.max_depth)
    return W ** xi1 * _quad(f, 0.0, 1.0, inner) / xi1


def _check_i1_args(c1, c2, xi1, xi2, xi3, xi4):
    if c1 <= 0.0 or c2 <= 0.0:
        raise ValueError(f"c1, c2 must be > 0, got ({c1}, {c2})")
    if xi1 <= 0.0 or xi3 <= 0.0:
        raise ValueError(f"xi1, xi3 must be > 0, got ({xi1}, {xi3})")
    if xi2 < 0.0 or xi4 < 0.0:
        raise ValueError(f"xi2, xi4 must be >= 0, got ({xi2}, {xi4})")


@lru_cache(maxsize=8192)
def _i1_quad_cached(c1, c2, xi1, xi2, xi3, xi4, q):
    _check_i1_args(c1, c2, xi1, xi2, xi3, xi4)
    e = c2 / c1
    ix3 = 1.0 / xi3

    def f(s):
        w = s ** ix3  # w = s**(1/xi3) flattens the w^{xi3-1} weight
        return (1.0 - w) ** xi4 * _inner_v(w ** e, xi1, xi2, q) / xi3

    return _quad(f, 0.0, 1.0, q)


def i1_quadrature(c1, c2, xi1, xi2, xi3, xi4, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Adaptive-quadrature evaluation of I1 (real exponents allowed)."""
    return _i1_quad_cached(
        float(c1), float(c2), float(xi1), float(xi2), float(xi3), float(xi4), q
    )


def i1_recursion(c1, c2, xi1, xi2, xi3, xi4) -> float:
    """Exact evaluation of I1 for nonnegative integer xi2, xi4.

    Runs the two-index recursion down to the closed base case
    ``I1(xi1, 0, xi3, 0) = c1 / (xi1 (c2 xi1 + c1 xi3))``.
    """
    n2, n4 = int(xi2), int(xi4)
    if n2 != xi2 or n4 != xi4 or n2 < 0 or n4 < 0:
        raise ValueError(f"recursion path needs integer xi2, xi4 >= 0, got ({xi2}, {xi4})")
    _check_i1_args(c1, c2, xi1, n2, xi3, n4)

    # fill the x4 = 0 row from the base case, then sweep x4 upward
    row = [0.0] * (n2 + 1)
    row[0] = c1 / (xi1 * (c2 * xi1 + c1 * xi3))
    for x2 in range(1, n2 + 1):
        row[x2] = (
            c1 * math.exp(betaln(xi1, x2 + 1.0)) + c2 * x2 * row[x2 - 1]
        ) / (c2 * (xi1 + x2) + c1 * xi3)
    for x4 in range(1, n4 + 1):
        row[0] = c1 * x4 * row[0] / (c2 * xi1 + c1 * (xi3 + x4))
        for x2 in range(1, n2 + 1):
            row[x2] = (c1 * x4 * row[x2] + c2 * x2 * row[x2 - 1]) / (
                c2 * (xi1 + x2) + c1 * (xi3 + x4)
            )
    return row[n2]


def I1(c1, c2, xi1, xi2, xi3, xi4, q: QuadratureSpec = DEFAULT_QUAD,
       method: str = "auto") -> float:
    """Region integral of v^{xi1-1}(1-v)^{xi2} w^{xi3-1}(1-w)^{xi4}
    over 0 <= v**c1 <= w**c2 <= 1.

    method: 'auto' picks the exact recursion when xi2 and xi4 are
    nonnegative integers, else quadrature; 'recursion' and
    'quadrature' force a route.
    """
    if method == "auto":
        if float(xi2).is_integer() and float(xi4).is_integer():
            return i1_recursion(c1, c2, xi1, xi2, xi3, xi4)
        return i1_quadrature(c1, c2, xi1, xi2, xi3, xi4, q)
    if method == "recursion":
        return i1_recursion(c1, c2, xi1, xi2, xi3, xi4)
    if method == "quadrature":
        return i1_quadrature(c1, c2, xi1, xi2, xi3, xi4, q)
    raise ValueError(f"unknown method {method!r}")


def _check_i2_args(c1, c2, xi1, xi2, xi3, xi4, xi5):
    _check_i1_args(c1, c2, xi1, xi2, xi3, xi4)
    if xi3 + xi5 / c1 <= 0.0:
        raise ValueError(
            f"I2 requires xi3 + xi5/c1 > 0, got xi3={xi3}, xi5={xi5}, c1={c1}"
        )


@lru_cache(maxsize=8192)
def _i2_quad_cached(c1, c2, xi1, xi2, xi3, xi4, xi5, q):
    _check_i2_args(c1, c2, xi1, xi2, xi3, xi4, xi5)
    e = c2 / c1
    # effective small-w exponent after multiplying in the t-integral
    x3e = min(xi3, xi3 + xi5 / c1)
    ix3e = 1.0 / x3e
    r5 = xi5 / c1

    def f(s):
        w = s ** ix3e
        if xi5 != 0.0:
            # w^{xi3-x3e} * (1 - w^{xi5/c1})/xi5, grouped to stay bounded
            if xi5 < 0.0:
                tail = (w ** (-r5) - 1.0) / xi5
            else:
                tail = (1.0 - w ** r5) / xi5 * w ** (xi3 - x3e)
                # xi5 > 0 means x3e == xi3, so the last factor is 1
        else:
            tail = -math.log(w) / c1
        return (1.0 - w) ** xi4 * _inner_v(w ** e, xi1, xi2, q) * tail / x3e

    return _quad(f, 0.0, 1.0, q)


def i2_quadrature(c1, c2, xi1, xi2, xi3, xi4, xi5, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Adaptive-quadrature evaluation of I2 (real exponents allowed)."""
    return _i2_quad_cached(
        float(c1), float(c2), float(xi1), float(xi2), float(xi3), float(xi4),
        float(xi5), q
    )


def i2_recursion(c1, c2, xi1, xi2, xi3, xi4, xi5) -> float:
    """Exact evaluation of I2 for nonnegative integer xi2, xi4.

    The recursion lowers (xi2, xi4) with source terms
    ``I1(xi1, xi2, xi3 + xi5/c1, xi4)``, themselves evaluated by the
    exact I1 recursion, down to
    ``(c2 xi1 + c1 xi3) I2(xi1, 0, xi3, 0, xi5) = I1(xi1, 0, xi3 + xi5/c1, 0)``.
    """
    n2, n4 = int(xi2), int(xi4)
    if n2 != xi2 or n4 != xi4 or n2 < 0 or n4 < 0:
        raise ValueError(f"recursion path needs integer xi2, xi4 >= 0, got ({xi2}, {xi4})")
    _check_i2_args(c1, c2, xi1, n2, xi3, n4, xi5)
    xi3s = xi3 + xi5 / c1

    # sweep the I1(xi1, x2, xi3s, x4) source row and the I2 row
    # together, x4 level by level
    src = [0.0] * (n2 + 1)
    src[0] = c1 / (xi1 * (c2 * xi1 + c1 * xi3s))
    for x2 in range(1, n2 + 1):
        src[x2] = (
            c1 * math.exp(betaln(xi1, x2 + 1.0)) + c2 * x2 * src[x2 - 1]
        ) / (c2 * (xi1 + x2) + c1 * xi3s)
    row = [0.0] * (n2 + 1)
    row[0] = src[0] / (c2 * xi1 + c1 * xi3)
    for x2 in range(1, n2 + 1):
        row[x2] = (src[x2] + c2 * x2 * row[x2 - 1]) / (c2 * (xi1 + x2) + c1 * xi3)
    for x4 in range(1, n4 + 1):
        src[0] = c1 * x4 * src[0] / (c2 * xi1 + c1 * (xi3s + x4))
        for x2 in range(1, n2 + 1):
            src[x2] = (c1 * x4 * src[x2] + c2 * x2 * src[x2 - 1]) / (
                c2 * (xi1 + x2) + c1 * (xi3s + x4)
            )
        row[0] = (src[0] + c1 * x4 * row[0]) / (c2 * xi1 + c1 * (xi3 + x4))
        for x2 in range(1, n2 + 1):
            row[x2] = (src[x2] + c1 * x4 * row[x2] + c2 * x2 * row[x2 - 1]) / (
                c2 * (xi1 + x2) + c1 * (xi3 + x4)
            )
    return row[n2]


def I2(c1, c2, xi1, xi2, xi3, xi4, xi5, q: QuadratureSpec = DEFAULT_QUAD,
       method: str = "auto") -> float:
    """I1's integrand further weighted by int_{w^{1/c1}}^1 t^{xi5-1} dt.

    Requires xi3 + xi5/c1 > 0.  For xi5 != 0 the identity
    ``I2 = (I1(xi3) - I1(xi3 + xi5/c1)) / xi5`` gives an independent
    check.
    """
    if method == "auto":
        if float(xi2).is_integer() and float(xi4).is_integer():
            return i2_recursion(c1, c2, xi1, xi2, xi3, xi4, xi5)
        return i2_quadrature(c1, c2, xi1, xi2, xi3, xi4, xi5, q)
    if method == "recursion":
        return i2_recursion(c1, c2, xi1, xi2, xi3, xi4, xi5)
    if method == "quadrature":
        return i2_quadrature(c1, c2, xi1, xi2, xi3, xi4, xi5, q)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Limiting edge density g(x, d1, d2)
# ---------------------------------------------------------------------------


def _gamma_ratio_ln(top: float, bots: tuple) -> float:
    """exp(gammaln(top) - sum gammaln(bots)); 0 if any bot arg is 0."""
    acc = gammaln(top)
    for b in bots:
        if b == 0.0:
            return 0.0  # 1/Gamma(0) = 0
        acc -= gammaln(b)
    return math.exp(acc)


def g_edge_density(x: float, d1: int, d2: int, params: ModelParams,
                   q: QuadratureSpec = DEFAULT_QUAD, method: str = "auto") -> float:
    """Limiting density of non-loop edges from an out-degree-d1 source
    to an in-degree-d2 target, at vertex fraction x: the '(d1, d2)
    edges per process edge' constant g(x, d1, d2).

    Zero when d1 or d2 is 0.  ``method`` selects the I1/I2 route.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    if d1 <= 0 or d2 <= 0:
        return 0.0
    p, _ = validate_params(params)
    ag = p.alpha + p.gamma
    a = p.alpha / ag
    p_out = (1.0 - a, a)  # weight of the i = 0, 1 terms on the out side
    p_in = (a, 1.0 - a)
    din, dout = p.delta_in, p.delta_out
    cin = c_in_of(x, p)
    cout = c_out_of(x, p)
    if cin <= 0.0 or cout <= 0.0:
        raise DegenerateRegimeError(
            f"c_in(x)={cin}, c_out(x)={cout}: g undefined at this x"
        )
    if x == 0.0:
        return 0.0

    total = 0.0

    # branch where the edge was born with its target vertex
    pref1 = (p.gamma / ag) * x * x / (1.0 + dout * x)
    for i in (0, 1):
        if d1 < i + 1 or p_out[i] == 0.0:
            continue
        coef = (
            p_out[i] / (cin * cout)
            * _gamma_ratio_ln(d1 + dout, (float(d1 - i), dout + i))
            * _gamma_ratio_ln(d2 + din, (float(d2), 1.0 + din))
        )
        if coef == 0.0:
            continue
        total += pref1 * coef * I1(
            cin, cout, dout + 1.0 / cout + i, d1 - i - 1,
            din + cout / cin + 1.0, d2 - 1, q, method,
        )

    # branch where the edge was born with its source vertex
    pref2 = (p.alpha / ag) * x * x / (1.0 + din * x)
    for i in (0, 1):
        if d2 < i + 1 or p_in[i] == 0.0:
            continue
        coef = (
            p_in[i] / (cin * cout)
            * _gamma_ratio_ln(d1 + dout, (float(d1), 1.0 + dout))
            * _gamma_ratio_ln(d2 + din, (float(d2 - i), din + i))
        )
        if coef == 0.0:
            continue
        total += pref2 * coef * I1(
            cout, cin, din + 1.0 / cin + i, d2 - i - 1,
            dout + cin / cout + 1.0, d1 - 1, q, method,
        )

    # branch where the edge joined two existing vertices
    pref3 = x * x * (1.0 - x) / ((1.0 + din * x) * (1.0 + dout * x))
    if pref3 != 0.0:
        xi5 = 1.0 - cin - cout
        for i in (0, 1):
            if d1 < i + 1 or p_out[i] == 0.0:
                continue
            for j in (0, 1):
                if d2 < j + 1 or p_in[j] == 0.0:
                    continue
                coef = (
                    p_out[i] * p_in[j] / (cin * cout)
                    * _gamma_ratio_ln(d1 + dout, (float(d1 - i), dout + i))
                    * _gamma_ratio_ln(d2 + din, (float(d2 - j), din + j))
                )
                if coef == 0.0:
                    continue
                pair = I2(
                    cin, cout, dout + 1.0 / cout + i, d1 - i - 1,
                    din + cout / cin + 1.0 + j, d2 - j - 1, xi5, q, method,
                ) + I2(
                    cout, cin, din + 1.0 / cin + j, d2 - j - 1,
                    dout + cin / cout + 1.0 + i, d1 - i - 1, xi5, q, method,
                )
                total += pref3 * coef * pair

    return total


# ---------------------------------------------------------------------------
# Edge-correlation constant c_X and its large-degree asymptotics
# ---------------------------------------------------------------------------


def _cx_constants(th: TheoryParams):
    """The A_i, B_i, C_ij prefactors of the three c_X components."""
    p = th.params
    ag = p.alpha + p.gamma
    ci, co = th.cbar_in, th.cbar_out
    din, dout = p.delta_in, p.delta_out
    qi = 1.0 + din * ag
    qo = 1.0 + dout * ag

    def ginv(z):  # 1 / Gamma(z), 0 at z = 0
        return 0.0 if z == 0.0 else math.exp(-gammaln(z))

    A = (
        p.gamma**2 / (qo * ci * co) * ginv(dout) * ginv(1.0 + din),
        p.alpha * p.gamma / (qo * ci * co) * ginv(1.0 + dout) * ginv(1.0 + din),
    )
    B = (
        p.alpha**2 / (qi * ci * co) * ginv(1.0 + dout) * ginv(din),
        p.alpha * p.gamma / (qi * ci * co) * ginv(1.0 + dout) * ginv(1.0 + din),
    )
    base = p.beta / (qi * qo * ci * co)
    C = {
        (0, 0): base * p.alpha * p.gamma * ginv(dout) * ginv(din),
        (0, 1): base * p.gamma**2 * ginv(dout) * ginv(din + 1.0),
        (1, 0): base * p.alpha**2 * ginv(dout + 1.0) * ginv(din),
        (1, 1): base * p.alpha * p.gamma * ginv(dout + 1.0) * ginv(din + 1.0),
    }
    return A, B, C


def _require_nondegenerate(th: TheoryParams):
    if not (0.0 < th.cbar_in < 1.0 and 0.0 < th.cbar_out < 1.0):
        raise DegenerateRegimeError(
            f"cbar_in={th.cbar_in}, cbar_out={th.cbar_out}: "
            "edge correlation constants need both in (0, 1)"
        )


def c_X(d1: int, d2: int, th: TheoryParams, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Leading edge-correlation constant: E X(t, d1, d2) ~ c_X(d1, d2) t.

    Sum of the three step-type contributions.  The two-existing-vertex
    component switches to a logarithmic form when
    cbar_in + cbar_out = 1 (within the regime tolerance); away from
    that point an algebraically equivalent grouping of the generic
    form is used that stays numerically stable arbitrarily close to
    the threshold.
    """
    _require_nondegenerate(th)
    if d1 < 1 or d2 < 1:
        raise ValueError(f"degrees must be >= 1, got ({d1}, {d2})")
    p = th.params
    ci, co = th.cbar_in, th.cbar_out
    din, dout = p.delta_in, p.delta_out
    A, B, C = _cx_constants(th)

    r_a = co / ci
    r_b = ci / co
    x_a = d1 / d2**r_a
    x_b = x_a ** (-1.0 / r_a)

    cx1 = d1 ** (-1.0 / co) * d2 ** (-r_a - 1.0) * sum(
        A[i] * kappa(dout + 1.0 / co + i, din + r_a + 1.0, r_a, x_a, q)
        for i in (0, 1)
    )
    cx2 = d1 ** (-r_b - 1.0) * d2 ** (-1.0 / ci) * sum(
        B[i] * kappa(din + 1.0 / ci + i, dout + r_b + 1.0, r_b, x_b, q)
        for i in (0, 1)
    )

    return cx1 + cx2 + _cx3(d1, d2, th, q)


def _cx3(d1: int, d2: int, th: TheoryParams, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Two-existing-vertex component of c_X, numerically stable form."""
    p = th.params
    ci, co = th.cbar_in, th.cbar_out
    din, dout = p.delta_in, p.delta_out
    _, _, C = _cx_constants(th)
    r_a = co / ci
    r_b = ci / co
    x_a = d1 / d2**r_a
    x_b = x_a ** (-1.0 / r_a)
    pref3 = d1 ** (-1.0 / co) * d2 ** (-1.0 / ci)
    s = ci + co
    eps = 1.0 - s
    cx3 = 0.0
    for i in (0, 1):
        cA = dout + 1.0 / co + i
        for j in (0, 1):
            cB = din + 1.0 / ci + j
            if C[(i, j)] == 0.0:
                continue
            if th.regime == REGIME_SUM_EQ_1:
                term = (
                    kappa(cA, cB, r_a, x_a, q) * math.log(d2)
                    - kappa_dc2(cA, cB, r_a, x_a, q)
                ) / ci + (
                    kappa(cB, cA, r_b, x_b, q) * math.log(d1)
                    - kappa_dc2(cB, cA, r_b, x_b, q)
                ) / co
            else:
                # generic branch, grouped so the 1/(1-s) pole cancels:
                #   d2^(e/ci) kap_a + d1^(e/co) kap_b - Gamma Gamma
                # = kap_a expm1(e ln d2 / ci) + kap_b expm1(e ln d1 / co)
                #   + [kap_a - kappa(cA,cB)] + [kap_b - kappa(cB,cA)]
                # using kappa(cA,cB,r_a,x_a) + kappa(cB,cA,r_b,x_b)
                # = Gamma(cA)Gamma(cB) exactly (reflection).
                kap_a = kappa(cA, cB - eps / ci, r_a, x_a, q)
                kap_b = kappa(cB, cA - eps / co, r_b, x_b, q)
                term = (
                    kap_a * math.expm1(eps * math.log(d2) / ci)
                    + kap_b * math.expm1(eps * math.log(d1) / co)
                    + kappa_diff_c2(cA, cB, -eps / ci, r_a, x_a, q)
                    + kappa_diff_c2(cB, cA, -eps / co, r_b, x_b, q)
                ) / eps
            cx3 += C[(i, j)] * term
    return pref3 * cx3


def _cx3_generic_naive(d1, d2, th, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Literal generic-branch formula (reference for the grouped form)."""
    _require_nondegenerate(th)
    p = th.params
    ci, co = th.cbar_in, th.cbar_out
    din, dout = p.delta_in, p.delta_out
    _, _, C = _cx_constants(th)
    r_a = co / ci
    r_b = ci / co
    x_a = d1 / d2**r_a
    x_b = x_a ** (-1.0 / r_a)
    s = ci + co
    eps = 1.0 - s
    out = 0.0
    for i in (0, 1):
        cA = dout + 1.0 / co + i
        for j in (0, 1):
            cB = din + 1.0 / ci + j
            bracket = (
                d2 ** (eps / ci) * kappa(cA, din + r_a + 1.0 + j, r_a, x_a, q)
                + d1 ** (eps / co) * kappa(cB, dout + r_b + 1.0 + i, r_b, x_b, q)
                - kappa_limit(cA, cB)
            )
            out += C[(i, j)] / eps * bracket
    return d1 ** (-1.0 / co) * d2 ** (-1.0 / ci) * out


@dataclass(frozen=True)
class AsymptoteResult:
    """One directional large-degree asymptote of c_X."""

    value: float
    constant_name: str
    constant: float
    profile: str


def _d_constants(th: TheoryParams):
    p = th.params
    ci, co = th.cbar_in, th.cbar_out
    din, dout = p.delta_in, p.delta_out
    A, B, C = _cx_constants(th)
    s = ci + co

    def G(z):
        return math.exp(gammaln(z))

    d_plus = sum(
        C[(i, j)] / (s - 1.0) * G(dout + 1.0 / co + i) * G(din + 1.0 / ci + j)
        for i in (0, 1) for j in (0, 1)
    ) if abs(s - 1.0) >= REGIME_TOL else math.inf
    rb = ci / co
    ra = co / ci
    d_minus = (
        B[0] * G(din + 1.0 / ci) + B[1] * G(din + 1.0 / ci + 1.0)
    ) * G(dout + rb + 1.0)
    dp_minus = (
        A[0] * G(dout + 1.0 / co) + A[1] * G(dout + 1.0 / co + 1.0)
    ) * G(din + ra + 1.0)
    if abs(s - 1.0) >= REGIME_TOL:
        d_minus += sum(
            C[(i, j)] / (1.0 - s) * G(din + 1.0 / ci + j) * G(dout + rb + 1.0 + i)
            for i in (0, 1) for j in (0, 1)
        )
        dp_minus += sum(
            C[(i, j)] / (1.0 - s) * G(din + ra + 1.0 + j) * G(dout + 1.0 / co + i)
            for i in (0, 1) for j in (0, 1)
        )
    d_zero = sum(
        C[(i, j)] / co * G(dout + 1.0 / co + i) * G(din + 1.0 / ci + j)
        for i in (0, 1) for j in (0, 1)
    )
    dp_zero = sum(
        C[(i, j)] / ci * G(dout + 1.0 / co + i) * G(din + 1.0 / ci + j)
        for i in (0, 1) for j in (0, 1)
    )
    return {
        "D_minus": d_minus,
        "D_zero": d_zero,
        "D_plus": d_plus,
        "Dp_minus": dp_minus,
        "Dp_zero": dp_zero,
    }


def c_X_asymptote(d1: int, d2: int, th: TheoryParams, direction: str) -> AsymptoteResult:
    """Directional large-degree asymptote of c_X.

    ``direction`` states which limit the caller is taking for the
    ratio d1**cbar_in / d2**cbar_out: 'to_zero' or 'to_inf'.  The
    regime (sign of cbar_in + cbar_out - 1) picks the constant and the
    degree profile.
    """
    _require_nondegenerate(th)
    if direction not in ("to_zero", "to_inf"):
        raise ValueError(
            f"direction must be 'to_zero' or 'to_inf', got {direction!r}"
        )
    ci, co = th.cbar_in, th.cbar_out
    s = ci + co
    d = _d_constants(th)
    if direction == "to_zero":
        if th.regime == REGIME_SUM_LT_1:
            name, profile = "D_minus", "d1**(-(s)/co) * d2**(-1/ci)"
            value = d[name] * d1 ** (-s / co) * d2 ** (-1.0 / ci)
        elif th.regime == REGIME_SUM_EQ_1:
            name, profile = "D_zero", "d1**(-1/co) * d2**(-1/ci) * ln(d1)"
            value = d[name] * d1 ** (-1.0 / co) * d2 ** (-1.0 / ci) * math.log(d1)
        else:
            name, profile = "D_plus", "d1**(-1/co) * d2**(-1/ci)"
            value = d[name] * d1 ** (-1.0 / co) * d2 ** (-1.0 / ci)
    else:
        if th.regime == REGIME_SUM_LT_1:
            name, profile = "Dp_minus", "d1**(-1/co) * d2**(-(s)/ci)"
            value = d[name] * d1 ** (-1.0 / co) * d2 ** (-s / ci)
        elif th.regime == REGIME_SUM_EQ_1:
            name, profile = "Dp_zero", "d1**(-1/co) * d2**(-1/ci) * ln(d2)"
            value = d[name] * d1 ** (-1.0 / co) * d2 ** (-1.0 / ci) * math.log(d2)
        else:
            name, profile = "D_plus", "d1**(-1/co) * d2**(-1/ci)"
            value = d[name] * d1 ** (-1.0 / co) * d2 ** (-1.0 / ci)
    return AsymptoteResult(value=value, constant_name=name, constant=d[name], profile=profile)
