"""Floating-point evaluation of the envelope function and its relatives.

The scaled discrete sum t^a * B_t(rho, a), with B_t(rho, a) =
rho * sum_{i=1}^t (1-2 rho)^{t-i} / i^a, is dominated by the envelope

    L_a(theta) = theta * Integral_0^1 exp(-2 theta u) (1-u)^(-a) du,

evaluated at theta = (t/2) * (-log(1-2 rho)), and bounded below by the
proper integral Gamma_{a,t}(theta) that replaces (1-u)^(-a) with
(1-u+1/t)^(-a).  Everything in this module is numeric; the exact rational
bounds live in ``certificates`` and never depend on these values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .exceptions import InvalidInputError

# Above this value of x = 2*theta the series is summed in log space over a
# Poisson-concentration window to dodge overflow of x^n/n!.
_LARGE_X = 60.0
_MAX_TERMS = 500


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError("alpha must lie in (0, 1)")
    return alpha


def l_series(alpha: float, theta: float) -> float:
    """Series evaluation L_a(theta) = theta e^{-x} sum_n x^n / (n! (n+1-a)), x = 2 theta."""
    alpha = _check_alpha(alpha)
    theta = float(theta)
    if theta <= 0.0:
        raise InvalidInputError("theta must be positive")
    x = 2.0 * theta
    if x <= _LARGE_X:
        total = 0.0
        term = 1.0
        for n in range(_MAX_TERMS):
            if n:
                term *= x / n
            contrib = term / (n + 1.0 - alpha)
            total += contrib
            if n > x and contrib < 1e-19 * total:
                break
        return theta * math.exp(-x) * total
    # Log-space window: weights e^{-x} x^n / n! concentrate near n = x.
    half_width = 60.0 * math.sqrt(x)
    lo = max(0, int(x - half_width))
    hi = int(x + half_width) + 10
    total = 0.0
    for n in range(lo, hi):
        total += math.exp(n * math.log(x) - math.lgamma(n + 1.0) - x) / (n + 1.0 - alpha)
    return theta * total


def l_quadrature(alpha: float, theta: float) -> float:
    """Adaptive quadrature of the defining integral.

    The algebraic endpoint singularity (1-u)^(-a) is passed to QUADPACK as
    an integration weight, so the integrand supplied is smooth.
    """
    alpha = _check_alpha(alpha)
    theta = float(theta)
    if theta <= 0.0:
        raise InvalidInputError("theta must be positive")
    value, _ = quad(
        lambda u: math.exp(-2.0 * theta * u),
        0.0,
        1.0,
        weight="alg",
        wvar=(0.0, -alpha),
        epsabs=1e-13,
        epsrel=1e-12,
    )
    return theta * value


def gamma_lower_eval(alpha: float, theta: float, t: float, method: str = "auto") -> float:
    """Gamma_{a,t}(theta): the proper-integral lower envelope at horizon t.

    Nondecreasing in t with limit L_a(theta).  For huge t the integrand is
    numerically singular, so the evaluation switches to an exact power-series
    form in the shifted variable.
    """
    alpha = _check_alpha(alpha)
    theta, t = float(theta), float(t)
    if theta <= 0.0 or t < 1.0:
        raise InvalidInputError("need theta > 0 and t >= 1")
    if method not in ("auto", "quad", "series"):
        raise InvalidInputError(f"unknown method {method!r}")
    if method == "quad" or (method == "auto" and t <= 1e6):
        value, _ = quad(
            lambda u: math.exp(-2.0 * theta * u) * (1.0 - u + 1.0 / t) ** (-alpha),
            0.0,
            1.0,
            epsabs=1e-13,
            epsrel=1e-12,
            limit=200,
        )
        return theta * value
    return _gamma_series(alpha, theta, t)


def _gamma_series(alpha: float, theta: float, t: float) -> float:
    # Substituting v = 1-u+1/t gives theta e^{-2 theta (1+1/t)} (G(1+1/t) - G(1/t))
    # with G(z) = sum_n x^n z^{n+1-a} / (n! (n+1-a)); every term is positive.
    x = 2.0 * theta
    eps = 1.0 / t

    def G(z: float) -> float:
        total = 0.0
        coeff = 1.0
        for n in range(_MAX_TERMS):
            if n:
                coeff *= x / n
            term = coeff * z ** (n + 1.0 - alpha) / (n + 1.0 - alpha)
            total += term
            if n > x * z and term < 1e-19 * total:
                break
        return total

    return theta * math.exp(-x * (1.0 + eps)) * (G(1.0 + eps) - G(eps))


def gamma_crossing_time(alpha: float, theta: float, limit: int = 2**60) -> int | None:
    """Smallest integer t with Gamma_{a,t}(theta) >= 1, or None below the limit.

    Monotone convergence makes doubling plus bisection valid.  Near the
    crossing Gamma differs from 1 by less than float precision, so the
    returned index is exact only up to that resolution.
    """
    if gamma_lower_eval(alpha, theta, 1.0, method="series") >= 1.0:
        return 1
    hi = 1
    while gamma_lower_eval(alpha, theta, float(hi), method="series") < 1.0:
        hi *= 2
        if hi > limit:
            return None
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if gamma_lower_eval(alpha, theta, float(mid), method="series") < 1.0:
            lo = mid
        else:
            hi = mid
    return hi


def ode_residual(alpha: float, theta_grid, h: float = 1e-5) -> float:
    """Max | dL/dtheta - (1 - (2 - a/theta) L) | over the grid, by central differences."""
    alpha = _check_alpha(alpha)
    if h <= 0.0:
        raise InvalidInputError("step h must be positive")
    worst = 0.0
    for theta in np.asarray(theta_grid, dtype=float):
        if theta - h <= 0.0:
            raise InvalidInputError("grid point too close to zero for the chosen h")
        derivative = (l_quadrature(alpha, theta + h) - l_quadrature(alpha, theta - h)) / (2.0 * h)
        rhs = 1.0 - (2.0 - alpha / theta) * l_quadrature(alpha, theta)
        worst = max(worst, abs(derivative - rhs))
    return worst


def b_t_scaled(alpha: float, t: int, rho: float) -> float:
    """Compensated evaluation of t^a B_t(rho, a) = sum_i rho (1-2rho)^{t-i} (t/i)^a."""
    alpha = _check_alpha(alpha)
    if t < 1:
        raise InvalidInputError("t must be >= 1")
    if not 0.0 < rho <= 0.5:
        raise InvalidInputError("rho must lie in (0, 1/2]")
    r = 1.0 - 2.0 * rho
    i = np.arange(1, t + 1, dtype=float)
    terms = rho * r ** (t - i) * (t / i) ** alpha
    return math.fsum(terms.tolist())


@dataclass(frozen=True)
class EnvelopeComparison:
    alpha: float
    t: int
    rho: float
    theta: float
    scaled_sum: float
    envelope: float

    @property
    def margin(self) -> float:
        return self.envelope - self.scaled_sum


def b_discrete_vs_envelope(alpha: float, t: int, rho: float) -> EnvelopeComparison:
    """Compare the discrete scaled sum with max(L_a(theta), 1/2).

    At rho = 1/2 only the i = t term survives and the scaled sum is exactly
    1/2; theta is reported as inf there.
    """
    scaled = b_t_scaled(alpha, t, rho)
    if rho >= 0.5:
        return EnvelopeComparison(alpha, t, rho, math.inf, scaled, 0.5)
    theta = 0.5 * t * (-math.log1p(-2.0 * rho))
    envelope = max(l_series(alpha, theta), 0.5)
    return EnvelopeComparison(alpha, t, rho, theta, scaled, envelope)
