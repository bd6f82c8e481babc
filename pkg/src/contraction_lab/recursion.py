"""Deterministic worst-case recursion for the mean-contraction norm.

Given the spectrum rho of the mean contraction, the matrix sequence
N_0 = Mbar, N_{t+1} = N_t (I - 2 Mbar) + ||N_t|| Mbar is diagonal in Mbar's
eigenbasis, so it reduces to the per-eigenvalue recursion

    lambda_{k,t+1} = lambda_{k,t} (1 - 2 rho_k) + rho_k * max_i lambda_{i,t}.

The eigenvalue form is the fast path (O(n) per step); the matrix form is
kept as a cross-check oracle.  Also here: log-log rate fitting and the
slowly-decaying spectrum family used for the lower-bound construction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError, InvalidWindowError, NonCommutingError
from .linalg import spectral_norm
from .validation import check_psd, check_symmetric, check_vector

log = logging.getLogger(__name__)

# Eigenvalues this small are flushed to zero to keep 20-order-of-magnitude
# spectra from underflowing into denormals.
UNDERFLOW_CLAMP = 1e-300


def _check_spectrum(rho) -> np.ndarray:
    rho = check_vector(rho, name="rho")
    if np.any(rho < 0.0) or np.any(rho > 1.0):
        raise InvalidInputError("spectrum entries must lie in [0, 1]")
    return rho


@dataclass
class EigenRecursionState:
    """Spectrum rho of the mean contraction plus current eigenvalues of N_t."""

    rho: np.ndarray
    lam: np.ndarray
    t: int = 0


def initial_state(rho) -> EigenRecursionState:
    rho = _check_spectrum(rho)
    return EigenRecursionState(rho=rho, lam=rho.copy(), t=0)


def _advance(lam: np.ndarray, rho: np.ndarray) -> np.ndarray:
    out = lam * (1.0 - 2.0 * rho) + rho * lam.max()
    tiny = (out != 0.0) & (np.abs(out) < UNDERFLOW_CLAMP)
    if np.any(tiny):
        log.warning("clamping %d eigenvalues below %g to zero", int(tiny.sum()), UNDERFLOW_CLAMP)
        out[tiny] = 0.0
    return out


def eig_recursion_step(state: EigenRecursionState) -> EigenRecursionState:
    """One exact step of the eigenvalue recursion."""
    return EigenRecursionState(rho=state.rho, lam=_advance(state.lam, state.rho), t=state.t + 1)


def eig_recursion_path(rho, T: int) -> np.ndarray:
    """Full (T+1) x n table of eigenvalue trajectories, starting at N_0 = Mbar."""
    rho = _check_spectrum(rho)
    path = np.empty((T + 1, rho.shape[0]))
    lam = rho.copy()
    path[0] = lam
    for t in range(1, T + 1):
        lam = _advance(lam, rho)
        path[t] = lam
    return path


def max_trace(rho, T: int) -> np.ndarray:
    """mu_t = max_k lambda_{k,t} for t = 0 .. T (the operator norm of N_t)."""
    rho = _check_spectrum(rho)
    mu = np.empty(T + 1)
    lam = rho.copy()
    mu[0] = lam.max()
    for t in range(1, T + 1):
        lam = _advance(lam, rho)
        mu[t] = lam.max()
    return mu


def matrix_recursion_step(N, Mbar) -> np.ndarray:
    """One step of the matrix recursion; requires N to commute with Mbar."""
    N = check_symmetric(N, name="N")
    Mbar = check_psd(Mbar, name="Mbar")
    comm = N @ Mbar - Mbar @ N
    scale = 1.0 + np.linalg.norm(N) * np.linalg.norm(Mbar)
    if np.linalg.norm(comm) > 1e-8 * scale:
        raise NonCommutingError(f"commutator norm {np.linalg.norm(comm):.3e} too large")
    out = N @ (np.eye(N.shape[0]) - 2.0 * Mbar) + spectral_norm(N) * Mbar
    return 0.5 * (out + out.T)


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple[int, int]


def fit_loglog(trace, window: tuple[int, int]) -> RateFit:
    """Least-squares fit of log(trace[t]) against log(t) over t in the window.

    The trace is indexed by t starting at 0; only t >= 1 can participate.
    """
    trace = check_vector(trace, name="trace")
    lo, hi = int(window[0]), int(window[1])
    lo = max(lo, 1)
    hi = min(hi, trace.shape[0] - 1)
    if hi < lo + 1:
        raise InvalidWindowError(f"window [{lo}, {hi}] has fewer than two points")
    values = trace[lo : hi + 1]
    if np.any(values <= 0.0):
        raise InvalidWindowError("trace must be strictly positive on the fit window")
    x = np.log(np.arange(lo, hi + 1, dtype=float))
    y = np.log(values)
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    sxy = float(((x - xm) * (y - ym)).sum())
    slope = sxy / sxx
    intercept = ym - slope * xm
    sst = float(((y - ym) ** 2).sum())
    # A flat trace (sst at rounding level) is a perfect zero-slope fit.
    if sst <= 1e-24 * len(y) * max(1.0, ym * ym):
        r_squared = 1.0
    else:
        residual = y - (intercept + slope * x)
        r_squared = min(max(1.0 - float((residual**2).sum()) / sst, 0.0), 1.0)
    return RateFit(slope=slope, intercept=intercept, r_squared=r_squared, window=(lo, hi))


def default_fit_window(T: int) -> tuple[int, int]:
    """Last two decades of the horizon; the early transient pollutes the slope."""
    return max(1, T // 100), T


def loglin_spectrum(n: int, hi: float, lo: float) -> np.ndarray:
    """n eigenvalues spread evenly in log scale from hi down to lo."""
    if n < 1 or hi <= 0 or lo <= 0:
        raise InvalidInputError("loglin spectrum needs n >= 1 and positive endpoints")
    return _check_spectrum(np.logspace(np.log10(hi), np.log10(lo), n))


def lower_bound_family(T: int) -> np.ndarray:
    """Spectrum rho_m = (1 - exp(-3/(2m)))/2 for m = 1..T.

    Feeding this family to the recursion keeps mu_t * (t+1)^0.753 bounded
    below by a positive constant, witnessing the near-3/4 lower bound.
    """
    if T < 1:
        raise InvalidInputError("family size T must be >= 1")
    m = np.arange(1, T + 1, dtype=float)
    return (1.0 - np.exp(-1.5 / m)) / 2.0


@dataclass
class UpperEnvelopeReport:
    """Result of checking mu_t against C/(t+1)^alpha (even t) or C/(t+2)^alpha (odd)."""

    alpha: float
    C: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_upper_hypothesis(rho, T: int, alpha: float, C: float) -> UpperEnvelopeReport:
    """Flag every t <= T where mu_t escapes the even/odd envelope."""
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError("alpha must lie in (0, 1)")
    if C <= 0.0:
        raise InvalidInputError("C must be positive")
    mu = max_trace(rho, T)
    t = np.arange(T + 1, dtype=float)
    shift = np.where(np.arange(T + 1) % 2 == 0, 1.0, 2.0)
    bound = C / (t + shift) ** alpha
    report = UpperEnvelopeReport(alpha=alpha, C=C)
    for i in np.nonzero(mu > bound)[0]:
        report.violations.append((int(i), float(mu[i]), float(bound[i])))
    return report


def increments_alternate(series, t_lo: int, t_hi: int) -> bool:
    """True when consecutive increments of the series strictly flip sign.

    Compares sign(series[t+1] - series[t]) for t in [t_lo, t_hi]; a zero
    increment counts as a failure to alternate.
    """
    series = check_vector(series, name="series")
    d = np.sign(np.diff(series))
    t_hi = min(t_hi, d.shape[0] - 1)
    if t_hi <= t_lo:
        raise InvalidInputError("need at least two increments to test alternation")
    window = d[t_lo : t_hi + 1]
    if np.any(window == 0.0):
        return False
    return bool(np.all(window[1:] == -window[:-1]))
