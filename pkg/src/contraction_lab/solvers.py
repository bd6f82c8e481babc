"""Randomized iterative solvers for consistent linear systems.

Implements the single-step updates (row projection, coordinate descent,
block projection, sketched projection), randomized-Hadamard preprocessing,
and a seeded driver that records per-iterate distances and residuals.
Each method projects the iterate onto the sketched constraint set in some
metric, so the error contracts monotonically in that metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    InvalidDiagonalError,
    InvalidInputError,
    ZeroRowError,
)
from .linalg import inverse_sqrt, pseudoinverse_apply
from .rng import generator
from .systems import LinearSystem, make_system, with_solution
from .validation import check_array, check_positive_definite, check_psd, check_vector

METHODS = ("rk", "rcd", "block", "sketch")


class RowSampler:
    """Categorical sampler over row indices via cumulative weights."""

    def __init__(self, weights):
        w = check_vector(weights, name="weights")
        if np.any(w < 0) or w.sum() <= 0:
            raise InvalidInputError("weights must be nonnegative with positive sum")
        self.weights = w / w.sum()
        self.cumulative_weights = np.cumsum(self.weights)
        self.cumulative_weights[-1] = 1.0

    @classmethod
    def from_squared_row_norms(cls, A) -> "RowSampler":
        A = check_array(A, name="A")
        return cls(np.einsum("ij,ij->i", A, A))

    @classmethod
    def from_diagonal(cls, A) -> "RowSampler":
        A = check_array(A, name="A")
        return cls(np.diag(A).copy())

    def sample(self, rng: np.random.Generator) -> int:
        return int(np.searchsorted(self.cumulative_weights, rng.random(), side="right"))


def kaczmarz_step(x, a, b_i: float) -> np.ndarray:
    """Orthogonal projection of x onto the hyperplane a'x = b_i."""
    a = check_vector(a, name="a")
    x = check_vector(x, name="x", dim=a.shape[0])
    norm_sq = float(a @ a)
    if norm_sq == 0.0:
        raise ZeroRowError("cannot project onto an all-zero row")
    return x - ((float(a @ x) - b_i) / norm_sq) * a


def rcd_step(x, A, b, i: int) -> np.ndarray:
    """Coordinate-descent update zeroing residual coordinate i of a PSD system."""
    A = np.asarray(A, dtype=float)
    x = check_vector(x, name="x", dim=A.shape[0])
    b = check_vector(b, name="b", dim=A.shape[0])
    diag = float(A[i, i])
    if diag <= 0.0:
        raise InvalidDiagonalError(f"A[{i},{i}] = {diag} must be positive")
    out = x.copy()
    out[i] -= (float(A[i] @ x) - b[i]) / diag
    return out


def block_kaczmarz_step(x, A_S, b_S) -> np.ndarray:
    """Minimum-norm correction solving the sampled block A_S x = b_S."""
    A_S = check_array(A_S, name="A_S")
    x = check_vector(x, name="x", dim=A_S.shape[1])
    b_S = check_vector(b_S, name="b_S", dim=A_S.shape[0])
    return x - pseudoinverse_apply(A_S, A_S @ x - b_S)


def sketch_project_step(x, A, b, S, B=None) -> np.ndarray:
    """Projection of x onto {x : S A x = S b} in the B-norm (B = identity if None).

    Computed as x - B^{-1/2} (S A B^{-1/2})^+ S (A x - b).
    """
    A = check_array(A, name="A")
    x = check_vector(x, name="x", dim=A.shape[1])
    b = check_vector(b, name="b", dim=A.shape[0])
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.shape[1] != A.shape[0]:
        raise InvalidInputError(f"sketch has {S.shape[1]} columns, expected {A.shape[0]}")
    residual = S @ (A @ x - b)
    if B is None:
        return x - pseudoinverse_apply(S @ A, residual)
    B = check_positive_definite(B, name="B")
    W = inverse_sqrt(B)
    return x - W @ pseudoinverse_apply(S @ A @ W, residual)


def fwht(X) -> np.ndarray:
    """Fast Walsh-Hadamard transform (Sylvester order) down the first axis.

    Input length must be a power of two; returns H_m @ X without the 1/sqrt(m)
    normalization.
    """
    Y = np.array(X, dtype=float)
    m = Y.shape[0]
    if m & (m - 1):
        raise InvalidInputError(f"leading dimension {m} is not a power of two")
    h = 1
    while h < m:
        for start in range(0, m, 2 * h):
            top = Y[start : start + h].copy()
            bottom = Y[start + h : start + 2 * h]
            Y[start : start + h] = top + bottom
            Y[start + h : start + 2 * h] = top - bottom
        h *= 2
    return Y


def _next_power_of_two(m: int) -> int:
    p = 1
    while p < m:
        p *= 2
    return p


def rht_preprocess(system: LinearSystem, seed=None, rng=None, signs=None) -> LinearSystem:
    """Randomized Hadamard transform of a system: rows become (H D / sqrt(m')) rows.

    The system is zero-padded to the next power-of-two row count m'.  The
    transform is orthogonal, so Frobenius norms, residuals, and the solution
    set are preserved.  ``signs`` overrides the Rademacher diagonal (tests).
    """
    m, _ = system.shape
    mp = _next_power_of_two(m)
    if signs is None:
        if rng is None:
            rng = generator(seed)
        signs = 2.0 * rng.integers(0, 2, size=mp) - 1.0
    else:
        signs = check_vector(signs, name="signs", dim=mp)
    A_pad = np.zeros((mp, system.A.shape[1]))
    A_pad[:m] = system.A
    b_pad = np.zeros(mp)
    b_pad[:m] = system.b
    scale = 1.0 / np.sqrt(mp)
    QA = fwht(signs[:, None] * A_pad) * scale
    Qb = fwht(signs * b_pad) * scale
    return make_system(QA, Qb, system.x_star, allow_zero_rows=True)


@dataclass(frozen=True)
class SolverConfig:
    """Configuration for run_solver; seed is mandatory for reproducibility."""

    method: str
    seed: int
    block_size: int = 1
    rht: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidInputError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.block_size < 1:
            raise InvalidInputError("block_size must be >= 1")


@dataclass
class SolveTrace:
    """Per-iterate record of one solver trajectory (t = 0 .. T)."""

    method: str
    dist_sq: np.ndarray
    residual_sq: np.ndarray
    mnorm_sq: np.ndarray
    x_final: np.ndarray
    meta: dict = field(default_factory=dict)


def run_solver(system: LinearSystem, config: SolverConfig, T: int, x0=None) -> SolveTrace:
    """Run T steps of the configured method and record the trajectory.

    Records, for t = 0..T, the squared distance to the (possibly computed)
    solution, the squared residual, and the squared residual scaled into the
    mean-contraction norm: residual^2 / ||A||_F^2 for the identity-metric
    methods, residual^2 / tr(A) for coordinate descent.
    """
    if T < 0:
        raise InvalidInputError("step count T must be >= 0")
    rng = generator(config.seed)
    meta: dict = {}
    if config.rht:
        frob_before = float(np.linalg.norm(system.A))
        system = rht_preprocess(system, rng=rng)
        meta["frobenius_before_rht"] = frob_before
        meta["frobenius_after_rht"] = float(np.linalg.norm(system.A))
    system = with_solution(system)
    A, b, x_star = system.A, system.b, system.x_star
    m, n = A.shape

    if config.method == "rcd":
        A = check_psd(A, name="A")
        sampler = RowSampler.from_diagonal(A)
        normalizer = float(np.trace(A))
    else:
        sampler = RowSampler.from_squared_row_norms(A)
        normalizer = float(np.sum(A * A))
    if config.method in ("block", "sketch") and config.block_size > m:
        raise InvalidInputError(f"block_size {config.block_size} exceeds row count {m}")

    x = np.zeros(n) if x0 is None else check_vector(x0, name="x0", dim=n).copy()
    dist_sq = np.empty(T + 1)
    residual_sq = np.empty(T + 1)

    def record(t):
        diff = x - x_star
        dist_sq[t] = float(diff @ diff)
        r = A @ x - b
        residual_sq[t] = float(r @ r)

    record(0)
    for t in range(1, T + 1):
        if config.method == "rk":
            i = sampler.sample(rng)
            x = kaczmarz_step(x, A[i], b[i])
        elif config.method == "rcd":
            i = sampler.sample(rng)
            x = rcd_step(x, A, b, i)
        elif config.method == "block":
            rows = rng.choice(m, size=config.block_size, replace=False)
            x = block_kaczmarz_step(x, A[rows], b[rows])
        else:  # sketch
            S = rng.standard_normal((config.block_size, m))
            x = sketch_project_step(x, A, b, S)
        record(t)

    return SolveTrace(
        method=config.method,
        dist_sq=dist_sq,
        residual_sq=residual_sq,
        mnorm_sq=residual_sq / normalizer,
        x_final=x,
        meta=meta,
    )
