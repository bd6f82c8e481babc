"""Abstract stochastic contraction processes and Monte Carlo estimation.

A process applies independent random PSD contractions M_t (0 <= M_t <= I in
the Loewner order, common mean mbar) to a vector: delta_{t+1} = (I - M_t)
delta_t.  This module simulates trajectories, tracks the running-average
iterate, estimates expectations over replicates, and checks the O(1/t)
averaged-iterate guarantee.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import InvalidContractionError, InvalidInputError
from .rng import generator, spawn_generators
from .solvers import RowSampler
from .systems import LinearSystem, with_solution
from .validation import check_psd, check_symmetric, check_vector

CONTRACTION_TOL = 1e-10
THREADS_ENV = "CONTRACTION_LAB_THREADS"


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class ContractionProcess:
    """Sampler-defined process; mbar must equal the sampler's mean."""

    dim: int
    sampler: Callable[[np.random.Generator], np.ndarray]
    mbar: np.ndarray
    delta0: np.ndarray


@dataclass
class ContractionTrace:
    """One trajectory: squared norms of delta_t and of the running average."""

    norm_sq: np.ndarray
    mnorm_sq: np.ndarray
    avg_mnorm_sq: np.ndarray


@dataclass
class MonteCarloTrace:
    """Per-step sample means and standard errors over independent replicates."""

    replicates: int
    mean_norm_sq: np.ndarray
    mean_mnorm_sq: np.ndarray
    mean_avg_mnorm_sq: np.ndarray
    stderr_norm_sq: np.ndarray
    stderr_mnorm_sq: np.ndarray
    stderr_avg_mnorm_sq: np.ndarray


@dataclass
class AveragedBoundReport:
    """Outcome of checking mean ||avg delta_t||_mbar^2 <= ||delta_0||^2/(t+1)."""

    bound: np.ndarray
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def process_step(delta, M, validate=True) -> np.ndarray:
    """Apply one contraction: (I - M) delta.  Validates 0 <= M <= I by default."""
    M = check_symmetric(M, name="M")
    delta = check_vector(delta, name="delta", dim=M.shape[0])
    if validate:
        w = np.linalg.eigvalsh(M)
        if w[0] < -CONTRACTION_TOL or w[-1] > 1.0 + CONTRACTION_TOL:
            raise InvalidContractionError(
                f"contraction eigenvalues [{w[0]:.3e}, {w[-1]:.3e}] leave [0, 1]"
            )
    return delta - M @ delta


def run_process(process: ContractionProcess, T: int, seed=None, rng=None, validate=False) -> ContractionTrace:
    """Simulate one trajectory for T steps, recording t = 0 .. T."""
    if T < 0:
        raise InvalidInputError("step count T must be >= 0")
    if rng is None:
        rng = generator(seed)
    mbar = check_symmetric(process.mbar, name="mbar")
    delta = check_vector(process.delta0, name="delta0", dim=process.dim).copy()
    running_sum = np.zeros_like(delta)

    norm_sq = np.empty(T + 1)
    mnorm_sq = np.empty(T + 1)
    avg_mnorm_sq = np.empty(T + 1)

    def quad(v) -> float:
        return max(float(v @ (mbar @ v)), 0.0)

    for t in range(T + 1):
        running_sum += delta
        avg = running_sum / (t + 1)
        norm_sq[t] = float(delta @ delta)
        mnorm_sq[t] = quad(delta)
        avg_mnorm_sq[t] = quad(avg)
        if t < T:
            M = process.sampler(rng)
            if validate:
                delta = process_step(delta, M, validate=True)
            else:
                delta = delta - M @ delta
    return ContractionTrace(norm_sq=norm_sq, mnorm_sq=mnorm_sq, avg_mnorm_sq=avg_mnorm_sq)


def monte_carlo(process: ContractionProcess, T: int, replicates: int, seed) -> MonteCarloTrace:
    """Mean and standard error of the trace over independent replicate streams.

    Replicate k always uses child stream k of the seed, so results are
    identical whether replicates run serially or on a thread pool
    (capped by the CONTRACTION_LAB_THREADS environment variable).
    """
    if replicates < 2:
        raise InvalidInputError("monte_carlo needs replicates >= 2 for standard errors")
    rngs = spawn_generators(seed, replicates)

    def one(k: int) -> ContractionTrace:
        return run_process(process, T, rng=rngs[k])

    workers = min(_worker_count(), replicates)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(one, range(replicates)))
    else:
        traces = [one(k) for k in range(replicates)]

    def reduce(series: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        stack = np.vstack(series)
        mean = stack.mean(axis=0)
        std = stack.std(axis=0, ddof=1)
        # Columns where every replicate produced the identical float have
        # sample deviation exactly zero; strided summation would otherwise
        # leave ulp-level noise here.
        same = np.all(stack == stack[0], axis=0)
        mean[same] = stack[0][same]
        std[same] = 0.0
        return mean, std / np.sqrt(replicates)

    m_n, s_n = reduce([tr.norm_sq for tr in traces])
    m_m, s_m = reduce([tr.mnorm_sq for tr in traces])
    m_a, s_a = reduce([tr.avg_mnorm_sq for tr in traces])
    return MonteCarloTrace(
        replicates=replicates,
        mean_norm_sq=m_n,
        mean_mnorm_sq=m_m,
        mean_avg_mnorm_sq=m_a,
        stderr_norm_sq=s_n,
        stderr_mnorm_sq=s_m,
        stderr_avg_mnorm_sq=s_a,
    )


def check_averaged_bound(trace: MonteCarloTrace, delta0_norm_sq: float, sigmas=3.0) -> AveragedBoundReport:
    """Flag steps where the averaged-iterate mean exceeds ||delta_0||^2/(t+1)
    by more than ``sigmas`` standard errors."""
    T = trace.mean_avg_mnorm_sq.shape[0] - 1
    t = np.arange(T + 1)
    bound = delta0_norm_sq / (t + 1)
    slack = bound + sigmas * trace.stderr_avg_mnorm_sq
    violations = [int(i) for i in np.nonzero(trace.mean_avg_mnorm_sq > slack)[0]]
    return AveragedBoundReport(bound=bound, violations=violations)


def fixed_matrix_process(M, delta0) -> ContractionProcess:
    """Deterministic process that applies the same contraction every step."""
    M = check_psd(M, name="M")
    delta0 = check_vector(delta0, name="delta0", dim=M.shape[0])
    return ContractionProcess(dim=M.shape[0], sampler=lambda rng: M, mbar=M, delta0=delta0)


def kaczmarz_process(system: LinearSystem, x0=None) -> ContractionProcess:
    """The row-projection process of a consistent system.

    Samples rows with probability proportional to squared norm and applies
    the rank-1 projection onto the sampled row; the mean contraction is
    A'A / ||A||_F^2 and delta_0 = x_0 - x_star.
    """
    system = with_solution(system)
    A = system.A
    sampler_rows = RowSampler.from_squared_row_norms(A)
    projections = [np.outer(row, row) / float(row @ row) for row in A]

    def sample(rng: np.random.Generator) -> np.ndarray:
        return projections[sampler_rows.sample(rng)]

    mbar = A.T @ A / float(np.sum(A * A))
    n = A.shape[1]
    x0 = np.zeros(n) if x0 is None else check_vector(x0, name="x0", dim=n)
    return ContractionProcess(dim=n, sampler=sample, mbar=mbar, delta0=x0 - system.x_star)


def coordinate_descent_process(system: LinearSystem, x0=None) -> ContractionProcess:
    """The coordinate-descent process of a PSD system in the A^{1/2} geometry.

    delta_t = A^{1/2}(x_t - x_star); contractions are rank-1 projections onto
    A^{1/2} e_i with Pr[i] proportional to A_ii; the mean is A / tr(A).
    """
    system = with_solution(system)
    A = check_psd(system.A, name="A")
    w, U = np.linalg.eigh(A)
    root = (U * np.sqrt(np.clip(w, 0.0, None))) @ U.T
    diag = np.diag(A)
    sampler_rows = RowSampler.from_diagonal(A)
    projections = [np.outer(root[:, i], root[:, i]) / diag[i] for i in range(A.shape[0])]

    def sample(rng: np.random.Generator) -> np.ndarray:
        return projections[sampler_rows.sample(rng)]

    mbar = A / float(np.trace(A))
    n = A.shape[1]
    x0 = np.zeros(n) if x0 is None else check_vector(x0, name="x0", dim=n)
    return ContractionProcess(dim=n, sampler=sample, mbar=mbar, delta0=root @ (x0 - system.x_star))
