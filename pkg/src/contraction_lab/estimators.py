"""Estimator-style front end for the randomized solvers.

Each solver is a scikit-learn compatible estimator: construct with
hyperparameters, ``fit(A, b)`` to run the iteration, read the solution from
``coef_`` and the recorded trajectory from ``trace_``, and ``predict(A)``
to evaluate the fitted linear model.  ``get_params``/``set_params`` come
from ``sklearn.base.BaseEstimator`` so the solvers clone and grid-search
like any other estimator.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .solvers import SolverConfig, run_solver
from .systems import make_system
from .validation import check_array


class _RandomizedSolver(BaseEstimator, RegressorMixin):
    """Shared fit/predict machinery; subclasses pin the update rule."""

    _method: str = ""

    def _config(self) -> SolverConfig:
        seed = self.random_state
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % (2**63))
        return SolverConfig(
            method=self._method,
            seed=seed,
            block_size=getattr(self, "block_size", 1),
            rht=getattr(self, "rht", False),
        )

    def fit(self, A, b, x_star=None):
        system = make_system(A, b, x_star)
        trace = run_solver(system, self._config(), self.n_steps)
        self.coef_ = trace.x_final
        self.trace_ = trace
        self.n_features_in_ = system.shape[1]
        self.residual_norm_ = float(np.sqrt(trace.residual_sq[-1]))
        return self

    def predict(self, A) -> np.ndarray:
        A = check_array(A, name="A")
        return A @ self.coef_


class RandomizedKaczmarz(_RandomizedSolver):
    """Row-projection solver with squared-row-norm importance sampling."""

    _method = "rk"

    def __init__(self, n_steps=1000, random_state=None):
        self.n_steps = n_steps
        self.random_state = random_state


class RandomizedCoordinateDescent(_RandomizedSolver):
    """Coordinate descent on a symmetric PSD system, sampling by diagonal."""

    _method = "rcd"

    def __init__(self, n_steps=1000, random_state=None):
        self.n_steps = n_steps
        self.random_state = random_state


class BlockKaczmarz(_RandomizedSolver):
    """Projection onto blocks of uniformly sampled rows, optionally after RHT."""

    _method = "block"

    def __init__(self, n_steps=1000, block_size=2, rht=False, random_state=None):
        self.n_steps = n_steps
        self.block_size = block_size
        self.rht = rht
        self.random_state = random_state


class SketchAndProject(_RandomizedSolver):
    """Projection onto Gaussian-sketched constraints in the Euclidean metric."""

    _method = "sketch"

    def __init__(self, n_steps=1000, block_size=1, random_state=None):
        self.n_steps = n_steps
        self.block_size = block_size
        self.random_state = random_state
