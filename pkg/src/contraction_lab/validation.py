"""Input validation helpers.

All public entry points funnel array arguments through these checks so the
numerical code can assume finite, well-shaped float64 inputs.
"""

from __future__ import annotations

import numpy as np

from .exceptions import InvalidInputError, InvalidMetricError

SYM_TOL = 1e-10
PSD_TOL = 1e-10


def check_array(X, name="X", ndim=2) -> np.ndarray:
    """Coerce to a float64 ndarray of the given rank and reject non-finite entries."""
    A = np.asarray(X, dtype=float)
    if A.ndim != ndim:
        raise InvalidInputError(f"{name} must be {ndim}-dimensional, got shape {A.shape}")
    if A.size == 0:
        raise InvalidInputError(f"{name} must be nonempty")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} contains NaN or Inf entries")
    return A


def check_vector(x, name="x", dim=None) -> np.ndarray:
    v = check_array(x, name=name, ndim=1)
    if dim is not None and v.shape[0] != dim:
        raise InvalidInputError(f"{name} must have length {dim}, got {v.shape[0]}")
    return v


def check_symmetric(S, name="S", tol=SYM_TOL) -> np.ndarray:
    """Validate a square symmetric matrix; symmetrize exactly before returning."""
    A = check_array(S, name=name, ndim=2)
    if A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {A.shape}")
    scale = 1.0 + np.abs(A).max()
    if np.abs(A - A.T).max() > tol * scale:
        raise InvalidInputError(f"{name} is not symmetric within tolerance {tol}")
    return 0.5 * (A + A.T)


def check_psd(S, name="S", tol=PSD_TOL) -> np.ndarray:
    """Validate symmetry and positive semidefiniteness (eigenvalues >= -tol*scale)."""
    A = check_symmetric(S, name=name)
    w = np.linalg.eigvalsh(A)
    scale = 1.0 + max(0.0, w[-1])
    if w[0] < -tol * scale:
        raise InvalidInputError(f"{name} is not PSD: min eigenvalue {w[0]:.3e}")
    return A


def check_positive_definite(S, name="B", tol=PSD_TOL) -> np.ndarray:
    A = check_symmetric(S, name=name)
    w = np.linalg.eigvalsh(A)
    if w[0] <= tol * max(1.0, w[-1]):
        raise InvalidMetricError(f"{name} is not positive definite: min eigenvalue {w[0]:.3e}")
    return A
