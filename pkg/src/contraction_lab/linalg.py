"""Dense symmetric linear algebra used throughout the package.

Thin, contract-checked wrappers over LAPACK (via numpy): eigendecomposition,
weighted norms, row-space projections, and minimum-norm least squares.  Sizes
here are a few hundred at most, so dense routines are the right tool.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError
from .validation import check_array, check_psd, check_symmetric, check_vector

# Singular values below RANK_CUTOFF * sigma_max are treated as exact zeros so
# rank-deficient sketches do not blow up the pseudoinverse.
RANK_CUTOFF = 1e-10


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues (descending) and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U, d = self.eigenvectors, self.eigenvalues
        return (U * d) @ U.T


def sym_eig(S) -> EigenPair:
    """Full eigendecomposition of a symmetric matrix, eigenvalues descending."""
    A = check_symmetric(S)
    w, U = np.linalg.eigh(A)
    order = np.argsort(w)[::-1]
    return EigenPair(eigenvalues=w[order], eigenvectors=U[:, order])


def m_norm_sq(x, M) -> float:
    """Quadratic form x'Mx for PSD M, clamped to >= 0 against roundoff."""
    M = check_symmetric(M)
    v = check_vector(x, dim=M.shape[0])
    value = float(v @ M @ v)
    scale = float(np.abs(M).max() * (v @ v))
    if value < -1e-8 * (1.0 + scale):
        raise InvalidInputError(f"quadratic form is negative ({value:.3e}); M is not PSD")
    return max(value, 0.0)


def spectral_norm(S) -> float:
    """Largest eigenvalue of a symmetric PSD matrix."""
    A = check_psd(S)
    return float(np.linalg.eigvalsh(A)[-1])


def row_space_projection(B) -> np.ndarray:
    """Orthogonal projection onto the row space of a b x n matrix.

    The all-zero matrix maps to the rank-0 (zero) projection.
    """
    A = check_array(B, name="B")
    n = A.shape[1]
    if not A.any():
        return np.zeros((n, n))
    # P = V_r V_r' from the SVD, with small singular values dropped.
    _, s, Vt = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > RANK_CUTOFF * s[0]))
    Vr = Vt[:rank].T
    P = Vr @ Vr.T
    return 0.5 * (P + P.T)


def pseudoinverse_apply(B, r) -> np.ndarray:
    """Minimum-norm least-squares solution B^+ r."""
    A = check_array(B, name="B")
    v = check_vector(r, name="r", dim=A.shape[0])
    x, *_ = np.linalg.lstsq(A, v, rcond=RANK_CUTOFF)
    return x


def inverse_sqrt(B) -> np.ndarray:
    """B^{-1/2} for a positive definite symmetric matrix."""
    pair = sym_eig(B)
    w = pair.eigenvalues
    if w[-1] <= 0:
        raise InvalidInputError("matrix must be positive definite for inverse_sqrt")
    U = pair.eigenvectors
    return (U / np.sqrt(w)) @ U.T
