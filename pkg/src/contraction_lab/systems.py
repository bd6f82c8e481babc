"""Consistent linear systems: container, text format, and generators.

Text format (whitespace separated, ``#`` starts a comment line):

    m n
    <m rows of n reals>          # the matrix
    <m reals>                    # the right-hand side
    <n reals>                    # optional known solution

"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InconsistentSystemError, InvalidInputError
from .validation import check_array, check_vector

CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class LinearSystem:
    """An m x n system A x = b, consistent by construction."""

    A: np.ndarray
    b: np.ndarray
    x_star: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def residual_norm(self, x) -> float:
        return float(np.linalg.norm(self.A @ x - self.b))


def make_system(A, b, x_star=None, allow_zero_rows=False) -> LinearSystem:
    """Validate and build a LinearSystem; checks consistency when x_star is given."""
    A = check_array(A, name="A")
    b = check_vector(b, name="b", dim=A.shape[0])
    row_norms = np.linalg.norm(A, axis=1)
    if not allow_zero_rows and np.any(row_norms == 0.0):
        raise InvalidInputError("system has all-zero rows; they cannot be sampled")
    if x_star is not None:
        x_star = check_vector(x_star, name="x_star", dim=A.shape[1])
        gap = float(np.linalg.norm(A @ x_star - b))
        if gap > CONSISTENCY_TOL * (1.0 + float(np.linalg.norm(b))):
            raise InconsistentSystemError(f"A x_star - b has norm {gap:.3e}")
    return LinearSystem(A=A, b=b, x_star=x_star)


def with_solution(system: LinearSystem) -> LinearSystem:
    """Return an equivalent system whose x_star is populated.

    When no solution is stored, the minimum-norm solution is computed once by
    least squares; an unsolvable system raises InconsistentSystemError.
    """
    if system.x_star is not None:
        return system
    x, *_ = np.linalg.lstsq(system.A, system.b, rcond=None)
    gap = system.residual_norm(x)
    if gap > CONSISTENCY_TOL * (1.0 + float(np.linalg.norm(system.b))):
        raise InconsistentSystemError(f"system is inconsistent: best residual {gap:.3e}")
    return LinearSystem(A=system.A, b=system.b, x_star=x)


def gaussian_system(m: int, n: int, seed, scale=1.0) -> LinearSystem:
    """Random consistent system: Gaussian A and x_star, b = A x_star."""
    from .rng import generator

    rng = generator(seed)
    A = scale * rng.standard_normal((m, n))
    x_star = rng.standard_normal(n)
    return LinearSystem(A=A, b=A @ x_star, x_star=x_star)


def load_system(path, allow_zero_rows=False) -> LinearSystem:
    """Read a system from the plain-text format described in the module docstring."""
    tokens: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
    if len(tokens) < 2:
        raise InvalidInputError(f"{path}: missing 'm n' header")
    try:
        m, n = int(tokens[0]), int(tokens[1])
        values = [float(tok) for tok in tokens[2:]]
    except ValueError as exc:
        raise InvalidInputError(f"{path}: malformed number: {exc}") from exc
    if m < 1 or n < 1:
        raise InvalidInputError(f"{path}: dimensions must be positive, got {m} x {n}")
    need, extra = m * n + m, m * n + m + n
    if len(values) == need:
        x_star = None
    elif len(values) == extra:
        x_star = np.array(values[need:])
    else:
        raise InvalidInputError(
            f"{path}: expected {need} or {extra} values after the header, got {len(values)}"
        )
    A = np.array(values[: m * n]).reshape(m, n)
    b = np.array(values[m * n : need])
    return make_system(A, b, x_star, allow_zero_rows=allow_zero_rows)


def save_system(path, system: LinearSystem) -> None:
    m, n = system.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{m} {n}\n")
        for row in system.A:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
        fh.write(" ".join(repr(float(v)) for v in system.b) + "\n")
        if system.x_star is not None:
            fh.write(" ".join(repr(float(v)) for v in system.x_star) + "\n")
