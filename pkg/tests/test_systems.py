import numpy as np
import pytest

from contraction_lab.exceptions import InconsistentSystemError, InvalidInputError
from contraction_lab.systems import (
    gaussian_system,
    load_system,
    make_system,
    save_system,
    with_solution,
)


def test_gaussian_system_is_consistent():
    system = gaussian_system(10, 4, seed=0)
    assert system.residual_norm(system.x_star) <= 1e-10


def test_gaussian_system_reproducible():
    a = gaussian_system(6, 3, seed=123)
    b = gaussian_system(6, 3, seed=123)
    assert np.array_equal(a.A, b.A) and np.array_equal(a.b, b.b)


def test_make_system_rejects_inconsistent_x_star():
    A = np.eye(2)
    with pytest.raises(InconsistentSystemError):
        make_system(A, [1.0, 1.0], x_star=[5.0, 5.0])


def test_make_system_rejects_zero_rows():
    A = np.array([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(InvalidInputError):
        make_system(A, [1.0, 0.0])
    make_system(A, [1.0, 0.0], allow_zero_rows=True)  # explicit opt-in


def test_with_solution_minimum_norm():
    A = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    system = make_system(A, [2.0, 3.0])
    solved = with_solution(system)
    # Oracle: least-squares min-norm solution.
    expected, *_ = np.linalg.lstsq(A, np.array([2.0, 3.0]), rcond=None)
    assert np.allclose(solved.x_star, expected)
    assert np.allclose(solved.x_star, [2.0, 3.0, 0.0])


def test_with_solution_flags_unsolvable():
    A = np.array([[1.0, 0.0], [1.0, 0.0]])
    system = make_system(A, [0.0, 1.0])
    with pytest.raises(InconsistentSystemError):
        with_solution(system)


def test_save_load_roundtrip_exact(tmp_path):
    system = gaussian_system(5, 3, seed=7)
    path = tmp_path / "sys.txt"
    save_system(path, system)
    loaded = load_system(path)
    assert np.array_equal(loaded.A, system.A)
    assert np.array_equal(loaded.b, system.b)
    assert np.array_equal(loaded.x_star, system.x_star)


def test_load_without_solution_and_comments(tmp_path):
    path = tmp_path / "sys.txt"
    path.write_text("# toy system\n2 2\n1 0\n0 1\n3 4\n")
    system = load_system(path)
    assert system.x_star is None
    assert np.array_equal(system.b, [3.0, 4.0])


def test_load_rejects_wrong_count(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2 2\n1 0\n0 1\n3\n")
    with pytest.raises(InvalidInputError):
        load_system(path)
