"""Jacobi eigensolver against the LAPACK oracle."""

import numpy as np
import pytest

from bandgap.linalg import jacobi_eigh


@pytest.mark.parametrize("n", [4, 32, 96])
def test_matches_lapack(n):
    rng = np.random.default_rng(n)
    a = rng.standard_normal((n, n))
    a = (a + a.T) / 2
    w, v = jacobi_eigh(a)
    w_ref = np.linalg.eigvalsh(a)
    scale = np.abs(w_ref).max()
    assert np.abs(w - w_ref).max() <= 1e-11 * scale
    assert np.abs(v.T @ v - np.eye(n)).max() <= 1e-12
    for i in range(n):
        assert np.linalg.norm(a @ v[:, i] - w[i] * v[:, i]) <= 1e-11 * scale


def test_eigenvalues_sorted_ascending():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((20, 20))
    a = (a + a.T) / 2
    w, _ = jacobi_eigh(a)
    assert np.all(np.diff(w) >= 0)


def test_diagonal_matrix():
    d = np.diag([3.0, -1.0, 2.0, 0.5])
    w, v = jacobi_eigh(d)
    assert np.allclose(w, sorted([3.0, -1.0, 2.0, 0.5]))
    assert np.abs(np.abs(v).max(axis=0) - 1.0).max() <= 1e-14


def test_input_validation():
    with pytest.raises(ValueError):
        jacobi_eigh(np.ones((3, 4)))
    bad = np.array([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(ValueError):
        jacobi_eigh(bad)


def test_wide_dynamic_range():
    # kinetic-dominated structure: huge diagonal spread with small couplings
    n = 64
    diag = np.arange(1, n + 1, dtype=float) ** 2 * 10.0
    a = np.diag(diag)
    rng = np.random.default_rng(0)
    off = rng.standard_normal((n, n))
    a += 0.5 * (off + off.T)
    w, v = jacobi_eigh(a)
    w_ref = np.linalg.eigvalsh(a)
    assert np.abs(w - w_ref).max() <= 1e-10 * np.abs(w_ref).max()
    r = np.linalg.norm(a @ v[:, 0] - w[0] * v[:, 0])
    assert r <= 1e-9
