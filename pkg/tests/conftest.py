"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's own linear algebra:
rank comes from Gaussian elimination, singular values from numpy's svd.
Tests compare library output against these routes.
"""

import numpy as np
import pytest

from orbit_locator import make_subspace


def gauss_rank(vectors, tol: float = 1e-9) -> int:
    """Rank by row echelon with partial pivoting."""
    rows = [np.asarray(v, dtype=float).ravel() for v in vectors]
    if not rows:
        return 0
    A = np.array(rows, dtype=float)
    scale = float(np.abs(A).max())
    if scale == 0.0:
        return 0
    m, n = A.shape
    rank = 0
    col = 0
    while rank < m and col < n:
        p = rank + int(np.argmax(np.abs(A[rank:, col])))
        if abs(A[p, col]) <= tol * scale:
            col += 1
            continue
        A[[rank, p]] = A[[p, rank]]
        A[rank] = A[rank] / A[rank, col]
        for i in range(m):
            if i != rank:
                A[i] -= A[i, col] * A[rank]
        rank += 1
        col += 1
    return rank


def svd_sigma(M) -> float:
    """Top singular value via numpy's svd."""
    return float(np.linalg.svd(np.atleast_2d(np.asarray(M, float)),
                               compute_uv=False)[0])


def svd_values(M) -> np.ndarray:
    return np.linalg.svd(np.atleast_2d(np.asarray(M, float)),
                         compute_uv=False)


@pytest.fixture
def diag_sub():
    """Span of the two diagonal matrix units in dimension 2."""
    return make_subspace([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


@pytest.fixture
def ptp():
    """Upper-left 2x2 block units in dimension 3 with a unit-norm block
    component: x = (0.6, 0.8, 0.3), so the orbit span is the block plane
    and the projected length is exactly 1."""
    basis = []
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        B = np.zeros((3, 3))
        B[i, j] = 1.0
        basis.append(B)
    sub = make_subspace(basis)
    x = np.array([0.6, 0.8, 0.3])
    P_expected = np.diag([1.0, 1.0, 0.0])
    return sub, x, P_expected


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
