"""Tests for the cyclic Jacobi eigen-solver."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geometry.eigen import canonical_eigh, jacobi_eigh

entry = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)


@st.composite
def symmetric_matrices(draw):
    n = draw(st.integers(min_value=2, max_value=6))
    a = np.array(draw(st.lists(st.lists(entry, min_size=n, max_size=n), min_size=n, max_size=n)))
    return 0.5 * (a + a.T)


@given(symmetric_matrices())
def test_reconstructs_matrix(m):
    w, q = canonical_eigh(m)
    assert np.allclose(q @ np.diag(w) @ q.T, m, atol=1e-9)
    assert np.allclose(q.T @ q, np.eye(m.shape[0]), atol=1e-10)


@given(symmetric_matrices())
def test_agrees_with_lapack(m):
    w, _ = canonical_eigh(m)
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(m), atol=1e-9)


@given(symmetric_matrices())
def test_canonical_order(m):
    w, q = canonical_eigh(m)
    positive = w[w > 0]
    negative = w[w <= 0]
    assert np.array_equal(w, np.concatenate([positive, negative]))
    assert np.all(np.diff(np.abs(positive)) <= 0)
    assert np.all(np.diff(np.abs(negative)) <= 0)
    for j in range(q.shape[1]):
        nonzero = q[np.abs(q[:, j]) > 1e-12, j]
        assert nonzero.size == 0 or nonzero[0] > 0


def test_known_indefinite_matrix():
    w, q = canonical_eigh(np.array([[1.0, 0.0], [0.0, -4.0]]))
    assert w.tolist() == [1.0, -4.0]
    assert np.array_equal(q, np.eye(2))


def test_negative_eigenvalues_sorted_by_magnitude():
    w, _ = canonical_eigh(np.diag([-1.0, 2.0, -5.0, 0.5]))
    assert w.tolist() == [2.0, 0.5, -5.0, -1.0]


def test_deterministic():
    m = np.array([[2.0, 0.3, -0.1], [0.3, -1.0, 0.4], [-0.1, 0.4, 0.5]])
    w1, q1 = canonical_eigh(m)
    w2, q2 = canonical_eigh(m)
    assert np.array_equal(w1, w2) and np.array_equal(q1, q2)


def test_reports_sweeps_and_convergence():
    res = jacobi_eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert res.sweeps >= 1
    assert res.off_norm <= 1e-12
    assert sorted(res.eigenvalues.tolist()) == pytest.approx([1.0, 3.0])


def test_rejects_non_square():
    with pytest.raises(ValueError, match="square"):
        jacobi_eigh(np.zeros((2, 3)))
