"""
geometry/eigen.py
-----------------
Cyclic Jacobi eigen-solver for small real symmetric matrices (n <= 8).

Deterministic: the sweep order is fixed (row-major over the strict upper
triangle) and no randomness is involved, so identical inputs give identical
eigenpairs bit-for-bit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger("extgeo.eigen")

DEFAULT_JACOBI_TOL = 1e-12
DEFAULT_MAX_SWEEPS = 64


@dataclass(frozen=True)
class JacobiResult:
    eigenvalues: np.ndarray     # unsorted, diagonal of the rotated matrix
    eigenvectors: np.ndarray    # columns; A = Q diag(w) Q^T
    sweeps: int
    off_norm: float


def _off_norm(a: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.triu(a, 1) ** 2)))


def jacobi_eigh(
    matrix: np.ndarray,
    tol: float = DEFAULT_JACOBI_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> JacobiResult:
    """
    Diagonalize a symmetric matrix with plane rotations.

    The stop criterion is relative: off-diagonal norm <= tol * max(1, ||A||_F).
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"jacobi_eigh expects a square matrix, got shape {a.shape}")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    q = np.eye(n)
    stop = tol * max(1.0, float(np.linalg.norm(a)))

    sweeps = 0
    while _off_norm(a) > stop and sweeps < max_sweeps:
        sweeps += 1
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                # rotation angle zeroing a[p, r]
                theta = (a[r, r] - a[p, p]) / (2.0 * apr)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0.0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[r, r] = c
                rot[p, r] = s
                rot[r, p] = -s
                a = rot.T @ a @ rot
                a[p, r] = a[r, p] = 0.0
                q = q @ rot

    off = _off_norm(a)
    if off > stop:
        logger.warning("jacobi_eigh: not converged after %s sweeps (off=%.3e)", sweeps, off)
    return JacobiResult(eigenvalues=np.diag(a).copy(), eigenvectors=q, sweeps=sweeps, off_norm=off)


def canonical_eigh(
    matrix: np.ndarray,
    tol: float = DEFAULT_JACOBI_TOL,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigenpairs in canonical order: positive eigenvalues by descending magnitude,
    then negative ones by descending magnitude. Each eigenvector's first
    nonzero component is made positive.

    Returns:
        (eigenvalues, Q) with Q's columns the eigenvectors, A = Q diag(w) Q^T.
    """
    res = jacobi_eigh(matrix, tol, max_sweeps)
    w, q = res.eigenvalues, res.eigenvectors
    order = sorted(range(len(w)), key=lambda i: (0 if w[i] > 0 else 1, -abs(w[i])))
    w = w[order]
    q = q[:, order].copy()
    for j in range(q.shape[1]):
        nonzero = np.nonzero(np.abs(q[:, j]) > 1e-12)[0]
        if nonzero.size and q[nonzero[0], j] < 0:
            q[:, j] = -q[:, j]
    return w, q
