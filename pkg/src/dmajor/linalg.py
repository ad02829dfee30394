"""Small dense matrix kernel: exponentials, Hermitian eigendecompositions,
permutation matrices.

Everything here operates on plain numpy arrays at desk scale (n <= 16).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


def expm(a: np.ndarray, t: float = 1.0) -> np.ndarray:
    """Return exp(t*a) for a square matrix a.

    Uses scaling-and-squaring with a Pade core; accurate to ~1e-12 relative
    at the sizes used in this package.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expm expects a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or not np.isfinite(t):
        raise ValueError("expm expects finite entries and finite t")
    return scipy.linalg.expm(t * a)


def hermitian_eig(h: np.ndarray, herm_tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (w, u) with eigenvalues w sorted non-increasingly (ties keep the
    ascending-solver order, so the result is deterministic) and unitary u
    such that h = u @ diag(w) @ u^dagger.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"hermitian_eig expects a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    if float(np.max(np.abs(h - h.conj().T))) > herm_tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, u = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    return w[order], u[:, order]


def check_permutation(images) -> np.ndarray:
    """Validate and normalize a permutation given as zero-based image array."""
    p = np.asarray(images, dtype=int)
    n = p.size
    if p.ndim != 1 or n == 0:
        raise ValueError("permutation must be a non-empty 1-d integer array")
    if not np.array_equal(np.sort(p), np.arange(n)):
        raise ValueError(f"{list(images)} is not a permutation of 0..{n - 1}")
    return p


def perm_matrix(images) -> np.ndarray:
    """Permutation matrix P with (P x)_j = x_{images[j]}."""
    p = check_permutation(images)
    m = np.zeros((p.size, p.size))
    m[np.arange(p.size), p] = 1.0
    return m


def perm_inverse(images) -> np.ndarray:
    p = check_permutation(images)
    inv = np.empty_like(p)
    inv[p] = np.arange(p.size)
    return inv


def perm_compose(p, q) -> np.ndarray:
    """Composition p after q: (p o q)(j) = p[q[j]].

    The matrix identity perm_matrix(p o q) = perm_matrix(q) @ perm_matrix(p)
    holds for this convention.
    """
    p = check_permutation(p)
    q = check_permutation(q)
    if p.size != q.size:
        raise ValueError("cannot compose permutations of different lengths")
    return p[q]


def identity_perm(n: int) -> np.ndarray:
    return np.arange(int(n))


def apply_perm(images, x: np.ndarray) -> np.ndarray:
    """Apply the permutation matrix to a vector: result_j = x_{images[j]}."""
    p = check_permutation(images)
    x = np.asarray(x)
    if x.shape[0] != p.size:
        raise ValueError("permutation and vector lengths differ")
    return x[p]
