"""C-spectrum, von Neumann trace bounds for Hermitian pairs, and sampled
C-numerical range {tr(C U* A U)} over Haar-random unitaries."""

from __future__ import annotations

import itertools
import math
from typing import NamedTuple

import numpy as np

from .linalg import hermitian_eig

MAX_SPECTRUM_DIM = 7


def _check_square(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square")
    return a


def _check_normal(a, name: str, tol: float = 1e-9) -> np.ndarray:
    a = _check_square(a, name)
    scale = max(1.0, float(np.max(np.abs(a))) ** 2)
    comm = a @ a.conj().T - a.conj().T @ a
    if float(np.max(np.abs(comm))) > tol * scale:
        raise ValueError(f"{name} is not normal within tolerance")
    return a


def c_spectrum(c, t, dedup_tol: float = 1e-10) -> np.ndarray:
    """All sums sum_i lambda_i(C) lambda_{pi(i)}(T) over permutations pi.

    Both matrices must be normal; the result is deduplicated.  These points
    are attained in the C-numerical range by eigenbasis permutation
    unitaries.
    """
    c = _check_normal(c, "C")
    t = _check_normal(t, "T")
    n = c.shape[0]
    if c.shape != t.shape:
        raise ValueError("C and T must have equal size")
    if math.factorial(n) > 5040:
        raise ValueError(f"c_spectrum capped at n = {MAX_SPECTRUM_DIM}")
    lc = np.linalg.eigvals(c)
    lt = np.linalg.eigvals(t)
    perms = np.array(list(itertools.permutations(range(n))))
    values = lt[perms] @ lc
    out: list[complex] = []
    for v in sorted(values, key=lambda z: (z.real, z.imag)):
        if not out or abs(v - out[-1]) > dedup_tol:
            out.append(v)
    return np.array(out)


class OrbitExtrema(NamedTuple):
    sup: float
    inf: float


def unitary_orbit_extrema(c, t) -> OrbitExtrema:
    """Exact sup and inf of tr(C U* T U) over unitaries, for Hermitian C, T.

    tr(C U* T U) = lc^T S lt with S doubly stochastic, so the extrema are
    attained at permutations: sup pairs both spectra sorted alike, inf pairs
    them oppositely.
    """
    wc, _ = hermitian_eig(np.asarray(c, dtype=complex))
    wt, _ = hermitian_eig(np.asarray(t, dtype=complex))
    if wc.shape != wt.shape:
        raise ValueError("C and T must have equal size")
    return OrbitExtrema(sup=float(wc @ wt), inf=float(wc @ wt[::-1]))


def haar_unitaries(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of Haar-distributed unitaries via QR with phase correction."""
    z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n)))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.einsum("...ii->...i", r)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def c_numerical_range_sample(c, a, count: int, seed: int = 0) -> np.ndarray:
    """count samples of tr(C U* A U) at Haar-random unitaries (seeded)."""
    c = _check_square(c, "C")
    a = _check_square(a, "A")
    if c.shape != a.shape:
        raise ValueError("C and A must have equal size")
    rng = np.random.default_rng(seed)
    us = haar_unitaries(c.shape[0], count, rng)
    conj = np.einsum("kba,bc,kcd->kad", us.conj(), a, us)
    return np.einsum("ab,kba->k", c, conj)


__all__ = [
    "OrbitExtrema",
    "c_numerical_range_sample",
    "c_spectrum",
    "haar_unitaries",
    "unitary_orbit_extrema",
]
