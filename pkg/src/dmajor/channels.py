"""Finite-dimensional quantum-channel diagnostics.

Superoperators are stored as dense matrices acting on column-stacked
("vec'd") inputs.  Includes Choi/CP/TP/unital/strict-positivity checks, the
kernel block form of positive-but-not-strictly-positive maps, channel
construction between Hermitian matrices with matching trace and dominated
trace norm, matrix majorization, and the two-dimensional characterization of
majorization relative to a positive definite fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import hermitian_eig
from .majorize import column_stochastic_transfer, majorizes


class PositivityError(Exception):
    """A map assumed positive failed a consequence of positivity."""


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(x).flatten(order="F")


def unvec(v: np.ndarray, rows: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    n = rows if rows is not None else int(round(np.sqrt(v.size)))
    return v.reshape((n, v.size // n), order="F")


def _check_hermitian(a, tol: float = 1e-10, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    if float(np.max(np.abs(a - a.conj().T))) > tol * scale:
        raise ValueError(f"{name} is not Hermitian within tolerance")
    return a


def trace_norm(a) -> float:
    """Sum of singular values; for Hermitian input the sum of |eigenvalues|."""
    return float(np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False).sum())


@dataclass
class SuperOperator:
    """Linear map on matrices, stored as a (dim_out^2 x dim_in^2) matrix in
    the column-stacking convention."""

    dim_in: int
    dim_out: int
    action: np.ndarray

    def __post_init__(self):
        self.action = np.asarray(self.action, dtype=complex)
        if self.action.shape != (self.dim_out ** 2, self.dim_in ** 2):
            raise ValueError("action matrix shape does not match the declared dimensions")

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim_in, self.dim_in):
            raise ValueError("input dimension mismatch")
        return unvec(self.action @ vec(x), self.dim_out)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)

    def compose(self, other: "SuperOperator") -> "SuperOperator":
        """self after other."""
        if other.dim_out != self.dim_in:
            raise ValueError("composition dimension mismatch")
        return SuperOperator(other.dim_in, self.dim_out, self.action @ other.action)

    @classmethod
    def from_function(cls, f, dim_in: int, dim_out: int) -> "SuperOperator":
        action = np.zeros((dim_out ** 2, dim_in ** 2), dtype=complex)
        for j in range(dim_in):
            for i in range(dim_in):
                unit = np.zeros((dim_in, dim_in), dtype=complex)
                unit[i, j] = 1.0
                action[:, i + j * dim_in] = vec(np.asarray(f(unit), dtype=complex))
        return cls(dim_in, dim_out, action)

    @classmethod
    def from_kraus(cls, ops) -> "SuperOperator":
        ops = [np.asarray(k, dtype=complex) for k in ops]
        rows, cols = ops[0].shape
        action = np.zeros((rows ** 2, cols ** 2), dtype=complex)
        for k in ops:
            action += np.kron(k.conj(), k)
        return cls(cols, rows, action)

    @classmethod
    def identity(cls, n: int) -> "SuperOperator":
        return cls(n, n, np.eye(n ** 2, dtype=complex))

    @classmethod
    def trace_projection(cls, state: np.ndarray) -> "SuperOperator":
        """X -> tr(X) * state."""
        state = np.asarray(state, dtype=complex)
        n = state.shape[0]
        return cls.from_function(lambda x: np.trace(x) * state, n, n)


def choi(t: SuperOperator) -> np.ndarray:
    """Block matrix (T(E_jk))_{j,k} of size dim_in*dim_out."""
    n, k = t.dim_in, t.dim_out
    c = np.zeros((n * k, n * k), dtype=complex)
    for j in range(n):
        for l in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[j, l] = 1.0
            c[j * k:(j + 1) * k, l * k:(l + 1) * k] = t.apply(unit)
    return c


def is_cp(t: SuperOperator, tol: float = 1e-9) -> bool:
    """Completely positive iff the Choi matrix is positive semi-definite."""
    c = choi(t)
    scale = max(1.0, float(np.max(np.abs(c))))
    if float(np.max(np.abs(c - c.conj().T))) > tol * scale:
        return False
    w = np.linalg.eigvalsh((c + c.conj().T) / 2)
    return bool(w.min() >= -tol * max(1.0, float(np.abs(w).max())))


def is_tp(t: SuperOperator, tol: float = 1e-9) -> bool:
    """Trace-preserving iff tr T(E_jk) = delta_jk."""
    n = t.dim_in
    for j in range(n):
        for l in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[j, l] = 1.0
            val = np.trace(t.apply(unit))
            if abs(val - (1.0 if j == l else 0.0)) > tol:
                return False
    return True


def is_unital(t: SuperOperator, tol: float = 1e-9) -> bool:
    if t.dim_in != t.dim_out:
        return False
    img = t.apply(np.eye(t.dim_in, dtype=complex))
    return bool(np.max(np.abs(img - np.eye(t.dim_out))) <= tol)


def is_strictly_positive(t: SuperOperator, tol: float = 1e-9) -> bool:
    """For a positive map (caller-asserted): strictly positive iff T(1) > 0."""
    img = _check_hermitian(t.apply(np.eye(t.dim_in, dtype=complex)), 1e-9, "T(1)")
    w = np.linalg.eigvalsh(img)
    return bool(w.min() > tol)


def kernel_block_form(t: SuperOperator, tol: float = 1e-9):
    """Kernel data of a positive map: (m, U, projector).

    m is the kernel dimension of T(1); U is unitary with the kernel spanned
    by its last m columns; the projector pi = U diag(1,..,1,0,..,0) U^dagger
    compresses every image: pi T(A) pi = T(A).  A compression failure means
    the input was not actually positive.
    """
    k = t.dim_out
    img = _check_hermitian(t.apply(np.eye(t.dim_in, dtype=complex)), 1e-9, "T(1)")
    w, u = hermitian_eig(img)
    m = int(np.sum(w < tol))
    proj = u[:, :k - m] @ u[:, :k - m].conj().T
    n = t.dim_in
    for j in range(n):
        for l in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[j, l] = 1.0
            img_unit = t.apply(unit)
            if float(np.max(np.abs(proj @ img_unit @ proj - img_unit))) > 1e-8:
                raise PositivityError(
                    "projector compression failed on a matrix unit; "
                    "the map is not positive"
                )
    return m, u, proj


def pinching_superoperator(m_stochastic: np.ndarray,
                           null_images: dict[int, np.ndarray] | None = None) -> SuperOperator:
    """Diagonal-to-diagonal channel: E_jj -> sum_k M_kj E_kk, off-diagonal
    units -> 0.  Column j may be overridden by an arbitrary state image."""
    m_stochastic = np.asarray(m_stochastic, dtype=float)
    n = m_stochastic.shape[0]
    action = np.zeros((n ** 2, n ** 2), dtype=complex)
    for j in range(n):
        col = np.zeros((n, n), dtype=complex)
        if null_images is not None and j in null_images:
            col = np.asarray(null_images[j], dtype=complex)
        else:
            col[np.arange(n), np.arange(n)] = m_stochastic[:, j]
        action[:, j + j * n] = vec(col)
    return SuperOperator(n, n, action)


def channel_between(a, b, null_state: np.ndarray | None = None,
                    tol: float = 1e-9) -> SuperOperator:
    """A quantum channel T with T(b) = a.

    Exists iff tr(a) = tr(b) and ||a||_1 <= ||b||_1.  Construction:
    eigendecompose both sides, transfer the eigenvalue vectors by a
    column-stochastic matrix, lift it to a pinching channel, and conjugate
    with the eigenbasis unitaries.  Where b has a zero eigenvalue the image
    of that eigendirection is a free choice; the default is the maximally
    mixed state, override with null_state.
    """
    a = _check_hermitian(a, name="A")
    b = _check_hermitian(b, name="B")
    if a.shape != b.shape:
        raise ValueError("A and B must have equal size")
    n = a.shape[0]
    scale = max(1.0, trace_norm(b))
    if abs(np.trace(a).real - np.trace(b).real) > tol * scale:
        raise ValueError("channel_between requires tr(A) = tr(B)")
    if trace_norm(a) > trace_norm(b) + tol * scale:
        raise ValueError("channel_between requires ||A||_1 <= ||B||_1")

    x, u = hermitian_eig(a)
    y, v = hermitian_eig(b)
    # absorb tolerance-level input slack so the vector-transfer preconditions
    # hold exactly; perturbs T(B) by at most a few ulp of the tolerance
    x = x + (y.sum() - x.sum()) / n
    y1 = float(np.abs(y).sum())
    center = y.sum() / n
    base = float(np.abs(np.full(n, center)).sum())
    while np.abs(x).sum() > y1 and np.abs(x - center).max() > 0:
        # ||lam (x - c) + c||_1 <= lam ||x||_1 + (1 - lam) ||c||_1 = y1
        lam = min(1.0, max(0.0, (y1 - base) / max(np.abs(x).sum() - base, 1e-300)))
        x = lam * (x - center) + center
    m = column_stochastic_transfer(x, y).matrix

    null_images: dict[int, np.ndarray] = {}
    omega = np.eye(n, dtype=complex) / n if null_state is None \
        else np.asarray(null_state, dtype=complex)
    for j in range(n):
        if abs(y[j]) <= tol * scale:
            null_images[j] = u.conj().T @ omega @ u
    pinch = pinching_superoperator(m, null_images or None)

    into_v = SuperOperator(n, n, np.kron(v.T, v.conj().T))       # X -> V* X V
    out_u = SuperOperator(n, n, np.kron(u.conj(), u))            # Y -> U Y U*
    return out_u.compose(pinch).compose(into_v)


def matrix_majorizes(a, b, tol: float = 1e-9) -> bool:
    """True iff the eigenvalue vector of a is majorized by that of b."""
    a = _check_hermitian(a, name="A")
    b = _check_hermitian(b, name="B")
    if a.shape != b.shape:
        raise ValueError("A and B must have equal size")
    wa, _ = hermitian_eig(a)
    wb, _ = hermitian_eig(b)
    return majorizes(wa, wb, tol)


def _psd_sqrt(a: np.ndarray, clamp: float) -> np.ndarray:
    w, u = hermitian_eig(a)
    scale = max(1.0, float(np.abs(w).max()) if w.size else 1.0)
    if w.min() < -clamp * scale:
        raise PositivityError(f"matrix has eigenvalue {w.min():.3e}, beyond the PSD clamp")
    w = np.clip(w, 0.0, None)
    return u @ np.diag(np.sqrt(w)) @ u.conj().T


def d_matrix_majorizes_2x2(a, b, d, tol: float = 1e-9) -> bool:
    """Two-dimensional test for a channel with fixed point diag(d) mapping
    b to a: trace equality, two trace-norm inequalities at the spectral
    points of D^{-1/2} B D^{-1/2}, and the generalized-fidelity inequality.
    """
    a = _check_hermitian(a, name="A")
    b = _check_hermitian(b, name="B")
    d = np.asarray(d, dtype=float)
    if d.ndim == 2:
        if np.max(np.abs(d - np.diag(np.diag(d)))) > 0:
            raise ValueError("D must be diagonal")
        d = np.diag(d).real
    if a.shape != (2, 2) or b.shape != (2, 2) or d.shape != (2,):
        raise ValueError("d_matrix_majorizes_2x2 handles 2x2 inputs only")
    if np.any(d <= 0):
        raise ValueError("D must be positive definite")
    dm = np.diag(d).astype(complex)
    eps = tol * max(1.0, trace_norm(b))
    if abs(np.trace(a).real - np.trace(b).real) > eps:
        return False

    dis = np.diag(d ** -0.5)
    spec, _ = hermitian_eig(dis @ b @ dis)
    b1, b2 = float(spec.min()), float(spec.max())
    for t in (b1, b2):
        if trace_norm(a - t * dm) > trace_norm(b - t * dm) + eps:
            return False

    fid_a = trace_norm(_psd_sqrt(a - b1 * dm, 1e-10) @ _psd_sqrt(b2 * dm - a, 1e-10))
    fid_b = trace_norm(_psd_sqrt(b - b1 * dm, 1e-10) @ _psd_sqrt(b2 * dm - b, 1e-10))
    return fid_a >= fid_b - eps


def pure_state_reachable(rho, d, j: int, tol: float = 1e-9) -> bool:
    """True iff rho can be generated from the pure state e_j by a channel
    fixing diag(d): equivalent to diag(d) - d_j rho >= 0."""
    rho = _check_hermitian(rho, name="rho")
    d = np.asarray(d, dtype=float)
    n = rho.shape[0]
    if d.shape != (n,) or np.any(d <= 0):
        raise ValueError("d must be a positive vector matching rho")
    if not 0 <= j < n:
        raise ValueError("index out of range")
    w = np.linalg.eigvalsh(rho)
    if w.min() < -tol or abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError("rho must be a density matrix")
    test = np.diag(d).astype(complex) - d[j] * rho
    wt = np.linalg.eigvalsh((test + test.conj().T) / 2)
    return bool(wt.min() >= -tol * max(1.0, float(np.abs(wt).max())))


def identity_distance_witness(t: SuperOperator, tol: float = 1e-9):
    """A pure state certifying maximal distance from the identity channel.

    For a trace-preserving positive map with singular T(1): the kernel
    direction psi satisfies ||T(psi psi*) - psi psi*||_1 = 2.  Raises if T(1)
    is nonsingular (the map is strictly positive; no witness exists).
    """
    if t.dim_in != t.dim_out:
        raise ValueError("witness construction requires equal dimensions")
    img = _check_hermitian(t.apply(np.eye(t.dim_in, dtype=complex)), 1e-9, "T(1)")
    if np.linalg.eigvalsh(img).min() > tol:
        raise ValueError("T(1) is nonsingular; the map is strictly positive")
    _, u, _ = kernel_block_form(t, tol)
    psi = u[:, -1]
    proj = np.outer(psi, psi.conj())
    value = trace_norm(t.apply(proj) - proj)
    return psi, float(value)


def kraus_set(t: SuperOperator, tol: float = 1e-12) -> list[np.ndarray]:
    """Kraus operators from the Choi eigendecomposition (CP maps only)."""
    c = choi(t)
    w, vecs = hermitian_eig(c)
    if w.min() < -1e-9 * max(1.0, float(np.abs(w).max())):
        raise PositivityError("Choi matrix is not positive semi-definite")
    ops = []
    for i in range(w.size):
        if w[i] > tol:
            ops.append(np.sqrt(w[i]) * vecs[:, i].reshape(t.dim_in, t.dim_out).T)
    return ops


__all__ = [
    "PositivityError",
    "SuperOperator",
    "channel_between",
    "choi",
    "d_matrix_majorizes_2x2",
    "identity_distance_witness",
    "is_cp",
    "is_strictly_positive",
    "is_tp",
    "is_unital",
    "kernel_block_form",
    "kraus_set",
    "matrix_majorizes",
    "pinching_superoperator",
    "pure_state_reachable",
    "trace_norm",
    "unvec",
    "vec",
]
