"""Classical and d-majorization: decision procedures, thermomajorization
curves, and constructive stochastic transfer matrices.

Conventions: majorizes(x, y) is True when x is *more mixed* than y, i.e. a
doubly stochastic matrix maps y to x.  d_majorizes(x, y, d) likewise asks for
a column-stochastic matrix with fixed point d mapping y to x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._simplex import InfeasibleError, phase1_feasible
from .linalg import identity_perm

D_MAJORIZE_METHODS = ("norm", "positive_part", "curve")


class TransferSynthesisError(Exception):
    """A transfer matrix could not be synthesized despite a valid precondition."""


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a non-empty 1-d real vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_weight_vector(d) -> np.ndarray:
    v = as_vector(d)
    if np.any(v <= 0):
        raise ValueError("weight vector entries must be strictly positive")
    return v


def _scaled_tol(y: np.ndarray, tol: float) -> float:
    # comparisons are stable under rescaling of the problem
    return tol * max(1.0, float(np.abs(y).sum()))


def ratio_order(y: np.ndarray, d: np.ndarray, reverse_ties: bool = False) -> np.ndarray:
    """Permutation sorting y/d non-increasingly; ties broken by index.

    reverse_ties flips the tie-break, used to assert that verdicts do not
    depend on it.
    """
    r = y / d
    if reverse_ties:
        idx = np.lexsort((-np.arange(r.size), -r))
    else:
        idx = np.argsort(-r, kind="stable")
    return idx


@dataclass(frozen=True)
class ThermoCurve:
    """Piecewise-linear concave curve with elbows (c_j, f_j), f(0) = 0.

    The elbow abscissae are the cumulative sums of d reordered so that y/d is
    non-increasing; the ordinates are the matching cumulative sums of y.
    """

    c: np.ndarray
    f: np.ndarray

    def __call__(self, c) -> np.ndarray | float:
        return np.interp(c, self.c, self.f)

    @property
    def total_weight(self) -> float:
        return float(self.c[-1])

    @property
    def total_value(self) -> float:
        return float(self.f[-1])


def thermo_curve(y, d, reverse_ties: bool = False) -> ThermoCurve:
    y = as_vector(y)
    d = as_weight_vector(d)
    if y.size != d.size:
        raise ValueError("y and d must have equal length")
    order = ratio_order(y, d, reverse_ties)
    c = np.concatenate(([0.0], np.cumsum(d[order])))
    f = np.concatenate(([0.0], np.cumsum(y[order])))
    return ThermoCurve(c=c, f=f)


def curve_minimum_form(y: np.ndarray, d: np.ndarray, c) -> np.ndarray | float:
    """Evaluate min_i [ e^T (y - (y_i/d_i) d)_+ + (y_i/d_i) c ] directly.

    Independent of thermo_curve's sorting route; the two agree everywhere on
    [0, e^T d].
    """
    y = as_vector(y)
    d = as_weight_vector(d)
    r = y / d
    offsets = np.array([np.clip(y - ri * d, 0.0, None).sum() for ri in r])
    c = np.asarray(c, dtype=float)
    return np.min(offsets[:, None] + r[:, None] * c[None, :], axis=0) if c.ndim else float(
        np.min(offsets + r * float(c))
    )


def majorizes(x, y, tol: float = 1e-9) -> bool:
    """True iff x is majorized by y (equal totals, dominated partial sums)."""
    x = as_vector(x)
    y = as_vector(y)
    if x.size != y.size:
        raise ValueError("x and y must have equal length")
    eps = _scaled_tol(y, tol)
    if abs(x.sum() - y.sum()) > eps:
        return False
    xs = np.cumsum(np.sort(x)[::-1])
    ys = np.cumsum(np.sort(y)[::-1])
    return bool(np.all(xs[:-1] <= ys[:-1] + eps))


def d_majorizes(x, y, d, method: str = "norm", tol: float = 1e-9,
                reverse_ties: bool = False) -> bool:
    """Decide x <=_d y, i.e. existence of a d-stochastic matrix mapping y to x.

    Three equivalent criteria are implemented:
      norm          -- 1-norm inequalities ||x - (y_i/d_i) d||_1 <= ||y - ...||_1
      positive_part -- sum (x - t d)_+ <= sum (y - t d)_+ at the critical t's
      curve         -- thermomajorization-curve dominance at the elbows of x
    All include the trace-equality requirement.
    """
    x = as_vector(x)
    y = as_vector(y)
    d = as_weight_vector(d)
    if not (x.size == y.size == d.size):
        raise ValueError("x, y, d must have equal length")
    if method not in D_MAJORIZE_METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {D_MAJORIZE_METHODS}")
    eps = _scaled_tol(y, tol)
    if abs(x.sum() - y.sum()) > eps:
        return False

    if method == "norm":
        for t in y / d:
            if np.abs(x - t * d).sum() > np.abs(y - t * d).sum() + eps:
                return False
        return True

    if method == "positive_part":
        for t in np.concatenate((x / d, y / d)):
            lhs = np.clip(x - t * d, 0.0, None).sum()
            rhs = np.clip(y - t * d, 0.0, None).sum()
            if lhs > rhs + eps:
                return False
        return True

    curve_x = thermo_curve(x, d, reverse_ties)
    curve_y = thermo_curve(y, d, reverse_ties)
    # dominance at the elbows of the lower curve suffices (concavity)
    return bool(np.all(curve_x.f[1:-1] <= curve_y(curve_x.c[1:-1]) + eps))


# ---------------------------------------------------------------------------
# stochastic transfer matrices
# ---------------------------------------------------------------------------

@dataclass
class StochasticMatrix:
    """A nonnegative matrix with unit column sums, possibly with extra
    structure: kind is one of "doubly", "column", "d-stochastic"."""

    matrix: np.ndarray
    kind: str
    d: np.ndarray | None = None
    n_t_transforms: int | None = None

    def validate(self, entry_tol: float = 1e-12, sum_tol: float = 1e-10) -> None:
        a = self.matrix
        if np.min(a) < -entry_tol:
            raise ValueError(f"negative entry {np.min(a):.3e} in stochastic matrix")
        if np.max(np.abs(a.sum(axis=0) - 1.0)) > sum_tol:
            raise ValueError("column sums deviate from 1")
        if self.kind == "doubly" and np.max(np.abs(a.sum(axis=1) - 1.0)) > sum_tol:
            raise ValueError("row sums deviate from 1")
        if self.kind == "d-stochastic":
            if self.d is None:
                raise ValueError("d-stochastic matrix must carry its weight vector")
            if np.abs(a @ self.d - self.d).sum() > sum_tol:
                raise ValueError("weight vector is not a fixed point")

    @property
    def shape(self):
        return self.matrix.shape


def _t_transform_chain(xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, int]:
    """Doubly stochastic A with A ys = xs for non-increasing xs <= ys.

    Classical chain of at most n-1 T-transforms: each step blends one
    transposition and matches at least one more coordinate.
    """
    n = xs.size
    a = np.eye(n)
    y = ys.copy()
    count = 0
    small = 1e-13 * max(1.0, float(np.abs(ys).sum()))
    for _ in range(n):
        diff = y - xs
        if np.max(np.abs(diff)) <= small:
            break
        j_candidates = np.nonzero(diff > small)[0]
        if j_candidates.size == 0:
            break
        j = int(j_candidates[-1])          # largest index with x_j < y_j
        k_candidates = np.nonzero(diff[j + 1:] < -small)[0]
        if k_candidates.size == 0:
            break
        k = j + 1 + int(k_candidates[0])   # smallest index > j with x_k > y_k
        delta = min(y[j] - xs[j], xs[k] - y[k])
        lam = 1.0 - delta / (y[j] - y[k])
        t = np.eye(n)
        t[j, j] = t[k, k] = lam
        t[j, k] = t[k, j] = 1.0 - lam
        a = t @ a
        y = t @ y
        count += 1
    return a, count


def doubly_stochastic_transfer(x, y, tol: float = 1e-9) -> StochasticMatrix:
    """Doubly stochastic A with A y = x, built from at most n-1 T-transforms.

    Requires majorizes(x, y).  The minimal element (uniform mean) gets the
    canonical averaging certificate e e^T / n.
    """
    x = as_vector(x)
    y = as_vector(y)
    n = x.size
    if not majorizes(x, y, tol):
        raise ValueError("doubly_stochastic_transfer requires x to be majorized by y")
    eps = _scaled_tol(y, tol)
    if np.abs(x - y).sum() <= eps * 1e-3:
        return StochasticMatrix(np.eye(n), "doubly", n_t_transforms=0)
    if np.abs(x - y.sum() / n).sum() <= eps * 1e-3:
        return StochasticMatrix(np.full((n, n), 1.0 / n), "doubly", n_t_transforms=0)

    px = np.argsort(-x, kind="stable")
    py = np.argsort(-y, kind="stable")
    a_sorted, count = _t_transform_chain(x[px], y[py])
    mx = np.zeros((n, n))
    mx[np.arange(n), px] = 1.0
    my = np.zeros((n, n))
    my[np.arange(n), py] = 1.0
    a = mx.T @ a_sorted @ my
    out = StochasticMatrix(a, "doubly", n_t_transforms=count)
    out.validate()
    if np.abs(a @ y - x).sum() > _scaled_tol(y, 1e-9):
        raise TransferSynthesisError("T-transform chain failed to map y to x")
    return out


def sign_collapse_matrix(y) -> np.ndarray:
    """Column map sending positive mass of y to slot 0 and negative to slot 1,
    so M0 y = (sum y_+, -sum y_-, 0, ..., 0)."""
    y = as_vector(y)
    n = y.size
    m0 = np.zeros((n, n))
    for j in range(n):
        m0[1 if (y[j] < 0 and n > 1) else 0, j] = 1.0
    return m0


def column_stochastic_transfer(x, y, tol: float = 1e-9) -> StochasticMatrix:
    """Column-stochastic A with A y = x.

    Exists iff e^T x = e^T y and ||x||_1 <= ||y||_1.  Built as D M0 where M0
    collapses y onto its signed masses and D is doubly stochastic for the
    majorization x < (sum y_+, -sum y_-, 0, ...).
    """
    x = as_vector(x)
    y = as_vector(y)
    n = x.size
    if x.size != y.size:
        raise ValueError("x and y must have equal length")
    if abs(x.sum() - y.sum()) > 1e-10 * max(1.0, abs(y.sum())):
        raise ValueError("column_stochastic_transfer requires equal totals")
    if np.abs(x).sum() > np.abs(y).sum() + 1e-10 * max(1.0, np.abs(y).sum()):
        raise ValueError("column_stochastic_transfer requires ||x||_1 <= ||y||_1")
    eps = _scaled_tol(y, tol)
    if np.abs(x - y).sum() <= eps * 1e-3:
        return StochasticMatrix(np.eye(n), "column")

    m0 = sign_collapse_matrix(y)
    zhat = m0 @ y
    dmat = doubly_stochastic_transfer(x, zhat, tol)
    a = dmat.matrix @ m0
    out = StochasticMatrix(a, "column", n_t_transforms=dmat.n_t_transforms)
    out.validate()
    if np.abs(a @ y - x).sum() > _scaled_tol(y, 1e-9):
        raise TransferSynthesisError("sign-collapse construction failed to map y to x")
    return out


def d_stochastic_transfer(x, y, d, tol: float = 1e-9) -> StochasticMatrix:
    """d-stochastic A (nonnegative, unit column sums, A d = d) with A y = x.

    Requires d_majorizes(x, y, d).  Solved as a phase-1 simplex feasibility
    problem in the n^2 nonnegative entries with 3n-1 equality constraints
    (one A d = d row is linearly dependent and dropped).
    """
    x = as_vector(x)
    y = as_vector(y)
    d = as_weight_vector(d)
    n = x.size
    if not d_majorizes(x, y, d, tol=tol):
        raise ValueError("d_stochastic_transfer requires d_majorizes(x, y, d)")
    eps = _scaled_tol(y, tol)
    if np.abs(x - y).sum() <= eps * 1e-3:
        return StochasticMatrix(np.eye(n), "d-stochastic", d=d)
    minimal = (y.sum() / d.sum()) * d
    if np.abs(x - minimal).sum() <= eps * 1e-3:
        return StochasticMatrix(np.outer(d, np.ones(n)) / d.sum(), "d-stochastic", d=d)

    rows = []
    rhs = []
    for i in range(n):                       # A y = x
        row = np.zeros(n * n)
        row[i * n:(i + 1) * n] = y
        rows.append(row)
        rhs.append(x[i])
    for i in range(n - 1):                   # A d = d (last row redundant)
        row = np.zeros(n * n)
        row[i * n:(i + 1) * n] = d
        rows.append(row)
        rhs.append(d[i])
    for j in range(n):                       # unit column sums
        row = np.zeros(n * n)
        row[j::n] = 1.0
        rows.append(row)
        rhs.append(1.0)

    try:
        z = phase1_feasible(np.array(rows), np.array(rhs), tol=1e-10)
    except InfeasibleError as exc:
        raise TransferSynthesisError(
            "LP found no d-stochastic certificate although the verdict was positive; "
            "this indicates a tolerance conflict or a bug"
        ) from exc
    a = z.reshape(n, n)
    out = StochasticMatrix(a, "d-stochastic", d=d)
    out.validate(entry_tol=1e-8, sum_tol=1e-8)
    residual = max(np.abs(a @ y - x).sum(), np.abs(a @ d - d).sum(),
                   float(np.max(np.abs(a.sum(axis=0) - 1.0))))
    if residual > 1e-8 * max(1.0, float(np.abs(y).sum() + d.sum())):
        raise TransferSynthesisError(f"certificate residual {residual:.3e} exceeds 1e-8")
    return out


# ---------------------------------------------------------------------------
# order extremes
# ---------------------------------------------------------------------------

def minimal_element(trace: float, d) -> np.ndarray:
    """The unique minimal element of the trace hyperplane: (trace / e^T d) d."""
    d = as_weight_vector(d)
    return (trace / d.sum()) * d


@dataclass(frozen=True)
class MaximalElement:
    index: int
    vector: np.ndarray
    unique: bool


def maximal_element(d, tol: float = 1e-12) -> MaximalElement:
    """(e^T d) e_k with d_k minimal (first such index); unique iff the minimal
    entry of d is simple."""
    d = as_weight_vector(d)
    k = int(np.argmin(d))
    vec = np.zeros(d.size)
    vec[k] = d.sum()
    unique = bool(np.sum(d <= d[k] + tol * max(1.0, d.sum())) == 1)
    return MaximalElement(index=k, vector=vec, unique=unique)


def random_d_stochastic(d, rng: np.random.Generator) -> np.ndarray:
    """A random d-stochastic matrix (for tests): a convex mixture of the
    identity, the rank-one projection onto d, and pairwise d-moves."""
    d = as_weight_vector(d)
    n = d.size
    parts = [np.eye(n), np.outer(d, np.ones(n)) / d.sum()]
    for _ in range(2 * n):
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        k, l = (i, j) if d[i] <= d[j] else (j, i)
        a = np.eye(n)
        # moves mass from e_l toward e_k while fixing d (d_k <= d_l)
        a[k, l] = d[k] / d[l]
        a[l, l] = 1.0 - d[k] / d[l]
        a[l, k] = 1.0
        a[k, k] = 0.0
        parts.append(a)
    weights = rng.dirichlet(np.ones(len(parts)))
    return sum(w * p for w, p in zip(weights, parts))


__all__ = [
    "D_MAJORIZE_METHODS",
    "MaximalElement",
    "StochasticMatrix",
    "ThermoCurve",
    "TransferSynthesisError",
    "as_vector",
    "as_weight_vector",
    "column_stochastic_transfer",
    "curve_minimum_form",
    "d_majorizes",
    "d_stochastic_transfer",
    "doubly_stochastic_transfer",
    "majorizes",
    "maximal_element",
    "minimal_element",
    "random_d_stochastic",
    "ratio_order",
    "sign_collapse_matrix",
    "thermo_curve",
    "identity_perm",
]
