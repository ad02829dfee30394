"""The d-majorization polytope: half-space description, closed-form vertex
enumeration, maximal corner, Hausdorff distances, Lipschitz constants.

The half-space description uses a fixed 2^n x n constraint matrix whose rows
are all 0/1 subset indicators (singletons first, then pairs in lexicographic
order, and so on) followed by the two trace rows +-e^T.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog
from scipy.spatial.distance import cdist

from .majorize import as_vector, as_weight_vector, majorizes, thermo_curve
from .linalg import check_permutation

MAX_VERTEX_DIM = 8
MAX_LIPSCHITZ_DIM = 4


@lru_cache(maxsize=None)
def _row_subsets(n: int) -> tuple[tuple[int, ...], ...]:
    subsets = []
    for j in range(1, n):
        subsets.extend(itertools.combinations(range(n), j))
    subsets.append(tuple(range(n)))  # e^T row; -e^T follows implicitly
    return tuple(subsets)


@lru_cache(maxsize=None)
def _mask_index(n: int) -> dict[int, int]:
    table = {0: -1}
    for pos, subset in enumerate(_row_subsets(n)):
        table[sum(1 << i for i in subset)] = pos
    return table


def constraint_matrix(n: int) -> np.ndarray:
    """The fixed 2^n x n matrix of subset-sum constraints (rows: singletons,
    pairs, ..., full set, negated full set)."""
    if not 1 <= n <= MAX_VERTEX_DIM:
        raise ValueError(f"dimension must lie in 1..{MAX_VERTEX_DIM}, got {n}")
    rows = np.zeros((2 ** n, n))
    for pos, subset in enumerate(_row_subsets(n)):
        rows[pos, list(subset)] = 1.0
    rows[-1] = -1.0
    return rows


@dataclass(frozen=True)
class HPolytope:
    """Half-space description {x : M x <= b} with the fixed constraint matrix.

    The last two entries of b are +-trace, so b[-2] + b[-1] = 0.
    """

    n: int
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        if self.b.shape != (2 ** self.n,):
            raise ValueError("b must have length 2^n")
        if abs(self.b[-2] + self.b[-1]) > 1e-12 * max(1.0, abs(self.b[-2])):
            raise ValueError("trace entries of b must be opposite")

    @property
    def trace(self) -> float:
        return float(self.b[-2])

    def bound(self, subset_mask: int) -> float:
        """b-entry belonging to the subset row with the given bitmask."""
        pos = _mask_index(self.n)[subset_mask]
        return 0.0 if pos < 0 else float(self.b[pos])


def halfspace_bounds(y, d) -> HPolytope:
    """Right-hand side b of the polytope {x : x is d-majorized by y}.

    Every subset row bound is the thermomajorization curve of (y, d)
    evaluated at the subset's d-weight; the trace rows carry +-e^T y.
    """
    y = as_vector(y)
    d = as_weight_vector(d)
    if y.size != d.size:
        raise ValueError("y and d must have equal length")
    n = y.size
    if n > MAX_VERTEX_DIM:
        raise ValueError(f"dimension capped at {MAX_VERTEX_DIM}")
    curve = thermo_curve(y, d)
    b = np.empty(2 ** n)
    subsets = _row_subsets(n)
    weights = np.array([d[list(s)].sum() for s in subsets])
    b[:-1] = curve(weights)
    b[-2] = y.sum()
    b[-1] = -y.sum()
    return HPolytope(n=n, b=b)


def contains(x, poly: HPolytope, tol: float = 1e-9) -> bool:
    """Componentwise test M x <= b + tol."""
    x = as_vector(x)
    if x.size != poly.n:
        raise ValueError("dimension mismatch")
    sums = constraint_matrix(poly.n) @ x
    return bool(np.all(sums <= poly.b + tol))


def vertex_for_permutation(perm, poly: HPolytope) -> np.ndarray:
    """The closed-form polytope corner generated by a permutation.

    Solves the lower-triangular cumulative system: the coordinate at
    perm[j] equals the bound of the first j+1 images minus the bound of the
    first j images.
    """
    p = check_permutation(perm)
    if p.size != poly.n:
        raise ValueError("permutation length must equal the polytope dimension")
    x = np.empty(poly.n)
    mask = 0
    prev = 0.0
    for j in range(poly.n):
        mask |= 1 << int(p[j])
        cur = poly.bound(mask)
        x[p[j]] = cur - prev
        prev = cur
    return x


@dataclass(frozen=True)
class VertexSet:
    points: np.ndarray                      # shape (k, n)
    perms: tuple[tuple[tuple[int, ...], ...], ...]  # generating permutations per point

    def __len__(self) -> int:
        return self.points.shape[0]


def vertices(y, d, dedup_tol: float = 1e-9) -> VertexSet:
    """All polytope corners over the n! permutations, deduplicated.

    Permutations sharing one corner (ratio ties) are recorded together.
    Points appear in order of their first generating permutation.
    """
    y = as_vector(y)
    d = as_weight_vector(d)
    n = y.size
    if n > MAX_VERTEX_DIM:
        raise ValueError(f"vertex enumeration capped at n = {MAX_VERTEX_DIM}")
    poly = halfspace_bounds(y, d)
    kept: list[np.ndarray] = []
    gen: list[list[tuple[int, ...]]] = []
    # two shifted rounding grids so near-identical corners straddling a
    # rounding boundary still collide with an existing bucket
    buckets: dict[tuple, int] = {}
    scale = max(1.0, float(np.abs(y).sum()))
    grid = 1e10 / scale

    def keys(v: np.ndarray):
        base = v * grid
        return (("a",) + tuple(np.round(base).astype(np.int64)),
                ("b",) + tuple(np.round(base + 0.5).astype(np.int64)))

    for perm in itertools.permutations(range(n)):
        v = vertex_for_permutation(perm, poly)
        k1, k2 = keys(v)
        idx = buckets.get(k1, buckets.get(k2, -1))
        if idx >= 0 and np.abs(v - kept[idx]).sum() > dedup_tol * scale:
            idx = -1
        if idx < 0 and len(kept) <= 2000:
            for i, w in enumerate(kept):
                if np.abs(v - w).sum() <= dedup_tol * scale:
                    idx = i
                    break
        if idx < 0:
            kept.append(v)
            gen.append([])
            idx = len(kept) - 1
        buckets.setdefault(k1, idx)
        buckets.setdefault(k2, idx)
        gen[idx].append(tuple(perm))
    points = np.array(kept)
    slack = constraint_matrix(n) @ points.T - poly.b[:, None]
    if float(slack.max()) > 1e-9 * scale:
        raise RuntimeError("enumerated corner violates the half-space system")
    return VertexSet(points=points, perms=tuple(tuple(g) for g in gen))


def max_corner(y, d) -> np.ndarray:
    """The corner classically majorizing the whole polytope (y >= 0 required).

    It is generated by any permutation sorting d non-increasingly; ties are
    broken by index.  Unique up to permutation of its entries.
    """
    y = as_vector(y)
    d = as_weight_vector(d)
    if np.min(y) < 0:
        raise ValueError("max_corner requires y >= 0 entrywise")
    perm = np.argsort(-d, kind="stable")
    ratios = (y / d)[perm]
    if np.all(ratios[:-1] >= ratios[1:]):
        # y/d sorted like d: y is its own maximal corner, exactly
        return y.copy()
    return vertex_for_permutation(perm, halfspace_bounds(y, d))


def hausdorff(p, q) -> float:
    """Hausdorff distance between two finite point sets in the 1-norm."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    if p.size == 0 or q.size == 0:
        raise ValueError("hausdorff requires non-empty point sets")
    if p.shape[1] != q.shape[1]:
        raise ValueError("point sets must share a dimension")
    dist = cdist(p, q, "cityblock")
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


def _point_hull_distance(x: np.ndarray, hull_points: np.ndarray) -> float:
    """Exact 1-norm distance from x to the convex hull of hull_points (LP)."""
    k, n = hull_points.shape
    # variables: lambda (k), t (n);  minimize sum t
    # constraints: V^T lambda - x <= t,  x - V^T lambda <= t,  sum lambda = 1
    c = np.concatenate((np.zeros(k), np.ones(n)))
    a_ub = np.block([
        [hull_points.T, -np.eye(n)],
        [-hull_points.T, -np.eye(n)],
    ])
    b_ub = np.concatenate((x, -x))
    a_eq = np.concatenate((np.ones(k), np.zeros(n)))[None, :]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * k + [(None, None)] * n, method="highs")
    if not res.success:
        raise RuntimeError(f"hull-distance LP failed: {res.message}")
    return float(res.fun)


def hull_hausdorff(p_vertices, q_vertices) -> float:
    """Hausdorff distance between the convex hulls of two vertex sets.

    The maximum of the distance-to-hull function over a polytope is attained
    at a vertex, so vertex-to-hull LPs give the exact value.
    """
    p = np.atleast_2d(np.asarray(p_vertices, dtype=float))
    q = np.atleast_2d(np.asarray(q_vertices, dtype=float))
    d_pq = max(_point_hull_distance(v, q) for v in p)
    d_qp = max(_point_hull_distance(w, p) for w in q)
    return max(d_pq, d_qp)


def lipschitz_constant(n: int) -> float:
    """max ||A0^{-1}||_{1->1} over invertible n-row submatrices of the
    constraint matrix; bounds the Hausdorff shift per unit change of b."""
    if not 1 <= n <= MAX_LIPSCHITZ_DIM:
        raise ValueError(f"lipschitz_constant capped at n = {MAX_LIPSCHITZ_DIM}")
    m = constraint_matrix(n)
    best = 0.0
    for comb in itertools.combinations(range(m.shape[0]), n):
        sub = m[list(comb)]
        det = np.linalg.det(sub)
        if abs(det) < 1e-12:
            continue
        inv = np.linalg.inv(sub)
        best = max(best, float(np.abs(inv).sum(axis=0).max()))
    return best


__all__ = [
    "HPolytope",
    "VertexSet",
    "constraint_matrix",
    "contains",
    "halfspace_bounds",
    "hausdorff",
    "hull_hausdorff",
    "lipschitz_constant",
    "majorizes",
    "max_corner",
    "vertex_for_permutation",
    "vertices",
]
