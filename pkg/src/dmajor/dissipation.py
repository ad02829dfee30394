"""Bath-coupling dissipation on diagonal states.

A pair of nearest-neighbour lowering/raising Lindblad operators induces, on
the diagonal of the density matrix, a tridiagonal rate matrix B0 whose flow
exp(-t B0) is a semigroup of column-stochastic matrices.  Thermal rates make
a prescribed positive probability vector the unique fixed point; rates with
zero raising part relax everything into the first basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import expm
from .majorize import as_vector, as_weight_vector


@dataclass(frozen=True)
class BathRates:
    """Nearest-neighbour lowering (a) and raising (b) amplitudes, length n-1."""

    n: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        if self.a.shape != (self.n - 1,) or self.b.shape != (self.n - 1,):
            raise ValueError("rate arrays must have length n-1")
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise ValueError("rates must be finite")


@dataclass(frozen=True)
class Generator:
    """Rate matrix B0 with zero column sums; exp(-t B0) is column-stochastic."""

    b0: np.ndarray

    def __post_init__(self):
        b0 = np.asarray(self.b0, dtype=float)
        object.__setattr__(self, "b0", b0)
        if b0.ndim != 2 or b0.shape[0] != b0.shape[1]:
            raise ValueError("B0 must be square")
        scale = max(1.0, float(np.max(np.abs(b0))))
        if np.max(np.abs(b0.sum(axis=0))) > 1e-12 * scale:
            raise ValueError("columns of B0 must sum to zero")
        off = b0 - np.diag(np.diag(b0))
        if np.max(off) > 1e-12 * scale:
            raise ValueError("off-diagonal entries of B0 must be nonpositive")

    @property
    def n(self) -> int:
        return self.b0.shape[0]


def b0_from_rates(rates: BathRates) -> Generator:
    """Tridiagonal rate matrix: sum_j a_j^2 |e_{j+1}-e_j><e_{j+1}|
    + b_j^2 |e_j-e_{j+1}><e_j|.  Column sums vanish exactly."""
    n = rates.n
    b0 = np.zeros((n, n))
    for j in range(n - 1):
        a2 = rates.a[j] ** 2
        b2 = rates.b[j] ** 2
        b0[j + 1, j + 1] += a2
        b0[j, j + 1] -= a2
        b0[j, j] += b2
        b0[j + 1, j] -= b2
    return Generator(b0)


def zero_temperature_rates(n: int) -> BathRates:
    """Pure lowering at ladder weights: a_j = sqrt(j(n-j)), b = 0."""
    if n < 1:
        raise ValueError("n must be positive")
    j = np.arange(1, n)
    return BathRates(n=n, a=np.sqrt(j * (n - j)), b=np.zeros(n - 1))


def thermal_angles(d) -> np.ndarray:
    """Mixing angles theta_j = arccos((1 + d_{j+1}/d_j)^{-1/2})."""
    d = as_weight_vector(d)
    return np.arccos((1.0 + d[1:] / d[:-1]) ** -0.5)


def thermal_rates(d) -> BathRates:
    """Rates making d the fixed point of the induced flow:
    a_j = sqrt(j(n-j) d_j / (d_j + d_{j+1})), b_j likewise with d_{j+1}."""
    d = as_weight_vector(d)
    n = d.size
    j = np.arange(1, n)
    w = j * (n - j)
    a = np.sqrt(w * d[:-1] / (d[:-1] + d[1:]))
    b = np.sqrt(w * d[1:] / (d[:-1] + d[1:]))
    return BathRates(n=n, a=a, b=b)


def gibbs_vector(energies, temperature: float) -> np.ndarray:
    """Boltzmann weights exp(-E_j/T), normalized.  Energies are shifted by
    their minimum before exponentiating (overflow-safe, same distribution)."""
    e = as_vector(energies)
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    w = np.exp(-(e - e.min()) / temperature)
    return w / w.sum()


def equidistant_d(alpha: float, n: int) -> np.ndarray:
    """Geometric weight vector (1-alpha)/(1-alpha^n) * (1, alpha, ..., alpha^{n-1});
    the Gibbs vector of an equidistant energy ladder, normalized to total 1."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be positive")
    d = alpha ** np.arange(n)
    return (1.0 - alpha) / (1.0 - alpha ** n) * d


def flow(gen: Generator, x, t: float) -> np.ndarray:
    """Propagate x for time t >= 0: exp(-t B0) x."""
    if t < 0:
        raise ValueError("flow requires t >= 0")
    x = as_vector(x)
    if x.size != gen.n:
        raise ValueError("state dimension mismatch")
    return expm(gen.b0, -t) @ x


def propagator(gen: Generator, t: float) -> np.ndarray:
    """The column-stochastic matrix exp(-t B0)."""
    if t < 0:
        raise ValueError("propagator requires t >= 0")
    return expm(gen.b0, -t)


def steady_state(gen: Generator, tol: float = 1e-9) -> np.ndarray:
    """The unique kernel vector of B0, normalized to total 1.

    An upper-triangular B0 with vanishing leading rate (the zero-temperature
    case) is handled explicitly; otherwise the kernel is extracted from an
    SVD and must be one-dimensional.
    """
    b0 = gen.b0
    n = gen.n
    if n == 1:
        return np.ones(1)
    scale = max(1.0, float(np.max(np.abs(b0))))
    lower = np.tril(b0, -1)
    if np.max(np.abs(lower)) <= 1e-14 * scale:
        diag = np.diag(b0)
        if abs(diag[0]) <= tol * scale and np.all(diag[1:] > tol * scale):
            return np.eye(n)[:, 0].copy()
    _, s, vt = np.linalg.svd(b0)
    null_dim = int(np.sum(s <= tol * max(s[0], 1.0)))
    if null_dim != 1:
        raise ValueError(f"B0 kernel is {null_dim}-dimensional; flow is not relaxing")
    v = vt[-1]
    if abs(v.sum()) < 1e-12:
        raise ValueError("kernel vector has vanishing total; flow is not relaxing")
    v = v / v.sum()
    if np.min(v) < -1e-10:
        raise ValueError("kernel vector has a negative entry beyond tolerance")
    return v


# ---------------------------------------------------------------------------
# matrix-level dissipator, for cross-checking the diagonal reduction
# ---------------------------------------------------------------------------

def lowering_raising_ops(rates: BathRates) -> list[np.ndarray]:
    """The Lindblad pair N+ = sum a_j |e_j><e_{j+1}|, N- = sum b_j |e_{j+1}><e_j|."""
    n = rates.n
    n_plus = np.zeros((n, n), dtype=complex)
    n_minus = np.zeros((n, n), dtype=complex)
    for j in range(n - 1):
        n_plus[j, j + 1] = rates.a[j]
        n_minus[j + 1, j] = rates.b[j]
    return [n_plus, n_minus]


def sigma_plus(n: int) -> np.ndarray:
    """Spin lowering ladder sum_j sqrt(j(n-j)) |e_j><e_{j+1}|."""
    m = np.zeros((n, n), dtype=complex)
    for j in range(1, n):
        m[j - 1, j] = np.sqrt(j * (n - j))
    return m


def thermal_lindblad_ops(d) -> list[np.ndarray]:
    """The weighted ladder pair whose dissipator relaxes diagonals into d."""
    return lowering_raising_ops(thermal_rates(d))


def apply_gamma(ops, rho: np.ndarray) -> np.ndarray:
    """GKSL dissipator value sum_j [ (V_j^*V_j rho + rho V_j^*V_j)/2 - V_j rho V_j^* ]."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("rho must be square")
    out = np.zeros_like(rho)
    for v in ops:
        v = np.asarray(v, dtype=complex)
        if v.shape != rho.shape:
            raise ValueError("Lindblad operator dimension mismatch")
        vv = v.conj().T @ v
        out += 0.5 * (vv @ rho + rho @ vv) - v @ rho @ v.conj().T
    return out


__all__ = [
    "BathRates",
    "Generator",
    "apply_gamma",
    "b0_from_rates",
    "equidistant_d",
    "flow",
    "gibbs_vector",
    "lowering_raising_ops",
    "propagator",
    "sigma_plus",
    "steady_state",
    "thermal_angles",
    "thermal_lindblad_ops",
    "thermal_rates",
    "zero_temperature_rates",
]
