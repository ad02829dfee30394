"""Hybrid switched dynamics on the probability simplex: instantaneous
permutations interleaved with dissipative flow exp(-t B0).

Provides trajectory simulation, constructive steering synthesis for the
zero-temperature bath (global and local single-qudit coupling), the
finite-temperature majorization envelope, and reproducible random sampling
of reachable points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .dissipation import Generator, b0_from_rates, flow, propagator, thermal_rates, \
    zero_temperature_rates
from .linalg import apply_perm, check_permutation, expm, identity_perm, perm_compose, \
    perm_inverse
from .majorize import as_vector, as_weight_vector, majorizes
from .polytope import max_corner

MAX_LOCAL_DIM = 4096
MAX_SAMPLE_DEPTH = 12


class SimplexViolationError(Exception):
    """A state left the simplex beyond numerical tolerance."""


def _check_simplex(x: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    x = as_vector(x)
    if abs(x.sum() - 1.0) > tol or np.min(x) < -tol:
        raise SimplexViolationError(f"state is outside the simplex beyond {tol}")
    return x


def _clamp_simplex(x: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Clamp numerical dust to zero and renormalize; raise on real violations."""
    deficit = float(-np.minimum(x, 0.0).sum())
    if deficit > tol:
        raise SimplexViolationError(f"negative mass {deficit:.3e} exceeds tolerance {tol}")
    y = np.maximum(x, 0.0)
    return y / y.sum()


@dataclass(frozen=True)
class Segment:
    """One control step: apply the permutation instantaneously, then dissipate
    for the given duration."""

    perm: tuple[int, ...]
    duration: float

    def __post_init__(self):
        p = check_permutation(self.perm)
        object.__setattr__(self, "perm", tuple(int(i) for i in p))
        object.__setattr__(self, "duration", float(self.duration))
        if not (self.duration >= 0.0 and np.isfinite(self.duration)):
            raise ValueError("segment duration must be finite and nonnegative")


@dataclass
class Schedule:
    segments: list[Segment] = field(default_factory=list)

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    def __len__(self) -> int:
        return len(self.segments)

    def to_dict(self) -> dict:
        return {"segments": [
            {"perm": list(s.perm), "duration": s.duration} for s in self.segments
        ]}

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        return cls([Segment(tuple(seg["perm"]), float(seg["duration"]))
                    for seg in data["segments"]])


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray

    @property
    def endpoint(self) -> np.ndarray:
        return self.states[-1]


def simulate(gen: Generator, x0, schedule: Schedule, dt: float) -> Trajectory:
    """Run the schedule from x0, sampling the dissipative stretches every dt.

    Segment endpoints come from a single matrix exponential each, so the
    final state matches the closed-form product of permutation matrices and
    flow exponentials to machine precision.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    x = _check_simplex(as_vector(x0))
    if x.size != gen.n:
        raise ValueError("state dimension does not match the generator")
    times = [0.0]
    states = [x.copy()]
    t = 0.0
    for seg in schedule.segments:
        x = apply_perm(seg.perm, x)
        times.append(t)
        states.append(x.copy())
        if seg.duration > 0:
            n_steps = int(seg.duration // dt)
            if n_steps >= 1:
                step = propagator(gen, dt)
                xs = x.copy()
                for k in range(1, n_steps + 1):
                    xs = step @ xs
                    times.append(t + k * dt)
                    states.append(_clamp_simplex(xs))
            x = _clamp_simplex(flow(gen, x, seg.duration))
            t += seg.duration
            times.append(t)
            states.append(x.copy())
    return Trajectory(times=np.array(times), states=np.array(states))


def endpoint(gen: Generator, x0, schedule: Schedule) -> np.ndarray:
    """Closed-form final state of a schedule (no intermediate sampling)."""
    x = _check_simplex(as_vector(x0))
    for seg in schedule.segments:
        x = apply_perm(seg.perm, x)
        if seg.duration > 0:
            x = _clamp_simplex(flow(gen, x, seg.duration))
    return x


# ---------------------------------------------------------------------------
# zero-temperature synthesis
# ---------------------------------------------------------------------------

def _cooling_rates(gen: Generator) -> np.ndarray:
    """Extract c_1..c_{n-1} from an upper-bidiagonal zero-temperature
    generator (diagonal (0, c_1, ..., c_{n-1}), superdiagonal -c_j)."""
    b0 = gen.b0
    n = gen.n
    scale = max(1.0, float(np.max(np.abs(b0))))
    c = np.diag(b0)[1:].copy()
    expected = np.zeros_like(b0)
    for j in range(n - 1):
        expected[j + 1, j + 1] = c[j]
        expected[j, j + 1] = -c[j]
    if np.max(np.abs(b0 - expected)) > 1e-12 * scale or np.any(c <= 0):
        raise ValueError("generator is not of the zero-temperature upper-bidiagonal form")
    return c


def _first_face_hit(b0: np.ndarray, z: np.ndarray) -> tuple[float, int]:
    """First time the backward flow exp(t B0) z hits a vanishing coordinate.

    Bracketing by duration doubling from 1e-6, then bisection to 1e-12
    relative; a grid check guards against skipping an earlier crossing.
    Returns (time, index) with ties resolved toward the lowest index.
    """

    def w(t: float) -> np.ndarray:
        return expm(b0, t) @ z

    scale = max(1.0, float(np.abs(z).sum()))
    if float(np.min(z)) <= 1e-12 * scale:
        return 0.0, int(np.argmin(z))

    t_hi = 1e-6
    while np.min(w(t_hi)) > 0.0:
        t_hi *= 2.0
        if t_hi > 2.0 ** 60:
            raise SimplexViolationError("backward flow never hits a face")
    t_lo = 0.0 if t_hi == 1e-6 else t_hi / 2.0

    tau = t_hi
    for _ in range(4):
        lo, hi = t_lo, t_hi
        while hi - lo > 1e-12 * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if np.min(w(mid)) > 0.0:
                lo = mid
            else:
                hi = mid
        tau = hi
        grid = np.linspace(t_lo, tau, 33)[1:-1]
        bad = [t for t in grid if np.min(w(t)) < -1e-13 * scale]
        if not bad:
            break
        t_hi = bad[0]
    wt = w(tau)
    hit = np.nonzero(wt <= np.min(wt) + 1e-13 * scale)[0]
    return tau, int(hit[0])


def synthesize_from_ground(gen: Generator, x) -> Schedule:
    """Schedule of at most n-1 segments steering e_1 exactly to x.

    Built backwards: evolve x backward until a coordinate vanishes while the
    state stays in the simplex, permute that face into the last active slot,
    and recurse on the shrunken support.
    """
    _cooling_rates(gen)
    n = gen.n
    x = _check_simplex(as_vector(x))
    if x.size != n:
        raise ValueError("target dimension does not match the generator")
    z = np.maximum(x, 0.0)
    z = z / z.sum()
    backward: list[tuple[np.ndarray, float]] = []
    m = n
    ztol = 1e-13
    while m > 1:
        while m > 1 and z[m - 1] <= ztol:
            m -= 1
        if m == 1:
            break
        tau, j = _first_face_hit(gen.b0[:m, :m], z[:m])
        w = expm(gen.b0[:m, :m], tau) @ z[:m]
        w = np.maximum(w, 0.0)
        w = w / w.sum() * z[:m].sum()
        swap = identity_perm(n)
        swap[j], swap[m - 1] = swap[m - 1], swap[j]
        z = z.copy()
        z[:m] = w
        z = apply_perm(swap, z)
        backward.append((swap, tau))
        m -= 1
    segments = [Segment(tuple(perm_inverse(p)), t) for p, t in reversed(backward)]
    return Schedule(segments)


def synthesize(gen: Generator, x0, x, eps: float) -> Schedule:
    """Cool x0 toward e_1 within eps/2, then run the exact ground schedule.

    The final 1-norm error is bounded by the cooling error because every
    later step is a 1-norm contraction.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    _cooling_rates(gen)
    n = gen.n
    x0 = _check_simplex(as_vector(x0))
    e1 = np.zeros(n)
    e1[0] = 1.0
    target_err = eps / 2.0
    if np.abs(x0 - e1).sum() <= target_err:
        cool_t = 0.0
    else:
        cool_t = 1.0
        for _ in range(2 ** 16):
            if np.abs(flow(gen, x0, cool_t) - e1).sum() < target_err:
                break
            cool_t *= 2.0
        else:
            raise SimplexViolationError("cooling did not converge")
    ground = synthesize_from_ground(gen, x)
    return Schedule([Segment(tuple(identity_perm(n)), cool_t)] + ground.segments)


# ---------------------------------------------------------------------------
# local (tensor-chain) synthesis
# ---------------------------------------------------------------------------

def local_generator(n: int, m: int) -> Generator:
    """Block-diagonal generator for a chain of m n-level systems with the
    bath on one: n^{m-1} copies of the zero-temperature rate matrix."""
    total = n ** m
    if total > MAX_LOCAL_DIM:
        raise ValueError(f"n^m = {total} exceeds the cap {MAX_LOCAL_DIM}")
    block = b0_from_rates(zero_temperature_rates(n)).b0
    full = np.zeros((total, total))
    for k in range(n ** (m - 1)):
        sl = slice(k * n, (k + 1) * n)
        full[sl, sl] = block
    return Generator(full)


def _embed_block_perm(perm_n, block: int, n: int, total: int) -> np.ndarray:
    p = identity_perm(total)
    base = block * n
    for j, img in enumerate(check_permutation(perm_n)):
        p[base + j] = base + img
    return p


def _gather_perm(sources: list[int], total: int) -> np.ndarray:
    """Permutation whose action moves old coordinate sources[k] to slot k."""
    source_set = set(sources)
    rest = [i for i in range(total) if i not in source_set]
    return np.array(list(sources) + rest)


def _merge_parallel(block_schedules: dict[int, Schedule], n: int, total: int) -> list[Segment]:
    """Interleave per-block n-level schedules acting on disjoint blocks.

    Blocks are aligned to finish together: the longest starts immediately,
    shorter ones are delayed (their masses rest at flow-invariant block
    heads until they start).
    """
    if not block_schedules:
        return []
    events: list[tuple[float, int, tuple[int, ...]]] = []
    t_max = max(s.total_duration for s in block_schedules.values())
    for blk in sorted(block_schedules):
        sched = block_schedules[blk]
        t_local = t_max - sched.total_duration
        for seg in sched.segments:
            events.append((t_local, blk, seg.perm))
            t_local += seg.duration
    events.sort(key=lambda e: (e[0], e[1]))
    segments: list[Segment] = []
    clock = 0.0
    i = 0
    while i < len(events):
        t_evt = events[i][0]
        if t_evt > clock + 1e-15:
            segments.append(Segment(tuple(identity_perm(total)), t_evt - clock))
            clock = t_evt
        combined = identity_perm(total)
        while i < len(events) and events[i][0] <= clock + 1e-15:
            _, blk, perm_n = events[i]
            combined = perm_compose(_embed_block_perm(perm_n, blk, n, total), combined)
            i += 1
        segments.append(Segment(tuple(combined), 0.0))
    if t_max > clock:
        segments.append(Segment(tuple(identity_perm(total)), t_max - clock))
    return segments


def synthesize_local(n: int, m: int, x0, x, eps: float) -> Schedule:
    """Steering for the chain of m n-level systems with local noise.

    Step 1 collapses the state onto e_1 in m relax-and-gather rounds, each
    within a budgeted fraction of eps.  Step 2 splits the target block
    masses down the block-head hierarchy and finishes with exact per-block
    ground schedules run in parallel; it adds no further error, so the
    endpoint lands within eps of x.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    total = n ** m
    if total > MAX_LOCAL_DIM:
        raise ValueError(f"n^m = {total} exceeds the cap {MAX_LOCAL_DIM}")
    gen_block = b0_from_rates(zero_temperature_rates(n))
    x0 = _check_simplex(as_vector(x0))
    x = _check_simplex(as_vector(x))
    if x0.size != total or x.size != total:
        raise ValueError("states must live on the n^m simplex")
    n_blocks = n ** (m - 1)

    def block_flow(state: np.ndarray, t: float) -> np.ndarray:
        # the full generator is block-diagonal with identical blocks, so one
        # small exponential propagates every block at once
        step = expm(gen_block.b0, -t)
        return (step @ state.reshape(n_blocks, n).T).T.reshape(total)

    segments: list[Segment] = []
    cur = np.maximum(x0, 0.0)
    cur = cur / cur.sum()

    # Step 1: m rounds of (relax every block to its head, gather the heads
    # of the still-active blocks into the leading coordinates).
    round_budget = eps / (2.0 * max(m, 1))
    for r in range(1, m + 1):
        collapsed = np.zeros(total)
        for k in range(n_blocks):
            collapsed[k * n] = cur[k * n:(k + 1) * n].sum()
        t_relax = 1.0
        for _ in range(2 ** 16):
            if np.abs(block_flow(cur, t_relax) - collapsed).sum() < round_budget:
                break
            t_relax *= 2.0
        else:
            raise SimplexViolationError("relaxation budget not reachable")
        segments.append(Segment(tuple(identity_perm(total)), t_relax))
        cur = _clamp_simplex(block_flow(cur, t_relax))
        active_heads = [k * n for k in range(n ** (m - r))]
        gather = _gather_perm(active_heads, total)
        segments.append(Segment(tuple(gather), 0.0))
        cur = apply_perm(gather, cur)

    # Step 2: planned on the ideal collapsed state e_1; all remaining maps
    # are 1-norm contractions so the step-1 error rides along unchanged.
    block_mass = np.array([x[k * n:(k + 1) * n].sum() for k in range(n_blocks)])

    for level in range(1, m):
        span = n ** (m - level)            # coordinates per child subtree
        child_blocks = span // n           # fine blocks per child subtree
        parents = [k * span * n for k in range(n ** (level - 1))]
        steer: dict[int, Schedule] = {}
        for p_pos in parents:
            first_block = p_pos // n
            child_masses = np.array([
                block_mass[first_block + i * child_blocks:
                           first_block + (i + 1) * child_blocks].sum()
                for i in range(n)
            ])
            mass = child_masses.sum()
            if mass <= 1e-15:
                continue
            steer[p_pos // n] = synthesize_from_ground(gen_block, child_masses / mass)
        segments.extend(_merge_parallel(steer, n, total))
        # scatter the split masses from block slots to the child head positions
        images = np.full(total, -1, dtype=int)
        for p_pos in parents:
            for i in range(n):
                images[p_pos + i * span] = p_pos + i
        used = set(int(v) for v in images if v >= 0)
        remaining = iter(i for i in range(total) if i not in used)
        for slot in range(total):
            if images[slot] < 0:
                images[slot] = next(remaining)
        segments.append(Segment(tuple(images), 0.0))

    final: dict[int, Schedule] = {}
    for k in range(n_blocks):
        if block_mass[k] <= 1e-15:
            continue
        final[k] = synthesize_from_ground(gen_block, x[k * n:(k + 1) * n] / block_mass[k])
    segments.extend(_merge_parallel(final, n, total))
    return Schedule(segments)


# ---------------------------------------------------------------------------
# finite-temperature envelope
# ---------------------------------------------------------------------------

@dataclass
class EnvelopeReport:
    initial_majorized: bool
    tangential_mu: dict[tuple[int, ...], float | None]
    sampled_violations: int
    samples_checked: int

    @property
    def tangential_ok(self) -> bool:
        return all(mu is not None for mu in self.tangential_mu.values())


def majorization_envelope(x0, d, sample_count: int = 100, sample_depth: int = 4,
                          seed: int = 0) -> tuple[np.ndarray, EnvelopeReport]:
    """Envelope vertex z bounding the reachable set of the thermal model.

    Requires constant neighbour ratios of d (equidistant energy levels) and
    x0 >= 0.  z is the maximal corner of the d-majorization polytope of x0;
    the report verifies that (a) x0 is majorized by z, (b) the tangential
    condition (1 - mu B0) P z < z holds for every permutation P at some
    dyadic mu <= 1, and (c) sampled random schedule endpoints stay majorized
    by z.  Tangential failures are reported, not raised.
    """
    x0 = as_vector(x0)
    d = as_weight_vector(d)
    if x0.size != d.size:
        raise ValueError("x0 and d must have equal length")
    if np.min(x0) < -1e-12:
        raise ValueError("x0 must be entrywise nonnegative")
    if d.size > 1:
        ratios = d[1:] / d[:-1]
        if np.max(np.abs(ratios - ratios[0])) > 1e-10:
            raise ValueError("d must have constant neighbour ratios (equidistant levels)")

    n = d.size
    x0 = np.maximum(x0, 0.0)
    x0 = x0 / x0.sum()
    z = max_corner(x0, d)
    gen = b0_from_rates(thermal_rates(d))

    tangential: dict[tuple[int, ...], float | None] = {}
    for perm in itertools.permutations(range(n)):
        pz = apply_perm(np.array(perm), z)
        found = None
        for k in range(41):
            mu = 2.0 ** (-k)
            if majorizes(pz - mu * (gen.b0 @ pz), z):
                found = mu
                break
        tangential[perm] = found

    violations = 0
    for s in range(sample_count):
        pts = reachable_sample(gen, x0, depth=sample_depth, seed=seed + s)
        violations += sum(1 for p in pts if not majorizes(p, z))

    report = EnvelopeReport(
        initial_majorized=majorizes(x0, z),
        tangential_mu=tangential,
        sampled_violations=violations,
        samples_checked=sample_count,
    )
    return z, report


# ---------------------------------------------------------------------------
# reproducible random sampling
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Tiny 64-bit PRNG (splitmix-style), reproducible across platforms."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def uniform(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def below(self, bound: int) -> int:
        # rejection sampling keeps the draw unbiased
        limit = (_MASK64 + 1) - (_MASK64 + 1) % bound
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound

    def permutation(self, n: int) -> np.ndarray:
        p = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            p[i], p[j] = p[j], p[i]
        return p


def random_schedule(n: int, depth: int, seed: int) -> Schedule:
    """Deterministic pseudo-random schedule: Fisher-Yates permutations and
    log-uniform durations on [1e-3, 1e2]."""
    if depth > MAX_SAMPLE_DEPTH:
        raise ValueError(f"depth capped at {MAX_SAMPLE_DEPTH}")
    rng = SplitMix64(seed)
    lo, hi = np.log(1e-3), np.log(1e2)
    segments = []
    for _ in range(depth):
        perm = rng.permutation(n)
        duration = float(np.exp(lo + rng.uniform() * (hi - lo)))
        segments.append(Segment(tuple(perm), duration))
    return Schedule(segments)


def reachable_sample(gen: Generator, x0, depth: int, seed: int) -> np.ndarray:
    """States visited by one random schedule, including x0 (depth+1 points)."""
    x = _check_simplex(as_vector(x0))
    sched = random_schedule(gen.n, depth, seed)
    points = [x.copy()]
    for seg in sched.segments:
        x = _clamp_simplex(flow(gen, apply_perm(seg.perm, x), seg.duration))
        points.append(x.copy())
    return np.array(points)


__all__ = [
    "EnvelopeReport",
    "Schedule",
    "Segment",
    "SimplexViolationError",
    "SplitMix64",
    "Trajectory",
    "endpoint",
    "local_generator",
    "majorization_envelope",
    "random_schedule",
    "reachable_sample",
    "simulate",
    "synthesize",
    "synthesize_from_ground",
    "synthesize_local",
]
