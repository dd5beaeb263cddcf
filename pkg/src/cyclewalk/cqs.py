"""Bank of independent birth-death queues with excursion-maximum statistics.

Levels k = 1 .. cutoff each hold an independent queue: new customers arrive
at rate 1, and each customer at level k departs at rate k, so the whole queue
at level k empties at rate k * xi[k].  The simulation is exact event-driven
(Gillespie): exponential holding time at total rate cutoff + sum(k * xi[k]),
then a uniform draw picks a birth level or a death level proportional to its
rate.  Per event the generator is consumed in a fixed order (holding time,
then one uniform for the event pick, then one integer draw if the event is a
birth), so runs are reproducible from the seed alone.

The embedded jump chain of a single queue observed only when its own size
changes steps from m down with probability m/(m+1) and up with probability
1/(m+1).  An excursion starts at 1 and ends at 0; the running maximum M has
the exact tail P(M > x) = 1/phi(x+1) with phi(x) = sum_{k<=x} (k-1)!, which
`exact_excursion_tail` recovers independently from a hitting-probability
linear solve.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .theory import phi_factorial
from .walk import substream


class CqsState:
    """Occupancy vector with O(1) running totals sum(xi) and sum(k*xi)."""

    __slots__ = ("cutoff", "xi", "total", "mass", "t")

    def __init__(self, cutoff: int):
        if cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {cutoff}")
        self.cutoff = int(cutoff)
        self.xi = np.zeros(cutoff + 1, dtype=np.int64)  # index 0 unused
        self.total = 0
        self.mass = 0
        self.t = 0.0

    def change(self, k: int, delta: int) -> None:
        if self.xi[k] + delta < 0:
            raise ValueError(f"occupancy at level {k} would go negative")
        self.xi[k] += delta
        self.total += delta
        self.mass += delta * k

    def event_rate(self) -> int:
        # births arrive at rate 1 on each of `cutoff` levels; deaths at k*xi[k]
        return self.cutoff + self.mass


@dataclass(frozen=True, eq=False)
class CqsResult:
    """One replication: running suprema plus the full totals trace."""

    n: int
    a: float
    cutoff: int
    horizon: float
    sup_total: int
    sup_mass: int
    event_count: int
    times: np.ndarray  # event times, starting with 0.0
    totals: np.ndarray  # sum(xi) after each event
    masses: np.ndarray  # sum(k*xi) after each event
    mean_occupancy: np.ndarray  # time-average of xi[k] over [0, horizon]
    final_occupancy: np.ndarray


def simulate_cqs(n: int, a: float, horizon_c: float, rng) -> CqsResult:
    """Run one replication of the queue bank up to clock time horizon_c.

    The cutoff is floor(n**a) levels.  Running suprema of sum(xi) and
    sum(k*xi) are tracked event by event, and per-level occupancy is
    time-integrated so `mean_occupancy` is exact for the realized path.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 < a < 1.0:
        raise ValueError(f"a must lie in (0, 1), got {a}")
    if horizon_c < 0.0:
        raise ValueError(f"horizon_c must be >= 0, got {horizon_c}")
    cutoff = int(math.floor(n**a))
    state = CqsState(cutoff)
    levels = np.arange(cutoff + 1, dtype=np.int64)

    integral = np.zeros(cutoff + 1, dtype=np.float64)
    last_change = np.zeros(cutoff + 1, dtype=np.float64)
    times = [0.0]
    totals = [0]
    masses = [0]
    sup_total = 0
    sup_mass = 0

    while True:
        rate = state.event_rate()
        dt = rng.exponential(1.0 / rate)
        if state.t + dt > horizon_c:
            break
        t = state.t + dt
        u = rng.random() * rate
        if u < cutoff:
            k = int(rng.integers(1, cutoff + 1))
            delta = 1
        else:
            weights = np.cumsum(levels * state.xi)
            k = int(np.searchsorted(weights, u - cutoff, side="right"))
            delta = -1
        integral[k] += state.xi[k] * (t - last_change[k])
        last_change[k] = t
        state.change(k, delta)
        state.t = t
        times.append(t)
        totals.append(state.total)
        masses.append(state.mass)
        sup_total = max(sup_total, state.total)
        sup_mass = max(sup_mass, state.mass)

    integral += state.xi * (horizon_c - last_change)
    mean_occ = integral / horizon_c if horizon_c > 0 else integral
    return CqsResult(
        n=n,
        a=a,
        cutoff=cutoff,
        horizon=horizon_c,
        sup_total=sup_total,
        sup_mass=sup_mass,
        event_count=len(times) - 1,
        times=np.asarray(times),
        totals=np.asarray(totals, dtype=np.int64),
        masses=np.asarray(masses, dtype=np.int64),
        mean_occupancy=mean_occ,
        final_occupancy=state.xi.copy(),
    )


def simulate_cqs_batch(
    n: int, a: float, horizon_c: float, reps: int, seed: int, threads: int = 1
) -> list[CqsResult]:
    """Independent replications on substreams (seed, rep); order is stable."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if threads <= 1:
        return [simulate_cqs(n, a, horizon_c, substream(seed, r)) for r in range(reps)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(simulate_cqs, n, a, horizon_c, substream(seed, r))
            for r in range(reps)
        ]
        return [f.result() for f in futures]


def occupancy_bounds(n: int, a: float) -> tuple[float, float]:
    """The two desk-scale envelope values: (log n)^2 and n**a * (log n)^2."""
    log_sq = math.log(n) ** 2
    return log_sq, math.floor(n**a) * log_sq


@dataclass(frozen=True)
class ExcursionRecord:
    """One excursion of the embedded jump chain: start at 1, absorb at 0."""

    level: int
    max_level: int
    steps: int

    def __post_init__(self):
        if self.max_level < 1:
            raise ValueError("an excursion starting at 1 has max level >= 1")


def excursion_max_samples(count: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Sample running maxima and step counts of `count` excursions.

    All excursions advance in lockstep: one uniform per still-active chain
    per round, so the draw sequence is reproducible for a fixed count.
    Returns (max_levels, steps), both int64 arrays of length count.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    state = np.ones(count, dtype=np.int64)
    peak = np.ones(count, dtype=np.int64)
    steps = np.zeros(count, dtype=np.int64)
    active = np.flatnonzero(state)
    while active.size:
        u = rng.random(active.size)
        s = state[active]
        s = np.where(u < 1.0 / (s + 1), s + 1, s - 1)
        state[active] = s
        peak[active] = np.maximum(peak[active], s)
        steps[active] += 1
        active = active[s > 0]
    return peak, steps


@dataclass(frozen=True, eq=False)
class ExcursionTail:
    """Empirical vs exact tail of the excursion maximum."""

    count: int
    x: np.ndarray
    empirical: np.ndarray  # fraction of excursions with M > x
    exact: np.ndarray  # 1 / phi(x + 1)
    max_levels: np.ndarray = field(repr=False)


def excursion_max_distribution(x_max: int, count: int, rng) -> ExcursionTail:
    """Empirical P(M > x) for x = 1 .. x_max against the exact 1/phi(x+1)."""
    if x_max < 1:
        raise ValueError(f"x_max must be >= 1, got {x_max}")
    peaks, _ = excursion_max_samples(count, rng)
    xs = np.arange(1, x_max + 1, dtype=np.int64)
    empirical = np.array([np.mean(peaks > x) for x in xs])
    exact = np.array([1.0 / phi_factorial(int(x) + 1) for x in xs])
    return ExcursionTail(
        count=count, x=xs, empirical=empirical, exact=exact, max_levels=peaks
    )


def exact_excursion_tail(x: int) -> float:
    """P(M > x) by solving the hitting problem, independent of the phi form.

    h(m) = P(reach x+1 before 0 | start at m) satisfies
    h(m) = h(m+1)/(m+1) + m*h(m-1)/(m+1) on 1 <= m <= x with h(0) = 0 and
    h(x+1) = 1; the excursion maximum exceeds x iff the chain hits x+1
    before absorbing, so the answer is h(1).
    """
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0:
        return 1.0
    mat = np.zeros((x, x))
    rhs = np.zeros(x)
    for m in range(1, x + 1):
        row = m - 1
        mat[row, row] = 1.0
        up = 1.0 / (m + 1)
        if m + 1 <= x:
            mat[row, row + 1] = -up
        else:
            rhs[row] += up
        if m - 1 >= 1:
            mat[row, row - 1] = -(m / (m + 1))
    h = np.linalg.solve(mat, rhs)
    return float(h[0])
