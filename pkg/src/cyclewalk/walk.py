"""Drivers for the coupled transposition walk.

Time handling: "discrete" mode runs exactly floor(c*n/2) uniform draws to
reach normalized time c; "poisson" mode first draws the event count
N ~ Poisson(c*n/2) of a rate-one event clock and then applies that many
draws, which is the continuous-time chain observed at time c*n/2.  Snapshots
are realized as event-count thresholds inside one run, so a whole c-grid
costs a single pass.

Randomness scheme (fixed, and relied on for reproducibility): replicate r of
a run with master seed s uses numpy's default generator seeded with
SeedSequence((s, r)) and draws, in order, the Poisson snapshot increments
(continuous mode only), the treap priorities, then the (i, j) pair array.
Results are therefore independent of thread count and replicate order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from cyclewalk import _walkkernel
from cyclewalk.graphcouple import EvolvingMultigraph
from cyclewalk.permcycle import DynamicPermutation, EffectKind

TIME_MODES = ("discrete", "poisson")

TRACE_COLUMNS = (
    "N_raw", "N_nontrivial", "D", "Z", "K1", "L1", "N_up", "components", "giant",
)


def substream(master_seed: int, index: int) -> np.random.Generator:
    """Replicate-indexed generator; the only rng constructor used by drivers."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, index)))


@dataclass(frozen=True)
class WalkConfig:
    n: int
    horizon_c: float
    time_mode: str = "poisson"
    snapshots_c: tuple[float, ...] = ()
    mass_exponent: float = 0.55

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need n >= 1, got n={self.n}")
        if self.horizon_c <= 0:
            raise ValueError(f"need horizon_c > 0, got {self.horizon_c}")
        if self.time_mode not in TIME_MODES:
            raise ValueError(f"time_mode must be one of {TIME_MODES}")
        if not 0.0 < self.mass_exponent < 1.0:
            raise ValueError("mass_exponent must lie in (0,1)")
        snaps = tuple(self.snapshots_c) or (self.horizon_c,)
        if any(b < a for a, b in zip(snaps, snaps[1:])):
            raise ValueError("snapshots_c must be ascending")
        if snaps[-1] > self.horizon_c + 1e-12:
            raise ValueError("snapshots beyond horizon_c")
        object.__setattr__(self, "snapshots_c", snaps)

    @property
    def snapshot_times(self) -> np.ndarray:
        return np.asarray(self.snapshots_c, dtype=np.float64) * self.n / 2.0


@dataclass(frozen=True)
class WalkTrace:
    """Per-snapshot statistics of one replicate; columns as in TRACE_COLUMNS."""

    config: WalkConfig
    rows: np.ndarray = field(repr=False)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, TRACE_COLUMNS.index(name)]

    def __post_init__(self):
        d = self.column("D")
        nt = self.column("N_nontrivial")
        z = self.column("Z")
        if not np.array_equal(d, nt - 2 * z):
            raise AssertionError("distance identity D = N_nontrivial - 2Z violated")


def draw_walk_inputs(
    rng: np.random.Generator, n: int, time_mode: str, times: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pre-draw (thresholds, priorities, pairs) for one replicate.

    `times` are the ascending snapshot times on the event clock (t = c*n/2).
    """
    if time_mode == "discrete":
        thresholds = np.floor(times + 1e-9).astype(np.int64)
    else:
        lam = np.diff(np.concatenate([[0.0], times]))
        thresholds = np.cumsum(rng.poisson(lam=lam)).astype(np.int64)
    prio = rng.integers(1, 1 << 62, size=n + 1, dtype=np.uint64)
    pairs = rng.integers(1, n + 1, size=(int(thresholds[-1]), 2), dtype=np.int64)
    return thresholds, prio, pairs


def scripted_run(
    n: int, events: list[tuple[int, int]], mass_exponent: float = 0.55
) -> WalkTrace:
    """Apply an explicit event list, snapshotting after every event.

    Meant for hand-checked examples and oracles; no randomness involved.
    """
    pairs = np.asarray(events, dtype=np.int64).reshape(-1, 2)
    n_events = len(pairs)
    thresholds = np.arange(0, n_events + 1, dtype=np.int64)
    rng = substream(0, 0)
    prio = rng.integers(1, 1 << 62, size=n + 1, dtype=np.uint64)
    out = np.zeros((n_events + 1, _walkkernel.N_COLS), dtype=np.int64)
    filled = _walkkernel.coupled_walk(
        n, pairs, thresholds, prio, float(n) ** mass_exponent, out
    )
    assert filled == n_events + 1
    config = WalkConfig(
        n=n,
        horizon_c=max(2.0 * n_events / n, 1e-9),
        time_mode="discrete",
        snapshots_c=(),
        mass_exponent=mass_exponent,
    )
    return WalkTrace(config=config, rows=out)


def run(config: WalkConfig, seed: int = 0, rep: int = 0) -> WalkTrace:
    """One replicate through the compiled kernel."""
    rng = substream(seed, rep)
    thresholds, prio, pairs = draw_walk_inputs(
        rng, config.n, config.time_mode, config.snapshot_times
    )
    out = np.zeros((len(thresholds), _walkkernel.N_COLS), dtype=np.int64)
    filled = _walkkernel.coupled_walk(
        config.n, pairs, thresholds, prio, float(config.n) ** config.mass_exponent, out
    )
    assert filled == len(thresholds)
    return WalkTrace(config=config, rows=out)


def run_reference(config: WalkConfig, seed: int = 0, rep: int = 0) -> WalkTrace:
    """Same contract as run(), but through the pure-Python coupled objects.

    Consumes the replicate stream identically, so its trace must equal the
    kernel's bit for bit; kept as the correctness oracle.
    """
    rng = substream(seed, rep)
    thresholds, _, pairs = draw_walk_inputs(
        rng, config.n, config.time_mode, config.snapshot_times
    )
    perm = DynamicPermutation(config.n, mode="treap")
    graph = EvolvingMultigraph(config.n)
    rows = np.zeros((len(thresholds), _walkkernel.N_COLS), dtype=np.int64)
    nt = z = 0
    si = 0

    def record(step: int):
        nonlocal si
        while si < len(thresholds) and thresholds[si] == step:
            stats = perm.cycle_stats(config.mass_exponent)
            census = graph.component_counts()
            rows[si] = (
                step, nt, perm.distance, z, stats.size_of_1, stats.largest,
                stats.mass_upstairs, census.component_count, census.giant_size,
            )
            si += 1

    record(0)
    for step, (i, j) in enumerate(pairs, start=1):
        i, j = int(i), int(j)
        if i != j:
            nt += 1
            effect = perm.apply_transposition(i, j)
            if effect.kind is EffectKind.FRAGMENTATION:
                z += 1
            graph.add_edge(i, j)
        record(step)
    assert si == len(thresholds)
    return WalkTrace(config=config, rows=rows)


def replicate_rows(
    config: WalkConfig,
    reps: int,
    seed: int = 0,
    threads: int | None = None,
) -> np.ndarray:
    """Stacked kernel traces, shape (reps, n_snapshots, N_COLS)."""
    if reps < 1:
        raise ValueError(f"need reps >= 1, got {reps}")
    times = config.snapshot_times
    n_snap = len(times)
    out = np.zeros((reps, n_snap, _walkkernel.N_COLS), dtype=np.int64)
    mass_cutoff = float(config.n) ** config.mass_exponent

    def one(rep: int):
        rng = substream(seed, rep)
        thresholds, prio, pairs = draw_walk_inputs(rng, config.n, config.time_mode, times)
        _walkkernel.coupled_walk(config.n, pairs, thresholds, prio, mass_cutoff, out[rep])

    n_workers = threads or 1
    if n_workers <= 1:
        for rep in range(reps):
            one(rep)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(one, range(reps)))
    d = out[:, :, _walkkernel.COL_D]
    nt = out[:, :, _walkkernel.COL_N_NT]
    z = out[:, :, _walkkernel.COL_Z]
    if not np.array_equal(d, nt - 2 * z):
        raise AssertionError("distance identity D = N_nontrivial - 2Z violated")
    return out


def fragmentation_census(
    n: int,
    c: float,
    reps: int,
    seed: int = 0,
    time_mode: str = "poisson",
    threads: int | None = None,
) -> np.ndarray:
    """Fragmentation counts Z at time c*n/2 across replicates."""
    config = WalkConfig(n=n, horizon_c=c, time_mode=time_mode)
    rows = replicate_rows(config, reps, seed=seed, threads=threads)
    return rows[:, -1, _walkkernel.COL_Z]


def critical_window_samples(
    n: int,
    r_grid: tuple[float, ...],
    reps: int,
    seed: int = 0,
    threads: int | None = None,
) -> dict[str, np.ndarray]:
    """Centered, scaled fragmentation counts across the critical window.

    For each r in [0, 1] the walk is observed at time c_n(r)*n/2 with
    c_n(r) = 1 - n^(-r/3), and W_n(r) = sqrt(6/log n) * (Z - (r/6) log n)
    is returned per replicate (shape reps x len(r_grid)).
    """
    r = np.asarray(r_grid, dtype=np.float64)
    if np.any(r < 0.0) or np.any(r > 1.0) or np.any(np.diff(r) < 0.0):
        raise ValueError("r_grid must be ascending within [0, 1]")
    c_vals = 1.0 - float(n) ** (-r / 3.0)
    # c_n(0) = 0 gives a threshold at event count zero, which the kernel
    # records before the first step; feed times directly rather than a config
    times = c_vals * n / 2.0
    out = np.zeros((reps, len(r), _walkkernel.N_COLS), dtype=np.int64)
    mass_cutoff = float(n) ** 0.55

    def one(rep: int):
        rng = substream(seed, rep)
        thresholds, prio, pairs = draw_walk_inputs(rng, n, "poisson", times)
        _walkkernel.coupled_walk(n, pairs, thresholds, prio, mass_cutoff, out[rep])

    n_workers = threads or 1
    if n_workers <= 1:
        for rep in range(reps):
            one(rep)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(one, range(reps)))
    z = out[:, :, _walkkernel.COL_Z].astype(np.float64)
    logn = math.log(n)
    w = math.sqrt(6.0 / logn) * (z - (r / 6.0) * logn)
    return {"r": r, "c": c_vals, "Z": out[:, :, _walkkernel.COL_Z], "W": w}
