"""Signed genomes, the breakpoint graph, and the reversal walk.

A genome is a signed permutation of marker magnitudes 1..m.  Doubling each
marker x into the ordered pair (2x-1, 2x), or (2x, 2x-1) when x is negative,
and adding sentinels 0 and 2m+1 produces a graph whose vertices each carry
one black edge (adjacency in the subject genome) and one gray edge
(adjacency in the identity).  Its component count c gives the parsimony
lower bound d0 = m + 1 - c on the reversal distance; d0 ignores the
hurdle/fortress corrections of the exact distance and is reported strictly
as a lower bound.

The reversal walk reuses the transposition walk's uniform label pairs:
labels 1..m+1 name the m+1 gaps of the genome (both ends included), and the
pair (i, j) reverses the segment strictly between gaps min-1 and max-1.
Running both walks on identical draws is what makes their distance curves
comparable.  Sign search for unsigned data is plain simulated annealing over
single-sign flips.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numba
import numpy as np

from cyclewalk.walk import substream

__all__ = [
    "BreakpointComponents",
    "SignAssignment",
    "SignedGenome",
    "anneal_signs",
    "apply_reversal",
    "breakpoint_components",
    "bundled_genome",
    "coupled_reversal_walk",
    "d0_lower_bound",
    "double_markers",
    "format_doubled",
    "load_genomes",
    "parse_genomes",
    "sorting_sequence",
    "REV_COLUMNS",
]


@dataclass(frozen=True)
class SignedGenome:
    """Signed permutation of marker magnitudes 1..m."""

    markers: tuple[int, ...]

    def __post_init__(self):
        mags = sorted(abs(x) for x in self.markers)
        if not self.markers or mags != list(range(1, len(self.markers) + 1)):
            raise ValueError("markers must be a signed permutation of 1..m")

    @classmethod
    def identity(cls, m: int) -> "SignedGenome":
        return cls(tuple(range(1, m + 1)))

    @property
    def m(self) -> int:
        return len(self.markers)

    @property
    def is_identity(self) -> bool:
        return self.markers == tuple(range(1, self.m + 1))

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.markers)


@dataclass(frozen=True)
class BreakpointComponents:
    count: int
    components: tuple[tuple[int, ...], ...]


def double_markers(g: SignedGenome) -> np.ndarray:
    """Doubled vertex sequence with sentinels: length 2m + 2.

    Marker +x contributes (2x-1, 2x), marker -x contributes (2x, 2x-1);
    position 0 holds 0 and the last position holds 2m+1.
    """
    m = g.m
    d = np.empty(2 * m + 2, dtype=np.int64)
    d[0] = 0
    for q, x in enumerate(g.markers):
        if x > 0:
            d[2 * q + 1] = 2 * x - 1
            d[2 * q + 2] = 2 * x
        else:
            d[2 * q + 1] = -2 * x
            d[2 * q + 2] = -2 * x - 1
    d[2 * m + 1] = 2 * m + 1
    return d


def format_doubled(g: SignedGenome) -> str:
    """Doubled sequence in display form: commas at black edges.

    Example for the identity on 2 markers: "0, 1 2, 3 4, 5".
    """
    d = double_markers(g)
    m = g.m
    inner = ", ".join(f"{d[2 * q + 1]} {d[2 * q + 2]}" for q in range(m))
    return f"{d[0]}, {inner}, {d[2 * m + 1]}"


def breakpoint_components(g: SignedGenome) -> BreakpointComponents:
    """Components of the black/gray graph by alternating traversal.

    Every vertex has exactly one black and one gray edge, so components are
    closed alternating paths; each is reported in traversal order starting
    from its smallest vertex.
    """
    d = double_markers(g)
    n_vert = len(d)
    black = np.empty(n_vert, dtype=np.int64)
    for t in range(n_vert // 2):
        a, b = d[2 * t], d[2 * t + 1]
        black[a] = b
        black[b] = a
    visited = np.zeros(n_vert, dtype=bool)
    comps = []
    for v in range(n_vert):
        if visited[v]:
            continue
        trail = []
        w = v
        while not visited[w]:
            visited[w] = True
            u = int(black[w])
            visited[u] = True
            trail.append(w)
            trail.append(u)
            w = u ^ 1
        comps.append(tuple(trail))
    return BreakpointComponents(count=len(comps), components=tuple(comps))


def d0_lower_bound(g: SignedGenome) -> int:
    """Parsimony lower bound m + 1 - c on the reversal distance."""
    return g.m + 1 - breakpoint_components(g).count


def apply_reversal(g: SignedGenome, lo: int, hi: int) -> SignedGenome:
    """Reverse markers lo..hi (1-based, inclusive), flipping their signs."""
    if not 1 <= lo <= hi <= g.m:
        raise ValueError(f"need 1 <= lo <= hi <= {g.m}, got ({lo}, {hi})")
    mk = g.markers
    mid = tuple(-x for x in reversed(mk[lo - 1 : hi]))
    return SignedGenome(mk[: lo - 1] + mid + mk[hi:])


def sorting_sequence(g: SignedGenome, node_cap: int = 200_000) -> list[tuple[int, int]] | None:
    """A d0-length reversal sequence to the identity, if the bound is tight.

    Depth-first search restricted to reversals that raise the component
    count by one (each therefore lowers d0 by one), with backtracking; greedy
    descent alone can dead-end.  Returns None if the cap is hit or no
    component-increasing path exists.
    """
    budget = d0_lower_bound(g)
    path: list[tuple[int, int]] = []
    nodes = 0

    def descend(cur: SignedGenome, remaining: int) -> bool:
        nonlocal nodes
        if cur.is_identity:
            return remaining == 0
        if remaining == 0:
            return False
        nodes += 1
        if nodes > node_cap:
            return False
        c_here = breakpoint_components(cur).count
        for lo in range(1, cur.m + 1):
            for hi in range(lo, cur.m + 1):
                nxt = apply_reversal(cur, lo, hi)
                if breakpoint_components(nxt).count == c_here + 1:
                    path.append((lo, hi))
                    if descend(nxt, remaining - 1):
                        return True
                    path.pop()
        return False

    return path if descend(g, budget) else None


# -- genome file format -----------------------------------------------------


def parse_genomes(text: str) -> list[SignedGenome]:
    """One genome per line, whitespace-separated signed integers, '#' comments."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            markers = tuple(int(tok) for tok in line.split())
            out.append(SignedGenome(markers))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return out


def load_genomes(path: str | Path) -> list[SignedGenome]:
    genomes = parse_genomes(Path(path).read_text())
    if not genomes:
        raise ValueError(f"no genomes in {path}")
    return genomes


def bundled_genome(name: str) -> SignedGenome:
    """Packaged datasets: "mouse_x" (11 signed markers) or "repleta"
    (79 genes, unsigned)."""
    ref = resources.files("cyclewalk").joinpath(f"data/{name}.txt")
    genomes = parse_genomes(ref.read_text())
    if len(genomes) != 1:
        raise ValueError(f"expected exactly one genome in {name}")
    return genomes[0]


# -- compiled component counting and the coupled walk -----------------------


@numba.njit(cache=True, nogil=True)
def _bp_component_count(g, dbl, black, visited):
    """c(genome) for a signed marker array, using caller scratch arrays."""
    m = g.shape[0]
    n_vert = 2 * m + 2
    dbl[0] = 0
    for q in range(m):
        x = g[q]
        if x > 0:
            dbl[2 * q + 1] = 2 * x - 1
            dbl[2 * q + 2] = 2 * x
        else:
            dbl[2 * q + 1] = -2 * x
            dbl[2 * q + 2] = -2 * x - 1
    dbl[n_vert - 1] = n_vert - 1
    for t in range(n_vert // 2):
        a = dbl[2 * t]
        b = dbl[2 * t + 1]
        black[a] = b
        black[b] = a
    for v in range(n_vert):
        visited[v] = False
    count = 0
    for v in range(n_vert):
        if visited[v]:
            continue
        count += 1
        w = v
        while not visited[w]:
            visited[w] = True
            u = black[w]
            visited[u] = True
            w = u ^ 1
    return count


@numba.njit(cache=True, nogil=True)
def _reversal_walk_kernel(m, pairs, thresholds, out):
    """Coupled reversal + transposition walk for one replicate.

    Labels run over the m+1 gaps; out rows are
    (k, D, d0, dc_minus, dc_zero, dc_plus, frag_steps, frag_zero) at each
    event-count threshold.  Returns -1 if a reversal ever moves the
    component count by more than one, which would falsify the model.
    """
    n = m + 1
    genome = np.arange(1, m + 1).astype(np.int64)
    dbl = np.zeros(2 * m + 2, dtype=np.int64)
    black = np.zeros(2 * m + 2, dtype=np.int64)
    visited = np.zeros(2 * m + 2, dtype=numba.boolean)
    sigma = np.arange(n + 1)
    ncyc = n
    c_cur = _bp_component_count(genome, dbl, black, visited)
    dc_minus = 0
    dc_zero = 0
    dc_plus = 0
    frag_steps = 0
    frag_zero = 0
    si = 0
    n_snap = thresholds.shape[0]
    while si < n_snap and thresholds[si] == 0:
        out[si, 0] = 0
        out[si, 1] = n - ncyc
        out[si, 2] = m + 1 - c_cur
        out[si, 3] = dc_minus
        out[si, 4] = dc_zero
        out[si, 5] = dc_plus
        out[si, 6] = frag_steps
        out[si, 7] = frag_zero
        si += 1
    for step in range(1, pairs.shape[0] + 1):
        i = pairs[step - 1, 0]
        j = pairs[step - 1, 1]
        if i != j:
            same = False
            v = sigma[i]
            while v != i:
                if v == j:
                    same = True
                    break
                v = sigma[v]
            if same:
                ncyc += 1
                frag_steps += 1
            else:
                ncyc -= 1
            tmp = sigma[i]
            sigma[i] = sigma[j]
            sigma[j] = tmp
            lo = min(i, j)  # reversal spans markers lo..hi in gap numbering
            hi = max(i, j) - 1
            a = lo - 1
            b = hi - 1
            while a < b:
                t = genome[a]
                genome[a] = -genome[b]
                genome[b] = -t
                a += 1
                b -= 1
            if a == b:
                genome[a] = -genome[a]
            c_new = _bp_component_count(genome, dbl, black, visited)
            dc = c_new - c_cur
            if dc < -1 or dc > 1:
                return -1
            if dc == -1:
                dc_minus += 1
            elif dc == 0:
                dc_zero += 1
                if same:
                    frag_zero += 1
            else:
                dc_plus += 1
            c_cur = c_new
        while si < n_snap and thresholds[si] == step:
            out[si, 0] = step
            out[si, 1] = n - ncyc
            out[si, 2] = m + 1 - c_cur
            out[si, 3] = dc_minus
            out[si, 4] = dc_zero
            out[si, 5] = dc_plus
            out[si, 6] = frag_steps
            out[si, 7] = frag_zero
            si += 1
    return si


REV_COLUMNS = ("k", "D", "d0", "dc_minus", "dc_zero", "dc_plus", "frag_steps", "frag_zero")


def coupled_reversal_walk(
    n_markers: int,
    horizon_c: float,
    reps: int,
    seed: int = 0,
    snapshots_c: tuple[float, ...] = (),
    threads: int | None = None,
) -> np.ndarray:
    """Replicated coupled walk; returns (reps, n_snapshots, 8) rows.

    The transposition label count is n = n_markers + 1 and the walk runs in
    discrete time: floor(c*n/2) uniform draws reach normalized time c, with
    snapshots at the given c values (default: horizon only).  Columns as in
    REV_COLUMNS; the per-step component change of the reversal side is
    classified into -1/0/+1, with its overlap with same-cycle (fragmenting)
    transposition steps tracked separately.
    """
    if n_markers < 1:
        raise ValueError("need at least one marker")
    if horizon_c <= 0:
        raise ValueError("need horizon_c > 0")
    snaps = tuple(snapshots_c) or (horizon_c,)
    if any(b < a for a, b in zip(snaps, snaps[1:])) or snaps[-1] > horizon_c + 1e-12:
        raise ValueError("snapshots_c must ascend and stay within the horizon")
    n = n_markers + 1
    thresholds = np.floor(np.asarray(snaps) * n / 2.0 + 1e-9).astype(np.int64)
    out = np.zeros((reps, len(snaps), len(REV_COLUMNS)), dtype=np.int64)

    def one(rep: int):
        rng = substream(seed, rep)
        pairs = rng.integers(1, n + 1, size=(int(thresholds[-1]), 2), dtype=np.int64)
        filled = _reversal_walk_kernel(n_markers, pairs, thresholds, out[rep])
        if filled != len(snaps):
            raise AssertionError("a reversal changed the component count by more than 1")

    n_workers = threads or 1
    if n_workers <= 1:
        for rep in range(reps):
            one(rep)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(one, range(reps)))
    return out


# -- sign annealing for unsigned data ---------------------------------------


@dataclass(frozen=True)
class SignAssignment:
    """Best sign vector found for an unsigned permutation."""

    signs: tuple[int, ...]
    d0: int
    restart_bests: tuple[int, ...]

    def genome(self, unsigned: tuple[int, ...]) -> SignedGenome:
        return SignedGenome(tuple(s * x for s, x in zip(self.signs, unsigned)))


@numba.njit(cache=True, nogil=True)
def _eval_d0(mag, signs, work, dbl, black, visited):
    m = mag.shape[0]
    for q in range(m):
        work[q] = mag[q] * signs[q]
    return m + 1 - _bp_component_count(work, dbl, black, visited)


@numba.njit(cache=True, nogil=True)
def _anneal_kernel(mag, signs, t0, cool, flips, us, best_signs):
    m = mag.shape[0]
    work = np.zeros(m, dtype=np.int64)
    dbl = np.zeros(2 * m + 2, dtype=np.int64)
    black = np.zeros(2 * m + 2, dtype=np.int64)
    visited = np.zeros(2 * m + 2, dtype=numba.boolean)
    cur = _eval_d0(mag, signs, work, dbl, black, visited)
    best = cur
    for q in range(m):
        best_signs[q] = signs[q]
    temp = t0
    for t in range(flips.shape[0]):
        f = flips[t]
        signs[f] = -signs[f]
        new = _eval_d0(mag, signs, work, dbl, black, visited)
        de = new - cur
        if de <= 0 or us[t] < math.exp(-de / temp):
            cur = new
            if cur < best:
                best = cur
                for q in range(m):
                    best_signs[q] = signs[q]
        else:
            signs[f] = -signs[f]
        temp *= cool
    return best


def _pilot_temperature(mag: np.ndarray, signs: np.ndarray, rng: np.random.Generator) -> float:
    """Initial temperature giving ~50% acceptance of the mean uphill move."""
    m = len(mag)
    work = np.zeros(m, dtype=np.int64)
    dbl = np.zeros(2 * m + 2, dtype=np.int64)
    black = np.zeros(2 * m + 2, dtype=np.int64)
    visited = np.zeros(2 * m + 2, dtype=bool)
    walk_signs = signs.copy()
    cur = _eval_d0(mag, walk_signs, work, dbl, black, visited)
    ups = []
    for f in rng.integers(0, m, size=200):
        walk_signs[f] = -walk_signs[f]
        new = _eval_d0(mag, walk_signs, work, dbl, black, visited)
        if new > cur:
            ups.append(new - cur)
        cur = new
    if not ups:
        return 1.0
    return float(np.mean(ups)) / math.log(2.0)


def anneal_signs(
    unsigned: tuple[int, ...] | list[int],
    moves: int = 100_000,
    restarts: int = 20,
    seed: int = 0,
    cooling: float | None = None,
    threads: int | None = None,
) -> SignAssignment:
    """Search for signs minimizing d0 of an unsigned permutation.

    Single-sign-flip simulated annealing, geometric cooling, best over
    independent restarts.  The default cooling factor is budget-scaled,
    exp(-5/moves), so the temperature decays by e^-5 over any move budget; a
    fixed per-move factor burns out long before large budgets are spent.
    """
    mag = np.asarray(unsigned, dtype=np.int64)
    if sorted(mag.tolist()) != list(range(1, len(mag) + 1)):
        raise ValueError("unsigned input must be a permutation of 1..m")
    if moves < 1 or restarts < 1:
        raise ValueError("need moves >= 1 and restarts >= 1")
    cool = math.exp(-5.0 / moves) if cooling is None else cooling
    m = len(mag)
    best_per_restart = np.zeros(restarts, dtype=np.int64)
    signs_per_restart = np.zeros((restarts, m), dtype=np.int8)

    def one(r: int):
        rng = substream(seed, r)
        signs = (rng.integers(0, 2, size=m, dtype=np.int8) * 2 - 1).astype(np.int8)
        t0 = _pilot_temperature(mag, signs, rng)
        flips = rng.integers(0, m, size=moves, dtype=np.int64)
        us = rng.random(moves)
        best_per_restart[r] = _anneal_kernel(
            mag, signs, t0, cool, flips, us, signs_per_restart[r]
        )

    n_workers = threads or 1
    if n_workers <= 1:
        for r in range(restarts):
            one(r)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(one, range(restarts)))
    winner = int(np.argmin(best_per_restart))
    return SignAssignment(
        signs=tuple(int(s) for s in signs_per_restart[winner]),
        d0=int(best_per_restart[winner]),
        restart_bests=tuple(int(b) for b in best_per_restart),
    )
