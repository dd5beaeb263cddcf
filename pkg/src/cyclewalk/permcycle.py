"""Dynamic permutation of {1..n} with incremental cycle bookkeeping.

The permutation is stored as a successor map sigma plus an index of its
cycles.  Applying the transposition (i j) on the right either merges the two
cycles containing i and j or, when they share one, splits it at the point
determined by sigma itself; the effect (which one happened, with exact sizes)
is reported to the caller.  The cycle size spectrum and cycle count are kept
current after every operation.

Two index modes are provided.  "treap" keeps each cycle in a randomized
balanced tree (see _treap) so membership and split-point queries cost
O(log n) even when a giant cycle is present; "traversal" answers the same
questions by walking sigma around the cycle, which is linear in the cycle
length but trivially correct, and is kept as an oracle for the treap path.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from cyclewalk import _treap


class EffectKind(enum.Enum):
    NOOP = "noop"
    COAGULATION = "coagulation"
    FRAGMENTATION = "fragmentation"


@dataclass(frozen=True)
class TranspositionEffect:
    """What one transposition did to the cycle structure.

    sizes_before/sizes_after are the affected cycle sizes: a coagulation maps
    (a, b) -> (a + b,), a fragmentation (L,) -> (d, L - d).  NoOp carries
    empty tuples.
    """

    kind: EffectKind
    sizes_before: tuple[int, ...] = ()
    sizes_after: tuple[int, ...] = ()


@dataclass(frozen=True)
class CycleStats:
    cycle_count: int
    distance: int
    largest: int
    size_of_1: int
    mass_upstairs: int
    spectrum: dict[int, int] = field(repr=False)


def cycles_from_successors(sigma: np.ndarray) -> list[tuple[int, ...]]:
    """Full O(n) cycle decomposition of a successor map (1-based, sigma[0] unused)."""
    n = len(sigma) - 1
    seen = np.zeros(n + 1, dtype=bool)
    out = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        v = int(sigma[start])
        while v != start:
            cyc.append(v)
            seen[v] = True
            v = int(sigma[v])
        out.append(tuple(cyc))
    return out


class DynamicPermutation:
    """Identity permutation of {1..n}, mutated by apply_transposition."""

    def __init__(self, n: int, mode: str = "treap", rng: np.random.Generator | None = None):
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        if mode not in ("treap", "traversal"):
            raise ValueError(f"unknown mode {mode!r}")
        self.n = n
        self.mode = mode
        self.sigma = np.arange(n + 1, dtype=np.int64)
        self._spectrum = np.zeros(n + 1, dtype=np.int64)
        self._spectrum[1] = n
        self._cycle_count = n
        if mode == "treap":
            rng = rng if rng is not None else np.random.default_rng(0)
            self._left = np.zeros(n + 1, dtype=np.int64)
            self._right = np.zeros(n + 1, dtype=np.int64)
            self._parent = np.zeros(n + 1, dtype=np.int64)
            self._size = np.ones(n + 1, dtype=np.int64)
            self._size[0] = 0
            self._prio = rng.integers(1, 1 << 62, size=n + 1, dtype=np.uint64)

    @classmethod
    def from_cycles(
        cls,
        n: int,
        cycles: list[tuple[int, ...]],
        mode: str = "treap",
        rng: np.random.Generator | None = None,
    ) -> "DynamicPermutation":
        """Build a permutation from an explicit cycle decomposition.

        Fixed points may be omitted from `cycles`.
        """
        p = cls(n, mode=mode, rng=rng)
        covered = np.zeros(n + 1, dtype=bool)
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                if covered[a]:
                    raise ValueError(f"element {a} appears twice")
                covered[a] = True
                p.sigma[a] = b
        p._spectrum[:] = 0
        p._cycle_count = 0
        for cyc in cycles_from_successors(p.sigma):
            p._spectrum[len(cyc)] += 1
            p._cycle_count += 1
        if mode == "treap":
            for cyc in cycles:
                if len(cyc) < 2:
                    continue
                root = cyc[0]
                for v in cyc[1:]:
                    root = _treap.t_join(
                        p._left, p._right, p._parent, p._size, p._prio, root, v
                    )
        return p

    # -- queries ---------------------------------------------------------

    @property
    def cycle_count(self) -> int:
        return self._cycle_count

    @property
    def distance(self) -> int:
        """Cayley distance to the identity: n minus the number of cycles."""
        return self.n - self._cycle_count

    def spectrum(self) -> dict[int, int]:
        ks = np.nonzero(self._spectrum)[0]
        return {int(k): int(self._spectrum[k]) for k in ks}

    def cycles(self) -> list[tuple[int, ...]]:
        return cycles_from_successors(self.sigma)

    def same_cycle(self, i: int, j: int) -> bool:
        self._check(i)
        self._check(j)
        if i == j:
            return True
        if self.mode == "treap":
            return _treap.t_root(self._parent, i) == _treap.t_root(self._parent, j)
        v = int(self.sigma[i])
        while v != i:
            if v == j:
                return True
            v = int(self.sigma[v])
        return False

    def cycle_size_of(self, i: int) -> int:
        self._check(i)
        if self.mode == "treap":
            return int(self._size[_treap.t_root(self._parent, i)])
        length = 1
        v = int(self.sigma[i])
        while v != i:
            length += 1
            v = int(self.sigma[v])
        return length

    def cycle_stats(self, mass_exponent: float = 0.55) -> CycleStats:
        """Snapshot statistics; mass_upstairs counts elements on cycles with
        size strictly above n**mass_exponent."""
        if not 0.0 < mass_exponent < 1.0:
            raise ValueError(f"mass_exponent must lie in (0,1), got {mass_exponent}")
        cutoff = float(self.n) ** mass_exponent
        ks = np.nonzero(self._spectrum)[0]
        largest = int(ks.max()) if len(ks) else 0
        mass_up = int(sum(int(k) * int(self._spectrum[k]) for k in ks if k > cutoff))
        return CycleStats(
            cycle_count=self._cycle_count,
            distance=self.distance,
            largest=largest,
            size_of_1=self.cycle_size_of(1),
            mass_upstairs=mass_up,
            spectrum=self.spectrum(),
        )

    # -- mutation --------------------------------------------------------

    def apply_transposition(self, i: int, j: int) -> TranspositionEffect:
        """Multiply on the right by the transposition (i j) and report the
        resulting merge or split with exact cycle sizes."""
        self._check(i)
        self._check(j)
        if i == j:
            return TranspositionEffect(EffectKind.NOOP)
        if self.mode == "treap":
            effect = self._apply_treap(i, j)
        else:
            effect = self._apply_traversal(i, j)
        self.sigma[i], self.sigma[j] = self.sigma[j], self.sigma[i]
        return effect

    def _apply_treap(self, i: int, j: int) -> TranspositionEffect:
        root_i, pos_i = _treap.t_locate(self._left, self._right, self._parent, self._size, i)
        root_j, pos_j = _treap.t_locate(self._left, self._right, self._parent, self._size, j)
        if root_i == root_j:
            length = int(self._size[root_i])
            d, rest = _treap.t_apply_frag(
                self._left, self._right, self._parent, self._size, self._prio,
                root_i, pos_i, pos_j,
            )
            return self._record_frag(length, int(d), int(rest))
        size_i = int(self._size[root_i])
        size_j = int(self._size[root_j])
        _treap.t_apply_coag(
            self._left, self._right, self._parent, self._size, self._prio,
            root_i, pos_i, root_j, pos_j,
        )
        return self._record_coag(size_i, size_j)

    def _apply_traversal(self, i: int, j: int) -> TranspositionEffect:
        # one sweep from i: either meet j (shared cycle, distance m) or come
        # back around to i (cycle length, j elsewhere)
        m = 1
        v = int(self.sigma[i])
        while v != i and v != j:
            v = int(self.sigma[v])
            m += 1
        if v == j:
            length = m + 1
            w = int(self.sigma[j])
            while w != i:
                w = int(self.sigma[w])
                length += 1
            return self._record_frag(length, m, length - m)
        size_i = m
        size_j = 1
        w = int(self.sigma[j])
        while w != j:
            size_j += 1
            w = int(self.sigma[w])
        return self._record_coag(size_i, size_j)

    def _record_frag(self, length: int, d: int, rest: int) -> TranspositionEffect:
        self._spectrum[length] -= 1
        self._spectrum[d] += 1
        self._spectrum[rest] += 1
        self._cycle_count += 1
        return TranspositionEffect(
            EffectKind.FRAGMENTATION, sizes_before=(length,), sizes_after=(d, rest)
        )

    def _record_coag(self, size_i: int, size_j: int) -> TranspositionEffect:
        self._spectrum[size_i] -= 1
        self._spectrum[size_j] -= 1
        self._spectrum[size_i + size_j] += 1
        self._cycle_count -= 1
        return TranspositionEffect(
            EffectKind.COAGULATION,
            sizes_before=(size_i, size_j),
            sizes_after=(size_i + size_j,),
        )

    def _check(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise ValueError(f"position {i} outside 1..{self.n}")

    def __repr__(self) -> str:
        return (
            f"DynamicPermutation(n={self.n}, cycles={self._cycle_count}, "
            f"distance={self.distance}, mode={self.mode!r})"
        )
