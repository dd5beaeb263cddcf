"""Cycle-structure bookkeeping against naive from-scratch oracles."""

import numpy as np
import pytest

from cyclewalk.permcycle import (
    CycleStats,
    DynamicPermutation,
    EffectKind,
    cycles_from_successors,
)

# (1 7 4)(2)(3 12)(5 13 9 11 6)(8 10 14): the worked 14-element example
EXAMPLE_CYCLES = [(1, 7, 4), (3, 12), (5, 13, 9, 11, 6), (8, 10, 14)]


def spectrum_of(cycles):
    spec = {}
    for c in cycles:
        spec[len(c)] = spec.get(len(c), 0) + 1
    return spec


def canonical(cycles):
    """Rotation-normalized frozenset of cycles for equality testing."""
    out = set()
    for c in cycles:
        k = c.index(min(c))
        out.add(c[k:] + c[:k])
    return out


@pytest.fixture(params=["treap", "traversal"])
def mode(request):
    return request.param


class TestIdentity:
    def test_initial_state(self, mode):
        p = DynamicPermutation(5, mode=mode)
        assert p.cycle_count == 5
        assert p.distance == 0
        assert p.spectrum() == {1: 5}
        assert p.same_cycle(1, 1)
        assert not p.same_cycle(1, 2)

    def test_n1(self, mode):
        p = DynamicPermutation(1, mode=mode)
        assert p.cycle_count == 1
        assert p.distance == 0

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            DynamicPermutation(0)

    def test_rejects_bad_mode(self):
        with pytest.raises(ValueError):
            DynamicPermutation(5, mode="magic")


class TestWorkedExample:
    def test_distance_and_stats(self, mode):
        p = DynamicPermutation.from_cycles(14, EXAMPLE_CYCLES, mode=mode)
        assert p.cycle_count == 5
        assert p.distance == 9
        stats = p.cycle_stats()
        assert stats.largest == 5
        assert stats.size_of_1 == 3
        assert stats.cycle_count == 5

    def test_same_cycle_queries(self, mode):
        p = DynamicPermutation.from_cycles(14, EXAMPLE_CYCLES, mode=mode)
        assert p.same_cycle(13, 11)
        assert not p.same_cycle(7, 9)

    def test_merge_7_9(self, mode):
        p = DynamicPermutation.from_cycles(14, EXAMPLE_CYCLES, mode=mode)
        effect = p.apply_transposition(7, 9)
        assert effect.kind is EffectKind.COAGULATION
        assert sorted(effect.sizes_before) == [3, 5]
        assert effect.sizes_after == (8,)
        assert p.same_cycle(7, 9)
        assert p.cycle_count == 4
        # right-multiplication: new orbit of 7 runs through 9's old cycle first
        assert canonical(p.cycles()) >= canonical([(7, 11, 6, 5, 13, 9, 4, 1)])
        assert spectrum_of(p.cycles()) == p.spectrum()

    def test_split_13_11(self, mode):
        p = DynamicPermutation.from_cycles(14, EXAMPLE_CYCLES, mode=mode)
        effect = p.apply_transposition(13, 11)
        assert effect.kind is EffectKind.FRAGMENTATION
        assert effect.sizes_before == (5,)
        assert sorted(effect.sizes_after) == [2, 3]
        assert p.cycle_count == 6
        assert not p.same_cycle(13, 11)
        # the five-cycle (5 13 9 11 6) breaks into (9 11) and (5 13 6)
        assert canonical(p.cycles()) >= canonical([(9, 11), (5, 13, 6)])

    def test_trivial_effects(self, mode):
        p = DynamicPermutation(5, mode=mode)
        e = p.apply_transposition(1, 2)
        assert e.kind is EffectKind.COAGULATION
        assert e.sizes_before == (1, 1)
        e = p.apply_transposition(3, 3)
        assert e.kind is EffectKind.NOOP
        assert p.cycle_count == 4

    def test_out_of_range(self, mode):
        p = DynamicPermutation(5, mode=mode)
        with pytest.raises(ValueError):
            p.apply_transposition(0, 3)
        with pytest.raises(ValueError):
            p.apply_transposition(1, 6)
        with pytest.raises(ValueError):
            p.same_cycle(1, 99)


class TestInvolution:
    def test_double_apply_restores(self, mode):
        rng = np.random.default_rng(5)
        p = DynamicPermutation(40, mode=mode)
        for _ in range(60):
            i, j = rng.integers(1, 41, size=2)
            p.apply_transposition(int(i), int(j))
        sigma = p.sigma.copy()
        count = p.cycle_count
        spec = p.spectrum()
        i, j = 3, 17
        p.apply_transposition(i, j)
        p.apply_transposition(i, j)
        assert np.array_equal(p.sigma, sigma)
        assert p.cycle_count == count
        assert p.spectrum() == spec


class TestRandomizedEquivalence:
    def test_against_decomposition_oracle(self, mode):
        """Incremental structure vs full re-decomposition after every step."""
        rng = np.random.default_rng(123)
        for _ in range(40):
            n = int(rng.integers(2, 61))
            p = DynamicPermutation(n, mode=mode)
            mirror = np.arange(n + 1)
            for _ in range(3 * n):
                i, j = (int(v) for v in rng.integers(1, n + 1, size=2))
                before = p.same_cycle(i, j)
                effect = p.apply_transposition(i, j)
                mirror[i], mirror[j] = mirror[j], mirror[i]
                cycles = cycles_from_successors(mirror)
                assert np.array_equal(p.sigma, mirror)
                assert p.cycle_count == len(cycles)
                assert p.spectrum() == spectrum_of(cycles)
                if i != j:
                    assert (effect.kind is EffectKind.FRAGMENTATION) == before
                    assert sum(effect.sizes_after) == sum(effect.sizes_before)

    def test_treap_matches_traversal_exactly(self):
        rng = np.random.default_rng(77)
        for _ in range(10):
            n = int(rng.integers(2, 200))
            steps = rng.integers(1, n + 1, size=(4 * n, 2))
            pt = DynamicPermutation(n, mode="treap")
            pv = DynamicPermutation(n, mode="traversal")
            for i, j in steps:
                et = pt.apply_transposition(int(i), int(j))
                ev = pv.apply_transposition(int(i), int(j))
                assert et == ev
            assert np.array_equal(pt.sigma, pv.sigma)
            assert pt.cycle_stats() == pv.cycle_stats()

    def test_cycle_order_is_sigma_orbit(self, mode):
        """cycles() must list each cycle in successor order."""
        rng = np.random.default_rng(11)
        p = DynamicPermutation(30, mode=mode)
        for _ in range(90):
            i, j = (int(v) for v in rng.integers(1, 31, size=2))
            p.apply_transposition(i, j)
        for cyc in p.cycles():
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                assert int(p.sigma[a]) == b


class TestCycleStats:
    def test_mass_upstairs_trivial(self):
        p = DynamicPermutation(10)
        assert p.cycle_stats(0.55).mass_upstairs == 0

    def test_mass_upstairs_single_big_cycle(self):
        n = 100
        p = DynamicPermutation.from_cycles(n, [tuple(range(1, n + 1))])
        stats = p.cycle_stats(0.55)
        assert stats.mass_upstairs == 100
        assert stats.largest == 100
        assert stats.size_of_1 == 100
        assert p.distance == n - 1

    def test_strict_threshold(self):
        # cutoff n^a = 16^0.5 = 4: a 4-cycle is not "above", a 5-cycle is
        p = DynamicPermutation.from_cycles(16, [(1, 2, 3, 4)])
        assert p.cycle_stats(0.5).mass_upstairs == 0
        p = DynamicPermutation.from_cycles(16, [(1, 2, 3, 4, 5)])
        assert p.cycle_stats(0.5).mass_upstairs == 5

    def test_rejects_bad_exponent(self):
        p = DynamicPermutation(4)
        with pytest.raises(ValueError):
            p.cycle_stats(1.5)


def test_from_cycles_rejects_duplicates():
    with pytest.raises(ValueError):
        DynamicPermutation.from_cycles(5, [(1, 2), (2, 3)])


def test_cycles_from_successors_plain():
    sigma = np.array([0, 7, 2, 12, 1, 13, 5, 4, 10, 11, 14, 6, 3, 9, 8])
    cycles = cycles_from_successors(sigma)
    assert canonical(cycles) == canonical(
        [(1, 7, 4), (2,), (3, 12), (5, 13, 9, 11, 6), (8, 10, 14)]
    )
