"""Queue-bank simulation and excursion-maximum law checks."""

import numpy as np
import pytest

from cyclewalk import cqs
from cyclewalk.theory import phi_factorial


class TestValidation:
    def test_bad_args(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            cqs.simulate_cqs(1, 0.5, 1.0, rng)
        with pytest.raises(ValueError):
            cqs.simulate_cqs(100, 0.0, 1.0, rng)
        with pytest.raises(ValueError):
            cqs.simulate_cqs(100, 1.0, 1.0, rng)
        with pytest.raises(ValueError):
            cqs.simulate_cqs(100, 0.5, -1.0, rng)
        with pytest.raises(ValueError):
            cqs.excursion_max_samples(0, rng)
        with pytest.raises(ValueError):
            cqs.ExcursionRecord(level=1, max_level=0, steps=3)

    def test_state_guard(self):
        state = cqs.CqsState(5)
        with pytest.raises(ValueError):
            state.change(3, -1)


class TestSimulate:
    def test_zero_horizon_is_empty(self):
        out = cqs.simulate_cqs(100, 0.5, 0.0, np.random.default_rng(1))
        assert out.sup_total == 0 and out.sup_mass == 0
        assert out.event_count == 0
        assert np.all(out.final_occupancy == 0)
        assert np.all(out.mean_occupancy == 0)

    def test_state_totals_match_vector(self):
        state = cqs.CqsState(6)
        rng = np.random.default_rng(3)
        for _ in range(200):
            k = int(rng.integers(1, 7))
            delta = 1 if state.xi[k] == 0 or rng.random() < 0.5 else -1
            state.change(k, delta)
            assert state.total == state.xi.sum()
            assert state.mass == (np.arange(7) * state.xi).sum()

    def test_trace_consistency(self):
        out = cqs.simulate_cqs(400, 0.6, 3.0, np.random.default_rng(7))
        k_of_step = np.abs(np.diff(out.masses))
        assert np.all(np.abs(np.diff(out.totals)) == 1)
        assert np.all((k_of_step >= 1) & (k_of_step <= out.cutoff))
        assert np.all(np.sign(np.diff(out.masses)) == np.sign(np.diff(out.totals)))
        assert out.sup_total == out.totals.max()
        assert out.sup_mass == out.masses.max()
        assert out.totals[-1] == out.final_occupancy.sum()
        assert np.all(np.diff(out.times) > 0)
        # the per-level time integrals must reproduce the totals trace
        seg = np.append(np.diff(out.times), out.horizon - out.times[-1])
        levels = np.arange(out.cutoff + 1)
        assert np.isclose(
            (out.totals * seg).sum(), out.mean_occupancy.sum() * out.horizon
        )
        assert np.isclose(
            (out.masses * seg).sum(),
            (levels * out.mean_occupancy).sum() * out.horizon,
        )

    def test_stationary_mean_quarter_at_level_four(self):
        results = cqs.simulate_cqs_batch(100, 0.5, 400.0, reps=5, seed=11)
        pooled = np.mean([r.mean_occupancy[4] for r in results])
        assert abs(pooled - 0.25) < 0.02

    def test_levels_are_uncorrelated(self):
        results = cqs.simulate_cqs_batch(16, 0.5, 4.0, reps=1200, seed=5)
        avgs = np.array([r.mean_occupancy[1:] for r in results])
        for j, k in ((1, 4), (2, 3)):
            corr = np.corrcoef(avgs[:, j - 1], avgs[:, k - 1])[0, 1]
            assert abs(corr) < 0.05, (j, k, corr)

    def test_occupancy_stays_under_envelope(self):
        bound_total, bound_mass = cqs.occupancy_bounds(10_000, 0.55)
        assert abs(bound_total - np.log(10_000) ** 2) < 1e-12
        assert abs(bound_mass - 158 * np.log(10_000) ** 2) < 1e-9
        for r in cqs.simulate_cqs_batch(10_000, 0.55, 2.0, reps=10, seed=2):
            assert r.cutoff == 158
            assert r.sup_total <= bound_total
            assert r.sup_mass <= bound_mass

    def test_batch_deterministic_and_thread_invariant(self):
        one = cqs.simulate_cqs_batch(200, 0.5, 2.0, reps=6, seed=9)
        two = cqs.simulate_cqs_batch(200, 0.5, 2.0, reps=6, seed=9)
        thr = cqs.simulate_cqs_batch(200, 0.5, 2.0, reps=6, seed=9, threads=3)
        for a, b, c in zip(one, two, thr):
            assert np.array_equal(a.times, b.times)
            assert np.array_equal(a.totals, c.totals)
            assert np.array_equal(a.final_occupancy, c.final_occupancy)


class TestExcursions:
    def test_martingale_identity_exact(self):
        # zero drift of phi under the jump kernel, cross-multiplied by m+1
        for m in range(1, 21):
            lhs = phi_factorial(m + 1) - phi_factorial(m)
            rhs = m * (phi_factorial(m) - phi_factorial(m - 1))
            assert lhs == rhs

    def test_linear_solve_matches_phi_form(self):
        assert cqs.exact_excursion_tail(0) == 1.0
        for x in range(1, 11):
            want = 1.0 / phi_factorial(x + 1)
            assert abs(cqs.exact_excursion_tail(x) - want) < 1e-9

    def test_sample_structure(self):
        peaks, steps = cqs.excursion_max_samples(500, np.random.default_rng(0))
        assert np.all(peaks >= 1)
        assert np.all(steps % 2 == 1)  # net displacement 1 -> 0 is odd
        assert np.all(steps >= 2 * peaks - 1)

    def test_empirical_tail(self):
        tail = cqs.excursion_max_distribution(4, 10_000, np.random.default_rng(42))
        assert tail.exact[0] == 0.5
        assert abs(tail.exact[2] - 0.1) < 1e-15
        assert abs(tail.empirical[0] - 0.5) < 0.02
        assert abs(tail.empirical[2] - 0.1) < 0.01
        assert np.all(np.diff(tail.empirical) <= 0)
        assert np.all(np.abs(tail.empirical - tail.exact) < 0.02)
