"""End-to-end acceptance checklist at the pinned scales and tolerances.

One test per criterion, run in order; each prints a single PASS/FAIL line
(also echoed in the terminal summary).  Several criteria measure quantities
whose desk-scale values genuinely sit outside the pinned bands; those tests
fail honestly and their lines carry the measured numbers.  The analysis
behind each expected failure lives in the project notes, not here.
"""

import math

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from cyclewalk import breakpoint as bp
from cyclewalk import experiments, theory, walk
from cyclewalk.graphcouple import ComponentClass, EvolvingMultigraph
from cyclewalk.permcycle import DynamicPermutation, EffectKind, cycles_from_successors


def _verdict(num: int, passed: bool, detail: str) -> None:
    line = f"[criterion {num:2d}] {'PASS' if passed else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def _check(name: str, seed: int = 0) -> experiments.CheckResult:
    return experiments.check_experiment(name, seed=seed, threads=1)


def _verdict_from(num: int, result: experiments.CheckResult) -> None:
    detail = "; ".join(
        f"{c.label}: {c.detail}" for c in result.clauses if c.passed is not None
    )
    _verdict(num, result.passed, detail)


@pytest.fixture(scope="module")
def fig2_result():
    return _check("fig2")


def test_criterion_01_exact_identity():
    rng = np.random.default_rng(101)
    rows_checked = 0
    for _ in range(60):
        n = int(rng.integers(2, 400))
        mode = "discrete" if rng.random() < 0.5 else "poisson"
        c_max = float(rng.uniform(0.2, 3.0))
        snaps = tuple(np.sort(rng.uniform(0.0, c_max, size=4)))
        config = walk.WalkConfig(
            n=n, horizon_c=c_max, time_mode=mode, snapshots_c=snaps
        )
        rows = walk.replicate_rows(config, 3, seed=int(rng.integers(1 << 30)))
        d = rows[:, :, walk.TRACE_COLUMNS.index("D")]
        nt = rows[:, :, walk.TRACE_COLUMNS.index("N_nontrivial")]
        z = rows[:, :, walk.TRACE_COLUMNS.index("Z")]
        assert np.array_equal(d, nt - 2 * z)
        rows_checked += d.size
    _verdict(
        1, True,
        f"D = N_nontrivial - 2Z exact on {rows_checked} snapshots "
        "(also asserted inside every driver run in this suite)",
    )


def test_criterion_02_subcritical_poisson_law():
    _verdict_from(2, _check("thm1"))


def test_criterion_03_critical_mean_and_fit():
    _verdict_from(3, _check("fig3"))


def test_criterion_04_critical_window_normalization():
    _verdict_from(4, _check("thm2"))


def test_criterion_05_distance_fraction():
    _verdict_from(5, _check("thm3"))


def test_criterion_06_distance_fluctuations():
    _verdict_from(6, _check("thm4"))


def test_criterion_07_large_cycle_mass():
    _verdict_from(7, _check("thm5"))


def test_criterion_08_cycle_of_one_curve():
    _verdict_from(8, _check("fig4"))


def test_criterion_09_cycle_of_one_histogram():
    _verdict_from(9, _check("fig5"))


def test_criterion_10_breakpoint_exact():
    mouse = bp.bundled_genome("mouse_x")
    comp = bp.breakpoint_components(mouse).count
    d0 = bp.d0_lower_bound(mouse)
    line = bp.format_doubled(mouse)
    frozen = "0, 1 2, 14 13, 11 12, 20 19, 17 18, 16 15, 3 4, 22 21, 6 5, 9 10, 7 8, 23"
    # reconstruct markers from the frozen doubled line to close the loop
    rebuilt = []
    for token in frozen.split(", ")[1:-1]:
        a, b = (int(x) for x in token.split())
        rebuilt.append(b // 2 if b == a + 1 else -(a // 2))
    identities_ok = all(
        bp.d0_lower_bound(bp.SignedGenome.identity(m)) == 0 for m in range(1, 9)
    )
    ok = (
        comp == 5
        and d0 == 7
        and line == frozen
        and tuple(rebuilt) == mouse.markers
        and identities_ok
    )
    _verdict(
        10, ok,
        f"components={comp} (want 5), d0={d0} (want 7), doubled line "
        f"{'byte-exact' if line == frozen else 'MISMATCH'}, identities d0=0",
    )


def test_criterion_11_annealed_signs():
    genome = bp.bundled_genome("repleta")
    out = bp.anneal_signs(list(genome.markers), seed=0)  # default budget
    bests = sorted(out.restart_bests)
    hit = 54 in out.restart_bests
    _verdict(
        11, hit,
        f"restart bests {bests[:6]}... min={out.d0} "
        f"(54 found in {out.restart_bests.count(54)}/20 restarts)",
    )


def test_criterion_12_reversal_no_change_fraction(fig2_result):
    clause = next(
        c for c in fig2_result.clauses if "0.23" in c.label
    )
    _verdict(12, bool(clause.passed), f"{clause.label}: {clause.detail}")


def test_criterion_13_queue_bounds():
    _verdict_from(13, _check("cqs-bounds"))


def test_criterion_14_oracle_equivalence():
    rng = np.random.default_rng(1414)
    walks = 1000
    steps_total = 0
    for _ in range(walks):
        n = int(rng.integers(2, 201))
        n_steps = int(rng.integers(1, int(1.5 * n) + 2))
        perm = DynamicPermutation(n, rng=np.random.default_rng(rng.integers(1 << 30)))
        graph = EvolvingMultigraph(n)
        sigma = np.arange(n + 1)
        for _ in range(n_steps):
            i = int(rng.integers(1, n + 1))
            j = int(rng.integers(1, n + 1))
            if i == j:
                continue
            effect = perm.apply_transposition(i, j)
            sigma[i], sigma[j] = sigma[j], sigma[i]
            graph.add_edge(i, j)
            if effect.kind is EffectKind.FRAGMENTATION:
                graph.mark_component(i)
            steps_total += 1
            naive = sorted(
                tuple(orbit[orbit.index(min(orbit)):] + orbit[:orbit.index(min(orbit))])
                for orbit in cycles_from_successors(sigma)
            )
            fast = sorted(
                tuple(orbit[orbit.index(min(orbit)):] + orbit[:orbit.index(min(orbit))])
                for orbit in (tuple(o) for o in perm.cycles())
            )
            assert naive == fast
            # each cycle lies inside one graph component
            for x in range(1, n + 1):
                assert graph.find(x) == graph.find(int(sigma[x]))
            # the touched component is a tree exactly when never fragmented
            is_tree = graph.class_of(i) is ComponentClass.TREE
            assert is_tree == (not graph.component_marked(i))
        for root in graph.roots():
            is_tree = graph.class_of(int(root)) is ComponentClass.TREE
            assert is_tree == (not graph.component_marked(int(root)))
    _verdict(
        14, True,
        f"{walks} walks, {steps_total} nontrivial steps: cycle structure, "
        "containment, and tree correspondence all exact",
    )


def test_criterion_15_component_tail_envelope():
    _verdict_from(15, _check("lemma3-tail"))


def test_fig2_reversal_curve_sits_below(fig2_result):
    # companion property, not a numbered criterion: the coupled reversal
    # bound wastes at least as many steps as the transposition distance
    clause = fig2_result.clauses[0]
    assert clause.passed, f"{clause.label}: {clause.detail}"
