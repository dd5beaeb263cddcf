"""Named desk-scale experiments: run, persist, check.

Each experiment produces one or more CSV tables plus a key=value manifest
that is sufficient to reproduce the run byte-for-byte (same package version,
any thread count).  Experiment names are the stable CLI identifiers; their
check clauses encode the pinned tolerances and print one PASS/FAIL line per
clause, so `--check` output doubles as a scoreboard.

A failed clause is reported, never silently relaxed; clauses marked INFO are
observations the contract asks to report without asserting.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from . import __version__
from . import breakpoint as breakpoint_mod
from . import cqs as cqs_mod
from . import graphcouple, theory, walk
from .artifacts import read_manifest, write_csv, write_manifest
from .plotting import render_svg

_COL = {name: idx for idx, name in enumerate(walk.TRACE_COLUMNS)}


class BadParams(ValueError):
    """Raised for unknown experiments or out-of-range parameters."""


@dataclass(frozen=True)
class Clause:
    label: str
    passed: bool | None  # None marks a reported-only observation
    detail: str

    @property
    def tag(self) -> str:
        if self.passed is None:
            return "INFO"
        return "PASS" if self.passed else "FAIL"


@dataclass(frozen=True)
class CheckResult:
    experiment: str
    clauses: tuple[Clause, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.clauses)

    def lines(self) -> list[str]:
        return [
            f"[{self.experiment}] {c.tag} {c.label}: {c.detail}" for c in self.clauses
        ]


Tables = dict[str, dict[str, np.ndarray]]


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    defaults: Mapping[str, object]
    runner: Callable[[dict, int, int | None], Tables]
    checker: Callable[[Tables, dict], CheckResult]
    plot: Callable[[Tables, dict], tuple] | None = None
    stream_count: Callable[[dict], int] | None = None


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    params: Mapping[str, object]
    out_dir: Path
    seed: int = 0
    threads: int | None = None
    fmt: str = "csv"
    check: bool = False


@dataclass(frozen=True)
class ExperimentResult:
    name: str
    tables: Tables = field(repr=False)
    files: tuple[Path, ...]
    manifest: Path
    check: CheckResult | None
    wall_clock_s: float


# ---------------------------------------------------------------- helpers


def _poisson_pmf(lam: float, k: int) -> float:
    if lam == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def _tv_to_poisson(counts: np.ndarray, reps: int, lam: float) -> float:
    emp = counts / reps
    pk = np.array([_poisson_pmf(lam, k) for k in range(len(counts))])
    return 0.5 * (np.abs(emp - pk).sum() + max(0.0, 1.0 - pk.sum()))


def _normal_cdf(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.array([math.erf(v / math.sqrt(2.0)) for v in x]))


def _ks_standard_normal(x: np.ndarray) -> float:
    """Sup distance between the ecdf of studentized x and the normal cdf."""
    z = np.sort((x - x.mean()) / x.std(ddof=1))
    n = len(z)
    cdf = _normal_cdf(z)
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower))


def _hist_moments(counts: np.ndarray, reps: int) -> tuple[float, float]:
    ks = np.arange(len(counts))
    mean = float((ks * counts).sum() / reps)
    var = float(((ks - mean) ** 2 * counts).sum() / (reps - 1))
    return mean, var


def _z_histogram(params: dict, seed: int, threads, time_mode: str) -> Tables:
    config = walk.WalkConfig(
        n=params["n"], horizon_c=params["c"], time_mode=time_mode
    )
    rows = walk.replicate_rows(config, params["reps"], seed=seed, threads=threads)
    z = rows[:, -1, _COL["Z"]]
    counts = np.bincount(z)
    lam_hat = float(z.mean())
    zs = np.arange(len(counts))
    return {
        "": {
            "z": zs,
            "count": counts,
            "empirical": counts / params["reps"],
            "poisson_fit": np.array([_poisson_pmf(lam_hat, int(k)) for k in zs]),
        }
    }


# ---------------------------------------------------------------- fig2


def _fig2_run(params: dict, seed: int, threads) -> Tables:
    m = params["n_markers"]
    n = m + 1
    step = params["c_step"]
    grid = np.round(np.arange(step, params["c_max"] + 1e-9, step), 10)
    rows = breakpoint_mod.coupled_reversal_walk(
        m, float(grid[-1]), params["reps"], seed=seed,
        snapshots_c=tuple(grid), threads=threads,
    )
    k = rows[0, :, 0]
    d_walk = rows[:, :, 1]
    d0 = rows[:, :, 2]
    trans = (k[None, :] - d_walk) / n
    rever = (k[None, :] - d0) / n
    diff = trans - rever
    classes = rows[:, :, 3:6].sum(axis=2)
    frag = rows[:, :, 6]
    frag0 = rows[:, :, 7]
    frag_total = frag.sum(axis=0)
    return {
        "": {
            "c": grid,
            "k": k,
            "steps_minus_D_frac": trans.mean(axis=0),
            "steps_minus_d0_frac": rever.mean(axis=0),
            "frac_diff": diff.mean(axis=0),
            "frac_diff_se": diff.std(axis=0, ddof=1) / math.sqrt(params["reps"]),
            "limit_frac": np.array([c / 2 - theory.u_distance(c) for c in grid]),
            "dc_zero_frac": rows[:, :, 4].sum(axis=0) / classes.sum(axis=0),
            "frag_zero_frac": np.where(
                frag_total > 0, frag0.sum(axis=0) / np.maximum(frag_total, 1), 0.0
            ),
        }
    }


def _fig2_check(tables: Tables, params: dict) -> CheckResult:
    t = tables[""]
    clauses = []
    margin = t["frac_diff"] + 3.0 * t["frac_diff_se"]
    worst = int(np.argmin(margin))
    clauses.append(
        Clause(
            "reversal curve below transposition curve at every k (3 se)",
            bool(np.all(margin >= 0.0)),
            f"min margin {margin[worst]:+.5f} at c={t['c'][worst]:g}",
        )
    )
    at_one = np.flatnonzero(np.isclose(t["c"], 1.0))
    if at_one.size:
        i = int(at_one[0])
        frac = float(t["dc_zero_frac"][i])
        clauses.append(
            Clause(
                "component-count-preserving reversal fraction at c=1 is 0.23 +/- 0.03",
                abs(frac - 0.23) <= 0.03,
                f"measured {frac:.4f}",
            )
        )
        clauses.append(
            Clause(
                "share of splitting steps that preserve the component count at c=1",
                None,
                f"measured {float(t['frag_zero_frac'][i]):.4f}",
            )
        )
    else:
        clauses.append(
            Clause("no-change fraction at c=1", None, "grid does not include c=1")
        )
    return CheckResult("fig2", tuple(clauses))


def _fig2_plot(tables: Tables, params: dict):
    t = tables[""]
    return (
        "steps minus distance per element, coupled walks",
        "c = 2k/n",
        "(k - distance)/n",
        [
            (t["c"], t["steps_minus_D_frac"], "transpositions"),
            (t["c"], t["steps_minus_d0_frac"], "reversal bound"),
            (t["c"], t["limit_frac"], "limit c/2 - u(c)"),
        ],
    )


# ---------------------------------------------------------------- fig3


def _fig3_run(params: dict, seed: int, threads) -> Tables:
    return _z_histogram(params, seed, threads, "discrete")


def _fig3_check(tables: Tables, params: dict) -> CheckResult:
    t = tables[""]
    reps = params["reps"]
    mean, _ = _hist_moments(t["count"], reps)
    tv = _tv_to_poisson(t["count"], reps, mean)
    return CheckResult(
        "fig3",
        (
            Clause(
                "mean split count in [0.632, 0.692]",
                0.632 <= mean <= 0.692,
                f"measured {mean:.4f}",
            ),
            Clause(
                "TV distance to Poisson(sample mean) < 0.05",
                tv < 0.05,
                f"measured {tv:.4f}",
            ),
        ),
    )


def _hist_plot_factory(xlabel: str):
    def plot(tables: Tables, params: dict):
        t = tables[""]
        first = [k for k in t if k not in ("count",)][0]
        series_keys = [k for k in t if k not in (first, "count")]
        return (
            "empirical pmf vs reference",
            xlabel,
            "probability",
            [(t[first], t[key], key) for key in series_keys],
        )

    return plot


# ---------------------------------------------------------------- fig4


def _fig4_run(params: dict, seed: int, threads) -> Tables:
    grid = tuple(params["c_grid"])
    n = params["n"]
    config = walk.WalkConfig(
        n=n, horizon_c=max(grid), time_mode="discrete", snapshots_c=grid
    )
    rows = walk.replicate_rows(config, params["reps"], seed=seed, threads=threads)
    k1 = rows[:, :, _COL["K1"]].astype(np.float64) / n
    return {
        "": {
            "c": np.asarray(grid),
            "mean_K1_frac": k1.mean(axis=0),
            "se_frac": k1.std(axis=0, ddof=1) / math.sqrt(params["reps"]),
            "giant_sq_half": np.array([theory.theta(c) ** 2 / 2 for c in grid]),
        }
    }


def _fig4_check(tables: Tables, params: dict) -> CheckResult:
    t = tables[""]
    c = t["c"]
    err = np.abs(t["mean_K1_frac"] - t["giant_sq_half"])
    sup = c >= 1.5 - 1e-9
    sub = c <= 1.0 + 1e-9
    worst_sup = int(np.argmax(np.where(sup, err, -1.0)))
    worst_sub = int(np.argmax(np.where(sub, t["mean_K1_frac"], -1.0)))
    return CheckResult(
        "fig4",
        (
            Clause(
                "mean K1/n within 0.02 of theta(c)^2/2 for c >= 1.5",
                bool(np.all(err[sup] < 0.02)),
                f"worst |err| {err[worst_sup]:.4f} at c={c[worst_sup]:g}",
            ),
            Clause(
                "mean K1/n <= 0.01 for c <= 1",
                bool(np.all(t["mean_K1_frac"][sub] <= 0.01)),
                f"worst {t['mean_K1_frac'][worst_sub]:.4f} at c={c[worst_sub]:g}",
            ),
        ),
    )


def _fig4_plot(tables: Tables, params: dict):
    t = tables[""]
    return (
        "mean cycle-of-1 fraction across the transition",
        "c",
        "mean K1/n",
        [
            (t["c"], t["mean_K1_frac"], "simulation"),
            (t["c"], t["giant_sq_half"], "theta(c)^2/2"),
        ],
    )


# ---------------------------------------------------------------- fig5


def _fig5_run(params: dict, seed: int, threads) -> Tables:
    n = params["n"]
    config = walk.WalkConfig(n=n, horizon_c=params["c"], time_mode="discrete")
    rows = walk.replicate_rows(config, params["reps"], seed=seed, threads=threads)
    k1 = rows[:, -1, _COL["K1"]]
    counts = np.bincount(k1, minlength=n + 1)[1:]
    ks = np.arange(1, n + 1)
    return {
        "": {
            "k": ks,
            "count": counts,
            "empirical": counts / params["reps"],
            "borel": np.array([theory.borel_pmf(params["c"], int(k)) for k in ks]),
        }
    }


def _fig5_check(tables: Tables, params: dict) -> CheckResult:
    t = tables[""]
    reps = params["reps"]
    head = float(t["count"][:4].sum() / reps)  # k = 1..4
    target = sum(theory.borel_pmf(params["c"], k) for k in range(1, 5))
    n = params["n"]
    lo, hi = int(0.4 * n), int(0.9 * n)
    edges = np.linspace(lo, hi, 6).astype(int)
    bins = [
        float(t["count"][a - 1 : b - 1].sum() / reps)
        for a, b in zip(edges, edges[1:])
    ]
    return CheckResult(
        "fig5",
        (
            Clause(
                "P(K1 <= 4) within 0.02 of the small-cycle limit",
                abs(head - target) <= 0.02,
                f"measured {head:.4f}, limit {target:.4f}",
            ),
            Clause(
                "remainder spread over k/n in (0.4, 0.9], five equal bins",
                None,
                "masses " + ", ".join(f"{b:.4f}" for b in bins),
            ),
        ),
    )


# ---------------------------------------------------------------- thm1


def _thm1_run(params: dict, seed: int, threads) -> Tables:
    return _z_histogram(params, seed, threads, "poisson")


def _thm1_check(tables: Tables, params: dict) -> CheckResult:
    t = tables[""]
    reps = params["reps"]
    lam = theory.kappa(params["c"])
    mean, var = _hist_moments(t["count"], reps)
    se = math.sqrt(var / reps)
    tv = _tv_to_poisson(t["count"], reps, lam)
    ratio = var / mean
    return CheckResult(
        "thm1",
        (
            Clause(
                "mean split count within 3 se of kappa(c)",
                abs(mean - lam) <= 3 * se,
                f"measured {mean:.4f}, kappa {lam:.4f}, se {se:.4f}",
            ),
            Clause(
                "variance/mean in [0.9, 1.1]",
                0.9 <= ratio <= 1.1,
                f"measured {ratio:.4f}",
            ),
            Clause(
                "TV distance to Poisson(kappa) < 0.03",
                tv < 0.03,
                f"measured {tv:.4f}",
            ),
        ),
    )


def _thm1_run_table(params: dict, seed: int, threads) -> Tables:
    tables = _thm1_run(params, seed, threads)
    t = tables[""]
    lam = theory.kappa(params["c"])
    t["poisson_kappa"] = np.array(
        [_poisson_pmf(lam, int(k)) for k in t["z"]]
    )
    return tables


# ---------------------------------------------------------------- thm2


def _thm2_run(params: dict, seed: int, threads) -> Tables:
    r_grid = tuple(params["r_grid"])
    cw = walk.critical_window_samples(
        params["n"], r_grid, params["reps"], seed=seed, threads=threads
    )
    table: dict[str, np.ndarray] = {"rep": np.arange(params["reps"])}
    for idx, r in enumerate(r_grid):
        table[f"Z_r{r:g}"] = cw["Z"][:, idx]
        table[f"W_r{r:g}"] = cw["W"][:, idx]
    return {"": table}


def _thm2_check(tables: Tables, params: dict) -> CheckResult:
    t = tables[""]
    r_grid = tuple(params["r_grid"])
    w_last = t[f"W_r{r_grid[-1]:g}"]
    mean = float(w_last.mean())
    var = float(w_last.var(ddof=1))
    se = math.sqrt(var / len(w_last))
    clauses = [
        Clause(
            f"mean W at r={r_grid[-1]:g} within 3 se of 0",
            abs(mean) <= 3 * se,
            f"measured {mean:+.4f}, se {se:.4f}",
        ),
        Clause(
            "variance of W in [0.85, 1.15]",
            0.85 <= var <= 1.15,
            f"measured {var:.4f}",
        ),
    ]
    if len(r_grid) >= 2:
        first = t[f"W_r{r_grid[0]:g}"]
        inc = w_last - first
        corr = float(np.corrcoef(first, inc)[0, 1])
        clauses.append(
            Clause(
                "increment correlation |corr| < 0.1",
                abs(corr) < 0.1,
                f"measured {corr:+.4f}",
            )
        )
    return CheckResult("thm2", tuple(clauses))


def _thm2_plot(tables: Tables, params: dict):
    r_last = tuple(params["r_grid"])[-1]
    w = np.sort(np.asarray(tables[""][f"W_r{r_last:g}"], float))
    n = len(w)
    ecdf = np.arange(1, n + 1) / n
    return (
        "centered scaled split count at the window edge",
        "W",
        "cdf",
        [(w, ecdf, "empirical"), (w, _normal_cdf(w), "standard normal")],
    )


# ---------------------------------------------------------------- thm3


def _thm3_run(params: dict, seed: int, threads) -> Tables:
    c_list = tuple(params["c_list"])
    n = params["n"]
    config = walk.WalkConfig(
        n=n, horizon_c=max(c_list), time_mode="poisson", snapshots_c=c_list
    )
    rows = walk.replicate_rows(config, params["reps"], seed=seed, threads=threads)
    frac = rows[:, :, _COL["D"]].astype(np.float64) / n
    return {
        "": {
            "c": np.asarray(c_list),
            "mean_D_frac": frac.mean(axis=0),
            "se_frac": frac.std(axis=0, ddof=1) / math.sqrt(params["reps"]),
            "u_closed": np.array([theory.u_distance(c) for c in c_list]),
            "u_series": np.array(
                [1.0 - theory.g_components_series(c) for c in c_list]
            ),
        }
    }


def _thm3_check(tables: Tables, params: dict) -> CheckResult:
    t = tables[""]
    err = np.abs(t["mean_D_frac"] - t["u_closed"])
    route_gap = np.abs(t["u_closed"] - t["u_series"])
    worst = int(np.argmax(err))
    return CheckResult(
        "thm3",
        (
            Clause(
                "|mean D/n - u(c)| < 0.005 at every c",
                bool(np.all(err < 0.005)),
                f"worst {err[worst]:.5f} at c={t['c'][worst]:g}",
            ),
            Clause(
                "closed form vs series route agree to 1e-6",
                bool(np.all(route_gap < 1e-6)),
                f"worst gap {route_gap.max():.2e}",
            ),
        ),
    )


def _thm3_plot(tables: Tables, params: dict):
    t = tables[""]
    return (
        "limiting distance fraction",
        "c",
        "D/n",
        [(t["c"], t["mean_D_frac"], "simulation"), (t["c"], t["u_closed"], "u(c)")],
    )


# ---------------------------------------------------------------- thm4


def _thm4_run(params: dict, seed: int, threads) -> Tables:
    n = params["n"]
    c = params["c"]
    config = walk.WalkConfig(n=n, horizon_c=c, time_mode="poisson")
    rows = walk.replicate_rows(config, params["reps"], seed=seed, threads=threads)
    d = rows[:, -1, _COL["D"]].astype(np.float64)
    centered = (d - theory.u_distance(c) * n) / math.sqrt(n)
    return {
        "": {
            "rep": np.arange(params["reps"]),
            "D": d.astype(np.int64),
            "centered_scaled": centered,
        }
    }


def _thm4_check(tables: Tables, params: dict) -> CheckResult:
    x = np.asarray(tables[""]["centered_scaled"], float)
    sd = float(x.std(ddof=1))
    sigma = theory.sigma_clt(params["c"])
    ks = _ks_standard_normal(x)
    return CheckResult(
        "thm4",
        (
            Clause(
                "sample sd of (D - u(c)n)/sqrt(n) within 10% of rho(c)",
                abs(sd - sigma) <= 0.10 * sigma,
                f"measured {sd:.5f}, target {sigma:.5f}",
            ),
            Clause(
                "KS distance of studentized sample to normal < 0.05",
                ks < 0.05,
                f"measured {ks:.4f}",
            ),
        ),
    )


def _thm4_plot(tables: Tables, params: dict):
    x = np.sort(np.asarray(tables[""]["centered_scaled"], float))
    z = (x - x.mean()) / x.std(ddof=1)
    n = len(z)
    return (
        "distance fluctuation law",
        "studentized (D - u(c)n)/sqrt(n)",
        "cdf",
        [
            (z, np.arange(1, n + 1) / n, "empirical"),
            (z, _normal_cdf(z), "standard normal"),
        ],
    )


# ---------------------------------------------------------------- thm5


def _thm5_run(params: dict, seed: int, threads) -> Tables:
    n = params["n"]
    config = walk.WalkConfig(
        n=n, horizon_c=params["c"], time_mode="poisson",
        mass_exponent=params["a"],
    )
    rows = walk.replicate_rows(config, params["reps"], seed=seed, threads=threads)
    n_up = rows[:, -1, _COL["N_up"]]
    return {
        "": {
            "rep": np.arange(params["reps"]),
            "N_up": n_up,
            "frac": n_up / n,
        }
    }


def _thm5_check(tables: Tables, params: dict) -> CheckResult:
    frac = np.asarray(tables[""]["frac"], float)
    floor_val = theory.theta(params["c"]) - 0.03
    mean = float(frac.mean())
    return CheckResult(
        "thm5",
        (
            Clause(
                "mean large-cycle mass fraction >= theta(c) - 0.03",
                mean >= floor_val,
                f"measured {mean:.4f}, floor {floor_val:.4f}",
            ),
        ),
    )


def _thm5_plot(tables: Tables, params: dict):
    frac = np.sort(np.asarray(tables[""]["frac"], float))
    n = len(frac)
    return (
        "mass in cycles longer than n^a",
        "sorted replicate",
        "N_up/n",
        [(np.arange(n), frac, "replicates")],
    )


# ---------------------------------------------------------------- cqs-bounds


def _cqs_run(params: dict, seed: int, threads) -> Tables:
    n, a, c, reps = params["n"], params["a"], params["c"], params["reps"]
    results = cqs_mod.simulate_cqs_batch(n, a, c, reps, seed, threads=threads or 1)
    bound_total, bound_mass = cqs_mod.occupancy_bounds(n, a)
    sup_total = np.array([r.sup_total for r in results])
    sup_mass = np.array([r.sup_mass for r in results])
    tail = cqs_mod.excursion_max_distribution(
        params["x_max"], params["count"], walk.substream(seed, reps)
    )
    return {
        "": {
            "rep": np.arange(reps),
            "sup_total": sup_total,
            "sup_mass": sup_mass,
            "bound_total": np.full(reps, bound_total),
            "bound_mass": np.full(reps, bound_mass),
            "within_total": (sup_total <= bound_total).astype(np.int64),
            "within_mass": (sup_mass <= bound_mass).astype(np.int64),
        },
        "excursions": {
            "x": tail.x,
            "empirical": tail.empirical,
            "exact": tail.exact,
            "abs_err": np.abs(tail.empirical - tail.exact),
        },
    }


def _cqs_check(tables: Tables, params: dict) -> CheckResult:
    exc = tables["excursions"]
    main = tables[""]
    worst_tail = float(np.max(exc["abs_err"]))
    solver_gap = max(
        abs(cqs_mod.exact_excursion_tail(x) - 1.0 / theory.phi_factorial(x + 1))
        for x in range(0, 11)
    )
    within = int(main["within_total"].sum())
    reps = len(main["within_total"])
    return CheckResult(
        "cqs-bounds",
        (
            Clause(
                "empirical excursion tail within 0.02 of 1/phi(x+1) for all x",
                worst_tail < 0.02,
                f"worst |err| {worst_tail:.4f}",
            ),
            Clause(
                "linear-solve tail oracle matches 1/phi(x+1) to 1e-9 for x <= 10",
                solver_gap < 1e-9,
                f"worst gap {solver_gap:.2e}",
            ),
            Clause(
                "sup of total occupancy under (log n)^2 in every rep",
                within == reps,
                f"{within}/{reps} reps within bound",
            ),
        ),
    )


def _cqs_plot(tables: Tables, params: dict):
    t = tables["excursions"]
    return (
        "excursion maximum tail",
        "x",
        "P(M > x)",
        [(t["x"], t["empirical"], "empirical"), (t["x"], t["exact"], "1/phi(x+1)")],
    )


# ---------------------------------------------------------------- lemma3-tail


def _lemma3_run(params: dict, seed: int, threads) -> Tables:
    n, reps = params["n"], params["reps"]
    c_list = tuple(params["c_list"])
    cols: dict[str, list] = {
        "c": [], "y": [], "empirical_tail": [], "bound": [], "se": [], "within": []
    }
    for ci, c in enumerate(c_list):
        p = graphcouple.time_to_edge_probability(n, c * n / 2.0)
        sizes = np.empty(reps, dtype=np.int64)
        for rep in range(reps):
            rng = walk.substream(seed, ci * reps + rep)
            edges = graphcouple.sample_gnp_edges(n, p, rng)
            _, _, size1, _ = graphcouple.static_component_stats(n, edges, 1)
            sizes[rep] = size1
        for y in range(1, int(sizes.max()) + 1):
            emp = float(np.mean(sizes >= y))
            cols["c"].append(c)
            cols["y"].append(y)
            cols["empirical_tail"].append(emp)
            cols["bound"].append(theory.cluster_tail_bound(c, y))
            cols["se"].append(math.sqrt(emp * (1.0 - emp) / reps))
            cols["within"].append(
                int(emp <= theory.cluster_tail_bound(c, y) + 3.0 * cols["se"][-1])
            )
    return {"": {k: np.asarray(v) for k, v in cols.items()}}


def _lemma3_check(tables: Tables, params: dict) -> CheckResult:
    t = tables[""]
    margin = t["bound"] + 3.0 * t["se"] - t["empirical_tail"]
    worst = int(np.argmin(margin))
    return CheckResult(
        "lemma3-tail",
        (
            Clause(
                "empirical P(|C1| >= y) <= bound + 3 se for all y and c",
                bool(np.all(t["within"] == 1)),
                f"min margin {margin[worst]:+.5f} at c={t['c'][worst]:g}, "
                f"y={int(t['y'][worst])}",
            ),
        ),
    )


def _lemma3_plot(tables: Tables, params: dict):
    t = tables[""]
    series = []
    for c in np.unique(t["c"]):
        sel = (t["c"] == c) & (t["empirical_tail"] > 0)
        series.append((t["y"][sel], t["empirical_tail"][sel], f"empirical c={c:g}"))
        series.append((t["y"][sel], t["bound"][sel], f"bound c={c:g}"))
    return ("component-of-1 size tail vs envelope", "y", "P(|C1| >= y)", series)


# ---------------------------------------------------------------- eq4-trees


def _trees_run(params: dict, seed: int, threads) -> Tables:
    n, reps, kmax = params["n"], params["reps"], params["k_max"]
    p = params["c"] / n
    counts = np.zeros((reps, kmax + 1), dtype=np.int64)
    for rep in range(reps):
        rng = walk.substream(seed, rep)
        edges = graphcouple.sample_gnp_edges(n, p, rng)
        _, _, _, tc = graphcouple.static_component_stats(n, edges, kmax)
        counts[rep] = tc
    ks = np.arange(1, kmax + 1)
    mc = counts[:, 1:].astype(np.float64)
    return {
        "": {
            "k": ks,
            "mc_mean": mc.mean(axis=0),
            "se": mc.std(axis=0, ddof=1) / math.sqrt(reps),
            "expected": np.array(
                [theory.expected_tree_count(n, int(k), p) for k in ks]
            ),
        }
    }


def _trees_check(tables: Tables, params: dict) -> CheckResult:
    t = tables[""]
    gap = np.abs(t["mc_mean"] - t["expected"])
    ok = gap <= 3.0 * t["se"]
    worst = int(np.argmax(gap / np.maximum(t["se"], 1e-12)))
    return CheckResult(
        "eq4-trees",
        (
            Clause(
                "mean tree count within 3 se of the exact formula for all k",
                bool(np.all(ok)),
                f"worst z {gap[worst] / max(t['se'][worst], 1e-12):.2f} "
                f"at k={int(t['k'][worst])}",
            ),
        ),
    )


def _trees_plot(tables: Tables, params: dict):
    t = tables[""]
    return (
        "tree components per size",
        "k",
        "mean count",
        [(t["k"], t["mc_mean"], "simulation"), (t["k"], t["expected"], "formula")],
    )


# ---------------------------------------------------------------- registry

EXPERIMENTS: dict[str, Experiment] = {}


def _register(exp: Experiment) -> None:
    EXPERIMENTS[exp.name] = exp


_register(Experiment(
    name="fig2",
    summary="coupled steps-minus-distance curves for transpositions and reversals",
    defaults={"n_markers": 100, "c_max": 3.0, "c_step": 0.1, "reps": 10_000},
    runner=_fig2_run,
    checker=_fig2_check,
    plot=_fig2_plot,
))
_register(Experiment(
    name="fig3",
    summary="split-count histogram at the critical time against a Poisson fit",
    defaults={"n": 100, "c": 1.0, "reps": 10_000},
    runner=_fig3_run,
    checker=_fig3_check,
    plot=_hist_plot_factory("Z"),
))
_register(Experiment(
    name="fig4",
    summary="mean cycle-of-1 fraction across a c grid with the limit overlay",
    defaults={
        "n": 1000,
        "c_grid": tuple(np.round(np.arange(0.0, 3.01, 0.25), 10)),
        "reps": 10_000,
    },
    runner=_fig4_run,
    checker=_fig4_check,
    plot=_fig4_plot,
))
_register(Experiment(
    name="fig5",
    summary="cycle-of-1 size histogram in the supercritical phase",
    defaults={"n": 100, "c": 2.0, "reps": 100_000},
    runner=_fig5_run,
    checker=_fig5_check,
    plot=_hist_plot_factory("k"),
))
_register(Experiment(
    name="thm1",
    summary="subcritical split counts against Poisson(kappa)",
    defaults={"n": 2000, "c": 0.8, "reps": 5000},
    runner=_thm1_run_table,
    checker=_thm1_check,
    plot=_hist_plot_factory("Z"),
))
_register(Experiment(
    name="thm2",
    summary="centered scaled split counts across the critical window",
    defaults={"n": 100_000, "r_grid": (0.5, 1.0), "reps": 2000},
    runner=_thm2_run,
    checker=_thm2_check,
    plot=_thm2_plot,
))
_register(Experiment(
    name="thm3",
    summary="law of large numbers for the distance fraction",
    defaults={"n": 10_000, "c_list": (1.5, 2.0, 3.0), "reps": 200},
    runner=_thm3_run,
    checker=_thm3_check,
    plot=_thm3_plot,
))
_register(Experiment(
    name="thm4",
    summary="fluctuations of the distance around u(c)n",
    defaults={"n": 10_000, "c": 2.0, "reps": 2000},
    runner=_thm4_run,
    checker=_thm4_check,
    plot=_thm4_plot,
))
_register(Experiment(
    name="thm5",
    summary="mass carried by cycles longer than n^a",
    defaults={"n": 10_000, "c": 2.0, "a": 0.55, "reps": 100},
    runner=_thm5_run,
    checker=_thm5_check,
    plot=_thm5_plot,
))
_register(Experiment(
    name="cqs-bounds",
    summary="queue-bank occupancy envelopes and excursion-maximum tails",
    defaults={
        "n": 10_000, "a": 0.55, "c": 2.0, "reps": 100,
        "x_max": 4, "count": 10_000,
    },
    runner=_cqs_run,
    checker=_cqs_check,
    plot=_cqs_plot,
    stream_count=lambda p: p["reps"] + 1,
))
_register(Experiment(
    name="lemma3-tail",
    summary="component-of-1 size tail against the exponential envelope",
    defaults={"n": 10_000, "c_list": (0.5, 0.8), "reps": 10_000},
    runner=_lemma3_run,
    checker=_lemma3_check,
    plot=_lemma3_plot,
    stream_count=lambda p: len(tuple(p["c_list"])) * p["reps"],
))
_register(Experiment(
    name="eq4-trees",
    summary="mean tree-component counts against the exact formula",
    defaults={"n": 500, "c": 1.0, "reps": 2000, "k_max": 10},
    runner=_trees_run,
    checker=_trees_check,
    plot=_trees_plot,
))


# ---------------------------------------------------------------- driver


def get_experiment(name: str) -> Experiment:
    try:
        return EXPERIMENTS[name]
    except KeyError:
        raise BadParams(
            f"unknown experiment {name!r}; known: {', '.join(sorted(EXPERIMENTS))}"
        ) from None


def _coerce(default, text: str):
    if isinstance(default, tuple):
        return tuple(float(x) for x in text.split(",") if x != "")
    if isinstance(default, bool):
        return text == "1"
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    return text


def build_params(name: str, overrides: Mapping[str, object]) -> dict:
    exp = get_experiment(name)
    params = dict(exp.defaults)
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in params:
            raise BadParams(f"experiment {name!r} does not take parameter {key!r}")
        if isinstance(params[key], tuple) and not isinstance(value, tuple):
            value = tuple(value)
        params[key] = type(params[key])(value) if not isinstance(value, tuple) else value
    _validate_params(name, params)
    return params


def _validate_params(name: str, params: dict) -> None:
    checks = {
        "n": lambda v: v >= 2,
        "n_markers": lambda v: v >= 1,
        "reps": lambda v: v >= 1,
        "a": lambda v: 0.0 < v < 1.0,
        "c": lambda v: v > 0.0,
        "c_max": lambda v: v > 0.0,
        "c_step": lambda v: v > 0.0,
        "x_max": lambda v: v >= 1,
        "count": lambda v: v >= 1,
        "k_max": lambda v: v >= 1,
    }
    for key, ok in checks.items():
        if key in params and not ok(params[key]):
            raise BadParams(f"parameter {key}={params[key]!r} out of range for {name}")
    for key in ("c_grid", "c_list", "r_grid"):
        if key in params:
            grid = tuple(params[key])
            if not grid or any(b < a for a, b in zip(grid, grid[1:])):
                raise BadParams(f"{key} must be a nonempty ascending sequence")


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    exp = get_experiment(spec.name)
    params = build_params(spec.name, dict(spec.params))
    if spec.fmt not in ("csv", "csv+svg"):
        raise BadParams(f"format must be csv or csv+svg, got {spec.fmt!r}")
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    tables = exp.runner(params, spec.seed, spec.threads)
    wall = time.perf_counter() - start

    files: list[Path] = []
    for suffix, table in tables.items():
        stem = spec.name if not suffix else f"{spec.name}-{suffix}"
        files.append(write_csv(out_dir / f"{stem}.csv", table))
    if spec.fmt == "csv+svg" and exp.plot is not None:
        title, xlabel, ylabel, series = exp.plot(tables, params)
        files.append(
            render_svg(out_dir / f"{spec.name}.svg", title, xlabel, ylabel, series)
        )

    streams = exp.stream_count(params) if exp.stream_count else params.get("reps", 1)
    entries: dict[str, object] = {"experiment": spec.name}
    entries.update(params)
    entries.update(
        seed=spec.seed,
        threads=spec.threads if spec.threads else 1,
        format=spec.fmt,
        version=__version__,
        stream_scheme="numpy SeedSequence((seed, index)) per replicate",
        stream_ids=f"0..{streams - 1}",
        files=",".join(f.name for f in files),
        wall_clock_s=round(wall, 3),
    )
    manifest = write_manifest(out_dir / f"{spec.name}.manifest", entries)

    check = exp.checker(tables, params) if spec.check else None
    return ExperimentResult(
        name=spec.name,
        tables=tables,
        files=tuple(files),
        manifest=manifest,
        check=check,
        wall_clock_s=wall,
    )


def spec_from_manifest(path: str | Path, out_dir: str | Path) -> ExperimentSpec:
    """Rebuild a runnable spec from a manifest; rerunning must reproduce it."""
    entries = read_manifest(path)
    name = entries["experiment"]
    exp = get_experiment(name)
    params = {
        key: _coerce(default, entries[key])
        for key, default in exp.defaults.items()
        if key in entries
    }
    return ExperimentSpec(
        name=name,
        params=params,
        out_dir=Path(out_dir),
        seed=int(entries.get("seed", "0")),
        threads=int(entries["threads"]) if entries.get("threads") else None,
        fmt=entries.get("format", "csv"),
    )


def check_experiment(
    name: str,
    overrides: Mapping[str, object] | None = None,
    seed: int = 0,
    threads: int | None = None,
) -> CheckResult:
    """Run in memory and evaluate the experiment's clauses (no files)."""
    exp = get_experiment(name)
    params = build_params(name, dict(overrides or {}))
    tables = exp.runner(params, seed, threads)
    return exp.checker(tables, params)
