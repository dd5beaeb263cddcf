"""Command line entry point.

Layout: `cyclewalk <experiment|theory|walk|breakpoint|cqs> ...` with the
global flags --seed, --out, --threads, --format accepted both before and
after the subcommand.  Exit codes: 0 success, 1 usage error, 2 runtime
failure, 3 failed --check clauses.  Every CSV written here gets a sibling
key=value manifest recording the parameters, seed, and stream scheme.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import breakpoint as breakpoint_mod
from . import cqs as cqs_mod
from . import experiments, theory, walk
from .artifacts import write_csv, write_manifest


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); the contract wants 1
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise UsageError(f"could not parse float list {text!r}") from None
    if not values:
        raise UsageError(f"empty float list {text!r}")
    return values


def _add_global_flags(p: argparse.ArgumentParser, top: bool) -> None:
    sup = argparse.SUPPRESS

    def dflt(v):
        return v if top else sup

    p.add_argument("--seed", type=int, default=dflt(0), help="master rng seed")
    p.add_argument(
        "--out", type=Path, default=dflt(Path(".")), help="output directory"
    )
    p.add_argument(
        "--threads",
        type=int,
        default=dflt(None),
        help="worker threads (default: all cores; never changes results)",
    )
    p.add_argument(
        "--format",
        dest="fmt",
        choices=("csv", "csv+svg"),
        default=dflt("csv"),
        help="artifact format",
    )


_THEORY_FNS: dict[str, tuple[tuple[str, ...], object]] = {
    "kappa": (("c",), lambda a: theory.kappa(a["c"])),
    "borel": (("c", "k"), lambda a: theory.borel_pmf(a["c"], int(a["k"]))),
    "borel-inf": (("c",), lambda a: theory.borel_inf(a["c"])),
    "theta": (("c",), lambda a: theory.theta(a["c"])),
    "rho": (("c",), lambda a: theory.rho(a["c"])),
    "g": (("c",), lambda a: theory.g_components(a["c"])),
    "g-series": (("c",), lambda a: theory.g_components_series(a["c"])),
    "u": (("c",), lambda a: theory.u_distance(a["c"])),
    "alpha": (("c",), lambda a: theory.alpha(a["c"])),
    "sigma": (("c",), lambda a: theory.sigma_clt(a["c"])),
    "trees": (
        ("n", "k", "c"),
        lambda a: theory.expected_tree_count(int(a["n"]), int(a["k"]), a["c"] / a["n"]),
    ),
    "lambda": (
        ("n", "k", "c"),
        lambda a: theory.lambda_asymptotic(int(a["n"]), int(a["k"]), a["c"]),
    ),
    "tail": (("c", "k"), lambda a: theory.cluster_tail_bound(a["c"], a["k"])),
    "phi": (("k",), lambda a: theory.phi_factorial(int(a["k"]))),
}


def build_parser() -> Parser:
    parser = Parser(
        prog="cyclewalk",
        description="transposition walk, coupled graph, and reversal toolkit",
    )
    _add_global_flags(parser, top=True)
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    pe = sub.add_parser("experiment", help="run a named study and write artifacts")
    pe.add_argument("name", choices=sorted(experiments.EXPERIMENTS))
    pe.add_argument("--check", action="store_true", help="evaluate pinned clauses")
    pe.add_argument("--n", type=int)
    pe.add_argument("--markers", dest="n_markers", type=int)
    pe.add_argument("--c", type=float)
    pe.add_argument("--c-max", dest="c_max", type=float)
    pe.add_argument("--c-step", dest="c_step", type=float)
    pe.add_argument("--reps", type=int)
    pe.add_argument("--a", type=float)
    pe.add_argument("--c-grid", dest="c_grid", type=_floats)
    pe.add_argument("--c-list", dest="c_list", type=_floats)
    pe.add_argument("--r-grid", dest="r_grid", type=_floats)
    pe.add_argument("--x-max", dest="x_max", type=int)
    pe.add_argument("--count", type=int)
    pe.add_argument("--k-max", dest="k_max", type=int)
    _add_global_flags(pe, top=False)

    pt = sub.add_parser("theory", help="evaluate a limit-law quantity")
    pt.add_argument("fn", choices=sorted(_THEORY_FNS))
    pt.add_argument("--c", type=float)
    pt.add_argument("--k", type=float)
    pt.add_argument("--n", type=int)
    _add_global_flags(pt, top=False)

    pw = sub.add_parser("walk", help="raw walk traces as CSV")
    ws = pw.add_subparsers(dest="walk_cmd", metavar="subcommand", required=True)
    pwr = ws.add_parser("run", help="replicated walk observed on a c grid")
    pwr.add_argument("--n", type=int, required=True)
    pwr.add_argument("--c", type=float, required=True)
    pwr.add_argument("--reps", type=int, default=100)
    pwr.add_argument("--mode", choices=walk.TIME_MODES, default="poisson")
    pwr.add_argument("--snapshots", type=_floats, default=None)
    pwr.add_argument("--mass-exponent", dest="mass_exponent", type=float, default=0.55)
    _add_global_flags(pwr, top=False)
    pww = ws.add_parser("window", help="walk observed at c = 1 - n^(-r/3)")
    pww.add_argument("--n", type=int, required=True)
    pww.add_argument("--r-grid", dest="r_grid", type=_floats, default=(0.5, 1.0))
    pww.add_argument("--reps", type=int, default=100)
    _add_global_flags(pww, top=False)

    pb = sub.add_parser("breakpoint", help="genome distance tools")
    bs = pb.add_subparsers(dest="bp_cmd", metavar="subcommand", required=True)
    pbd = bs.add_parser("d0", help="parsimony lower bound per genome in a file")
    pbd.add_argument("file", help="genome file, or a bundled name (mouse_x, repleta)")
    _add_global_flags(pbd, top=False)
    pba = bs.add_parser("anneal", help="search signs minimizing d0")
    pba.add_argument("file", help="genome file, or a bundled name (mouse_x, repleta)")
    pba.add_argument("--restarts", type=int, default=20)
    pba.add_argument("--moves", type=int, default=100_000)
    pba.add_argument("--cooling", type=float, default=None)
    _add_global_flags(pba, top=False)
    pbw = bs.add_parser("walk", help="coupled reversal walk census")
    pbw.add_argument("--markers", type=int, required=True)
    pbw.add_argument("--c", type=float, default=1.0)
    pbw.add_argument("--reps", type=int, default=1000)
    pbw.add_argument("--snapshots", type=_floats, default=None)
    _add_global_flags(pbw, top=False)

    pc = sub.add_parser("cqs", help="queue-bank simulation")
    cs = pc.add_subparsers(dest="cqs_cmd", metavar="subcommand", required=True)
    pcr = cs.add_parser("run", help="replicated occupancy suprema")
    pcr.add_argument("--n", type=int, default=10_000)
    pcr.add_argument("--a", type=float, default=0.55)
    pcr.add_argument("--c", type=float, default=2.0)
    pcr.add_argument("--reps", type=int, default=100)
    _add_global_flags(pcr, top=False)
    pce = cs.add_parser("excursions", help="excursion-maximum tail estimates")
    pce.add_argument("--x-max", dest="x_max", type=int, default=4)
    pce.add_argument("--count", type=int, default=10_000)
    _add_global_flags(pce, top=False)

    return parser


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    return os.cpu_count() or 1


def _emit(
    out_dir: Path,
    stem: str,
    table: dict[str, np.ndarray],
    entries: dict[str, object],
    wall: float,
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(out_dir / f"{stem}.csv", table)
    entries = dict(entries)
    entries.update(
        version=__version__,
        stream_scheme="numpy SeedSequence((seed, index)) per replicate",
        files=csv_path.name,
        wall_clock_s=round(wall, 3),
    )
    manifest = write_manifest(out_dir / f"{stem}.manifest", entries)
    print(f"wrote {csv_path}")
    print(f"wrote {manifest}")


def _cmd_experiment(args) -> int:
    override_keys = (
        "n", "n_markers", "c", "c_max", "c_step", "reps", "a",
        "c_grid", "c_list", "r_grid", "x_max", "count", "k_max",
    )
    overrides = {
        key: getattr(args, key)
        for key in override_keys
        if getattr(args, key, None) is not None
    }
    spec = experiments.ExperimentSpec(
        name=args.name,
        params=overrides,
        out_dir=args.out,
        seed=args.seed,
        threads=_resolve_threads(args),
        fmt=args.fmt,
        check=args.check,
    )
    result = experiments.run_experiment(spec)
    for path in result.files:
        print(f"wrote {path}")
    print(f"wrote {result.manifest}")
    if result.check is not None:
        for line in result.check.lines():
            print(line)
        if not result.check.passed:
            return 3
    return 0


def _cmd_theory(args) -> int:
    needs, fn = _THEORY_FNS[args.fn]
    values = {}
    for name in needs:
        given = getattr(args, name)
        if given is None:
            raise UsageError(
                f"theory {args.fn} requires --{name}"
            )
        values[name] = given
    result = fn(values)
    if isinstance(result, (int, np.integer)):
        print(int(result))
    else:
        print(format(float(result), ".12g"))
    return 0


def _walk_table(rows: np.ndarray, axis_values: np.ndarray) -> dict[str, np.ndarray]:
    reps, n_snap, _ = rows.shape
    table: dict[str, np.ndarray] = {
        "rep": np.repeat(np.arange(reps), n_snap),
        "c_or_r": np.tile(np.asarray(axis_values, float), reps),
    }
    flat = rows.reshape(reps * n_snap, rows.shape[2])
    for idx, name in enumerate(walk.TRACE_COLUMNS):
        table[name] = flat[:, idx]
    return table


def _cmd_walk(args) -> int:
    threads = _resolve_threads(args)
    start = time.perf_counter()
    if args.walk_cmd == "run":
        snaps = tuple(args.snapshots) if args.snapshots else (args.c,)
        config = walk.WalkConfig(
            n=args.n,
            horizon_c=max(max(snaps), args.c),
            time_mode=args.mode,
            snapshots_c=snaps,
            mass_exponent=args.mass_exponent,
        )
        rows = walk.replicate_rows(config, args.reps, seed=args.seed, threads=threads)
        table = _walk_table(rows, np.asarray(config.snapshots_c))
        entries = {
            "command": "walk run",
            "n": args.n,
            "c": args.c,
            "snapshots": ",".join(f"{s:g}" for s in config.snapshots_c),
            "mode": args.mode,
            "mass_exponent": args.mass_exponent,
            "reps": args.reps,
            "seed": args.seed,
        }
        _emit(args.out, "walk-run", table, entries, time.perf_counter() - start)
        return 0
    r_grid = tuple(args.r_grid)
    if any(not 0.0 <= r <= 1.0 for r in r_grid) or r_grid[-1] == 0.0:
        raise UsageError("--r-grid values must lie in [0, 1] with a positive last r")
    c_vals = tuple(1.0 - float(args.n) ** (-r / 3.0) for r in r_grid)
    config = walk.WalkConfig(
        n=args.n, horizon_c=c_vals[-1], time_mode="poisson", snapshots_c=c_vals
    )
    rows = walk.replicate_rows(config, args.reps, seed=args.seed, threads=threads)
    table = _walk_table(rows, np.asarray(r_grid))
    entries = {
        "command": "walk window",
        "n": args.n,
        "r_grid": ",".join(f"{r:g}" for r in r_grid),
        "reps": args.reps,
        "seed": args.seed,
    }
    _emit(args.out, "walk-window", table, entries, time.perf_counter() - start)
    return 0


def _load_genomes_arg(name: str) -> list[breakpoint_mod.SignedGenome]:
    path = Path(name)
    if path.exists():
        return breakpoint_mod.load_genomes(path)
    if name in ("mouse_x", "repleta"):
        return [breakpoint_mod.bundled_genome(name)]
    raise UsageError(f"no such genome file or bundled name: {name}")


def _cmd_breakpoint(args) -> int:
    threads = _resolve_threads(args)
    start = time.perf_counter()
    if args.bp_cmd == "d0":
        for idx, g in enumerate(_load_genomes_arg(args.file)):
            comp = breakpoint_mod.breakpoint_components(g)
            print(
                f"genome {idx}: m={g.m} components={comp.count} "
                f"d0={breakpoint_mod.d0_lower_bound(g)} (lower bound)"
            )
        return 0
    if args.bp_cmd == "anneal":
        genome = _load_genomes_arg(args.file)[0]
        mags = [abs(x) for x in genome.markers]
        out = breakpoint_mod.anneal_signs(
            mags,
            moves=args.moves,
            restarts=args.restarts,
            seed=args.seed,
            cooling=args.cooling,
            threads=threads,
        )
        print(f"best d0 = {out.d0} (lower bound) over {args.restarts} restarts")
        print(f"signed genome: {out.genome(tuple(mags))}")
        table = {
            "restart": np.arange(len(out.restart_bests)),
            "best_d0": np.asarray(out.restart_bests),
        }
        entries = {
            "command": "breakpoint anneal",
            "file": args.file,
            "m": len(mags),
            "restarts": args.restarts,
            "moves": args.moves,
            "cooling": args.cooling if args.cooling is not None else "exp(-5/moves)",
            "seed": args.seed,
        }
        _emit(args.out, "breakpoint-anneal", table, entries, time.perf_counter() - start)
        return 0
    snaps = tuple(args.snapshots) if args.snapshots else ()
    rows = breakpoint_mod.coupled_reversal_walk(
        args.markers, args.c, args.reps, seed=args.seed,
        snapshots_c=snaps, threads=threads,
    )
    reps, n_snap, _ = rows.shape
    axis = snaps or (args.c,)
    table: dict[str, np.ndarray] = {
        "rep": np.repeat(np.arange(reps), n_snap),
        "c": np.tile(np.asarray(axis, float), reps),
    }
    flat = rows.reshape(reps * n_snap, rows.shape[2])
    for idx, name in enumerate(breakpoint_mod.REV_COLUMNS):
        table[name] = flat[:, idx]
    entries = {
        "command": "breakpoint walk",
        "markers": args.markers,
        "c": args.c,
        "snapshots": ",".join(f"{s:g}" for s in axis),
        "reps": args.reps,
        "seed": args.seed,
    }
    _emit(args.out, "breakpoint-walk", table, entries, time.perf_counter() - start)
    return 0


def _cmd_cqs(args) -> int:
    start = time.perf_counter()
    if args.cqs_cmd == "run":
        results = cqs_mod.simulate_cqs_batch(
            args.n, args.a, args.c, args.reps, args.seed,
            threads=_resolve_threads(args),
        )
        bound_total, bound_mass = cqs_mod.occupancy_bounds(args.n, args.a)
        sup_total = np.array([r.sup_total for r in results])
        sup_mass = np.array([r.sup_mass for r in results])
        table = {
            "rep": np.arange(args.reps),
            "cutoff": np.array([r.cutoff for r in results]),
            "events": np.array([r.event_count for r in results]),
            "sup_total": sup_total,
            "sup_mass": sup_mass,
            "bound_total": np.full(args.reps, bound_total),
            "bound_mass": np.full(args.reps, bound_mass),
            "within_total": (sup_total <= bound_total).astype(np.int64),
            "within_mass": (sup_mass <= bound_mass).astype(np.int64),
        }
        entries = {
            "command": "cqs run",
            "n": args.n,
            "a": args.a,
            "c": args.c,
            "reps": args.reps,
            "seed": args.seed,
        }
        _emit(args.out, "cqs-run", table, entries, time.perf_counter() - start)
        print(
            f"{int(table['within_total'].sum())}/{args.reps} reps under the "
            f"total-occupancy envelope"
        )
        return 0
    tail = cqs_mod.excursion_max_distribution(
        args.x_max, args.count, walk.substream(args.seed, 0)
    )
    table = {
        "x": tail.x,
        "empirical": tail.empirical,
        "exact": tail.exact,
        "abs_err": np.abs(tail.empirical - tail.exact),
    }
    entries = {
        "command": "cqs excursions",
        "x_max": args.x_max,
        "count": args.count,
        "seed": args.seed,
    }
    _emit(args.out, "cqs-excursions", table, entries, time.perf_counter() - start)
    print(f"worst |empirical - exact| = {float(table['abs_err'].max()):.4f}")
    return 0


_DISPATCH = {
    "experiment": _cmd_experiment,
    "theory": _cmd_theory,
    "walk": _cmd_walk,
    "breakpoint": _cmd_breakpoint,
    "cqs": _cmd_cqs,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.command](args)
    except (UsageError, experiments.BadParams) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        raise
    except Exception as exc:  # runtime failures map to a distinct exit code
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
