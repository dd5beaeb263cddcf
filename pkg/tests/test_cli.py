"""CLI surface, artifacts, and the experiment driver plumbing."""

import numpy as np
import pytest

from cyclewalk import experiments, theory
from cyclewalk.artifacts import read_csv, read_manifest, write_csv, write_manifest
from cyclewalk.cli import main
from cyclewalk.plotting import render_svg


class TestTheoryEval:
    @pytest.mark.parametrize(
        "argv,expect",
        [
            (["theory", "kappa", "--c", "0.8"], "0.404718956217"),
            (["theory", "u", "--c", "1"], "0.5"),
            (["theory", "theta", "--c", "1"], "0"),
            (["theory", "theta", "--c", "2"], "0.79681213002"),
            (["theory", "phi", "--k", "4"], "10"),
            (["theory", "borel", "--c", "2", "--k", "2"], "0.0366312777775"),
        ],
    )
    def test_values(self, capsys, argv, expect):
        assert main(argv) == 0
        assert capsys.readouterr().out.strip() == expect

    def test_trees_uses_c_over_n(self, capsys):
        assert main(["theory", "trees", "--n", "100", "--k", "1", "--c", "1"]) == 0
        got = float(capsys.readouterr().out)
        assert np.isclose(got, theory.expected_tree_count(100, 1, 0.01))


class TestExitCodes:
    def test_usage_errors(self, capsys):
        assert main([]) == 1
        assert main(["theory", "kappa"]) == 1  # missing --c
        assert main(["theory", "nope", "--c", "1"]) == 1
        assert main(["experiment", "nope"]) == 1
        capsys.readouterr()

    def test_bad_param_is_usage(self, capsys, tmp_path):
        rc = main(
            ["experiment", "fig3", "--a", "0.5", "--out", str(tmp_path)]
        )
        assert rc == 1
        assert "does not take" in capsys.readouterr().err

    def test_runtime_error(self, capsys):
        assert main(["theory", "sigma", "--c", "0.5"]) == 2
        capsys.readouterr()

    def test_check_failure_exit(self, capsys, tmp_path):
        # far below the pinned scale, so the pinned clauses must fail
        rc = main(
            ["experiment", "fig3", "--n", "30", "--reps", "100",
             "--out", str(tmp_path), "--threads", "1", "--check"]
        )
        assert rc == 3
        out = capsys.readouterr().out
        assert "FAIL" in out

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()


class TestExperimentDriver:
    def test_artifacts_and_determinism(self, capsys, tmp_path):
        d1, d2, d3 = (tmp_path / x for x in ("a", "b", "c"))
        argv = ["experiment", "eq4-trees", "--n", "80", "--reps", "40"]
        assert main(argv + ["--out", str(d1), "--threads", "1"]) == 0
        assert main(argv + ["--out", str(d2), "--threads", "1"]) == 0
        assert main(argv + ["--out", str(d3), "--threads", "3"]) == 0
        capsys.readouterr()
        body = (d1 / "eq4-trees.csv").read_bytes()
        assert body == (d2 / "eq4-trees.csv").read_bytes()
        assert body == (d3 / "eq4-trees.csv").read_bytes()
        man = read_manifest(d1 / "eq4-trees.manifest")
        assert man["experiment"] == "eq4-trees"
        assert man["n"] == "80"
        assert "SeedSequence" in man["stream_scheme"]

    def test_manifest_round_trip(self, capsys, tmp_path):
        d1, d2 = tmp_path / "x", tmp_path / "y"
        assert (
            main(
                ["experiment", "fig4", "--n", "50", "--reps", "60",
                 "--c-grid", "0.5,1,2", "--out", str(d1), "--threads", "1"]
            )
            == 0
        )
        capsys.readouterr()
        spec = experiments.spec_from_manifest(d1 / "fig4.manifest", d2)
        assert spec.params["c_grid"] == (0.5, 1.0, 2.0)
        experiments.run_experiment(spec)
        assert (d1 / "fig4.csv").read_bytes() == (d2 / "fig4.csv").read_bytes()

    def test_svg_written(self, capsys, tmp_path):
        rc = main(
            ["experiment", "thm3", "--n", "200", "--reps", "20",
             "--c-list", "1.5,2", "--out", str(tmp_path),
             "--format", "csv+svg", "--threads", "1"]
        )
        assert rc == 0
        capsys.readouterr()
        svg = (tmp_path / "thm3.svg").read_text()
        assert svg.startswith("<svg") and "polyline" in svg

    def test_two_table_experiment(self, capsys, tmp_path):
        rc = main(
            ["experiment", "cqs-bounds", "--n", "200", "--reps", "5",
             "--count", "500", "--out", str(tmp_path), "--threads", "1"]
        )
        assert rc == 0
        capsys.readouterr()
        assert (tmp_path / "cqs-bounds.csv").exists()
        exc = read_csv(tmp_path / "cqs-bounds-excursions.csv")
        want = np.array([1.0 / theory.phi_factorial(int(x) + 1) for x in exc["x"]])
        assert np.allclose(exc["exact"], want)

    def test_check_experiment_in_memory(self):
        res = experiments.check_experiment(
            "eq4-trees", {"n": 80, "reps": 40}, seed=0, threads=1
        )
        assert res.experiment == "eq4-trees"
        assert res.clauses and isinstance(res.passed, bool)

    def test_unknown_param_rejected(self):
        with pytest.raises(experiments.BadParams):
            experiments.build_params("thm4", {"x_max": 3})
        with pytest.raises(experiments.BadParams):
            experiments.build_params("thm4", {"reps": 0})


class TestWalkSubcommand:
    def test_pinned_columns_and_identity(self, capsys, tmp_path):
        rc = main(
            ["walk", "run", "--n", "60", "--c", "2", "--reps", "8",
             "--snapshots", "1,2", "--out", str(tmp_path), "--threads", "1"]
        )
        assert rc == 0
        capsys.readouterr()
        table = read_csv(tmp_path / "walk-run.csv")
        assert list(table) == [
            "rep", "c_or_r", "N_raw", "N_nontrivial", "D", "Z", "K1", "L1",
            "N_up", "components", "giant",
        ]
        assert np.array_equal(table["D"], table["N_nontrivial"] - 2 * table["Z"])

    def test_window_axis_is_r(self, capsys, tmp_path):
        rc = main(
            ["walk", "window", "--n", "500", "--reps", "4",
             "--r-grid", "0.5,1", "--out", str(tmp_path), "--threads", "1"]
        )
        assert rc == 0
        capsys.readouterr()
        table = read_csv(tmp_path / "walk-window.csv")
        assert set(np.unique(table["c_or_r"])) == {0.5, 1.0}


class TestBreakpointSubcommand:
    def test_d0_line(self, capsys):
        assert main(["breakpoint", "d0", "mouse_x"]) == 0
        out = capsys.readouterr().out
        assert "m=11" in out and "components=5" in out and "d0=7" in out

    def test_missing_file(self, capsys):
        assert main(["breakpoint", "d0", "no_such_file.txt"]) == 1
        capsys.readouterr()

    def test_walk_csv(self, capsys, tmp_path):
        rc = main(
            ["breakpoint", "walk", "--markers", "15", "--c", "1",
             "--reps", "6", "--out", str(tmp_path), "--threads", "1"]
        )
        assert rc == 0
        capsys.readouterr()
        table = read_csv(tmp_path / "breakpoint-walk.csv")
        total = table["dc_minus"] + table["dc_zero"] + table["dc_plus"]
        assert np.array_equal(table["D"], total - 2 * table["frag_steps"])

    def test_anneal_identity(self, capsys, tmp_path):
        genome_file = tmp_path / "ident.txt"
        genome_file.write_text("1 2 3 4 5\n")
        rc = main(
            ["breakpoint", "anneal", str(genome_file), "--moves", "500",
             "--restarts", "2", "--out", str(tmp_path), "--threads", "1"]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "best d0 = 0" in out


class TestArtifactHelpers:
    def test_csv_round_trip(self, tmp_path):
        cols = {
            "a": np.array([1, 2, 3]),
            "b": np.array([0.5, 1.25, -3.0]),
        }
        path = write_csv(tmp_path / "t.csv", cols)
        back = read_csv(path)
        assert np.array_equal(back["a"], [1, 2, 3])
        assert np.allclose(back["b"], cols["b"])

    def test_csv_rejects_ragged(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(tmp_path / "t.csv", {"a": np.arange(3), "b": np.arange(4)})

    def test_manifest_round_trip(self, tmp_path):
        path = write_manifest(
            tmp_path / "m.manifest", {"x": 3, "grid": (0.5, 1.0), "name": "abc"}
        )
        back = read_manifest(path)
        assert back == {"x": "3", "grid": "0.5,1", "name": "abc"}

    def test_svg_series_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            render_svg(
                tmp_path / "p.svg", "t", "x", "y",
                [(np.arange(3), np.arange(4), "bad")],
            )
