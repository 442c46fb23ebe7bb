import csv
import json

import pytest

from runinspect.cli import main
from runinspect.problems import ACKLEY_GLOBAL_MIN_VALUE


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


class TestQuadSine:
    def test_certified_run_exit_zero(self, tmp_path):
        rc = main(["quad-sine", "--out", str(tmp_path)])
        assert rc == 0
        header, rows = _read_csv(tmp_path / "quad_sine_trace.csv")
        assert header == ["phase", "k", "x", "F"]
        assert rows[0][0] == "run"
        summary = _read_json(tmp_path / "quad_sine_summary.json")
        assert summary["subcommand"] == "quad-sine"
        assert summary["certified"] is True
        assert summary["final_abs_x"] <= 1e-3
        assert summary["final_value"] <= 1e-6
        assert summary["value_evals"] > 0
        assert summary["flags"]["R"] == 0.7

    def test_same_seed_rerun_byte_identical(self, tmp_path):
        d1, d2 = tmp_path / "one", tmp_path / "two"
        assert main(["quad-sine", "--x0", "7.3", "--out", str(d1)]) == 0
        assert main(["quad-sine", "--x0", "7.3", "--out", str(d2)]) == 0
        b1 = (d1 / "quad_sine_trace.csv").read_bytes()
        b2 = (d2 / "quad_sine_trace.csv").read_bytes()
        assert b1 == b2
        s1 = _read_json(d1 / "quad_sine_summary.json")
        s2 = _read_json(d2 / "quad_sine_summary.json")
        for s in (s1, s2):
            s.pop("wall_time_s")
            s["flags"].pop("out")
        assert s1 == s2

    def test_diverging_step_exits_two(self, tmp_path, capsys):
        rc = main(["quad-sine", "--step", "10", "--out", str(tmp_path)])
        assert rc == 2
        assert "no certificate" in capsys.readouterr().err
        summary = _read_json(tmp_path / "quad_sine_summary.json")
        assert summary["certified"] is False
        assert summary["status"] == "diverged"

    def test_out_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RUNINSPECT_OUT", str(tmp_path / "envdir"))
        assert main(["quad-sine"]) == 0
        assert (tmp_path / "envdir" / "quad_sine_summary.json").exists()


class TestAckley:
    def test_gd2d_certifies(self, tmp_path):
        rc = main(["ackley", "--seed", "0", "--out", str(tmp_path)])
        assert rc == 0
        header, rows = _read_csv(tmp_path / "ackley_trajectory.csv")
        assert header == ["phase", "k", "x", "y", "F"]
        assert len(rows) > 1
        summary = _read_json(tmp_path / "ackley_summary.json")
        assert summary["grid_oracle_value"] == ACKLEY_GLOBAL_MIN_VALUE
        assert summary["certified"] is True
        assert summary["gap_to_grid_oracle"] <= 1e-3

    def test_bcd1d_mode_runs(self, tmp_path):
        rc = main(["ackley", "--mode", "bcd1d", "--seed", "1", "--out", str(tmp_path)])
        assert rc in (0, 2)
        summary = _read_json(tmp_path / "ackley_summary.json")
        assert summary["flags"]["mode"] == "bcd1d"
        assert len(summary["final_point"]) == 2


class TestKmeans:
    def test_gauss_inspection_never_worse(self, tmp_path):
        rc = main(
            ["kmeans", "--dataset", "gauss", "--trials", "2", "--out", str(tmp_path)]
        )
        assert rc == 0
        header, rows = _read_csv(tmp_path / "kmeans_trials.csv")
        assert header[:3] == ["trial", "em_objective", "inspected_objective"]
        assert len(rows) == 2
        for row in rows:
            assert float(row[2]) <= float(row[1]) + 1e-9
        summary = _read_json(tmp_path / "kmeans_summary.json")
        assert summary["K"] == 4
        assert summary["n_points"] == 4000
        assert summary["inspected_mean"] <= summary["em_mean"] + 1e-12
        assert summary["flags"]["init"] == "adversarial"
        assert summary["flags"]["R"] == 10.0

    def test_iris_defaults(self, tmp_path):
        rc = main(
            ["kmeans", "--dataset", "iris", "--trials", "2", "--out", str(tmp_path)]
        )
        assert rc == 0
        summary = _read_json(tmp_path / "kmeans_summary.json")
        assert summary["K"] == 3
        assert summary["n_points"] == 150
        assert summary["flags"]["init"] == "random"
        assert summary["flags"]["R"] == 3.0
        _, rows = _read_csv(tmp_path / "kmeans_trials.csv")
        for row in rows:
            assert float(row[2]) <= float(row[1]) + 1e-9


class TestRobustReg:
    def test_end_to_end(self, tmp_path):
        rc = main(["robust-reg", "--out", str(tmp_path)])
        assert rc == 0
        summary = _read_json(tmp_path / "robust_reg_summary.json")
        assert summary["loss_inspected"] <= summary["loss_plain"] + 1e-12
        assert len(summary["beta_inspected"]) == 2
        header, rows = _read_csv(tmp_path / "robust_reg_path.csv")
        assert header == ["phase", "k", "intercept", "slope", "loss"]
        header, rows = _read_csv(tmp_path / "robust_reg_surface.csv")
        assert header == ["intercept", "slope", "loss"]
        assert len(rows) == 101 * 81  # 0.1 grid over [-2,8] x [-3,5]


class TestCs:
    def test_inspected_cd_never_worse(self, tmp_path):
        rc = main(["cs", "--trials", "2", "--out", str(tmp_path)])
        assert rc == 0
        header, rows = _read_csv(tmp_path / "cs_trials.csv")
        assert "support_ratio_at_0.001" in header
        assert len(rows) == 2 * 3  # three algorithms per trial
        by_trial = {}
        for row in rows:
            by_trial.setdefault(row[0], {})[row[1]] = float(row[2])
        for t, objs in by_trial.items():
            assert set(objs) == {"half", "cd", "cdi"}
            assert objs["cdi"] <= objs["cd"] + 1e-9
        summary = _read_json(tmp_path / "cs_summary.json")
        assert summary["n"] == 50
        assert set(summary["table"]) == {"half", "cd", "cdi"}
        for st in summary["table"].values():
            assert 0.0 <= st["a_support_ratio"] <= 1.0

    def test_unknown_algo_rejected(self, tmp_path):
        with pytest.raises(SystemExit, match="bogus"):
            main(["cs", "--algos", "half,bogus", "--out", str(tmp_path)])


class TestLogreg:
    def test_inspected_never_worse_per_trial(self, tmp_path):
        rc = main(["logreg", "--trials", "2", "--out", str(tmp_path)])
        assert rc == 0
        header, rows = _read_csv(tmp_path / "logreg_trials.csv")
        assert header[0] == "trial"
        assert len(rows) == 2
        i_pl = header.index("pl_objective")
        i_pli = header.index("pli_objective")
        for row in rows:
            assert float(row[i_pli]) <= float(row[i_pl]) + 1e-9
        summary = _read_json(tmp_path / "logreg_summary.json")
        assert summary["beta_weight"] == pytest.approx(1.2)
        for cell in ("pl", "pli"):
            stats = summary["cells"][cell]
            assert {"objective_mean", "objective_var", "test_error_mean",
                    "test_error_var", "iterations_mean"} <= set(stats)
        assert "inspections_mean" in summary["cells"]["pli"]
