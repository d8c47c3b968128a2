import json
import subprocess
import sys

import pytest

from dpa.cli import main
from dpa.core import load_graph


MODEL = ["--alpha", "0.25", "--gamma", "0.25", "--delta-in", "1", "--delta-out", "1"]


class TestGenerate:
    def test_writes_edges(self, tmp_path, capsys):
        rc = main(["generate", *MODEL, "--edges", "500", "--seed", "3",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        graph = load_graph(str(tmp_path / "edges.csv"))
        assert graph.t == 500
        assert "edges.csv" in capsys.readouterr().out

    def test_deterministic_per_seed(self, tmp_path):
        main(["generate", *MODEL, "--edges", "200", "--seed", "5",
              "--out-dir", str(tmp_path / "a")])
        main(["generate", *MODEL, "--edges", "200", "--seed", "5",
              "--out-dir", str(tmp_path / "b")])
        a = (tmp_path / "a" / "edges.csv").read_text()
        b = (tmp_path / "b" / "edges.csv").read_text()
        assert a == b

    def test_missing_edges_flag(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["generate", *MODEL, "--out-dir", str(tmp_path)])


class TestHistograms:
    def test_degree_dist_from_generation(self, tmp_path):
        rc = main(["degree-dist", *MODEL, "--edges", "300", "--side", "out",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "hist.csv").read_text().strip().splitlines()
        assert lines[0] == "degree,count"
        total = sum(int(line.split(",")[1]) for line in lines[1:])
        assert total >= 1  # one row per observed degree, counts sum to n

    def test_degree_dist_from_file(self, tmp_path):
        main(["generate", *MODEL, "--edges", "300", "--out-dir", str(tmp_path)])
        rc = main(["degree-dist", "--in-file", str(tmp_path / "edges.csv"),
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "hist.csv").exists()

    def test_joint_counts(self, tmp_path):
        rc = main(["joint", *MODEL, "--edges", "300", "--seed", "1",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "joint.csv").read_text().strip().splitlines()
        assert lines[0] == "d1,d2,count"
        assert len(lines) > 1


class TestTheory:
    def run_json(self, capsys, argv):
        assert main(argv) == 0
        return json.loads(capsys.readouterr().out)

    def test_params(self, capsys):
        doc = self.run_json(capsys, ["theory", *MODEL, "--what", "params"])
        assert doc["value"]["cbar_in"] == pytest.approx(0.5)
        assert doc["value"]["regime"] == "sum_eq_1"
        assert doc["value"]["tail_exponent_in"] == pytest.approx(-3.0)

    def test_fbar(self, capsys):
        doc = self.run_json(capsys, ["theory", *MODEL, "--what", "fbar", "--d", "2"])
        assert doc["value"] == pytest.approx(1 / 15, rel=1e-9)

    def test_kappa_reports_error_estimate(self, capsys):
        doc = self.run_json(capsys, [
            "theory", *MODEL, "--what", "kappa",
            "--c1", "1", "--c2", "1", "--r", "1", "--x", "1",
        ])
        assert doc["value"] == pytest.approx(0.5, rel=1e-8)
        assert 0.0 < doc["abs_err_est"] < 1e-6

    def test_cx_asymptote(self, capsys):
        doc = self.run_json(capsys, [
            "theory", *MODEL, "--what", "cx-asymptote",
            "--d1", "100", "--d2", "10", "--direction", "to_inf",
        ])
        assert doc["constant_name"] == "Dp_zero"
        assert doc["value"] > 0.0

    def test_config_file_supplies_model(self, tmp_path, capsys):
        cfg = tmp_path / "model.json"
        cfg.write_text(json.dumps(
            {"alpha": 0.25, "gamma": 0.25, "delta-in": 1.0, "delta-out": 1.0}
        ))
        doc = self.run_json(capsys, [
            "theory", "--config", str(cfg), "--what", "fbar", "--d", "0",
        ])
        assert doc["value"] == pytest.approx(1 / 6, rel=1e-9)

    def test_flags_override_config(self, tmp_path, capsys):
        cfg = tmp_path / "model.json"
        cfg.write_text(json.dumps({"alpha": 0.1, "gamma": 0.1}))
        doc = self.run_json(capsys, [
            "theory", "--config", str(cfg), "--alpha", "0.25", "--gamma", "0.25",
            "--delta-in", "1", "--delta-out", "1", "--what", "params",
        ])
        assert doc["value"]["cbar_in"] == pytest.approx(0.5)

    def test_requires_model(self):
        with pytest.raises(SystemExit):
            main(["theory", "--what", "params"])


class TestOracle:
    def test_degree_table_csv(self, tmp_path, capsys):
        rc = main(["oracle", *MODEL, "--kind", "E_in", "--t-max", "3",
                   "--d-max", "2", "--out-dir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "oracle_E_in.csv").read_text().strip().splitlines()
        assert lines[0] == "T,N,d,value"
        # (1+2+3+4) cells times 3 degree rows
        assert len(lines) == 1 + 10 * 3
        # values must be plain parseable numbers
        vals = [float(line.rsplit(",", 1)[1]) for line in lines[1:]]
        assert vals[0] == 1.0
        assert all(v >= 0.0 for v in vals)

    def test_pair_table_csv(self, tmp_path):
        rc = main(["oracle", *MODEL, "--kind", "EX", "--t-max", "4",
                   "--d1", "1", "--d2", "1", "--out-dir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "oracle_EX.csv").read_text().strip().splitlines()
        assert lines[0] == "T,N,value"
        assert len(lines) == 1 + 15
        for line in lines[1:]:
            float(line.rsplit(",", 1)[1])


class TestExperiment:
    def test_report_written(self, tmp_path, capsys):
        rc = main([
            "experiment", *MODEL, "--edges", "1000", "--runs", "3",
            "--seed", "11", "--x-pair", "1,1", "--x-pair", "2,2",
            "--report-d-max", "5", "--out-dir", str(tmp_path),
        ])
        assert rc == 0
        doc = json.loads((tmp_path / "report.json").read_text())
        assert len(doc["degree_rows"]) == 6
        assert len(doc["pair_rows"]) == 2
        assert doc["theorem2"]["cells"] > 0
        out = capsys.readouterr().out
        assert "report.json" in out
        assert "theorem2 fraction" in out

    def test_json_to_stdout_without_out_dir(self, capsys):
        rc = main([
            "experiment", *MODEL, "--edges", "500", "--runs", "2",
            "--no-theorem2", "--no-theorem4",
        ])
        assert rc == 0
        out = capsys.readouterr().out
        doc = json.loads(out[out.index("{"):])
        assert doc["theorem2"] is None


class TestCompare:
    def test_table_written(self, tmp_path):
        rc = main([
            "compare", *MODEL, "--t-grid", "50,100", "--d-grid", "0,1",
            "--pair", "1,1", "--out-dir", str(tmp_path),
        ])
        assert rc == 0
        doc = json.loads((tmp_path / "compare.json").read_text())
        assert len(doc["degree_rows"]) == 4
        assert len(doc["pair_rows"]) == 2
        for row in doc["degree_rows"]:
            assert row["abs_gap"] < 0.05


class TestEntryPoint:
    def test_installed_script(self, tmp_path):
        out = subprocess.run(
            [sys.executable, "-m", "dpa.cli", "theory", *MODEL,
             "--what", "fbar", "--d", "0"],
            capture_output=True, text=True,
        )
        assert out.returncode == 0
        assert json.loads(out.stdout)["value"] == pytest.approx(1 / 6, rel=1e-9)
