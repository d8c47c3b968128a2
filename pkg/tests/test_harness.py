import json
import math

import numpy as np
import pytest

from dpa.core import ModelParams, SeedGraph
from dpa.harness import (
    RunConfig,
    check_theorem2,
    check_theorem4,
    compare_theory_vs_oracle,
    run_experiment,
    run_trajectories,
)
from dpa.theory import derive_theory, fbar


PSTAR = ModelParams(0.25, 0.5, 0.25, 1.0, 1.0)


def small_config(**over):
    base = dict(
        params=PSTAR,
        t=2000,
        runs=4,
        master_seed=7,
        x_pairs=((1, 1), (2, 2)),
        sides=("in", "out"),
        report_d_max=8,
        d_max=256,
    )
    base.update(over)
    return RunConfig(**base)


class TestDeterminism:
    def test_report_body_reproducible(self):
        a = run_experiment(small_config())
        b = run_experiment(small_config())
        assert a.to_json(include_timing=False) == b.to_json(include_timing=False)

    def test_master_seed_changes_counts(self):
        a = run_trajectories(small_config())
        b = run_trajectories(small_config(master_seed=8))
        assert not np.array_equal(a.in_counts, b.in_counts)

    def test_parallel_matches_serial(self):
        a = run_trajectories(small_config(jobs=1))
        b = run_trajectories(small_config(jobs=2))
        assert np.array_equal(a.in_counts, b.in_counts)
        assert np.array_equal(a.out_counts, b.out_counts)
        assert np.array_equal(a.x_counts, b.x_counts)


class TestConfigRoundTrip:
    def test_to_from_dict(self):
        cfg = small_config(seed_graph=SeedGraph(2, ((0, 1), (1, 0))))
        doc = cfg.to_dict()
        back = RunConfig.from_dict(json.loads(json.dumps(doc)))
        assert back == cfg

    def test_default_seed_graph_round_trips_as_none(self):
        cfg = small_config()
        assert RunConfig.from_dict(cfg.to_dict()).seed_graph is None


class TestConcentrationChecks:
    def test_exact_counts_pass(self):
        th = derive_theory(PSTAR)
        t = 10_000
        counts = fbar(np.arange(64), th) * t
        out = check_theorem2(counts, th, t)
        assert out["fraction"] == 1.0
        assert out["degrees"] > 0

    def test_gross_deviation_fails(self):
        th = derive_theory(PSTAR)
        t = 10_000
        counts = fbar(np.arange(64), th) * t + 50.0 * math.sqrt(t) * math.log(t)
        out = check_theorem2(counts, th, t)
        assert out["fraction"] == 0.0

    def test_min_mass_filters_degrees(self):
        th = derive_theory(PSTAR)
        t = 10_000
        counts = fbar(np.arange(64), th) * t
        few = check_theorem2(counts, th, t, min_mass=100.0)
        many = check_theorem2(counts, th, t, min_mass=1.0)
        assert few["degrees"] < many["degrees"]

    def test_fluctuation_envelope(self):
        t = 10_000
        rng = np.random.default_rng(3)
        tight = 500.0 + rng.normal(0.0, 5.0, size=40)
        out = check_theorem4(tight, t, 2, 2)
        assert out["max_dev_ok"] and out["std_ok"]
        wide = 500.0 + rng.normal(0.0, 5e4, size=40)
        out = check_theorem4(wide, t, 2, 2)
        assert not out["max_dev_ok"]

    def test_fluctuation_needs_runs(self):
        with pytest.raises(ValueError):
            check_theorem4(np.ones(5), 100, 1, 1)


class TestExperimentReport:
    def test_row_structure(self):
        rep = run_experiment(small_config())
        assert len(rep.degree_rows) == 2 * 9
        sides = {r["side"] for r in rep.degree_rows}
        assert sides == {"in", "out"}
        for r in rep.degree_rows:
            assert r["theory"] >= 0.0
            if r["z"] is not None:
                assert math.isfinite(r["z"])
        assert len(rep.pair_rows) == 2
        for r in rep.pair_rows:
            assert r["theory"] is not None and r["theory"] > 0.0

    def test_checks_present(self):
        rep = run_experiment(small_config(runs=12))
        assert 0.0 <= rep.theorem2["fraction"] <= 1.0
        assert len(rep.theorem4) == 2
        for row in rep.theorem4:
            assert row["runs"] == 12

    def test_theorem4_skipped_below_ten_runs(self):
        rep = run_experiment(small_config(runs=4))
        assert rep.theorem4 == []

    def test_save_and_out_dir(self, tmp_path):
        cfg = small_config(out_dir=str(tmp_path / "exp"))
        rep = run_experiment(cfg)
        path = tmp_path / "exp" / "report.json"
        assert path.exists()
        doc = json.loads(path.read_text())
        assert doc["config"] == rep.body_dict()["config"]
        assert doc["degree_rows"] == rep.body_dict()["degree_rows"]
        assert "timing" in doc

    def test_validation(self):
        with pytest.raises(ValueError):
            run_trajectories(small_config(runs=0))
        with pytest.raises(ValueError):
            run_trajectories(
                small_config(t=1, seed_graph=SeedGraph(2, ((0, 1), (1, 0))))
            )


class TestOracleComparison:
    def test_gaps_shrink_like_one_over_T(self):
        out = compare_theory_vs_oracle(
            PSTAR, T_grid=(100, 200, 400), d_grid=(0, 1, 2),
            pairs=((1, 1), (2, 2)),
        )
        by_d = {}
        for r in out["degree_rows"]:
            by_d.setdefault(r["d"], []).append(r["abs_gap"])
        for gaps in by_d.values():
            assert gaps[1] < 0.6 * gaps[0]
            assert gaps[2] < 0.6 * gaps[1]
            assert gaps[2] < 5e-4
        by_pair = {}
        for r in out["pair_rows"]:
            by_pair.setdefault((r["d1"], r["d2"]), []).append(r["abs_gap"])
        for gaps in by_pair.values():
            assert gaps[1] < 0.6 * gaps[0]
            assert gaps[2] < 0.6 * gaps[1]
            assert gaps[2] < 2e-4
