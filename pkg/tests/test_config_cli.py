import json

import numpy as np
import pytest

from levyharm import ConfigError, RunConfig
from levyharm.cli import main

BASE = {
    "model": {
        "measure": {"kind": "gamma", "nu": 1.5},
        "freq": {"kind": "uniform", "a": 0.0, "b": 1.0},
        "sigma0": 1.7320508075688772,
    },
    "generation": {"method": "inverse_levy", "seed": 7, "level": 6.33},
    "grid": {"t0": 0.0, "dt": 0.05, "n": 2000},
    "analysis": {"taus": [0.0, 1.0], "n_real": 40},
}


def write_config(tmp_path, doc, name="config.json"):
    fn = tmp_path / name
    fn.write_text(json.dumps(doc))
    return str(fn)


def patch(doc, path, value):
    doc = json.loads(json.dumps(doc))
    node = doc
    keys = path.split(".")
    for k in keys[:-1]:
        node = node[k]
    node[keys[-1]] = value
    return doc


class TestRunConfig:
    def test_roundtrip_identity(self):
        cfg = RunConfig.from_dict(BASE)
        again = RunConfig.from_dict(cfg.to_dict())
        assert again.to_dict() == cfg.to_dict()

    def test_builders(self):
        cfg = RunConfig.from_dict(BASE)
        measure = cfg.build_measure()
        spectrum = cfg.build_spectrum()
        assert measure.nu == 1.5
        assert spectrum.total_mass == pytest.approx(1.5)

    @pytest.mark.parametrize(
        "path,value,fragment",
        [
            ("model.sigma0", -1.0, "model.sigma0"),
            ("model.measure", {"kind": "nope"}, "model.measure"),
            ("generation.method", "bogus", "generation.method"),
            ("generation.level", -3.0, "generation.level"),
            ("grid.dt", 0.0, "grid.dt"),
            ("analysis.n_real", 0, "analysis.n_real"),
        ],
    )
    def test_field_path_in_errors(self, path, value, fragment):
        with pytest.raises(ConfigError, match=fragment.replace(".", r"\.")):
            RunConfig.from_dict(patch(BASE, path, value))

    def test_conditioned_requires_terms_and_level(self):
        doc = patch(BASE, "generation.method", "conditioned")
        with pytest.raises(ConfigError, match="n_terms"):
            RunConfig.from_dict(doc)

    def test_missing_block(self):
        doc = {k: v for k, v in BASE.items() if k != "model"}
        with pytest.raises(ConfigError, match="model"):
            RunConfig.from_dict(doc)


class TestSimulate:
    def test_deterministic_bytes(self, tmp_path, capsys):
        cfg_fn = write_config(tmp_path, BASE)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["--config", cfg_fn, "--out", str(out_a), "simulate"]) == 0
        assert main(["--config", cfg_fn, "--out", str(out_b), "simulate"]) == 0
        for name in ("path.csv", "path.bin", "expansion.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_grid_span_and_rows(self, tmp_path):
        cfg_fn = write_config(tmp_path, BASE)
        out = tmp_path / "o"
        main(["--config", cfg_fn, "--out", str(out), "simulate"])
        rows = (out / "path.csv").read_text().strip().split("\n")
        assert len(rows) == 2001  # header + 2000 samples
        assert rows[1].split(",")[0] == "0"
        assert float(rows[-1].split(",")[0]) == pytest.approx(99.95)

    def test_conditioned_term_count(self, tmp_path):
        doc = patch(BASE, "generation.method", "conditioned")
        doc = patch(doc, "generation.n_terms", 8)
        cfg_fn = write_config(tmp_path, doc)
        out = tmp_path / "o"
        main(["--config", cfg_fn, "--out", str(out), "simulate"])
        exp = json.loads((out / "expansion.json").read_text())
        assert len(exp["terms"]) == 8

    def test_seed_override_changes_output(self, tmp_path):
        cfg_fn = write_config(tmp_path, BASE)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["--config", cfg_fn, "--out", str(out_a), "simulate"])
        main(["--config", cfg_fn, "--seed", "8", "--out", str(out_b), "simulate"])
        assert (out_a / "path.csv").read_bytes() != (out_b / "path.csv").read_bytes()


class TestTheory:
    def test_cf_table(self, tmp_path):
        cfg_fn = write_config(tmp_path, BASE)
        out = tmp_path / "o"
        assert main(["--config", cfg_fn, "--out", str(out), "theory", "--what", "cf"]) == 0
        rows = (out / "theory_cf.csv").read_text().strip().split("\n")
        assert rows[0] == "u,value"
        data = np.array([list(map(float, r.split(","))) for r in rows[1:]])
        mid = data[np.isclose(data[:, 0], 0.0)]
        assert mid[0, 1] == pytest.approx(1.0)
        # gamma model: the emitted CF is the closed Laplace-type form
        expect = (1.0 + 1.5 * data[:, 0] ** 2) ** (-1.0)
        assert np.max(np.abs(data[:, 1] - expect)) < 1e-6

    def test_acov_table(self, tmp_path):
        cfg_fn = write_config(tmp_path, BASE)
        out = tmp_path / "o"
        main(["--config", cfg_fn, "--out", str(out), "theory", "--what", "acov"])
        rows = (out / "theory_acov.csv").read_text().strip().split("\n")
        data = np.array([list(map(float, r.split(","))) for r in rows[1:]])
        assert data[0, 0] == 0.0
        assert data[0, 1] == pytest.approx(3.0, rel=1e-9)  # sigma0^2

    def test_density_table(self, tmp_path):
        cfg_fn = write_config(tmp_path, BASE)
        out = tmp_path / "o"
        main(["--config", cfg_fn, "--out", str(out), "theory", "--what", "density"])
        rows = (out / "theory_density.csv").read_text().strip().split("\n")
        data = np.array([list(map(float, r.split(","))) for r in rows[1:]])
        s = np.sqrt(1.5)
        assert np.max(np.abs(data[:, 1] - np.exp(-np.abs(data[:, 0]) / s) / (2 * s))) < 5e-4


class TestErgodic:
    def test_single_harmonic_reproduces_half_cos(self, tmp_path):
        doc = patch(BASE, "model.freq", {"kind": "atoms", "points": [[1.0, 1.0]]})
        doc = patch(doc, "generation.method", "discrete")
        doc = patch(doc, "grid.n", 20001)
        doc = patch(doc, "analysis.n_real", 10)
        cfg_fn = write_config(tmp_path, doc)
        out = tmp_path / "o"
        assert main(["--config", cfg_fn, "--out", str(out), "--jobs", "1", "ergodic"]) == 0
        report = json.loads((out / "ergodic_report.json").read_text())
        # every realization's time average sits near its own xi^2/2*cos(tau)
        assert max(report["abs_error_mean"]) < 0.02
        rows = (out / "ergodic_tau.csv").read_text().strip().split("\n")
        assert rows[0] == "tau,time_avg,random_limit,abs_err"

    def test_jobs_do_not_change_results(self, tmp_path):
        doc = patch(BASE, "grid.n", 4001)
        doc = patch(doc, "analysis.n_real", 12)
        cfg_fn = write_config(tmp_path, doc)
        out1, out2 = tmp_path / "j1", tmp_path / "j2"
        assert main(["--config", cfg_fn, "--out", str(out1), "--jobs", "1", "ergodic"]) == 0
        assert main(["--config", cfg_fn, "--out", str(out2), "--jobs", "2", "ergodic"]) == 0
        assert (out1 / "ergodic_report.json").read_bytes() == (out2 / "ergodic_report.json").read_bytes()

    def test_lag_beyond_half_horizon_rejected(self, tmp_path):
        doc = patch(BASE, "grid.n", 30)
        cfg_fn = write_config(tmp_path, doc)
        assert main(["--config", cfg_fn, "--out", str(tmp_path / "o"), "ergodic"]) == 2

    def test_zero_signal_gives_all_zero_report(self, tmp_path):
        # a truncation level below every first arrival leaves empty
        # expansions, hence identically zero paths and limits
        doc = patch(BASE, "generation.level", 1e-9)
        doc = patch(doc, "grid.n", 2001)
        doc = patch(doc, "analysis.n_real", 5)
        cfg_fn = write_config(tmp_path, doc)
        out = tmp_path / "o"
        assert main(["--config", cfg_fn, "--out", str(out), "ergodic"]) == 0
        report = json.loads((out / "ergodic_report.json").read_text())
        assert report["random_limit"]["mean"] == [0.0, 0.0]
        assert report["time_avg_acov"]["mean"] == [0.0, 0.0]
        assert report["abs_error_mean"] == [0.0, 0.0]


class TestFigures:
    def test_histogram_masses_sum_to_one(self, tmp_path):
        doc = patch(BASE, "analysis.pool", 10)
        cfg_fn = write_config(tmp_path, doc)
        out = tmp_path / "o"
        assert main(["--config", cfg_fn, "--out", str(out), "figures"]) == 0
        for name in ("figure_hist_single.csv", "figure_hist_pooled.csv"):
            rows = (out / name).read_text().strip().split("\n")[1:]
            mass = sum(float(r.split(",")[2]) for r in rows)
            assert mass == pytest.approx(1.0, abs=1e-12)
        stats = json.loads((out / "figures_stats.json").read_text())
        assert stats["pooled"]["n_samples"] == 10 * 2000


class TestCheckMeasure:
    def test_reports_flags(self, tmp_path, capsys):
        cfg_fn = write_config(tmp_path, BASE)
        assert main(["--config", cfg_fn, "--out", str(tmp_path / "o"), "check-measure"]) == 0
        doc = json.loads((tmp_path / "o" / "measure_report.json").read_text())
        assert doc["mean_is_unit"] is True
        assert doc["unit_tail_mean"] == pytest.approx(np.exp(-1 / 1.5), rel=1e-6)


class TestExitCodes:
    def test_config_error_is_2(self, tmp_path, capsys):
        cfg_fn = write_config(tmp_path, patch(BASE, "model.sigma0", -1.0))
        assert main(["--config", cfg_fn, "--out", str(tmp_path / "o"), "simulate"]) == 2

    def test_invalid_json_is_2(self, tmp_path):
        fn = tmp_path / "bad.json"
        fn.write_text("{not json")
        assert main(["--config", str(fn), "--out", str(tmp_path / "o"), "simulate"]) == 2

    def test_io_error_is_4(self, tmp_path):
        cfg_fn = write_config(tmp_path, BASE)
        blocker = tmp_path / "blocked"
        blocker.write_text("a file, not a directory")
        assert main(["--config", cfg_fn, "--out", str(blocker), "simulate"]) == 4
