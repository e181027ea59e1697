"""Tests for config validation, report output, and the CLI front end."""

import json
import os

import pytest

from spvlab.cli import (GRID_SCALES, SCENARIOS, SCHEMA_VERSION, ConfigError,
                        ExperimentReport, Verdict, load_config, main, run)

pytestmark = pytest.mark.filterwarnings("ignore::RuntimeWarning")


def _write(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestLoadConfig:
    def test_defaults(self):
        cfg = load_config("verify-lemmas")
        assert cfg.scenario == "verify-lemmas"
        assert cfg.radial_n == GRID_SCALES["desk"]["radial_n"]
        assert cfg.cube_n == GRID_SCALES["desk"]["cube_n"]
        assert cfg.seed == 0
        assert cfg.profile is None and cfg.lam is None

    def test_fine_scale(self):
        cfg = load_config("verify-lemmas", grid_scale="fine")
        assert cfg.radial_n == 8192
        assert cfg.cube_n == 160

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError):
            load_config("does-not-exist")

    def test_unknown_grid_scale(self):
        with pytest.raises(ConfigError):
            load_config("verify-lemmas", grid_scale="huge")

    def test_full_document(self, tmp_path):
        path = _write(tmp_path, {
            "schema": SCHEMA_VERSION,
            "scenario": "autonomous",
            "model": {"kind": "pure-power", "q": 2.5, "a_q": 1.0, "p": 2.5},
            "profile": {"kind": "rational", "rho0": 0.05, "rho_inf": 2.0,
                        "eps": 0.5},
            "lambda": 0.003,
            "radial_grid": {"r_max": 10.0, "n": 1024},
            "cube_grid": {"L": 10.0, "n": 64},
            "solver": {"tol_grad": 1e-4, "max_iter": 500},
            "seed": 7,
        })
        cfg = load_config("autonomous", config_path=path)
        assert cfg.lam == 0.003
        assert cfg.radial_r_max == 10.0
        assert cfg.radial_n == 1024
        assert cfg.seed == 7
        assert cfg.profile is not None

    def test_schema_mismatch(self, tmp_path):
        path = _write(tmp_path, {"schema": 99, "scenario": "autonomous"})
        with pytest.raises(ConfigError):
            load_config("autonomous", config_path=path)

    def test_scenario_mismatch(self, tmp_path):
        path = _write(tmp_path, {"schema": SCHEMA_VERSION,
                                 "scenario": "multibump"})
        with pytest.raises(ConfigError):
            load_config("autonomous", config_path=path)

    @pytest.mark.parametrize("doc", [
        {"schema": SCHEMA_VERSION, "mystery": 1},
        {"schema": SCHEMA_VERSION, "model": {"kind": "pure-power",
                                             "color": "red"}},
        {"schema": SCHEMA_VERSION, "profile": {"kind": "constant",
                                               "value": 1.0, "hue": 2}},
        {"schema": SCHEMA_VERSION, "radial_grid": {"r_max": 12.0,
                                                   "spacing": 0.1}},
        {"schema": SCHEMA_VERSION, "cube_grid": {"n": 64, "shape": "box"}},
        {"schema": SCHEMA_VERSION, "solver": {"tol_grad": 1e-5,
                                              "momentum": 0.9}},
        {"schema": SCHEMA_VERSION, "options": {"R0": 3.5, "verbose": True}},
    ])
    def test_unknown_keys_rejected_everywhere(self, tmp_path, doc):
        path = _write(tmp_path, doc)
        with pytest.raises(ConfigError):
            load_config("verify-lemmas", config_path=path)

    def test_flag_overrides(self, tmp_path):
        path = _write(tmp_path, {"schema": SCHEMA_VERSION, "seed": 3,
                                 "out_dir": "somewhere"})
        cfg = load_config("verify-lemmas", config_path=path,
                          out_dir=str(tmp_path / "out"), seed=11)
        assert cfg.seed == 11
        assert cfg.out_dir == str(tmp_path / "out")

    def test_symmetry_breaking_gets_roomier_default_box(self):
        cfg = load_config("symmetry-breaking")
        assert cfg.radial_r_max == 18.0
        assert cfg.cube_L == 18.0
        assert load_config("autonomous").cube_L == 12.0


class TestReport:
    def test_json_is_deterministic_and_excludes_runtime(self):
        rep = ExperimentReport(
            scenario="verify-lemmas", inputs={"seed": 0},
            quantities={"d0": 0.9}, verdicts=[Verdict("check", True, "ok")],
            runtime_seconds=1.23, artifacts=["report.json"])
        text = rep.to_json()
        doc = json.loads(text)
        assert doc["schema"] == SCHEMA_VERSION
        assert "runtime" not in text and "1.23" not in text
        rep2 = ExperimentReport(
            scenario="verify-lemmas", inputs={"seed": 0},
            quantities={"d0": 0.9}, verdicts=[Verdict("check", True, "ok")],
            runtime_seconds=9.99, artifacts=["report.json"])
        assert rep2.to_json() == text

    def test_all_passed(self):
        rep = ExperimentReport("x", {}, {}, [Verdict("a", True, ""),
                                            Verdict("b", False, "")],
                               0.0, [])
        assert not rep.all_passed


class TestRunAndMain:
    def test_verify_lemmas_run(self, tmp_path):
        cfg = load_config("verify-lemmas", out_dir=str(tmp_path / "out"))
        report = run(cfg)
        assert report.all_passed
        names = {v.name for v in report.verdicts}
        assert "threshold-bracket-double-root" in names
        out = tmp_path / "out"
        assert (out / "report.json").exists()
        assert (out / "meta.json").exists()
        meta = json.loads((out / "meta.json").read_text())
        assert meta["runtime_seconds"] > 0.0
        doc = json.loads((out / "report.json").read_text())
        assert doc["scenario"] == "verify-lemmas"
        assert all(v["passed"] for v in doc["verdicts"])

    def test_reports_byte_identical_across_serial_runs(self, tmp_path):
        a = run(load_config("verify-lemmas", out_dir=str(tmp_path / "a"),
                            seed=5, serial=True))
        b = run(load_config("verify-lemmas", out_dir=str(tmp_path / "b"),
                            seed=5, serial=True))
        ja = (tmp_path / "a" / "report.json").read_bytes()
        jb = (tmp_path / "b" / "report.json").read_bytes()
        assert ja == jb
        assert a.to_json() == b.to_json()

    def test_main_exit_codes(self, tmp_path, capsys):
        code = main(["verify-lemmas", "--out", str(tmp_path / "out")])
        assert code == 0
        out = capsys.readouterr().out
        assert "[PASS]" in out

    def test_main_rejects_bad_config(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"schema": 99}))
        code = main(["verify-lemmas", "--config", str(bad),
                     "--out", str(tmp_path / "out")])
        assert code == 2

    def test_main_reports_failing_verdicts(self, tmp_path, monkeypatch,
                                            capsys):
        import spvlab.cli as cli

        def fake_run(cfg):
            return ExperimentReport(
                scenario=cfg.scenario, inputs={}, quantities={},
                verdicts=[Verdict("doomed-check", False, "nope")],
                runtime_seconds=0.0, artifacts=[])

        monkeypatch.setattr(cli, "run", fake_run)
        code = cli.main(["verify-lemmas", "--out", str(tmp_path / "out")])
        assert code == 1
        assert "[FAIL] doomed-check" in capsys.readouterr().out

    def test_main_lists_scenarios(self):
        for scenario in SCENARIOS:
            assert isinstance(scenario, str)
        with pytest.raises(SystemExit):
            main(["not-a-scenario"])
