"""Configuration handling, artifact schemas, CLI subcommands, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from lanczos_plateau import artifacts as art
from lanczos_plateau.cli import main
from lanczos_plateau.config import ConfigError, RunConfig, apply_override


def base_config(out_dir, sizes=(3, 4), methods=("SA", "FO", "ED"), n_max=40):
    return {
        "schema_version": 1,
        "label": "test",
        "model": {"name": "ising", "params": {"J": 1.0, "h_x": 1.0, "h_z": 1.5},
                  "boundary": "periodic"},
        "observable": "sigma_z_1",
        "sizes": list(sizes),
        "methods": list(methods),
        "n_max": n_max,
        "times": {"start": 0.0, "stop": 10.0, "num": 51},
        "output_dir": str(out_dir),
    }


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


class TestConfig:
    def test_roundtrip(self, tmp_path):
        cfg = RunConfig.from_dict(base_config(tmp_path))
        again = RunConfig.from_json(cfg.to_json())
        assert again == cfg

    def test_unknown_model(self, tmp_path):
        raw = base_config(tmp_path)
        raw["model"]["name"] = "heisenberg"
        with pytest.raises(ConfigError, match="model.name"):
            RunConfig.from_dict(raw)

    def test_empty_sizes(self, tmp_path):
        raw = base_config(tmp_path)
        raw["sizes"] = []
        with pytest.raises(ConfigError, match="sizes"):
            RunConfig.from_dict(raw)

    def test_bad_method(self, tmp_path):
        raw = base_config(tmp_path)
        raw["methods"] = ["SA", "QMC"]
        with pytest.raises(ConfigError, match=r"methods\[1\]"):
            RunConfig.from_dict(raw)

    def test_explicit_pauli_sum(self, tmp_path):
        raw = base_config(tmp_path)
        raw["observable"] = {"terms": [["Z", 0.6, 0.0], ["X", 0.8, 0.0]], "label": "mix"}
        cfg = RunConfig.from_dict(raw)
        obs = cfg.build_observable(4)
        assert obs.seed.norm() == pytest.approx(1.0)

    def test_override(self, tmp_path):
        raw = base_config(tmp_path)
        apply_override(raw, "model.params.J=2.0")
        apply_override(raw, "sizes=[4]")
        apply_override(raw, "label=quick")
        cfg = RunConfig.from_dict(raw)
        assert cfg.model["params"]["J"] == 2.0
        assert cfg.sizes == [4]
        assert cfg.label == "quick"


class TestArtifacts:
    def test_float_roundtrip_exact(self):
        rng = np.random.default_rng(0)
        for x in rng.standard_normal(200):
            assert float(art.format_float(float(x))) == float(x)

    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "x.csv"
        art.write_csv(path, ["a", "b"], [(1.0, 0.1), (2.0, np.pi)])
        cols = art.read_csv(path)
        np.testing.assert_array_equal(cols["a"], [1.0, 2.0])
        assert cols["b"][1] == np.pi


class TestCommands:
    def test_all_pipeline(self, tmp_path):
        out = tmp_path / "out"
        cfg_path = write_config(tmp_path, base_config(out))
        rc = main(["all", "--config", str(cfg_path)])
        assert rc == 0
        names = {p.name for p in out.iterdir()}
        for L in (3, 4):
            for meth in ("SA", "FO"):
                assert f"coefficients_L{L:02d}_{meth}.csv" in names
                assert f"autocorrelation_L{L:02d}_{meth}.csv" in names
                assert f"rates_L{L:02d}_{meth}.csv" in names
                assert f"cumprod_L{L:02d}_{meth}.csv" in names
                assert f"collapse_L{L:02d}_{meth}.csv" in names
            assert f"autocorrelation_L{L:02d}_ED.csv" in names
        assert "compare.json" in names
        assert art.MANIFEST_NAME in names
        # manifest lists every output with a correct checksum
        manifest = json.loads((out / art.MANIFEST_NAME).read_text())
        for fname, digest in manifest["outputs"].items():
            assert art.sha256_file(out / fname) == digest
        listed = set(manifest["outputs"])
        produced = names - {art.MANIFEST_NAME}
        assert produced <= listed | {art.MANIFEST_NAME}
        # plateaus recorded for every (L, method)
        assert "L03_ED" in manifest["plateaus"]
        assert "strict" in manifest["plateaus"]["L03_FO"]

    def test_compare_small_deviations_at_exhaustion(self, tmp_path, capsys):
        out = tmp_path / "out"
        raw = base_config(out, sizes=(3,), n_max=200)
        raw["thresholds"] = {"termination": 1e-6}
        cfg_path = write_config(tmp_path, raw)
        assert main(["all", "--config", str(cfg_path)]) == 0
        report = json.loads((out / "compare.json").read_text())
        # at exhaustion all three routes agree
        assert report["L03"]["FO_vs_SA"] < 1e-8
        assert report["L03"]["ED_vs_FO"] < 1e-8

    def test_time_grid_single_zero(self, tmp_path):
        out = tmp_path / "out"
        raw = base_config(out, sizes=(3,), n_max=30)
        raw["times"] = {"start": 0.0, "stop": 0.0, "num": 1}
        cfg_path = write_config(tmp_path, raw)
        assert main(["autocorrelation", "--config", str(cfg_path)]) == 0
        for meth in ("SA", "FO", "ED"):
            cols = art.read_csv(out / art.autocorrelation_name(3, meth))
            assert cols["re_C"][0] == pytest.approx(1.0, abs=1e-10)

    def test_terminated_flag_in_file(self, tmp_path):
        out = tmp_path / "out"
        raw = base_config(out, sizes=(2,), methods=("FO",), n_max=100)
        raw["thresholds"] = {"termination": 1e-6}
        cfg_path = write_config(tmp_path, raw)
        assert main(["coefficients", "--config", str(cfg_path)]) == 0
        b, drift, terminated = art.read_coefficients(out / art.coefficients_name(2, "FO"))
        assert terminated and len(b) <= 15

    def test_analyze_requires_coefficients(self, tmp_path, capsys):
        out = tmp_path / "out"
        cfg_path = write_config(tmp_path, base_config(out, sizes=(3,)))
        rc = main(["analyze", "--config", str(cfg_path)])
        err = capsys.readouterr().err
        assert rc == 1
        payload = json.loads(err.strip())
        assert "missing input" in payload["message"]

    def test_ed_above_cap_errors(self, tmp_path, capsys):
        out = tmp_path / "out"
        raw = base_config(out, sizes=(4,), methods=("ED",), n_max=10)
        raw["dense_cap"] = 3
        cfg_path = write_config(tmp_path, raw)
        rc = main(["autocorrelation", "--config", str(cfg_path)])
        assert rc == 1
        payload = json.loads(capsys.readouterr().err.strip())
        assert "dense cap" in payload["message"]

    def test_validation_error_json(self, tmp_path, capsys):
        cfg_path = write_config(tmp_path, {"model": {"name": "nope"}})
        rc = main(["coefficients", "--config", str(cfg_path)])
        assert rc == 2
        payload = json.loads(capsys.readouterr().err.strip())
        assert payload["error"] == "ConfigError"
        assert payload["field"] == "model.name"

    def test_determinism_and_worker_independence(self, tmp_path):
        raws = []
        for tag, workers in (("a", 1), ("b", 1), ("c", 2)):
            out = tmp_path / tag
            raw = base_config(out, sizes=(3, 4), methods=("SA", "FO"), n_max=25)
            raw["workers"] = workers
            cfg_path = write_config(tmp_path, raw, name=f"cfg_{tag}.json")
            assert main(["coefficients", "--config", str(cfg_path)]) == 0
            raws.append(out)
        ref_names = sorted(p.name for p in raws[0].iterdir())
        for other in raws[1:]:
            assert sorted(p.name for p in other.iterdir()) == ref_names
            for name in ref_names:
                if name == art.MANIFEST_NAME:
                    continue   # manifest embeds output_dir, which differs by design
                assert (raws[0] / name).read_bytes() == (other / name).read_bytes()

    def test_commuting_seed_pipeline(self, tmp_path):
        # h=0 edge-mode chain: [H, X_1] = 0, empty b; the pipeline must
        # degrade gracefully (header-only coefficients, notes in manifest)
        out = tmp_path / "out"
        raw = base_config(out, sizes=(4,), methods=("SA",), n_max=20)
        raw["model"] = {"name": "edge_mode_tfim", "params": {"J": 1.0, "h": 0.0},
                        "boundary": "open"}
        raw["observable"] = "sigma_x_1"
        cfg_path = write_config(tmp_path, raw)
        assert main(["all", "--config", str(cfg_path)]) == 0
        b, _, _ = art.read_coefficients(out / art.coefficients_name(4, "SA"))
        assert len(b) == 0
        manifest = json.loads((out / art.MANIFEST_NAME).read_text())
        assert any("analyze" in k or "L04" in k for k in manifest["notes"])

    def test_console_entry_point(self, tmp_path):
        out = tmp_path / "out"
        cfg_path = write_config(tmp_path, base_config(out, sizes=(2,), methods=("SA",),
                                                      n_max=10))
        proc = subprocess.run([sys.executable, "-m", "lanczos_plateau", "coefficients",
                               "--config", str(cfg_path)],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert (out / art.coefficients_name(2, "SA")).exists()
