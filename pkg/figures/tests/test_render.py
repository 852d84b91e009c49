"""Figure regeneration from a real pipeline run, via external interfaces only.

The fixtures drive the primary package exclusively through its CLI and the
files it emits; nothing from lanczos_plateau is imported here.
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

FIGURES_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(FIGURES_DIR))

from recipes import RECIPES  # noqa: E402
from render import MissingInputError, render, main  # noqa: E402


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    """A completed `all` run of the primary CLI on a small grid."""
    root = tmp_path_factory.mktemp("run")
    out = root / "out"
    config = {
        "model": {"name": "ising", "params": {"J": 1.0, "h_x": 1.0, "h_z": 1.5},
                  "boundary": "periodic"},
        "observable": "sigma_z_1",
        "sizes": [4, 5],
        "methods": ["SA", "FO", "ED"],
        "n_max": 60,
        "times": {"start": 0.0, "stop": 20.0, "num": 101},
        "output_dir": str(out),
    }
    cfg = root / "config.json"
    cfg.write_text(json.dumps(config))
    proc = subprocess.run(
        [sys.executable, "-m", "lanczos_plateau", "all", "--config", str(cfg)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out


class TestRender:
    def test_all_recipes_render(self, run_dir, tmp_path):
        for name, recipe in sorted(RECIPES.items()):
            out_path = render(recipe, run_dir, tmp_path)
            assert out_path.exists() and out_path.stat().st_size > 0

    def test_rerender_byte_stable(self, run_dir, tmp_path):
        for name in ("coefficients_overlay", "cumprod_fit", "plateau_scaling"):
            first = render(RECIPES[name], run_dir, tmp_path / "a")
            second = render(RECIPES[name], run_dir, tmp_path / "b")
            assert first.read_bytes() == second.read_bytes()

    def test_missing_series_lists_absent_file(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        with pytest.raises(MissingInputError, match="coefficients_L"):
            render(RECIPES["coefficients_overlay"], empty, tmp_path / "out")

    def test_cli_all(self, run_dir, tmp_path):
        rc = main(["--recipe", "all", "--data", str(run_dir), "--out", str(tmp_path)])
        assert rc == 0
        for recipe in RECIPES.values():
            assert (tmp_path / recipe.output).exists()

    def test_cli_missing_input_exit_code(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        rc = main(["--recipe", "collapse", "--data", str(empty), "--out", str(tmp_path)])
        assert rc == 1

    def test_cli_unknown_recipe(self, tmp_path):
        rc = main(["--recipe", "nope", "--data", str(tmp_path), "--out", str(tmp_path)])
        assert rc == 2

    def test_list(self, capsys):
        assert main(["--list"]) == 0
        out = capsys.readouterr().out
        assert "coefficients_overlay" in out
