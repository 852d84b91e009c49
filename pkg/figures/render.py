"""Render a figure recipe from run artifacts.

Usage:
    python figures/render.py --recipe <name> --data <run dir> --out <dir>
    python figures/render.py --list

Renders are deterministic: a fixed style, no timestamps, and inputs read
verbatim from the CSV/JSON artifacts, so re-rendering the same data is
byte-stable.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

sys.path.insert(0, str(Path(__file__).resolve().parent))
from recipes import RECIPES, FigureRecipe  # noqa: E402

STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 130,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.25,
    "lines.linewidth": 1.2,
    "savefig.dpi": 130,
}

_LM_RE = re.compile(r"_L(\d+)_([A-Za-z0-9]+)\.")


class MissingInputError(FileNotFoundError):
    pass


def read_csv_columns(path: Path) -> dict[str, list[float]]:
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols: dict[str, list[float]] = {name: [] for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                cols[name].append(float(cell))
    return cols


def resolve_inputs(recipe: FigureRecipe, data_dir: Path) -> dict[str, list[Path]]:
    resolved = {}
    for role, pattern in recipe.inputs.items():
        matches = sorted(data_dir.glob(pattern))
        if not matches:
            raise MissingInputError(
                f"recipe {recipe.name!r}: no file matches {pattern!r} in {data_dir}")
        resolved[role] = matches
    return resolved


def series_label(path: Path) -> str:
    m = _LM_RE.search(path.name)
    if m:
        return f"L={int(m.group(1))} {m.group(2)}"
    return path.stem


def _plot_xy_files(ax, files, xcol, ycol):
    for path in files:
        cols = read_csv_columns(path)
        ax.plot(cols[xcol], cols[ycol], label=series_label(path))


def render(recipe: FigureRecipe, data_dir: Path, out_dir: Path) -> Path:
    inputs = resolve_inputs(recipe, data_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        if recipe.name == "coefficients_overlay":
            _plot_xy_files(ax, inputs["coefficients"], "n", "b_n")
        elif recipe.name == "cumprod_fit":
            for path in inputs["cumprod"]:
                cols = read_csv_columns(path)
                line, = ax.plot(cols["n"], cols["F"], label=series_label(path))
                fit_path = data_dir / path.name.replace("cumprod", "fit").replace(".csv", ".json")
                if fit_path.exists():
                    fit = json.loads(fit_path.read_text())
                    ns = cols["n"]
                    ys = [fit["a1"] * _exp(-fit["c1"] * n) + fit["a2"] * _exp(-fit["c2"] * n)
                          for n in ns]
                    ax.plot(ns, ys, "--", color="black", linewidth=0.9)
        elif recipe.name == "collapse":
            _plot_xy_files(ax, inputs["collapse"], "n", "value")
        elif recipe.name == "autocorrelation_methods":
            largest = _largest_size(inputs["autocorrelation"])
            for path in largest:
                cols = read_csv_columns(path)
                ax.plot(cols["t"], cols["re_C"], label=series_label(path))
        elif recipe.name == "spectral_density_overlay":
            _plot_xy_files(ax, inputs["spectral_density"], "omega", "phi")
        elif recipe.name == "plateau_scaling":
            _plot_plateaus(ax, inputs["manifest"][0], recipe)
        else:
            raise ValueError(f"recipe {recipe.name!r} has no renderer")
        ax.set_xlabel(recipe.xlabel)
        ax.set_ylabel(recipe.ylabel)
        ax.set_xscale(recipe.xscale)
        ax.set_yscale(recipe.yscale)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize=7)
        out_path = out_dir / recipe.output
        fig.savefig(out_path, metadata={"Software": "figures/render.py"})
        plt.close(fig)
    return out_path


def _exp(x: float) -> float:
    import math
    return math.exp(max(min(x, 700.0), -700.0))


def _largest_size(files):
    by_size: dict[int, list[Path]] = {}
    for path in files:
        m = _LM_RE.search(path.name)
        size = int(m.group(1)) if m else 0
        by_size.setdefault(size, []).append(path)
    return by_size[max(by_size)]


def _plot_plateaus(ax, manifest_path: Path, recipe: FigureRecipe):
    manifest = json.loads(Path(manifest_path).read_text())
    plateaus = manifest.get("plateaus", {})
    if not plateaus:
        raise MissingInputError(f"{manifest_path} contains no plateau values")
    by_method: dict[str, list[tuple[int, float]]] = {}
    for key, values in plateaus.items():
        m = re.fullmatch(r"L(\d+)_([A-Za-z0-9]+)", key)
        if not m:
            continue
        L, method = int(m.group(1)), m.group(2)
        value = values.get("value", values.get("strict"))
        if value is not None and value > 0:
            by_method.setdefault(method, []).append((L, value))
    for method in sorted(by_method):
        pts = sorted(by_method[method])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-", label=method)
    sizes = sorted({p[0] for pts in by_method.values() for p in pts})
    if sizes:
        anchor_vals = [p[1] for pts in by_method.values() for p in pts]
        anchor = max(anchor_vals)
        for ref in recipe.reference_lines:
            ys = [anchor * (L / sizes[0]) ** ref.exponent for L in sizes]
            ax.plot(sizes, ys, ref.style, color="grey", label=ref.label)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Render figure recipes from run artifacts")
    parser.add_argument("--recipe", help="recipe name, or 'all'")
    parser.add_argument("--data", type=Path, help="run output directory")
    parser.add_argument("--out", type=Path, help="image output directory")
    parser.add_argument("--list", action="store_true", help="list available recipes")
    args = parser.parse_args(argv)
    if args.list:
        for name, recipe in sorted(RECIPES.items()):
            print(f"{name:28s} {recipe.description}")
        return 0
    if not (args.recipe and args.data and args.out):
        parser.error("--recipe, --data and --out are required unless --list is given")
    names = sorted(RECIPES) if args.recipe == "all" else [args.recipe]
    try:
        for name in names:
            if name not in RECIPES:
                raise KeyError(f"unknown recipe {name!r}; use --list")
            path = render(RECIPES[name], args.data, args.out)
            print(path)
    except MissingInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
