"""Declarative figure recipes over the run-artifact CSV/JSON files.

Each recipe names its input file globs and the visual layout; render.py
turns a recipe plus a data directory into an image.  Recipes never
recompute physics: every plotted column (log F, collapse rescaling, ...)
already exists in the artifact files.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ReferenceLine:
    """Power-law guide line y = amplitude * x^exponent."""

    exponent: float
    amplitude: float = 1.0
    label: str = ""
    style: str = "--"


@dataclass(frozen=True)
class FigureRecipe:
    name: str
    description: str
    inputs: dict[str, str]              # role -> filename glob (relative to data dir)
    xlabel: str
    ylabel: str
    xscale: str = "linear"              # "linear" | "log"
    yscale: str = "linear"
    reference_lines: tuple[ReferenceLine, ...] = ()
    output_name: str = ""               # defaults to f"{name}.png"

    @property
    def output(self) -> str:
        return self.output_name or f"{self.name}.png"


RECIPES: dict[str, FigureRecipe] = {}


def _register(recipe: FigureRecipe) -> FigureRecipe:
    RECIPES[recipe.name] = recipe
    return recipe


# Lanczos coefficients for several sizes: growth then size-dependent plateau.
coefficients_overlay = _register(FigureRecipe(
    name="coefficients_overlay",
    description="b_n vs n, one curve per system size",
    inputs={"coefficients": "coefficients_L*_*.csv"},
    xlabel="n",
    ylabel="b_n",
))

# Cumulative products beyond the crossover with bi-exponential fit overlays.
cumprod_fit = _register(FigureRecipe(
    name="cumprod_fit",
    description="F(n) on a log axis with fitted bi-exponential dashed overlays",
    inputs={"cumprod": "cumprod_L*_*.csv", "fit": "fit_L*_*.json"},
    xlabel="n",
    ylabel="F(n)",
    yscale="log",
))

# Scaling collapse of -log F(n) * L^(m+1) / n.
collapse = _register(FigureRecipe(
    name="collapse",
    description="collapse curves for all sizes",
    inputs={"collapse": "collapse_L*_*.csv"},
    xlabel="n",
    ylabel="-log F(n) * L^(m d + 1) / n",
))

# Method overlay of the autocorrelation (largest available size).
autocorrelation_methods = _register(FigureRecipe(
    name="autocorrelation_methods",
    description="Re C(t) computed by each method, overlaid",
    inputs={"autocorrelation": "autocorrelation_L*_*.csv"},
    xlabel="t",
    ylabel="Re C(t)",
))

# Plateau value against system size with power-law guides.
plateau_scaling = _register(FigureRecipe(
    name="plateau_scaling",
    description="infinite-time plateau vs L on log-log axes",
    inputs={"manifest": "run_manifest.json"},
    xlabel="L",
    ylabel="C(inf)",
    xscale="log",
    yscale="log",
    reference_lines=(ReferenceLine(exponent=-1.0, label="L^-1"),
                     ReferenceLine(exponent=-2.0, label="L^-2")),
))

# Spectral density of the tridiagonal chain.
spectral_density_overlay = _register(FigureRecipe(
    name="spectral_density_overlay",
    description="spectral density per size/method",
    inputs={"spectral_density": "spectral_density_L*_*.csv"},
    xlabel="omega",
    ylabel="Phi(omega)",
))
