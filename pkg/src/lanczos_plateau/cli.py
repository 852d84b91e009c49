"""Batch front-end: configure a grid, run SA/FO/ED, emit artifacts.

Subcommands
-----------
coefficients     Lanczos coefficient files per (L, method).
autocorrelation  C(t) per (L, method) plus spectral densities and plateaus.
compare          max-deviation table across method pairs.
analyze          rates, cumulative products, fits and collapse curves.
all              the four stages in order, sharing computed coefficients.

Errors are reported as machine-readable JSON on stderr; exit code 0 on
success, 2 on configuration errors, 1 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import artifacts as art
from .analysis import biexp_fit, collapse_curve, cumulative_product, detect_nstar, rates
from .config import ConfigError, RunConfig, apply_override
from .ed import autocorrelation_ed, dense_spectrum, plateau_ed
from .krylov import lanczos_fo, lanczos_sa
from .models import moment_overlap_order
from .spectral import (
    TridiagonalLiouvillian,
    autocorrelation_from_b,
    default_broadening,
    plateau_from_b,
    spectral_density,
)


class RunSession:
    """Caches per-(L, method) Lanczos results and ED spectra for one invocation."""

    def __init__(self, config: RunConfig):
        self.config = config
        self._lanczos = {}
        self._spectra = {}

    def lanczos(self, L: int, method: str):
        key = (L, method)
        if key not in self._lanczos:
            self._lanczos[key] = _run_lanczos(self.config, L, method)
        return self._lanczos[key]

    def b_for(self, L: int, method: str) -> np.ndarray:
        """b sequence from the cache, a previously written coefficients file
        (exact: floats are stored in shortest round-trip form), or a fresh run."""
        key = (L, method)
        if key in self._lanczos:
            return self._lanczos[key].b
        path = Path(self.config.output_dir) / art.coefficients_name(L, method)
        if path.exists():
            b, _, _ = art.read_coefficients(path)
            return b
        return self.lanczos(L, method).b

    def spectrum(self, L: int):
        if L not in self._spectra:
            cfg = self.config
            if L > cfg.dense_cap:
                raise ValueError(f"ED requested at L={L} above the dense cap {cfg.dense_cap}")
            self._spectra[L] = dense_spectrum(cfg.build_model(L), cfg.build_observable(L),
                                              dense_cap=cfg.dense_cap)
        return self._spectra[L]


def _run_lanczos(config: RunConfig, L: int, method: str):
    model = config.build_model(L)
    obs = config.build_observable(L)
    th = config.thresholds
    if method == "SA":
        return lanczos_sa(model, obs, config.n_max, prune_threshold=th.prune,
                          termination_rtol=th.termination)
    if method == "FO":
        result, _basis = lanczos_fo(model, obs, config.n_max, ortho_tol=th.ortho_tol,
                                    prune_threshold=th.prune,
                                    termination_rtol=th.termination,
                                    basis_dtype=config.basis_dtype)
        return result
    raise ValueError(f"not a Lanczos method: {method}")


def _coefficients_task(config_dict: dict, L: int, method: str) -> str:
    """Worker-pool task: compute one (L, method) and write its file."""
    config = RunConfig.from_dict(config_dict)
    result = _run_lanczos(config, L, method)
    out = Path(config.output_dir)
    path = art.write_coefficients(out / art.coefficients_name(L, method), result)
    return str(path)


def cmd_coefficients(config: RunConfig, session: RunSession | None = None) -> list[Path]:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = art.ManifestWriter(out, config.to_dict())
    lanczos_methods = [m for m in config.methods if m in ("SA", "FO")]
    tasks = [(L, m) for L in config.sizes for m in lanczos_methods]
    written: list[Path] = []
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_coefficients_task, config.to_dict(), L, m)
                       for L, m in tasks]
            written = [Path(f.result()) for f in futures]
    else:
        for L, m in tasks:
            result = session.lanczos(L, m) if session is not None \
                else _run_lanczos(config, L, m)
            written.append(art.write_coefficients(out / art.coefficients_name(L, m), result))
    for p in written:
        manifest.add_file(p)
    manifest.write()
    return written


def cmd_autocorrelation(config: RunConfig, session: RunSession | None = None) -> list[Path]:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    session = session or RunSession(config)
    manifest = art.ManifestWriter(out, config.to_dict())
    times = config.times.values()
    written: list[Path] = []
    for L in config.sizes:
        for method in config.methods:
            if method == "ED":
                spec = session.spectrum(L)
                c = autocorrelation_ed(config.build_model(L), config.build_observable(L),
                                       times, dense_cap=config.dense_cap, spectrum=spec)
                p = art.write_autocorrelation(out / art.autocorrelation_name(L, "ED"), times, c)
                written.append(p)
                manifest.add_plateau(f"L{L:02d}_ED", {
                    "value": plateau_ed(config.build_model(L), config.build_observable(L),
                                        degeneracy_tol=config.thresholds.degeneracy_tol,
                                        dense_cap=config.dense_cap, spectrum=spec)})
                continue
            b = session.b_for(L, method)
            if len(b) == 0:
                manifest.notes[f"L{L:02d}_{method}"] = "seed commutes with H; no dynamics"
                continue
            # conservative reliability horizon of the truncated chain: the
            # fastest wavepacket reflects off the chain end and corrupts
            # C(t) after ~ (N+1)/max(b)
            horizon = (len(b) + 1) / float(np.max(b))
            if times[-1] > horizon:
                manifest.notes[f"L{L:02d}_{method}_horizon"] = (
                    f"time grid extends to {times[-1]:g} but the {len(b)}-step "
                    f"chain is only reliable to t ~ {horizon:.1f}; increase n_max")
            c = autocorrelation_from_b(b, times)
            written.append(art.write_autocorrelation(
                out / art.autocorrelation_name(L, method), times, c))
            tri = TridiagonalLiouvillian(b)
            evals, _ = tri.eigensystem()
            span = float(np.max(np.abs(evals))) * 1.1 + 1.0
            grid = np.linspace(-span, span, 2001)
            eps = default_broadening(b)
            written.append(art.write_spectral_density(
                out / art.spectral_density_name(L, method), grid,
                spectral_density(b, grid, eps)))
            est = plateau_from_b(b)
            manifest.add_plateau(f"L{L:02d}_{method}",
                                 {"strict": est.strict, "series": est.series})
    for p in written:
        manifest.add_file(p)
    manifest.write()
    return written


def cmd_compare(config: RunConfig, session: RunSession | None = None) -> dict:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    session = session or RunSession(config)
    manifest = art.ManifestWriter(out, config.to_dict())
    times = config.times.values()
    report: dict[str, dict[str, float]] = {}
    for L in config.sizes:
        curves = {}
        for method in config.methods:
            if method == "ED":
                curves["ED"] = autocorrelation_ed(
                    config.build_model(L), config.build_observable(L), times,
                    dense_cap=config.dense_cap, spectrum=session.spectrum(L))
            else:
                b = session.b_for(L, method)
                if len(b):
                    curves[method] = autocorrelation_from_b(b, times)
        pairs = {}
        names = sorted(curves)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                pairs[f"{a}_vs_{b}"] = float(np.max(np.abs(curves[a] - curves[b])))
        report[f"L{L:02d}"] = pairs
    path = art.write_json(out / "compare.json", report)
    manifest.add_file(path)
    manifest.write()
    for lkey in sorted(report):
        for pair, dev in sorted(report[lkey].items()):
            print(f"{lkey}  {pair:12s}  max|dC| = {art.format_float(dev)}")
    return report


def cmd_analyze(config: RunConfig, session: RunSession | None = None) -> list[Path]:
    out = Path(config.output_dir)
    manifest = art.ManifestWriter(out, config.to_dict())
    lanczos_methods = [m for m in config.methods if m in ("SA", "FO")]
    written: list[Path] = []
    m_exponent = config.collapse_m
    if m_exponent is None:
        probe_L = min(config.sizes)
        m_exponent = moment_overlap_order(config.build_model(probe_L),
                                          config.build_observable(probe_L))
    for L in config.sizes:
        for method in lanczos_methods:
            src = out / art.coefficients_name(L, method)
            if not src.exists():
                raise FileNotFoundError(
                    f"missing input {src}; run the coefficients stage first")
            b, _, _ = art.read_coefficients(src)
            if len(b) < 2:
                manifest.notes[f"analyze_L{L:02d}_{method}"] = "too few coefficients"
                continue
            rs = rates(b, n_sites=L, source_label=method)
            written.append(art.write_rates(out / f"rates_L{L:02d}_{method}.csv", rs))
            try:
                n_star = detect_nstar(b)
            except ValueError as exc:
                manifest.notes[f"analyze_L{L:02d}_{method}"] = str(exc)
                continue
            cp = cumulative_product(rs, n_star)
            written.append(art.write_cumprod(out / f"cumprod_L{L:02d}_{method}.csv", cp))
            window = tuple(config.fit_window) if config.fit_window else None
            try:
                fit = biexp_fit(cp, window=window)
                written.append(art.write_fit(out / f"fit_L{L:02d}_{method}.json", fit, n_star))
            except (ValueError, RuntimeError) as exc:
                manifest.notes[f"fit_L{L:02d}_{method}"] = str(exc)
            if m_exponent is not None:
                pts = collapse_curve(cp, L=L, m=m_exponent)
                written.append(art.write_collapse(
                    out / f"collapse_L{L:02d}_{method}.csv", pts, L, m_exponent))
            else:
                manifest.notes[f"collapse_L{L:02d}_{method}"] = \
                    "observable overlaps no power of H; collapse exponent undefined"
    for p in written:
        manifest.add_file(p)
    manifest.write()
    return written


def cmd_all(config: RunConfig) -> None:
    session = RunSession(config)
    cmd_coefficients(config, session)
    cmd_autocorrelation(config, session)
    cmd_compare(config, session)
    cmd_analyze(config, session)


COMMANDS = {
    "coefficients": cmd_coefficients,
    "autocorrelation": cmd_autocorrelation,
    "compare": cmd_compare,
    "analyze": cmd_analyze,
    "all": cmd_all,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lanczos-plateau",
        description="Lanczos coefficients, autocorrelations and plateau analysis "
                    "for spin chains")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--workers", type=int, default=None, help="override worker count")
        p.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE", help="dotted-path config override (JSON value)")
    return parser


def _error_json(exc: Exception) -> str:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError):
        payload["field"] = exc.field_path
    return json.dumps(payload, sort_keys=True)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = json.loads(Path(args.config).read_text())
        for assignment in args.override:
            raw = apply_override(raw, assignment)
        if args.out is not None:
            raw["output_dir"] = args.out
        if args.workers is not None:
            raw["workers"] = args.workers
        config = RunConfig.from_dict(raw)
    except FileNotFoundError as exc:
        print(_error_json(exc), file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(_error_json(exc), file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(_error_json(ConfigError("$", f"invalid JSON: {exc}")), file=sys.stderr)
        return 2
    try:
        COMMANDS[args.command](config)
    except Exception as exc:   # noqa: BLE001 - boundary: report and exit nonzero
        print(_error_json(exc), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
