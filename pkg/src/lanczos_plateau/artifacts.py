"""Deterministic CSV/JSON artifact writers and the checksummed run manifest.

Every file is written atomically (temp file + rename) with full-precision
decimal floats (shortest round-trip repr), a fixed header line and LF
endings, so identical runs produce byte-identical outputs.  The manifest
lists every emitted file with its SHA-256 checksum.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

MANIFEST_NAME = "run_manifest.json"


def format_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def atomic_write_text(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header: list[str], rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else format_float(cell)
                              for cell in row))
    atomic_write_text(path, "\n".join(lines) + "\n")
    return Path(path)


def read_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        body = fh.read()
    if not body.strip():
        return {name: np.array([]) for name in header}
    data = np.loadtxt(body.splitlines(), delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


def write_json(path: Path, payload: dict) -> Path:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return Path(path)


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# concrete schemas


def coefficients_name(L: int, method: str) -> str:
    return f"coefficients_L{L:02d}_{method}.csv"


def autocorrelation_name(L: int, method: str) -> str:
    return f"autocorrelation_L{L:02d}_{method}.csv"


def spectral_density_name(L: int, method: str) -> str:
    return f"spectral_density_L{L:02d}_{method}.csv"


def write_coefficients(path: Path, result) -> Path:
    """coefficients.csv: n, b_n, drift, terminated_flag."""
    rows = []
    n_rows = len(result.b)
    for i in range(n_rows):
        flag = 1.0 if (result.terminated and i == n_rows - 1) else 0.0
        drift = result.orthogonality_drift[i] if i < len(result.orthogonality_drift) else 0.0
        rows.append((float(i + 1), result.b[i], drift, flag))
    return write_csv(path, ["n", "b_n", "drift", "terminated_flag"], rows)


def read_coefficients(path: Path) -> tuple[np.ndarray, np.ndarray, bool]:
    cols = read_csv(path)
    b = cols["b_n"]
    terminated = bool(len(cols["terminated_flag"]) and cols["terminated_flag"][-1] == 1.0)
    return b, cols["drift"], terminated


def write_autocorrelation(path: Path, times, c_values) -> Path:
    rows = zip(times, np.real(c_values), np.imag(c_values))
    return write_csv(path, ["t", "re_C", "im_C"], rows)


def write_spectral_density(path: Path, omegas, phi) -> Path:
    return write_csv(path, ["omega", "phi"], zip(omegas, phi))


def write_rates(path: Path, rateseq) -> Path:
    return write_csv(path, ["n", "gamma_n"],
                     zip(rateseq.ns.astype(float), rateseq.gammas))


def write_cumprod(path: Path, cp) -> Path:
    ns = np.arange(len(cp.log_f), dtype=float)
    return write_csv(path, ["n", "F", "logF"], zip(ns, cp.f, cp.log_f))


def write_collapse(path: Path, points, L: int, m: int) -> Path:
    rows = ((n, v, float(L), float(m)) for n, v in points)
    return write_csv(path, ["n", "value", "L", "m"], rows)


def write_fit(path: Path, fit, n_star: int) -> Path:
    return write_json(path, {
        "a1": fit.a1, "c1": fit.c1, "a2": fit.a2, "c2": fit.c2,
        "gamma_bar": fit.gamma_bar, "residual": fit.residual,
        "window": list(fit.window), "n_star": n_star,
    })


class ManifestWriter:
    """Accumulates outputs and metadata, merging into run_manifest.json."""

    def __init__(self, out_dir: Path, config_dict: dict):
        self.out_dir = Path(out_dir)
        self.config = config_dict
        self.outputs: dict[str, str] = {}
        self.plateaus: dict[str, dict] = {}
        self.notes: dict[str, object] = {}

    def add_file(self, path: Path):
        self.outputs[Path(path).name] = sha256_file(path)

    def add_plateau(self, key: str, values: dict):
        self.plateaus[key] = values

    def write(self) -> Path:
        import numpy
        import scipy
        path = self.out_dir / MANIFEST_NAME
        payload = {"schema_version": 1, "config": self.config,
                   "versions": {"lanczos_plateau": _package_version(),
                                "numpy": numpy.__version__,
                                "scipy": scipy.__version__},
                   "outputs": {}, "plateaus": {}, "notes": {}}
        if path.exists():
            try:
                payload.update(json.loads(path.read_text()))
            except json.JSONDecodeError:
                pass
        payload["config"] = self.config
        payload["outputs"] = {**payload.get("outputs", {}), **self.outputs}
        payload["plateaus"] = {**payload.get("plateaus", {}), **self.plateaus}
        payload["notes"] = {**payload.get("notes", {}), **self.notes}
        return write_json(path, payload)


def _package_version() -> str:
    try:
        from importlib.metadata import version
        return version("lanczos-plateau")
    except Exception:
        return "unknown"
