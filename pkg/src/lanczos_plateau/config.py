"""Run configuration: a versioned JSON schema with strict validation.

A RunConfig pins one (model, observable) pair, a size list, the method set
and every numerical threshold, so a run is fully reproducible from its
config alone.  ``parse(print(config)) == config`` round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from .models import (
    ObservableSpec,
    SpinChainModel,
    build_edge_mode_tfim,
    build_ising,
    build_zero_mode_chain,
    observable,
)
from .pauli import OperatorVector, PauliString

SCHEMA_VERSION = 1

KNOWN_METHODS = ("SA", "FO", "ED")
KNOWN_MODELS = ("ising", "zero_mode_chain", "edge_mode_tfim")
NAMED_OBSERVABLES = ("sigma_z_1", "sigma_y_1", "sigma_x_1", "sigma_z_1z_2", "sigma_z_1z_2z_3")


class ConfigError(ValueError):
    """Validation failure carrying the offending field path."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")


@dataclass
class Thresholds:
    ortho_tol: float = 1e-10
    prune: float = 0.0
    degeneracy_tol: Optional[float] = None     # None: 1e-10 * spectral width
    termination: float = 1e-12


@dataclass
class TimeGrid:
    start: float = 0.0
    stop: float = 50.0
    num: int = 501

    def values(self):
        import numpy as np
        return np.linspace(self.start, self.stop, self.num)


@dataclass
class RunConfig:
    model: dict                      # {"name", "params", "boundary"}
    observable: Any                  # named string or {"terms": [[label, re, im], ...]}
    sizes: list[int]
    methods: list[str]
    n_max: int
    times: TimeGrid = field(default_factory=TimeGrid)
    thresholds: Thresholds = field(default_factory=Thresholds)
    fit_window: Optional[list[int]] = None
    collapse_m: Optional[int] = None          # None: infer from moment overlaps
    basis_dtype: str = "float64"
    dense_cap: int = 12
    output_dir: str = "runs/out"
    workers: int = 1
    label: str = ""
    schema_version: int = SCHEMA_VERSION

    # ---- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        cfg = _validate(raw)
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"invalid JSON: {exc}") from exc
        return cls.from_dict(raw)

    # ---- realisation ------------------------------------------------------

    def build_model(self, L: int) -> SpinChainModel:
        name = self.model["name"]
        p = self.model.get("params", {})
        boundary = self.model.get("boundary", "periodic")
        if name == "ising":
            return build_ising(p.get("J", 1.0), p.get("h_x", 1.0), p.get("h_z", 1.5),
                               L, boundary)
        if name == "zero_mode_chain":
            return build_zero_mode_chain(p.get("U", 0.5), p.get("mu", 0.2), L)
        if name == "edge_mode_tfim":
            return build_edge_mode_tfim(p.get("J", 1.0), p.get("h", 0.3), L)
        raise ConfigError("model.name", f"unknown model {name!r}")

    def build_observable(self, L: int) -> ObservableSpec:
        if isinstance(self.observable, str):
            return observable(self.observable, L)
        terms = {}
        for label, re, im in self.observable["terms"]:
            padded = label.ljust(L, "I")
            terms[PauliString.from_label(padded)] = complex(re, im)
        vec = OperatorVector(L, terms)
        return ObservableSpec.from_vector(vec, label=self.observable.get("label", "custom"))


def _expect(cond: bool, path: str, msg: str):
    if not cond:
        raise ConfigError(path, msg)


def _validate(raw: dict) -> RunConfig:
    _expect(isinstance(raw, dict), "$", "config must be a JSON object")
    version = raw.get("schema_version", SCHEMA_VERSION)
    _expect(version == SCHEMA_VERSION, "schema_version",
            f"unsupported version {version}, expected {SCHEMA_VERSION}")

    model = raw.get("model")
    _expect(isinstance(model, dict), "model", "required object with name/params/boundary")
    _expect(model.get("name") in KNOWN_MODELS, "model.name",
            f"must be one of {KNOWN_MODELS}")
    boundary = model.get("boundary", "periodic")
    _expect(boundary in ("periodic", "open"), "model.boundary",
            "must be 'periodic' or 'open'")
    params = model.get("params", {})
    _expect(isinstance(params, dict), "model.params", "must be an object")
    for key, value in params.items():
        _expect(isinstance(value, (int, float)), f"model.params.{key}", "must be a number")

    obs = raw.get("observable")
    if isinstance(obs, str):
        _expect(obs in NAMED_OBSERVABLES, "observable",
                f"unknown named observable; known: {NAMED_OBSERVABLES}")
    elif isinstance(obs, dict):
        _expect(isinstance(obs.get("terms"), list) and obs["terms"], "observable.terms",
                "must be a nonempty list of [label, re, im] triples")
        for i, t in enumerate(obs["terms"]):
            _expect(isinstance(t, list) and len(t) == 3, f"observable.terms[{i}]",
                    "must be a [label, re, im] triple")
            _expect(isinstance(t[0], str) and set(t[0].upper()) <= set("IXYZ"),
                    f"observable.terms[{i}][0]", "label must use letters IXYZ")
    else:
        raise ConfigError("observable", "must be a name or a {terms: [...]} object")

    sizes = raw.get("sizes")
    _expect(isinstance(sizes, list) and len(sizes) > 0, "sizes", "must be a nonempty list")
    for i, L in enumerate(sizes):
        _expect(isinstance(L, int) and 2 <= L <= 32, f"sizes[{i}]",
                "must be an integer in [2, 32]")

    methods = raw.get("methods")
    _expect(isinstance(methods, list) and len(methods) > 0, "methods",
            "must be a nonempty list")
    for i, m in enumerate(methods):
        _expect(m in KNOWN_METHODS, f"methods[{i}]", f"must be one of {KNOWN_METHODS}")

    n_max = raw.get("n_max")
    _expect(isinstance(n_max, int) and n_max >= 1, "n_max", "must be a positive integer")

    times_raw = raw.get("times", {})
    _expect(isinstance(times_raw, dict), "times", "must be an object")
    times = TimeGrid(start=float(times_raw.get("start", 0.0)),
                     stop=float(times_raw.get("stop", 50.0)),
                     num=int(times_raw.get("num", 501)))
    _expect(times.num >= 1, "times.num", "must be >= 1")
    _expect(times.stop >= times.start, "times.stop", "must be >= times.start")

    th_raw = raw.get("thresholds", {})
    _expect(isinstance(th_raw, dict), "thresholds", "must be an object")
    thresholds = Thresholds(
        ortho_tol=float(th_raw.get("ortho_tol", 1e-10)),
        prune=float(th_raw.get("prune", 0.0)),
        degeneracy_tol=(None if th_raw.get("degeneracy_tol") is None
                        else float(th_raw["degeneracy_tol"])),
        termination=float(th_raw.get("termination", 1e-12)),
    )
    _expect(thresholds.ortho_tol > 0, "thresholds.ortho_tol", "must be positive")
    _expect(thresholds.prune >= 0, "thresholds.prune", "must be nonnegative")
    _expect(thresholds.termination > 0, "thresholds.termination", "must be positive")

    fit_window = raw.get("fit_window")
    if fit_window is not None:
        _expect(isinstance(fit_window, list) and len(fit_window) == 2
                and all(isinstance(x, int) for x in fit_window),
                "fit_window", "must be a [lo, hi] integer pair")

    collapse_m = raw.get("collapse_m")
    if collapse_m is not None:
        _expect(isinstance(collapse_m, int) and collapse_m >= 1, "collapse_m",
                "must be a positive integer")

    basis_dtype = raw.get("basis_dtype", "float64")
    _expect(basis_dtype in ("float64", "float32"), "basis_dtype",
            "must be 'float64' or 'float32'")

    dense_cap = raw.get("dense_cap", 12)
    _expect(isinstance(dense_cap, int) and dense_cap >= 1, "dense_cap",
            "must be a positive integer")

    workers = raw.get("workers", 1)
    _expect(isinstance(workers, int) and workers >= 1, "workers",
            "must be a positive integer")

    return RunConfig(
        model={"name": model["name"], "params": dict(params), "boundary": boundary},
        observable=obs,
        sizes=list(sizes),
        methods=list(methods),
        n_max=n_max,
        times=times,
        thresholds=thresholds,
        fit_window=list(fit_window) if fit_window is not None else None,
        collapse_m=collapse_m,
        basis_dtype=basis_dtype,
        dense_cap=dense_cap,
        output_dir=str(raw.get("output_dir", "runs/out")),
        workers=workers,
        label=str(raw.get("label", "")),
        schema_version=SCHEMA_VERSION,
    )


def apply_override(raw: dict, assignment: str) -> dict:
    """Apply a ``dotted.path=json_value`` override to a raw config dict."""
    if "=" not in assignment:
        raise ConfigError("override", f"expected key=value, got {assignment!r}")
    path, value_text = assignment.split("=", 1)
    try:
        value = json.loads(value_text)
    except json.JSONDecodeError:
        value = value_text
    node = raw
    parts = path.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(path, f"cannot descend into non-object at {part!r}")
    node[parts[-1]] = value
    return raw
