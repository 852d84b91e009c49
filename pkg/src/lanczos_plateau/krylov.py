"""Lanczos engines for the operator Krylov space of a spin chain.

Two variants are provided: the memory-light three-term recurrence
(``lanczos_sa``) and the fully reorthogonalised one (``lanczos_fo``), which
keeps every Krylov vector and applies a blocked Gram-Schmidt correction to
each new vector.

Internally both work in a *real* representation.  In the canonical Pauli
basis the Liouvillian matrix is purely imaginary, L = i W with W real and
antisymmetric, and the Krylov operators factor as ``O_n = i^n r_n`` with
real vectors ``r_n``.  The complex three-term recurrence

    O'_n = L[O_{n-1}] - b_{n-1} O_{n-2}

becomes ``r'_n = W r_{n-1} + b_{n-1} r_{n-2}`` with identical coefficients
``b_n = ||r'_n||``, so the whole iteration runs in real arithmetic at half
the memory cost.  W is assembled once as a sparse CSR matrix over the set
of Pauli strings reachable from the seed (found by breadth-first closure),
which is exact: strings outside that set never acquire weight.

The reachable set for a generic non-integrable chain is the full traceless
string space (4^L - 1 at L sites), so the fully reorthogonalised variant is
memory-bound; ``basis_dtype`` and ``memory_budget`` control how the stored
basis degrades (float32 storage, disk spill, or a flagged partial run).
"""

from __future__ import annotations

import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .models import ObservableSpec, SpinChainModel
from .pauli import (
    OperatorVector,
    PauliString,
    anticommute_mask,
    pack_keys,
    phase_exponent,
    unpack_keys,
)

DEFAULT_ORTHO_TOL = 1e-10
DEFAULT_TERMINATION_RTOL = 1e-12
DEFAULT_DRIFT_SAMPLE_EVERY = 25


@dataclass
class LanczosResult:
    """b_n sequence plus method metadata and diagnostics."""

    b: np.ndarray
    method: str                         # "SA" | "FO"
    terminated: bool
    terminal_index: Optional[int]       # 1-based step at which exhaustion was detected
    orthogonality_drift: np.ndarray     # per accepted step; see module docstring
    seed_label: str
    model_label: str
    n_sites: int
    prune_report: dict = field(default_factory=dict)
    budget_exhausted: bool = False
    basis_dtype: str = "float64"
    sector_dim: int = 0

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        self.orthogonality_drift = np.asarray(self.orthogonality_drift, dtype=float)

    @property
    def n_coefficients(self) -> int:
        return len(self.b)


class KrylovBasis:
    """Stored FO basis: real vectors r_0..r_N over the string sector.

    Row n holds r_n; the corresponding operator is O_n = i^n r_n.  The
    backing array may be a RAM ndarray or a disk memmap.
    """

    def __init__(self, array, n_vectors: int, keys: np.ndarray, n_sites: int,
                 spill_file: Optional[Path] = None):
        self._array = array
        self.n_vectors = n_vectors
        self.keys = keys
        self.n_sites = n_sites
        self.spill_file = spill_file

    def __len__(self):
        return self.n_vectors

    @property
    def vectors(self) -> np.ndarray:
        return self._array[: self.n_vectors]

    def operator(self, n: int) -> OperatorVector:
        """Reconstruct O_n = i^n r_n as a sparse OperatorVector."""
        if not 0 <= n < self.n_vectors:
            raise IndexError(n)
        row = np.asarray(self._array[n], dtype=float)
        phase = 1j ** (n % 4)
        xs, zs = unpack_keys(self.keys)
        entries = {}
        nz = np.nonzero(row)[0]
        for i in nz:
            p = PauliString(int(xs[i]), int(zs[i]), self.n_sites)
            entries[p] = phase * row[i]
        return OperatorVector(self.n_sites, entries)


@dataclass
class OrthogonalityReport:
    max_drift: float
    per_step: np.ndarray      # max off-diagonal overlap of each vector against its predecessors


def orthogonality_report(basis: KrylovBasis) -> OrthogonalityReport:
    """Max and per-step off-diagonal Gram-matrix magnitudes of a basis."""
    n = len(basis)
    if n == 0:
        raise ValueError("empty basis")
    per_step = np.zeros(n)
    vecs = basis.vectors
    for i in range(1, n):
        overlaps = vecs[:i] @ vecs[i]
        per_step[i] = float(np.max(np.abs(overlaps)))
    return OrthogonalityReport(max_drift=float(per_step.max(initial=0.0)), per_step=per_step)


# ---------------------------------------------------------------------------
# sector construction


@dataclass
class OperatorSector:
    """Reachable string set with the Liouvillian acting on it as L = i W."""

    keys: np.ndarray            # sorted packed (x << 32 | z) keys
    W: sp.csr_matrix            # real antisymmetric, 2x the commutator structure constants
    seed: np.ndarray            # unit-norm real seed vector
    n_sites: int

    @property
    def dim(self) -> int:
        return len(self.keys)


def _merged_terms(model: SpinChainModel):
    """Model terms as packed-key arrays with duplicate strings merged."""
    acc: dict[int, float] = {}
    for p, c in model.terms:
        if c != 0.0:
            k = (p.x_mask << 32) | p.z_mask
            acc[k] = acc.get(k, 0.0) + c
    keys = np.array(sorted(k for k, c in acc.items() if c != 0.0), dtype=np.uint64)
    coup = np.array([acc[int(k)] for k in keys], dtype=float)
    tx, tz = unpack_keys(keys)
    return tx, tz, coup


def build_sector(model: SpinChainModel, obs: ObservableSpec) -> OperatorSector:
    """BFS closure of the seed support under commutators with H, plus W."""
    if obs.n_sites != model.n_sites:
        raise ValueError("observable and model size mismatch")
    if not obs.seed.is_hermitian():
        raise ValueError("seed must be Hermitian (real coefficients)")
    tx, tz, coup = _merged_terms(model)

    seed_items = obs.seed.sorted_items()
    seed_keys = np.array([(p.x_mask << 32) | p.z_mask for p, _ in seed_items], dtype=np.uint64)
    seed_coeffs = np.array([c.real for _, c in seed_items], dtype=float)

    keys = np.unique(seed_keys)
    frontier = keys
    while len(frontier):
        fx, fz = unpack_keys(frontier)
        produced = []
        for i in range(len(tx)):
            mask = anticommute_mask(fx, fz, tx[i], tz[i])
            if mask.any():
                produced.append(pack_keys(fx[mask] ^ tx[i], fz[mask] ^ tz[i]))
        if not produced:
            break
        candidates = np.unique(np.concatenate(produced))
        pos = np.searchsorted(keys, candidates)
        pos = np.clip(pos, 0, len(keys) - 1)
        new = candidates[keys[pos] != candidates]
        if len(new) == 0:
            break
        keys = np.union1d(keys, new)
        frontier = new

    kx, kz = unpack_keys(keys)
    rows, cols, vals = [], [], []
    for i in range(len(tx)):
        mask = anticommute_mask(kx, kz, tx[i], tz[i])
        if not mask.any():
            continue
        jx, jz = kx[mask], kz[mask]
        k = phase_exponent(np.uint64(tx[i]), np.uint64(tz[i]), jx, jz)
        # [P_t, S_j] = 2 i^k S_m with k odd; W = -i L has entry +-2c
        w = 2.0 * coup[i] * np.where(k == 1, 1.0, -1.0)
        dest = np.searchsorted(keys, pack_keys(jx ^ tx[i], jz ^ tz[i]))
        rows.append(dest.astype(np.int32))
        cols.append(np.nonzero(mask)[0].astype(np.int32))
        vals.append(w)
    dim = len(keys)
    if rows:
        W = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim))
    else:
        W = sp.csr_matrix((dim, dim))

    seed_vec = np.zeros(dim)
    seed_vec[np.searchsorted(keys, seed_keys)] = seed_coeffs
    nrm = np.linalg.norm(seed_vec)
    if nrm == 0.0:
        raise ValueError("seed has zero norm")
    seed_vec /= nrm
    return OperatorSector(keys=keys, W=W, seed=seed_vec, n_sites=model.n_sites)


# ---------------------------------------------------------------------------
# engines


def _prune_in_place(r: np.ndarray, threshold: float) -> float:
    small = np.abs(r) < threshold
    discarded = float(np.sum(r[small] ** 2))
    r[small] = 0.0
    return discarded


def lanczos_sa(model: SpinChainModel, obs: ObservableSpec, n_max: int, *,
               prune_threshold: float = 0.0,
               termination_rtol: float = DEFAULT_TERMINATION_RTOL,
               drift_sample_every: int = DEFAULT_DRIFT_SAMPLE_EVERY,
               sector: Optional[OperatorSector] = None) -> LanczosResult:
    """Three-term Lanczos recurrence; only three vectors held at a time.

    Orthogonality loss is monitored against a retained subsample: every
    ``drift_sample_every``-th basis vector together with its successor.
    Pairs are kept because in the real representation even- and odd-index
    Krylov vectors are structurally orthogonal, so a single-parity sample
    would be blind to half the drift.  The recorded drift is an estimate,
    unlike the FO variant where it is enforced.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    sec = sector if sector is not None else build_sector(model, obs)
    W = sec.W
    matrix_scale = float(np.abs(W.data).max()) if W.nnz else 1.0

    b: list[float] = []
    drift: list[float] = []
    retained = [(0, sec.seed.copy())]
    r_prev = np.zeros(sec.dim)
    r = sec.seed.copy()
    b_prev = 0.0
    discarded_total = 0.0
    terminated = False
    terminal_index = None

    for n in range(1, n_max + 1):
        rp = W @ r
        if b_prev != 0.0:
            rp += b_prev * r_prev
        bn = float(np.linalg.norm(rp))
        scale_ref = max(b) if b else matrix_scale
        if bn <= termination_rtol * scale_ref:
            terminated = True
            terminal_index = n
            break
        rp /= bn
        if prune_threshold > 0.0:
            discarded_total += _prune_in_place(rp, prune_threshold)
        step_drift = 0.0
        for idx, v in retained:
            if idx <= n - 2:
                step_drift = max(step_drift, abs(float(v @ rp)))
        drift.append(step_drift)
        b.append(bn)
        r_prev, r, b_prev = r, rp, bn
        if drift_sample_every > 0 and n % drift_sample_every in (0, 1):
            retained.append((n, rp.copy()))

    return LanczosResult(
        b=np.array(b), method="SA", terminated=terminated, terminal_index=terminal_index,
        orthogonality_drift=np.array(drift), seed_label=obs.label,
        model_label=model.label, n_sites=model.n_sites,
        prune_report={"threshold": prune_threshold, "discarded_weight": discarded_total},
        sector_dim=sec.dim)


def _allocate_basis(n_rows: int, dim: int, dtype, memory_budget: Optional[int],
                    spill_dir: Optional[Path]):
    """Basis store: RAM array, disk memmap, or a row-capped RAM array."""
    itemsize = np.dtype(dtype).itemsize
    required = n_rows * dim * itemsize
    if memory_budget is None or required <= memory_budget:
        return np.zeros((n_rows, dim), dtype=dtype), n_rows, None
    if spill_dir is not None:
        spill_dir = Path(spill_dir)
        spill_dir.mkdir(parents=True, exist_ok=True)
        tmp = tempfile.NamedTemporaryFile(prefix="krylov_basis_", suffix=".bin",
                                          dir=spill_dir, delete=False)
        tmp.close()
        arr = np.memmap(tmp.name, dtype=dtype, mode="w+", shape=(n_rows, dim))
        return arr, n_rows, Path(tmp.name)
    capped = max(2, memory_budget // (dim * itemsize))
    return np.zeros((capped, dim), dtype=dtype), capped, None


def lanczos_fo(model: SpinChainModel, obs: ObservableSpec, n_max: int, *,
               ortho_tol: float = DEFAULT_ORTHO_TOL,
               memory_budget: Optional[int] = None,
               basis_dtype: str = "float64",
               spill_dir: Optional[Path] = None,
               prune_threshold: float = 0.0,
               termination_rtol: float = DEFAULT_TERMINATION_RTOL,
               sector: Optional[OperatorSector] = None
               ) -> tuple[LanczosResult, KrylovBasis]:
    """Fully reorthogonalised Lanczos.

    Each new vector is Gram-Schmidt-corrected against the entire stored
    basis; the residual overlap is then measured and, if it exceeds
    ``ortho_tol`` (or the norm dropped by more than 10x in the first pass),
    the correction is applied a second time.  The recorded per-step drift is
    the post-correction residual.

    ``memory_budget`` (bytes) bounds the stored basis.  If the run would
    exceed it, the basis is spilled to a memmap under ``spill_dir`` when
    given, otherwise the run stops early with ``budget_exhausted`` set.
    With ``basis_dtype="float32"`` the stored copy of the basis is rounded
    to single precision (halving memory); recurrence vectors and b_n stay
    in float64, and the drift is measured against the rounded basis, so
    ``ortho_tol`` must be chosen accordingly (1e-4 is a safe floor).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    sec = sector if sector is not None else build_sector(model, obs)
    W = sec.W
    dim = sec.dim
    matrix_scale = float(np.abs(W.data).max()) if W.nnz else 1.0
    dtype = np.dtype(basis_dtype)
    if dtype not in (np.dtype(np.float64), np.dtype(np.float32)):
        raise ValueError("basis_dtype must be float64 or float32")

    n_rows = min(n_max, dim - 1) + 1 if dim > 1 else 1
    basis, row_cap, spill_file = _allocate_basis(n_rows, dim, dtype, memory_budget, spill_dir)
    basis[0] = sec.seed

    b: list[float] = []
    drift: list[float] = []
    r_prev = np.zeros(dim)
    r = sec.seed.copy()
    b_prev = 0.0
    discarded_total = 0.0
    terminated = False
    terminal_index = None
    budget_exhausted = False
    stored = 1

    def _gs_pass(rp: np.ndarray, n: int) -> np.ndarray:
        """One classical GS pass of rp against rows [0, n); returns overlaps."""
        prefix = basis[:n]
        rp_cast = rp.astype(dtype, copy=False) if dtype != rp.dtype else rp
        overlaps = prefix @ rp_cast
        rp -= (prefix.T @ overlaps).astype(np.float64, copy=False)
        return overlaps

    for n in range(1, n_max + 1):
        rp = W @ r
        if b_prev != 0.0:
            rp += b_prev * r_prev
        norm_before = float(np.linalg.norm(rp))
        _gs_pass(rp, stored)
        norm_after = float(np.linalg.norm(rp))
        overlaps2 = basis[:stored] @ (rp.astype(dtype, copy=False) if dtype != rp.dtype else rp)
        step_drift = float(np.max(np.abs(overlaps2), initial=0.0))
        if step_drift > ortho_tol or (norm_before > 0 and norm_after < 0.1 * norm_before):
            rp -= (basis[:stored].T @ overlaps2).astype(np.float64, copy=False)
            overlaps3 = basis[:stored] @ (rp.astype(dtype, copy=False) if dtype != rp.dtype else rp)
            step_drift = float(np.max(np.abs(overlaps3), initial=0.0))
        bn = float(np.linalg.norm(rp))
        scale_ref = max(b) if b else matrix_scale
        if bn <= termination_rtol * scale_ref:
            terminated = True
            terminal_index = n
            break
        rp /= bn
        if prune_threshold > 0.0:
            discarded_total += _prune_in_place(rp, prune_threshold)
        drift.append(step_drift)
        b.append(bn)
        if stored >= row_cap:
            budget_exhausted = True
            break
        basis[stored] = rp
        stored += 1
        r_prev, r, b_prev = r, rp, bn

    result = LanczosResult(
        b=np.array(b), method="FO", terminated=terminated, terminal_index=terminal_index,
        orthogonality_drift=np.array(drift), seed_label=obs.label,
        model_label=model.label, n_sites=model.n_sites,
        prune_report={"threshold": prune_threshold, "discarded_weight": discarded_total},
        budget_exhausted=budget_exhausted, basis_dtype=str(dtype), sector_dim=dim)
    kb = KrylovBasis(basis, stored, sec.keys, model.n_sites, spill_file=spill_file)
    return result, kb
