"""Dense exact-diagonalisation reference for small chains.

Assembles the 2^L-dimensional Hamiltonian and observable matrices directly
from the symbolic term lists, diagonalises once, and evaluates the exact
autocorrelation and its diagonal-ensemble (infinite-time) plateau.  The
default size cap keeps this desk-scale; override it explicitly for larger
runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .models import ObservableSpec, SpinChainModel
from .pauli import OperatorVector

DENSE_CAP = 12

_SINGLE = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(x_mask: int, z_mask: int, n_sites: int) -> np.ndarray:
    """Dense matrix of a canonical Pauli string; site j <-> bit j of the
    computational-basis index."""
    m = np.array([[1.0 + 0.0j]])
    for j in range(n_sites):
        m = np.kron(_SINGLE[((x_mask >> j) & 1, (z_mask >> j) & 1)], m)
    return m


def operator_matrix(vec: OperatorVector) -> np.ndarray:
    d = 2 ** vec.n_sites
    m = np.zeros((d, d), dtype=complex)
    for p, c in vec.sorted_items():
        m += c * pauli_matrix(p.x_mask, p.z_mask, p.n_sites)
    return m


@dataclass
class DenseSpectrum:
    """Eigen-decomposition of H with the observable in the eigenbasis."""

    eigenvalues: np.ndarray      # ascending
    eigenvectors: np.ndarray     # columns
    observable_elements: np.ndarray
    n_sites: int

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)


def _check_cap(L: int, dense_cap: int):
    if L > dense_cap:
        raise ValueError(f"L={L} exceeds the dense cap {dense_cap}; "
                         "pass dense_cap explicitly to override")


def dense_spectrum(model: SpinChainModel, obs: ObservableSpec, *,
                   dense_cap: int = DENSE_CAP) -> DenseSpectrum:
    _check_cap(model.n_sites, dense_cap)
    if obs.n_sites != model.n_sites:
        raise ValueError("observable and model size mismatch")
    h = np.zeros((2 ** model.n_sites,) * 2, dtype=complex)
    for p, c in model.terms:
        h += c * pauli_matrix(p.x_mask, p.z_mask, p.n_sites)
    evals, evecs = eigh(h)
    o_eig = evecs.conj().T @ operator_matrix(obs.seed) @ evecs
    return DenseSpectrum(eigenvalues=evals, eigenvectors=evecs,
                         observable_elements=o_eig, n_sites=model.n_sites)


def autocorrelation_ed(model: SpinChainModel, obs: ObservableSpec, times, *,
                       dense_cap: int = DENSE_CAP,
                       spectrum: DenseSpectrum | None = None) -> np.ndarray:
    """C(t) = 2^-L sum_{m,n} |O_mn|^2 exp(i (E_m - E_n) t), exact."""
    spec = spectrum if spectrum is not None else dense_spectrum(model, obs, dense_cap=dense_cap)
    times = np.asarray(times, dtype=float)
    weights = np.abs(spec.observable_elements) ** 2 / 2 ** spec.n_sites
    evals = spec.eigenvalues
    out = np.empty(len(times), dtype=complex)
    chunk = max(1, 40_000_000 // max(spec.dimension ** 2, 1))
    for lo in range(0, len(times), chunk):
        t = times[lo:lo + chunk]
        phases = np.exp(1j * np.outer(t, evals))             # (T, D)
        out[lo:lo + chunk] = np.einsum("tm,mn,tn->t", phases, weights, phases.conj(),
                                       optimize=True)
    return out


def degeneracy_groups(eigenvalues: np.ndarray, tol: float) -> list[slice]:
    """Contiguous groups of eigenvalues equal to within ``tol``."""
    groups = []
    start = 0
    for i in range(1, len(eigenvalues) + 1):
        if i == len(eigenvalues) or eigenvalues[i] - eigenvalues[i - 1] > tol:
            groups.append(slice(start, i))
            start = i
    return groups


def plateau_ed(model: SpinChainModel, obs: ObservableSpec, *,
               degeneracy_tol: float | None = None,
               dense_cap: int = DENSE_CAP,
               spectrum: DenseSpectrum | None = None) -> float:
    """Diagonal-ensemble plateau: 2^-L sum over degenerate pairs of |O_mn|^2.

    ``degeneracy_tol`` defaults to 1e-10 times the spectral width, capturing
    exact symmetry degeneracies without absorbing avoided crossings.
    """
    spec = spectrum if spectrum is not None else dense_spectrum(model, obs, dense_cap=dense_cap)
    width = float(spec.eigenvalues[-1] - spec.eigenvalues[0])
    tol = degeneracy_tol if degeneracy_tol is not None else 1e-10 * max(width, 1.0)
    total = 0.0
    for g in degeneracy_groups(spec.eigenvalues, tol):
        block = spec.observable_elements[g, g]
        total += float(np.sum(np.abs(block) ** 2))
    return total / 2 ** spec.n_sites
