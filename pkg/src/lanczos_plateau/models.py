"""Spin-chain model builders and observable seeds.

Models are stored symbolically as lists of (PauliString, coupling) terms so
the same object drives the dense diagonalisation, the sparse Krylov engine
and the moment diagnostics without re-derivation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .pauli import (
    OperatorVector,
    PauliString,
    normalize,
    operator_product,
)


@dataclass
class SpinChainModel:
    """Symbolic Hamiltonian: weighted Pauli strings plus lattice metadata."""

    n_sites: int
    boundary: str                       # "periodic" | "open"
    terms: list[tuple[PauliString, float]]
    label: str = ""

    def __post_init__(self):
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")
        for p, c in self.terms:
            if p.n_sites != self.n_sites:
                raise ValueError("term size mismatch")
            if not math.isfinite(c):
                raise ValueError("couplings must be finite")

    def as_operator_vector(self) -> OperatorVector:
        return OperatorVector.from_terms(((p, complex(c)) for p, c in self.terms),
                                         self.n_sites)


@dataclass
class ObservableSpec:
    """Normalised, traceless seed operator for the Krylov recursion."""

    seed: OperatorVector
    label: str = ""
    normalized: bool = field(default=True)
    traceless: bool = field(default=True)

    @classmethod
    def from_vector(cls, vec: OperatorVector, label: str = "") -> "ObservableSpec":
        """Centre (drop any identity component) and normalise ``vec``."""
        ident = PauliString.identity(vec.n_sites)
        entries = {p: c for p, c in vec.items() if p != ident}
        centred = OperatorVector(vec.n_sites, entries)
        unit, _ = normalize(centred)
        return cls(seed=unit, label=label or "custom")

    @property
    def n_sites(self) -> int:
        return self.seed.n_sites


def _xx_bond(i: int, j: int, L: int) -> PauliString:
    return PauliString((1 << i) | (1 << j), 0, L)


def _zz_bond(i: int, j: int, L: int) -> PauliString:
    return PauliString(0, (1 << i) | (1 << j), L)


def build_ising(J: float, h_x: float, h_z: float, L: int,
                boundary: str = "periodic") -> SpinChainModel:
    """Ising chain with transverse and longitudinal fields.

    H = sum_j ( J X_j X_{j+1} + h_x X_j + h_z Z_j ), the bond sum running
    over L bonds (periodic) or L-1 bonds (open).  Couplings that are exactly
    zero contribute no terms.
    """
    if L < 2:
        raise ValueError("need at least 2 sites")
    terms: list[tuple[PauliString, float]] = []
    bonds = L if boundary == "periodic" else L - 1
    if J != 0.0:
        for j in range(bonds):
            terms.append((_xx_bond(j, (j + 1) % L, L), J))
    for j in range(L):
        if h_x != 0.0:
            terms.append((PauliString.single("x", j, L), h_x))
        if h_z != 0.0:
            terms.append((PauliString.single("z", j, L), h_z))
    return SpinChainModel(L, boundary, terms,
                          label=f"ising(J={J:g},hx={h_x:g},hz={h_z:g},L={L},{boundary})")


def build_zero_mode_chain(U: float, mu: float, L: int) -> SpinChainModel:
    """Open chain hosting an approximate boundary zero mode.

    H = -sum XX + U sum ZZ - (mu/2) sum Z, open boundary.
    """
    if L < 2:
        raise ValueError("need at least 2 sites")
    terms: list[tuple[PauliString, float]] = []
    for j in range(L - 1):
        terms.append((_xx_bond(j, j + 1, L), -1.0))
    if U != 0.0:
        for j in range(L - 1):
            terms.append((_zz_bond(j, j + 1, L), U))
    if mu != 0.0:
        for j in range(L):
            terms.append((PauliString.single("z", j, L), -mu / 2.0))
    return SpinChainModel(L, "open", terms,
                          label=f"zero_mode(U={U:g},mu={mu:g},L={L})")


def build_edge_mode_tfim(J: float, h: float, L: int) -> SpinChainModel:
    """Open transverse-field Ising chain, -J sum XX - h sum Z.

    For h < J the boundary operator X_1 is an exact (free-fermion) edge
    mode generator: its Lanczos coefficients alternate between 2h and 2J
    and the recursion terminates after 2L - 1 steps.
    """
    if L < 2:
        raise ValueError("need at least 2 sites")
    terms: list[tuple[PauliString, float]] = []
    if J != 0.0:
        for j in range(L - 1):
            terms.append((_xx_bond(j, j + 1, L), -J))
    if h != 0.0:
        for j in range(L):
            terms.append((PauliString.single("z", j, L), -h))
    return SpinChainModel(L, "open", terms,
                          label=f"edge_tfim(J={J:g},h={h:g},L={L})")


# Named observables used throughout: "1" refers to the first chain site.
def observable(name: str, L: int) -> ObservableSpec:
    vec = {
        "sigma_z_1": lambda: OperatorVector(L, {PauliString.single("z", 0, L): 1.0}),
        "sigma_y_1": lambda: OperatorVector(L, {PauliString.single("y", 0, L): 1.0}),
        "sigma_x_1": lambda: OperatorVector(L, {PauliString.single("x", 0, L): 1.0}),
        "sigma_z_1z_2": lambda: OperatorVector(L, {_zz_bond(0, 1, L): 1.0}),
        "sigma_z_1z_2z_3": lambda: OperatorVector(
            L, {PauliString(0, 0b111, L): 1.0}),
    }
    if name not in vec:
        raise ValueError(f"unknown observable {name!r}; known: {sorted(vec)}")
    if name == "sigma_z_1z_2z_3" and L < 3:
        raise ValueError("sigma_z_1z_2z_3 needs at least 3 sites")
    return ObservableSpec(seed=vec[name](), label=name)


def moment_overlap_order(model: SpinChainModel, obs: ObservableSpec,
                         m_max: int = 6, tol: float = 1e-10) -> Optional[int]:
    """Smallest m with <O H^m> != 0 after centring H, or None.

    The moment <O H^m> = Tr(H^m O) / 2^L is the identity-string coefficient
    of the iterated Pauli-basis product H^m O; the test threshold is
    relative to the norm of that product so the answer is invariant under
    H -> c H.  m_max is capped at 6: products of H^m grow combinatorially
    in the Pauli basis.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if m_max > 6:
        raise ValueError("m_max capped at 6")
    if not obs.traceless or not obs.normalized:
        raise ValueError("observable must be traceless and normalised")
    h = model.as_operator_vector()
    ident = PauliString.identity(model.n_sites)
    mean = h[ident]
    if mean != 0:
        h = OperatorVector(model.n_sites,
                           {p: (c - mean if p == ident else c) for p, c in h.items()})
    w = obs.seed
    for m in range(1, m_max + 1):
        w = operator_product(h, w)
        moment = w[ident]
        if abs(moment) > tol * w.norm():
            return m
    return None
