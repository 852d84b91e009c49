"""Exact algebra of Pauli strings and sparse operator vectors.

A Pauli string on L sites is stored as a pair of L-bit masks ``(x_mask,
z_mask)``: bit j of ``x_mask`` (``z_mask``) is set iff site j carries an X
(Z) factor.  A site with both bits set carries Y, with the phase convention

    Y = i * X * Z,

so the operator encoded by the masks is the Hermitian tensor product of
single-site I, X, Y, Z factors.  Under the infinite-temperature inner
product ``(A, B) = Tr(A^dag B) / 2^L`` these strings form an orthonormal
basis of the operator space; a Hermitian operator has real coefficients in
this basis and an anti-Hermitian one purely imaginary coefficients.

The product of two strings is again a string times ``i^k``:

    P1 * P2 = i^k P3,   x3 = x1 ^ x2,  z3 = z1 ^ z2,
    k = y1 + y2 - y3 + 2 * popcount(z1 & x2)   (mod 4),

where ``y = popcount(x & z)`` counts Y factors.  Two strings commute iff
``popcount(x1 & z2) + popcount(z1 & x2)`` is even; when they anticommute,
``[P1, P2] = 2 i^k P3`` with k odd.

Masks fit one machine word each (L <= 32 supported).  The vectorised
helpers at the bottom operate on uint64 arrays of packed keys
``x << 32 | z`` and are shared with the Krylov engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

MAX_SITES = 32

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)  # i^k for k = 0..3


class TerminationSignal(Exception):
    """Raised when a vector that must be normalised has zero norm.

    In the Lanczos recurrence this signals exhaustion of the Krylov space
    rather than an error condition.
    """


@dataclass(frozen=True)
class PauliString:
    """Bit-packed tensor product of single-site Pauli operators."""

    x_mask: int
    z_mask: int
    n_sites: int

    def __post_init__(self):
        if not 1 <= self.n_sites <= MAX_SITES:
            raise ValueError(f"n_sites must be in [1, {MAX_SITES}], got {self.n_sites}")
        full = (1 << self.n_sites) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask uses bits beyond n_sites")

    @classmethod
    def identity(cls, n_sites: int) -> "PauliString":
        return cls(0, 0, n_sites)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Build from a site-ordered label, e.g. ``"ZXI"`` = Z on site 0, X on site 1."""
        x = z = 0
        for j, ch in enumerate(label.upper()):
            if ch == "X":
                x |= 1 << j
            elif ch == "Y":
                x |= 1 << j
                z |= 1 << j
            elif ch == "Z":
                z |= 1 << j
            elif ch != "I":
                raise ValueError(f"invalid Pauli letter {ch!r} in {label!r}")
        return cls(x, z, len(label))

    @classmethod
    def single(cls, axis: str, site: int, n_sites: int) -> "PauliString":
        """Single-site Pauli, ``axis`` in 'xyz', acting on ``site`` (0-based)."""
        if not 0 <= site < n_sites:
            raise ValueError(f"site {site} outside chain of {n_sites} sites")
        bit = 1 << site
        axis = axis.lower()
        if axis == "x":
            return cls(bit, 0, n_sites)
        if axis == "y":
            return cls(bit, bit, n_sites)
        if axis == "z":
            return cls(0, bit, n_sites)
        raise ValueError(f"axis must be one of 'xyz', got {axis!r}")

    def label(self) -> str:
        out = []
        for j in range(self.n_sites):
            xb, zb = (self.x_mask >> j) & 1, (self.z_mask >> j) & 1
            out.append("IXZY"[xb + 2 * zb] if (xb, zb) != (1, 1) else "Y")
        return "".join(out)

    @property
    def y_count(self) -> int:
        return (self.x_mask & self.z_mask).bit_count()

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def key(self) -> int:
        """Packed sort key, x in the high word."""
        return (self.x_mask << MAX_SITES) | self.z_mask

    def __repr__(self):
        return f"PauliString({self.label()!r})"


def multiply(p: PauliString, q: PauliString) -> tuple[PauliString, int]:
    """Product ``p * q = i^k * result``; returns (result, k) with k in 0..3."""
    if p.n_sites != q.n_sites:
        raise ValueError(f"size mismatch: {p.n_sites} vs {q.n_sites}")
    x3 = p.x_mask ^ q.x_mask
    z3 = p.z_mask ^ q.z_mask
    k = (p.y_count + q.y_count - (x3 & z3).bit_count()
         + 2 * (p.z_mask & q.x_mask).bit_count()) % 4
    return PauliString(x3, z3, p.n_sites), k


def commute(p: PauliString, q: PauliString) -> bool:
    if p.n_sites != q.n_sites:
        raise ValueError(f"size mismatch: {p.n_sites} vs {q.n_sites}")
    return ((p.x_mask & q.z_mask).bit_count() + (p.z_mask & q.x_mask).bit_count()) % 2 == 0


def commutator_term(p: PauliString, q: PauliString) -> Optional[tuple[PauliString, complex]]:
    """[p, q] as (string, coefficient), or None when p and q commute."""
    if commute(p, q):
        return None
    prod, k = multiply(p, q)
    return prod, 2.0 * _PHASES[k]


class OperatorVector:
    """Sparse complex expansion of an operator over Pauli strings.

    Entries with exactly zero coefficient are never stored.  Instances are
    treated as immutable by the rest of the package: all arithmetic returns
    new vectors.
    """

    __slots__ = ("n_sites", "_entries")

    def __init__(self, n_sites: int, entries: Optional[dict[PauliString, complex]] = None):
        if not 1 <= n_sites <= MAX_SITES:
            raise ValueError(f"n_sites must be in [1, {MAX_SITES}]")
        self.n_sites = n_sites
        self._entries: dict[PauliString, complex] = {}
        if entries:
            for p, c in entries.items():
                if p.n_sites != n_sites:
                    raise ValueError("all strings must share n_sites")
                c = complex(c)
                if c != 0:
                    self._entries[p] = c

    @classmethod
    def from_terms(cls, terms, n_sites: int) -> "OperatorVector":
        """Accumulate an iterable of (PauliString, coefficient) pairs."""
        acc: dict[PauliString, complex] = {}
        for p, c in terms:
            acc[p] = acc.get(p, 0.0) + complex(c)
        return cls(n_sites, acc)

    def __len__(self):
        return len(self._entries)

    def __getitem__(self, p: PauliString) -> complex:
        return self._entries.get(p, 0.0 + 0.0j)

    def __contains__(self, p: PauliString) -> bool:
        return p in self._entries

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        return iter(self._entries.items())

    def sorted_items(self) -> list[tuple[PauliString, complex]]:
        """Entries in deterministic (packed-key) order."""
        return sorted(self._entries.items(), key=lambda pc: pc[0].key)

    @property
    def identity_coefficient(self) -> complex:
        return self._entries.get(PauliString.identity(self.n_sites), 0.0 + 0.0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self._entries.values()))

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self._entries.values()), default=0.0)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """True when all coefficients are real to within ``tol`` (relative).

        Canonical strings are Hermitian, so Hermiticity of the operator is
        equivalent to reality of its coefficient vector.
        """
        scale = self.max_abs_coefficient()
        if scale == 0.0:
            return True
        return all(abs(c.imag) <= tol * scale for c in self._entries.values())

    def is_anti_hermitian(self, tol: float = 1e-12) -> bool:
        scale = self.max_abs_coefficient()
        if scale == 0.0:
            return True
        return all(abs(c.real) <= tol * scale for c in self._entries.values())

    def __repr__(self):
        head = ", ".join(f"{c:+.3g}*{p.label()}" for p, c in self.sorted_items()[:4])
        more = "" if len(self) <= 4 else f", ... ({len(self)} terms)"
        return f"OperatorVector({head}{more})"


def _check_sizes(a: OperatorVector, b: OperatorVector):
    if a.n_sites != b.n_sites:
        raise ValueError(f"size mismatch: {a.n_sites} vs {b.n_sites}")


def inner_product(a: OperatorVector, b: OperatorVector) -> complex:
    """Infinite-temperature inner product ``Tr(a^dag b) / 2^L``."""
    _check_sizes(a, b)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    # accumulate in deterministic key order over the smaller support
    total = 0.0 + 0.0j
    for p, _ in small.sorted_items():
        ca, cb = a[p], b[p]
        if ca != 0 and cb != 0:
            total += ca.conjugate() * cb
    return total


def scale(a: OperatorVector, c: complex) -> OperatorVector:
    c = complex(c)
    return OperatorVector(a.n_sites, {p: v * c for p, v in a.items()})


def add(a: OperatorVector, b: OperatorVector) -> OperatorVector:
    _check_sizes(a, b)
    acc = dict(a.items())
    for p, c in b.items():
        acc[p] = acc.get(p, 0.0) + c
    return OperatorVector(a.n_sites, acc)


def normalize(a: OperatorVector) -> tuple[OperatorVector, float]:
    """Return (a / ||a||, ||a||); raises TerminationSignal on the zero vector."""
    nrm = a.norm()
    if nrm == 0.0:
        raise TerminationSignal("cannot normalise the zero vector (Krylov space exhausted)")
    return scale(a, 1.0 / nrm), nrm


def prune(a: OperatorVector, threshold: float) -> tuple[OperatorVector, float]:
    """Drop entries with |coefficient| < threshold; also return the discarded weight.

    The discarded weight is ``sum |c|^2`` over removed entries, i.e. the
    squared norm lost to pruning.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    kept: dict[PauliString, complex] = {}
    discarded = 0.0
    for p, c in a.items():
        if abs(c) < threshold:
            discarded += abs(c) ** 2
        else:
            kept[p] = c
    return OperatorVector(a.n_sites, kept), discarded


def apply_liouvillian(h: OperatorVector, a: OperatorVector) -> OperatorVector:
    """[H, A] accumulated term by term over the sparse expansions.

    ``h`` must be Hermitian (real coefficients); this is a convention guard,
    not a mathematical restriction.
    """
    _check_sizes(h, a)
    if not h.is_hermitian():
        raise ValueError("Liouvillian requires a Hermitian Hamiltonian")
    acc: dict[PauliString, complex] = {}
    for ph, ch in h.sorted_items():
        for pa, ca in a.sorted_items():
            term = commutator_term(ph, pa)
            if term is None:
                continue
            prod, coeff = term
            acc[prod] = acc.get(prod, 0.0) + ch * ca * coeff
    return OperatorVector(a.n_sites, acc)


def operator_product(a: OperatorVector, b: OperatorVector) -> OperatorVector:
    """Operator product ``a @ b`` expanded in the Pauli basis."""
    _check_sizes(a, b)
    acc: dict[PauliString, complex] = {}
    for pa, ca in a.sorted_items():
        for pb, cb in b.sorted_items():
            prod, k = multiply(pa, pb)
            acc[prod] = acc.get(prod, 0.0) + ca * cb * _PHASES[k]
    return OperatorVector(a.n_sites, acc)


# ---------------------------------------------------------------------------
# Vectorised mask primitives (shared with the Krylov engine).
# Keys pack x into the high 32 bits: key = x << 32 | z.

KEY_SHIFT = np.uint64(MAX_SITES)
KEY_LOW = np.uint64((1 << MAX_SITES) - 1)


def pack_keys(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    return (x.astype(np.uint64) << KEY_SHIFT) | z.astype(np.uint64)


def unpack_keys(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return keys >> KEY_SHIFT, keys & KEY_LOW


def anticommute_mask(x1, z1, x2, z2) -> np.ndarray:
    """Boolean array: True where the string pairs anticommute."""
    s = np.bitwise_count(np.bitwise_and(x1, z2)) + np.bitwise_count(np.bitwise_and(z1, x2))
    return (s & 1).astype(bool)


def phase_exponent(x1, z1, x2, z2) -> np.ndarray:
    """k in 0..3 with ``P(x1,z1) P(x2,z2) = i^k P(x1^x2, z1^z2)`` (vectorised)."""
    y1 = np.bitwise_count(np.bitwise_and(x1, z1)).astype(np.int64)
    y2 = np.bitwise_count(np.bitwise_and(x2, z2)).astype(np.int64)
    y3 = np.bitwise_count(np.bitwise_and(np.bitwise_xor(x1, x2), np.bitwise_xor(z1, z2))).astype(np.int64)
    cross = np.bitwise_count(np.bitwise_and(z1, x2)).astype(np.int64)
    return (y1 + y2 - y3 + 2 * cross) % 4
