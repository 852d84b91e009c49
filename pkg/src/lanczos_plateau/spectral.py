"""Quantities computed from the tridiagonal Liouvillian alone.

Given the Lanczos coefficients b_1..b_N, the Liouvillian restricted to the
Krylov space is the symmetric (N+1)-dimensional tridiagonal matrix with
zero diagonal and off-diagonal b.  From it we reconstruct the
autocorrelation C(t), its infinite-time plateau, the boundary zero mode,
and the spectral density via the continued-fraction resolvent.

Plateau truncation semantics: the exact series

    C(inf) = 1 / (1 + sum_n prod_{m<=n} (b_{2m-1}/b_{2m})^2)

refers to the semi-infinite chain.  A finite sequence supports two
readings which can differ wildly: the *series* value (the sum cut at the
available pairs, ignoring matrix parity) and the *strict* value (the
squared seed overlap of an exact zero eigenvector, which exists only for
odd-dimensional matrices and is zero otherwise).  ``plateau_from_b``
returns both so truncation sensitivity stays visible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal


@dataclass
class TridiagonalLiouvillian:
    """Symmetric tridiagonal matrix with zero diagonal and off-diagonal b."""

    b: np.ndarray

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        if self.b.ndim != 1 or len(self.b) == 0:
            raise ValueError("b must be a nonempty 1-d sequence")
        if not np.all(self.b > 0):
            raise ValueError("all b_n must be positive")
        self._eig = None

    @property
    def dimension(self) -> int:
        return len(self.b) + 1

    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and eigenvectors via the dedicated
        symmetric-tridiagonal solver; cached.

        The implicit QL/QR driver ('stev') is used: the default 'stemr' can
        fail to converge on the nearly-degenerate spectra that exhausted
        Krylov chains produce.
        """
        if self._eig is None:
            evals, evecs = eigh_tridiagonal(np.zeros(self.dimension), self.b,
                                            lapack_driver="stev")
            self._eig = (evals, evecs)
        return self._eig

    def seed_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """(eigenvalues, |<1|psi_k>|^2) of the seed basis element."""
        evals, evecs = self.eigensystem()
        return evals, evecs[0, :] ** 2


@dataclass
class ZeroMode:
    """Boundary zero mode of the tridiagonal matrix (odd dimension only)."""

    phi: np.ndarray
    overlap_sq: float       # |phi_1|^2, the plateau value

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.phi))


@dataclass
class PlateauEstimate:
    """Both truncation readings of the infinite-time plateau formula."""

    strict: float     # zero-eigenvector weight; 0 for even-dimensional matrices
    series: float     # series cut at the available coefficient pairs
    n_pairs: int      # number of (b_odd/b_even)^2 factors available

    def __float__(self):
        return self.strict


def autocorrelation_from_b(b, times) -> np.ndarray:
    """C(t) = <1| exp(i L t) |1> from the tridiagonal eigendecomposition.

    Returns the complex sequence; for positive b the spectrum is symmetric
    about zero with symmetric seed weights, so the imaginary part is a
    rounding-level residual that is reported rather than dropped.
    """
    tri = TridiagonalLiouvillian(np.asarray(b, dtype=float))
    times = np.asarray(times, dtype=float)
    if not np.all(np.isfinite(times)):
        raise ValueError("times must be finite")
    evals, weights = tri.seed_weights()
    # C(t_i) = sum_k w_k e^{i E_k t_i}, evaluated in chunks to bound memory
    out = np.empty(len(times), dtype=complex)
    chunk = max(1, 10_000_000 // max(len(evals), 1))
    for lo in range(0, len(times), chunk):
        t = times[lo:lo + chunk, None]
        out[lo:lo + chunk] = (weights[None, :] * np.exp(1j * t * evals[None, :])).sum(axis=1)
    return out


def _log_pair_products(b: np.ndarray) -> np.ndarray:
    """log of the partial products prod_{m<=n} (b_{2m-1}/b_{2m})^2, n = 1..n_pairs."""
    n_pairs = len(b) // 2
    if n_pairs == 0:
        return np.array([])
    log_ratios = 2.0 * (np.log(b[0:2 * n_pairs:2]) - np.log(b[1:2 * n_pairs:2]))
    return np.cumsum(log_ratios)


def plateau_series_value(b) -> float:
    """Series reading of the plateau: 1 / (1 + sum of truncated products).

    Products are accumulated in the log domain; hundreds of ratio factors
    underflow in linear arithmetic.
    """
    b = np.asarray(b, dtype=float)
    logs = _log_pair_products(b)
    if len(logs) == 0:
        return 1.0
    # stable sum: factor out the largest log
    m = logs.max()
    total = np.exp(m) * np.sum(np.exp(logs - m))
    return float(1.0 / (1.0 + total))


def zero_mode(b) -> Optional[ZeroMode]:
    """Boundary zero mode phi with b_n phi_n + b_{n+1} phi_{n+2} = 0.

    The recursion fills odd components only and closes only when the matrix
    dimension is odd; returns None for even dimension.  Computed in
    log-magnitude plus sign form to survive long products, normalised with
    phi_1 > 0.
    """
    b = np.asarray(b, dtype=float)
    tri = TridiagonalLiouvillian(b)   # validates positivity
    dim = tri.dimension
    if dim % 2 == 0:
        return None
    logs = _log_pair_products(b)                    # log products for phi_3, phi_5, ...
    log_mag = np.concatenate(([0.0], 0.5 * logs))   # phi_{2k+1} magnitudes relative to phi_1
    signs = (-1.0) ** np.arange(len(log_mag))       # phi_{n+2} = -(b_n/b_{n+1}) phi_n
    # normalise: sum phi^2 = exp(2*log_mag) summed, in log domain
    m = log_mag.max()
    norm_sq = np.exp(2 * m) * np.sum(np.exp(2 * (log_mag - m)))
    phi_odd = signs * np.exp(log_mag - 0.5 * np.log(norm_sq))
    phi = np.zeros(dim)
    phi[0::2] = phi_odd
    return ZeroMode(phi=phi, overlap_sq=float(phi_odd[0] ** 2))


def plateau_from_b(b) -> PlateauEstimate:
    """Infinite-time plateau from the coefficients, both truncation readings.

    ``strict``: |phi_1|^2 of the exact zero mode for odd-dimensional
    matrices, 0 for even dimension (no zero eigenvalue).  ``series``: the
    truncated series evaluated regardless of parity.  Both lie in [0, 1].
    """
    b = np.asarray(b, dtype=float)
    if len(b) == 0:
        raise ValueError("empty coefficient sequence")
    series = plateau_series_value(b)
    zm = zero_mode(b)
    strict = zm.overlap_sq if zm is not None else 0.0
    return PlateauEstimate(strict=strict, series=series, n_pairs=len(b) // 2)


def spectral_density(b, omega_grid, epsilon: float) -> np.ndarray:
    """Phi(omega) = Im <1|(omega - i eps - L)^{-1}|1> / pi by continued fraction.

    The recursion descends through the b sequence:
    G_N = 1/z, G_k = 1/(z - b_{k+1}^2 G_{k+1}), Phi = Im G_0 / pi with
    z = omega - i eps.  Nonnegative up to broadening artifacts and
    normalised to unit integral on a wide enough grid.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    b = np.asarray(b, dtype=float)
    if len(b) == 0:
        raise ValueError("empty coefficient sequence")
    omega = np.asarray(omega_grid, dtype=float)
    z = omega - 1j * epsilon
    g = 1.0 / z
    for bn in b[::-1]:
        g = 1.0 / (z - bn * bn * g)
    return np.imag(g) / np.pi


def default_broadening(b) -> float:
    """10x the mean level spacing of the tridiagonal spectrum."""
    tri = TridiagonalLiouvillian(np.asarray(b, dtype=float))
    evals, _ = tri.eigensystem()
    width = float(evals[-1] - evals[0])
    return 10.0 * width / max(tri.dimension - 1, 1)
