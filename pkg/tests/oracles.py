"""Independent dense-matrix oracles used by the test suite.

Everything here works on explicit 2^L x 2^L matrices built by Kronecker
products, deliberately sharing no code with the package's sparse algebra,
so that agreement between the two is a real cross-check.
"""

import numpy as np

SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_pauli(x_mask: int, z_mask: int, n_sites: int) -> np.ndarray:
    """Dense matrix of the canonical (Hermitian) Pauli string for given masks.

    Site j corresponds to bit j of the computational-basis index, i.e. the
    matrix is sigma_{L-1} (x) ... (x) sigma_0.
    """
    m = np.array([[1.0 + 0.0j]])
    for j in range(n_sites):
        xb, zb = (x_mask >> j) & 1, (z_mask >> j) & 1
        s = SIGMA["I" if (xb, zb) == (0, 0) else "X" if (xb, zb) == (1, 0)
                  else "Z" if (xb, zb) == (0, 1) else "Y"]
        m = np.kron(s, m)
    return m


def dense_operator(vec) -> np.ndarray:
    """Dense matrix of an OperatorVector (reads only masks and coefficients)."""
    d = 2 ** vec.n_sites
    m = np.zeros((d, d), dtype=complex)
    for p, c in vec.items():
        m += c * dense_pauli(p.x_mask, p.z_mask, p.n_sites)
    return m


def dense_model(model) -> np.ndarray:
    """Dense Hamiltonian assembled directly from a model's term list."""
    d = 2 ** model.n_sites
    m = np.zeros((d, d), dtype=complex)
    for p, c in model.terms:
        m += c * dense_pauli(p.x_mask, p.z_mask, p.n_sites)
    return m


def trace_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Infinite-temperature inner product Tr(a^dag b) / 2^L on dense matrices."""
    return np.trace(a.conj().T @ b) / a.shape[0]


def dense_lanczos(h: np.ndarray, seed: np.ndarray, n_max: int, reorthogonalize: bool = True):
    """Textbook operator Lanczos on dense matrices; returns the b sequence.

    With ``reorthogonalize`` the new vector is Gram-Schmidt-corrected against
    the full retained basis (twice), otherwise the bare three-term recurrence
    is used.
    """
    b = []
    o_prev = np.zeros_like(seed)
    o_cur = seed / np.sqrt(trace_inner(seed, seed).real)
    basis = [o_cur]
    b_prev = 0.0
    for _ in range(n_max):
        op = h @ o_cur - o_cur @ h - b_prev * o_prev
        if reorthogonalize:
            for _ in range(2):
                for v in basis:
                    op = op - trace_inner(v, op) * v
        bn = np.sqrt(max(trace_inner(op, op).real, 0.0))
        if bn < 1e-10 * max(b, default=1.0) or bn == 0.0:
            return np.array(b), True
        op = op / bn
        basis.append(op)
        o_prev, o_cur, b_prev = o_cur, op, bn
        b.append(bn)
    return np.array(b), False
