"""Dense matrix builders backing the exact oracle.

Basis convention is little-endian throughout: bit q of a basis index i is
(i >> q) & 1, and a product state's dense vector is the Kronecker product
folded from the highest qubit down.
"""

from __future__ import annotations

import numpy as np

from .pauli import LocalHamiltonian, PauliString

_I4 = np.array([1, 1j, -1, -1j])


def _popcount(values: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(values)
    out = np.zeros_like(values)
    v = values.copy()
    while np.any(v):
        out += v & 1
        v >>= 1
    return out


def dense_term(string: PauliString) -> np.ndarray:
    """Dense 2**n x 2**n matrix of a single Pauli string."""
    n = string.n_qubits
    dim = 1 << n
    x_bits, z_bits, n_y = string.masks()
    cols = np.arange(dim)
    rows = cols ^ x_bits
    phases = _I4[n_y % 4] * np.where(_popcount(cols & z_bits) % 2, -1.0, 1.0)
    matrix = np.zeros((dim, dim), dtype=complex)
    matrix[rows, cols] = phases
    return matrix


def dense_hamiltonian(hamiltonian: LocalHamiltonian) -> np.ndarray:
    """Dense Hermitian matrix of a Pauli-sum Hamiltonian."""
    dim = 1 << hamiltonian.n_qubits
    matrix = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for coeff, string in hamiltonian.terms:
        x_bits, z_bits, n_y = string.masks()
        rows = cols ^ x_bits
        phases = _I4[n_y % 4] * np.where(_popcount(cols & z_bits) % 2, -1.0, 1.0)
        matrix[rows, cols] += coeff * phases
    return matrix


def embed_gate(gate: np.ndarray, targets: tuple[int, ...], n_qubits: int) -> np.ndarray:
    """Embed a 1- or 2-qubit gate matrix into the full 2**n space.

    The gate's local basis index uses the first-listed target as the most
    significant bit, matching ``np.kron(op_on_first, op_on_second)``.
    """
    n_t = len(targets)
    dim_local = 1 << n_t
    dim = 1 << n_qubits
    cols = np.arange(dim)
    local = np.zeros(dim, dtype=np.int64)
    base = cols.copy()
    for k, t in enumerate(targets):
        local |= ((cols >> t) & 1) << (n_t - 1 - k)
        base &= ~(1 << t)
    full = np.zeros((dim, dim), dtype=complex)
    for out_local in range(dim_local):
        rows = base.copy()
        for k, t in enumerate(targets):
            if (out_local >> (n_t - 1 - k)) & 1:
                rows |= 1 << t
        full[rows, cols] = gate[out_local, local]
    return full
