"""Dense exact-diagonalization ground truth for desk-scale instances.

Supplies spectra, exact partition functions D(beta) = <psi| exp(-beta (H-x))
|psi>, residues, Loschmidt amplitudes, and zero-free grid scans, all from a
full Hermitian eigendecomposition. Capped at 14 qubits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .dense import dense_hamiltonian
from .errors import CapExceededError
from .pauli import LocalHamiltonian
from .states import SemiClassicalState

_DEGENERACY_REL_TOL = 1e-9


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues (ascending), guiding-state overlaps, and derived scalars.

    ``p0`` aggregates the whole degenerate ground eigenspace; ``gap`` is the
    distance from the ground energy to the first level strictly above it
    (degeneracy tolerance 1e-9 * ||H||).
    """

    eigenvalues: np.ndarray
    overlaps: np.ndarray
    ground_energy: float
    gap: float
    p0: float
    ground_degeneracy: int

    def __post_init__(self):
        total = float(np.sum(self.overlaps))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"overlaps sum to {total}, expected 1")
        if self.gap < 0:
            raise ValueError("negative gap")


def spectrum(
    hamiltonian: LocalHamiltonian,
    state: SemiClassicalState,
    caps: Caps = DEFAULT_CAPS,
) -> SpectralData:
    """Full eigendecomposition plus overlaps p_j = |<psi_j|psi>|^2."""
    n = hamiltonian.n_qubits
    if n > caps.oracle_qubits:
        raise CapExceededError(
            f"{n} qubits exceeds the dense-oracle cap of {caps.oracle_qubits}"
        )
    if state.n_qubits != n:
        raise ValueError("state and Hamiltonian qubit counts differ")
    matrix = dense_hamiltonian(hamiltonian)
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    psi = state.to_dense()
    amplitudes = eigenvectors.conj().T @ psi
    overlaps = np.abs(amplitudes) ** 2
    scale = float(np.max(np.abs(eigenvalues)))
    tol = _DEGENERACY_REL_TOL * max(scale, 1.0)
    ground = float(eigenvalues[0])
    degeneracy = int(np.sum(eigenvalues <= ground + tol))
    above = eigenvalues[eigenvalues > ground + tol]
    gap = float(above[0] - ground) if above.size else float("inf")
    p0 = float(np.sum(overlaps[:degeneracy]))
    return SpectralData(
        eigenvalues=eigenvalues,
        overlaps=overlaps,
        ground_energy=ground,
        gap=gap,
        p0=p0,
        ground_degeneracy=degeneracy,
    )


def exact_partition(
    hamiltonian: LocalHamiltonian,
    shift: float,
    beta: complex,
    state: SemiClassicalState,
    caps: Caps = DEFAULT_CAPS,
) -> complex:
    """sum_j p_j exp(-beta (E_j - shift)), exact through the eigenbasis."""
    data = spectrum(hamiltonian, state, caps)
    return partition_from_spectrum(data, shift, beta)


def partition_from_spectrum(data: SpectralData, shift: float, beta: complex) -> complex:
    weights = data.overlaps
    return complex(np.sum(weights * np.exp(-beta * (data.eigenvalues - shift))))


def exact_residue(
    hamiltonian: LocalHamiltonian,
    shift: float,
    beta: float,
    state: SemiClassicalState,
    caps: Caps = DEFAULT_CAPS,
) -> float:
    """D_beta(H - x) - D_{2 beta}(H - x) for real beta > 0."""
    if beta <= 0:
        raise ValueError("residue is defined for real beta > 0")
    data = spectrum(hamiltonian, state, caps)
    return residue_from_spectrum(data, shift, beta)


def residue_from_spectrum(data: SpectralData, shift: float, beta: float) -> float:
    d1 = partition_from_spectrum(data, shift, beta)
    d2 = partition_from_spectrum(data, shift, 2.0 * beta)
    return float((d1 - d2).real)


def exact_loschmidt(
    hamiltonian: LocalHamiltonian,
    time: float,
    state: SemiClassicalState,
    caps: Caps = DEFAULT_CAPS,
) -> complex:
    """<psi| exp(-i H t) |psi> = sum_j p_j exp(-i E_j t)."""
    data = spectrum(hamiltonian, state, caps)
    return loschmidt_from_spectrum(data, time)


def loschmidt_from_spectrum(data: SpectralData, time) -> complex | np.ndarray:
    """Loschmidt amplitude; vectorized over an array of times."""
    t = np.asarray(time, dtype=float)
    values = data.overlaps @ np.exp(-1j * np.outer(data.eigenvalues, np.atleast_1d(t)))
    if t.ndim == 0:
        return complex(values[0])
    return values


@dataclass(frozen=True)
class ZeroFreeScan:
    """Grid minimum of |D| over a complex-beta rectangle, with the
    ground-referenced modulus min |sum_j p_j exp(-beta (E_j - E_0))| and the
    worst-case lower bound 2 p0 - 1 it is compared against."""

    min_abs_partition: float
    argmin_beta: complex
    min_abs_shifted: float
    argmin_beta_shifted: complex
    lower_bound: float
    bound_ok: bool


def zero_free_scan(
    hamiltonian: LocalHamiltonian,
    state: SemiClassicalState,
    re_range: tuple[float, float] = (0.01, 5.0),
    im_range: tuple[float, float] = (-5.0, 5.0),
    resolution: int = 40,
    caps: Caps = DEFAULT_CAPS,
) -> ZeroFreeScan:
    """Scan |D_beta(H)| on a grid restricted to Re(beta) > 0."""
    if re_range[0] <= 0:
        raise ValueError("grid must satisfy Re(beta) > 0")
    data = spectrum(hamiltonian, state, caps)
    re = np.linspace(re_range[0], re_range[1], resolution)
    im = np.linspace(im_range[0], im_range[1], resolution)
    betas = re[:, None] + 1j * im[None, :]
    flat = betas.ravel()
    # rows: grid points; columns: eigenvalues
    raw = np.exp(-np.outer(flat, data.eigenvalues)) @ data.overlaps
    shifted = np.exp(-np.outer(flat, data.eigenvalues - data.ground_energy)) @ data.overlaps
    abs_raw = np.abs(raw)
    abs_shifted = np.abs(shifted)
    i_raw = int(np.argmin(abs_raw))
    i_shifted = int(np.argmin(abs_shifted))
    lower = 2.0 * data.p0 - 1.0
    return ZeroFreeScan(
        min_abs_partition=float(abs_raw[i_raw]),
        argmin_beta=complex(flat[i_raw]),
        min_abs_shifted=float(abs_shifted[i_shifted]),
        argmin_beta_shifted=complex(flat[i_shifted]),
        lower_bound=lower,
        bound_ok=bool(abs_shifted[i_shifted] >= lower - 1e-9),
    )
