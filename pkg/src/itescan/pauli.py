"""Sparse Pauli strings and local Pauli-sum Hamiltonians.

A Hamiltonian is H = sum_T lambda_T * P_T where every P_T is a distinct
non-identity Pauli string (operator norm 1) and lambda_T is real. Strings
store only their non-identity letters, so Hamiltonians on hundreds of
qubits stay cheap as long as the term count is moderate; only the dense
oracle caps the qubit count.

Text format (one term per line, ``#`` comments):

    -1.0 Z0 Z1
    0.5  X0
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .errors import (
    CapExceededError,
    DimensionError,
    EmptyHamiltonianError,
    ParseError,
)

PAULI_LETTERS = "XYZ"

# single-qubit matrices, indexed by letter
PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-qubit Pauli operators, stored sparsely.

    ``letters`` holds (qubit, letter) pairs sorted by qubit index; qubits not
    listed carry the identity. The support is exactly the listed qubits.
    """

    n_qubits: int
    letters: tuple[tuple[int, str], ...]

    def __post_init__(self):
        seen = set()
        for qubit, letter in self.letters:
            if letter not in PAULI_LETTERS:
                raise ParseError(f"invalid Pauli letter {letter!r}")
            if not 0 <= qubit < self.n_qubits:
                raise ParseError(
                    f"qubit index {qubit} out of range for n={self.n_qubits}"
                )
            if qubit in seen:
                raise ParseError(f"duplicate qubit index {qubit} in one term")
            seen.add(qubit)
        object.__setattr__(self, "letters", tuple(sorted(self.letters)))

    @classmethod
    def from_label(cls, n_qubits: int, *labels: str) -> "PauliString":
        """Build from labels like ``Z0``, ``X3``."""
        parsed = []
        for label in labels:
            if len(label) < 2 or label[0].upper() not in PAULI_LETTERS:
                raise ParseError(f"malformed Pauli label {label!r}")
            try:
                qubit = int(label[1:])
            except ValueError as exc:
                raise ParseError(f"malformed Pauli label {label!r}") from exc
            parsed.append((qubit, label[0].upper()))
        return cls(n_qubits, tuple(parsed))

    @property
    def support(self) -> frozenset[int]:
        return frozenset(q for q, _ in self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return len(self.letters)

    def letter_on(self, qubit: int) -> str:
        for q, letter in self.letters:
            if q == qubit:
                return letter
        return "I"

    def masks(self) -> tuple[int, int, int]:
        """Symplectic form (x_bits, z_bits, n_y).

        The operator equals i**n_y * prod_q X_q**x * Z_q**z, with X applied
        after Z on each qubit. Y = i * X * Z fixes the phase convention.
        """
        x_bits = z_bits = n_y = 0
        for qubit, letter in self.letters:
            if letter in ("X", "Y"):
                x_bits |= 1 << qubit
            if letter in ("Z", "Y"):
                z_bits |= 1 << qubit
            if letter == "Y":
                n_y += 1
        return x_bits, z_bits, n_y

    def __str__(self) -> str:
        return " ".join(f"{letter}{q}" for q, letter in self.letters) or "I"


@dataclass(frozen=True)
class LocalHamiltonian:
    """Merged, validated Pauli-sum Hamiltonian.

    ``terms`` holds (coefficient, string) pairs with distinct strings and
    nonzero coefficients; construction merges duplicates by coefficient
    addition and drops exact zeros.
    """

    n_qubits: int
    terms: tuple[tuple[float, PauliString], ...]

    def __post_init__(self):
        merged: dict[tuple, float] = {}
        strings: dict[tuple, PauliString] = {}
        for coeff, string in self.terms:
            if string.n_qubits != self.n_qubits:
                raise DimensionError(
                    f"term on {string.n_qubits} qubits in a {self.n_qubits}-qubit Hamiltonian"
                )
            key = string.letters
            merged[key] = merged.get(key, 0.0) + float(coeff)
            strings[key] = string
        kept = tuple(
            (coeff, strings[key])
            for key, coeff in sorted(merged.items())
            if coeff != 0.0
        )
        if not kept:
            raise EmptyHamiltonianError("empty after merge")
        object.__setattr__(self, "terms", kept)

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @cached_property
    def locality(self) -> int:
        """Largest support size among the terms."""
        return max(string.weight for _, string in self.terms)

    @cached_property
    def coefficient_norm(self) -> float:
        """Triangle-inequality bound sum_T |lambda_T| >= ||H||."""
        return float(sum(abs(c) for c, _ in self.terms))

    def scaled(self, factor: float) -> "LocalHamiltonian":
        return LocalHamiltonian(
            self.n_qubits, tuple((c * factor, s) for c, s in self.terms)
        )

    def __str__(self) -> str:
        return serialize_hamiltonian(self)


def parse_hamiltonian(text: str, n_qubits: int | None = None) -> LocalHamiltonian:
    """Parse the one-term-per-line text format into a merged Hamiltonian.

    When ``n_qubits`` is omitted it is inferred as 1 + the largest qubit
    index. Duplicate strings are merged; exact cancellations are dropped,
    and a fully cancelled input raises ``EmptyHamiltonianError``.
    """
    raw_terms: list[tuple[float, list[str]]] = []
    max_index = -1
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) < 2:
            raise ParseError(f"line {lineno}: expected '<coeff> <LETTER><index> ...'")
        try:
            coeff = float(parts[0])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad coefficient {parts[0]!r}") from exc
        for label in parts[1:]:
            if len(label) < 2 or label[0].upper() not in PAULI_LETTERS:
                raise ParseError(f"line {lineno}: malformed Pauli label {label!r}")
            try:
                max_index = max(max_index, int(label[1:]))
            except ValueError as exc:
                raise ParseError(f"line {lineno}: malformed Pauli label {label!r}") from exc
        raw_terms.append((coeff, parts[1:]))
    if not raw_terms:
        raise EmptyHamiltonianError("no terms in input")
    n = n_qubits if n_qubits is not None else max_index + 1
    try:
        terms = tuple(
            (coeff, PauliString.from_label(n, *labels)) for coeff, labels in raw_terms
        )
    except ParseError:
        raise
    return LocalHamiltonian(n, terms)


def serialize_hamiltonian(hamiltonian: LocalHamiltonian) -> str:
    """Canonical text form: terms sorted by support then letters."""
    ordered = sorted(hamiltonian.terms, key=lambda t: t[1].letters)
    lines = [f"{coeff!r} {string}" for coeff, string in ordered]
    return "\n".join(lines) + "\n"


def rescale_coefficients(hamiltonian: LocalHamiltonian) -> tuple[LocalHamiltonian, float]:
    """Divide all coefficients by max |lambda| so the result satisfies
    |lambda| <= 1. Returns (rescaled Hamiltonian, scale factor applied)."""
    scale = max(abs(c) for c, _ in hamiltonian.terms)
    if scale == 0.0:
        raise EmptyHamiltonianError("zero Hamiltonian")
    return hamiltonian.scaled(1.0 / scale), scale


def normalize_hamiltonian(
    hamiltonian: LocalHamiltonian,
    mode: str = "bound",
    caps: Caps = DEFAULT_CAPS,
) -> tuple[LocalHamiltonian, float]:
    """Rescale H to unit operator norm (or a certified upper bound of it).

    mode='exact' divides by the spectral norm from dense diagonalization
    (qubit-capped); mode='bound' divides by sum_T |lambda_T|, which the
    triangle inequality guarantees to be >= ||H||.
    """
    if mode == "bound":
        scale = hamiltonian.coefficient_norm
    elif mode == "exact":
        if hamiltonian.n_qubits > caps.oracle_qubits:
            raise CapExceededError(
                f"{hamiltonian.n_qubits} qubits exceeds the dense-oracle cap "
                f"of {caps.oracle_qubits}"
            )
        from .dense import dense_hamiltonian

        eigenvalues = np.linalg.eigvalsh(dense_hamiltonian(hamiltonian))
        scale = float(np.max(np.abs(eigenvalues)))
    else:
        raise ValueError(f"unknown normalization mode {mode!r}")
    if scale <= 0.0:
        raise EmptyHamiltonianError("zero Hamiltonian")
    return hamiltonian.scaled(1.0 / scale), scale
