"""Shared instance generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from itescan import (
    LocalHamiltonian,
    PauliString,
    ProductState,
    SemiClassicalState,
    parse_hamiltonian,
)

LETTERS = "XYZ"


def random_chain(rng: np.random.Generator, n_qubits: int, with_fields: bool = False):
    """2-local nearest-neighbor chain with random letters and coefficients."""
    terms = []
    for i in range(n_qubits - 1):
        a, b = rng.choice(list(LETTERS)), rng.choice(list(LETTERS))
        coeff = float(rng.uniform(-1.0, 1.0)) or 0.5
        terms.append((coeff, PauliString(n_qubits, ((i, a), (i + 1, b)))))
    if with_fields:
        for i in range(n_qubits):
            coeff = float(rng.uniform(-1.0, 1.0)) or 0.5
            terms.append((coeff, PauliString(n_qubits, ((i, rng.choice(list(LETTERS))),))))
    return LocalHamiltonian(n_qubits, tuple(terms))


def random_hamiltonian(rng: np.random.Generator, n_qubits: int, n_terms: int, locality: int = 2):
    """Random distinct Pauli strings with coefficients in [-1, 1]."""
    strings = {}
    guard = 0
    while len(strings) < n_terms:
        guard += 1
        if guard > 100 * n_terms:
            break
        k = int(rng.integers(1, locality + 1))
        qubits = rng.choice(n_qubits, size=min(k, n_qubits), replace=False)
        letters = tuple(sorted((int(q), str(rng.choice(list(LETTERS)))) for q in qubits))
        strings.setdefault(letters, PauliString(n_qubits, letters))
    terms = tuple(
        (float(rng.uniform(-1.0, 1.0)) or 0.3, s) for s in strings.values()
    )
    return LocalHamiltonian(n_qubits, terms)


def random_product_state(rng: np.random.Generator, n_qubits: int) -> ProductState:
    raw = rng.normal(size=(n_qubits, 2)) + 1j * rng.normal(size=(n_qubits, 2))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return ProductState(raw)


def random_semiclassical(
    rng: np.random.Generator, n_qubits: int, n_configs: int
) -> SemiClassicalState:
    amps = rng.normal(size=n_configs) + 1j * rng.normal(size=n_configs)
    states = [random_product_state(rng, n_qubits) for _ in range(n_configs)]
    gram = sum(
        a_j * np.conj(a_k) * s_k.overlap(s_j)
        for a_j, s_j in zip(amps, states)
        for a_k, s_k in zip(amps, states)
    ).real
    amps /= np.sqrt(gram)
    return SemiClassicalState(tuple((complex(a), s) for a, s in zip(amps, states)))


def random_basis_semiclassical(
    rng: np.random.Generator, n_qubits: int, n_configs: int
) -> SemiClassicalState:
    """Semi-classical state over distinct computational-basis configurations."""
    indices = rng.choice(2 ** n_qubits, size=n_configs, replace=False)
    amps = rng.normal(size=n_configs) + 1j * rng.normal(size=n_configs)
    amps /= np.linalg.norm(amps)
    comps = tuple(
        (complex(a), ProductState.computational(int(i), n_qubits))
        for a, i in zip(amps, indices)
    )
    return SemiClassicalState(comps)


def tfim_chain(n_qubits: int, coupling: float = -1.0, field: float = -1.0):
    lines = [f"{coupling} Z{i} Z{i + 1}" for i in range(n_qubits - 1)]
    lines += [f"{field} X{i}" for i in range(n_qubits)]
    return parse_hamiltonian("\n".join(lines), n_qubits=n_qubits)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
