"""Shallow circuits and exact Pauli-basis conjugation H -> U^dag H U.

Conjugating a Pauli sum by a shallow circuit keeps it a Pauli sum; every
gate expands the touched letters into the Pauli basis of its two-qubit
light cone exactly. A term-count cap guards against circuits too deep for
the downstream cluster machinery.

Circuit file format (JSON):
    {"n_qubits": n, "gates": [{"matrix": [[re, im], ...row-major...],
                               "targets": [q0, q1?]}, ...]}
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .errors import CapExceededError, DimensionError, ParseError
from .pauli import PAULI_MATRICES, LocalHamiltonian, PauliString

_UNITARY_TOL = 1e-10
_FINAL_PRUNE = 1e-14
_WORKING_PRUNE = 1e-16


class Gate:
    """A 1- or 2-qubit unitary with its target qubits.

    For two targets, the first-listed qubit is the most significant bit of
    the 4x4 matrix's basis index.
    """

    __slots__ = ("matrix", "targets")

    def __init__(self, matrix: np.ndarray, targets: tuple[int, ...]):
        mat = np.asarray(matrix, dtype=complex)
        targets = tuple(int(t) for t in targets)
        if len(set(targets)) != len(targets):
            raise DimensionError("repeated target qubit in one gate")
        expected = 1 << len(targets)
        if mat.shape != (expected, expected) or len(targets) not in (1, 2):
            raise DimensionError(
                f"gate on {len(targets)} targets needs a {expected}x{expected} matrix"
            )
        deviation = np.max(np.abs(mat.conj().T @ mat - np.eye(expected)))
        if deviation > _UNITARY_TOL:
            raise ValueError(f"gate matrix is not unitary (deviation {deviation:.2e})")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "targets", targets)

    def __setattr__(self, name, value):
        raise AttributeError("Gate is immutable")


@dataclass(frozen=True)
class ShallowCircuit:
    """Ordered gate list; gates apply in list order (first gate acts first)."""

    n_qubits: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        for gate in self.gates:
            for t in gate.targets:
                if not 0 <= t < self.n_qubits:
                    raise DimensionError(f"gate target {t} out of range")

    @property
    def depth(self) -> int:
        return len(self.gates)

    def to_dense(self) -> np.ndarray:
        from .dense import embed_gate

        unitary = np.eye(1 << self.n_qubits, dtype=complex)
        for gate in self.gates:
            unitary = embed_gate(gate.matrix, gate.targets, self.n_qubits) @ unitary
        return unitary


def _local_pauli(letters: tuple[str, ...]) -> np.ndarray:
    op = PAULI_MATRICES[letters[0]]
    for letter in letters[1:]:
        op = np.kron(op, PAULI_MATRICES[letter])
    return op


def _conjugate_once(
    terms: dict[tuple, float], gate: Gate, n_qubits: int, cap: int
) -> dict[tuple, float]:
    n_t = len(gate.targets)
    dim_local = 1 << n_t
    basis = list(itertools.product("IXYZ", repeat=n_t))
    basis_mats = {letters: _local_pauli(letters) for letters in basis}
    out: dict[tuple, float] = {}
    for letters, coeff in terms.items():
        on_target = tuple(dict(letters).get(t, "I") for t in gate.targets)
        rest = tuple(p for p in letters if p[0] not in gate.targets)
        if all(letter == "I" for letter in on_target):
            out[letters] = out.get(letters, 0.0) + coeff
            continue
        conjugated = gate.matrix.conj().T @ basis_mats[on_target] @ gate.matrix
        for new_letters in basis:
            weight = np.trace(basis_mats[new_letters] @ conjugated) / dim_local
            if abs(weight.imag) > 1e-9:
                raise ValueError("conjugation produced a non-Hermitian expansion")
            w = weight.real
            if abs(w) < _WORKING_PRUNE:
                continue
            merged = tuple(sorted(
                rest + tuple(
                    (t, letter)
                    for t, letter in zip(gate.targets, new_letters)
                    if letter != "I"
                )
            ))
            out[merged] = out.get(merged, 0.0) + coeff * w
    if len(out) > cap:
        raise CapExceededError(
            f"conjugation produced {len(out)} terms, above the cap of {cap} "
            "(circuit too deep for the cluster backend)"
        )
    return out


def conjugate_by_circuit(
    hamiltonian: LocalHamiltonian,
    circuit: ShallowCircuit,
    caps: Caps = DEFAULT_CAPS,
) -> LocalHamiltonian:
    """Exact similarity transform U^dag H U as a merged Pauli sum.

    Terms with |coefficient| < 1e-14 are dropped from the result.
    """
    if circuit.n_qubits != hamiltonian.n_qubits:
        raise DimensionError("circuit and Hamiltonian qubit counts differ")
    terms = {string.letters: 0.0 for _, string in hamiltonian.terms}
    for coeff, string in hamiltonian.terms:
        terms[string.letters] += coeff
    for gate in reversed(circuit.gates):
        terms = _conjugate_once(terms, gate, hamiltonian.n_qubits, caps.conjugation_terms)
    kept = tuple(
        (coeff, PauliString(hamiltonian.n_qubits, letters))
        for letters, coeff in terms.items()
        if abs(coeff) >= _FINAL_PRUNE
    )
    return LocalHamiltonian(hamiltonian.n_qubits, kept)


def load_circuit_json(text: str) -> ShallowCircuit:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid circuit JSON: {exc}") from exc
    try:
        n = int(payload["n_qubits"])
        gates = []
        for entry in payload["gates"]:
            targets = tuple(entry["targets"])
            dim = 1 << len(targets)
            flat = [complex(re, im) for re, im in entry["matrix"]]
            if len(flat) != dim * dim:
                raise ParseError(
                    f"gate on {len(targets)} targets needs {dim * dim} matrix entries"
                )
            gates.append(Gate(np.array(flat).reshape(dim, dim), targets))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed circuit JSON: {exc}") from exc
    return ShallowCircuit(n, tuple(gates))


def dump_circuit_json(circuit: ShallowCircuit) -> str:
    payload = {
        "n_qubits": circuit.n_qubits,
        "gates": [
            {
                "matrix": [[z.real, z.imag] for z in gate.matrix.ravel()],
                "targets": list(gate.targets),
            }
            for gate in circuit.gates
        ],
    }
    return json.dumps(payload)
