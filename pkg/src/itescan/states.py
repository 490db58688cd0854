"""Product states and semi-classical guiding states.

A semi-classical state is a superposition of polynomially many product
states, sum_j a_j |x_j>. Any dense vector can be written this way with one
configuration per computational-basis component, which is how engineered
test states are constructed at desk scale.

State file format (JSON):
    {"n_qubits": n,
     "components": [{"amp_re": .., "amp_im": ..,
                     "qubits": [[a0_re, a0_im, a1_re, a1_im], ...]}, ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParseError
from .pauli import PauliString

_QUBIT_NORM_TOL = 1e-12
_STATE_NORM_TOL = 1e-10
_PHASE_FLOOR = 1e-12


class ProductState:
    """Tensor product of normalized single-qubit states.

    Stored as an (n, 2) complex array; each row must have unit norm within
    1e-12. Instances are immutable.
    """

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes: np.ndarray):
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[1] != 2:
            raise DimensionError("product state needs an (n, 2) amplitude array")
        norms = np.linalg.norm(amps, axis=1)
        if np.any(np.abs(norms - 1.0) > _QUBIT_NORM_TOL):
            raise ValueError("single-qubit amplitudes must be normalized within 1e-12")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("ProductState is immutable")

    def __eq__(self, other):
        if not isinstance(other, ProductState):
            return NotImplemented
        return self.amplitudes.shape == other.amplitudes.shape and bool(
            np.array_equal(self.amplitudes, other.amplitudes)
        )

    def __hash__(self):
        return hash(self.amplitudes.tobytes())

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def computational(cls, bits: int, n_qubits: int) -> "ProductState":
        """Basis state |b> with bit q of ``bits`` giving qubit q's value."""
        amps = np.zeros((n_qubits, 2), dtype=complex)
        for q in range(n_qubits):
            amps[q, (bits >> q) & 1] = 1.0
        return cls(amps)

    @classmethod
    def plus(cls, n_qubits: int) -> "ProductState":
        """|+>^n, the uniform X-basis state."""
        amps = np.full((n_qubits, 2), 1 / np.sqrt(2), dtype=complex)
        return cls(amps)

    def qubit(self, q: int) -> np.ndarray:
        return self.amplitudes[q]

    def to_dense(self) -> np.ndarray:
        """Full 2**n vector. Index bit q = (index >> q) & 1 (little-endian)."""
        vec = np.array([1.0 + 0j])
        for q in range(self.n_qubits):
            vec = np.kron(self.amplitudes[q], vec)
        return vec

    def overlap(self, other: "ProductState") -> complex:
        """<self|other>, a product of per-qubit inner products."""
        if other.n_qubits != self.n_qubits:
            raise DimensionError("qubit counts differ")
        per_qubit = np.sum(np.conj(self.amplitudes) * other.amplitudes, axis=1)
        return complex(np.prod(per_qubit))


def apply_pauli(string: PauliString, state: ProductState) -> tuple[complex, ProductState]:
    """Apply a Pauli string to a product state: P|s> = phase * |out>.

    The output keeps product form; on each touched qubit the leading
    nonzero amplitude is made real-positive and the extracted phase is
    accumulated, so basis states reproduce textbook Pauli algebra
    (Y|0> = i|1>, Z|1> = -|1>). |phase| = 1 always.
    """
    if string.n_qubits != state.n_qubits:
        raise DimensionError("Pauli string and state qubit counts differ")
    amps = np.array(state.amplitudes, dtype=complex)
    phase = 1.0 + 0j
    for qubit, letter in string.letters:
        a0, a1 = amps[qubit]
        if letter == "X":
            new = np.array([a1, a0])
        elif letter == "Y":
            new = np.array([-1j * a1, 1j * a0])
        else:  # Z
            new = np.array([a0, -a1])
        lead = new[0] if abs(new[0]) > _PHASE_FLOOR else new[1]
        qubit_phase = lead / abs(lead)
        phase *= qubit_phase
        amps[qubit] = new / qubit_phase
    return phase, ProductState(amps)


@dataclass(frozen=True)
class SemiClassicalState:
    """Normalized superposition of product-state configurations.

    Validation checks the physical norm <psi|psi> = 1 through the Gram
    matrix of the configurations; for orthogonal configurations (e.g.
    distinct basis states) this reduces to sum_j |a_j|^2 = 1.
    """

    components: tuple[tuple[complex, ProductState], ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("need at least one configuration")
        n = self.components[0][1].n_qubits
        for _, state in self.components:
            if state.n_qubits != n:
                raise DimensionError("mixed qubit counts among configurations")
        total = 0.0
        for a_j, s_j in self.components:
            for a_k, s_k in self.components:
                total += (a_j * np.conj(a_k) * s_k.overlap(s_j)).real
        if abs(total - 1.0) > _STATE_NORM_TOL:
            raise ValueError(f"state norm squared is {total}, expected 1")

    @property
    def n_qubits(self) -> int:
        return self.components[0][1].n_qubits

    @property
    def n_configurations(self) -> int:
        return len(self.components)

    @classmethod
    def single(cls, state: ProductState) -> "SemiClassicalState":
        return cls(((1.0 + 0j, state),))

    @classmethod
    def from_dense(cls, vector: np.ndarray, tol: float = 1e-12) -> "SemiClassicalState":
        """Expand a dense state vector over computational-basis configurations."""
        vec = np.asarray(vector, dtype=complex).ravel()
        n = int(np.log2(vec.size))
        if 2 ** n != vec.size:
            raise DimensionError("vector length is not a power of two")
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("zero vector")
        vec = vec / norm
        comps = [
            (complex(amp), ProductState.computational(idx, n))
            for idx, amp in enumerate(vec)
            if abs(amp) > tol
        ]
        return cls(tuple(comps))

    def to_dense(self) -> np.ndarray:
        vec = np.zeros(2 ** self.n_qubits, dtype=complex)
        for amp, state in self.components:
            vec += amp * state.to_dense()
        return vec


def load_state_json(text: str) -> SemiClassicalState:
    """Parse the JSON state format documented in the module docstring."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid state JSON: {exc}") from exc
    try:
        n = int(payload["n_qubits"])
        comps = []
        for entry in payload["components"]:
            amp = complex(entry["amp_re"], entry["amp_im"])
            rows = entry["qubits"]
            if len(rows) != n:
                raise ParseError(f"component has {len(rows)} qubit rows, expected {n}")
            amps = np.array(
                [[complex(r[0], r[1]), complex(r[2], r[3])] for r in rows]
            )
            comps.append((amp, ProductState(amps)))
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"malformed state JSON: {exc}") from exc
    return SemiClassicalState(tuple(comps))


def dump_state_json(state: SemiClassicalState) -> str:
    payload = {
        "n_qubits": state.n_qubits,
        "components": [
            {
                "amp_re": amp.real,
                "amp_im": amp.imag,
                "qubits": [
                    [row[0].real, row[0].imag, row[1].real, row[1].imag]
                    for row in prod.amplitudes
                ],
            }
            for amp, prod in state.components
        ],
    }
    return json.dumps(payload)
