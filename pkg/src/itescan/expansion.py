"""Truncated-series estimation of imaginary-time matrix elements and
partition functions.

The estimator for <y| exp(-beta H) |x> is the formal logarithm of the
moment series sum_m (-beta)^m <y|H^m|x> / m!, truncated at an order chosen
from the geometric cluster tail. Through that order the log series is
term-identical to the connected-cluster expansion, so the cluster machinery
supplies the truncation order and the error bound while the series does the
arithmetic.

Moments are computed by sparse propagation in a symplectic-mask picture:
every Pauli product is X^x Z^z times a scalar, so H^m |state> is a sparse
dictionary over (x_bits, z_bits) masks regardless of which product state it
is applied to. Propagation depends only on H and is shared between
configuration pairs and truncation orders.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .errors import BackendError, CapExceededError, DegenerateOverlapError
from .graph import build_graph, beta_star
from .pauli import LocalHamiltonian
from .series import TruncatedSeries, series_eval, series_log
from .states import ProductState, SemiClassicalState

_OVERLAP_FLOOR = 1e-12
_FACTORIAL_LIMIT = 170  # largest m with m! finite in double precision


class _MaskPropagation:
    """Scaled levels w_m = H^m/m! applied to an abstract product state.

    Level m is a dict {(x_bits, z_bits): amplitude}; the represented vector
    is sum amp * X^x Z^z |state> for any product |state| chosen later.
    """

    def __init__(self, hamiltonian: LocalHamiltonian, caps: Caps):
        self.caps = caps
        self.term_data = []
        for coeff, string in hamiltonian.terms:
            x_bits, z_bits, n_y = string.masks()
            self.term_data.append((coeff * (1j ** (n_y % 4)), x_bits, z_bits))
        self.levels: list[dict[tuple[int, int], complex]] = [{(0, 0): 1.0 + 0j}]
        self._lock = threading.Lock()

    def extend(self, order: int) -> list[dict[tuple[int, int], complex]]:
        with self._lock:
            while len(self.levels) <= order:
                m_next = len(self.levels)
                prev = self.levels[-1]
                nxt: dict[tuple[int, int], complex] = {}
                for (x, z), amp in prev.items():
                    scaled = amp / m_next
                    for factor, xt, zt in self.term_data:
                        sign = -1.0 if (zt & x).bit_count() & 1 else 1.0
                        key = (xt ^ x, zt ^ z)
                        nxt[key] = nxt.get(key, 0j) + scaled * factor * sign
                if len(nxt) > self.caps.sparse_entries:
                    raise CapExceededError(
                        f"sparse vector grew past {self.caps.sparse_entries} entries"
                    )
                self.levels.append(nxt)
        return self.levels


@lru_cache(maxsize=16)
def _propagation(hamiltonian: LocalHamiltonian, caps: Caps) -> _MaskPropagation:
    return _MaskPropagation(hamiltonian, caps)


def _pair_table(bra: ProductState, ket: ProductState) -> np.ndarray:
    """Per-qubit inner products <bra_q| X^x Z^z |ket_q>, shape (n, 2, 2)."""
    n = ket.n_qubits
    table = np.empty((n, 2, 2), dtype=complex)
    for q in range(n):
        k0, k1 = ket.qubit(q)
        b = np.conj(bra.qubit(q))
        for z in (0, 1):
            a0, a1 = (k0, -k1) if z else (k0, k1)
            table[q, 0, z] = b[0] * a0 + b[1] * a1
            table[q, 1, z] = b[0] * a1 + b[1] * a0  # X swaps after Z
    return table


@dataclass(frozen=True)
class MomentTable:
    """Moments mu_m = <bra| H^m |ket> for m = 0..order.

    ``scaled`` holds mu_m / m!, the numerically safe primary data; the
    ``moments`` property rebuilds mu_m and overflows to inf past m = 170.
    """

    scaled: np.ndarray
    hamiltonian: LocalHamiltonian
    ket: ProductState
    bra: ProductState

    @property
    def order(self) -> int:
        return self.scaled.size - 1

    @property
    def moments(self) -> np.ndarray:
        out = np.empty_like(self.scaled)
        factorial = 1.0
        for m in range(self.scaled.size):
            out[m] = self.scaled[m] * factorial
            factorial = factorial * (m + 1) if m < _FACTORIAL_LIMIT else math.inf
        return out

    def conjugated(self) -> "MomentTable":
        """Table for the swapped pair <ket| H^m |bra> (H has real coefficients)."""
        return MomentTable(
            scaled=np.conj(self.scaled),
            hamiltonian=self.hamiltonian,
            ket=self.bra,
            bra=self.ket,
        )

    def amplitude_series(self) -> TruncatedSeries:
        """<bra| exp(-beta H) |ket> as a series in beta."""
        signs = np.where(np.arange(self.scaled.size) % 2, -1.0, 1.0)
        return TruncatedSeries(signs * self.scaled)


def compute_moments(
    hamiltonian: LocalHamiltonian,
    ket: ProductState,
    bra: ProductState,
    order: int,
    caps: Caps = DEFAULT_CAPS,
) -> MomentTable:
    """Exact moments by sparse mask propagation (qubit-capped, exact)."""
    n = hamiltonian.n_qubits
    if n > caps.sparse_qubits:
        raise CapExceededError(
            f"{n} qubits exceeds the sparse-propagation cap of {caps.sparse_qubits}"
        )
    if ket.n_qubits != n or bra.n_qubits != n:
        raise ValueError("state and Hamiltonian qubit counts differ")
    if order < 0:
        raise ValueError("order must be >= 0")
    levels = _propagation(hamiltonian, caps).extend(order)
    table = _pair_table(bra, ket)
    ip_cache: dict[tuple[int, int], complex] = {}

    def inner(mask: tuple[int, int]) -> complex:
        cached = ip_cache.get(mask)
        if cached is None:
            x, z = mask
            value = 1.0 + 0j
            for q in range(n):
                value *= table[q, (x >> q) & 1, (z >> q) & 1]
            ip_cache[mask] = cached = value
        return cached

    scaled = np.array(
        [
            sum(amp * inner(mask) for mask, amp in levels[m].items())
            for m in range(order + 1)
        ],
        dtype=complex,
    )
    return MomentTable(scaled=scaled, hamiltonian=hamiltonian, ket=ket, bra=bra)


def truncation_order(
    n_terms: int, beta: complex, threshold: float, accuracy: float
) -> int:
    """Series order delivering the requested tail accuracy.

    ceil( log(|S| / (eps (1 - r))) / log(1/r) ) with r = |beta|/beta_star,
    minimum 1. Raises if |beta| >= beta_star (expansion divergent).
    """
    r = abs(beta) / threshold
    if r >= 1.0:
        raise BackendError(
            f"|beta| = {abs(beta):.6g} is not below the convergence threshold "
            f"{threshold:.6g}; use the exact or continuation backend"
        )
    if accuracy <= 0:
        raise ValueError("accuracy must be positive")
    if r == 0.0:
        return 1
    value = math.log(n_terms / (accuracy * (1.0 - r))) / math.log(1.0 / r)
    return max(1, math.ceil(value))


def cluster_tail_bound(
    n_terms: int, effective_degree: int, beta: complex, order: int
) -> float:
    """Geometric bound |S| r^(M+1) / (1-r) on the dropped log-series mass,
    r = 2 e^2 d_eff (d_eff + 1) |beta|."""
    r = abs(beta) / beta_star(effective_degree)
    if r >= 1.0:
        raise BackendError(f"tail ratio {r:.6g} >= 1; no convergent bound")
    return n_terms * r ** (order + 1) / (1.0 - r)


def log_amplitude_series(
    hamiltonian: LocalHamiltonian,
    ket: ProductState,
    bra: ProductState,
    order: int,
    floor: float = _OVERLAP_FLOOR,
    caps: Caps = DEFAULT_CAPS,
) -> TruncatedSeries:
    """Taylor series in beta of log <bra| exp(-beta H) |ket>.

    Raises DegenerateOverlapError when |<bra|ket>| < floor; callers fall
    back to the direct (non-log) amplitude series in that case.
    """
    table = compute_moments(hamiltonian, ket, bra, order, caps)
    return log_series_from_moments(table, floor)


def log_series_from_moments(
    table: MomentTable, floor: float = _OVERLAP_FLOOR
) -> TruncatedSeries:
    amplitude = table.amplitude_series()
    if abs(amplitude.coefficients[0]) < floor:
        raise DegenerateOverlapError(
            "bra/ket overlap below floor; log expansion undefined"
        )
    return series_log(amplitude, floor=floor)


@dataclass(frozen=True)
class PartitionEstimate:
    """Estimated D_beta(H - x) with an additive error budget."""

    value: complex
    additive_error_bound: float
    order: int
    backend: str
    degenerate_pairs: int = 0
    caveats: tuple[str, ...] = ()
    log_value: complex | None = None
    log_error_bound: float | None = None

    def __post_init__(self):
        if self.additive_error_bound < 0:
            raise ValueError("error bound must be nonnegative")


@lru_cache(maxsize=64)
def _pair_amplitudes(
    hamiltonian: LocalHamiltonian,
    state: SemiClassicalState,
    beta: complex,
    order: int,
    caps: Caps,
) -> tuple[tuple[complex, complex, bool], ...]:
    """Per ordered configuration pair: (weight, unshifted amplitude, degenerate).

    Everything here is shift-independent; the scan reuses it across every
    grid point. Swapped pairs reuse conjugated moments.
    """
    components = state.components
    tables: dict[tuple[int, int], MomentTable] = {}
    for j, (_, ket) in enumerate(components):
        for k in range(j, len(components)):
            bra = components[k][1]
            tables[(j, k)] = compute_moments(hamiltonian, ket, bra, order, caps)
            if k != j:
                tables[(k, j)] = tables[(j, k)].conjugated()
    rows = []
    for j, (a_j, _) in enumerate(components):
        for k, (a_k, _) in enumerate(components):
            weight = a_j * complex(np.conj(a_k))
            table = tables[(j, k)]
            try:
                log_series = log_series_from_moments(table)
                amp = cmath.exp(series_eval(log_series, beta))
                degenerate = False
            except DegenerateOverlapError:
                amp = series_eval(table.amplitude_series(), beta)
                degenerate = True
            rows.append((weight, amp, degenerate))
    return tuple(rows)


def estimate_partition(
    hamiltonian: LocalHamiltonian,
    shift: float,
    beta: complex,
    state: SemiClassicalState,
    accuracy: float,
    caps: Caps = DEFAULT_CAPS,
) -> PartitionEstimate:
    """Cluster-backend estimate of D_beta(H - shift) for |beta| < beta_star.

    The caller promises shift <= E0; under that promise every shifted
    matrix element has modulus <= 1 and the reported additive error bound
    is rigorous. The shift enters as the exact scalar exp(beta * shift).
    """
    beta = complex(beta)
    if beta.real < 0:
        raise ValueError("Re(beta) must be >= 0")
    graph = build_graph(hamiltonian)
    d_eff = graph.effective_degree
    threshold = beta_star(d_eff)
    n_terms = hamiltonian.n_terms
    if state.n_configurations ** 2 > caps.pair_count:
        raise CapExceededError(
            f"{state.n_configurations}^2 configuration pairs exceed the cap "
            f"of {caps.pair_count}"
        )
    weight_sum = sum(abs(a) for a, _ in state.components) ** 2
    log_accuracy = math.log1p(accuracy / weight_sum)
    order = truncation_order(n_terms, beta, threshold, log_accuracy)
    tail = cluster_tail_bound(n_terms, d_eff, beta, order)
    shift_factor = cmath.exp(beta * shift)

    u = abs(beta) * hamiltonian.coefficient_norm
    direct_tail = (
        math.exp(beta.real * shift)
        * u ** (order + 1)
        / math.factorial(min(order + 1, _FACTORIAL_LIMIT))
        * math.exp(u)
    )
    log_pair_bound = math.expm1(tail)

    total = 0.0 + 0j
    bound = 0.0
    degenerate = 0
    for weight, amp, is_degenerate in _pair_amplitudes(
        hamiltonian, state, beta, order, caps
    ):
        total += weight * shift_factor * amp
        bound += abs(weight) * (direct_tail if is_degenerate else log_pair_bound)
        degenerate += is_degenerate
    caveats = ()
    if degenerate:
        caveats = (
            "orthogonal configuration pairs estimated by direct series; "
            "their error term uses the coefficient-norm tail",
        )
    return PartitionEstimate(
        value=complex(total),
        additive_error_bound=float(bound),
        order=order,
        backend="cluster",
        degenerate_pairs=degenerate,
        caveats=caveats,
    )
