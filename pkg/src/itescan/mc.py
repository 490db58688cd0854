"""Simulated quantum estimation of the partition function.

Evolution times are drawn from the truncated Cauchy-Lorentz distribution
(the Fourier transform of exp(-beta |x|)); each time is scored by real and
imaginary interference-test outcomes whose means are Re/Im of the Loschmidt
amplitude <psi| exp(-i H t) |psi>. One sample set is reused across every
grid shift x, which is what the ln(4 M / mu) union-bound factor in the
sample count pays for.

Outcomes are generated from exact Loschmidt amplitudes rather than a gate-
level simulation; the distributions are identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .expansion import PartitionEstimate
from .oracle import loschmidt_from_spectrum, spectrum
from .pauli import LocalHamiltonian
from .states import SemiClassicalState


def cauchy_norm(beta: float, trunc_time: float) -> float:
    """Mass (2/pi) arctan(T/beta) of the Cauchy density kept in [-T, T]."""
    if beta <= 0 or trunc_time <= 0:
        raise ValueError("beta and T must be positive")
    return (2.0 / math.pi) * math.atan(trunc_time / beta)


def truncation_tail(beta: float, trunc_time: float) -> float:
    """Discarded mass 1 - (2/pi) arctan(T/beta); bounds the truncation error."""
    return 1.0 - cauchy_norm(beta, trunc_time)


def truncation_time(beta: float, tail: float) -> float:
    """Smallest T whose discarded Cauchy mass equals ``tail``.

    Closed form T = beta * tan(pi (1 - tail) / 2).
    """
    if not 0.0 < tail < 1.0:
        raise ValueError("tail must lie in (0, 1)")
    return beta * math.tan(math.pi * (1.0 - tail) / 2.0)


def sample_times(
    beta: float, trunc_time: float, count: int, seed
) -> np.ndarray:
    """I.i.d. draws from the truncated Cauchy via the inverse CDF.

    t = beta * tan((2u - 1) * arctan(T/beta)), u ~ U(0,1); deterministic
    under the seed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    return beta * np.tan((2.0 * u - 1.0) * math.atan(trunc_time / beta))


def sample_count(norm: float, accuracy: float, n_points: int, failure_prob: float) -> int:
    """ceil(norm^2 ln(4 M / mu) / eps'^2): Hoeffding over M shared grid points."""
    if not 0.0 < failure_prob < 1.0:
        raise ValueError("failure probability must lie in (0, 1)")
    if accuracy <= 0 or norm <= 0 or n_points < 1:
        raise ValueError("norm, accuracy and point count must be positive")
    return math.ceil(norm ** 2 * math.log(4.0 * n_points / failure_prob) / accuracy ** 2)


def simulate_hadamard(
    hamiltonian: LocalHamiltonian,
    state: SemiClassicalState,
    time: float,
    mode: str = "expectation",
    seed=None,
    caps: Caps = DEFAULT_CAPS,
) -> tuple[float, float]:
    """One interference-test evaluation at evolution time t.

    mode='expectation' returns (Re L, Im L) for the Loschmidt amplitude L;
    mode='bernoulli' returns independent +-1 draws with those means (the
    two single-shot circuit variants).
    """
    data = spectrum(hamiltonian, state, caps)
    amplitude = loschmidt_from_spectrum(data, time)
    if mode == "expectation":
        return amplitude.real, amplitude.imag
    if mode == "bernoulli":
        rng = np.random.default_rng(seed)
        x = 1.0 if rng.random() < (1.0 + amplitude.real) / 2.0 else -1.0
        y = 1.0 if rng.random() < (1.0 + amplitude.imag) / 2.0 else -1.0
        return x, y
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class McSampleSet:
    """Evolution times with their scored outcomes, plus the sampling context."""

    times: np.ndarray
    x_outcomes: np.ndarray
    y_outcomes: np.ndarray
    norm: float
    trunc_time: float
    beta: float
    mode: str
    n_points: int
    failure_prob: float

    def __post_init__(self):
        if np.max(np.abs(self.times)) > self.trunc_time * (1 + 1e-12):
            raise ValueError("sampled time outside [-T, T]")
        if self.mode == "bernoulli":
            if not np.all(np.isin(self.x_outcomes, (-1.0, 1.0))):
                raise ValueError("bernoulli outcomes must be +-1")
        elif self.mode == "expectation":
            if np.max(self.x_outcomes ** 2 + self.y_outcomes ** 2) > 1.0 + 1e-9:
                raise ValueError("expectation outcomes must lie in the unit disk")

    @property
    def n_samples(self) -> int:
        return self.times.size

    @property
    def statistical_error(self) -> float:
        """eps' recovered by inverting the sample-count formula."""
        return self.norm * math.sqrt(
            math.log(4.0 * self.n_points / self.failure_prob) / self.n_samples
        )

    @property
    def truncation_error(self) -> float:
        return truncation_tail(self.beta, self.trunc_time)


def build_sample_set(
    hamiltonian: LocalHamiltonian,
    state: SemiClassicalState,
    beta: float,
    trunc_time: float,
    count: int,
    mode: str = "bernoulli",
    seed=0,
    n_points: int = 1,
    failure_prob: float = 0.1,
    caps: Caps = DEFAULT_CAPS,
) -> McSampleSet:
    """Draw times and score them, vectorized over the whole set."""
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    times = beta * np.tan((2.0 * u - 1.0) * math.atan(trunc_time / beta))
    data = spectrum(hamiltonian, state, caps)
    amplitudes = loschmidt_from_spectrum(data, times)
    if mode == "expectation":
        x_out = amplitudes.real.copy()
        y_out = amplitudes.imag.copy()
    elif mode == "bernoulli":
        x_out = np.where(rng.random(count) < (1.0 + amplitudes.real) / 2.0, 1.0, -1.0)
        y_out = np.where(rng.random(count) < (1.0 + amplitudes.imag) / 2.0, 1.0, -1.0)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return McSampleSet(
        times=times,
        x_outcomes=x_out,
        y_outcomes=y_out,
        norm=cauchy_norm(beta, trunc_time),
        trunc_time=trunc_time,
        beta=beta,
        mode=mode,
        n_points=n_points,
        failure_prob=failure_prob,
    )


def estimate_Z(samples: McSampleSet, shift: float) -> PartitionEstimate:
    """Empirical-mean estimator (norm/S) sum_i exp(i t_i x) (X_i + i Y_i).

    Pure post-processing: one sample set serves every shift deterministically.
    The additive error bound adds the statistical budget eps' to the
    truncation tail.
    """
    if samples.n_samples == 0:
        raise ValueError("empty sample set")
    phases = np.exp(1j * samples.times * shift)
    value = samples.norm * np.mean(
        phases * (samples.x_outcomes + 1j * samples.y_outcomes)
    )
    return PartitionEstimate(
        value=complex(value),
        additive_error_bound=samples.statistical_error + samples.truncation_error,
        order=samples.n_samples,
        backend="hadamard_mc",
    )
