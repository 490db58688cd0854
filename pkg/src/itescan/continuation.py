"""Partition-function estimation beyond the expansion threshold.

The target beta is reached through the map beta -> beta * phi(z) with
phi(z) = log(1 - z/nu') / log(1 - 1/nu'), which sends 0 -> 0 and 1 -> 1 and
keeps |Im(beta phi)| inside the expansion-convergent strip on the whole
disk |z| <= nu < nu'. The log-partition series in beta is composed with
beta * phi(z) and the z-series is summed at z = 1; a complex Taylor bound
alpha^(M+1)/(1-alpha) * F_max controls the remainder.

Validity rests on the partition function being zero-free on the image
region, certified when the ground-state overlap p0 is at least 1/2 and
Re(beta) > 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .config import Caps, DEFAULT_CAPS
from .errors import CapExceededError, CertificateError
from .expansion import PartitionEstimate, log_amplitude_series
from .graph import build_graph, beta_star
from .pauli import LocalHamiltonian
from .series import TruncatedSeries, series_compose, series_eval
from .states import ProductState


@dataclass(frozen=True)
class ContinuationParams:
    """Conformal-map geometry for a target beta.

    w = -pi / (2 log(1 - 1/nu')) exactly, and w * beta = threshold / 2, so
    the image of the disk stays strictly inside the convergent strip.
    """

    beta: float
    threshold: float  # expansion convergence threshold of the instance
    w: float
    nu_prime: float
    nu: float
    alpha: float

    def __post_init__(self):
        if self.w * self.beta >= self.threshold:
            raise ValueError("map does not keep the image inside the strip")
        reconstructed = -math.pi / (2.0 * math.log(1.0 - 1.0 / self.nu_prime))
        if not math.isclose(reconstructed, self.w, rel_tol=1e-9):
            raise ValueError("w and nu' are inconsistent")


def select_continuation_params(beta: float, threshold: float) -> ContinuationParams:
    """Fix w = threshold/(2 beta), then nu' = 1/(1 - exp(-pi beta/threshold));
    nu sits at the midpoint (1 + nu')/2 and alpha = 1/nu."""
    if beta <= 0 or threshold <= 0:
        raise ValueError("beta and threshold must be positive")
    w = threshold / (2.0 * beta)
    nu_prime = 1.0 / (1.0 - math.exp(-math.pi * beta / threshold))
    nu = (1.0 + nu_prime) / 2.0
    return ContinuationParams(
        beta=beta,
        threshold=threshold,
        w=w,
        nu_prime=nu_prime,
        nu=nu,
        alpha=1.0 / nu,
    )


def conformal_map_value(params: ContinuationParams, z: complex) -> complex:
    """phi(z) from the closed log form."""
    log_denom = math.log(1.0 - 1.0 / params.nu_prime)
    return cmath.log(1.0 - z / params.nu_prime) / log_denom


def conformal_map_coeffs(params: ContinuationParams, order: int) -> TruncatedSeries:
    """Taylor coefficients phi_0 = 0, phi_l = -1/(l nu'^l log(1 - 1/nu')).

    All phi_l are positive and the series at z = 1 sums to 1.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    log_denom = math.log(1.0 - 1.0 / params.nu_prime)
    ls = np.arange(1, order + 1, dtype=float)
    coeffs = np.zeros(order + 1, dtype=complex)
    coeffs[1:] = -1.0 / (ls * params.nu_prime ** ls * log_denom)
    return TruncatedSeries(coeffs)


def disk_bound(
    params: ContinuationParams,
    n_terms: int,
    energy_bound: float,
    amplitude_term: float = 0.0,
    boundary_points: int = 360,
) -> float:
    """F_max: bound on |log D| over the radius-nu disk.

    |Re(beta phi)| is maximized on the boundary circle (harmonic), the
    strip part contributes |S| r/(1-r) with r = w beta / threshold = 1/2,
    and ``amplitude_term`` stands in for the amplitude-floor contribution
    that has no computable constant (0 by default; see the caveat the
    estimate carries).
    """
    angles = np.linspace(0.0, 2.0 * math.pi, boundary_points, endpoint=False)
    circle = params.nu * np.exp(1j * angles)
    values = np.array([conformal_map_value(params, z) for z in circle])
    max_re = float(np.max(np.abs(values.real)))
    r = params.w * params.beta / params.threshold
    return params.beta * max_re * energy_bound + n_terms * r / (1.0 - r) + amplitude_term


def continuation_order(
    beta: float,
    threshold: float,
    accuracy: float,
    n_terms: int,
    beta_energy_bound: float,
    poly_mult: float = 1.0,
    amplitude_term: float = 0.0,
    caps: Caps = DEFAULT_CAPS,
) -> int:
    """Series order for the continued estimate.

    Takes the larger of the closed-form order
    exp(2 pi beta/threshold) * ln[(exp(2 pi beta/threshold)/eps)
    (|beta E| + poly_mult |S|)] and the smallest M whose Taylor remainder
    alpha^(M+1)/(1-alpha) F_max drops below eps. Raises when the result
    exceeds the configured cap: continuation is infeasible for the inputs.
    """
    if accuracy <= 0:
        raise ValueError("accuracy must be positive")
    theta = math.exp(2.0 * math.pi * beta / threshold)
    if theta == math.inf:
        raise CapExceededError("continuation order overflows for these inputs")
    closed_form = theta * math.log(
        (theta / accuracy) * (beta_energy_bound + poly_mult * n_terms)
    )
    params = select_continuation_params(beta, threshold)
    f_max = disk_bound(params, n_terms, beta_energy_bound / beta, amplitude_term)
    # alpha^(M+1)/(1-alpha) * F_max <= eps
    remainder_form = (
        math.log(f_max / (accuracy * (1.0 - params.alpha))) / -math.log(params.alpha)
    )
    order = max(1, math.ceil(max(closed_form, remainder_form)))
    if order > caps.continuation_order:
        raise CapExceededError(
            f"continuation order {order} exceeds the cap of {caps.continuation_order}"
        )
    return order


@dataclass(frozen=True)
class ZeroFreeCertificate:
    """Outcome of the overlap-based zero-free check."""

    ok: bool
    p0: float
    gap: float
    worst_zero: complex  # zero location with the largest real part


def zero_free_certificate(p0: float, gap: float, beta: complex) -> ZeroFreeCertificate:
    """Certify log D analytic: requires p0 >= 1/2 and Re(beta) > 0.

    The worst-case zero (all excited weight on the first level above the
    ground space) sits at (ln((1-p0)/p0) + i pi)/gap, strictly left of the
    imaginary axis whenever p0 > 1/2.
    """
    if not 0.0 < p0 <= 1.0:
        raise ValueError("p0 must lie in (0, 1]")
    if gap <= 0:
        raise ValueError("gap must be positive")
    real = math.log((1.0 - p0) / p0) / gap if p0 < 1.0 else -math.inf
    return ZeroFreeCertificate(
        ok=bool(p0 >= 0.5 and beta.real > 0),
        p0=p0,
        gap=gap,
        worst_zero=complex(real, math.pi / gap),
    )


def continued_log_partition(
    conjugated: LocalHamiltonian,
    shift: float,
    beta: float,
    params: ContinuationParams,
    order: int,
    certificate: ZeroFreeCertificate,
    energy_bound: float | None = None,
    amplitude_term: float = 0.0,
    caps: Caps = DEFAULT_CAPS,
) -> PartitionEstimate:
    """Estimate log D_beta(H' - shift) for the |0..0> guiding state.

    H' must already be the similarity-transformed Hamiltonian for the
    prepared guiding state. The log series in beta is composed with
    beta * phi(z) and summed at z = 1; the shift contributes exactly
    beta * shift (phi(1) = 1), added outside the composition so it carries
    no truncation error.
    """
    if not certificate.ok:
        raise CertificateError(
            f"no zero-free certificate (p0 = {certificate.p0}, Re beta = {beta})"
        )
    if beta <= 0:
        raise ValueError("beta must be positive")
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > caps.continuation_order:
        raise CapExceededError(
            f"order {order} exceeds the cap of {caps.continuation_order}"
        )
    n = conjugated.n_qubits
    zero_state = ProductState.computational(0, n)
    outer = log_amplitude_series(conjugated, zero_state, zero_state, order, caps=caps)
    inner = beta * conformal_map_coeffs(params, order)
    composed = series_compose(outer, inner)
    log_value = series_eval(composed, 1.0) + beta * shift
    if energy_bound is None:
        energy_bound = conjugated.coefficient_norm
    f_max = disk_bound(params, conjugated.n_terms, energy_bound, amplitude_term)
    remainder = params.alpha ** (order + 1) / (1.0 - params.alpha) * f_max
    value = cmath.exp(log_value)
    if remainder < 700.0:
        additive = abs(value) * math.expm1(remainder)
    else:
        additive = math.inf
    caveats = ()
    if amplitude_term == 0.0:
        caveats = (
            "disk bound omits the amplitude-floor term (no computable constant); "
            "set amplitude_term to include one",
        )
    return PartitionEstimate(
        value=value,
        additive_error_bound=float(additive),
        order=order,
        backend="continuation",
        caveats=caveats,
        log_value=log_value,
        log_error_bound=float(remainder),
    )
