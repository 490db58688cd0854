import math

import numpy as np
import pytest

from itescan import (
    BackendError,
    ProductState,
    ScanConfig,
    ScanExhaustedError,
    SemiClassicalState,
    beta_star,
    build_graph,
    derive_scan_parameters,
    energy_scan,
    normalize_hamiltonian,
    parse_hamiltonian,
    spectrum,
    validate_gap_assumption,
)
from itescan.dense import dense_hamiltonian
from itescan.oracle import residue_from_spectrum

from conftest import random_hamiltonian, tfim_chain

GAMMA_HALF = math.sqrt(0.5)


def z_instance():
    return parse_hamiltonian("1.0 Z0"), SemiClassicalState.single(ProductState.plus(1))


def lemma_instances(rng, count, gap=2.5, eps=0.1):
    """Random spectra rescaled to a fixed gap, with the guiding state's
    non-ground weight concentrated on the first excited level (the worst
    case of the termination analysis) and moderate p0."""
    out = []
    while len(out) < count:
        n = int(rng.integers(2, 5))
        h0 = random_hamiltonian(rng, n, int(rng.integers(3, 7)))
        eigenvalues = np.linalg.eigvalsh(dense_hamiltonian(h0))
        scale = max(1.0, float(np.max(np.abs(eigenvalues))))
        if np.sum(eigenvalues <= eigenvalues[0] + 1e-9 * scale) > 1:
            continue
        first_gap = float(eigenvalues[1] - eigenvalues[0])
        if first_gap < 1e-3:
            continue
        h = h0.scaled(gap / first_gap)
        _, eigenvectors = np.linalg.eigh(dense_hamiltonian(h))
        p0 = float(rng.uniform(0.5, 0.55))
        vec = math.sqrt(p0) * eigenvectors[:, 0] + math.sqrt(1 - p0) * eigenvectors[:, 1]
        psi = SemiClassicalState.from_dense(vec)
        data = spectrum(h, psi)
        assert validate_gap_assumption(data.gap, eps, math.sqrt(data.p0))
        out.append((h, psi, data, eps))
    return out


class TestGapAssumption:
    def test_holds(self):
        assert validate_gap_assumption(2.0, 0.1, GAMMA_HALF)

    def test_fails(self):
        assert not validate_gap_assumption(0.1, 0.1, GAMMA_HALF)

    def test_boundary(self):
        assert validate_gap_assumption(1.0, 1.0, 1.0)

    def test_domain(self):
        with pytest.raises(ValueError):
            validate_gap_assumption(-1.0, 0.1, 0.5)


class TestDeriveParameters:
    def test_beta(self):
        params = derive_scan_parameters(2.0, 0.1, GAMMA_HALF)
        assert params.beta == pytest.approx(math.log(20) / 2)
        assert params.beta == pytest.approx(1.49787, abs=1e-5)

    def test_t_max(self):
        params = derive_scan_parameters(2.0, 0.1, GAMMA_HALF)
        assert params.t_max == pytest.approx(4 / (math.pi * 0.05))
        assert params.t_max == pytest.approx(25.465, abs=1e-3)

    def test_threshold(self):
        params = derive_scan_parameters(2.0, 0.1, GAMMA_HALF)
        assert params.threshold == pytest.approx((params.beta / 2 + 1) * 0.05)
        assert params.threshold == pytest.approx(0.087447, abs=1e-6)


class TestExactScan:
    def test_single_qubit(self):
        h, psi = z_instance()
        config = ScanConfig(
            gamma=GAMMA_HALF, gap=2.0, accuracy=0.1, interval=(-2.0, 0.0)
        )
        result = energy_scan(h, psi, config)
        assert -1.1 - 1e-9 <= result.energy <= -0.9 + 1e-9
        assert abs(result.energy - (-1.0)) <= config.accuracy + 1e-9
        assert result.gap_assumption_ok

    def test_trace_records_grid(self):
        h, psi = z_instance()
        config = ScanConfig(
            gamma=GAMMA_HALF, gap=2.0, accuracy=0.1, interval=(-2.0, 0.0)
        )
        result = energy_scan(h, psi, config)
        xs = [p.x for p in result.trace]
        assert xs[0] == -2.0
        assert all(b - a == pytest.approx(0.1) for a, b in zip(xs, xs[1:]))
        assert result.e_max == xs[int(np.argmax([p.residue for p in result.trace[:-1]]))]

    def test_interval_excluding_ground_exhausts(self):
        h, psi = z_instance()
        config = ScanConfig(
            gamma=GAMMA_HALF, gap=2.0, accuracy=0.1, interval=(0.0, 1.0)
        )
        with pytest.raises(ScanExhaustedError):
            energy_scan(h, psi, config)

    def test_accuracy_on_random_instances(self, rng):
        for h, psi, data, eps in lemma_instances(rng, 8):
            config = ScanConfig(
                gamma=math.sqrt(data.p0),
                gap=data.gap,
                accuracy=eps,
                interval=(data.ground_energy - 2.0, data.ground_energy + 1.0),
            )
            result = energy_scan(h, psi, config)
            assert abs(result.energy - data.ground_energy) <= eps + 1e-12


class TestLemmaInequalities:
    def test_both_displayed_bounds(self, rng):
        # exact residue versus the termination analysis on instances
        # satisfying the gap assumption: upper bound near the ground energy,
        # lower bound from the peak down to one step before it
        for h, psi, data, eps in lemma_instances(rng, 20):
            beta = math.log(1 / (data.p0 * eps)) / data.gap
            e0 = data.ground_energy
            upper = (beta / 2 + 1) * data.p0 * eps
            for x in np.linspace(e0 - eps / 2, e0, 15):
                assert residue_from_spectrum(data, float(x), beta) < upper
            grid = np.arange(e0 - 2.5, e0 - eps + 1e-12, eps)
            values = [residue_from_spectrum(data, float(x), beta) for x in grid]
            peak = int(np.argmax(values))
            lower = data.p0 * beta * eps
            assert all(v > lower for v in values[peak:])


class TestDeterminism:
    def test_exact_backend_identical(self):
        h, psi = z_instance()
        config = ScanConfig(
            gamma=GAMMA_HALF, gap=2.0, accuracy=0.1, interval=(-2.0, 0.0), seed=7
        )
        assert energy_scan(h, psi, config) == energy_scan(h, psi, config)

    def test_cluster_backend_identical(self):
        h, psi = z_instance()
        threshold = beta_star(1)
        config = ScanConfig(
            gamma=GAMMA_HALF,
            gap=2.0,
            accuracy=0.01,
            interval=(-1.2, 0.0),
            backend="cluster",
            beta_override=0.3 * threshold,
            seed=3,
        )
        a = energy_scan(h, psi, config)
        b = energy_scan(h, psi, config)
        assert a == b
        assert [p.residue for p in a.trace] == [p.residue for p in b.trace]

    def test_mc_backend_identical(self):
        h, psi = z_instance()
        config = ScanConfig(
            gamma=GAMMA_HALF,
            gap=2.0,
            accuracy=0.1,
            interval=(-1.6, -0.4),
            backend="mc",
            seed=12,
        )
        assert energy_scan(h, psi, config) == energy_scan(h, psi, config)


class TestClusterBackend:
    def test_requires_small_beta(self):
        h, psi = z_instance()
        config = ScanConfig(
            gamma=GAMMA_HALF, gap=2.0, accuracy=0.1, interval=(-2.0, 0.0),
            backend="cluster",
        )
        with pytest.raises(BackendError, match="2\\*beta"):
            energy_scan(h, psi, config)

    def test_agrees_with_exact_backend(self):
        # normalized TFIM; beta override keeps the expansion convergent
        h = tfim_chain(4)
        psi = SemiClassicalState.single(ProductState.plus(4))
        hn, _ = normalize_hamiltonian(h, "exact")
        threshold = beta_star(build_graph(hn).effective_degree)
        common = dict(
            gamma=GAMMA_HALF,
            gap=0.1,
            accuracy=5e-4,
            interval=(-1.05, -0.9),
            beta_override=0.3 * threshold,
        )
        exact = energy_scan(hn, psi, ScanConfig(backend="exact", **common))
        cluster = energy_scan(hn, psi, ScanConfig(backend="cluster", **common))
        assert exact.energy == cluster.energy
        assert len(exact.trace) == len(cluster.trace)
        for a, b in zip(exact.trace, cluster.trace):
            assert abs(a.residue - b.residue) <= b.error_bound + 1e-12

    def test_cluster_bound_small_enough_for_agreement(self):
        # agreement is guaranteed when the cluster error stays below
        # a quarter of the termination threshold
        h, psi = z_instance()
        threshold = beta_star(1)
        config = ScanConfig(
            gamma=GAMMA_HALF,
            gap=2.0,
            accuracy=0.01,
            interval=(-1.3, 0.0),
            backend="cluster",
            beta_override=0.2 * threshold,
        )
        result = energy_scan(h, psi, config)
        for point in result.trace:
            assert point.error_bound < result.parameters.threshold / 4


class TestMcBackend:
    def test_terminates_near_ground(self):
        h, psi = z_instance()
        config = ScanConfig(
            gamma=GAMMA_HALF, gap=2.0, accuracy=0.1, interval=(-2.0, 0.0),
            backend="mc", seed=4,
        )
        result = energy_scan(h, psi, config)
        # sampling noise can move the stop by a step; stay within 2 eps
        assert abs(result.energy - (-1.0)) <= 2 * config.accuracy
        assert result.order_or_samples > 100

    def test_shared_sample_set_is_pure_postprocessing(self):
        h, psi = z_instance()
        config = ScanConfig(
            gamma=GAMMA_HALF, gap=2.0, accuracy=0.1, interval=(-1.6, -0.6),
            backend="mc", seed=9,
        )
        a = energy_scan(h, psi, config)
        b = energy_scan(h, psi, config)
        assert [p.residue for p in a.trace] == [p.residue for p in b.trace]


class TestContinuationBackend:
    def test_requires_circuit(self):
        h, psi = z_instance()
        config = ScanConfig(
            gamma=GAMMA_HALF, gap=2.0, accuracy=0.1, interval=(-2.0, 0.0),
            backend="continuation",
        )
        with pytest.raises(BackendError, match="circuit"):
            energy_scan(h, psi, config)


class TestConfigValidation:
    def test_interval_order(self):
        with pytest.raises(ValueError):
            ScanConfig(gamma=0.5, gap=1.0, accuracy=0.1, interval=(1.0, 0.0))

    def test_backend_name(self):
        with pytest.raises(ValueError):
            ScanConfig(gamma=0.5, gap=1.0, accuracy=0.1, interval=(0.0, 1.0), backend="magic")

    def test_failure_prob_domain(self):
        with pytest.raises(ValueError):
            ScanConfig(
                gamma=0.5, gap=1.0, accuracy=0.1, interval=(0.0, 1.0), failure_prob=2.0
            )
