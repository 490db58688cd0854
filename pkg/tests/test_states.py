import numpy as np
import pytest

from itescan import (
    DimensionError,
    PauliString,
    ProductState,
    SemiClassicalState,
    apply_pauli,
    dump_state_json,
    load_state_json,
)

from conftest import random_product_state, random_semiclassical


class TestProductState:
    def test_unnormalized_qubit_rejected(self):
        with pytest.raises(ValueError, match="normalized"):
            ProductState(np.array([[1.0, 1.0]], dtype=complex))

    def test_computational_bits(self):
        s = ProductState.computational(0b101, 3)
        vec = s.to_dense()
        assert np.argmax(np.abs(vec)) == 0b101

    def test_dense_norm_one(self, rng):
        s = random_product_state(rng, 5)
        assert np.linalg.norm(s.to_dense()) == pytest.approx(1.0)

    def test_overlap_matches_dense(self, rng):
        a = random_product_state(rng, 4)
        b = random_product_state(rng, 4)
        dense = np.vdot(a.to_dense(), b.to_dense())
        assert a.overlap(b) == pytest.approx(dense)

    def test_immutable(self):
        s = ProductState.plus(2)
        with pytest.raises(AttributeError):
            s.amplitudes = None
        with pytest.raises(ValueError):
            s.amplitudes[0, 0] = 2.0

    def test_hash_equality(self):
        assert ProductState.plus(2) == ProductState.plus(2)
        assert hash(ProductState.plus(2)) == hash(ProductState.plus(2))


class TestApplyPauli:
    def test_y_on_zero(self):
        phase, out = apply_pauli(
            PauliString.from_label(1, "Y0"), ProductState.computational(0, 1)
        )
        assert phase == pytest.approx(1j)
        assert out == ProductState.computational(1, 1)

    def test_z_on_one(self):
        phase, out = apply_pauli(
            PauliString.from_label(1, "Z0"), ProductState.computational(1, 1)
        )
        assert phase == pytest.approx(-1.0)
        assert out == ProductState.computational(1, 1)

    def test_x_tensor_z_on_zero_plus(self):
        amps = np.array([[1, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)]], dtype=complex)
        phase, out = apply_pauli(PauliString.from_label(2, "X0", "Z1"), ProductState(amps))
        assert phase == pytest.approx(1.0)
        minus = np.array([1 / np.sqrt(2), -1 / np.sqrt(2)])
        assert np.allclose(out.amplitudes[0], [0, 1])
        assert np.allclose(out.amplitudes[1], minus)

    def test_matches_dense_action(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 5))
            qubits = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
            letters = tuple(
                sorted((int(q), str(rng.choice(list("XYZ")))) for q in qubits)
            )
            string = PauliString(n, letters)
            state = random_product_state(rng, n)
            phase, out = apply_pauli(string, state)
            from itescan.dense import dense_term
            from itescan import LocalHamiltonian

            dense = dense_term(string)
            expected = dense @ state.to_dense()
            assert np.allclose(phase * out.to_dense(), expected, atol=1e-12)
            assert abs(abs(phase) - 1.0) < 1e-12

    def test_involution_phase(self, rng):
        # on canonical states (leading amplitude real-positive per qubit) the
        # double application reproduces the state with phase p^2 = +1
        for _ in range(25):
            n = int(rng.integers(1, 4))
            qubits = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
            letters = tuple(
                sorted((int(q), str(rng.choice(list("XYZ")))) for q in qubits)
            )
            string = PauliString(n, letters)
            raw = random_product_state(rng, n).amplitudes.copy()
            lead = np.where(np.abs(raw[:, 0:1]) > 1e-12, raw[:, 0:1], raw[:, 1:2])
            state = ProductState(raw * np.conj(lead) / np.abs(lead))
            p1, s1 = apply_pauli(string, state)
            p2, s2 = apply_pauli(string, s1)
            total = p1 * p2
            assert total == pytest.approx(1.0)  # every Pauli string squares to +I
            assert np.allclose(s2.amplitudes, state.amplitudes, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            apply_pauli(PauliString.from_label(2, "X1"), ProductState.plus(1))


class TestSemiClassical:
    def test_requires_normalization(self):
        with pytest.raises(ValueError, match="norm"):
            SemiClassicalState(((0.5 + 0j, ProductState.plus(1)),))

    def test_nonorthogonal_configurations_need_gram_norm(self):
        # |0> and |+> overlap; amplitudes must normalize the physical state
        comps = (
            (np.sqrt(0.5) + 0j, ProductState.computational(0, 1)),
            (np.sqrt(0.5) + 0j, ProductState.plus(1)),
        )
        with pytest.raises(ValueError, match="norm"):
            SemiClassicalState(comps)
        scale = 1.0 / np.sqrt(2.0 + np.sqrt(2.0))  # <psi|psi> = s^2 (2 + sqrt 2)
        ok = SemiClassicalState(
            (
                (scale + 0j, ProductState.computational(0, 1)),
                (scale + 0j, ProductState.plus(1)),
            )
        )
        assert np.linalg.norm(ok.to_dense()) == pytest.approx(1.0)

    def test_from_dense_round_trip(self, rng):
        vec = rng.normal(size=8) + 1j * rng.normal(size=8)
        vec /= np.linalg.norm(vec)
        state = SemiClassicalState.from_dense(vec)
        assert state.n_configurations == 8
        assert np.allclose(state.to_dense(), vec)

    def test_from_dense_drops_zeros(self):
        vec = np.zeros(4, dtype=complex)
        vec[0] = vec[3] = 1 / np.sqrt(2)
        state = SemiClassicalState.from_dense(vec)
        assert state.n_configurations == 2

    def test_json_round_trip(self, rng):
        state = random_semiclassical(rng, 3, 2)
        text = dump_state_json(state)
        back = load_state_json(text)
        assert back.n_configurations == state.n_configurations
        assert np.allclose(back.to_dense(), state.to_dense())

    def test_mixed_qubit_counts_rejected(self):
        with pytest.raises(DimensionError):
            SemiClassicalState(
                (
                    (np.sqrt(0.5) + 0j, ProductState.plus(1)),
                    (np.sqrt(0.5) + 0j, ProductState.plus(2)),
                )
            )
