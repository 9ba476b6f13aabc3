import numpy as np
import pytest

from pmst import (
    BinaryMeasurement,
    Povm,
    born_binary,
    born_povm,
    factor_gram,
    gram_matrix,
    is_legitimate_gram,
    povm_from_bloch,
    random_extremal_povm,
    rank_of_span,
    sic_povm,
    unit_bloch,
)
from pmst.errors import NonExtremal, NotUnit, NoValidWeights

from conftest import random_rotation, random_unit


class TestBlochValidation:
    def test_unit_vector_accepted(self):
        v = unit_bloch([0.0, 0.6, 0.8])
        assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_non_unit_rejected(self):
        with pytest.raises(NotUnit):
            unit_bloch([0.0, 0.0, 0.9])

    def test_measurement_bias_range(self):
        with pytest.raises(ValueError):
            BinaryMeasurement(direction=[0, 0, 1], bias=1.5)


class TestBornBinary:
    def test_aligned_pure_state(self):
        meas = BinaryMeasurement(direction=[0, 0, 1])
        assert born_binary([0, 0, 1], meas) == (1.0, 0.0)

    def test_orthogonal_directions(self):
        meas = BinaryMeasurement(direction=[1, 0, 0])
        p0, p1 = born_binary([0, 0, 1], meas)
        assert p0 == pytest.approx(0.5)
        assert p1 == pytest.approx(0.5)

    def test_degenerate_fixed_outcome(self, rng):
        meas = BinaryMeasurement(direction=random_unit(rng), bias=1.0)
        assert born_binary(random_unit(rng), meas) == (1.0, 0.0)

    def test_rotation_invariance(self, rng):
        for _ in range(50):
            m = random_unit(rng)
            v = random_unit(rng)
            rot = random_rotation(rng)
            direct = born_binary(m, BinaryMeasurement(direction=v))
            rotated = born_binary(rot @ m, BinaryMeasurement(direction=rot @ v))
            assert direct[0] == pytest.approx(rotated[0], abs=1e-12)

    def test_probability_identities(self, rng):
        for _ in range(50):
            m = random_unit(rng) * rng.uniform(0, 1)
            mu = rng.uniform(-1, 1)
            meas = BinaryMeasurement(direction=random_unit(rng), bias=mu)
            p0, p1 = born_binary(m, meas)
            assert p0 + p1 == pytest.approx(1.0, abs=1e-15)
            expected = mu + (1 - abs(mu)) * float(m @ meas.direction)
            assert p0 - p1 == pytest.approx(expected, abs=1e-12)
            assert 0.0 <= p0 <= 1.0


class TestBornPovm:
    def test_antialigned_outcome_vanishes(self):
        povm = sic_povm()
        probs = born_povm(-povm.vectors[2], povm)
        assert probs[2] == pytest.approx(0.0, abs=1e-15)

    def test_maximally_mixed_is_uniform(self):
        probs = born_povm([0, 0, 0], sic_povm())
        assert probs == pytest.approx(np.full(4, 0.25))

    def test_aligned_with_first_vector(self):
        # lambda * (1 + n_1.n_b) with n_1.n_b = 1 or -1/3 for the
        # tetrahedron: 1/2 on the aligned outcome, 1/6 on the others.
        povm = sic_povm()
        probs = born_povm(povm.vectors[0], povm)
        assert probs[0] == pytest.approx(0.5, abs=1e-12)
        assert probs[1:] == pytest.approx(np.full(3, 1 / 6), abs=1e-12)

    def test_probabilities_sum_to_one(self, rng):
        for _ in range(20):
            povm = random_extremal_povm(rng)
            probs = born_povm(random_unit(rng), povm)
            assert probs.sum() == pytest.approx(1.0, abs=1e-12)


class TestPovmFromBloch:
    def test_tetrahedron_gives_uniform_weights(self):
        weights = povm_from_bloch(sic_povm().vectors).weights
        assert weights == pytest.approx(np.full(4, 0.25), abs=1e-12)

    def test_umbrella_apex_configuration(self):
        # Oracle: solve sum_b w_b n_b = 0, sum w_b = 1 directly.  With
        # n_1 = (0,0,1) and the other three symmetric at z = -1/3 the
        # solution is uniform (this is the tetrahedron again).
        from pmst import umbrella

        _, states, _ = umbrella(1.0)
        vectors = -states
        stacked = np.vstack([vectors.T, np.ones(4)])
        oracle = np.linalg.lstsq(stacked, np.array([0, 0, 0, 1.0]), rcond=None)[0]
        weights = povm_from_bloch(vectors).weights
        assert weights == pytest.approx(oracle, abs=1e-10)
        assert weights == pytest.approx(np.full(4, 0.25), abs=1e-12)

    def test_trine_gives_equal_thirds(self):
        trine = np.array(
            [[1, 0, 0], [-0.5, np.sqrt(3) / 2, 0], [-0.5, -np.sqrt(3) / 2, 0]]
        )
        povm = povm_from_bloch(trine)
        assert povm.weights == pytest.approx(np.full(3, 1 / 3), abs=1e-12)

    def test_coplanar_four_vectors_not_extremal(self):
        square = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]])
        with pytest.raises(NonExtremal):
            povm_from_bloch(square)

    def test_same_hemisphere_has_no_weights(self):
        tilted = np.array(
            [[0, 0, 1], [0.8, 0, 0.6], [-0.8, 0, 0.6], [0, 0.8, 0.6]]
        )
        with pytest.raises(NoValidWeights):
            povm_from_bloch(tilted)

    def test_three_spanning_vectors_rejected(self):
        with pytest.raises(NoValidWeights):
            povm_from_bloch(np.eye(3))

    def test_reconstruction_invariants(self, rng):
        for _ in range(50):
            povm = random_extremal_povm(rng)
            assert povm.weights.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.norm(povm.weights @ povm.vectors) <= 1e-10


class TestPovmValidation:
    def test_weights_must_be_positive(self):
        with pytest.raises(ValueError):
            Povm(weights=[0.5, 0.5, 0.25, -0.25], vectors=sic_povm().vectors)

    def test_barycenter_must_vanish(self):
        vecs = np.array([[0, 0, 1], [0, 0, 1], [1, 0, 0], [-1, 0, 0]])
        with pytest.raises(ValueError):
            Povm(weights=np.full(4, 0.25), vectors=vecs)

    def test_three_outcomes_must_be_planar(self, rng):
        povm = random_extremal_povm(rng, outcomes=3)
        assert rank_of_span(povm.vectors) == 2


class TestGram:
    def test_round_trip_factorization(self, rng):
        for _ in range(50):
            vectors = random_unit(rng, n=rng.integers(2, 6))
            gram = gram_matrix(vectors)
            assert is_legitimate_gram(gram)
            rebuilt = factor_gram(gram)
            assert rebuilt @ rebuilt.T == pytest.approx(gram, abs=1e-9)

    def test_non_psd_rejected(self):
        bad = np.array([[1.0, 0.99, -0.99], [0.99, 1.0, 0.99], [-0.99, 0.99, 1.0]])
        assert not is_legitimate_gram(bad)
        with pytest.raises(ValueError):
            factor_gram(bad)

    def test_rank_of_span(self):
        assert rank_of_span(np.eye(3)) == 3
        assert rank_of_span([[1, 0, 0], [0.6, 0.8, 0]]) == 2
        assert rank_of_span([[1, 0, 0], [-1, 0, 0]]) == 1
