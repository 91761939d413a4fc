"""Parameterized strategy families, embeddings and grids."""
import numpy as np
import pytest

from qgames.catalog import ETA_IN, ETA_VECTORS
from qgames.errors import ParameterError
from qgames.strategies import (
    DEFECT,
    FLIP,
    IDENTITY,
    QUANTUM_MOVE,
    StrategyFamily,
    batch_unitaries,
    classical_embedding,
    param_unitary,
    parameter_grid,
    unitary_matrix,
)

TWO = StrategyFamily.two_param()
THREE = StrategyFamily.three_param()
ONE = StrategyFamily.one_param()


class TestParamUnitary:
    def test_cooperate_endpoint(self):
        np.testing.assert_allclose(unitary_matrix(TWO, (0.0, 0.0)), IDENTITY, atol=1e-15)

    def test_defect_endpoint(self):
        np.testing.assert_allclose(unitary_matrix(TWO, (np.pi, 0.0)), DEFECT, atol=1e-15)

    def test_phase_move(self):
        np.testing.assert_allclose(
            unitary_matrix(TWO, (0.0, np.pi / 2)), QUANTUM_MOVE, atol=1e-15
        )

    def test_out_of_range(self):
        with pytest.raises(ParameterError):
            param_unitary(TWO, (-0.1, 0.0))
        with pytest.raises(ParameterError):
            param_unitary(TWO, (0.0, np.pi))  # two_param phase tops out at pi/2
        with pytest.raises(ParameterError):
            param_unitary(THREE, (0.0, 2 * np.pi, 0.0))  # half-open right end

    def test_wrong_arity(self):
        with pytest.raises(ParameterError):
            param_unitary(TWO, (0.1,))

    @pytest.mark.parametrize("family", [ONE, TWO, THREE])
    def test_unitary_over_grid_and_random(self, family):
        pts = parameter_grid(family, 5)
        for u in batch_unitaries(family, pts):
            dev = np.abs(u.conj().T @ u - np.eye(2)).max()
            assert dev <= 1e-12
        rng = np.random.default_rng(0)
        for _ in range(50):
            pt = [rng.uniform(r.lo, r.hi * (1 - 1e-9)) for r in family.ranges]
            u = unitary_matrix(family, pt)
            assert np.abs(u.conj().T @ u - np.eye(2)).max() <= 1e-12

    def test_special_unitary(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            pt = [rng.uniform(r.lo, r.hi * (1 - 1e-9)) for r in THREE.ranges]
            assert abs(np.linalg.det(unitary_matrix(THREE, pt)) - 1.0) <= 1e-9


class TestFamilyReductions:
    def test_three_at_zero_phase_lag_matches_two(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            theta = rng.uniform(0, np.pi)
            phi = rng.uniform(0, np.pi / 2)
            np.testing.assert_allclose(
                unitary_matrix(THREE, (theta, phi, 0.0)),
                unitary_matrix(TWO, (theta, phi)),
                atol=1e-15,
            )

    def test_two_at_zero_phase_matches_one(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            theta = rng.uniform(0, np.pi)
            np.testing.assert_allclose(
                unitary_matrix(TWO, (theta, 0.0)),
                unitary_matrix(ONE, (theta,)),
                atol=1e-15,
            )


class TestClassicalEmbedding:
    def test_penny_moves(self):
        family = StrategyFamily.finite((("N", IDENTITY), ("F", FLIP)))
        np.testing.assert_array_equal(classical_embedding(family, "F").matrix, FLIP)
        np.testing.assert_array_equal(classical_embedding(family, "N").matrix, IDENTITY)

    def test_coordination_operators(self):
        family = StrategyFamily.finite((("I", IDENTITY), ("X", FLIP)))
        np.testing.assert_array_equal(classical_embedding(family, "X").matrix, FLIP)
        np.testing.assert_array_equal(classical_embedding(family, "I").matrix, IDENTITY)

    def test_param_family_endpoints(self):
        np.testing.assert_allclose(classical_embedding(TWO, "C").matrix, IDENTITY, atol=1e-15)
        np.testing.assert_allclose(classical_embedding(TWO, "D").matrix, DEFECT, atol=1e-15)

    def test_unknown_label(self):
        with pytest.raises(ParameterError):
            classical_embedding(TWO, "Z")


class TestParameterGrid:
    def test_one_param_endpoints_and_midpoint(self):
        pts = parameter_grid(ONE, 3)
        np.testing.assert_allclose(pts.ravel(), [0.0, np.pi / 2, np.pi], atol=1e-15)

    def test_two_param_resolution_two(self):
        pts = parameter_grid(TWO, 2)
        expected = [(0, 0), (0, np.pi / 2), (np.pi, 0), (np.pi, np.pi / 2)]
        np.testing.assert_allclose(pts, expected, atol=1e-15)

    def test_half_open_axes_exclude_right_endpoint(self):
        pts = parameter_grid(THREE, 4)
        assert pts.shape == (64, 3)
        assert pts[:, 1].max() < 2 * np.pi
        assert pts[:, 2].max() < 2 * np.pi
        assert pts[:, 0].max() == pytest.approx(np.pi)

    def test_resolution_validation(self):
        with pytest.raises(ParameterError):
            parameter_grid(ONE, 1)


class TestForcingComposition:
    """The response steering the entangled start onto one player's best play.

    The quoted closed form DEFECT @ U† holds only at special opponents
    (identity, defect, phase move); the exact law conjugates through the
    entangling factors of the initial and target states.
    """

    def _exact_witness(self, opponent):
        # responder on the second slot, target = second player's best play (CD)
        k = np.sqrt(2) * ETA_IN.reshape(2, 2).T
        l = np.sqrt(2) * ETA_VECTORS[(0, 1)].reshape(2, 2).T
        return l @ opponent.conj() @ k.conj().T

    def test_exact_law_forces_best_play_everywhere(self):
        rng = np.random.default_rng(5)
        target = np.outer(ETA_VECTORS[(0, 1)], ETA_VECTORS[(0, 1)].conj())
        for _ in range(50):
            pt = [rng.uniform(r.lo, r.hi * (1 - 1e-9)) for r in THREE.ranges]
            u_a = unitary_matrix(THREE, pt)
            u_b = self._exact_witness(u_a)
            out = np.kron(u_a, u_b) @ ETA_IN
            np.testing.assert_allclose(np.outer(out, out.conj()), target, atol=1e-12)

    @pytest.mark.parametrize("opponent", [IDENTITY, QUANTUM_MOVE])
    def test_quoted_form_agrees_at_phase_opponents(self, opponent):
        quoted = DEFECT @ opponent.conj().T
        exact = self._exact_witness(opponent)
        # equal up to global phase: compare as projectors acting on the start
        out_quoted = np.kron(opponent, quoted) @ ETA_IN
        out_exact = np.kron(opponent, exact) @ ETA_IN
        np.testing.assert_allclose(
            np.outer(out_quoted, out_quoted.conj()),
            np.outer(out_exact, out_exact.conj()),
            atol=1e-12,
        )

    @pytest.mark.parametrize(
        "point", [(0.9, 0.0, 1.3), (np.pi, 0.0, 0.0), (2.0, 0.7, 4.1)]
    )
    def test_quoted_form_fails_elsewhere(self, point):
        # documents why the exact law is used instead
        u_a = unitary_matrix(THREE, point)
        quoted = DEFECT @ u_a.conj().T
        out = np.kron(u_a, quoted) @ ETA_IN
        target_prob = abs(ETA_VECTORS[(0, 1)].conj() @ out) ** 2
        assert target_prob < 0.99
