"""Best-response search, certification, forcing responses, Pareto reports."""
import numpy as np
import pytest

from qgames.catalog import load
from qgames.equilibrium import (
    SearchConfig,
    best_response,
    best_response_mixed_finite,
    forcing_response,
    pareto_report,
    verify_nash,
    verify_nash_mixed_finite,
)
from qgames.errors import UnsupportedError
from qgames.quantum import UnitaryOperator
from qgames.quantumize import OperatorMixture, expected_payoffs_mixed, expected_payoffs_q
from qgames.strategies import (
    DEFECT,
    FLIP,
    IDENTITY,
    QUANTUM_MOVE,
    StrategyFamily,
    param_unitary,
)

TWO = StrategyFamily.two_param()
THREE = StrategyFamily.three_param()
ONE = StrategyFamily.one_param()
PHASE_POINT = (0.0, np.pi / 2)

FAST = SearchConfig(grid_resolution=16, refinement_iterations=40)


@pytest.fixture(scope="module")
def dilemma_q():
    return load("prisoners_dilemma", verify=False).quantum


@pytest.fixture(scope="module")
def coordination():
    return load("battle_of_sexes", verify=False)


def _random_three_param_point(rng):
    return (
        float(rng.uniform(0, np.pi)),
        float(rng.uniform(0, 2 * np.pi)),
        float(rng.uniform(0, 2 * np.pi)),
    )


class TestBestResponse:
    def test_response_to_defection_is_the_phase_move(self, dilemma_q):
        point, value = best_response(
            dilemma_q, 0, {1: UnitaryOperator(DEFECT)}, TWO
        )
        np.testing.assert_allclose(point, PHASE_POINT, atol=1e-12)
        assert abs(value) <= 1e-9

    def test_response_to_phase_move_stays_on_phase_line(self, dilemma_q):
        point, value = best_response(
            dilemma_q, 0, {1: UnitaryOperator(QUANTUM_MOVE)}, TWO
        )
        assert point[1] == pytest.approx(np.pi / 2, abs=1e-9)
        assert value == pytest.approx(-1.0, abs=1e-9)  # -gamma

    def test_one_param_response_to_defection_is_defection(self, dilemma_q):
        point, value = best_response(dilemma_q, 0, {1: UnitaryOperator(DEFECT)}, ONE)
        assert point[0] == pytest.approx(np.pi, abs=1e-9)
        assert value == pytest.approx(-3.0, abs=1e-9)  # -beta

    @pytest.mark.parametrize("seed", range(5))
    def test_three_param_search_reaches_the_forcing_value(self, dilemma_q, seed):
        rng = np.random.default_rng(seed)
        opp = param_unitary(THREE, _random_three_param_point(rng))
        point, value = best_response(dilemma_q, 0, {1: opp}, THREE, FAST)
        assert value >= -1e-4  # player's maximum payoff is 0

    def test_monotone_in_grid_resolution(self, dilemma_q):
        opponents = [(0.8, 0.3), (2.1, 1.2), (np.pi, 0.0)]
        for opp_point in opponents:
            opp = param_unitary(TWO, opp_point)
            values = []
            for res in (8, 16, 32):
                cfg = SearchConfig(grid_resolution=res, refinement_iterations=40)
                _, value = best_response(dilemma_q, 0, {1: opp}, TWO, cfg)
                values.append(value)
            assert values[1] >= values[0] - 1e-9
            assert values[2] >= values[1] - 1e-9

    def test_payoff_at_least_grid_best(self, dilemma_q):
        # the refinement must never undercut the scanned grid
        from qgames.strategies import batch_unitaries, parameter_grid
        from qgames.equilibrium import _LocalPayoff

        opp = param_unitary(TWO, (1.234, 0.77))
        cfg = SearchConfig(grid_resolution=9, refinement_iterations=12)
        point, value = best_response(dilemma_q, 0, {1: opp}, TWO, cfg)
        surface = _LocalPayoff(dilemma_q, 0, {1: opp})
        grid_vals = surface.values(batch_unitaries(TWO, parameter_grid(TWO, 9)))
        assert value >= grid_vals.max() - 1e-12

    def test_finite_family_rejected(self, dilemma_q):
        finite = StrategyFamily.finite((("I", IDENTITY),))
        with pytest.raises(UnsupportedError):
            best_response(dilemma_q, 0, {1: UnitaryOperator(DEFECT)}, finite)

    def test_deterministic(self, dilemma_q):
        opp = param_unitary(THREE, (1.1, 2.2, 3.3))
        first = best_response(dilemma_q, 0, {1: opp}, THREE, FAST)
        second = best_response(dilemma_q, 0, {1: opp}, THREE, FAST)
        assert first == second


class TestVerifyNash:
    def test_phase_profile_certifies(self, dilemma_q):
        report = verify_nash(dilemma_q, (PHASE_POINT, PHASE_POINT), TWO)
        assert report.certified and not report.refuted
        np.testing.assert_allclose(report.payoffs, (-1.0, -1.0), atol=1e-9)

    def test_certification_survives_grid_refinement(self, dilemma_q):
        # doubling the resolution with a doubled epsilon must still certify
        base = SearchConfig(grid_resolution=64, refinement_iterations=40, epsilon=1e-6)
        fine = SearchConfig(grid_resolution=128, refinement_iterations=40, epsilon=2e-6)
        assert verify_nash(dilemma_q, (PHASE_POINT, PHASE_POINT), TWO, base).certified
        assert verify_nash(dilemma_q, (PHASE_POINT, PHASE_POINT), TWO, fine).certified

    def test_one_param_mutual_defection_certifies(self, dilemma_q):
        report = verify_nash(dilemma_q, ((np.pi,), (np.pi,)), ONE)
        assert report.certified
        np.testing.assert_allclose(report.payoffs, (-3.0, -3.0), atol=1e-9)

    def test_mutual_cooperation_is_refuted(self, dilemma_q):
        report = verify_nash(dilemma_q, ((0.0, 0.0), (0.0, 0.0)), TWO)
        assert report.refuted and not report.certified
        assert report.max_unilateral_gain == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("seed", range(4))
    def test_three_param_profiles_always_refuted(self, dilemma_q, seed):
        rng = np.random.default_rng(1000 + seed)
        profile = (_random_three_param_point(rng), _random_three_param_point(rng))
        report = verify_nash(dilemma_q, profile, THREE, FAST)
        assert report.refuted

    def test_pareto_flags(self, dilemma_q):
        report = verify_nash(
            dilemma_q,
            (PHASE_POINT, PHASE_POINT),
            TWO,
            reference=[("mutual_defection", (-3.0, -3.0))],
        )
        assert report.pareto_flags == {"mutual_defection": "a_dominates"}


class TestForcingResponse:
    @pytest.mark.parametrize("responder", [0, 1])
    def test_reaches_the_maximum_for_random_opponents(self, dilemma_q, responder):
        rng = np.random.default_rng(responder)
        for _ in range(50):
            opp_point = _random_three_param_point(rng)
            opp = param_unitary(THREE, opp_point)
            witness = forcing_response(dilemma_q, responder, opp)
            play = [None, None]
            play[responder] = UnitaryOperator(witness)
            play[1 - responder] = opp
            payoffs = expected_payoffs_q(dilemma_q, play)
            assert abs(payoffs[responder]) <= 1e-9  # the maximum is 0

    def test_search_attains_the_forcing_value(self, dilemma_q):
        rng = np.random.default_rng(77)
        for _ in range(50):
            opp = param_unitary(THREE, _random_three_param_point(rng))
            _, value = best_response(dilemma_q, 1, {0: opp}, THREE, FAST)
            assert value >= -1e-4

    def test_requires_maximal_entanglement(self, coordination):
        # the coordination game's computational basis targets are product
        # states, so no forcing response exists there
        with pytest.raises(UnsupportedError):
            forcing_response(coordination.quantum, 0, UnitaryOperator(IDENTITY))


class TestStationarityResiduals:
    """Cleared-denominator stationarity conditions for the two-parameter family.

    tan(θa/2)·cos(φb) + tan(θb/2)·cos(φa) = 0
    tan(θa/2)·sin(φb) + cot(θb/2)·cos(φa) = 0

    multiplied through by cos(θa/2)·cos(θb/2) and cos(θa/2)·sin(θb/2). They
    hold at interior stationary points; searched optima on this payoff
    surface land on the parameter-box boundary, where only the corner at
    the phase move satisfies them. The residual check is therefore applied
    when the optimum is interior, plus explicitly at the certified corner.
    """

    @staticmethod
    def _residuals(pa, pb):
        ta, fa = pa
        tb, fb = pb
        r1 = np.sin(ta / 2) * np.cos(tb / 2) * np.cos(fb) + np.sin(tb / 2) * np.cos(
            ta / 2
        ) * np.cos(fa)
        r2 = np.sin(ta / 2) * np.sin(tb / 2) * np.sin(fb) + np.cos(ta / 2) * np.cos(
            tb / 2
        ) * np.cos(fa)
        return abs(r1), abs(r2)

    def test_vanish_at_certified_equilibrium(self):
        r1, r2 = self._residuals(PHASE_POINT, PHASE_POINT)
        assert r1 <= 1e-12 and r2 <= 1e-12

    def test_vanish_at_best_response_to_defection(self):
        r1, r2 = self._residuals(PHASE_POINT, (np.pi, 0.0))
        assert r1 <= 1e-12 and r2 <= 1e-12

    def test_interior_optima_satisfy_residuals(self, dilemma_q):
        rng = np.random.default_rng(5)
        interior_seen = 0
        for _ in range(12):
            opp_point = (float(rng.uniform(0, np.pi)), float(rng.uniform(0, np.pi / 2)))
            opp = param_unitary(TWO, opp_point)
            point, _ = best_response(dilemma_q, 0, {1: opp}, TWO, FAST)
            margin = 1e-6
            interior = (
                margin < point[0] < np.pi - margin
                and margin < point[1] < np.pi / 2 - margin
            )
            if interior:
                interior_seen += 1
                r1, r2 = self._residuals(point, opp_point)
                assert r1 <= 1e-6 and r2 <= 1e-6


class TestFiniteSetResponses:
    def _family(self):
        return StrategyFamily.finite((("I", IDENTITY), ("X", FLIP)))

    def test_uniform_opponent_ties_everything(self, coordination):
        family = self._family()
        others = {0: OperatorMixture.over_family(family, [0.5, 0.5])}
        probs = best_response_mixed_finite(coordination.quantum, 1, others, family)
        np.testing.assert_allclose(probs, [0.5, 0.5])

    def test_pure_opponent_selects_matching_operator(self, coordination):
        family = self._family()
        others = {0: OperatorMixture.over_family(family, [1.0, 0.0])}
        probs = best_response_mixed_finite(coordination.quantum, 1, others, family)
        np.testing.assert_allclose(probs, [1.0, 0.0])

    def test_single_operator_set(self, coordination):
        family = StrategyFamily.finite((("I", IDENTITY),))
        others = {0: OperatorMixture.over_family(family, [1.0])}
        probs = best_response_mixed_finite(coordination.quantum, 1, others, family)
        np.testing.assert_allclose(probs, [1.0])

    @pytest.mark.parametrize("seed", range(3))
    def test_response_beats_random_mixtures(self, coordination, seed):
        # affine payoffs: the vertex response must top a large mixture sample
        family = self._family()
        rng = np.random.default_rng(seed)
        opp = OperatorMixture.over_family(family, rng.dirichlet([1, 1]))
        others = {0: opp}
        probs = best_response_mixed_finite(coordination.quantum, 1, others, family)
        best = expected_payoffs_mixed(
            coordination.quantum, [opp, OperatorMixture.over_family(family, probs)]
        )[1]
        for _ in range(1000):
            candidate = OperatorMixture.over_family(family, rng.dirichlet([1, 1]))
            value = expected_payoffs_mixed(coordination.quantum, [opp, candidate])[1]
            assert value <= best + 1e-9

    def test_affine_in_own_mixture(self, coordination):
        family = self._family()
        rng = np.random.default_rng(11)
        opp = OperatorMixture.over_family(family, [0.3, 0.7])
        p, q = rng.dirichlet([1, 1]), rng.dirichlet([1, 1])
        t = 0.37
        blend = OperatorMixture.over_family(family, t * p + (1 - t) * q)
        v_blend = expected_payoffs_mixed(coordination.quantum, [opp, blend])[1]
        v_p = expected_payoffs_mixed(
            coordination.quantum, [opp, OperatorMixture.over_family(family, p)]
        )[1]
        v_q = expected_payoffs_mixed(
            coordination.quantum, [opp, OperatorMixture.over_family(family, q)]
        )[1]
        assert v_blend == pytest.approx(t * v_p + (1 - t) * v_q, abs=1e-12)

    def test_verify_mixed_profiles(self, coordination):
        family = self._family()
        uniform = OperatorMixture.over_family(family, [0.5, 0.5])
        report = verify_nash_mixed_finite(
            coordination.quantum, [uniform, uniform], (family, family)
        )
        assert report.certified
        np.testing.assert_allclose(report.payoffs, (1.75, 1.75), atol=1e-9)
        # a lopsided side is exploitable: the opponent matches its majority
        # operator (coordination), so the profile is refuted
        lopsided = OperatorMixture.over_family(family, [0.8, 0.2])
        report = verify_nash_mixed_finite(
            coordination.quantum, [lopsided, uniform], (family, family)
        )
        assert not report.certified
        assert report.gains[0] == pytest.approx(0.0, abs=1e-12)
        assert report.gains[1] == pytest.approx(0.45, abs=1e-9)
        np.testing.assert_allclose(report.best_responses[1], (1.0, 0.0))


class TestParetoReport:
    def test_coordination_ranking(self):
        report = pareto_report(
            [
                ("classical_mixed", (5 / 3, 5 / 3)),
                ("quantum_pure_II", (2.5, 2.5)),
                ("quantum_pure_XX", (2.5, 2.5)),
                ("quantum_mixed", (1.75, 1.75)),
            ]
        )
        assert set(report.optimal) == {"quantum_pure_II", "quantum_pure_XX"}
        labels = report.labels
        i, j = labels.index("quantum_pure_II"), labels.index("quantum_mixed")
        assert report.relations[i][j] == "a_dominates"

    def test_single_entry(self):
        report = pareto_report([("only", (1.0, 2.0))])
        assert report.optimal == ("only",)
        assert report.relations == (("equal",),)

    def test_dilemma_pair(self):
        report = pareto_report([("phase", (-1.0, -1.0)), ("defect", (-3.0, -3.0))])
        assert report.optimal == ("phase",)
