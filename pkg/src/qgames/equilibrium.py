"""Best-response search and equilibrium certification for quantum games.

The search is numeric and uniform across strategy families: an exhaustive
parameter-grid scan picks the incumbent, then coordinatewise golden-section
passes refine it inside a shrinking window (wrapping around periodic
coordinates, whose optima often sit on the 0/2π seam). Payoffs along the
scan are evaluated through a precomputed quartic coefficient tensor, so a
whole grid costs a single einsum:

    payoff(U) = Σ U[a,b]·conj(U[c,d])·T[a,b,c,d]
    T[a,b,c,d] = Tr[C_ab ρ C_cd† π̂],   C_ab = V_1 ⊗ .. ⊗ e_ab ⊗ .. ⊗ V_n

with the other players' operators V_j held fixed.

Certification is an ε-test: a profile is certified when no player's best
response improves on the profile payoff by more than ε; refutation demands
a gain above 10ε so borderline profiles flap in neither direction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .classical import pareto_relation
from .errors import ParameterError, ShapeError, UnsupportedError
from .quantum import TOL, DensityMatrix, UnitaryOperator, dagger
from .quantumize import (
    OperatorMixture,
    QuantumGame,
    expected_payoffs_mixed,
    expected_payoffs_q,
)
from .strategies import (
    FINITE_SET,
    ParamPoint,
    StrategyFamily,
    batch_unitaries,
    param_unitary,
)

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
_GOLDEN_STEPS = 25
_IMPROVEMENT_EPS = 1e-13


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the best-response search; defaults suit 2x2 subsystems."""

    grid_resolution: int = 64
    refinement_iterations: int = 40
    epsilon: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ParameterError("epsilon must be positive")
        if self.grid_resolution < 2:
            raise ParameterError("grid resolution must be at least 2")
        if self.refinement_iterations < 0:
            raise ParameterError("refinement iterations must be nonnegative")


@dataclass(frozen=True)
class EquilibriumReport:
    """Outcome of an ε-Nash check."""

    profile: tuple
    payoffs: tuple[float, ...]
    certified: bool
    max_unilateral_gain: float
    epsilon: float
    gains: tuple[float, ...]
    best_responses: tuple
    pareto_flags: dict[str, str] = field(default_factory=dict)

    @property
    def refuted(self) -> bool:
        """A confident negative: some player gains more than 10ε."""
        return self.max_unilateral_gain > 10.0 * self.epsilon


class _LocalPayoff:
    """One player's payoff as a quartic form in their local operator."""

    def __init__(self, qg: QuantumGame, player: int, others: Mapping[int, np.ndarray]):
        n = qg.base.players
        fixed = {}
        for j in range(n):
            if j == player:
                continue
            if j not in others:
                raise ShapeError(f"missing fixed strategy for player {j}")
            m = others[j]
            m = m.matrix if isinstance(m, UnitaryOperator) else np.asarray(m, dtype=complex)
            if m.shape[0] != qg.local_dims[j]:
                raise ShapeError(
                    f"fixed operator for player {j} has dimension {m.shape[0]}, "
                    f"expected {qg.local_dims[j]}"
                )
            fixed[j] = m
        d = qg.local_dims[player]
        slots = []
        for a in range(d):
            for b in range(d):
                unit = np.zeros((d, d), dtype=complex)
                unit[a, b] = 1.0
                factors = [unit if j == player else fixed[j] for j in range(n)]
                joint = factors[0]
                for f in factors[1:]:
                    joint = np.kron(joint, f)
                slots.append(joint)
        rho = qg.initial_state.matrix
        pihat = qg.payoff_operators[player]
        k = len(slots)
        coeff = np.empty((k, k), dtype=complex)
        for i, ci in enumerate(slots):
            left = ci @ rho
            for j, cj in enumerate(slots):
                coeff[i, j] = np.trace(left @ dagger(cj) @ pihat)
        self.dim = d
        self.coeff = coeff.reshape(d, d, d, d)

    def value(self, u: np.ndarray) -> float:
        return float(np.einsum("ab,cd,abcd->", u, u.conj(), self.coeff).real)

    def values(self, us: np.ndarray) -> np.ndarray:
        return np.einsum("gab,gcd,abcd->g", us, us.conj(), self.coeff).real


def _golden_section_max(f, lo: float, hi: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(_GOLDEN_STEPS):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def best_response(
    qg: QuantumGame,
    player: int,
    others: Mapping[int, "UnitaryOperator | np.ndarray"],
    family: StrategyFamily,
    config: SearchConfig = SearchConfig(),
) -> tuple[ParamPoint, float]:
    """Best parameter point for ``player`` with the other players fixed.

    Grid scan followed by coordinatewise golden-section refinement. The
    returned payoff is never below any grid payoff, ties go to the lowest
    lexicographic grid point, and the whole procedure is deterministic for
    a fixed config.
    """
    if family.kind == FINITE_SET:
        raise UnsupportedError(
            "best_response searches parameterized families; "
            "use best_response_mixed_finite for finite operator sets"
        )
    if family.dim != qg.local_dims[player]:
        raise ShapeError(
            f"family dimension {family.dim} does not match player "
            f"{player}'s subsystem dimension {qg.local_dims[player]}"
        )
    surface = _LocalPayoff(qg, player, others)
    ranges = family.ranges
    axes = [rng.axis(config.grid_resolution) for rng in ranges]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    values = surface.values(batch_unitaries(family, points))
    k = int(np.argmax(values))
    x = points[k].copy()
    best = float(values[k])

    spans = np.array([axis[1] - axis[0] if len(axis) > 1 else 0.0 for axis in axes])
    window = spans.copy()

    def clamp(dim: int, v):
        rng = ranges[dim]
        if rng.periodic:
            return rng.lo + (v - rng.lo) % (rng.hi - rng.lo)
        return v

    def along(dim: int, v: float) -> float:
        y = x.copy()
        y[dim] = clamp(dim, v)
        return surface.value(batch_unitaries(family, y[None, :])[0])

    def joint_rescan() -> tuple[np.ndarray, float] | None:
        # coordinatewise moves stall in coupled valleys, most notably at the
        # θ-boundary where the two phases degenerate; scan coordinate pairs
        # jointly, sweeping periodic coordinates over their whole range
        blocks = []
        for d1 in range(len(ranges)):
            for d2 in range(d1 + 1, len(ranges)):
                grids = []
                for d in (d1, d2):
                    rng = ranges[d]
                    if rng.periodic:
                        grids.append(np.linspace(rng.lo, rng.hi, 17, endpoint=False))
                    else:
                        lo = max(rng.lo, x[d] - window[d])
                        hi = min(rng.hi, x[d] + window[d])
                        grids.append(np.linspace(lo, hi, 9))
                g1, g2 = np.meshgrid(grids[0], grids[1], indexing="ij")
                block = np.tile(x, (g1.size, 1))
                block[:, d1] = clamp(d1, g1.ravel())
                block[:, d2] = clamp(d2, g2.ravel())
                blocks.append(block)
        if not blocks:
            return None
        candidates = np.concatenate(blocks, axis=0)
        scan = surface.values(batch_unitaries(family, candidates))
        j = int(np.argmax(scan))
        if scan[j] > best + _IMPROVEMENT_EPS:
            return candidates[j].copy(), float(scan[j])
        return None

    rescans_left = 4 if len(ranges) > 1 else 0
    for _ in range(config.refinement_iterations):
        improved = 0.0
        for dim in range(len(ranges)):
            if window[dim] <= 0.0:
                continue
            rng = ranges[dim]
            if rng.periodic:
                lo, hi = x[dim] - window[dim], x[dim] + window[dim]
            else:
                lo = max(rng.lo, x[dim] - window[dim])
                hi = min(rng.hi, x[dim] + window[dim])
            xd, vd = _golden_section_max(lambda v: along(dim, v), lo, hi)
            if vd > best + _IMPROVEMENT_EPS:
                improved = max(improved, vd - best)
                best = vd
                x[dim] = clamp(dim, xd)
        if improved <= _IMPROVEMENT_EPS:
            escaped = joint_rescan() if rescans_left > 0 else None
            if escaped is not None:
                rescans_left -= 1
                x, best = escaped
            else:
                window *= 0.6  # no progress at this scale: zoom in
    return tuple(float(v) for v in x), best


def profile_unitaries(family: StrategyFamily, profile: Sequence[ParamPoint]) -> list[UnitaryOperator]:
    return [param_unitary(family, point) for point in profile]


def verify_nash(
    qg: QuantumGame,
    profile: Sequence[ParamPoint],
    family: StrategyFamily,
    config: SearchConfig = SearchConfig(),
    reference: Sequence[tuple[str, Sequence[float]]] = (),
) -> EquilibriumReport:
    """ε-Nash check of a parameterized profile.

    Runs :func:`best_response` for every player with the rest of the
    profile held fixed; certifies when the largest unilateral gain is at
    most ``config.epsilon``. ``reference`` entries (label, payoff vector)
    are Pareto-compared against the profile payoffs.
    """
    units = profile_unitaries(family, profile)
    payoffs = expected_payoffs_q(qg, units)
    gains = []
    responses = []
    for i in range(qg.base.players):
        others = {j: units[j] for j in range(qg.base.players) if j != i}
        point, value = best_response(qg, i, others, family, config)
        gains.append(float(value - payoffs[i]))
        responses.append(point)
    max_gain = max(gains)
    flags = {
        str(label): pareto_relation(payoffs, np.asarray(ref, dtype=float))
        for label, ref in reference
    }
    return EquilibriumReport(
        profile=tuple(tuple(p) for p in profile),
        payoffs=tuple(float(v) for v in payoffs),
        certified=max_gain <= config.epsilon,
        max_unilateral_gain=max_gain,
        epsilon=config.epsilon,
        gains=tuple(gains),
        best_responses=tuple(responses),
        pareto_flags=flags,
    )


# ---------------------------------------------------------------------------
# finite operator sets (mixtures)
# ---------------------------------------------------------------------------

def _vertex_payoffs(
    qg: QuantumGame,
    player: int,
    others: Mapping[int, OperatorMixture],
    operator_set: StrategyFamily,
) -> np.ndarray:
    if operator_set.kind != FINITE_SET:
        raise UnsupportedError("vertex enumeration needs a finite operator set")
    values = []
    for _, op in operator_set.operators:
        mixtures = []
        for j in range(qg.base.players):
            if j == player:
                mixtures.append(OperatorMixture.pure(op))
            else:
                mixtures.append(others[j])
        values.append(expected_payoffs_mixed(qg, mixtures)[player])
    return np.asarray(values)


def best_response_mixed_finite(
    qg: QuantumGame,
    player: int,
    others: Mapping[int, OperatorMixture],
    operator_set: StrategyFamily,
    tol: float = TOL,
) -> np.ndarray:
    """Best mixture over a finite operator set against fixed opponent mixtures.

    The expected payoff is affine in the player's own mixture, so some pure
    operator (a vertex) is always optimal; ties return the uniform
    distribution over all optimal vertices.
    """
    values = _vertex_payoffs(qg, player, others, operator_set)
    top = values.max()
    optimal = values >= top - tol
    out = np.zeros(len(values))
    out[optimal] = 1.0 / optimal.sum()
    return out


def verify_nash_mixed_finite(
    qg: QuantumGame,
    mixtures: Sequence[OperatorMixture],
    operator_sets: Sequence[StrategyFamily],
    config: SearchConfig = SearchConfig(),
    reference: Sequence[tuple[str, Sequence[float]]] = (),
) -> EquilibriumReport:
    """ε-Nash check of a mixed profile over finite operator sets.

    Affinity in each player's own mixture means the best deviation is a
    vertex, so per-player gains come from vertex enumeration alone.
    """
    mixtures = list(mixtures)
    payoffs = expected_payoffs_mixed(qg, mixtures)
    gains = []
    responses = []
    for i in range(qg.base.players):
        others = {j: mixtures[j] for j in range(qg.base.players) if j != i}
        values = _vertex_payoffs(qg, i, others, operator_sets[i])
        gains.append(float(values.max() - payoffs[i]))
        responses.append(
            best_response_mixed_finite(qg, i, others, operator_sets[i])
        )
    max_gain = max(gains)
    flags = {
        str(label): pareto_relation(payoffs, np.asarray(ref, dtype=float))
        for label, ref in reference
    }
    return EquilibriumReport(
        profile=tuple(tuple(m.probabilities) for m in mixtures),
        payoffs=tuple(float(v) for v in payoffs),
        certified=max_gain <= config.epsilon,
        max_unilateral_gain=max_gain,
        epsilon=config.epsilon,
        gains=tuple(gains),
        best_responses=tuple(tuple(r) for r in responses),
        pareto_flags=flags,
    )


# ---------------------------------------------------------------------------
# analytic forcing response (two maximally entangled qubits)
# ---------------------------------------------------------------------------

def _pure_vector(rho: DensityMatrix, tol: float = 1e-9) -> np.ndarray:
    vals, vecs = np.linalg.eigh(rho.matrix)
    if vals[-1] < 1.0 - tol:
        raise UnsupportedError("state is not pure")
    return vecs[:, -1]


def _entangling_factor(vector: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """K with |v⟩ = (I ⊗ K)|Φ⁺⟩ for a maximally entangled 2-qubit vector."""
    psi = np.asarray(vector, dtype=complex).reshape(2, 2)
    k = np.sqrt(2.0) * psi.T
    if float(np.abs(dagger(k) @ k - np.eye(2)).max()) > tol:
        raise UnsupportedError("state is not maximally entangled")
    return k


def forcing_response(qg: QuantumGame, player: int, opponent) -> np.ndarray:
    """Closed-form local response that steers the game onto ``player``'s best play.

    For a two-player game on qubits with a maximally entangled pure initial
    state and a maximally entangled basis vector on the player's
    highest-payoff play, the transpose identity
    ``(A ⊗ B)|Φ⁺⟩ = (A Bᵀ ⊗ I)|Φ⁺⟩`` pins down the unique local unitary
    (up to phase) mapping the initial state onto that basis direction, no
    matter what the opponent plays. Returns the 2x2 response matrix.
    """
    if qg.base.players != 2 or qg.local_dims != (2, 2):
        raise UnsupportedError("forcing responses cover two-qubit games only")
    opp = opponent.matrix if isinstance(opponent, UnitaryOperator) else np.asarray(opponent, dtype=complex)
    psi_in = _pure_vector(qg.initial_state)
    best_play = max(
        qg.basis.labels, key=lambda play: qg.base.payoffs[player][play]
    )
    idx = qg.basis.labels.index(best_play)
    projector = qg.basis.projectors[idx]
    vals, vecs = np.linalg.eigh(projector)
    target = vecs[:, -1]
    if vals[-1] < 1.0 - 1e-9:
        raise UnsupportedError("target projector is not rank one")
    start_factor = _entangling_factor(psi_in)
    target_factor = _entangling_factor(target)
    if player == 1:
        return target_factor @ opp.conj() @ dagger(start_factor)
    return target_factor.T @ opp.conj() @ start_factor.conj()


# ---------------------------------------------------------------------------
# Pareto analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoReport:
    labels: tuple[str, ...]
    relations: tuple[tuple[str, ...], ...]
    optimal: tuple[str, ...]


def pareto_report(entries: Sequence[tuple[str, Sequence[float]]]) -> ParetoReport:
    """Pairwise Pareto relations and the undominated subset of labelled
    payoff vectors."""
    labels = tuple(str(label) for label, _ in entries)
    vectors = [np.asarray(v, dtype=float).reshape(-1) for _, v in entries]
    if len({v.size for v in vectors}) > 1:
        raise ShapeError("payoff vectors must share one length")
    matrix = tuple(
        tuple(pareto_relation(a, b) for b in vectors) for a in vectors
    )
    optimal = []
    for i, v in enumerate(vectors):
        dominated = any(
            np.all(w >= v) and np.any(w > v)
            for j, w in enumerate(vectors)
            if j != i
        )
        if not dominated:
            optimal.append(labels[i])
    return ParetoReport(labels, matrix, tuple(optimal))
