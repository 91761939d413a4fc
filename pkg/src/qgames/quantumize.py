"""Quantumization protocols for finite classical games.

Two constructions are provided:

* the parallel protocol: one quantum subsystem per player, dimension equal
  to that player's strategy count; a judge prepares a (generally entangled)
  joint state, every player applies a local unitary, and the judge measures
  in a basis with one projector per pure play. Expected payoffs come from
  commuting per-player payoff operators ``π̂_i = Σ_P π_i(P) Π_P`` via
  ``Tr[U ρ U† π̂_i]``.

* the sequential protocol: all players act in turn on one shared system
  whose basis states are the classical states of the game; payoff operators
  are diagonal in that basis and the applied unitaries compose in move
  order.

Mixed quantum plays are probabilistic mixtures of unitaries per player; the
induced product Kraus channel is applied to the initial state before the
payoff operators are evaluated.
"""
from __future__ import annotations

import itertools
from dataclasses import InitVar, dataclass
from typing import Mapping, Sequence

import numpy as np

from .classical import ClassicalGame, Play
from .errors import ShapeError, ValidationError
from .quantum import (
    TOL,
    DensityMatrix,
    KrausChannel,
    MeasurementBasis,
    UnitaryOperator,
    apply_channel,
    commutator_norm,
    dagger,
    is_hermitian,
    outcome_probabilities,
    tensor_all,
)


def computational_basis(game: ClassicalGame) -> MeasurementBasis:
    """Projectors onto the joint computational basis, labelled by plays in
    lexicographic order."""
    dim = int(np.prod(game.shape))
    projectors = np.zeros((dim, dim, dim), dtype=complex)
    for k in range(dim):
        projectors[k, k, k] = 1.0
    return MeasurementBasis(projectors, tuple(game.plays()))


def play_index(game: ClassicalGame, play: Play) -> int:
    """Composite basis index of a play: player 1 is the most significant digit."""
    idx = 0
    for size, a in zip(game.shape, play):
        idx = idx * size + a
    return idx


@dataclass(frozen=True, eq=False)
class QuantumGame:
    """A quantumized finite game.

    ``payoff_operators`` is an (n, d, d) stack, Hermitian and mutually
    commuting since all share the measurement basis as eigenbasis.
    """

    base: ClassicalGame
    initial_state: DensityMatrix
    basis: MeasurementBasis
    payoff_operators: np.ndarray
    tol: InitVar[float] = TOL

    def __post_init__(self, tol):
        dim = int(np.prod(self.base.shape))
        if self.initial_state.dim != dim:
            raise ShapeError(
                f"initial state dimension {self.initial_state.dim} "
                f"!= number of plays {dim}"
            )
        if self.basis.dim != dim:
            raise ShapeError("basis dimension does not match the play count")
        if set(self.basis.labels) != set(self.base.plays()):
            raise ValidationError("basis labels must biject with the plays of the game")
        stack = np.asarray(self.payoff_operators, dtype=complex)
        if stack.shape != (self.base.players, dim, dim):
            raise ShapeError(
                f"payoff operator stack has shape {stack.shape}, "
                f"expected {(self.base.players, dim, dim)}"
            )
        for i, op in enumerate(stack):
            if not is_hermitian(op, tol):
                raise ValidationError(f"payoff operator {i} is not Hermitian")
        for i, j in itertools.combinations(range(len(stack)), 2):
            if commutator_norm(stack[i], stack[j]) > tol:
                raise ValidationError(f"payoff operators {i} and {j} do not commute")
        stack = stack.copy()
        stack.setflags(write=False)
        object.__setattr__(self, "payoff_operators", stack)

    @property
    def dim(self) -> int:
        return self.initial_state.dim

    @property
    def local_dims(self) -> tuple[int, ...]:
        return self.base.shape

    def payoff_eigenvalues(self) -> list[dict[Play, float]]:
        """Per player, the payoff carried by each basis label (the spectrum
        of that player's operator together with its eigenbasis labels)."""
        return [
            {label: float(self.base.payoffs[i][label]) for label in self.basis.labels}
            for i in range(self.base.players)
        ]


def build_ewl(
    base: ClassicalGame,
    initial_state: DensityMatrix,
    basis: MeasurementBasis | None = None,
    tol: float = TOL,
) -> QuantumGame:
    """Quantumize ``base``: attach an initial state, a play-labelled
    measurement basis (computational by default) and the payoff operators
    built from its spectral data ``π̂_i = Σ_P π_i(P) Π_P``."""
    if basis is None:
        basis = computational_basis(base)
    dim = int(np.prod(base.shape))
    if basis.dim != dim or initial_state.dim != dim:
        raise ShapeError("state/basis dimensions do not match the play count")
    if set(basis.labels) != set(base.plays()):
        raise ValidationError("basis labels must cover every play exactly once")
    operators = np.empty((base.players, dim, dim), dtype=complex)
    for i in range(base.players):
        values = np.array([base.payoffs[i][label] for label in basis.labels])
        operators[i] = np.einsum("k,kab->ab", values, basis.projectors)
    return QuantumGame(base, initial_state, basis, operators, tol)


def _local_matrices(qg: QuantumGame, play: Sequence) -> list[np.ndarray]:
    locals_ = list(play)
    if len(locals_) != qg.base.players:
        raise ShapeError(
            f"play has {len(locals_)} local operators for {qg.base.players} players"
        )
    mats = []
    for i, op in enumerate(locals_):
        m = op.matrix if isinstance(op, UnitaryOperator) else UnitaryOperator(op).matrix
        if m.shape[0] != qg.local_dims[i]:
            raise ShapeError(
                f"operator for player {i} has dimension {m.shape[0]}, "
                f"expected {qg.local_dims[i]}"
            )
        mats.append(m)
    return mats


def joint_unitary(qg: QuantumGame, play: Sequence) -> np.ndarray:
    """The combined local operation ``U_1 ⊗ ... ⊗ U_n`` of a quantum play."""
    return tensor_all(_local_matrices(qg, play))


def final_state(qg: QuantumGame, play: Sequence) -> DensityMatrix:
    u = joint_unitary(qg, play)
    return DensityMatrix(u @ qg.initial_state.matrix @ dagger(u))


def expected_payoffs_q(qg: QuantumGame, play: Sequence) -> np.ndarray:
    """Expected payoffs ``Tr[U ρ U† π̂_i]`` of a pure quantum play."""
    rho_f = final_state(qg, play).matrix
    return np.einsum("ab,iba->i", rho_f, qg.payoff_operators).real


def outcome_distribution(qg: QuantumGame, play: Sequence) -> list[tuple[Play, float]]:
    """Measurement distribution over plays induced by a quantum play."""
    probs = outcome_probabilities(final_state(qg, play), qg.basis)
    return list(zip(qg.basis.labels, (float(p) for p in probs)))


@dataclass(frozen=True, eq=False)
class OperatorMixture:
    """A probabilistic mixture of unitaries: one player's mixed quantum strategy."""

    probabilities: np.ndarray
    operators: tuple
    tol: InitVar[float] = TOL

    def __post_init__(self, tol):
        probs = np.asarray(self.probabilities, dtype=float).reshape(-1)
        ops = tuple(
            op if isinstance(op, UnitaryOperator) else UnitaryOperator(op)
            for op in self.operators
        )
        if len(probs) != len(ops):
            raise ShapeError(f"{len(probs)} probabilities for {len(ops)} operators")
        if np.any(probs < -tol):
            raise ValidationError("mixture probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > tol:
            raise ValidationError(f"mixture probabilities sum to {probs.sum()}, expected 1")
        if len({op.dim for op in ops}) != 1:
            raise ShapeError("mixture operators must share one dimension")
        probs = np.clip(probs, 0.0, None)
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "operators", ops)

    @classmethod
    def pure(cls, operator) -> "OperatorMixture":
        return cls(np.array([1.0]), (operator,))

    @classmethod
    def over_family(cls, family, probabilities) -> "OperatorMixture":
        """Mixture over a finite_set family, in the family's label order."""
        return cls(probabilities, tuple(m for _, m in family.operators))

    @property
    def dim(self) -> int:
        return self.operators[0].dim


def product_channel(mixtures: Sequence[OperatorMixture], tol: float = TOL) -> KrausChannel:
    """Kraus channel of independent per-player mixtures:
    ``E_(k1..kn) = sqrt(Π p_iki) · U_1k1 ⊗ ... ⊗ U_nkn``."""
    kraus = []
    for combo in itertools.product(*(range(len(m.operators)) for m in mixtures)):
        weight = float(np.prod([m.probabilities[k] for m, k in zip(mixtures, combo)]))
        if weight <= 0.0:
            continue
        joint = tensor_all([m.operators[k].matrix for m, k in zip(mixtures, combo)])
        kraus.append(np.sqrt(weight) * joint)
    return KrausChannel(np.asarray(kraus), tol)


def expected_payoffs_mixed(qg: QuantumGame, mixtures: Sequence[OperatorMixture]) -> np.ndarray:
    """Expected payoffs of a mixed quantum play (per-player unitary mixtures)."""
    mixtures = list(mixtures)
    if len(mixtures) != qg.base.players:
        raise ShapeError(
            f"{len(mixtures)} mixtures for {qg.base.players} players"
        )
    for i, m in enumerate(mixtures):
        if m.dim != qg.local_dims[i]:
            raise ShapeError(
                f"mixture for player {i} has dimension {m.dim}, expected {qg.local_dims[i]}"
            )
    rho_f = apply_channel(qg.initial_state, product_channel(mixtures))
    return np.einsum("ab,iba->i", rho_f.matrix, qg.payoff_operators).real


def mixed_final_state(qg: QuantumGame, mixtures: Sequence[OperatorMixture]) -> DensityMatrix:
    return apply_channel(qg.initial_state, product_channel(list(mixtures)))


# ---------------------------------------------------------------------------
# sequential protocol
# ---------------------------------------------------------------------------

def _is_permutation_matrix(m: np.ndarray, tol: float) -> bool:
    if m.shape[0] != m.shape[1]:
        return False
    near_one = np.abs(m - 1.0) <= tol
    near_zero = np.abs(m) <= tol
    if not np.all(near_one | near_zero):
        return False
    ones = near_one.astype(int)
    return bool(np.all(ones.sum(axis=0) == 1) and np.all(ones.sum(axis=1) == 1))


@dataclass(frozen=True, eq=False)
class SequentialQuantumGame:
    """Turn-based play on one shared system.

    ``state_labels`` name the classical states (the measurement basis);
    ``classical_moves`` maps move names to permutation unitaries on that
    basis; ``move_schedule`` lists which player acts at each turn; payoff
    operators are diagonal in the state basis.
    """

    state_labels: tuple[str, ...]
    initial_state: DensityMatrix
    move_schedule: tuple[int, ...]
    classical_moves: Mapping[str, UnitaryOperator]
    payoff_operators: np.ndarray
    player_names: tuple[str, ...] | None = None
    tol: InitVar[float] = TOL

    def __post_init__(self, tol):
        labels = tuple(str(s) for s in self.state_labels)
        if len(set(labels)) != len(labels):
            raise ValidationError("state labels must be distinct")
        k = len(labels)
        if self.initial_state.dim != k:
            raise ShapeError(
                f"initial state dimension {self.initial_state.dim} != {k} states"
            )
        moves = {}
        for name, op in dict(self.classical_moves).items():
            u = op if isinstance(op, UnitaryOperator) else UnitaryOperator(op)
            if u.dim != k:
                raise ShapeError(f"move {name!r} has dimension {u.dim}, expected {k}")
            if not _is_permutation_matrix(u.matrix, tol):
                raise ValidationError(
                    f"classical move {name!r} is not a permutation of the states"
                )
            moves[str(name)] = u
        stack = np.asarray(self.payoff_operators, dtype=complex)
        if stack.ndim != 3 or stack.shape[1:] != (k, k):
            raise ShapeError(f"payoff operator stack has shape {stack.shape}")
        for i, op in enumerate(stack):
            if float(np.abs(op - np.diag(np.diag(op))).max()) > tol:
                raise ValidationError(f"payoff operator {i} is not diagonal in the state basis")
            if float(np.abs(np.diag(op).imag).max()) > tol:
                raise ValidationError(f"payoff operator {i} has complex payoffs")
        schedule = tuple(int(p) for p in self.move_schedule)
        if not schedule:
            raise ValidationError("move schedule must be nonempty")
        n = stack.shape[0]
        if any(p < 0 or p >= n for p in schedule):
            raise ValidationError(
                f"move schedule references players outside 0..{n - 1}"
            )
        names = self.player_names
        if names is not None:
            names = tuple(str(x) for x in names)
            if len(names) != n:
                raise ShapeError("player_names length does not match payoff count")
        stack = stack.copy()
        stack.setflags(write=False)
        object.__setattr__(self, "state_labels", labels)
        object.__setattr__(self, "classical_moves", moves)
        object.__setattr__(self, "payoff_operators", stack)
        object.__setattr__(self, "move_schedule", schedule)
        object.__setattr__(self, "player_names", names)

    @property
    def dim(self) -> int:
        return len(self.state_labels)

    @property
    def players(self) -> int:
        return self.payoff_operators.shape[0]


def build_sequential(
    state_labels: Sequence[str],
    initial_state: DensityMatrix,
    schedule: Sequence[int],
    classical_moves: Mapping[str, "UnitaryOperator | np.ndarray"],
    state_payoffs: Sequence[Sequence[float]],
    player_names: Sequence[str] | None = None,
    tol: float = TOL,
) -> SequentialQuantumGame:
    """Assemble a sequential game from per-player payoff vectors over states.

    ``state_payoffs[i][j]`` is player ``i``'s payoff when the final
    measurement finds state ``j``; the diagonal payoff operators are built
    from these.
    """
    payoffs = np.asarray(state_payoffs, dtype=float)
    if payoffs.ndim != 2 or payoffs.shape[1] != len(state_labels):
        raise ShapeError(
            f"state payoffs have shape {payoffs.shape}, expected (players, {len(state_labels)})"
        )
    operators = np.asarray([np.diag(row.astype(complex)) for row in payoffs])
    return SequentialQuantumGame(
        tuple(state_labels),
        initial_state,
        tuple(schedule),
        dict(classical_moves),
        operators,
        tuple(player_names) if player_names is not None else None,
        tol,
    )


def sequential_basis(sg: SequentialQuantumGame) -> MeasurementBasis:
    """The state-label measurement basis of a sequential game."""
    k = sg.dim
    projectors = np.zeros((k, k, k), dtype=complex)
    for j in range(k):
        projectors[j, j, j] = 1.0
    return MeasurementBasis(projectors, sg.state_labels)


def play_sequential(sg: SequentialQuantumGame, moves: Sequence) -> np.ndarray:
    """Expected payoffs after applying ``moves`` in schedule order.

    ``moves[t]`` is the unitary played at turn ``t`` (by player
    ``sg.move_schedule[t]``); operators compose right-to-left so the first
    move acts first: ``U = U_T ... U_2 U_1``.
    """
    moves = list(moves)
    if len(moves) != len(sg.move_schedule):
        raise ShapeError(
            f"{len(moves)} moves supplied for a schedule of length {len(sg.move_schedule)}"
        )
    total = np.eye(sg.dim, dtype=complex)
    for op in moves:
        m = op.matrix if isinstance(op, UnitaryOperator) else UnitaryOperator(op).matrix
        if m.shape[0] != sg.dim:
            raise ShapeError(f"move dimension {m.shape[0]} does not match game dimension {sg.dim}")
        total = m @ total
    rho_f = total @ sg.initial_state.matrix @ dagger(total)
    return np.einsum("ab,iba->i", rho_f, sg.payoff_operators).real
