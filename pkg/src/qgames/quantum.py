"""Dense complex linear algebra for finite-dimensional quantum systems.

States, projective measurement, unitary evolution, Kraus channels and
composite systems, built on plain numpy complex matrices. Problem sizes in
this package are tiny (composite dimensions of a few to a few dozen), so
everything is stored dense and unstructured.

All values are immutable after construction and every operation is a pure
function of its inputs; outcome sampling threads an explicit generator.
Values can therefore be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Hashable, NamedTuple, Sequence

import numpy as np

from .errors import (
    ChannelError,
    DimensionLimitError,
    ShapeError,
    ValidationError,
)

#: Default absolute tolerance for all invariant checks, overridable per call.
TOL = 1e-9

#: Default cap on composite dimensions produced by tensor products. Keeps
#: dense eigenvalue checks well below a second.
DIM_CAP = 4096


def as_complex_matrix(values) -> np.ndarray:
    """Coerce ``values`` to a finite 2-D complex ndarray."""
    m = np.asarray(values, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got {m.ndim} dimension(s)")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix entries must be finite")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def _frozen(m: np.ndarray) -> np.ndarray:
    out = np.array(m, dtype=complex)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# operations on bare matrices
# ---------------------------------------------------------------------------

def tensor_product(a, b, *, dim_cap: int = DIM_CAP) -> np.ndarray:
    """Kronecker product with ``a`` as the slower-varying (most significant)
    index block.

    Raises :class:`DimensionLimitError` if the product dimension would exceed
    ``dim_cap``.
    """
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > dim_cap:
        raise DimensionLimitError(
            f"tensor product dimension {max(rows, cols)} exceeds cap {dim_cap}"
        )
    return np.kron(a, b)


def tensor_all(mats: Sequence[np.ndarray], *, dim_cap: int = DIM_CAP) -> np.ndarray:
    """Left-to-right Kronecker product of a sequence of matrices."""
    if not mats:
        raise ShapeError("tensor_all needs at least one factor")
    out = as_complex_matrix(mats[0])
    for m in mats[1:]:
        out = tensor_product(out, m, dim_cap=dim_cap)
    return out


def _require_square(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"{what} must be square, got shape {m.shape}")
    return m


def is_unitary(m, tol: float = TOL) -> bool:
    """True iff ``m†m`` deviates from the identity by at most ``tol`` per entry."""
    m = _require_square(m)
    dev = dagger(m) @ m - np.eye(m.shape[0])
    return float(np.abs(dev).max()) <= tol


def is_hermitian(m, tol: float = TOL) -> bool:
    m = _require_square(m)
    return float(np.abs(m - dagger(m)).max()) <= tol


def commutator_norm(a, b) -> float:
    """Max-entry magnitude of ``ab - ba``."""
    a = _require_square(a)
    b = _require_square(b)
    if a.shape != b.shape:
        raise ShapeError(f"commutator needs equal shapes, got {a.shape} and {b.shape}")
    return float(np.abs(a @ b - b @ a).max())


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PureState:
    """Normalised state vector of a finite-dimensional system."""

    amplitudes: np.ndarray
    tol: InitVar[float] = TOL

    def __post_init__(self, tol):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise ShapeError("state vector must be non-empty")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("state amplitudes must be finite")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > tol:
            raise ValidationError(f"state vector norm² is {norm}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(amps.reshape(-1)))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def to_density(self) -> "DensityMatrix":
        """|ψ⟩⟨ψ| as a density matrix."""
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive-semidefinite, trace-one operator."""

    matrix: np.ndarray
    tol: InitVar[float] = TOL

    def __post_init__(self, tol):
        m = _require_square(self.matrix, "density matrix")
        if not is_hermitian(m, tol):
            raise ValidationError("density matrix must be Hermitian")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > tol:
            raise ValidationError(f"density matrix trace is {trace}, expected 1")
        smallest = float(np.linalg.eigvalsh(m).min())
        if smallest < -tol:
            raise ValidationError(
                f"density matrix has negative eigenvalue {smallest}"
            )
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, amplitudes, tol: float = TOL) -> "DensityMatrix":
        return PureState(amplitudes, tol).to_density()


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    """Square matrix with ``u†u = I`` within tolerance."""

    matrix: np.ndarray
    tol: InitVar[float] = TOL

    def __post_init__(self, tol):
        m = _require_square(self.matrix, "unitary")
        if not is_unitary(m, tol):
            raise ValidationError("operator is not unitary within tolerance")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _operator_matrix(op) -> np.ndarray:
    """Accept either a wrapped operator or a bare matrix."""
    return op.matrix if hasattr(op, "matrix") else as_complex_matrix(op)


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Complete set of orthonormal projectors with distinct outcome labels.

    ``projectors`` is stored as a (k, d, d) stack; ``labels[i]`` names the
    outcome of ``projectors[i]``. Labels may be any hashable values (plays of
    a game are tuples of strategy indices).
    """

    projectors: np.ndarray
    labels: tuple
    tol: InitVar[float] = TOL

    def __post_init__(self, tol):
        stack = np.asarray(
            [_require_square(p, "projector") for p in self.projectors], dtype=complex
        )
        labels = tuple(self.labels)
        if len(labels) != stack.shape[0]:
            raise ShapeError(
                f"{stack.shape[0]} projectors but {len(labels)} labels"
            )
        if len(set(labels)) != len(labels):
            raise ValidationError("outcome labels must be distinct")
        d = stack.shape[1]
        # Hermitian + mutually orthogonal idempotents: Πi Πj = δij Πi
        products = np.einsum("aij,bjk->abik", stack, stack)
        expected = np.zeros_like(products)
        idx = np.arange(stack.shape[0])
        expected[idx, idx] = stack
        if float(np.abs(products - expected).max()) > tol:
            raise ValidationError("projectors are not orthonormal idempotents")
        for p in stack:
            if not is_hermitian(p, tol):
                raise ValidationError("projectors must be Hermitian")
        if float(np.abs(stack.sum(axis=0) - np.eye(d)).max()) > tol:
            raise ValidationError("projectors do not sum to the identity")
        stack.setflags(write=False)
        object.__setattr__(self, "projectors", stack)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def size(self) -> int:
        return self.projectors.shape[0]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving evolution ``ρ → Σᵢ Eᵢ ρ Eᵢ†``."""

    operators: np.ndarray
    tol: InitVar[float] = TOL

    def __post_init__(self, tol):
        stack = np.asarray(
            [_require_square(e, "Kraus operator") for e in self.operators],
            dtype=complex,
        )
        if stack.shape[0] == 0:
            raise ShapeError("channel needs at least one Kraus operator")
        d = stack.shape[1]
        total = np.einsum("kji,kjl->il", stack.conj(), stack)
        if float(np.abs(total - np.eye(d)).max()) > tol:
            raise ChannelError("Kraus operators do not preserve trace (Σ E†E ≠ I)")
        stack.setflags(write=False)
        object.__setattr__(self, "operators", stack)

    @property
    def dim(self) -> int:
        return self.operators.shape[1]


class MeasurementOutcome(NamedTuple):
    label: Hashable
    probability: float
    post_state: "DensityMatrix | None"


# ---------------------------------------------------------------------------
# evolution and measurement
# ---------------------------------------------------------------------------

def _check_dims(rho: DensityMatrix, other_dim: int, what: str) -> None:
    if rho.dim != other_dim:
        raise ShapeError(f"{what} dimension {other_dim} does not match state dimension {rho.dim}")


def evolve_density(rho: DensityMatrix, u: UnitaryOperator, tol: float = TOL) -> DensityMatrix:
    """Unitary evolution ``ρ → u ρ u†``; preserves trace and spectrum."""
    _check_dims(rho, u.dim, "unitary")
    m = u.matrix @ rho.matrix @ dagger(u.matrix)
    return DensityMatrix(m, tol)


def apply_channel(rho: DensityMatrix, ch: KrausChannel, tol: float = TOL) -> DensityMatrix:
    """Generalized evolution ``ρ → Σᵢ Eᵢ ρ Eᵢ†``."""
    _check_dims(rho, ch.dim, "channel")
    m = np.einsum("kij,jl,kml->im", ch.operators, rho.matrix, ch.operators.conj())
    return DensityMatrix(m, tol)


def outcome_probabilities(rho: DensityMatrix, basis: MeasurementBasis) -> np.ndarray:
    """Probabilities ``p(o) = Tr[Π_o ρ]`` for each outcome, in label order."""
    _check_dims(rho, basis.dim, "basis")
    return np.einsum("kij,ji->k", basis.projectors, rho.matrix).real


def measure(
    rho: DensityMatrix, basis: MeasurementBasis, tol: float = TOL
) -> list[MeasurementOutcome]:
    """Projective measurement of ``rho``.

    Returns one entry per outcome with its probability and the collapsed
    post-measurement state ``Π ρ Π / p``. Outcomes with probability at or
    below ``tol`` carry no post-state (the collapse is undefined at p = 0).
    """
    probs = outcome_probabilities(rho, basis)
    results = []
    for label, proj, p in zip(basis.labels, basis.projectors, probs):
        post = None
        if p > tol:
            m = proj @ rho.matrix @ proj / p
            # dividing by a small p amplifies float noise in the eigenvalues;
            # widen the check accordingly so valid collapses always construct
            post_tol = max(tol, 64 * np.finfo(float).eps / p)
            post = DensityMatrix(m, post_tol)
        results.append(MeasurementOutcome(label, float(p), post))
    return results


def sample_outcome(
    rho: DensityMatrix,
    basis: MeasurementBasis,
    rng: "np.random.Generator | int",
) -> tuple[Hashable, np.random.Generator]:
    """Draw one outcome label with the probabilities of :func:`measure`.

    ``rng`` is a numpy generator (or a seed); the advanced generator is
    returned alongside the label so callers can keep threading it.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    probs = np.clip(outcome_probabilities(rho, basis), 0.0, None)
    cum = np.cumsum(probs)
    total = cum[-1]
    if total <= 0:
        raise ValidationError("outcome probabilities sum to zero")
    idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
    idx = min(idx, len(basis.labels) - 1)
    return basis.labels[idx], rng
