"""
State Representations
Pure states, density matrices, Schmidt forms and ensembles on a finite
d_A x d_B truncation, with validation, partial traces and the Schmidt
decomposition.

Joint index ordering throughout: (i, j) -> i * dim_b + j.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from concurrex.config import NORM_TOL, PSD_TOL, RANK_CUTOFF
from concurrex.errors import (
    DimensionMismatch,
    NormViolation,
    ValidationError,
    ZeroState,
)
from concurrex.utils import complex_gaussian

logger = logging.getLogger(__name__)

ZERO_NORM = 1e-14
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
ENSEMBLE_WEIGHT_TOL = 1e-10
MIXTURE_TOL = 1e-8


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude matrix a_ij, the coefficient of |i>|j'>."""

    amps: np.ndarray
    renormalized: bool = False
    raw_norm: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen(self.amps))
        if self.amps.ndim != 2 or min(self.amps.shape) < 1:
            raise DimensionMismatch(
                f"amplitudes must be a non-empty matrix, got shape {self.amps.shape}"
            )
        norm = float(np.linalg.norm(self.amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise NormViolation(
                f"amplitude norm {norm:.15g} is not 1; normalize with validate_pure",
                invariant="PureState.normalization",
            )

    @property
    def dim_a(self) -> int:
        return self.amps.shape[0]

    @property
    def dim_b(self) -> int:
        return self.amps.shape[1]

    @property
    def dims(self) -> Tuple[int, int]:
        return self.amps.shape

    @property
    def vector(self) -> np.ndarray:
        return self.amps.reshape(-1)

    def density(self) -> "DensityMatrix":
        """Joint projector |psi><psi| carrying the factorization."""
        vec = self.vector
        return DensityMatrix(np.outer(vec, vec.conj()), dims=self.dims)

    @classmethod
    def from_vector(cls, vector: np.ndarray, dim_a: int, dim_b: int) -> "PureState":
        vector = np.asarray(vector, dtype=np.complex128).reshape(-1)
        if vector.size != dim_a * dim_b:
            raise DimensionMismatch(
                f"vector of length {vector.size} does not factor as {dim_a} x {dim_b}"
            )
        return validate_pure(vector.reshape(dim_a, dim_b))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Hermitian, PSD, unit-trace matrix.

    Joint states carry their factorization in ``dims``; local states have
    ``dims=None``. ``separable_certificate`` holds the product ensemble a
    generator recorded at construction, if any.
    """

    entries: np.ndarray
    dims: Optional[Tuple[int, int]] = None
    separable_certificate: Optional["Ensemble"] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))
        shape = self.entries.shape
        if len(shape) != 2 or shape[0] != shape[1] or shape[0] < 1:
            raise DimensionMismatch(f"density matrix must be square, got shape {shape}")
        if self.dims is not None:
            dims = (int(self.dims[0]), int(self.dims[1]))
            if dims[0] < 1 or dims[1] < 1 or dims[0] * dims[1] != shape[0]:
                raise DimensionMismatch(
                    f"size {shape[0]} does not factor as {dims[0]} x {dims[1]}"
                )
            object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and eigenvectors of the Hermitian part."""
        return np.linalg.eigh(_hermitize(self.entries))

    def rank(self, cutoff: float = RANK_CUTOFF) -> int:
        return int(np.sum(np.linalg.eigvalsh(_hermitize(self.entries)) > cutoff))

    def purity(self) -> float:
        """Tr(rho^2)."""
        return float(np.vdot(self.entries, self.entries).real)

    def require_dims(self) -> Tuple[int, int]:
        if self.dims is None:
            raise DimensionMismatch("joint state carries no (dim_a, dim_b) factorization")
        return self.dims


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """psi = sum_k coeffs[k] left_vecs[:, k] (x) right_vecs[:, k]."""

    coeffs: np.ndarray
    left_vecs: np.ndarray
    right_vecs: np.ndarray
    rank: int

    def reconstruct(self) -> np.ndarray:
        return (self.left_vecs * self.coeffs) @ self.right_vecs.T


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weights p_i with pure members psi_i on a common (dim_a, dim_b)."""

    weights: np.ndarray
    members: Tuple[PureState, ...]

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "members", tuple(self.members))
        if len(self.members) != weights.size or weights.size == 0:
            raise ValidationError("ensemble needs one positive weight per member",
                                  invariant="Ensemble.weights")
        if np.any(weights <= 0):
            raise ValidationError("ensemble weights must be positive", invariant="Ensemble.weights")
        if abs(weights.sum() - 1.0) > ENSEMBLE_WEIGHT_TOL:
            raise ValidationError(f"ensemble weights sum to {weights.sum():.15g}, not 1",
                                  invariant="Ensemble.weights")
        dims = {member.dims for member in self.members}
        if len(dims) != 1:
            raise DimensionMismatch(f"ensemble members disagree on dimensions: {sorted(dims)}")

    @property
    def dims(self) -> Tuple[int, int]:
        return self.members[0].dims

    def __len__(self) -> int:
        return len(self.members)

    def density(self) -> np.ndarray:
        """sum_i p_i |psi_i><psi_i| as a raw matrix."""
        vectors = np.stack([member.vector for member in self.members])
        return np.einsum("i,ia,ib->ab", self.weights, vectors, vectors.conj())

    def mixture_error(self, rho: "DensityMatrix") -> float:
        """Max-entry deviation from the target density matrix."""
        return float(np.max(np.abs(self.density() - rho.entries)))

    def is_consistent_with(self, rho: "DensityMatrix", tol: float = MIXTURE_TOL) -> bool:
        return self.mixture_error(rho) <= tol


def _hermitize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def validate_pure(raw_amps, tol: float = NORM_TOL, strict: bool = False) -> PureState:
    """
    Normalize an amplitude matrix into a PureState.

    Raises ZeroState for a vanishing input. A norm off by more than ``tol``
    raises NormViolation in strict mode and is renormalized with a warning
    otherwise.
    """
    amps = np.asarray(raw_amps, dtype=np.complex128)
    if amps.ndim != 2:
        raise DimensionMismatch(f"amplitudes must be a dim_a x dim_b matrix, got {amps.ndim} axes")
    norm = float(np.linalg.norm(amps))
    if norm < ZERO_NORM:
        raise ZeroState("amplitude matrix has zero norm", invariant="PureState.normalization")
    if abs(norm - 1.0) > tol:
        if strict:
            raise NormViolation(f"amplitude norm {norm:.15g} deviates from 1 by more than {tol:g}",
                                invariant="PureState.normalization")
        logger.warning("Renormalizing pure state with norm %.15g", norm)
    if norm == 1.0:
        return PureState(amps, renormalized=False, raw_norm=norm)
    return PureState(amps / norm, renormalized=True, raw_norm=norm)


def validate_density(raw, dims: Optional[Tuple[int, int]] = None,
                     hermitian_tol: float = HERMITIAN_TOL,
                     trace_tol: float = TRACE_TOL,
                     psd_tol: float = PSD_TOL) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity, then wrap."""
    entries = np.asarray(raw, dtype=np.complex128)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got shape {entries.shape}")

    asym = float(np.max(np.abs(entries - entries.conj().T)))
    if asym > hermitian_tol:
        raise ValidationError(f"matrix is not Hermitian (max deviation {asym:.3g})",
                              invariant="DensityMatrix.hermitian")
    trace = complex(np.trace(entries))
    if abs(trace - 1.0) > trace_tol:
        raise ValidationError(f"trace is {trace.real:.15g}, not 1", invariant="DensityMatrix.unit_trace")
    smallest = float(np.linalg.eigvalsh(_hermitize(entries))[0])
    if smallest < -psd_tol:
        raise ValidationError(f"smallest eigenvalue {smallest:.3g} is negative",
                              invariant="DensityMatrix.psd")
    return DensityMatrix(_hermitize(entries), dims=dims)


def _joint_tensor(state: Union[PureState, DensityMatrix],
                  dims: Optional[Tuple[int, int]]) -> Tuple[np.ndarray, int, int]:
    if dims is None:
        dims = state.require_dims()
    dim_a, dim_b = dims
    if dim_a * dim_b != state.dim:
        raise DimensionMismatch(f"size {state.dim} does not factor as {dim_a} x {dim_b}")
    return state.entries.reshape(dim_a, dim_b, dim_a, dim_b), dim_a, dim_b


def partial_trace_b(state: Union[PureState, DensityMatrix],
                    dims: Optional[Tuple[int, int]] = None) -> DensityMatrix:
    """rho_A = Tr_B(rho); for pure states D D^dagger."""
    if isinstance(state, PureState):
        amps = state.amps
        return DensityMatrix(amps @ amps.conj().T)
    tensor, _, _ = _joint_tensor(state, dims)
    return DensityMatrix(np.trace(tensor, axis1=1, axis2=3))


def partial_trace_a(state: Union[PureState, DensityMatrix],
                    dims: Optional[Tuple[int, int]] = None) -> DensityMatrix:
    """rho_B = Tr_A(rho); for pure states D^T conj(D)."""
    if isinstance(state, PureState):
        amps = state.amps
        return DensityMatrix(amps.T @ amps.conj())
    tensor, _, _ = _joint_tensor(state, dims)
    return DensityMatrix(np.trace(tensor, axis1=0, axis2=2))


def _fix_phase_gauge(left: np.ndarray, right: np.ndarray, tol: float = 1e-12):
    # first entry of each left vector above tol made real positive
    left = left.copy()
    right = right.copy()
    for k in range(left.shape[1]):
        nonzero = np.flatnonzero(np.abs(left[:, k]) > tol)
        if nonzero.size == 0:
            continue
        entry = left[nonzero[0], k]
        phase = entry / abs(entry)
        left[:, k] *= phase.conjugate()
        right[:, k] *= phase
    return left, right


def schmidt(state: PureState, rank_cutoff: float = RANK_CUTOFF) -> SchmidtForm:
    """
    Schmidt decomposition via the SVD of the amplitude matrix.

    Coefficients below ``rank_cutoff`` stay in ``coeffs`` but do not count
    towards ``rank``.
    """
    if rank_cutoff < 0:
        raise ValidationError("rank_cutoff must be non-negative")
    left, coeffs, right_h = np.linalg.svd(state.amps, full_matrices=False)
    left, right = _fix_phase_gauge(left, right_h.T)
    rank = int(np.sum(coeffs > rank_cutoff))
    for array in (coeffs, left, right):
        array.setflags(write=False)
    return SchmidtForm(coeffs=coeffs, left_vecs=left, right_vecs=right, rank=rank)


def embed_amplitudes(state: PureState, dim_a: int, dim_b: int) -> np.ndarray:
    """Zero-pad an amplitude matrix into a larger truncation."""
    if dim_a < state.dim_a or dim_b < state.dim_b:
        raise DimensionMismatch(
            f"cannot embed {state.dim_a} x {state.dim_b} into {dim_a} x {dim_b}"
        )
    padded = np.zeros((dim_a, dim_b), dtype=np.complex128)
    padded[:state.dim_a, :state.dim_b] = state.amps
    return padded


def random_pure_state(dim_a: int, dim_b: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state."""
    return validate_pure(complex_gaussian((dim_a, dim_b), rng), tol=np.inf)


def random_product_state(dim_a: int, dim_b: int, rng: np.random.Generator) -> PureState:
    left = complex_gaussian(dim_a, rng)
    right = complex_gaussian(dim_b, rng)
    return validate_pure(np.outer(left, right), tol=np.inf)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: Optional[int] = None,
                          dims: Optional[Tuple[int, int]] = None) -> DensityMatrix:
    """Random density matrix G G^dagger / Tr from a Gaussian dim x rank matrix."""
    rank = dim if rank is None else rank
    gauss = complex_gaussian((dim, rank), rng)
    rho = gauss @ gauss.conj().T
    return DensityMatrix(_hermitize(rho / np.trace(rho).real), dims=dims)


def mix(rhos: Sequence[DensityMatrix], weights: Sequence[float]) -> DensityMatrix:
    """Convex combination of density matrices sharing their dims."""
    entries = sum(float(w) * rho.entries for w, rho in zip(weights, rhos))
    return DensityMatrix(_hermitize(entries), dims=rhos[0].dims)
