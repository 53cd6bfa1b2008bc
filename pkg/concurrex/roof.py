"""
Convex-Roof Estimation
Upper-bound estimates of the convex roof

  E(rho) = inf_{p_i, psi_i} sum_i p_i F(psi_i)

for F in {concurrence, tangle, PHC}, by multi-restart descent over
fixed-cardinality ensembles. Ensembles of cardinality m are parameterized
by m x r isometries V acting on the scaled eigenvectors of rho:

  phi_i = sum_j V_ij sqrt(mu_j) e_j,   p_i = <phi_i|phi_i>.

Also the trace-class extension C(A) = Tr|A| C(|A| / Tr|A|).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

import numpy as np

from concurrex.config import FUNCTIONALS, RANK_CUTOFF
from concurrex.errors import (
    ConfigError,
    DimensionMismatch,
    InvalidIsometry,
    InvariantBreach,
    RankDeficient,
    ValidationError,
    ZeroOperator,
)
from concurrex.pure_measures import concurrence_purity, pair_sum, purity_noise_floor, root_noise, tangle_pure
from concurrex.states import DensityMatrix, Ensemble, PureState, partial_trace_b
from concurrex.utils import SEED_MODULUS, complex_gaussian, make_rng

logger = logging.getLogger(__name__)

MEMBER_DROP = 1e-14
ISOMETRY_TOL = 1e-8
RECOMPUTE_TOL = 1e-10
CHAIN_TOL = 1e-9
ARMIJO = 1e-4
MAX_BACKTRACKS = 40
STALL_PATIENCE = 5
VALUE_FLOOR = 1e-15
MIN_STEP, MAX_STEP = 1e-10, 1e4


@dataclass(frozen=True)
class RoofConfig:
    """Optimizer settings; ``ensemble_size`` None means min(r^2, r + 4)."""

    ensemble_size: Optional[int] = None
    restarts: int = 32
    max_iters: int = 500
    step_tol: float = 1e-8
    value_tol: float = 1e-7
    rng_seed: int = 0
    functional: str = "concurrence"
    workers: int = 1
    fd_step: float = 1e-6
    rank_cutoff: float = RANK_CUTOFF
    warm_start: bool = True

    def __post_init__(self):
        if self.functional not in FUNCTIONALS:
            raise ConfigError(f"unknown functional '{self.functional}', expected one of {FUNCTIONALS}")
        if self.restarts < 1 or self.max_iters < 1 or self.workers < 1:
            raise ConfigError("restarts, max_iters and workers must be positive")
        if self.fd_step <= 0:
            raise ConfigError("fd_step must be positive")


@dataclass(frozen=True, eq=False)
class RoofEstimate:
    """
    ``value`` is the best ensemble average found: an upper bound on the
    roof, never the exact infimum.
    """

    value: float
    best_ensemble: Ensemble
    per_restart_values: Tuple[float, ...]
    converged: bool
    functional: str = "concurrence"
    best_restart: int = 0
    restarts_converged: int = 0
    chain_checks: int = 0
    chain_violations: int = 0


@dataclass(frozen=True, eq=False)
class DescentTrace:
    isometry: np.ndarray
    value: float
    values: Tuple[float, ...]
    converged: bool
    iterations: int


@dataclass(frozen=True)
class BoundReport:
    """Ensemble-level (e_C^2, e_tau, 2(1 - Tr rho_A^2))."""

    c_sq: float
    tangle: float
    purity_bound: float


@dataclass
class _RestartOutcome:
    index: int
    trace: DescentTrace
    chain_checks: int = 0
    chain_violations: int = 0


def default_ensemble_size(rank: int) -> int:
    return min(rank * rank, rank + 4)


class EnsembleObjective:
    """
    Ensemble average of a pure-state functional as a function of the
    isometry, evaluated in batches.
    """

    def __init__(self, rho: DensityMatrix, functional: str, rank_cutoff: float = RANK_CUTOFF):
        if functional not in FUNCTIONALS:
            raise ConfigError(f"unknown functional '{functional}'")
        self.rho = rho
        self.dims = rho.require_dims()
        self.functional = functional
        eigvals, eigvecs = rho.eigh()
        keep = eigvals > rank_cutoff
        if not np.any(keep):
            raise RankDeficient("density matrix has numerical rank 0")
        order = np.argsort(eigvals[keep])[::-1]
        self.eigvals = eigvals[keep][order]
        self.eigvecs = eigvecs[:, keep][:, order]
        # columns sqrt(mu_j) e_j
        self.scaled = self.eigvecs * np.sqrt(self.eigvals)
        self.rank = int(self.eigvals.size)
        self.noise_floor = purity_noise_floor(self.dims[0])

    def unnormalized_members(self, isometries: np.ndarray) -> np.ndarray:
        """(..., m, r) isometries -> (..., m, d_A, d_B) vectors phi_i."""
        phi = isometries @ self.scaled.T
        return phi.reshape(*phi.shape[:-1], *self.dims)

    def member_terms(self, isometries: np.ndarray, functional: Optional[str] = None):
        """Weights p_i and functional values F(psi_i), batched."""
        functional = functional or self.functional
        phi = self.unnormalized_members(isometries)
        weights = np.sum(np.abs(phi) ** 2, axis=(-2, -1))
        safe = np.where(weights > MEMBER_DROP, weights, 1.0)
        if functional == "phc":
            singular = np.linalg.svd(phi, compute_uv=False)
            radicand = 4.0 * pair_sum(singular ** 2 / safe[..., None])
        else:
            reduced = phi @ np.swapaxes(phi.conj(), -1, -2)
            purity = np.sum(np.abs(reduced) ** 2, axis=(-2, -1)) / safe ** 2
            radicand = 2.0 * (1.0 - purity)
            radicand = np.where(radicand < self.noise_floor, 0.0, radicand)
        tangles = np.clip(radicand, 0.0, 2.0)
        values = tangles if functional == "tangle" else np.sqrt(tangles)
        values = np.where(weights > MEMBER_DROP, values, 0.0)
        return weights, values

    def values(self, isometries: np.ndarray, functional: Optional[str] = None) -> np.ndarray:
        weights, values = self.member_terms(isometries, functional)
        kept = np.where(weights > MEMBER_DROP, weights, 0.0)
        return np.sum(kept * values, axis=-1) / np.sum(kept, axis=-1)

    def value(self, isometry: np.ndarray, functional: Optional[str] = None) -> float:
        return float(self.values(isometry[None], functional)[0])

    def gradient(self, isometry: np.ndarray, step: float,
                 functional: Optional[str] = None) -> np.ndarray:
        """Central-difference Euclidean gradient dF/dRe V + i dF/dIm V."""
        m, r = isometry.shape
        params = np.concatenate([isometry.real.ravel(), isometry.imag.ravel()])
        n = params.size
        shifts = step * np.eye(n)
        batch = np.concatenate([params + shifts, params - shifts])
        candidates = (batch[:, :m * r] + 1j * batch[:, m * r:]).reshape(2 * n, m, r)
        values = self.values(candidates, functional)
        grad = (values[:n] - values[n:]) / (2.0 * step)
        return (grad[:m * r] + 1j * grad[m * r:]).reshape(m, r)

    def ensemble(self, isometry: np.ndarray) -> Ensemble:
        return _ensemble_from_members(self.unnormalized_members(isometry))

    def certificate_isometry(self) -> Optional[np.ndarray]:
        """
        V_ij = sqrt(p_i) <e_j|psi_i> / sqrt(mu_j) for the product ensemble
        recorded on rho, or None if rho carries none.
        """
        certificate = self.rho.separable_certificate
        if certificate is None or certificate.dims != self.dims:
            return None
        vectors = np.stack([member.vector for member in certificate.members])
        overlaps = vectors @ self.eigvecs.conj()
        isometry = np.sqrt(certificate.weights)[:, None] * overlaps / np.sqrt(self.eigvals)
        error = _isometry_error(isometry)
        if error > ISOMETRY_TOL:
            logger.debug("Separability certificate gives no isometry (error %.3g)", error)
            return None
        return isometry


def _ensemble_from_members(phi: np.ndarray) -> Ensemble:
    weights = np.sum(np.abs(phi) ** 2, axis=(-2, -1))
    keep = weights > MEMBER_DROP
    kept = weights[keep]
    members = [PureState(phi[i] / np.sqrt(weights[i]), renormalized=True, raw_norm=float(np.sqrt(weights[i])))
               for i in np.flatnonzero(keep)]
    return Ensemble(weights=kept / kept.sum(), members=members)


def _isometry_error(isometry: np.ndarray) -> float:
    r = isometry.shape[1]
    return float(np.max(np.abs(isometry.conj().T @ isometry - np.eye(r))))


def ensemble_from_isometry(rho: DensityMatrix, isometry: np.ndarray,
                           rank_cutoff: float = RANK_CUTOFF) -> Ensemble:
    """
    Ensemble {p_i, psi_i} of rho generated by an m x r isometry.

    Members with p_i < 1e-14 are dropped and the weights renormalized.
    """
    isometry = np.asarray(isometry, dtype=np.complex128)
    objective = EnsembleObjective(rho, "tangle", rank_cutoff)
    if isometry.ndim != 2 or isometry.shape[1] != objective.rank:
        raise InvalidIsometry(
            f"isometry must have {objective.rank} columns (rank of rho), got shape {isometry.shape}"
        )
    error = _isometry_error(isometry)
    if error > ISOMETRY_TOL:
        raise InvalidIsometry(f"V^dagger V deviates from identity by {error:.3g}",
                              invariant="isometry.orthonormal")
    return objective.ensemble(isometry)


def retract(matrix: np.ndarray) -> np.ndarray:
    """QR retraction onto the isometry manifold, R with positive diagonal."""
    q, r = np.linalg.qr(matrix)
    diag = np.diag(r)
    phases = np.where(np.abs(diag) > 0, diag / np.where(np.abs(diag) > 0, np.abs(diag), 1.0), 1.0)
    return q * phases


def random_isometry(m: int, r: int, rng: np.random.Generator) -> np.ndarray:
    return retract(complex_gaussian((m, r), rng))


def _tangent_projection(isometry: np.ndarray, grad: np.ndarray) -> np.ndarray:
    inner = isometry.conj().T @ grad
    return grad - isometry @ (0.5 * (inner + inner.conj().T))


def descend(objective: EnsembleObjective, start: np.ndarray, cfg: RoofConfig,
            functional: Optional[str] = None,
            on_accept: Optional[Callable[[np.ndarray], None]] = None) -> DescentTrace:
    """
    Projected descent on the isometry manifold.

    Barzilai-Borwein trial steps with Armijo backtracking; only steps that
    lower the value are accepted, so ``values`` is nonincreasing.
    """
    isometry = start
    value = objective.value(isometry, functional)
    values = [value]
    prev_iso = prev_dir = None
    step_size = 1.0
    stalled = 0
    converged = False
    iterations = 0

    for iterations in range(1, cfg.max_iters + 1):
        grad = objective.gradient(isometry, cfg.fd_step, functional)
        direction = _tangent_projection(isometry, grad)
        dir_norm2 = float(np.vdot(direction, direction).real)
        if np.sqrt(dir_norm2) < cfg.step_tol:
            converged = True
            break

        if prev_iso is not None:
            s = isometry - prev_iso
            y = direction - prev_dir
            sy = float(np.vdot(s, y).real)
            if sy > 0:
                step_size = float(np.vdot(s, s).real) / sy
            else:
                step_size *= 2.0
        step_size = float(np.clip(step_size, MIN_STEP, MAX_STEP))

        accepted = False
        trial = step_size
        for _ in range(MAX_BACKTRACKS):
            candidate = retract(isometry - trial * direction)
            candidate_value = objective.value(candidate, functional)
            if candidate_value <= value - ARMIJO * trial * dir_norm2:
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            # no descent at finite-difference resolution
            converged = True
            break

        moved = float(np.linalg.norm(candidate - isometry))
        decrease = value - candidate_value
        prev_iso, prev_dir = isometry, direction
        isometry, previous, value = candidate, value, candidate_value
        step_size = trial
        values.append(value)
        if on_accept is not None:
            on_accept(isometry)

        if moved < cfg.step_tol or value <= VALUE_FLOOR:
            converged = True
            break
        stalled = stalled + 1 if decrease <= cfg.value_tol * abs(previous) else 0
        if stalled >= STALL_PATIENCE:
            converged = True
            break

    return DescentTrace(isometry=isometry, value=value, values=tuple(values),
                        converged=converged, iterations=iterations)


def _resolve_size(cfg: RoofConfig, rank: int) -> int:
    m = default_ensemble_size(rank) if cfg.ensemble_size is None else cfg.ensemble_size
    if m < rank:
        raise ConfigError(f"ensemble_size {m} is below rank(rho) = {rank}")
    if m > rank * rank:
        raise ConfigError(f"ensemble_size {m} exceeds rank(rho)^2 = {rank * rank}")
    return m


def _ensemble_chain(objective: EnsembleObjective, isometry: np.ndarray,
                    purity_bound: float) -> bool:
    """(sum p C)^2 <= sum p C^2 <= 2(1 - Tr rho_A^2) for one ensemble."""
    weights, tangles = objective.member_terms(isometry[None], "tangle")
    weights = np.where(weights[0] > MEMBER_DROP, weights[0], 0.0)
    weights = weights / weights.sum()
    tangles = tangles[0]
    e_c = float(np.sum(weights * np.sqrt(tangles)))
    e_tau = float(np.sum(weights * tangles))
    return e_c ** 2 <= e_tau + CHAIN_TOL and e_tau <= purity_bound + CHAIN_TOL


def _run_restart(objective: EnsembleObjective, cfg: RoofConfig, m: int, index: int,
                 purity_bound: float) -> _RestartOutcome:
    if index == 0:
        start = objective.certificate_isometry()
        if start is None:
            # spectral ensemble
            start = np.zeros((m, objective.rank), dtype=np.complex128)
            start[:objective.rank] = np.eye(objective.rank)
    else:
        rng = make_rng((cfg.rng_seed + index) % SEED_MODULUS)
        start = random_isometry(m, objective.rank, rng)

    outcome = _RestartOutcome(index=index, trace=None)

    def check_chain(isometry: np.ndarray):
        outcome.chain_checks += 1
        if not _ensemble_chain(objective, isometry, purity_bound):
            outcome.chain_violations += 1

    check_chain(start)
    if cfg.warm_start and objective.functional != "tangle":
        start = descend(objective, start, cfg, functional="tangle", on_accept=check_chain).isometry
    outcome.trace = descend(objective, start, cfg, on_accept=check_chain)
    logger.debug("restart %d: value=%.12g iterations=%d converged=%s",
                 index, outcome.trace.value, outcome.trace.iterations, outcome.trace.converged)
    return outcome


def _pure_functional(functional: str) -> Callable[[PureState], float]:
    if functional == "tangle":
        return tangle_pure
    if functional == "phc":
        from concurrex.phc import phc_measure
        return phc_measure
    return concurrence_purity


def ensemble_average(ensemble: Ensemble, functional: str = "concurrence") -> float:
    """sum_i p_i F(psi_i), evaluated member by member."""
    evaluate = _pure_functional(functional)
    return float(sum(p * evaluate(member) for p, member in zip(ensemble.weights, ensemble.members)))


def roof_minimize(rho: DensityMatrix, cfg: RoofConfig = RoofConfig()) -> RoofEstimate:
    """
    Best ensemble average over ``cfg.restarts`` descents.

    Restart 0 starts from the product ensemble recorded on rho when there
    is one and from the spectral ensemble otherwise; restart k >= 1 from a
    Gaussian isometry seeded with rng_seed + k. Restarts run on
    ``cfg.workers`` threads; the argmin (lowest index on ties) does not
    depend on completion order.
    """
    if rho.dims is None:
        raise DimensionMismatch("roof estimation needs a joint state with (dim_a, dim_b)")
    objective = EnsembleObjective(rho, cfg.functional, cfg.rank_cutoff)
    m = _resolve_size(cfg, objective.rank)
    purity_bound = 2.0 * (1.0 - partial_trace_b(rho).purity())

    indices = range(cfg.restarts)
    if cfg.workers > 1 and cfg.restarts > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            outcomes = list(executor.map(
                lambda index: _run_restart(objective, cfg, m, index, purity_bound), indices))
    else:
        outcomes = [_run_restart(objective, cfg, m, index, purity_bound) for index in indices]

    per_restart = tuple(outcome.trace.value for outcome in outcomes)
    best = int(np.argmin(per_restart))
    best_trace = outcomes[best].trace
    ensemble = objective.ensemble(best_trace.isometry)

    recomputed = ensemble_average(ensemble, cfg.functional)
    tolerance = RECOMPUTE_TOL
    if cfg.functional != "tangle":
        # square roots amplify rounding of near-product members
        tolerance += root_noise(objective.dims[0])
    if abs(recomputed - best_trace.value) > tolerance:
        raise InvariantBreach("RoofEstimate.value",
                              f"batched value {best_trace.value:.17g} vs member-wise {recomputed:.17g}")
    mixture_error = ensemble.mixture_error(rho)
    if mixture_error > 1e-8:
        raise InvariantBreach("Ensemble.mixture_consistency",
                              f"best ensemble deviates from rho by {mixture_error:.3g}")

    chain_checks = sum(outcome.chain_checks for outcome in outcomes)
    chain_violations = sum(outcome.chain_violations for outcome in outcomes)
    if chain_violations:
        logger.warning("%d of %d sampled ensembles violated the bound chain",
                       chain_violations, chain_checks)

    return RoofEstimate(
        value=max(best_trace.value, 0.0),
        best_ensemble=ensemble,
        per_restart_values=per_restart,
        converged=best_trace.converged,
        functional=cfg.functional,
        best_restart=best,
        restarts_converged=sum(1 for outcome in outcomes if outcome.trace.converged),
        chain_checks=chain_checks,
        chain_violations=chain_violations,
    )


def tangle_roof(rho: DensityMatrix, cfg: RoofConfig = RoofConfig()) -> RoofEstimate:
    return roof_minimize(rho, replace(cfg, functional="tangle"))


def _absolute_value(operator: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(operator)
    return (eigvecs * np.abs(eigvals)) @ eigvecs.conj().T


def _check_hermitian(operator: np.ndarray) -> np.ndarray:
    operator = np.asarray(operator, dtype=np.complex128)
    if operator.ndim != 2 or operator.shape[0] != operator.shape[1]:
        raise DimensionMismatch(f"operator must be square, got shape {operator.shape}")
    if np.max(np.abs(operator - operator.conj().T)) > 1e-10:
        raise ValidationError("operator is not Hermitian", invariant="trace_class.hermitian")
    if np.linalg.norm(operator) < 1e-14:
        raise ZeroOperator("operator has zero Hilbert-Schmidt norm")
    return 0.5 * (operator + operator.conj().T)


def trace_class_bound(operator: np.ndarray) -> float:
    """sqrt(2) Tr|A|, an upper bound on C(A)."""
    operator = _check_hermitian(operator)
    return float(np.sqrt(2.0) * np.sum(np.abs(np.linalg.eigvalsh(operator))))


def trace_class_concurrence(operator: np.ndarray, dims: Tuple[int, int],
                            cfg: RoofConfig = RoofConfig()) -> float:
    """C(A) = Tr|A| C(|A| / Tr|A|) for a Hermitian operator A."""
    operator = _check_hermitian(operator)
    absolute = _absolute_value(operator)
    trace = float(np.trace(absolute).real)
    state = DensityMatrix(absolute / trace, dims=dims)
    estimate = roof_minimize(state, replace(cfg, functional="concurrence"))
    return trace * estimate.value


def bound_report(rho: DensityMatrix, cfg: RoofConfig = RoofConfig()) -> BoundReport:
    """
    (e_C^2, e_tau, 2(1 - Tr rho_A^2)) on the best tangle ensemble; the
    chain e_C^2 <= e_tau <= 2(1 - Tr rho_A^2) must hold.
    """
    estimate = tangle_roof(rho, cfg)
    ensemble = estimate.best_ensemble
    e_c = ensemble_average(ensemble, "concurrence")
    e_tau = ensemble_average(ensemble, "tangle")
    purity_bound = 2.0 * (1.0 - partial_trace_b(rho).purity())

    if e_c ** 2 > e_tau + CHAIN_TOL:
        raise InvariantBreach("bound_report.cauchy_schwarz",
                              f"(sum p C)^2 = {e_c ** 2:.17g} exceeds sum p C^2 = {e_tau:.17g}")
    if e_tau > purity_bound + CHAIN_TOL:
        raise InvariantBreach("bound_report.purity_bound",
                              f"sum p C^2 = {e_tau:.17g} exceeds 2(1 - Tr rho_A^2) = {purity_bound:.17g}")
    return BoundReport(c_sq=e_c ** 2, tangle=e_tau, purity_bound=purity_bound)


def estimate_summary(estimate: RoofEstimate) -> dict:
    """Flat view of an estimate for reports."""
    return {
        "value_upper_bound": estimate.value,
        "functional": estimate.functional,
        "ensemble_members": len(estimate.best_ensemble),
        "best_restart": estimate.best_restart,
        "restarts": len(estimate.per_restart_values),
        "restarts_converged": estimate.restarts_converged,
        "converged": estimate.converged,
        "chain_checks": estimate.chain_checks,
        "chain_violations": estimate.chain_violations,
    }
