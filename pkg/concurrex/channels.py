"""
Local Channels and Audits
Finite local Kraus channels and one-sided instruments, monotonicity
audits of the concurrence under them, and truncation-convergence scans.

A channel acts as  Lambda(rho) = sum_i (A_i x B_i) rho (A_i x B_i)^dagger.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from concurrex.errors import (
    DimensionMismatch,
    IncompleteInstrument,
    ModeUnsupported,
    NullOutcome,
    ParamError,
    ValidationError,
)
from concurrex.oracles import (
    StateFamily,
    make_family,
    truncation_deficit,
    two_mode_squeezed_limit,
    two_mode_squeezed_state,
    wootters_concurrence,
)
from concurrex.pure_measures import concurrence_purity, concurrence_schmidt
from concurrex.roof import RoofConfig, roof_minimize
from concurrex.states import (
    DensityMatrix,
    PureState,
    random_density_matrix,
    schmidt,
    validate_pure,
)
from concurrex.utils import make_rng, random_unitary

logger = logging.getLogger(__name__)

SIDES = ("A", "B", "both")
AUDIT_MODES = ("pure_exact", "wootters", "roof")
CHANNEL_KINDS = ("instrument", "unitary")
TRACE_NONINCREASE_TOL = 1e-9
COMPLETENESS_TOL = 1e-9
PROBABILITY_SUM_TOL = 1e-6
NULL_TRACE = 1e-14
BRANCH_DROP = 1e-12
MARGIN_TOL = 1e-9
SCAN_TOL = 1e-8
UNITARY_TOL = 1e-9

KrausPair = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """
    Operator pairs (A_i, B_i) with A_i: d_A -> d_A', B_i: d_B -> d_B'.
    One-sided channels carry identities on the untouched side.
    """

    side: str
    kraus_pairs: Tuple[KrausPair, ...]
    input_dims: Tuple[int, int]

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValidationError(f"unknown side '{self.side}', expected one of {SIDES}")
        pairs = tuple((np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))
                      for a, b in self.kraus_pairs)
        if not pairs:
            raise ValidationError("channel needs at least one Kraus pair")
        dim_a, dim_b = (int(d) for d in self.input_dims)
        out_a, out_b = pairs[0][0].shape[0], pairs[0][1].shape[0]
        for index, (a, b) in enumerate(pairs):
            if a.ndim != 2 or b.ndim != 2 or a.shape != (out_a, dim_a) or b.shape != (out_b, dim_b):
                raise DimensionMismatch(
                    f"Kraus pair {index} has shapes {a.shape}, {b.shape}; "
                    f"expected ({out_a}, {dim_a}), ({out_b}, {dim_b})"
                )
        object.__setattr__(self, "kraus_pairs", pairs)
        object.__setattr__(self, "input_dims", (dim_a, dim_b))

        excess = float(np.linalg.eigvalsh(self.effect())[-1]) - 1.0
        if excess > TRACE_NONINCREASE_TOL:
            raise ValidationError(f"channel increases trace: largest effect eigenvalue exceeds 1 by {excess:.3g}",
                                  invariant="KrausChannel.trace_nonincrease")

    @property
    def output_dims(self) -> Tuple[int, int]:
        a, b = self.kraus_pairs[0]
        return a.shape[0], b.shape[0]

    def operators(self) -> List[np.ndarray]:
        """Joint Kraus operators A_i x B_i."""
        return [np.kron(a, b) for a, b in self.kraus_pairs]

    def effect(self) -> np.ndarray:
        """sum_i (A_i x B_i)^dagger (A_i x B_i)."""
        return sum(k.conj().T @ k for k in self.operators())

    @classmethod
    def one_sided(cls, side: str, operators: Sequence[np.ndarray],
                  dims: Tuple[int, int]) -> "KrausChannel":
        """Channel acting with ``operators`` on one side and the identity on the other."""
        if side not in ("A", "B"):
            raise ValidationError(f"one-sided channel needs side A or B, got '{side}'")
        dim_a, dim_b = dims
        if side == "A":
            pairs = tuple((op, np.eye(dim_b)) for op in operators)
        else:
            pairs = tuple((np.eye(dim_a), op) for op in operators)
        return cls(side=side, kraus_pairs=pairs, input_dims=dims)


@dataclass(frozen=True, eq=False)
class ChannelOutput:
    state: DensityMatrix
    trace: float


@dataclass(frozen=True, eq=False)
class BranchOutcome:
    probability: float
    post_state: Optional[DensityMatrix]
    excluded: bool = False


@dataclass(frozen=True)
class AuditResult:
    before: float
    after_avg: float
    margin: float
    status: str
    advisory: bool = False
    excluded_branches: int = 0


@dataclass(frozen=True)
class AuditSummary:
    trials: int
    min_margin: float
    mean_margin: float
    violations: int
    inconclusive: int
    margins: Tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "min_margin": self.min_margin,
            "mean_margin": self.mean_margin,
            "violations": self.violations,
            "inconclusive": self.inconclusive,
        }


@dataclass(frozen=True)
class TruncationScan:
    dims: Tuple[int, ...]
    values: Tuple[float, ...]
    trace_gaps: Tuple[float, ...]
    certified_bounds: Tuple[float, ...]
    deficits: Tuple[float, ...]
    analytic_limit: Optional[float]
    certificate_ok: bool

    @property
    def limit_gap(self) -> Optional[float]:
        if self.analytic_limit is None:
            return None
        return abs(self.values[-1] - self.analytic_limit)


def identity_channel(dims: Tuple[int, int]) -> KrausChannel:
    return KrausChannel(side="both", kraus_pairs=((np.eye(dims[0]), np.eye(dims[1])),), input_dims=dims)


def _check_unitary(u: np.ndarray, label: str) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"{label} must be square, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > UNITARY_TOL:
        raise ValidationError(f"{label} is not unitary", invariant="local_unitary")
    return u


def local_unitary_channel(u: np.ndarray, v: np.ndarray) -> KrausChannel:
    """rho -> (U x V) rho (U x V)^dagger."""
    u, v = _check_unitary(u, "U"), _check_unitary(v, "V")
    return KrausChannel(side="both", kraus_pairs=((u, v),), input_dims=(u.shape[0], v.shape[0]))


def local_channel(side: str, operators: Sequence[np.ndarray], dims: Tuple[int, int]) -> KrausChannel:
    return KrausChannel.one_sided(side, operators, dims)


def _local_dim(side: str, dims: Tuple[int, int]) -> int:
    if side not in ("A", "B"):
        raise ValidationError(f"instrument needs side A or B, got '{side}'")
    return dims[0] if side == "A" else dims[1]


def projective_measurement(side: str, dims: Tuple[int, int]) -> List[KrausChannel]:
    """Computational-basis measurement on one side, one branch per outcome."""
    d = _local_dim(side, dims)
    branches = []
    for k in range(d):
        projector = np.zeros((d, d))
        projector[k, k] = 1.0
        branches.append(KrausChannel.one_sided(side, [projector], dims))
    return branches


def amplitude_damping_instrument(side: str, dims: Tuple[int, int], gamma: float) -> List[KrausChannel]:
    """
    Two branches: no-jump K0 = |0><0| + sqrt(1-g) sum_{k>0} |k><k|,
    jump K1 = sqrt(g) sum_{k>0} |k-1><k|.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ParamError(f"damping gamma must lie in [0, 1], got {gamma}")
    d = _local_dim(side, dims)
    no_jump = np.diag([1.0] + [np.sqrt(1 - gamma)] * (d - 1))
    jump = np.sqrt(gamma) * np.eye(d, k=1)
    return [KrausChannel.one_sided(side, [no_jump], dims),
            KrausChannel.one_sided(side, [jump], dims)]


def random_instrument(side: str, dims: Tuple[int, int], branches: int,
                      rng: np.random.Generator) -> List[KrausChannel]:
    """
    Random one-sided instrument: the first d columns of a Haar unitary on
    C^(branches*d) form a Stinespring isometry, cut into one Kraus block
    per branch.
    """
    if branches < 1:
        raise ParamError(f"instrument needs at least one branch, got {branches}")
    d = _local_dim(side, dims)
    isometry = random_unitary(branches * d, rng)[:, :d]
    return [KrausChannel.one_sided(side, [isometry[k * d:(k + 1) * d]], dims)
            for k in range(branches)]


def check_instrument(branches: Sequence[KrausChannel], tol: float = COMPLETENESS_TOL) -> float:
    """Deviation of sum_k sum_i K^dagger K from the identity; raises beyond tol."""
    if not branches:
        raise IncompleteInstrument("instrument has no branches")
    dims = {branch.input_dims for branch in branches}
    if len(dims) != 1:
        raise DimensionMismatch(f"instrument branches disagree on input dims: {sorted(dims)}")
    total = sum(branch.effect() for branch in branches)
    deviation = float(np.max(np.abs(np.linalg.eigvalsh(total) - 1.0)))
    if deviation > tol:
        raise IncompleteInstrument(f"instrument effects miss the identity by {deviation:.3g}",
                                   invariant="KrausChannel.completeness")
    return deviation


def _embed_density(entries: np.ndarray, dims: Tuple[int, int], target: Tuple[int, int]) -> np.ndarray:
    """Zero-pad a joint density matrix from dims into the larger target dims."""
    if dims == target:
        return entries
    da, db = dims
    ta, tb = target
    tensor = np.zeros((ta, tb, ta, tb), dtype=np.complex128)
    tensor[:da, :db, :da, :db] = entries.reshape(da, db, da, db)
    return tensor.reshape(ta * tb, ta * tb)


def _branch_map(rho: DensityMatrix, channel: KrausChannel) -> Tuple[np.ndarray, Tuple[int, int]]:
    dims = rho.require_dims()
    if dims != channel.input_dims:
        raise DimensionMismatch(f"channel expects dims {channel.input_dims}, state has {dims}")
    output = sum(k @ rho.entries @ k.conj().T for k in channel.operators())
    out_dims = channel.output_dims
    # keep branch outputs comparable with the input space
    target = (max(dims[0], out_dims[0]), max(dims[1], out_dims[1]))
    return _embed_density(output, out_dims, target), target


def apply_channel(rho: DensityMatrix, channel: KrausChannel) -> ChannelOutput:
    """Lambda(rho), renormalized; ``trace`` is Tr Lambda(rho) before renormalization."""
    output, target = _branch_map(rho, channel)
    trace = float(np.trace(output).real)
    if trace < NULL_TRACE:
        raise NullOutcome(f"channel output has trace {trace:.3g}")
    state = DensityMatrix(0.5 * (output + output.conj().T) / trace, dims=target)
    return ChannelOutput(state=state, trace=trace)


def apply_instrument(rho: DensityMatrix, branches: Sequence[KrausChannel]) -> List[BranchOutcome]:
    """One outcome per branch; branches with p_k <= 1e-12 are flagged as excluded."""
    outcomes = []
    for branch in branches:
        output, target = _branch_map(rho, branch)
        probability = max(float(np.trace(output).real), 0.0)
        if probability <= BRANCH_DROP:
            outcomes.append(BranchOutcome(probability=probability, post_state=None, excluded=True))
            continue
        state = DensityMatrix(0.5 * (output + output.conj().T) / probability, dims=target)
        outcomes.append(BranchOutcome(probability=probability, post_state=state))

    total = sum(outcome.probability for outcome in outcomes)
    if abs(total - 1.0) > PROBABILITY_SUM_TOL:
        raise IncompleteInstrument(f"branch probabilities sum to {total:.12g}",
                                   invariant="BranchOutcome.probability_sum")
    return outcomes


def _pure_vector(rho: DensityMatrix, cutoff: float) -> Optional[PureState]:
    eigvals, eigvecs = rho.eigh()
    if int(np.sum(eigvals > cutoff)) != 1:
        return None
    return validate_pure(eigvecs[:, -1].reshape(rho.require_dims()), tol=np.inf)


def _audit_measure(rho: DensityMatrix, mode: str, cfg: RoofConfig) -> Tuple[float, bool]:
    """(value, estimated) of the concurrence under an audit mode."""
    if mode == "wootters":
        if rho.dims != (2, 2):
            raise ModeUnsupported(f"wootters mode needs two-qubit states, got dims {rho.dims}")
        return wootters_concurrence(rho), False
    if mode == "pure_exact":
        psi = _pure_vector(rho, cfg.rank_cutoff)
        if psi is not None:
            return concurrence_purity(psi), False
    return roof_minimize(rho, replace(cfg, functional="concurrence")).value, True


def monotonicity_audit(rho: DensityMatrix, branches: Sequence[KrausChannel], mode: str,
                       cfg: Optional[RoofConfig] = None) -> AuditResult:
    """
    before = C(rho), after_avg = sum_k p_k C(rho_k'), margin = before - after_avg.

    Whenever a roof estimate enters either side the audit is advisory and a
    negative margin within 2 value_tol is reported as inconclusive.
    """
    if mode not in AUDIT_MODES:
        raise ModeUnsupported(f"unknown audit mode '{mode}', expected one of {AUDIT_MODES}")
    cfg = cfg or RoofConfig()
    if mode == "pure_exact" and _pure_vector(rho, cfg.rank_cutoff) is None:
        raise ModeUnsupported("pure_exact mode needs a rank-1 input state")
    if mode == "wootters":
        for branch in branches:
            if branch.output_dims != (2, 2) or rho.dims != (2, 2):
                raise ModeUnsupported("wootters mode needs two-qubit input and output dims")

    before, advisory = _audit_measure(rho, mode, cfg)
    outcomes = apply_instrument(rho, branches)
    after_avg = 0.0
    for outcome in outcomes:
        if outcome.excluded:
            continue
        value, estimated = _audit_measure(outcome.post_state, mode, cfg)
        advisory = advisory or estimated
        after_avg += outcome.probability * value
    margin = before - after_avg

    if margin >= -MARGIN_TOL:
        status = "ok"
    elif advisory and margin >= -2 * cfg.value_tol:
        status = "inconclusive"
    else:
        status = "violation"
        logger.warning("Monotonicity violated in %s mode: margin %.3g", mode, margin)
    return AuditResult(before=before, after_avg=after_avg, margin=margin, status=status,
                       advisory=advisory,
                       excluded_branches=sum(1 for outcome in outcomes if outcome.excluded))


def _trial(seed: int, index: int, mode: str, channel_kind: str, branches: int, side: str,
           rho: Optional[DensityMatrix], instrument: Optional[Sequence[KrausChannel]],
           cfg: RoofConfig) -> AuditResult:
    rng = make_rng(seed, index)
    if rho is None:
        rank = 1 if mode == "pure_exact" else int(rng.integers(1, 5))
        rho = random_density_matrix(4, rng, rank=rank, dims=(2, 2))
    if instrument is None:
        dims = rho.require_dims()
        if channel_kind == "unitary":
            instrument = [local_unitary_channel(random_unitary(dims[0], rng), random_unitary(dims[1], rng))]
        else:
            instrument = random_instrument(side, dims, branches, rng)
    return monotonicity_audit(rho, instrument, mode, replace(cfg, rng_seed=(seed + index) % 2 ** 64))


def run_audit_trials(trials: int, seed: int, mode: str = "wootters", workers: int = 1,
                     channel_kind: str = "instrument", branches: int = 2, side: str = "B",
                     rho: Optional[DensityMatrix] = None,
                     instrument: Optional[Sequence[KrausChannel]] = None,
                     cfg: Optional[RoofConfig] = None) -> AuditSummary:
    """
    Seeded audit batch. Trial i draws from the stream (seed, i); a missing
    state is a random two-qubit state and a missing instrument a random
    one-sided instrument (or local unitary). Results are aggregated in
    trial order.
    """
    if trials < 1:
        raise ParamError(f"trials must be positive, got {trials}")
    if channel_kind not in CHANNEL_KINDS:
        raise ParamError(f"unknown channel kind '{channel_kind}', expected one of {CHANNEL_KINDS}")
    cfg = cfg or RoofConfig(restarts=4, max_iters=200)

    def run(index: int) -> AuditResult:
        return _trial(seed, index, mode, channel_kind, branches, side, rho, instrument, cfg)

    if workers > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run, range(trials)))
    else:
        results = [run(index) for index in range(trials)]
    return summarize_audits(results)


def summarize_audits(results: Sequence[AuditResult]) -> AuditSummary:
    margins = tuple(result.margin for result in results)
    return AuditSummary(
        trials=len(results),
        min_margin=float(min(margins)),
        mean_margin=float(np.mean(margins)),
        violations=sum(1 for result in results if result.status == "violation"),
        inconclusive=sum(1 for result in results if result.status == "inconclusive"),
        margins=margins,
    )


def _scan_reference(family: StateFamily, dims: Sequence[int]) -> Tuple[PureState, Optional[float]]:
    params = family.resolved_params()
    if family.name == "two_mode_squeezed":
        r = float(params["r"])
        if not np.isfinite(r) or r < 0:
            raise ParamError(f"squeezing r must be finite and >= 0, got {r}")
        return two_mode_squeezed_state(r, max(dims)), two_mode_squeezed_limit(r)
    if family.name == "product":
        d = max(dims)
        state = make_family(replace(family, params={"da": d, "db": d}))
        return state, 0.0
    raise ParamError(f"truncation scans support two_mode_squeezed and product, not '{family.name}'")


def truncation_scan(family: StateFamily, dims: Sequence[int]) -> TruncationScan:
    """
    Concurrence of renormalized d x d truncations of one state.

    Consecutive truncations are nested, so the trace distance between them
    is 2 sqrt(w) with w the normalized mass the smaller one discards.
    """
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims) or any(b <= a for a, b in zip(dims, dims[1:])):
        raise ParamError(f"truncation dims must be strictly increasing integers >= 2, got {list(dims)}")
    reference, limit = _scan_reference(family, dims)
    squeezing = float(family.resolved_params()["r"]) if family.name == "two_mode_squeezed" else None

    states = [validate_pure(reference.amps[:d, :d], tol=np.inf) for d in dims]
    values = tuple(concurrence_schmidt(schmidt(psi)) for psi in states)

    gaps = []
    for smaller, larger in zip(states, states[1:]):
        d = smaller.dim_a
        mass = np.abs(larger.amps) ** 2
        discarded = float(np.sum(mass[d:, :])) + float(np.sum(mass[:d, d:]))
        gaps.append(2.0 * np.sqrt(max(discarded, 0.0)))
    bounds = tuple(np.sqrt(2.0) * gap for gap in gaps)

    if squeezing is not None:
        deficits = tuple(truncation_deficit(squeezing, d) for d in dims)
    else:
        total = float(np.sum(np.abs(reference.amps) ** 2))
        deficits = tuple(max(total - float(np.sum(np.abs(reference.amps[:d, :d]) ** 2)), 0.0) for d in dims)

    certificate_ok = all(abs(b - a) <= bound + SCAN_TOL
                         for a, b, bound in zip(values, values[1:], bounds))
    if not certificate_ok:
        logger.warning("Truncation certificate failed for %s", family.spec())
    return TruncationScan(dims=dims, values=values, trace_gaps=tuple(gaps), certified_bounds=bounds,
                          deficits=deficits, analytic_limit=limit, certificate_ok=certificate_ok)

