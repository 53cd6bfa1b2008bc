"""
Pure-State Measures
Concurrence, tangle and the subsystem-purity function f, with three
independent concurrence formulas that cross-check each other:

  purity   C = sqrt(2 (1 - Tr rho_A^2))
  minors   C = sqrt(sum_{ijkl} |a_ik a_jl - a_il a_jk|^2)
  Schmidt  C = sqrt(2 sum_{k != l} lambda_k^2 lambda_l^2)
"""

import logging
from dataclasses import dataclass

import numpy as np

from concurrex.errors import InvariantBreach, ProblemTooLarge
from concurrex.states import DensityMatrix, PureState, SchmidtForm, partial_trace_b, schmidt

logger = logging.getLogger(__name__)

MINORS_SIZE_LIMIT = 4096
FORMULA_AGREEMENT_TOL = 1e-9
# rounding floor of 1 - Tr(rho^2) per local dimension
PURITY_NOISE = 32 * np.finfo(float).eps


def purity_noise_floor(dim: int) -> float:
    """Radicands 2(1 - Tr rho^2) below this are indistinguishable from 0."""
    return PURITY_NOISE * max(int(dim), 1)


def root_noise(dim: int) -> float:
    """Largest concurrence the purity formula can report as noise."""
    return float(np.sqrt(2.0 * purity_noise_floor(dim)))


def purity_radicand(rho_a: DensityMatrix) -> float:
    """2 (1 - Tr rho^2), clamped to [0, 2] with the rounding floor zeroed."""
    radicand = 2.0 * (1.0 - rho_a.purity())
    if radicand < purity_noise_floor(rho_a.dim):
        return 0.0
    return float(min(radicand, 2.0))


def f_purity(rho_a: DensityMatrix) -> float:
    """f(rho) = sqrt(2 (1 - Tr rho^2))."""
    return float(np.sqrt(purity_radicand(rho_a)))


def concurrence_purity(psi: PureState) -> float:
    return f_purity(partial_trace_b(psi))


def tangle_pure(psi: PureState) -> float:
    """tau = C^2 = 2 (1 - Tr rho_A^2)."""
    return purity_radicand(partial_trace_b(psi))


def concurrence_minors(psi: PureState) -> float:
    """
    Concurrence from the 2x2 minors of the amplitude matrix.

    The four-index sum counts each unordered pair (i<j, k<l) four times;
    terms with i=j or k=l vanish.
    """
    amps = psi.amps
    if psi.dim_a * psi.dim_b > MINORS_SIZE_LIMIT:
        raise ProblemTooLarge(
            f"minors formula limited to dim_a*dim_b <= {MINORS_SIZE_LIMIT}, "
            f"got {psi.dim_a * psi.dim_b}"
        )
    if psi.dim_a < 2 or psi.dim_b < 2:
        return 0.0
    rows_i, rows_j = np.triu_indices(psi.dim_a, 1)
    cols_k, cols_l = np.triu_indices(psi.dim_b, 1)
    minors = (amps[rows_i][:, cols_k] * amps[rows_j][:, cols_l]
              - amps[rows_i][:, cols_l] * amps[rows_j][:, cols_k])
    total = 4.0 * float(np.sum(np.abs(minors) ** 2))
    return float(np.sqrt(min(total, 2.0)))


def _schmidt_weights(form: SchmidtForm) -> np.ndarray:
    weights = np.asarray(form.coeffs, dtype=float) ** 2
    return weights / weights.sum()


def pair_sum(weights: np.ndarray) -> np.ndarray:
    """
    sum_{k<l} w_k w_l over the last axis, from tail sums.

    Equals ((sum w)^2 - sum w^2) / 2 without the cancellation.
    """
    tails = np.cumsum(weights[..., ::-1], axis=-1)[..., ::-1]
    return np.sum(weights[..., :-1] * tails[..., 1:], axis=-1)


def concurrence_schmidt(form: SchmidtForm) -> float:
    """sqrt(2((sum l^2)^2 - sum l^4)) with sum l^2 = 1."""
    weights = _schmidt_weights(form)
    value = float(np.sqrt(np.clip(4.0 * pair_sum(weights), 0.0, 2.0)))
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("Schmidt concurrence stable=%.17g pairwise=%.17g",
                     value, concurrence_schmidt_pairwise(form))
    return value


def concurrence_schmidt_pairwise(form: SchmidtForm) -> float:
    """Literal double sum over k != l; oracle for the stable form."""
    weights = _schmidt_weights(form)
    outer = np.outer(weights, weights)
    return float(np.sqrt(np.clip(2.0 * float(outer.sum() - np.trace(outer)), 0.0, 2.0)))


def concurrence_upper_bound(dim_a: int, dim_b: int) -> float:
    """sqrt(2 (m-1)/m) for m = min(dim_a, dim_b)."""
    m = min(dim_a, dim_b)
    return float(np.sqrt(2.0 * (m - 1) / m))


@dataclass(frozen=True)
class PureMeasureReport:
    c_purity: float
    c_minors: float
    c_schmidt: float
    tangle: float
    max_pairwise_gap: float

    def as_dict(self) -> dict:
        return {
            "c_purity": self.c_purity,
            "c_minors": self.c_minors,
            "c_schmidt": self.c_schmidt,
            "tangle": self.tangle,
            "max_pairwise_gap": self.max_pairwise_gap,
        }


def pure_measure_report(psi: PureState, tol: float = FORMULA_AGREEMENT_TOL) -> PureMeasureReport:
    """
    All three concurrence formulas plus tangle; raises if they disagree.

    The breach threshold widens by the purity formula's noise floor, which
    dominates for states within ~1e-7 of a product state.
    """
    c_purity = concurrence_purity(psi)
    c_minors = concurrence_minors(psi)
    c_schmidt = concurrence_schmidt(schmidt(psi))
    tangle = tangle_pure(psi)
    values = (c_purity, c_minors, c_schmidt)
    gap = max(abs(x - y) for x in values for y in values)

    threshold = tol + root_noise(psi.dim_a)
    if gap > threshold:
        raise InvariantBreach("PureMeasureReport.max_pairwise_gap",
                              f"concurrence formulas disagree by {gap:.3g} (> {threshold:.3g})")
    if abs(tangle - c_purity ** 2) > 1e-12:
        raise InvariantBreach("PureMeasureReport.tangle",
                              f"tangle {tangle:.17g} differs from C^2 {c_purity ** 2:.17g}")
    bound = concurrence_upper_bound(psi.dim_a, psi.dim_b)
    if c_purity > bound + 1e-9:
        raise InvariantBreach("PureMeasureReport.c_purity_bound",
                              f"concurrence {c_purity:.17g} exceeds sqrt(2(m-1)/m) = {bound:.17g}")

    return PureMeasureReport(c_purity, c_minors, c_schmidt, tangle, gap)
