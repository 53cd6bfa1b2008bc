"""
Partial Hermitian Conjugate
The PHC transform of a pure state in its Schmidt basis,

  rho^PHC = sum_{k,l} lambda_k lambda_l |k>|l'><l|<k'|,

the PHC measure ||rho - rho^PHC||_2 and the PHC separability check.
On pure states the measure coincides with the concurrence.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from concurrex.config import PHC_TOL
from concurrex.errors import InvariantBreach, ValidationError
from concurrex.pure_measures import concurrence_schmidt, root_noise
from concurrex.states import DensityMatrix, PureState, SchmidtForm, schmidt
from concurrex.utils import random_unitary

logger = logging.getLogger(__name__)

NORMS = ("hs", "trace")
CLOSED_FORM_TOL = 1e-9
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PhcResult:
    phc_matrix: np.ndarray
    hs_distance: float
    is_phc_invariant: bool


def phc_transform(psi: PureState, form: Optional[SchmidtForm] = None) -> np.ndarray:
    """
    rho^PHC in the product basis, as a (d_A d_B) x (d_A d_B) matrix.

    PHC[a,b,a',b'] factorizes as M[a,b'] N[b,a'] with
    M = U diag(l) V^dagger and N = V diag(l) U^dagger.
    """
    if form is None:
        form = schmidt(psi)
    left, right, coeffs = form.left_vecs, form.right_vecs, form.coeffs
    m_mat = (left * coeffs) @ right.conj().T
    n_mat = (right * coeffs) @ left.conj().T
    tensor = np.einsum("ay,bx->abxy", m_mat, n_mat)
    size = psi.dim_a * psi.dim_b
    return tensor.reshape(size, size)


def phc_distance(psi: PureState, form: Optional[SchmidtForm] = None, norm: str = "hs") -> float:
    """Explicit ||rho_psi - rho_psi^PHC|| in the requested norm."""
    if norm not in NORMS:
        raise ValidationError(f"unknown norm '{norm}', expected one of {NORMS}")
    difference = psi.density().entries - phc_transform(psi, form)
    if norm == "trace":
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (difference + difference.conj().T)))))
    return float(np.linalg.norm(difference))


def phc_measure(psi: PureState, norm: str = "hs") -> float:
    """
    PHC measure of a pure state.

    The Hilbert-Schmidt value is checked against the closed form
    sqrt(2 sum_{k != l} lambda_k^2 lambda_l^2). The trace-norm variant is
    experimental and carries no such check.
    """
    form = schmidt(psi)
    explicit = phc_distance(psi, form, norm=norm)
    if norm == "hs":
        closed = concurrence_schmidt(form)
        if abs(explicit - closed) > CLOSED_FORM_TOL:
            raise InvariantBreach("PhcResult.closed_form",
                                  f"explicit PHC distance {explicit:.17g} vs closed form {closed:.17g}")
    return explicit


def phc_result(psi: PureState, tol: float = PHC_TOL) -> PhcResult:
    form = schmidt(psi)
    matrix = phc_transform(psi, form)
    distance = float(np.linalg.norm(psi.density().entries - matrix))
    return PhcResult(phc_matrix=matrix, hs_distance=distance, is_phc_invariant=distance <= tol)


def phc_separability_check(psi: PureState, tol: float = PHC_TOL) -> bool:
    """True iff rho^PHC = rho within tol; cross-checked against Schmidt rank."""
    separable = phc_measure(psi) <= tol
    rank_one = schmidt(psi, rank_cutoff=tol).rank == 1
    if separable != rank_one:
        logger.warning("PHC separability (%s) disagrees with Schmidt rank test (%s) at tol %g",
                       separable, rank_one, tol)
    return separable


def regauge(form: SchmidtForm, rng: np.random.Generator) -> SchmidtForm:
    """
    Another valid Schmidt basis for the same state: random phases on every
    pair, and a random unitary W on each degenerate block (U W, V conj(W)).
    """
    left = np.array(form.left_vecs)
    right = np.array(form.right_vecs)
    coeffs = np.asarray(form.coeffs)

    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=coeffs.size))
    left = left * phases
    right = right * phases.conj()

    start = 0
    while start < coeffs.size:
        stop = start + 1
        while stop < coeffs.size and abs(coeffs[stop] - coeffs[start]) <= DEGENERACY_TOL:
            stop += 1
        if stop - start > 1:
            w = random_unitary(stop - start, rng)
            left[:, start:stop] = left[:, start:stop] @ w
            right[:, start:stop] = right[:, start:stop] @ w.conj()
        start = stop

    return SchmidtForm(coeffs=coeffs, left_vecs=left, right_vecs=right, rank=form.rank)


def phc_gauge_deviation(psi: PureState, rng: np.random.Generator, trials: int = 8) -> float:
    """
    Largest change of the Hilbert-Schmidt PHC distance over random
    regaugings of the Schmidt basis. Reported, not asserted.
    """
    form = schmidt(psi)
    reference = phc_distance(psi, form)
    deviation = 0.0
    for _ in range(trials):
        alternative = regauge(form, rng)
        deviation = max(deviation, abs(phc_distance(psi, alternative) - reference))
    if deviation > DEGENERACY_TOL:
        logger.warning("PHC distance changed by %.3g under Schmidt regauging", deviation)
    else:
        logger.debug("PHC gauge deviation %.3g over %d trials", deviation, trials)
    return deviation


def phc_measure_mixed(rho: DensityMatrix, opt=None) -> float:
    """
    Convex roof of the PHC measure (upper-bound estimate).

    The best ensemble is re-evaluated member by member with both the
    explicit PHC distance and the concurrence; they must agree.
    """
    from dataclasses import replace

    from concurrex.pure_measures import concurrence_purity
    from concurrex.roof import RoofConfig, roof_minimize

    cfg = replace(opt or RoofConfig(), functional="phc")
    estimate = roof_minimize(rho, cfg)
    ensemble = estimate.best_ensemble
    phc_average = float(sum(p * phc_measure(m) for p, m in zip(ensemble.weights, ensemble.members)))
    c_average = float(sum(p * concurrence_purity(m) for p, m in zip(ensemble.weights, ensemble.members)))
    if abs(phc_average - c_average) > CLOSED_FORM_TOL + root_noise(rho.require_dims()[0]):
        raise InvariantBreach("phc.roof_coincidence",
                              f"PHC ensemble average {phc_average:.17g} vs concurrence {c_average:.17g}")
    return estimate.value
