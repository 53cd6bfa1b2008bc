"""
Reference Oracles
Exact two-qubit concurrence (Wootters), closed-form state families and
construction-time separability certificates.

Family specs use the form ``name:key=value,key=value``, e.g.
``werner:p=0.8`` or ``two_mode_squeezed:r=0.5,d=16``.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

import numpy as np

from concurrex.errors import DimensionMismatch, ParamError
from concurrex.states import (
    DensityMatrix,
    Ensemble,
    PureState,
    random_density_matrix,
    random_product_state,
    schmidt,
    validate_pure,
)
from concurrex.utils import make_rng, resolve_seed

logger = logging.getLogger(__name__)

PAULI_Y = np.array([[0, -1j], [1j, 0]])
SPIN_FLIP = np.kron(PAULI_Y, PAULI_Y)
WOOTTERS_RANK_CUTOFF = 1e-12
PRODUCT_CUTOFF = 1e-9
CERTIFICATE_TOL = 1e-10

FAMILY_NAMES = (
    "bell",
    "werner",
    "isotropic",
    "two_mode_squeezed",
    "product",
    "rank_k_random",
    "bell_diagonal",
    "separable_mixture",
)

# documented defaults per family; keys absent here are rejected
FAMILY_DEFAULTS: Dict[str, Dict[str, float]] = {
    "bell": {},
    "werner": {"p": 0.5},
    "isotropic": {"p": 0.5, "d": 3},
    "two_mode_squeezed": {"r": 0.5, "d": 8},
    "product": {"da": 2, "db": 2},
    "rank_k_random": {"d": 2, "k": 2},
    "bell_diagonal": {"w0": 0.25, "w1": 0.25, "w2": 0.25, "w3": 0.25},
    "separable_mixture": {"n": 4, "d": 2},
}

State = Union[PureState, DensityMatrix]


@dataclass(frozen=True)
class StateFamily:
    name: str
    params: Dict[str, float] = field(default_factory=dict)
    seed: Optional[int] = None

    def resolved_params(self) -> Dict[str, float]:
        """Defaults overlaid with the given params; unknown keys raise."""
        if self.name not in FAMILY_DEFAULTS:
            raise ParamError(f"unknown family '{self.name}', expected one of {list(FAMILY_NAMES)}")
        defaults = FAMILY_DEFAULTS[self.name]
        unknown = sorted(set(self.params) - set(defaults))
        if unknown:
            raise ParamError(f"family '{self.name}' does not take parameters {unknown}; "
                             f"known: {sorted(defaults) or 'none'}")
        merged = dict(defaults)
        merged.update(self.params)
        return merged

    def spec(self) -> str:
        if not self.params:
            return self.name
        body = ",".join(f"{key}={value!r}" for key, value in sorted(self.params.items()))
        return f"{self.name}:{body}"


def parse_family_spec(spec: str, seed: Optional[int] = None) -> StateFamily:
    """Parse ``name:key=value,...`` into a StateFamily."""
    name, _, body = spec.strip().partition(":")
    name = name.strip()
    if name not in FAMILY_NAMES:
        raise ParamError(f"unknown family '{name}', expected one of {list(FAMILY_NAMES)}")
    params: Dict[str, float] = {}
    for item in filter(None, (part.strip() for part in body.split(","))):
        key, sep, raw = item.partition("=")
        if not sep or not key.strip():
            raise ParamError(f"malformed family parameter '{item}', expected key=value")
        try:
            params[key.strip()] = float(raw)
        except ValueError:
            raise ParamError(f"family parameter '{key.strip()}' is not a number: '{raw}'")
    return StateFamily(name=name, params=params, seed=seed)


def _integer(params: Dict[str, float], key: str, minimum: int) -> int:
    value = params[key]
    if not float(value).is_integer() or value < minimum:
        raise ParamError(f"parameter '{key}' must be an integer >= {minimum}, got {value}")
    return int(value)


def _probability(params: Dict[str, float], key: str) -> float:
    value = float(params[key])
    if not 0.0 <= value <= 1.0:
        raise ParamError(f"parameter '{key}' must lie in [0, 1], got {value}")
    return value


def _squeezing(params: Dict[str, float]) -> float:
    value = float(params["r"])
    if not np.isfinite(value) or value < 0:
        raise ParamError(f"squeezing r must be finite and >= 0, got {value}")
    return value


def maximally_entangled(d: int) -> np.ndarray:
    """|Phi_d+> = sum_k |kk> / sqrt(d) as a joint vector."""
    return np.eye(d, dtype=np.complex128).reshape(-1) / np.sqrt(d)


def bell_basis() -> np.ndarray:
    """Rows Phi+, Phi-, Psi+, Psi-."""
    s = 1 / np.sqrt(2)
    return np.array([
        [s, 0, 0, s],
        [s, 0, 0, -s],
        [0, s, s, 0],
        [0, s, -s, 0],
    ], dtype=np.complex128)


def _projector(vector: np.ndarray) -> np.ndarray:
    return np.outer(vector, vector.conj())


def two_mode_squeezed_coeffs(r: float, d: int) -> np.ndarray:
    """Renormalized Schmidt coefficients t^k sqrt((1 - t^2)/(1 - t^(2d)))."""
    t = np.tanh(r)
    powers = t ** np.arange(d)
    if t >= 1.0:
        return np.full(d, 1 / np.sqrt(d))
    return powers * np.sqrt((1 - t * t) / (1 - t ** (2 * d)))


def two_mode_squeezed_state(r: float, d: int) -> PureState:
    """Truncation of sum_k tanh^k(r)/cosh(r) |kk>, renormalized; raw_norm kept."""
    raw = np.diag(np.tanh(r) ** np.arange(d) / np.cosh(r)).astype(np.complex128)
    return validate_pure(raw, tol=np.inf)


def two_mode_squeezed_limit(r: float) -> float:
    """C of the untruncated state: sqrt(2(1 - (1-t^2)^2/(1-t^4)))."""
    t = np.tanh(r)
    if t == 0:
        return 0.0
    if t >= 1.0:
        return float(np.sqrt(2.0))
    return float(np.sqrt(2.0 * (1.0 - (1 - t * t) ** 2 / (1 - t ** 4))))


def truncation_deficit(r: float, d: int) -> float:
    """Probability mass beyond level d: tanh^(2d)(r)."""
    return float(np.tanh(r) ** (2 * d))


def product_mixture(weights: Sequence[float], members: Sequence[PureState]) -> DensityMatrix:
    """
    sum_i p_i |a_i b_i><a_i b_i| with the product ensemble recorded as
    its separability certificate.
    """
    ensemble = Ensemble(weights=np.asarray(weights, dtype=float), members=members)
    for index, member in enumerate(ensemble.members):
        if schmidt(member, rank_cutoff=PRODUCT_CUTOFF).rank != 1:
            raise ParamError(f"member {index} is not a product state")
    return DensityMatrix(ensemble.density(), dims=ensemble.dims, separable_certificate=ensemble)


def separable_witness_ensemble(rho: DensityMatrix) -> Optional[Ensemble]:
    """The recorded product ensemble of rho, or None if there is none."""
    certificate = rho.separable_certificate
    if certificate is None:
        return None
    error = certificate.mixture_error(rho)
    if error > CERTIFICATE_TOL:
        logger.warning("Discarding separability certificate off by %.3g", error)
        return None
    return certificate


def _family_rng(family: StateFamily) -> np.random.Generator:
    seed = family.seed
    if seed is None:
        seed = resolve_seed(None)
        logger.info("Family '%s' drew seed %d", family.name, seed)
    return make_rng(seed)


def make_family(family: StateFamily) -> State:
    """Generate the documented state of a family."""
    params = family.resolved_params()
    name = family.name

    if name == "bell":
        return PureState(np.array([[1, 0], [0, 1]]) / np.sqrt(2))

    if name == "werner":
        p = _probability(params, "p")
        rho = p * _projector(maximally_entangled(2)) + (1 - p) * np.eye(4) / 4
        return DensityMatrix(rho, dims=(2, 2))

    if name == "isotropic":
        p = _probability(params, "p")
        d = _integer(params, "d", 2)
        rho = p * _projector(maximally_entangled(d)) + (1 - p) * np.eye(d * d) / (d * d)
        return DensityMatrix(rho, dims=(d, d))

    if name == "two_mode_squeezed":
        return two_mode_squeezed_state(_squeezing(params), _integer(params, "d", 2))

    if name == "product":
        da, db = _integer(params, "da", 1), _integer(params, "db", 1)
        return random_product_state(da, db, _family_rng(family))

    if name == "rank_k_random":
        d = _integer(params, "d", 2)
        k = _integer(params, "k", 1)
        if k > d * d:
            raise ParamError(f"rank k={k} exceeds the joint dimension {d * d}")
        return random_density_matrix(d * d, _family_rng(family), rank=k, dims=(d, d))

    if name == "bell_diagonal":
        weights = np.array([params[f"w{i}"] for i in range(4)], dtype=float)
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ParamError(f"Bell-diagonal weights must be >= 0 and sum to 1, got {weights.tolist()}")
        basis = bell_basis()
        rho = sum(w * _projector(vec) for w, vec in zip(weights, basis))
        return DensityMatrix(rho, dims=(2, 2))

    # separable_mixture
    n = _integer(params, "n", 1)
    d = _integer(params, "d", 1)
    rng = _family_rng(family)
    members = [random_product_state(d, d, rng) for _ in range(n)]
    weights = rng.dirichlet(np.ones(n))
    return product_mixture(weights, members)


def _two_qubit(rho: DensityMatrix) -> np.ndarray:
    if rho.dims != (2, 2):
        raise DimensionMismatch(f"Wootters concurrence needs a two-qubit state, got dims {rho.dims}")
    return 0.5 * (rho.entries + rho.entries.conj().T)


def wootters_concurrence(rho: DensityMatrix) -> float:
    """
    max(0, s1 - s2 - s3 - s4) for the spin-flip spectrum of rho.

    The s_i are taken as singular values of W^T (Y x Y) W with rho = W W^dagger,
    which equal the square roots of the eigenvalues of rho (Y x Y) rho* (Y x Y).
    Eigenvalues of rho below 1e-12 are dropped.
    """
    entries = _two_qubit(rho)
    eigvals, eigvecs = np.linalg.eigh(entries)
    keep = eigvals > WOOTTERS_RANK_CUTOFF
    factor = eigvecs[:, keep] * np.sqrt(eigvals[keep])
    tau = factor.T @ SPIN_FLIP @ factor
    singular = np.zeros(4)
    values = np.linalg.svd(tau, compute_uv=False)
    singular[:values.size] = np.sort(values)[::-1]
    return float(max(0.0, singular[0] - singular[1:].sum()))


def wootters_spectrum(rho: DensityMatrix) -> np.ndarray:
    """Square roots of the eigenvalues of rho (Y x Y) rho* (Y x Y), nonincreasing."""
    entries = _two_qubit(rho)
    product = entries @ SPIN_FLIP @ entries.conj() @ SPIN_FLIP
    eigvals = np.clip(np.linalg.eigvals(product).real, 0.0, None)
    return np.sort(np.sqrt(eigvals))[::-1]


def wootters_concurrence_eigen(rho: DensityMatrix) -> float:
    """Literal eigenvalue route; loses ~1e-8 near rank-deficient states."""
    sigma = wootters_spectrum(rho)
    return float(max(0.0, sigma[0] - sigma[1:].sum()))


def wootters_convexity_gap(rho1: DensityMatrix, rho2: DensityMatrix, lam: float) -> float:
    """lam C(rho1) + (1 - lam) C(rho2) - C(mixture); never below -1e-9."""
    if not 0.0 <= lam <= 1.0:
        raise ParamError(f"mixing weight must lie in [0, 1], got {lam}")
    mixed = DensityMatrix(lam * rho1.entries + (1 - lam) * rho2.entries, dims=rho1.dims)
    return (lam * wootters_concurrence(rho1) + (1 - lam) * wootters_concurrence(rho2)
            - wootters_concurrence(mixed))
