"""
Tests for the Wootters oracle, state families and separability certificates
"""

import unittest

import numpy as np
from numpy.testing import assert_allclose

from concurrex.errors import DimensionMismatch, ParamError
from concurrex.oracles import (
    FAMILY_NAMES,
    StateFamily,
    make_family,
    maximally_entangled,
    parse_family_spec,
    product_mixture,
    separable_witness_ensemble,
    truncation_deficit,
    two_mode_squeezed_coeffs,
    two_mode_squeezed_limit,
    two_mode_squeezed_state,
    wootters_concurrence,
    wootters_concurrence_eigen,
    wootters_convexity_gap,
)
from concurrex.pure_measures import concurrence_purity
from concurrex.states import DensityMatrix, PureState, random_density_matrix, random_pure_state, schmidt
from concurrex.utils import make_rng


def family(spec: str, seed: int = 1):
    return make_family(parse_family_spec(spec, seed=seed))


class TestWootters(unittest.TestCase):

    def setUp(self):
        self.rng = make_rng(51)

    def test_reference_values(self):
        phi = np.outer(maximally_entangled(2), maximally_entangled(2).conj())
        self.assertAlmostEqual(wootters_concurrence(DensityMatrix(phi, dims=(2, 2))), 1.0, places=12)
        self.assertEqual(wootters_concurrence(DensityMatrix(np.eye(4) / 4, dims=(2, 2))), 0.0)
        self.assertAlmostEqual(wootters_concurrence(family("werner:p=0.5")), 0.25, places=12)
        self.assertAlmostEqual(wootters_concurrence(family("werner:p=0.8")), 0.7, places=12)

    def test_werner_threshold(self):
        self.assertEqual(wootters_concurrence(family("werner:p=0.3")), 0.0)

    def test_bell_diagonal(self):
        rho = family("bell_diagonal:w0=0.7,w1=0.1,w2=0.1,w3=0.1")
        self.assertAlmostEqual(wootters_concurrence(rho), 0.4, places=12)

    def test_pure_states_match_purity_formula(self):
        for _ in range(50):
            psi = random_pure_state(2, 2, self.rng)
            self.assertAlmostEqual(wootters_concurrence(psi.density()), concurrence_purity(psi), delta=1e-9)

    def test_eigenvalue_route_agrees(self):
        for _ in range(50):
            rho = random_density_matrix(4, self.rng, dims=(2, 2))
            self.assertAlmostEqual(wootters_concurrence(rho), wootters_concurrence_eigen(rho), delta=1e-8)

    def test_local_unitary_invariance(self):
        from concurrex.utils import random_unitary
        rho = random_density_matrix(4, self.rng, rank=2, dims=(2, 2))
        u = np.kron(random_unitary(2, self.rng), random_unitary(2, self.rng))
        rotated = DensityMatrix(u @ rho.entries @ u.conj().T, dims=(2, 2))
        self.assertAlmostEqual(wootters_concurrence(rotated), wootters_concurrence(rho), delta=1e-10)

    def test_convexity(self):
        for _ in range(50):
            rho1 = random_density_matrix(4, self.rng, rank=int(self.rng.integers(1, 5)), dims=(2, 2))
            rho2 = random_density_matrix(4, self.rng, rank=int(self.rng.integers(1, 5)), dims=(2, 2))
            self.assertGreaterEqual(wootters_convexity_gap(rho1, rho2, float(self.rng.uniform())), -1e-9)
        with self.assertRaises(ParamError):
            wootters_convexity_gap(rho1, rho2, 1.5)

    def test_requires_two_qubits(self):
        with self.assertRaises(DimensionMismatch):
            wootters_concurrence(family("isotropic:p=0.5,d=3"))


class TestFamilies(unittest.TestCase):

    def test_every_family_builds(self):
        for name in FAMILY_NAMES:
            state = make_family(StateFamily(name, seed=3))
            if isinstance(state, PureState):
                self.assertAlmostEqual(float(np.linalg.norm(state.amps)), 1.0, delta=1e-12)
            else:
                self.assertAlmostEqual(np.trace(state.entries).real, 1.0, delta=1e-12)
                self.assertIsNotNone(state.dims)

    def test_isotropic(self):
        rho = family("isotropic:p=0.6,d=3")
        self.assertEqual(rho.dims, (3, 3))
        self.assertAlmostEqual(rho.purity(), 0.36 + 0.16 / 9 + 2 * 0.6 * 0.4 / 9, delta=1e-12)

    def test_seeded_families_repeat(self):
        first = family("rank_k_random:d=3,k=2", seed=17)
        second = family("rank_k_random:d=3,k=2", seed=17)
        assert_allclose(first.entries, second.entries)
        self.assertEqual(first.rank(), 2)

    def test_spec_round_trip(self):
        self.assertEqual(parse_family_spec("werner:p=0.8").spec(), "werner:p=0.8")
        self.assertEqual(parse_family_spec(" bell ").spec(), "bell")

    def test_parse_errors(self):
        for spec in ("ghz", "werner:p", "werner:p=abc", "werner:=1"):
            with self.subTest(spec=spec), self.assertRaises(ParamError):
                parse_family_spec(spec)

    def test_parameter_errors(self):
        for spec in ("werner:q=1", "werner:p=1.5", "isotropic:d=2.5", "rank_k_random:d=2,k=5",
                     "bell_diagonal:w0=0.5", "two_mode_squeezed:r=-1"):
            with self.subTest(spec=spec), self.assertRaises(ParamError):
                family(spec)


class TestTwoModeSqueezed(unittest.TestCase):

    def test_limit_closed_form(self):
        for r in (0.1, 0.5, 1.0, 2.0):
            t = np.tanh(r)
            self.assertAlmostEqual(two_mode_squeezed_limit(r), 2 * t / np.sqrt(1 + t * t), delta=1e-12)
        self.assertAlmostEqual(two_mode_squeezed_limit(0.5), 0.83898, delta=1e-5)
        self.assertEqual(two_mode_squeezed_limit(0.0), 0.0)

    def test_raw_norm_records_deficit(self):
        psi = two_mode_squeezed_state(0.5, 6)
        self.assertAlmostEqual(1 - psi.raw_norm ** 2, truncation_deficit(0.5, 6), delta=1e-12)

    def test_coefficients(self):
        psi = two_mode_squeezed_state(0.8, 10)
        assert_allclose(schmidt(psi).coeffs, two_mode_squeezed_coeffs(0.8, 10), atol=1e-12)

    def test_truncations_approach_limit(self):
        values = [concurrence_purity(two_mode_squeezed_state(0.5, d)) for d in (2, 4, 8, 16, 32)]
        self.assertTrue(all(b >= a - 1e-12 for a, b in zip(values, values[1:])))
        self.assertAlmostEqual(values[-1], two_mode_squeezed_limit(0.5), delta=1e-9)

    def test_zero_squeezing_is_product(self):
        self.assertEqual(concurrence_purity(two_mode_squeezed_state(0.0, 8)), 0.0)


class TestCertificates(unittest.TestCase):

    def test_separable_mixture_certificate(self):
        rho = family("separable_mixture:n=5,d=3", seed=9)
        certificate = separable_witness_ensemble(rho)
        self.assertIsNotNone(certificate)
        self.assertEqual(len(certificate), 5)
        self.assertLessEqual(certificate.mixture_error(rho), 1e-10)
        for member in certificate.members:
            self.assertEqual(schmidt(member, rank_cutoff=1e-9).rank, 1)

    def test_generic_states_have_no_certificate(self):
        self.assertIsNone(separable_witness_ensemble(family("werner:p=0.9")))
        self.assertIsNone(separable_witness_ensemble(family("werner:p=0.2")))

    def test_entangled_member_rejected(self):
        bell = PureState(np.eye(2) / np.sqrt(2))
        with self.assertRaises(ParamError):
            product_mixture([1.0], [bell])

    def test_mismatched_certificate_discarded(self):
        rho = family("separable_mixture:n=2,d=2", seed=4)
        tampered = DensityMatrix(np.eye(4) / 4, dims=(2, 2), separable_certificate=rho.separable_certificate)
        with self.assertLogs("concurrex.oracles", level="WARNING"):
            self.assertIsNone(separable_witness_ensemble(tampered))


if __name__ == '__main__':
    unittest.main()
