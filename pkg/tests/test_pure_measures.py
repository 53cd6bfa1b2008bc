"""
Tests for pure-state concurrence, tangle and the purity function f
"""

import unittest

import numpy as np

from concurrex.errors import ProblemTooLarge
from concurrex.pure_measures import (
    concurrence_minors,
    concurrence_purity,
    concurrence_schmidt,
    concurrence_schmidt_pairwise,
    concurrence_upper_bound,
    f_purity,
    pure_measure_report,
    tangle_pure,
)
from concurrex.states import (
    DensityMatrix,
    PureState,
    random_density_matrix,
    random_product_state,
    random_pure_state,
    schmidt,
    validate_pure,
)
from concurrex.utils import make_rng, random_unitary

BELL = PureState(np.eye(2) / np.sqrt(2))


class TestConcurrenceFormulas(unittest.TestCase):

    def setUp(self):
        self.rng = make_rng(101)

    def test_bell_state(self):
        report = pure_measure_report(BELL)
        for value in (report.c_purity, report.c_minors, report.c_schmidt, report.tangle):
            self.assertAlmostEqual(value, 1.0, places=12)

    def test_product_state_is_zero(self):
        psi = validate_pure(np.outer([1, 0], [0, 1]))
        report = pure_measure_report(psi)
        self.assertEqual(report.c_purity, 0.0)
        self.assertEqual(report.c_minors, 0.0)
        self.assertLessEqual(report.c_schmidt, 1e-15)

    def test_maximally_entangled_qutrits(self):
        psi = PureState(np.eye(3) / np.sqrt(3))
        self.assertAlmostEqual(concurrence_purity(psi), np.sqrt(4 / 3), places=12)
        self.assertAlmostEqual(concurrence_purity(psi), concurrence_upper_bound(3, 3), places=12)

    def test_near_product_state(self):
        weights = np.array([1 - 1e-14, 1e-14])
        psi = validate_pure(np.diag(np.sqrt(weights)))
        expected = np.sqrt(4 * weights[0] * weights[1])
        self.assertAlmostEqual(concurrence_schmidt(schmidt(psi)), expected, delta=1e-12)
        self.assertAlmostEqual(concurrence_minors(psi), expected, delta=1e-12)

    def test_formulas_agree_on_random_states(self):
        for _ in range(100):
            dim_a, dim_b = (int(d) for d in self.rng.integers(2, 9, size=2))
            psi = random_pure_state(dim_a, dim_b, self.rng)
            report = pure_measure_report(psi)
            self.assertLessEqual(report.max_pairwise_gap, 1e-9)
            self.assertLessEqual(abs(report.tangle - report.c_purity ** 2), 1e-12)

    def test_stable_and_pairwise_schmidt_agree(self):
        for _ in range(20):
            psi = random_pure_state(5, 6, self.rng)
            form = schmidt(psi)
            self.assertAlmostEqual(concurrence_schmidt(form), concurrence_schmidt_pairwise(form), delta=1e-12)

    def test_zero_iff_product(self):
        for _ in range(50):
            dim_a, dim_b = (int(d) for d in self.rng.integers(2, 7, size=2))
            product = random_product_state(dim_a, dim_b, self.rng)
            self.assertLessEqual(concurrence_purity(product), 1e-9)
            self.assertLessEqual(concurrence_minors(product), 1e-9)
            self.assertLessEqual(concurrence_schmidt(schmidt(product)), 1e-9)
            self.assertEqual(schmidt(product, rank_cutoff=1e-6).rank, 1)

            entangled = random_pure_state(dim_a, dim_b, self.rng)
            self.assertGreater(concurrence_purity(entangled), 1e-9)
            self.assertGreater(schmidt(entangled, rank_cutoff=1e-6).rank, 1)

    def test_upper_bound_respected(self):
        for _ in range(50):
            dim_a, dim_b = (int(d) for d in self.rng.integers(1, 7, size=2))
            psi = random_pure_state(dim_a, dim_b, self.rng)
            self.assertLessEqual(concurrence_purity(psi), concurrence_upper_bound(dim_a, dim_b) + 1e-12)

    def test_single_row_state(self):
        psi = random_pure_state(1, 5, self.rng)
        self.assertEqual(concurrence_minors(psi), 0.0)
        self.assertEqual(concurrence_purity(psi), 0.0)

    def test_minors_size_guard(self):
        psi = PureState(np.ones((65, 65)) / 65)
        with self.assertRaises(ProblemTooLarge):
            concurrence_minors(psi)

    def test_tangle_is_square(self):
        psi = random_pure_state(3, 3, self.rng)
        self.assertAlmostEqual(tangle_pure(psi), concurrence_purity(psi) ** 2, delta=1e-12)


class TestPurityFunction(unittest.TestCase):
    """f(rho) = sqrt(2 (1 - Tr rho^2)) on local states."""

    def setUp(self):
        self.rng = make_rng(202)

    def test_pure_and_maximally_mixed(self):
        self.assertEqual(f_purity(DensityMatrix(np.diag([1.0, 0.0]))), 0.0)
        self.assertAlmostEqual(f_purity(DensityMatrix(np.eye(2) / 2)), 1.0, places=14)

    def test_concavity(self):
        for _ in range(100):
            d = int(self.rng.integers(2, 6))
            rho1 = random_density_matrix(d, self.rng)
            rho2 = random_density_matrix(d, self.rng)
            lam = float(self.rng.uniform())
            mixed = DensityMatrix(lam * rho1.entries + (1 - lam) * rho2.entries)
            self.assertGreaterEqual(f_purity(mixed),
                                    lam * f_purity(rho1) + (1 - lam) * f_purity(rho2) - 1e-10)

    def test_purity_cross_term_inequality(self):
        for _ in range(100):
            d = int(self.rng.integers(2, 6))
            rho1 = random_density_matrix(d, self.rng, rank=int(self.rng.integers(1, d + 1)))
            rho2 = random_density_matrix(d, self.rng, rank=int(self.rng.integers(1, d + 1)))
            cross = float(np.vdot(rho1.entries, rho2.entries).real)
            self.assertGreaterEqual(rho1.purity() + rho2.purity(), 2 * cross - 1e-12)


class TestUnitaryInvariance(unittest.TestCase):

    def setUp(self):
        self.rng = make_rng(211)

    def test_local_unitaries_preserve_concurrence(self):
        for dim_a, dim_b in ((2, 2), (2, 3), (4, 3)):
            psi = random_pure_state(dim_a, dim_b, self.rng)
            u, v = random_unitary(dim_a, self.rng), random_unitary(dim_b, self.rng)
            rotated = validate_pure(u @ psi.amps @ v.T)
            with self.subTest(dims=(dim_a, dim_b)):
                self.assertAlmostEqual(concurrence_purity(rotated), concurrence_purity(psi), delta=1e-12)
                self.assertAlmostEqual(concurrence_minors(rotated), concurrence_minors(psi), delta=1e-10)
                self.assertAlmostEqual(tangle_pure(rotated), tangle_pure(psi), delta=1e-12)

    def test_f_is_unitarily_invariant(self):
        for dim in (2, 3, 5):
            rho = random_density_matrix(dim, self.rng, rank=int(self.rng.integers(2, dim + 1)))
            u = random_unitary(dim, self.rng)
            rotated = DensityMatrix(u @ rho.entries @ u.conj().T)
            with self.subTest(dim=dim):
                self.assertAlmostEqual(f_purity(rotated), f_purity(rho), delta=1e-12)


if __name__ == '__main__':
    unittest.main()
