"""
Tests for convex-roof estimation and the trace-class extension
"""

import unittest

import numpy as np

from concurrex.errors import ConfigError, InvalidIsometry, ValidationError, ZeroOperator
from concurrex.oracles import StateFamily, make_family, maximally_entangled, product_mixture
from concurrex.pure_measures import concurrence_purity, tangle_pure
from concurrex.roof import (
    EnsembleObjective,
    RoofConfig,
    bound_report,
    default_ensemble_size,
    descend,
    ensemble_average,
    ensemble_from_isometry,
    estimate_summary,
    random_isometry,
    roof_minimize,
    tangle_roof,
    trace_class_bound,
    trace_class_concurrence,
)
from concurrex.states import DensityMatrix, random_density_matrix, random_pure_state, validate_pure
from concurrex.utils import make_rng

FAST = RoofConfig(restarts=4, max_iters=300, rng_seed=11)


def werner(p: float) -> DensityMatrix:
    return make_family(StateFamily("werner", {"p": p}))


def diagonal_mixture() -> DensityMatrix:
    members = [validate_pure(np.diag([1, 0])), validate_pure(np.diag([0, 1]))]
    return product_mixture([0.5, 0.5], members)


class TestEnsembleFromIsometry(unittest.TestCase):

    def setUp(self):
        self.rng = make_rng(41)
        self.rho = random_density_matrix(6, self.rng, rank=3, dims=(2, 3))

    def test_identity_gives_spectral_ensemble(self):
        ensemble = ensemble_from_isometry(self.rho, np.eye(3))
        eigvals = np.sort(np.linalg.eigvalsh(self.rho.entries))[::-1][:3]
        np.testing.assert_allclose(ensemble.weights, eigvals, atol=1e-12)
        self.assertTrue(ensemble.is_consistent_with(self.rho))

    def test_random_isometries_are_consistent(self):
        for m in (3, 5, 9):
            ensemble = ensemble_from_isometry(self.rho, random_isometry(m, 3, self.rng))
            self.assertLessEqual(ensemble.mixture_error(self.rho), 1e-10)
            self.assertAlmostEqual(float(np.sum(ensemble.weights)), 1.0, delta=1e-12)

    def test_rejects_non_isometry(self):
        with self.assertRaises(InvalidIsometry):
            ensemble_from_isometry(self.rho, 2 * np.eye(3))

    def test_rejects_wrong_column_count(self):
        with self.assertRaises(InvalidIsometry):
            ensemble_from_isometry(self.rho, np.eye(4))

    def test_default_ensemble_size(self):
        self.assertEqual(default_ensemble_size(1), 1)
        self.assertEqual(default_ensemble_size(2), 4)
        self.assertEqual(default_ensemble_size(4), 8)


class TestRoofMinimize(unittest.TestCase):

    def test_rank_one_state(self):
        psi = random_pure_state(2, 3, make_rng(42))
        estimate = roof_minimize(psi.density(), FAST)
        self.assertAlmostEqual(estimate.value, concurrence_purity(psi), delta=1e-9)
        self.assertEqual(len(estimate.best_ensemble), 1)

    def test_separable_mixture(self):
        estimate = roof_minimize(diagonal_mixture(), RoofConfig(restarts=2, max_iters=100))
        self.assertLessEqual(estimate.value, 1e-6)

    def test_recorded_product_ensemble(self):
        rho = make_family(StateFamily("separable_mixture", {"n": 6, "d": 3}, seed=12))
        objective = EnsembleObjective(rho, "concurrence")
        self.assertEqual(objective.certificate_isometry().shape, (6, objective.rank))
        estimate = roof_minimize(rho, RoofConfig(restarts=2, max_iters=50))
        self.assertLessEqual(estimate.value, 1e-6)
        self.assertEqual(estimate.best_restart, 0)

    def test_separable_mixture_found_by_search(self):
        certified = make_family(StateFamily("separable_mixture", {"n": 5, "d": 3}, seed=3))
        rho = DensityMatrix(certified.entries, dims=certified.dims)
        self.assertIsNone(EnsembleObjective(rho, "concurrence").certificate_isometry())
        self.assertLessEqual(roof_minimize(rho, RoofConfig(workers=4)).value, 1e-6)

    def test_werner_state(self):
        estimate = roof_minimize(werner(0.8), FAST)
        self.assertGreaterEqual(estimate.value, 0.7 - 1e-9)
        self.assertLessEqual(estimate.value, 0.72)
        self.assertTrue(estimate.best_ensemble.is_consistent_with(werner(0.8)))
        self.assertEqual(estimate.chain_violations, 0)

    def test_value_is_best_restart(self):
        estimate = roof_minimize(werner(0.6), FAST)
        self.assertEqual(len(estimate.per_restart_values), FAST.restarts)
        self.assertEqual(estimate.value, max(min(estimate.per_restart_values), 0.0))
        self.assertEqual(estimate.per_restart_values[estimate.best_restart], min(estimate.per_restart_values))

    def test_recomputed_average_matches(self):
        estimate = roof_minimize(werner(0.9), FAST)
        recomputed = ensemble_average(estimate.best_ensemble, "concurrence")
        self.assertAlmostEqual(recomputed, estimate.value, delta=1e-8)

    def test_tangle_roof(self):
        estimate = tangle_roof(werner(0.8), FAST)
        self.assertEqual(estimate.functional, "tangle")
        self.assertGreaterEqual(estimate.value, 0.49 - 1e-9)
        self.assertLessEqual(estimate.value, 1.0)

    def test_same_seed_same_result(self):
        rho = werner(0.7)
        cfg = RoofConfig(restarts=3, max_iters=50, rng_seed=99)
        first = roof_minimize(rho, cfg)
        second = roof_minimize(rho, cfg)
        self.assertEqual(first.per_restart_values, second.per_restart_values)

    def test_workers_do_not_change_result(self):
        rho = werner(0.7)
        serial = roof_minimize(rho, RoofConfig(restarts=4, max_iters=50, rng_seed=3))
        threaded = roof_minimize(rho, RoofConfig(restarts=4, max_iters=50, rng_seed=3, workers=2))
        self.assertEqual(serial.per_restart_values, threaded.per_restart_values)
        self.assertEqual(serial.best_restart, threaded.best_restart)

    def test_summary_fields(self):
        summary = estimate_summary(roof_minimize(werner(0.8), RoofConfig(restarts=2, max_iters=50)))
        self.assertEqual(summary["restarts"], 2)
        self.assertEqual(summary["functional"], "concurrence")
        self.assertIn("value_upper_bound", summary)


class TestDescent(unittest.TestCase):

    def test_values_nonincreasing(self):
        rho = werner(0.8)
        objective = EnsembleObjective(rho, "concurrence")
        start = random_isometry(6, 4, make_rng(5))
        trace = descend(objective, start, RoofConfig(max_iters=100))
        self.assertTrue(all(b <= a for a, b in zip(trace.values, trace.values[1:])))
        self.assertEqual(trace.value, trace.values[-1])

    def test_batched_value_matches_members(self):
        rho = random_density_matrix(9, make_rng(6), rank=3, dims=(3, 3))
        isometry = random_isometry(5, 3, make_rng(7))
        for functional in ("concurrence", "tangle", "phc"):
            objective = EnsembleObjective(rho, functional)
            expected = ensemble_average(objective.ensemble(isometry), functional)
            self.assertAlmostEqual(objective.value(isometry), expected, delta=1e-10)


class TestRoofConfig(unittest.TestCase):

    def test_unknown_functional(self):
        with self.assertRaises(ConfigError):
            RoofConfig(functional="negativity")

    def test_nonpositive_restarts(self):
        with self.assertRaises(ConfigError):
            RoofConfig(restarts=0)

    def test_ensemble_size_bounds(self):
        with self.assertRaises(ConfigError):
            roof_minimize(werner(0.8), RoofConfig(ensemble_size=2, restarts=1))
        with self.assertRaises(ConfigError):
            roof_minimize(werner(0.8), RoofConfig(ensemble_size=17, restarts=1))


class TestBoundReport(unittest.TestCase):

    def test_chain_holds(self):
        report = bound_report(werner(0.8), FAST)
        self.assertLessEqual(report.c_sq, report.tangle + 1e-9)
        self.assertLessEqual(report.tangle, report.purity_bound + 1e-9)
        self.assertAlmostEqual(report.purity_bound, 1.0, delta=1e-12)

    def test_pure_state_saturates_chain(self):
        psi = random_pure_state(2, 3, make_rng(43))
        report = bound_report(psi.density(), FAST)
        self.assertAlmostEqual(report.c_sq, report.tangle, delta=1e-12)
        self.assertAlmostEqual(report.tangle, report.purity_bound, delta=1e-12)
        self.assertAlmostEqual(report.tangle, tangle_pure(psi), delta=1e-12)

    def test_maximally_mixed_state(self):
        report = bound_report(werner(0.0), FAST)
        self.assertAlmostEqual(report.purity_bound, 1.0, delta=1e-12)
        self.assertLessEqual(report.c_sq, report.tangle + 1e-12)
        self.assertLessEqual(report.tangle, 1e-6)


class TestRoofConvexity(unittest.TestCase):
    """roof(lam rho1 + (1 - lam) rho2) <= lam roof(rho1) + (1 - lam) roof(rho2) + 2 value_tol."""

    def assert_convex(self, rho1: DensityMatrix, rho2: DensityMatrix, lam: float):
        mixed = DensityMatrix(lam * rho1.entries + (1 - lam) * rho2.entries, dims=rho1.dims)
        mixed_value, value1, value2 = (roof_minimize(rho, FAST).value for rho in (mixed, rho1, rho2))
        self.assertLessEqual(mixed_value, lam * value1 + (1 - lam) * value2 + 2 * FAST.value_tol)

    def test_bell_state_with_white_noise(self):
        for lam in (0.4, 0.8):
            with self.subTest(lam=lam):
                self.assert_convex(werner(1.0), werner(0.0), lam)

    def test_two_bell_states(self):
        phi_minus = np.array([1, 0, 0, -1]) / np.sqrt(2)
        rho2 = DensityMatrix(np.outer(phi_minus, phi_minus), dims=(2, 2))
        for lam in (0.3, 0.5):
            with self.subTest(lam=lam):
                self.assert_convex(werner(1.0), rho2, lam)


class TestTraceClass(unittest.TestCase):

    def setUp(self):
        self.phi = np.outer(maximally_entangled(2), maximally_entangled(2).conj())

    def test_scaled_projector(self):
        value = trace_class_concurrence(0.3 * self.phi, (2, 2), RoofConfig(restarts=2, max_iters=20))
        self.assertAlmostEqual(value, 0.3, delta=1e-9)

    def test_sign_does_not_matter(self):
        cfg = RoofConfig(restarts=2, max_iters=20)
        self.assertAlmostEqual(trace_class_concurrence(-self.phi, (2, 2), cfg),
                               trace_class_concurrence(self.phi, (2, 2), cfg), delta=1e-12)

    def test_density_matrix_input(self):
        rho = diagonal_mixture()
        value = trace_class_concurrence(rho.entries, (2, 2), RoofConfig(restarts=2, max_iters=100))
        self.assertLessEqual(value, 1e-6)

    def test_bound(self):
        self.assertAlmostEqual(trace_class_bound(0.3 * self.phi), 0.3 * np.sqrt(2), delta=1e-12)
        value = trace_class_concurrence(0.3 * self.phi, (2, 2), RoofConfig(restarts=1, max_iters=10))
        self.assertLessEqual(value, trace_class_bound(0.3 * self.phi))

    def test_zero_operator(self):
        with self.assertRaises(ZeroOperator):
            trace_class_concurrence(np.zeros((4, 4)), (2, 2))

    def test_non_hermitian(self):
        with self.assertRaises(ValidationError):
            trace_class_bound(np.triu(np.ones((4, 4))))


if __name__ == '__main__':
    unittest.main()
