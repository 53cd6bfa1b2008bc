"""
Property and oracle suites over seeded corpora.

Runs at reduced size by default; set CONCURREX_FULL_ACCEPTANCE=1 for the
full corpus sizes (several minutes).
"""

import os
import unittest

import numpy as np

from concurrex.channels import run_audit_trials, truncation_scan
from concurrex.oracles import StateFamily, make_family, parse_family_spec, wootters_concurrence, wootters_convexity_gap
from concurrex.phc import phc_measure
from concurrex.pure_measures import (
    concurrence_minors,
    concurrence_purity,
    f_purity,
    pure_measure_report,
)
from concurrex.roof import RoofConfig, roof_minimize
from concurrex.states import (
    DensityMatrix,
    random_density_matrix,
    random_product_state,
    random_pure_state,
    schmidt,
)
from concurrex.utils import make_rng

FULL = os.getenv("CONCURREX_FULL_ACCEPTANCE") == "1"


def scale(full: int, reduced: int) -> int:
    return full if FULL else reduced


def two_qubit_corpus():
    """Werner, Bell-diagonal and seeded rank-2 states with their Wootters values."""
    rng = make_rng(2024)
    werner = (0.2, 0.4, 0.6, 0.8, 1.0) if FULL else (0.8, 1.0)
    states = [make_family(StateFamily("werner", {"p": p})) for p in werner]
    for _ in range(scale(5, 1)):
        weights = rng.dirichlet(np.ones(4) * 0.5)
        params = {f"w{i}": float(w) for i, w in enumerate(weights)}
        states.append(make_family(StateFamily("bell_diagonal", params)))
    for _ in range(scale(10, 1)):
        states.append(random_density_matrix(4, rng, rank=2, dims=(2, 2)))
    return states


class TestPureStateCorpus(unittest.TestCase):

    def setUp(self):
        rng = make_rng(500)
        self.corpus = []
        for _ in range(scale(500, 60)):
            dim_a, dim_b = (int(d) for d in rng.integers(2, 9, size=2))
            self.corpus.append(random_pure_state(dim_a, dim_b, rng))

    def test_formulas_coincide(self):
        for psi in self.corpus:
            report = pure_measure_report(psi)
            self.assertLessEqual(report.max_pairwise_gap, 1e-9)
            self.assertLessEqual(abs(report.tangle - report.c_purity ** 2), 1e-12)

    def test_phc_coincides_with_concurrence(self):
        for psi in self.corpus:
            self.assertLessEqual(abs(phc_measure(psi) - concurrence_purity(psi)), 1e-9)


class TestRoofAgainstWootters(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.cfg = RoofConfig(restarts=scale(64, 8), rng_seed=7, workers=4)
        cls.tol = 5e-3 if FULL else 2e-2
        cls.states = two_qubit_corpus()
        cls.estimates = [roof_minimize(rho, cls.cfg) for rho in cls.states]

    def test_estimates_bracket_exact_value(self):
        for rho, estimate in zip(self.states, self.estimates):
            exact = wootters_concurrence(rho)
            self.assertGreaterEqual(estimate.value, exact - 1e-9)
            self.assertLessEqual(estimate.value, exact + self.tol)

    def test_bound_chain_on_sampled_ensembles(self):
        for estimate in self.estimates:
            self.assertGreater(estimate.chain_checks, 0)
            self.assertEqual(estimate.chain_violations, 0)

    def test_rerun_is_identical(self):
        for rho, estimate in list(zip(self.states, self.estimates))[:2]:
            again = roof_minimize(rho, self.cfg)
            self.assertEqual(again.per_restart_values, estimate.per_restart_values)
            self.assertEqual(again.value, estimate.value)


class TestTruncationCorpus(unittest.TestCase):

    def test_continuity_and_limit(self):
        dims = list(range(2, 65)) if FULL else [2, 4, 8, 16, 32, 64]
        for r in (0.25, 0.5, 1.0):
            scan = truncation_scan(parse_family_spec(f"two_mode_squeezed:r={r}"), dims)
            self.assertTrue(scan.certificate_ok)
            for a, b, bound in zip(scan.values, scan.values[1:], scan.certified_bounds):
                self.assertLessEqual(abs(b - a), bound + 1e-8)
            self.assertLess(scan.limit_gap, 1e-6)


class TestMonotonicityCorpus(unittest.TestCase):

    def test_random_instruments(self):
        summary = run_audit_trials(trials=scale(200, 40), seed=314, mode="wootters", workers=4)
        self.assertEqual(summary.violations, 0)
        self.assertGreaterEqual(summary.min_margin, -1e-9)
        again = run_audit_trials(trials=scale(200, 40), seed=314, mode="wootters")
        self.assertEqual(again.margins, summary.margins)

    def test_local_unitaries(self):
        summary = run_audit_trials(trials=scale(200, 40), seed=271, mode="wootters", channel_kind="unitary")
        self.assertLessEqual(max(abs(margin) for margin in summary.margins), 1e-9)


class TestConvexityCorpus(unittest.TestCase):

    def test_local_purity_inequalities(self):
        rng = make_rng(77)
        for _ in range(scale(500, 100)):
            d = int(rng.integers(2, 6))
            rho1 = random_density_matrix(d, rng, rank=int(rng.integers(1, d + 1)))
            rho2 = random_density_matrix(d, rng, rank=int(rng.integers(1, d + 1)))
            lam = float(rng.uniform())
            mixed = DensityMatrix(lam * rho1.entries + (1 - lam) * rho2.entries)
            self.assertGreaterEqual(f_purity(mixed) - lam * f_purity(rho1) - (1 - lam) * f_purity(rho2), -1e-10)
            cross = float(np.vdot(rho1.entries, rho2.entries).real)
            self.assertGreaterEqual(rho1.purity() + rho2.purity() - 2 * cross, -1e-12)

    def test_wootters_convexity(self):
        rng = make_rng(78)
        for _ in range(scale(100, 30)):
            rho1 = random_density_matrix(4, rng, rank=int(rng.integers(1, 5)), dims=(2, 2))
            rho2 = random_density_matrix(4, rng, rank=int(rng.integers(1, 5)), dims=(2, 2))
            self.assertGreaterEqual(wootters_convexity_gap(rho1, rho2, float(rng.uniform())), -1e-9)


class TestSeparableCorpus(unittest.TestCase):

    def test_separable_mixtures_with_recorded_ensemble(self):
        cfg = RoofConfig(restarts=2, max_iters=50)
        for seed in range(scale(50, 10)):
            n, d = 2 + seed % 4, 2 + seed % 2
            rho = make_family(StateFamily("separable_mixture", {"n": n, "d": d}, seed=seed))
            self.assertLessEqual(roof_minimize(rho, cfg).value, 1e-6)

    def test_separable_mixtures_without_recorded_ensemble(self):
        cfg = RoofConfig(workers=4)
        for seed in range(scale(30, 10)):
            n, d = 2 + seed % 4, 2 + seed % 2
            family = StateFamily("separable_mixture", {"n": n, "d": d}, seed=seed)
            certified = make_family(family)
            rho = DensityMatrix(certified.entries, dims=certified.dims)
            with self.subTest(seed=seed):
                self.assertIsNone(rho.separable_certificate)
                self.assertLessEqual(roof_minimize(rho, cfg).value, 1e-6)

    def test_product_states(self):
        rng = make_rng(79)
        for _ in range(scale(50, 20)):
            dim_a, dim_b = (int(d) for d in rng.integers(2, 7, size=2))
            psi = random_product_state(dim_a, dim_b, rng)
            self.assertLessEqual(concurrence_purity(psi), 1e-9)
            self.assertLessEqual(concurrence_minors(psi), 1e-9)
            self.assertLessEqual(phc_measure(psi), 1e-9)
            self.assertEqual(schmidt(psi, rank_cutoff=1e-9).rank, 1)


if __name__ == '__main__':
    unittest.main()
