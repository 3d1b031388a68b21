"""Brute-force oracles: reference values and self-consistency."""

import numpy as np
import pytest

import bregman_decoding as bd
from bregman_decoding import oracle


class TestBruteForce:
    CFG = bd.DecodeConfig(generator=2, lam=0.05)

    def test_worked_example(self):
        support, cost = oracle.brute_force_best_support([0.6, 0.3, 0.1], 2, self.CFG)
        assert support == (0, 1)
        assert cost == pytest.approx(0.1075, abs=1e-12)

    def test_uniform_symmetry(self):
        # every 2-subset of a uniform vector costs the same
        _, costs = oracle.support_costs([0.25] * 4, 2, self.CFG)
        assert costs.max() - costs.min() <= 1e-12

    def test_full_support_zero_lambda(self):
        cfg = bd.DecodeConfig(generator=2, lam=0.0)
        _, cost = oracle.brute_force_best_support([0.5, 0.3, 0.2], 3, cfg)
        assert cost == pytest.approx(0.0, abs=1e-12)

    def test_size_guard(self):
        with pytest.raises(bd.SizeError):
            oracle.brute_force_best_support(np.full(13, 1 / 13), 2, self.CFG)

    def test_batched_matches_single(self):
        rng = np.random.default_rng(0)
        Z = rng.random((5, 6))
        P = Z / Z.sum(axis=1, keepdims=True)
        for mode, alpha in (("primal", 3.0), ("dual", 1.5)):
            cfg = bd.DecodeConfig(generator=alpha, mode=mode, lam=0.01)
            supports, costs = oracle.support_costs_many(P, 3, cfg)
            for i in range(5):
                s_one, c_one = oracle.support_costs(P[i], 3, cfg)
                np.testing.assert_array_equal(supports, s_one)
                np.testing.assert_allclose(costs[i], c_one, atol=1e-12)


class TestLinearScan:
    def test_worked_example(self):
        cfg = bd.DecodeConfig(generator=2, lam=0.05)
        assert oracle.linear_scan_k_star([0.6, 0.3, 0.1], cfg) == (
            2,
            pytest.approx(0.1075, abs=1e-12),
        )

    def test_zero_lambda(self):
        cfg = bd.DecodeConfig(generator=2, lam=0.0)
        k, cost = oracle.linear_scan_k_star([0.4, 0.35, 0.25], cfg)
        assert k == 3
        assert cost == pytest.approx(0.0, abs=1e-12)

    def test_huge_lambda(self):
        cfg = bd.DecodeConfig(generator=2, lam=10.0)
        k, _ = oracle.linear_scan_k_star([0.4, 0.35, 0.25], cfg)
        assert k == 1

    def test_agrees_with_fast_search(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            p = rng.random(9)
            p /= p.sum()
            cfg = bd.DecodeConfig(generator=1.5, lam=float(10 ** rng.uniform(-3, -1)))
            k_oracle, c_oracle = oracle.linear_scan_k_star(p, cfg)
            k_fast = bd.find_k_star(p, cfg)
            assert bd.cost_at_k(p, k_fast, cfg)[0] == pytest.approx(c_oracle, abs=1e-10)


class TestNuGridScan:
    def test_primal_worked_example(self):
        nu = oracle.nu_grid_scan(bd.alpha_entropy(3), [0.4, 0.2], "primal", 1e-7)
        assert nu == pytest.approx(0.0768, abs=2e-7)

    def test_dual_worked_example(self):
        nu = oracle.nu_grid_scan(bd.alpha_entropy(2), [0.4, 0.2], "dual", 1e-6)
        assert nu == pytest.approx(0.2, abs=2e-6)

    def test_on_simplex_input(self):
        nu = oracle.nu_grid_scan(bd.alpha_entropy(2), [0.7, 0.3], "dual", 1e-4)
        assert nu == pytest.approx(0.0, abs=2e-4)

    def test_dual_validity_gate(self):
        with pytest.raises(bd.GeneratorError):
            oracle.nu_grid_scan(bd.shannon(), [0.4, 0.2], "dual", 1e-4)

    def test_sign_change_counter(self):
        assert oracle._count_sign_changes(np.array([-1.0, -0.5, 0.5, 1.0])) == 1
        assert oracle._count_sign_changes(np.array([-1.0, 1.0, -1.0])) == 2
        assert oracle._count_sign_changes(np.array([1.0, 2.0])) == 0
        assert oracle._count_sign_changes(np.array([-1.0, 0.0, 1.0])) == 1
