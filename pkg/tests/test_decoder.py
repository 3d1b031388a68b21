"""Decoder: selection, cost curve, k* search, sampling, batch surface."""

import numpy as np
import pytest

import bregman_decoding as bd
from bregman_decoding import generators as gens


def random_simplex(rng, V):
    p = rng.random(V)
    return p / p.sum()


class TestSelectTopK:
    def test_basic(self):
        values, idx = bd.select_top_k([0.1, 0.6, 0.3], 2)
        np.testing.assert_array_equal(values, [0.6, 0.3])
        np.testing.assert_array_equal(idx, [1, 2])

    def test_tie_breaks_to_lowest_index(self):
        values, idx = bd.select_top_k([0.25, 0.25, 0.5], 2)
        np.testing.assert_array_equal(values, [0.5, 0.25])
        np.testing.assert_array_equal(idx, [2, 0])

    def test_singleton(self):
        values, idx = bd.select_top_k([1.0], 1)
        np.testing.assert_array_equal(values, [1.0])
        np.testing.assert_array_equal(idx, [0])

    def test_many_ties(self):
        values, idx = bd.select_top_k([0.2, 0.2, 0.2, 0.2, 0.2], 3)
        np.testing.assert_array_equal(idx, [0, 1, 2])

    def test_matches_stable_full_sort(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            V = int(rng.integers(1, 40))
            p = rng.integers(0, 6, V) / 10.0  # plenty of exact ties
            k = int(rng.integers(1, V + 1))
            _, idx = bd.select_top_k(p, k)
            full = np.lexsort((np.arange(V), -p))[:k]
            np.testing.assert_array_equal(idx, full)

    def test_range_error(self):
        with pytest.raises(bd.RangeError):
            bd.select_top_k([0.5, 0.5], 3)
        with pytest.raises(bd.RangeError):
            bd.select_top_k([0.5, 0.5], 0)


class TestCostAtK:
    CFG = bd.DecodeConfig(generator=2, lam=0.05)

    def test_worked_example(self):
        p = [0.6, 0.3, 0.1]
        c2, rr = bd.cost_at_k(p, 2, self.CFG)
        assert c2 == pytest.approx(0.1075, abs=1e-12)
        np.testing.assert_allclose(rr.probs, [0.65, 0.35], atol=1e-12)
        c3, _ = bd.cost_at_k(p, 3, self.CFG)
        assert c3 == pytest.approx(0.15, abs=1e-12)
        c1, _ = bd.cost_at_k(p, 1, self.CFG)
        assert c1 == pytest.approx(0.18, abs=1e-12)

    @pytest.mark.parametrize("alpha,mode", [
        ("shannon", "primal"), (1.5, "primal"), (2.0, "primal"),
        (3.0, "primal"), (0.5, "primal"), (2.0, "dual"), (3.0, "dual"),
    ])
    def test_closed_and_generic_heads_match_direct_divergence(self, alpha, mode):
        """cost(k) must equal a from-scratch divergence sum: renormalize the
        kept entries, pad with zeros, and add up pointwise divergences."""
        rng = np.random.default_rng(17)
        g = bd.generator_from_alpha(alpha)
        cfg = bd.DecodeConfig(generator=g, mode=mode, lam=0.03)
        for _ in range(15):
            V = int(rng.integers(2, 30))
            p = random_simplex(rng, V)
            k = int(rng.integers(1, V + 1))
            cost, rr = bd.cost_at_k(p, k, cfg)
            values, _ = bd.select_top_k(p, k)
            tail = np.sort(p)[::-1][k:]
            if mode == "primal":
                direct = bd.bregman_div(g, rr.probs, values).sum()
                direct += sum(
                    bd.bregman_div(g, 0.0, float(t)) if t > 0 else 0.0 for t in tail
                )
            else:
                direct = bd.bregman_div(g, values, rr.probs).sum()
                direct += bd.bregman_div(g, tail, np.zeros_like(tail)).sum()
            direct += cfg.lam * k
            assert cost == pytest.approx(direct, abs=1e-10)

    def test_range_error(self):
        with pytest.raises(bd.RangeError):
            bd.cost_at_k([0.6, 0.4], 3, self.CFG)

    def test_endpoint_is_pure_penalty(self):
        # at k = V the divergence vanishes, leaving lam * V exactly
        rng = np.random.default_rng(3)
        for alpha, mode in ((2, "primal"), (1.5, "primal"), (3, "dual")):
            cfg = bd.DecodeConfig(generator=alpha, mode=mode, lam=0.0125)
            p = random_simplex(rng, 80)
            cost, _ = bd.cost_at_k(p, 80, cfg)
            assert cost == pytest.approx(0.0125 * 80, abs=1e-9)


class TestFindKStar:
    def test_worked_example(self):
        assert bd.find_k_star([0.6, 0.3, 0.1], bd.DecodeConfig(generator=2, lam=0.05)) == 2

    def test_heavy_penalty_collapses_to_one(self):
        cfg = bd.DecodeConfig(generator=2, lam=1.0)
        assert bd.find_k_star([0.25] * 4, cfg) == 1

    def test_zero_penalty_keeps_everything(self):
        rng = np.random.default_rng(5)
        p = random_simplex(rng, 23)
        for search in ("binary", "exponential", "linear"):
            cfg = bd.DecodeConfig(generator=1.5, lam=0.0, search=search)
            assert bd.find_k_star(p, cfg) == 23

    def test_strategies_agree_on_cost(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            V = int(rng.integers(2, 60))
            p = random_simplex(rng, V)
            alpha = rng.choice([1.0, 1.5, 2.0, 3.0])
            lam = float(10 ** rng.uniform(-4, -0.5))
            ks = {}
            for search in ("binary", "exponential", "linear"):
                cfg = bd.DecodeConfig(generator=float(alpha), lam=lam, search=search)
                k = bd.find_k_star(p, cfg)
                ks[search] = bd.cost_at_k(p, k, cfg)[0]
            vals = list(ks.values())
            assert max(vals) - min(vals) <= 1e-10

    def test_k_max_caps_the_search(self):
        rng = np.random.default_rng(7)
        p = random_simplex(rng, 50)
        cfg = bd.DecodeConfig(generator=2, lam=0.0, k_max=7)
        res = bd.decode(p, cfg)
        assert res.k_star == 7
        assert res.k_cap == 7
        assert res.k_star == res.k_cap  # saturation is visible to callers

    def test_lambda_monotonicity(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            p = random_simplex(rng, 40)
            ks = [
                bd.find_k_star(p, bd.DecodeConfig(generator=1.5, lam=lam))
                for lam in (1e-4, 1e-3, 1e-2, 1e-1)
            ]
            assert all(a >= b for a, b in zip(ks, ks[1:]))


class TestDecode:
    def test_permuted_worked_example(self):
        res = bd.decode([0.1, 0.6, 0.3], bd.DecodeConfig(generator=2, lam=0.05))
        assert res.k_star == 2
        np.testing.assert_array_equal(res.support, [1, 2])
        np.testing.assert_allclose(res.support_probs, [0.65, 0.35], atol=1e-12)
        np.testing.assert_allclose(res.sparse_probs, [0.0, 0.65, 0.35], atol=1e-12)
        assert res.nu == pytest.approx(0.05, abs=1e-12)

    def test_dual_coincides_at_alpha_two(self):
        primal = bd.decode([0.6, 0.3, 0.1], bd.DecodeConfig(generator=2, lam=0.05))
        dual = bd.decode([0.6, 0.3, 0.1], bd.DecodeConfig(generator=2, mode="dual", lam=0.05))
        assert primal.k_star == dual.k_star
        np.testing.assert_allclose(primal.sparse_probs, dual.sparse_probs, atol=1e-9)

    def test_point_mass(self):
        res = bd.decode([1.0, 0.0, 0.0], bd.DecodeConfig(generator=2, lam=0.05))
        assert res.k_star == 1
        np.testing.assert_array_equal(res.sparse_probs, [1.0, 0.0, 0.0])

    def test_zero_lambda_identity(self):
        rng = np.random.default_rng(9)
        p = random_simplex(rng, 31)
        res = bd.decode(p, bd.DecodeConfig(generator=2, lam=0.0))
        assert res.k_star == 31
        np.testing.assert_allclose(res.sparse_probs, p, atol=1e-10)

    def test_binary_search_evaluation_budget(self):
        rng = np.random.default_rng(10)
        for V in (2, 5, 17, 100, 1000):
            p = random_simplex(rng, V)
            cfg = bd.DecodeConfig(generator=2, lam=1e-3, search="binary")
            res = bd.decode(p, cfg, collect_cost_curve=True)
            budget = 2 * int(np.ceil(np.log2(V))) + 4
            assert len(res.cost_curve) <= budget

    def test_cost_curve_entries_match_cost_at_k(self):
        cfg = bd.DecodeConfig(generator=1.5, lam=0.01)
        p = [0.4, 0.3, 0.2, 0.1]
        res = bd.decode(p, cfg, collect_cost_curve=True)
        for k, c in res.cost_curve:
            assert c == pytest.approx(bd.cost_at_k(p, k, cfg)[0], abs=1e-12)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(11)
        P = np.vstack([random_simplex(rng, 40) for _ in range(16)])
        for cfg in (
            bd.DecodeConfig(generator=2, lam=1e-3),
            bd.DecodeConfig(generator=3, lam=1e-3),
            bd.DecodeConfig(generator=1.5, mode="primal", lam=1e-2, search="exponential"),
            bd.DecodeConfig(generator=2.5, mode="dual", lam=1e-3),
        ):
            batch = bd.decode_batch(P, cfg)
            for i, res in enumerate(batch):
                single = bd.decode(P[i], cfg)
                assert res.k_star == single.k_star
                np.testing.assert_array_equal(res.support, single.support)
                np.testing.assert_allclose(
                    res.support_probs, single.support_probs, atol=1e-12
                )

    def test_cost_curve_batch_matches_cost_at_k(self):
        rng = np.random.default_rng(12)
        P = np.vstack([random_simplex(rng, 12) for _ in range(6)])
        for mode, alpha in (("primal", 5.0), ("dual", 1.5)):
            cfg = bd.DecodeConfig(generator=alpha, mode=mode, lam=0.01)
            curves = bd.cost_curve_batch(P, cfg)
            for i in range(P.shape[0]):
                for k in range(1, 13):
                    assert curves[i, k - 1] == pytest.approx(
                        bd.cost_at_k(P[i], k, cfg)[0], abs=1e-10
                    )

    def test_length_one_input(self):
        res = bd.decode([1.0], bd.DecodeConfig(generator=1.5, lam=0.2))
        assert res.k_star == 1
        np.testing.assert_array_equal(res.sparse_probs, [1.0])


class TestConfigValidation:
    def test_mode_generator_gates(self):
        with pytest.raises(bd.GeneratorError):
            bd.DecodeConfig(generator="shannon", mode="dual")
        with pytest.raises(bd.GeneratorError):
            bd.DecodeConfig(generator=0.5, mode="dual")
        with pytest.raises(bd.GeneratorError):
            bd.DecodeConfig(generator="inf", mode="primal")
        with pytest.raises(bd.GeneratorError):
            bd.DecodeConfig(generator=-1.0, mode="primal")

    def test_scalar_gates(self):
        with pytest.raises(bd.InputError):
            bd.DecodeConfig(lam=-0.1)
        with pytest.raises(bd.InputError):
            bd.DecodeConfig(search="ternary")
        with pytest.raises(bd.InputError):
            bd.DecodeConfig(k_max=0)
        with pytest.raises(bd.InputError):
            bd.DecodeConfig(temperature=0.0)
        with pytest.raises(bd.InputError):
            bd.DecodeConfig(mode="both")

    def test_input_tolerance(self):
        cfg = bd.DecodeConfig(generator=2, lam=0.0)
        bd.decode([0.6, 0.4 + 5e-7], cfg)  # inside the 1e-6 ingest window
        with pytest.raises(bd.InputError):
            bd.decode([0.6, 0.41], cfg)
        with pytest.raises(bd.InputError):
            bd.decode([0.6, float("nan")], cfg)


class TestLogitsToProbs:
    def test_uniform(self):
        np.testing.assert_allclose(
            bd.logits_to_probs([0.0, 0.0, 0.0]), np.full(3, 1 / 3), atol=1e-15
        )

    def test_worked_example(self):
        np.testing.assert_allclose(
            bd.logits_to_probs([2.0, 1.0, 0.0]),
            [0.66524, 0.24473, 0.09003],
            atol=1e-5,
        )

    def test_high_temperature_flattens(self):
        p = bd.logits_to_probs([2.0, 1.0, 0.0], temperature=1e6)
        np.testing.assert_allclose(p, np.full(3, 1 / 3), atol=1e-6)

    def test_stability_with_large_logits(self):
        p = bd.logits_to_probs([1000.0, 999.0, 0.0])
        assert np.all(np.isfinite(p))
        assert p.sum() == pytest.approx(1.0, abs=1e-12)

    def test_errors(self):
        with pytest.raises(bd.InputError):
            bd.logits_to_probs([1.0, float("inf")])
        with pytest.raises(bd.InputError):
            bd.logits_to_probs([1.0, 2.0], temperature=-1.0)


class TestSampling:
    def _result(self, probs):
        return bd.decode(probs, bd.DecodeConfig(generator=2, lam=0.0))

    def test_deterministic_support(self):
        res = self._result([0.0, 1.0, 0.0])
        assert all(bd.sample(res, seed) == 1 for seed in range(20))

    def test_seed_reproducibility(self):
        res = self._result([0.5, 0.5])
        draws_a = bd.sample_many(res, 100, 42)
        draws_b = bd.sample_many(res, 100, 42)
        np.testing.assert_array_equal(draws_a, draws_b)
        assert bd.sample(res, 5) == bd.sample(res, 5)

    def test_empirical_frequency(self):
        res = bd.decode([0.6, 0.3, 0.1], bd.DecodeConfig(generator=2, lam=0.05))
        draws = bd.sample_many(res, 100_000, 7)
        freq0 = np.mean(draws == 0)
        assert 0.645 <= freq0 <= 0.655
        assert not np.any(draws == 2)  # off-support index never drawn


def test_renormalize_dispatch():
    x = [0.3, 0.2]
    np.testing.assert_allclose(
        bd.renormalize(2, x, mode="primal").probs, [0.55, 0.45], atol=1e-12
    )
    d = bd.renormalize(2, x, mode="dual")
    np.testing.assert_allclose(d.probs, [0.55, 0.45], atol=1e-9)
    with pytest.raises(bd.InputError):
        bd.renormalize(2, x, mode="sideways")


def test_top_k_renormalize():
    support, probs, nu = bd.top_k_renormalize([0.5, 0.25, 0.25], 2, 1.0)
    np.testing.assert_array_equal(support, [0, 1])
    np.testing.assert_allclose(probs, [2 / 3, 1 / 3], atol=1e-12)
    support, probs, nu = bd.top_k_renormalize([0.5, 0.25, 0.25], 2, "inf")
    np.testing.assert_allclose(probs, [0.5, 0.5], atol=1e-15)
    assert nu == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(bd.RangeError):
        bd.top_k_renormalize([0.5, 0.5], 3, 2.0)
