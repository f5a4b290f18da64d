import numpy as np
import pytest

from fhmix import (ChainConfig, Dataset, PriorConfig, SamplerError,
                   diagnostics, ess, fh_shrinkage, gelman_rubin,
                   outlier_probs, run_fh_chain, run_mixture_chain,
                   shrinkage_summary, summarize_areas, summarize_params)
from fhmix.gibbs import ChainOutput
from tests.conftest import make_data

PRIOR = PriorConfig(alpha1=0.3, alpha2=1.3)
CFG = ChainConfig(iterations=400, burn_in=100, thin=1, chains=2, seed=17)


def fh_output(theta, beta, a, seed=0):
    """Hand-built output; retained counts come from the arrays, so this
    can represent shorter runs than ChainConfig itself permits."""
    theta = np.asarray(theta, dtype=float)
    C, R, m = theta.shape
    cfg = ChainConfig(iterations=max(R, 100), burn_in=0, thin=1, chains=C, seed=seed)
    return ChainOutput(kind="fh", theta=theta, beta=np.asarray(beta, float),
                       config=cfg, area_ids=[str(i + 1) for i in range(m)],
                       a=np.asarray(a, float))


class TestSummarizeParams:
    def test_matches_numpy_stats(self, small_data):
        out = run_fh_chain(small_data, CFG)
        rows = {s.name: s for s in summarize_params(out)}
        pooled_a = out.pooled("a")
        assert rows["a"].mean == pytest.approx(float(np.mean(pooled_a)), rel=1e-12)
        assert rows["a"].sd == pytest.approx(float(np.std(pooled_a, ddof=1)), rel=1e-12)
        q = np.quantile(pooled_a, [0.025, 0.5, 0.975])
        assert rows["a"].q2_5 == pytest.approx(q[0], rel=1e-12)
        assert rows["a"].median == pytest.approx(q[1], rel=1e-12)
        assert rows["a"].q97_5 == pytest.approx(q[2], rel=1e-12)

    def test_row_order_mixture(self, small_data):
        out = run_mixture_chain(small_data, PRIOR, CFG)
        names = [s.name for s in summarize_params(out)]
        assert names == ["beta1", "beta2", "a1", "a2", "p"]

    def test_row_order_fh(self, small_data):
        out = run_fh_chain(small_data, CFG)
        assert [s.name for s in summarize_params(out)] == ["beta1", "beta2", "a"]

    def test_rejects_tiny_pools(self):
        rng = np.random.default_rng(0)
        out = fh_output(rng.normal(size=(1, 50, 3)), rng.normal(size=(1, 50, 1)),
                        rng.random((1, 50)) + 0.5)
        with pytest.raises(SamplerError, match="100"):
            summarize_params(out)


class TestAreaSummaries:
    def test_outlier_probs_are_label_frequencies(self, outlier_data):
        out = run_mixture_chain(outlier_data, PRIOR, CFG)
        probs = outlier_probs(out)
        expect = out.delta.reshape(-1, outlier_data.m).mean(axis=0)
        np.testing.assert_allclose(probs, expect, rtol=1e-12)
        assert np.all((probs >= 0) & (probs <= 1))

    def test_outlier_probs_need_mixture(self, small_data):
        out = run_fh_chain(small_data, CFG)
        with pytest.raises(SamplerError):
            outlier_probs(out)

    def test_fh_shrinkage_summary_closed_form(self, small_data):
        out = run_fh_chain(small_data, CFG)
        w = shrinkage_summary(out, small_data)
        a = out.pooled("a")
        expect = fh_shrinkage(small_data.d_var[None, :], a[:, None]).mean(axis=0)
        np.testing.assert_allclose(w, expect, rtol=1e-12)

    def test_mixture_shrinkage_between_component_weights(self, outlier_data):
        out = run_mixture_chain(outlier_data, PRIOR, CFG)
        w = shrinkage_summary(out, outlier_data)
        d = outlier_data.d_var
        b_wide = fh_shrinkage(d[None, :], out.pooled("a2")[:, None]).mean(axis=0)
        b_narrow = fh_shrinkage(d[None, :], out.pooled("a1")[:, None]).mean(axis=0)
        assert np.all(w <= b_narrow + 1e-12)
        assert np.all(w >= b_wide - 1e-12)

    def test_summarize_areas_fields(self, outlier_data):
        out = run_mixture_chain(outlier_data, PRIOR, CFG)
        rows = summarize_areas(out, outlier_data)
        assert len(rows) == outlier_data.m
        th = out.pooled("theta")
        assert rows[0].theta_mean == pytest.approx(float(th[:, 0].mean()), rel=1e-12)
        assert rows[0].theta_sd == pytest.approx(float(th[:, 0].std(ddof=1)), rel=1e-12)
        assert rows[0].area_id == outlier_data.area_ids[0]
        fh_rows = summarize_areas(run_fh_chain(outlier_data, CFG), outlier_data)
        assert fh_rows[0].outlier_prob is None


class TestEss:
    def test_white_noise_near_n(self):
        rng = np.random.default_rng(31)
        x = rng.standard_normal(4000)
        assert ess(x) == pytest.approx(4000, rel=0.2)

    def test_ar1_known_efficiency(self):
        # AR(1) with phi = 0.9: ESS/n -> (1 - phi)/(1 + phi) = 1/19
        rng = np.random.default_rng(32)
        n, phi = 200_000, 0.9
        eps = rng.standard_normal(n)
        x = np.empty(n)
        x[0] = eps[0] / np.sqrt(1 - phi**2)
        for i in range(1, n):
            x[i] = phi * x[i - 1] + eps[i]
        assert ess(x) == pytest.approx(n * (1 - phi) / (1 + phi), rel=0.3)

    def test_constant_series(self):
        assert ess(np.ones(500)) == 500

    def test_short_series_rejected(self):
        with pytest.raises(SamplerError):
            ess(np.ones(3))


class TestGelmanRubin:
    def test_identical_means_near_one(self):
        rng = np.random.default_rng(33)
        chains = rng.standard_normal((4, 5000))
        r = gelman_rubin(chains)
        assert r == pytest.approx(1.0, abs=0.01)

    def test_shifted_chains_flagged(self):
        rng = np.random.default_rng(34)
        chains = rng.standard_normal((2, 1000))
        chains[1] += 5.0
        assert gelman_rubin(chains) > 1.1

    def test_single_chain_is_nan(self):
        assert np.isnan(gelman_rubin(np.zeros((1, 200)) + np.arange(200)))

    def test_matches_hand_formula(self):
        rng = np.random.default_rng(35)
        chains = rng.standard_normal((3, 400)) + np.array([[0.0], [0.1], [-0.05]])
        n = chains.shape[1]
        W = chains.var(axis=1, ddof=1).mean()
        B = n * chains.mean(axis=1).var(ddof=1)
        expect = np.sqrt(((n - 1) / n * W + B / n) / W)
        assert gelman_rubin(chains) == pytest.approx(expect, rel=1e-12)


class TestDiagnostics:
    def test_structure_and_flags(self, small_data):
        out = run_mixture_chain(small_data, PRIOR, CFG)
        rows = diagnostics(out)
        names = [d.name for d in rows]
        assert names == ["beta1", "beta2", "a1", "a2", "p"]
        for d in rows:
            assert d.ess > 0
            assert d.flagged == (d.rhat > 1.1)

    def test_single_chain_rhat_nan(self, small_data):
        cfg = ChainConfig(iterations=300, burn_in=100, thin=1, chains=1, seed=3)
        rows = diagnostics(run_fh_chain(small_data, cfg))
        assert all(np.isnan(d.rhat) for d in rows)
        assert all(not d.flagged for d in rows)
