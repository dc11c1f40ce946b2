import math

import numpy as np
import pytest
from scipy import stats

from subrates import subordinators as S
from subrates.errors import ConstructionError, DomainError

N = 100_000


def four_se(x):
    return 4.0 * np.std(x, ddof=1) / math.sqrt(x.size)


SAMPLERS = [
    S.SubordinatorSampler.stable(0.5, 1.0, seed=11),
    S.SubordinatorSampler.stable(0.7, 2.0, seed=12),
    S.SubordinatorSampler.gamma(1.5, 2.0, seed=13),
    S.SubordinatorSampler.compound_poisson_drift(0.5, 2.0, seed=14),
    S.SubordinatorSampler.compound_poisson_drift(0.0, 1.0, jumps="unit", seed=15),
]


class TestLaplace:
    @pytest.mark.parametrize("sampler", SAMPLERS, ids=lambda s: f"{s.family}-{s.seed}")
    def test_grid(self, sampler):
        for t in (0.5, 1.0, 3.0):
            draws = sampler.draws(t, N)
            for u in (0.3, 1.0, 3.0):
                x = np.exp(-u * draws)
                assert abs(x.mean() - math.exp(-t * sampler.phi(u))) <= four_se(x)

    def test_stable_unit(self, unit_stable):
        x = np.exp(-unit_stable.sample(1.0, N).values)
        assert abs(x.mean() - math.exp(-1.0)) <= four_se(x)

    def test_monotone_in_t(self, unit_stable):
        means = []
        for t in (0.5, 1.0, 2.0, 4.0):
            x = np.exp(-unit_stable.sample(t, N, stream_id=int(t * 10)).values)
            means.append((x.mean(), 3.0 * np.std(x) / math.sqrt(N)))
        for (m1, e1), (m2, e2) in zip(means, means[1:]):
            assert m2 <= m1 + e1 + e2


class TestStable:
    def test_self_similarity(self, unit_stable):
        s4 = unit_stable.sample(4.0, 10_000, stream_id=1).values
        s1 = unit_stable.sample(1.0, 10_000, stream_id=2).values
        assert stats.ks_2samp(s4, 16.0 * s1).pvalue > 0.01

    def test_log_growth(self, unit_stable):
        a = np.log1p(unit_stable.sample(1.0, 10_000, 1).values).mean()
        b = np.log1p(unit_stable.sample(4.0, 10_000, 2).values).mean()
        assert b > a

    def test_bad_alpha(self):
        with pytest.raises(DomainError):
            S.sample_stable(1.5, 1.0, 1.0, 10, seed=0)
        with pytest.raises(DomainError):
            S.SubordinatorSampler.stable(0.0)
        with pytest.raises(ConstructionError):
            S.SubordinatorSampler("tempered", {})

    def test_levy_constant_round_trip(self):
        c = S.scale_to_levy_constant(1.0, 0.5)
        assert c == pytest.approx(0.5 / math.gamma(0.5))
        assert S.levy_constant_to_scale(c, 0.5) == pytest.approx(1.0)
        s = S.SubordinatorSampler.stable_from_levy_constant(0.5, c)
        assert s.params["scale"] == pytest.approx(1.0)

    def test_density_bound_limits(self):
        assert S.stable_density_bound(0.5, None, 1.0, 1e12) < 1e-15
        assert S.stable_density_bound(0.5, None, 1.0, 1e-6) == 0.0

    def test_density_constant(self, unit_stable):
        draws = unit_stable.sample(1.0, 1_000_000).values
        grid = np.geomspace(0.01, 100.0, 40)
        C = S.fit_density_constant(draws, 0.5, 1.0, grid)
        kde = S.density_estimate(draws, grid)
        assert np.isfinite(C) and C > 0.0
        assert np.all(kde <= C * S.stable_density_bound(0.5, None, 1.0, grid) * (1.0 + 1e-12))


class TestGamma:
    def test_mean(self):
        x = S.sample_gamma(1.0, 1.0, 1.0, N, seed=3).values
        assert abs(x.mean() - 1.0) <= four_se(x)

    def test_laplace_closed_form(self):
        x = S.sample_gamma(1.0, 1.0, 2.0, N, seed=4).values
        y = np.exp(-0.5 * x)
        assert abs(y.mean() - 1.5 ** (-2.0)) <= four_se(y)


class TestCompoundPoisson:
    def test_jump_count(self):
        batch = S.sample_compound_poisson_drift(0.0, 3.0, S.unit_jumps(), 2.0, N, seed=5)
        assert abs(batch.values.mean() - 6.0) <= four_se(batch.values)

    def test_unit_jumps_laplace(self):
        x = S.sample_compound_poisson_drift(0.0, 1.0, S.unit_jumps(), 1.0, N, seed=6).values
        y = np.exp(-2.0 * x)
        assert abs(y.mean() - math.exp(-(1.0 - math.exp(-2.0)))) <= four_se(y)

    def test_deterministic(self):
        d = S.SubordinatorSampler.deterministic(1.0)
        assert d.is_deterministic
        np.testing.assert_array_equal(d.draws(2.5, 100), np.full(100, 2.5))

    def test_negative_drift(self):
        with pytest.raises(DomainError):
            S.sample_compound_poisson_drift(-1.0, 1.0, S.unit_jumps(), 1.0, 10, seed=0)


class TestReproducibility:
    @pytest.mark.parametrize("sampler", SAMPLERS, ids=lambda s: f"{s.family}-{s.seed}")
    def test_determinism(self, sampler):
        np.testing.assert_array_equal(sampler.sample(1.0, 500, 3).values, sampler.sample(1.0, 500, 3).values)

    @pytest.mark.parametrize("sampler", SAMPLERS[:3], ids=lambda s: f"{s.family}-{s.seed}")
    def test_prefix_stability(self, sampler):
        a = sampler.sample(1.0, 1000).values
        b = sampler.sample(1.0, 5000).values
        np.testing.assert_array_equal(a, b[:1000])

    def test_streams_disjoint(self, unit_stable):
        a = unit_stable.sample(1.0, 100, 0).values
        b = unit_stable.sample(1.0, 100, 1).values
        assert not np.any(a == b)

    def test_parallel_matches_serial(self, unit_stable):
        np.testing.assert_array_equal(unit_stable.draws(1.0, 10_000, streams=4, workers=4),
                                      unit_stable.draws(1.0, 10_000, streams=4, workers=1))

    @pytest.mark.parametrize("sampler", SAMPLERS, ids=lambda s: f"{s.family}-{s.seed}")
    def test_positivity(self, sampler):
        assert np.all(sampler.draws(0.7, 10_000) >= 0.0)

    def test_t_zero(self, unit_stable):
        np.testing.assert_array_equal(unit_stable.sample(0.0, 10).values, np.zeros(10))

    def test_csv(self, tmp_path, unit_stable):
        b = unit_stable.sample(1.0, 5)
        b.to_csv(tmp_path / "a.csv")
        lines = (tmp_path / "a.csv").read_text().splitlines()
        assert lines[0] == "index,value" and len(lines) == 6
        assert float(lines[3].split(",")[1]) == b.values[2]
