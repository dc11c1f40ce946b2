import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subrates import bernstein as B
from subrates.errors import (
    ConstructionError,
    DomainError,
    FitError,
    MonotonicityError,
    RangeError,
)

ALL = [
    ("stable", {"alpha": 0.5}),
    ("log", {}),
    ("stable-log-plus", {"alpha": 0.3, "beta": 0.2}),
    ("stable-log-minus", {"alpha": 0.5, "beta": 0.2}),
    ("relativistic-like", {"alpha": 0.5}),
    ("gamma", {"a": 2.0, "b": 0.5}),
    ("compound-poisson-drift", {"drift": 0.5, "rate": 2.0}),
]
WITH_TRIPLET = [
    ("stable", {"alpha": 0.3, "scale": 2.0}),
    ("gamma", {"a": 1.5, "b": 2.0}),
    ("relativistic-like", {"alpha": 0.4}),
    ("compound-poisson-drift", {"drift": 0.25, "rate": 3.0, "jump_mean": 0.5}),
]


class TestEvaluate:
    def test_power_law(self):
        assert B.evaluate(B.catalog("stable", alpha=0.5), 4.0) == pytest.approx(2.0, rel=1e-15)

    def test_log_identity(self):
        assert B.evaluate(B.catalog("log"), math.e - 1.0) == pytest.approx(1.0, rel=1e-15)

    def test_triplet_only_stable(self):
        trip = B.LevyTriplet(0.0, lambda y: np.power(y, -1.5))
        phi = B.from_triplet(trip)
        assert B.evaluate(phi, 1.0) == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-8)

    def test_array_input(self):
        phi = B.catalog("stable", alpha=0.5)
        np.testing.assert_allclose(B.evaluate(phi, np.array([1.0, 4.0, 9.0])), [1.0, 2.0, 3.0])

    @pytest.mark.parametrize("u", [0.0, -1.0])
    def test_nonpositive_argument(self, u):
        with pytest.raises(DomainError):
            B.evaluate(B.catalog("log"), u)

    def test_bad_triplet_drift(self):
        with pytest.raises(ConstructionError):
            B.LevyTriplet(-1.0, lambda y: np.exp(-y))


class TestInvert:
    def test_power(self):
        assert B.invert(B.catalog("stable", alpha=0.5), 2.0) == pytest.approx(4.0, rel=1e-12)

    def test_log(self):
        assert B.invert(B.catalog("log"), 1.0) == pytest.approx(math.e - 1.0, rel=1e-12)

    def test_round_trip_stable_log(self):
        phi = B.catalog("stable-log-plus", alpha=0.3, beta=0.2)
        u = B.invert(phi, 0.7, tol=1e-12)
        assert abs(B.evaluate(phi, u) - 0.7) <= 1e-12

    def test_bounded_range(self):
        phi = B.catalog("compound-poisson-drift", drift=0.0, rate=1.0)
        with pytest.raises(RangeError):
            B.invert(phi, 2.0)

    @pytest.mark.parametrize("name,params", ALL)
    def test_round_trip_catalog(self, name, params):
        phi = B.catalog(name, params)
        for v in np.geomspace(1e-3, 50.0, 12):
            u = B.invert(phi, v, tol=1e-12)
            assert abs(B.evaluate(phi, u) - v) <= 1e-12 * max(1.0, v)


class TestCatalog:
    def test_log_family(self):
        phi = B.catalog("log")
        assert phi(3.0) == pytest.approx(math.log(4.0))

    def test_relativistic(self):
        phi = B.catalog("relativistic-like", alpha=0.5)
        assert phi(3.0) == pytest.approx(3.0 / 2.0)

    def test_stable_levy_constant(self):
        phi = B.catalog("stable", alpha=0.5, scale=1.0)
        assert phi.triplet.descriptor["c"] == pytest.approx(0.5 / math.gamma(0.5))

    def test_underscore_alias(self):
        assert B.catalog("stable_log_plus", alpha=0.5, beta=0.1).name == "stable-log-plus"

    @pytest.mark.parametrize(
        "name,params",
        [("nope", {}), ("stable", {"alpha": 1.2}), ("stable-log-plus", {"alpha": 0.5, "beta": 0.6}),
         ("gamma", {"a": -1.0}), ("compound-poisson-drift", {"drift": 0.0, "rate": 0.0})],
    )
    def test_rejects(self, name, params):
        with pytest.raises(ConstructionError):
            B.catalog(name, params)

    def test_constant_rejected(self):
        with pytest.raises(ConstructionError):
            B.BernsteinFunction(lambda u: np.ones_like(np.asarray(u, dtype=float)))

    @pytest.mark.parametrize("name,params", WITH_TRIPLET)
    def test_triplet_consistency(self, name, params):
        phi = B.catalog(name, params)
        for u in np.geomspace(1e-4, 1e4, 17):
            assert B.levy_khintchine(phi.triplet, u) == pytest.approx(phi(u), rel=1e-8)

    @pytest.mark.parametrize("name,params", ALL)
    def test_monotone(self, name, params, geometric_grid):
        vals = B.evaluate(B.catalog(name, params), geometric_grid)
        assert np.all(np.diff(vals) > 0.0)

    @pytest.mark.parametrize("name,params", ALL)
    def test_concave(self, name, params):
        u = np.linspace(1e-3, 50.0, 64)
        vals = B.evaluate(B.catalog(name, params), u)
        assert np.max(np.diff(vals, 2)) <= 1e-10 * np.max(np.abs(vals))


class TestDiagnostics:
    def test_log_doubling(self):
        rep = B.condition_diagnostics(B.catalog("log"), 2.0)
        assert rep.doubling_liminf_proxy == pytest.approx(2.0, abs=1e-3)
        assert rep.verdict == "pass"

    def test_stable(self):
        rep = B.condition_diagnostics(B.catalog("stable", alpha=0.5), 2.0)
        assert rep.doubling_liminf_proxy == pytest.approx(math.sqrt(2.0))
        assert rep.ratio_log_liminf_proxy > 1.0
        assert rep.verdict == "pass"

    def test_pure_drift(self):
        phi = B.catalog("compound-poisson-drift", drift=1.0, rate=0.0)
        rep = B.condition_diagnostics(phi, 2.0)
        assert rep.doubling_liminf_proxy == pytest.approx(2.0)
        assert rep.verdict == "pass"

    def test_unknown_flag_inconclusive(self):
        phi = B.BernsteinFunction(lambda u: np.sqrt(u))
        assert B.condition_diagnostics(phi).verdict == "inconclusive"

    def test_bounded_fails(self):
        phi = B.catalog("compound-poisson-drift", drift=0.0, rate=1.0)
        assert B.condition_diagnostics(phi).verdict == "fail"

    def test_doubling_index_examples(self):
        grid = B.default_grid()
        assert B.doubling_index(np.sqrt, "infinity", 4.0, grid) == pytest.approx(2.0)
        assert B.doubling_index(np.log1p, "infinity", 2.0, grid) == pytest.approx(
            math.log1p(2e8) / math.log1p(1e8), rel=1e-12)
        assert B.doubling_index(lambda t: t, "zero", 3.0, grid) == pytest.approx(3.0)

    def test_doubling_index_monotonicity(self):
        with pytest.raises(MonotonicityError):
            B.doubling_index(np.cos, "zero", 2.0, np.linspace(0.1, 3.0, 10))

    def test_power_envelope(self):
        grid = B.default_grid()
        c, k = B.power_envelope(lambda t: 3.0 * t**0.7, "zero", grid)
        assert c == pytest.approx(3.0, abs=1e-6) and k == pytest.approx(0.7, abs=1e-6)
        _, k = B.power_envelope(lambda s: s**0.5 * np.log1p(s) ** 0.2, "zero", grid)
        assert k == pytest.approx(0.7, abs=2e-3)
        _, k = B.power_envelope(np.log1p, "zero", grid)
        assert k == pytest.approx(1.0, abs=1e-2)

    def test_power_envelope_degenerate(self):
        with pytest.raises(FitError):
            B.power_envelope(np.sqrt, "zero", np.ones(4))

    def test_inverse_doubling_bounded(self):
        grid = np.geomspace(1e-8, 1e-2, 40)
        for name, params in ALL:
            phi = B.catalog(name, params)
            if B.doubling_index(phi, "zero", 2.0, grid) > 1.05:
                lim = B.doubling_index(lambda v: np.array([B.invert(phi, x) for x in np.atleast_1d(v)]),
                                       "zero", 2.0, grid, mode="limsup")
                assert math.isfinite(lim) and lim < 100.0


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(0.2, 0.95), v=st.floats(1e-6, 1e6))
def test_invert_property(alpha, v):
    phi = B.catalog("stable", alpha=alpha)
    u = B.invert(phi, v)
    assert abs(phi(u) - v) <= 1e-12 * max(1.0, v)


def test_invert_doubling_budget():
    # 2^-200 bounds the bracket: (2^-200)^0.0625 ~ 1.7e-4 > 1e-6
    with pytest.raises(RangeError):
        B.invert(B.catalog("stable", alpha=0.0625), 1e-6)
