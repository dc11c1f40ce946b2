import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subrates import ratecalc as R
from subrates.errors import ConstructionError, DomainError, RangeError


@pytest.fixture
def sqrt_driver():
    return R.ConcaveRateDriver.power(2.0, 0.5)


class TestDriver:
    def test_identity_accepted(self):
        d = R.ConcaveRateDriver.custom(lambda x: x)
        assert d(3.0) == 3.0 and not d.vanishing_slope()

    def test_vanishing_slope(self, sqrt_driver):
        assert sqrt_driver.vanishing_slope()
        assert R.ConcaveRateDriver.log_linear(1.0, 1.0).vanishing_slope()

    def test_rejects_zero(self):
        with pytest.raises(ConstructionError):
            R.ConcaveRateDriver.custom(lambda x: np.zeros_like(x))

    def test_rejects_convex(self):
        with pytest.raises(ConstructionError):
            R.ConcaveRateDriver.custom(lambda x: x**1.5)

    def test_rejects_decreasing(self):
        with pytest.raises(ConstructionError):
            R.ConcaveRateDriver.custom(lambda x: 1.0 / x)

    def test_parameter_ranges(self):
        with pytest.raises(ConstructionError):
            R.ConcaveRateDriver.power(1.0, 1.0)
        with pytest.raises(ConstructionError):
            R.ConcaveRateDriver.log_linear(1.0, 0.0)


class TestH:
    def test_identity(self):
        assert R.H(R.ConcaveRateDriver.custom(lambda x: x), math.e) == pytest.approx(1.0, rel=1e-12)

    def test_sqrt(self, sqrt_driver):
        assert R.H(sqrt_driver, 4.0) == pytest.approx(1.0, rel=1e-14)
        assert R.H(sqrt_driver, 1.0) == 0.0

    def test_inverse_examples(self, sqrt_driver):
        assert R.H_inverse(sqrt_driver, 1.0) == pytest.approx(4.0, rel=1e-14)
        assert R.H_inverse(R.ConcaveRateDriver.custom(lambda x: x), 1.0) == pytest.approx(math.e, rel=1e-12)
        assert R.H_inverse(sqrt_driver, 0.0) == 1.0

    def test_log_linear_closed_form_matches_quadrature(self):
        closed = R.ConcaveRateDriver.log_linear(1.5, 2.0)
        num = R.ConcaveRateDriver.custom(lambda x: 1.5 * x * (3.0 + np.log(x)) ** -2.0)
        for u in (2.0, 50.0, 1e6):
            assert R.H(num, u) == pytest.approx(R.H(closed, u), rel=1e-10)

    @pytest.mark.parametrize("driver", [
        R.ConcaveRateDriver.power(2.0, 0.5),
        R.ConcaveRateDriver.log_linear(1.0, 1.0),
        R.ConcaveRateDriver.custom(lambda x: np.sqrt(x) * np.log(np.e + x)),
    ], ids=["power", "log-linear", "custom"])
    @pytest.mark.parametrize("t", [0.0, 0.3, 5.0, 200.0])
    def test_round_trip(self, driver, t):
        assert abs(R.H(driver, R.H_inverse(driver, t)) - t) <= 1e-9 * max(1.0, t)

    def test_overflow(self):
        d = R.ConcaveRateDriver.log_linear(1.0, 1.0)
        assert R.log_H_inverse(d, 1e7) > 709.0
        with pytest.raises(RangeError):
            R.H_inverse(d, 1e7)

    def test_domain(self, sqrt_driver):
        with pytest.raises(DomainError):
            R.H(sqrt_driver, 0.5)
        with pytest.raises(DomainError):
            R.H_inverse(sqrt_driver, -1.0)


@settings(max_examples=50, deadline=None)
@given(c=st.floats(0.1, 10.0), k=st.floats(0.05, 0.95), t=st.floats(0.0, 1e4))
def test_power_round_trip(c, k, t):
    d = R.ConcaveRateDriver.power(c, k)
    assert abs(R.H(d, R.H_inverse(d, t)) - t) <= 1e-9 * max(1.0, t)


class TestRates:
    def test_monotone_unit_interval(self, sqrt_driver):
        r = [R.drift_rate(sqrt_driver, 0.5, t) for t in np.geomspace(1e-3, 1e6, 40)]
        assert np.all(np.diff(r) <= 0.0)
        assert all(0.0 < v <= 1.0 for v in r)

    def test_t_zero(self, sqrt_driver):
        assert R.drift_rate(sqrt_driver, 0.5, 0.0) == pytest.approx(min(1.0, 2.0**-0.5))

    def test_monotone_in_q(self, sqrt_driver):
        vals = [R.drift_rate(sqrt_driver, q, 100.0) for q in (0.2, 0.5, 0.8)]
        assert vals[0] > vals[1] > vals[2]

    def test_log_rate_no_underflow(self):
        d = R.ConcaveRateDriver.log_linear(1.0, 1.0)
        lr = R.drift_log_rate(d, 0.5, 1e7)
        assert math.isfinite(lr) and lr < -300.0

    def test_q_range(self, sqrt_driver):
        with pytest.raises(DomainError):
            R.drift_rate(sqrt_driver, 1.0, 1.0)

    @pytest.mark.parametrize("C1", [0.5, 1.0, 4.0])
    @pytest.mark.parametrize("m,beta", [(1.0, 0.5), (2.0, 1.0), (0.5, 2.0)])
    def test_power_driver_closed_form(self, C1, m, beta):
        driver, q = R.prop1_driver(C1, m, beta)
        for t in (0.0, 1.0, 10.0, 1e3, 1e5):
            assert R.drift_rate(driver, q, t) == pytest.approx(R.prop1_closed_form(C1, m, beta, t), rel=1e-10)


class TestGenerator:
    def test_ou_quadratic(self):
        spec = R.ou_quadratic_spec()
        for x in (-3.0, 0.0, 0.5, 10.0):
            assert R.generator_apply_1d(spec, x) == pytest.approx(-2.0 * x * x + 2.0, rel=1e-6, abs=1e-6)

    def test_constant_V(self):
        spec = R.LyapunovSpec1D(lambda x: -x, lambda x: 1.0, lambda x: 1.0, 1.0, 1.0)
        assert R.generator_apply_1d(spec, 2.0) == 0.0

    def test_fd_matches_analytic(self):
        base = R.ou_quadratic_spec()
        exact = R.LyapunovSpec1D(base.b, base.sigma, base.V, base.M, base.b_const,
                                 dV=lambda x: 2.0 * x, d2V=lambda x: 2.0)
        for x in np.linspace(-20, 20, 41):
            a, b = R.generator_apply_1d(base, x), R.generator_apply_1d(exact, x)
            assert abs(a - b) <= 1e-6 * max(1.0, abs(b))


class TestDriftCheck:
    def test_ou_passes(self):
        rep = R.drift_inequality_check(R.ou_quadratic_spec(), lambda v: v, np.linspace(-10, 10, 201))
        assert rep.passed and rep.worst_margin >= -1e-9

    def test_small_constant_fails(self):
        rep = R.drift_inequality_check(R.ou_quadratic_spec(b_const=1.0), lambda v: v, np.linspace(-10, 10, 201))
        assert not rep.passed
        assert np.all(np.abs(rep.violations) <= 2.0)

    def test_power_driver(self):
        d = R.ConcaveRateDriver.power(1.0, 0.5)
        assert R.drift_inequality_check(R.ou_quadratic_spec(), d, np.linspace(-10, 10, 101)).passed

    def test_V_below_one(self):
        spec = R.LyapunovSpec1D(lambda x: -x, lambda x: 1.0, lambda x: x * x, 1.0, 1.0)
        with pytest.raises(DomainError):
            R.drift_inequality_check(spec, lambda v: v, [0.0, 1.0])

    def test_csv(self, tmp_path):
        rep = R.drift_inequality_check(R.ou_quadratic_spec(), lambda v: v, [0.0, 1.0])
        rep.to_csv(tmp_path / "d.csv")
        lines = (tmp_path / "d.csv").read_text().splitlines()
        assert lines[0] == "x,lhs,rhs,margin" and len(lines) == 3
