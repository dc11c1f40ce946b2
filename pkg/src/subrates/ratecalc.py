"""Foster-Lyapunov rate calculus.

For a concave driver ``phi`` on ``[1, inf)`` and a drift inequality
``A V <= -phi(V) + b 1_C``, the convergence rate is
``r(t) = 1 ^ (phi(H^{-1}(t)))^-q`` with ``H(u) = int_1^u dx / phi(x)``.
A 1-D diffusion checker evaluates ``A V = b V' + sigma^2 V'' / 2`` pointwise.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import optimize

from subrates._numerics import quad
from subrates.errors import ConstructionError, DomainError, RangeError

_CHECK_GRID = np.geomspace(1.0, 1e8, 200)


@dataclass(frozen=True)
class ConcaveRateDriver:
    """Non-decreasing concave ``phi: [1, inf) -> (0, inf)`` with ``phi' -> 0``.

    Closed-form families: ``power`` (``C1 x^kappa``) and ``log-linear``
    (``C1 x (1 + p + log x)^-p``).  Use :meth:`custom` for anything else.
    """

    family: str
    params: Mapping = field(default_factory=dict)
    fn: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        vals = np.asarray(self(_CHECK_GRID), dtype=float)
        if np.any(~np.isfinite(vals)) or np.any(vals <= 0.0):
            raise ConstructionError("driver must be positive on [1, inf)")
        if np.any(np.diff(vals) < -1e-12 * np.abs(vals[1:])):
            raise ConstructionError("driver must be non-decreasing")
        # concavity on the geometric grid: slopes must not increase
        slopes = np.diff(vals) / np.diff(_CHECK_GRID)
        if np.any(np.diff(slopes) > 1e-9 * np.abs(slopes[1:]) + 1e-14):
            raise ConstructionError("driver must be concave")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.family == "power":
            out = p["C1"] * np.power(x, p["kappa"])
        elif self.family == "log-linear":
            out = p["C1"] * x * np.power(1.0 + p["p"] + np.log(x), -p["p"])
        else:
            out = np.asarray(self.fn(x), dtype=float)
        return float(out) if out.ndim == 0 else out

    @classmethod
    def power(cls, C1=1.0, kappa=0.5):
        if not C1 > 0.0:
            raise ConstructionError("C1 must be positive")
        if not 0.0 < kappa < 1.0:
            raise ConstructionError("kappa must lie in (0, 1)")
        return cls("power", {"C1": float(C1), "kappa": float(kappa)})

    @classmethod
    def log_linear(cls, C1=1.0, p=1.0):
        if not (C1 > 0.0 and p > 0.0):
            raise ConstructionError("need C1 > 0 and p > 0")
        return cls("log-linear", {"C1": float(C1), "p": float(p)})

    @classmethod
    def custom(cls, fn, name="custom"):
        return cls(name, {}, fn)

    def vanishing_slope(self) -> bool:
        """Proxy for ``phi'(x) -> 0``: the slope at ``1e16`` is below half the slope at ``1e4``.

        Log-linear drivers flatten only logarithmically, so the window is wide.
        """
        def slope(x):
            h = 1e-6 * x
            return (self(x + h) - self(x - h)) / (2.0 * h)

        return bool(slope(1e16) < 0.5 * slope(1e4))


def H(driver: ConcaveRateDriver, u) -> float:
    """``int_1^u dx / phi(x)``."""
    if not u >= 1.0:
        raise DomainError(f"H is defined for u >= 1, got {u}")
    p = driver.params
    if driver.family == "power":
        k = p["kappa"]
        return math.expm1((1.0 - k) * math.log(u)) / (p["C1"] * (1.0 - k))
    if driver.family == "log-linear":
        a = 1.0 + p["p"]
        return ((a + math.log(u)) ** a - a**a) / (p["C1"] * a)
    if u == 1.0:
        return 0.0
    # in y = log x the integrand x / phi(x) is smooth
    v, _, _ = quad(lambda y: math.exp(y) / driver(math.exp(y)), 0.0, math.log(u), epsabs=1e-13, epsrel=1e-12)
    return v


def log_H_inverse(driver: ConcaveRateDriver, t) -> float:
    """``log H^{-1}(t)``; stays finite where ``H^{-1}`` itself overflows."""
    if not t >= 0.0:
        raise DomainError(f"t must be non-negative, got {t}")
    if t == 0.0:
        return 0.0
    p = driver.params
    if driver.family == "power":
        k = p["kappa"]
        return math.log1p(p["C1"] * (1.0 - k) * t) / (1.0 - k)
    if driver.family == "log-linear":
        a = 1.0 + p["p"]
        return (p["C1"] * a * t + a**a) ** (1.0 / a) - a
    lo, hi = 0.0, 1.0
    while H(driver, math.exp(hi)) < t:
        lo, hi = hi, 2.0 * hi
        if hi > 700.0:
            raise RangeError(f"t={t} exceeds the range of H")
    return optimize.brentq(lambda y: H(driver, math.exp(y)) - t, lo, hi, xtol=1e-15, rtol=1e-15)


def H_inverse(driver: ConcaveRateDriver, t) -> float:
    """Solve ``H(u) = t`` for ``u >= 1``."""
    y = log_H_inverse(driver, t)
    if y > 709.0:
        raise RangeError(f"H^-1({t}) overflows; use log_H_inverse")
    return math.exp(y)


def _log_phi(driver, y):
    p = driver.params
    if driver.family == "power":
        return math.log(p["C1"]) + p["kappa"] * y
    if driver.family == "log-linear":
        return math.log(p["C1"]) + y - p["p"] * math.log(1.0 + p["p"] + y)
    return math.log(float(driver(math.exp(y))))


def drift_log_rate(driver: ConcaveRateDriver, q, t) -> float:
    """``log`` of :func:`drift_rate`, computed without underflow."""
    if not 0.0 < q < 1.0:
        raise DomainError("q must lie in (0, 1)")
    return min(0.0, -q * _log_phi(driver, log_H_inverse(driver, t)))


def drift_rate(driver: ConcaveRateDriver, q, t) -> float:
    """``1 ^ phi(H^{-1}(t))^-q``."""
    return math.exp(drift_log_rate(driver, q, t))


def prop1_closed_form(C1, m, beta, t) -> float:
    """``1 ^ C1^(-beta/(m+beta)) (1 + C1 t/(m+beta+1))^-beta``."""
    return min(1.0, C1 ** (-beta / (m + beta)) * (1.0 + C1 * t / (m + beta + 1.0)) ** (-beta))


def prop1_driver(C1, m, beta) -> tuple[ConcaveRateDriver, float]:
    """Power driver with ``kappa = (m+beta)/(m+beta+1)`` and ``q = beta/(m+beta)``."""
    return ConcaveRateDriver.power(C1, (m + beta) / (m + beta + 1.0)), beta / (m + beta)


# ---------------------------------------------------------------------------
# 1-D diffusion drift checks


@dataclass(frozen=True)
class LyapunovSpec1D:
    """``dX = b(X) dt + sigma(X) dW`` with test function ``V >= 1``.

    ``dV`` and ``d2V`` are optional analytic derivatives; finite differences
    are used otherwise.
    """

    b: Callable
    sigma: Callable
    V: Callable
    M: float
    b_const: float
    q: float = 0.5
    dV: Callable | None = None
    d2V: Callable | None = None


def _fd_step(x):
    return 1e-5 * max(1.0, abs(x))


def _fd_step2(x):
    # the second difference loses eps*V/h^2 to rounding, so it needs a wider step
    return 1e-4 * max(1.0, abs(x))


def generator_apply_1d(spec: LyapunovSpec1D, x) -> float:
    """``b(x) V'(x) + sigma(x)^2 V''(x) / 2``."""
    x = float(x)
    h = _fd_step(x)
    h2 = _fd_step2(x)
    if spec.dV is not None:
        d1 = float(spec.dV(x))
    else:
        d1 = (spec.V(x + h) - spec.V(x - h)) / (2.0 * h)
    if spec.d2V is not None:
        d2 = float(spec.d2V(x))
    else:
        d2 = (spec.V(x + h2) - 2.0 * spec.V(x) + spec.V(x - h2)) / (h2 * h2)
    return float(spec.b(x)) * d1 + 0.5 * float(spec.sigma(x)) ** 2 * d2


@dataclass(frozen=True)
class DriftReport:
    x: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    violations: np.ndarray

    @property
    def margin(self) -> np.ndarray:
        return self.rhs - self.lhs

    @property
    def worst_margin(self) -> float:
        return float(np.min(self.margin))

    @property
    def passed(self) -> bool:
        return self.violations.size == 0

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "lhs", "rhs", "margin"])
            for row in zip(self.x, self.lhs, self.rhs, self.margin):
                w.writerow([repr(float(v)) for v in row])


def drift_inequality_check(spec: LyapunovSpec1D, driver: Callable, grid, tol=1e-9) -> DriftReport:
    """Pointwise check of ``A V(x) <= -phi(V(x)) + b_const 1{|x| <= M}``.

    ``tol`` absorbs finite-difference error, relative to ``max(1, |rhs|)``.
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.array([spec.V(x) for x in grid], dtype=float)
    if np.any(vals < 1.0):
        raise DomainError("test function must satisfy V >= 1 on the grid")
    lhs = np.array([generator_apply_1d(spec, x) for x in grid])
    rhs = -np.asarray([driver(v) for v in vals], dtype=float) + spec.b_const * (np.abs(grid) <= spec.M)
    bad = lhs > rhs + tol * np.maximum(1.0, np.abs(rhs))
    return DriftReport(grid, lhs, rhs, grid[bad])


def ou_quadratic_spec(b_const=4.0, M=2.0) -> LyapunovSpec1D:
    """Ornstein-Uhlenbeck ``b = -x``, ``sigma = sqrt 2`` with ``V = 1 + x^2``."""
    return LyapunovSpec1D(
        b=lambda x: -x,
        sigma=lambda x: math.sqrt(2.0),
        V=lambda x: 1.0 + x * x,
        M=M,
        b_const=b_const,
    )
