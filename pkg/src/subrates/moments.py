"""Moments of subordinators and the rate transfer ``r_phi(t) = E r(S_t)``.

Three moment families control the subordinated rates:

* sub-exponential ``E exp(-theta * S_t**delta)``,
* negative algebraic ``E S_t**(-beta)``,
* logarithmic ``E log(1 + S_t)**(-gamma)``.

Each is available by Monte Carlo (from a :class:`SubordinatorSampler`) and,
where possible, by quadrature or explicit bounds.  The sub-exponential upper
bound goes through an ODE comparison: with ``h(t) = E exp(-theta S_t^delta)``
one has ``h' <= -C1 rho(h)``, hence ``h(t) <= G^{-1}(-C1 t)`` where
``G(v) = -int_v^1 du / rho(u)`` (Chen's comparison lemma).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import optimize, special

from subrates._numerics import quad
from subrates.bernstein import BernsteinFunction, evaluate, invert
from subrates.errors import (
    DivergenceError,
    DomainError,
    PreconditionError,
    SingularityError,
)
from subrates.subordinators import (
    SubordinatorSampler,
    _split,
    kanter_angle_factor,
    sample_stable_angles,
)

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-9
QUAD_MAX_NODES = 100_000 * 21
MIN_MC_SAMPLES = 1_000


@dataclass(frozen=True)
class MomentEstimate:
    """A numeric value with its error descriptor.

    ``error`` is the Monte Carlo standard error (``std / sqrt(n)``) for
    ``method="mc"`` and the quadrature error estimate otherwise.
    ``log_value`` is filled in when the value may underflow.
    """

    value: float
    error: float
    n_or_nodes: int
    method: str
    log_value: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise SingularityError(f"non-finite moment estimate {self.value}")
        if not self.error >= 0.0:
            raise ValueError("error must be non-negative")


def _mc(values, method="mc") -> MomentEstimate:
    values = np.asarray(values, dtype=float)
    n = values.size
    se = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return MomentEstimate(float(np.mean(values)), se, n, method)


# ---------------------------------------------------------------------------
# rate functions


@dataclass(frozen=True)
class RateFunction:
    """Non-increasing ``r: [0, inf) -> (0, 1]``.

    Named families::

        sub-exponential   r(t) = exp(-theta t^delta)
        algebraic         r(t) = (1 + t)^-beta
        logarithmic       r(t) = (1 + log(1 + t))^-gamma
    """

    family: str
    params: Mapping = field(default_factory=dict)
    eval_fn: Callable | None = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.family == "sub-exponential":
            out = np.exp(-p["theta"] * np.power(t, p["delta"]))
        elif self.family == "algebraic":
            out = np.exp(-p["beta"] * np.log1p(t))
        elif self.family == "logarithmic":
            out = np.power(1.0 + np.log1p(t), -p["gamma"])
        else:
            out = np.asarray(self.eval_fn(t), dtype=float)
        return float(out) if out.ndim == 0 else out

    @classmethod
    def sub_exponential(cls, theta, delta):
        if not (theta > 0.0 and 0.0 < delta <= 1.0):
            raise DomainError("need theta > 0 and delta in (0, 1]")
        return cls("sub-exponential", {"theta": theta, "delta": delta})

    @classmethod
    def algebraic(cls, beta):
        if not beta > 0.0:
            raise DomainError("need beta > 0")
        return cls("algebraic", {"beta": beta})

    @classmethod
    def logarithmic(cls, gamma):
        if not gamma > 0.0:
            raise DomainError("need gamma > 0")
        return cls("logarithmic", {"gamma": gamma})

    @classmethod
    def custom(cls, fn, grid=None):
        """Wrap ``fn``; checks ``r(0) <= 1`` and monotonicity on ``grid``."""
        r = cls("custom", {}, fn)
        grid = np.concatenate([[0.0], np.geomspace(1e-3, 1e6, 64)]) if grid is None else grid
        vals = np.asarray(r(grid), dtype=float)
        if np.any(vals <= 0.0) or np.any(vals > 1.0) or np.any(np.diff(vals) > 1e-15):
            raise DomainError("custom rate must be non-increasing with values in (0, 1]")
        return r


# ---------------------------------------------------------------------------
# negative moments


def _require_positive(**kw):
    for k, v in kw.items():
        if not v > 0.0:
            raise DomainError(f"{k} must be positive, got {v}")


def neg_moment_quadrature(phi: BernsteinFunction, beta: float, t: float) -> MomentEstimate:
    """``E S_t^-beta = Gamma(beta)^-1 int_0^inf exp(-t phi(u)) u^(beta-1) du``.

    The integral is rescaled by ``u* = phi^{-1}(1/t)`` and computed in
    ``x = log(u/u*)``, split at ``x = 0``.
    """
    _require_positive(beta=beta, t=t)
    if not phi.unbounded:
        raise DivergenceError(
            "phi is bounded: S_t = 0 with positive probability, E S_t^-beta = inf",
            tail="u->inf",
        )
    ustar = invert(phi, 1.0 / t)

    log_ustar = math.log(ustar)

    def h(x):
        if x + log_ustar > 709.0:
            return -math.inf
        u = math.exp(x + log_ustar)
        return beta * x - (t * evaluate(phi, u) if u > 0.0 else 0.0)

    # the u -> inf tail converges iff the exponent eventually decreases
    x1, x2 = 100.0, min(300.0, 700.0 - log_ustar)
    if not (h(x2) - h(x1)) / (x2 - x1) < -1e-9:
        raise DivergenceError(
            f"integral diverges at the u->inf tail (beta={beta} too large for t={t})",
            tail="u->inf",
        )

    def integrand(x):
        hx = h(x)
        return math.exp(hx) if hx > -745.0 else 0.0

    total, err, nodes = 0.0, 0.0, 0
    for a, b in ((-np.inf, 0.0), (0.0, np.inf)):
        v, e, k = quad(integrand, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, max_nodes=QUAD_MAX_NODES)
        total, err, nodes = total + v, err + e, nodes + k
    scale = math.exp(beta * math.log(ustar) - special.gammaln(beta))
    return MomentEstimate(total * scale, err * scale, nodes, "quadrature")


def neg_moment_lower_bound(phi: BernsteinFunction, beta: float, t: float) -> float:
    """``[phi^{-1}(1/t)]^beta / (e * beta * Gamma(beta))``."""
    _require_positive(beta=beta, t=t)
    ustar = invert(phi, 1.0 / t)
    return math.exp(beta * math.log(ustar) - 1.0 - special.gammaln(beta + 1.0))


def _draws(sampler, t, n, streams):
    if int(n) < MIN_MC_SAMPLES:
        raise DomainError(f"Monte Carlo needs n >= {MIN_MC_SAMPLES}, got {n}")
    return sampler.draws(t, n, streams)


def neg_moment_mc(sampler: SubordinatorSampler, beta, t, n, streams=1) -> MomentEstimate:
    """Empirical mean of ``S_t^-beta``; warns when single draws dominate."""
    _require_positive(beta=beta, t=t)
    s = _draws(sampler, t, n, streams)
    if np.any(s <= 0.0):
        raise SingularityError("zero draw of S_t: S_t^-beta is infinite")
    x = np.power(s, -beta)
    if x.size and np.max(x) > 0.05 * np.sum(x):
        warnings.warn(
            "negative-moment estimator dominated by a few small draws; the "
            "standard error is unreliable", RuntimeWarning, stacklevel=2,
        )
    return _mc(x)


# ---------------------------------------------------------------------------
# sub-exponential moments


def _conditional_stable_logs(sampler, theta, delta, t, n, streams, nodes=400):
    """Per-draw ``log E[exp(-theta S_t^delta) | angle]`` for the stable family.

    With ``S = (A(U)/E)^k``, ``k = (1-alpha)/alpha`` and ``E ~ Exp(1)``, the
    conditional expectation is ``int exp(x - e^x - c e^{-m x}) dx`` with
    ``c = theta (scale t)^(delta/alpha) A^(k delta)`` and ``m = k delta``.  It
    is computed by the trapezoidal rule in ``x`` around the mode, which is
    spectrally accurate for this analytic integrand.
    """
    alpha = sampler.params.get("alpha", 0.5)
    scale = sampler.params.get("scale", 1.0)
    k = (1.0 - alpha) / alpha
    m = k * delta
    angles = np.concatenate([
        sample_stable_angles(alpha, size, sampler.seed, sid)
        for sid, size in enumerate(_split(int(n), int(streams))) if size > 0
    ])
    log_c = (
        math.log(theta) + delta / alpha * math.log(scale * t)
        + k * delta * kanter_angle_factor(alpha, angles)
    )
    z = np.linspace(-40.0, 12.0, nodes)
    dz = z[1] - z[0]
    out = np.empty(angles.size)
    for start in range(0, angles.size, 8192):
        lc = log_c[start:start + 8192]
        # mode of h(x) = x - e^x - c e^{-mx}: h' is decreasing
        lo = np.full(lc.shape, -800.0)
        hi = np.maximum(lc, 0.0) / (1.0 + m) + 5.0
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            dh = 1.0 - np.exp(mid) + m * np.exp(lc - m * mid)
            pos = dh > 0.0
            lo = np.where(pos, mid, lo)
            hi = np.where(pos, hi, mid)
        xs = 0.5 * (lo + hi)
        sig = 1.0 / np.sqrt(np.exp(xs) + m * m * np.exp(lc - m * xs))
        x = xs[:, None] + sig[:, None] * z[None, :]
        with np.errstate(over="ignore"):
            hx = x - np.exp(x) - np.exp(lc[:, None] - m * x)
        out[start:start + lc.size] = special.logsumexp(hx, axis=1) + np.log(sig * dz)
    return out


def subexp_moment_mc(sampler: SubordinatorSampler, theta, delta, t, n, streams=1, method="auto") -> MomentEstimate:
    """Monte Carlo estimate of ``E exp(-theta S_t^delta)``.

    ``method="crude"`` averages ``exp(-theta S_t^delta)`` over draws.
    ``method="conditional"`` (stable family only) averages the conditional
    expectation given the angle variable, integrating the exponential
    variable out exactly; it resolves values far below ``1/n`` that the crude
    estimator cannot see.  ``"auto"`` picks conditional for stable samplers.
    ``log_value`` is always set.
    """
    _require_positive(theta=theta)
    if not 0.0 < delta <= 1.0:
        raise DomainError("delta must lie in (0, 1]")
    if not t >= 0.0:
        raise DomainError("t must be non-negative")
    if int(n) < MIN_MC_SAMPLES:
        raise DomainError(f"Monte Carlo needs n >= {MIN_MC_SAMPLES}, got {n}")
    if t == 0.0:
        return MomentEstimate(1.0, 0.0, int(n), "mc", 0.0)
    if method == "auto":
        method = "conditional" if sampler.family == "stable" else "crude"
    if method == "conditional":
        if sampler.family != "stable":
            raise PreconditionError("conditional estimator needs the stable family")
        logs = _conditional_stable_logs(sampler, theta, delta, t, n, streams)
    elif method == "crude":
        s = sampler.draws(t, n, streams)
        logs = -theta * np.power(s, delta)
    else:
        raise DomainError(f"unknown method {method!r}")
    top = float(np.max(logs))
    w = np.exp(logs - top)
    mean_w = float(np.mean(w))
    se_w = float(np.std(w, ddof=1) / math.sqrt(w.size))
    log_value = top + math.log(mean_w)
    return MomentEstimate(math.exp(log_value), se_w * math.exp(top), w.size, "mc", log_value)


@dataclass(frozen=True)
class OdeBoundKit:
    """Constants and comparison functions for the sub-exponential bound.

    ``C1 = (1 - 1/e) c theta^(alpha/delta) / alpha`` and
    ``rho(u) = u [(1 - log u)^(1/delta) - (-log u)^(1/delta)]^-alpha``.
    In ``s = -log u``, ``G(e^-L) = -int_0^L k(s) ds`` with
    ``k(s) = [(1+s)^(1/delta) - s^(1/delta)]^alpha``.
    """

    theta: float
    delta: float
    c: float
    alpha: float

    @property
    def C1(self) -> float:
        return (1.0 - math.exp(-1.0)) * self.c / self.alpha * self.theta ** (self.alpha / self.delta)

    def _bracket(self, s):
        """``(1+s)^(1/delta) - s^(1/delta)`` without cancellation."""
        s = np.asarray(s, dtype=float)
        tau = 1.0 / self.delta
        with np.errstate(divide="ignore", invalid="ignore"):
            big = np.power(s, tau) * np.expm1(tau * np.log1p(1.0 / s))
        direct = np.power(1.0 + s, tau) - np.power(s, tau)
        return np.where(s > 1.0, big, direct)

    def kernel(self, s):
        return np.power(self._bracket(s), self.alpha)

    def rho(self, u):
        u = np.asarray(u, dtype=float)
        out = u * np.power(self._bracket(-np.log(u)), -self.alpha)
        return float(out) if out.ndim == 0 else out

    def _F(self, L):
        if L <= 0.0:
            return 0.0
        v, _, _ = quad(lambda s: float(self.kernel(s)), 0.0, L, epsabs=1e-13, epsrel=1e-13, max_nodes=QUAD_MAX_NODES)
        return v

    def G(self, v) -> float:
        if not 0.0 < v <= 1.0:
            raise DomainError("G is defined on (0, 1]")
        return -self._F(-math.log(v))

    def G_inverse(self, y) -> float:
        """Solve ``G(v) = y`` for ``y <= 0``; returns 0 on underflow."""
        if y > 0.0:
            raise DomainError("G^{-1} is defined on (-inf, 0]")
        if y == 0.0:
            return 1.0
        target = -y
        # kernel >= 1 gives F(L) >= L, so the root lies in [0, target]
        hi = target
        if self._F(hi) <= target:  # kernel == 1, i.e. delta == 1
            L = hi
        else:
            L = optimize.brentq(lambda L: self._F(L) - target, 0.0, hi, xtol=1e-14, rtol=1e-15, maxiter=300)
        return math.exp(-L) if L < 745.0 else 0.0


def build_ode_kit(theta, delta, c, alpha) -> OdeBoundKit:
    _require_positive(theta=theta, c=c)
    if not 0.0 < delta <= 1.0:
        raise DomainError("delta must lie in (0, 1]")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    return OdeBoundKit(float(theta), float(delta), float(c), float(alpha))


def subexp_bound_ode(kit: OdeBoundKit, t) -> float:
    """``G^{-1}(-C1 t)``, an upper bound for ``E exp(-theta S_t^delta)``."""
    if not t >= 0.0:
        raise DomainError("t must be non-negative")
    return kit.G_inverse(-kit.C1 * t)


def subexp_exponent(delta, alpha) -> float:
    """``delta / (alpha (1 - delta) + delta)``."""
    return delta / (alpha * (1.0 - delta) + delta)


def subexp_C2(delta, alpha) -> float:
    """Constant of the two-term estimate ``-G(v) <= C2 + C2 (-log v)^(1/exponent)``.

    From ``(1+s)^(1/d) - s^(1/d) <= d^-1 2^((1-d)/d) max(s, 1)^((1-d)/d)``:
    ``int_0^L k <= K + K (L^w - 1)/w`` with ``K = d^-alpha 2^(alpha(1-d)/d)``
    and ``w = 1/exponent >= 1``, so ``C2 = K max(1, 1/w) = K``.
    """
    return delta ** (-alpha) * 2.0 ** (alpha * (1.0 - delta) / delta)


def subexp_bound_closed(theta, delta, c, alpha, t) -> float:
    """``exp[-(C1 t / C2 - 1)^exponent]`` for ``t > 2 C2 / C1``, else 1."""
    kit = build_ode_kit(theta, delta, c, alpha)
    c2 = subexp_C2(delta, alpha)
    if not t > 2.0 * c2 / kit.C1:
        return 1.0
    return math.exp(-((kit.C1 * t / c2 - 1.0) ** subexp_exponent(delta, alpha)))


# ---------------------------------------------------------------------------
# logarithmic moments


def log_moment_mc(sampler: SubordinatorSampler, gamma, t, n, streams=1, cap=True) -> MomentEstimate:
    """Empirical mean of ``min(1, log(1+S_t)^-gamma)``.

    With ``cap=False`` the raw ``log(1+S_t)^-gamma`` is averaged; a zero draw
    then raises :class:`SingularityError`.
    """
    _require_positive(gamma=gamma)
    s = _draws(sampler, t, n, streams)
    with np.errstate(divide="ignore"):
        x = np.power(np.log1p(s), -gamma)
    if cap:
        x = np.minimum(1.0, x)
    elif np.any(s <= 0.0):
        raise SingularityError("zero draw with cap=False")
    return _mc(x)


def log_moment_upper(gamma, c, alpha, t, fitted_C) -> float:
    """``fitted_C * log(1 + t^(1/alpha))^-gamma``."""
    _require_positive(gamma=gamma, c=c, t=t)
    return fitted_C * math.log1p(t ** (1.0 / alpha)) ** (-gamma)


def log_moment_upper_constant(gamma, alpha, density_constant) -> float:
    """``(C/alpha) ((1 - 1/e) + Gamma(gamma/alpha + 1))`` for a density constant ``C``."""
    return density_constant / alpha * ((1.0 - math.exp(-1.0)) + special.gamma(gamma / alpha + 1.0))


def log_moment_lower(gamma, alpha, t, E_log_1pS1) -> float:
    """Jensen lower bound for exactly stable ``S``.

    ``(E log(1+S_1)/log 2 + 1/alpha)^-gamma log(1+t^(1/alpha))^-gamma`` for
    ``t >= 1`` and ``(E log(1+S_1)/log 2)^-gamma log(1+t^(1/alpha))^-gamma``
    for ``t < 1``.
    """
    _require_positive(gamma=gamma, t=t, E_log_1pS1=E_log_1pS1)
    const = E_log_1pS1 / math.log(2.0)
    if t >= 1.0:
        const += 1.0 / alpha
    return const ** (-gamma) * math.log1p(t ** (1.0 / alpha)) ** (-gamma)


def expected_log1p(sampler: SubordinatorSampler, t, n, streams=1) -> MomentEstimate:
    """Monte Carlo ``E log(1 + S_t)``."""
    return _mc(np.log1p(_draws(sampler, t, n, streams)))


# ---------------------------------------------------------------------------
# rate transfer


def rate_subordinate(r: RateFunction, sampler: SubordinatorSampler, t, n, streams=1) -> MomentEstimate:
    """``r_phi(t) = E r(S_t)`` by Monte Carlo."""
    s = _draws(sampler, t, n, streams)
    return _mc(np.asarray(r(s), dtype=float))


def theorem1_rate(case: str, params: Mapping, phi: BernsteinFunction | None, t, fitted_C=1.0) -> float:
    """Subordinated rate for the three original-rate families.

    ``a``: ``exp(-C t^(delta/(alpha(1-delta)+delta)))`` with ``C = fitted_C``;
    ``b``: ``1 ^ [phi^{-1}(1/t)]^beta`` (needs the growth condition);
    ``c``: ``1 ^ log(1+t)^-gamma``.
    """
    if not t >= 0.0:
        raise DomainError("t must be non-negative")
    if case == "a":
        return math.exp(-fitted_C * t ** subexp_exponent(params["delta"], params["alpha"]))
    if case == "b":
        if phi is None or phi.bern is not True:
            raise PreconditionError("case b needs a Bernstein function satisfying the growth condition")
        if t == 0.0:
            return 1.0
        return min(1.0, invert(phi, 1.0 / t) ** params["beta"])
    if case == "c":
        if t == 0.0:
            return 1.0
        return min(1.0, math.log1p(t) ** (-params["gamma"]))
    raise DomainError(f"unknown case {case!r}")


def chen_bound(h0, C, rho, t) -> float:
    """``G^{-1}(G(h0) - C t)`` with ``G(v) = -int_v^1 du/rho(u)``.

    ``G`` is evaluated in ``s = -log u``; if ``G(0+)`` is finite and the target
    lies below it, the bound is 0.
    """
    if not 0.0 < h0 <= 1.0:
        raise DomainError("h0 must lie in (0, 1]")
    _require_positive(C=C)
    if not t >= 0.0:
        raise DomainError("t must be non-negative")
    if t == 0.0:
        return float(h0)

    def k(s):
        u = math.exp(-s)
        return u / float(rho(u))

    def F(L):
        if L <= 0.0:
            return 0.0
        return quad(k, 0.0, L, epsabs=1e-13, epsrel=1e-12, max_nodes=QUAD_MAX_NODES)[0]

    L0 = -math.log(h0)
    target = F(L0) + C * t
    hi = max(2.0 * L0, 1.0)
    while F(hi) < target:
        if hi > 745.0:
            return 0.0
        hi *= 2.0
    L = optimize.brentq(lambda L: F(L) - target, L0, hi, xtol=1e-14, rtol=1e-15, maxiter=300)
    return math.exp(-L)


# ---------------------------------------------------------------------------
# elementary inequalities


@dataclass(frozen=True)
class GCheckReport:
    tau: float
    alpha: float
    min_first_difference: float
    min_second_difference: float
    passed: bool


def appendix_g(tau, alpha, x):
    """``g(x) = x [(1 - log x)^tau - (-log x)^tau]^-alpha`` on ``(0, 1]``."""
    s = -np.log(np.asarray(x, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.power(s, tau) * np.expm1(tau * np.log1p(1.0 / s))
    bracket = np.where(s > 1.0, big, np.power(1.0 + s, tau) - np.power(s, tau))
    return np.asarray(x, dtype=float) * np.power(bracket, -alpha)


def appendix_g_check(tau, alpha, grid=None, tol=1e-12) -> GCheckReport:
    """Sampled monotonicity and convexity of :func:`appendix_g`.

    On an increasing grid with non-decreasing spacing (e.g. geometric), an
    increasing convex function has non-negative plain second differences.
    """
    if not tau >= 1.0:
        raise DomainError("tau must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    x = np.geomspace(1e-12, 0.999, 1000) if grid is None else np.sort(np.asarray(grid, dtype=float))
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        raise DomainError("grid must lie strictly inside (0, 1)")
    g = appendix_g(tau, alpha, x)
    d1 = np.diff(g)
    d2 = np.diff(g, 2)
    m1, m2 = float(np.min(d1)), float(np.min(d2))
    return GCheckReport(tau, alpha, m1, m2, m1 >= -tol and m2 >= -tol)


def log_product_inequality_check(tau, x) -> bool:
    """Truth of ``log(1 + tau x) <= log(1 + tau) log(1 + x) / log 2``."""
    if not 0.0 < tau < 1.0:
        raise DomainError("tau must lie in (0, 1)")
    if not x >= 0.0:
        raise DomainError("x must be non-negative")
    lhs = math.log1p(tau * x)
    rhs = math.log1p(tau) * math.log1p(x) / math.log(2.0)
    return lhs <= rhs * (1.0 + 4e-16) or lhs <= rhs


def efds_inequality_check(x, lam) -> bool:
    """Truth of ``log(1+x)/x > log(1+lam)/lam`` for ``0 < x < lam``."""
    if not 0.0 < x < lam:
        raise DomainError("need 0 < x < lam")
    return math.log1p(x) / x > math.log1p(lam) / lam


# ---------------------------------------------------------------------------
# export

SWEEP_COLUMNS = ("t", "value", "error", "bound_low", "bound_high")


def write_sweep_csv(path, rows) -> None:
    """Write rows of ``(t, value, error, bound_low, bound_high)``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# fuzz harnesses


@dataclass(frozen=True)
class FuzzReport:
    name: str
    samples: int
    violations: int
    worst_input: tuple | None
    worst_gap: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def fuzz_log_product(samples=100_000, seed=0, x_max=1e6) -> FuzzReport:
    """Uniform ``(tau, x)`` on ``(0,1) x [0, x_max]`` against :func:`log_product_inequality_check`."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(7,)))
    tau = rng.uniform(0.0, 1.0, samples)
    tau[tau == 0.0] = 0.5
    x = rng.uniform(0.0, x_max, samples)
    ok = np.array([log_product_inequality_check(a, b) for a, b in zip(tau, x)])
    gap = np.log1p(tau * x) - np.log1p(tau) * np.log1p(x) / math.log(2.0)
    k = int(np.argmax(gap))
    return FuzzReport("log-product", samples, int(np.sum(~ok)), (float(tau[k]), float(x[k])), float(gap[k]))


def fuzz_efds(samples=100_000, seed=0, lam_max=1e6) -> FuzzReport:
    """Random ``0 < x < lam`` against :func:`efds_inequality_check`."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(8,)))
    lam = np.exp(rng.uniform(math.log(1e-3), math.log(lam_max), samples))
    x = lam * rng.uniform(0.0, 1.0, samples)
    x[x <= 0.0] = 0.5 * lam[x <= 0.0]
    x = np.minimum(x, lam * (1.0 - 1e-9))
    ok = np.array([efds_inequality_check(a, b) for a, b in zip(x, lam)])
    gap = np.log1p(lam) / lam - np.log1p(x) / x
    k = int(np.argmax(gap))
    return FuzzReport("efds", samples, int(np.sum(~ok)), (float(x[k]), float(lam[k])), float(gap[k]))
