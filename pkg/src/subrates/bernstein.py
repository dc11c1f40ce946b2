"""Bernstein functions: evaluation, inversion, catalog and growth diagnostics.

A Bernstein function is the Laplace exponent of a subordinator,
``E exp(-u S_t) = exp(-t phi(u))``.  Every such function (without killing)
has the Levy-Khintchine form::

    phi(u) = b*u + int_(0,inf) (1 - exp(-u*y)) nu(dy)

with drift ``b >= 0`` and a Levy measure ``nu`` satisfying
``int min(y, 1) nu(dy) < inf``.

The growth condition used for algebraic rates is::

    liminf_{s->inf} phi(s)/log(s) > 0   and   liminf_{s->0} phi(lam*s)/phi(s) > 1

Limits of this kind cannot be certified on a finite grid, so each catalog
family carries its analytically known truth value in ``BernsteinFunction.bern``
and :func:`condition_diagnostics` only corroborates it.

A weaker historical condition (``liminf phi(s)/log s > 0`` together with
``limsup_{s->0} phi^{-1}(2s)/phi^{-1}(s) < inf``) implies the same small-time
moment bounds; it is not implemented as a separate check because the doubling
form above is equivalent for increasing functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import optimize, special

from subrates._numerics import linear_fit, quad
from subrates.errors import (
    ConstructionError,
    DomainError,
    FitError,
    MonotonicityError,
    RangeError,
)

LEVY_EPSABS = 1e-10
LEVY_EPSREL = 1e-8
LEVY_MAX_NODES = 10_000
MAX_DOUBLINGS = 200

CATALOG_NAMES = (
    "stable",
    "log",
    "stable-log-plus",
    "stable-log-minus",
    "relativistic-like",
    "gamma",
    "compound-poisson-drift",
)


@dataclass(frozen=True)
class LevyTriplet:
    """Drift and Levy density of a subordinator.

    ``density`` maps ``y > 0`` to the density of ``nu``; it must accept numpy
    arrays.  ``descriptor`` optionally records a parametric form such as
    ``{"kind": "stable", "c": 1.0, "alpha": 0.5}``.
    """

    drift: float
    density: Callable[[np.ndarray], np.ndarray]
    descriptor: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not self.drift >= 0.0:
            raise ConstructionError(f"drift must be non-negative, got {self.drift}")
        small, large = self.integrability()
        if not (math.isfinite(small) and math.isfinite(large)):
            raise ConstructionError("Levy measure violates int min(y,1) nu(dy) < inf")

    def integrability(self) -> tuple[float, float]:
        """Return ``(int_0^1 y nu(dy), int_1^inf nu(dy))`` by quadrature."""
        dens = self.density

        def weighted(x, power):
            # y = exp(x) on both pieces
            return _density_term(dens, x, lambda y: y**power)

        small, _, _ = quad(
            lambda x: weighted(x, 2.0), -np.inf, 0.0,
            epsabs=LEVY_EPSABS, epsrel=LEVY_EPSREL,
        )
        large, _, _ = quad(
            lambda x: weighted(x, 1.0), 0.0, np.inf,
            epsabs=LEVY_EPSABS, epsrel=LEVY_EPSREL,
        )
        return small, large


@dataclass(frozen=True)
class BernsteinFunction:
    """A Laplace exponent ``phi`` with optional Levy triplet.

    Attributes
    ----------
    eval_fn : callable or None
        Closed-form rule ``u -> phi(u)`` accepting numpy arrays.  When ``None``
        the function is evaluated from ``triplet`` by quadrature.
    triplet : LevyTriplet or None
    name : str or None
        Catalog identifier.
    params : mapping
        Family parameters.
    bern : bool or None
        Analytic truth value of the growth condition (``None`` = unknown).
    sup : float
        ``sup phi``; ``inf`` for unbounded functions.
    """

    eval_fn: Callable[[np.ndarray], np.ndarray] | None
    triplet: LevyTriplet | None = None
    name: str | None = None
    params: Mapping = field(default_factory=dict)
    bern: bool | None = None
    sup: float = math.inf

    def __post_init__(self):
        if self.eval_fn is None and self.triplet is None:
            raise ConstructionError("need a closed form or a Levy triplet")
        lo, hi = evaluate(self, 0.5), evaluate(self, 2.0)
        if not (lo > 0.0 and hi > lo):
            raise ConstructionError(
                "degenerate Bernstein function: a non-trivial phi is positive "
                f"and strictly increasing (phi(0.5)={lo}, phi(2)={hi})"
            )

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.sup)

    def __call__(self, u):
        return evaluate(self, u)

    def inverse(self, v, tol: float = 1e-12):
        return invert(self, v, tol)


def _density_term(dens, x, weight):
    """``weight(y) * dens(y)`` at ``y = exp(x)``; zero where it is not representable."""
    if not -745.0 < x < 709.0:
        return 0.0
    y = math.exp(x)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        val = weight(y) * float(dens(y))
    return val if math.isfinite(val) else 0.0


def levy_khintchine(triplet: LevyTriplet, u: float) -> float:
    """``b*u + int (1 - exp(-u y)) nu(dy)`` by split quadrature in ``x = log y``."""
    dens = triplet.density

    def integrand(x):
        return _density_term(dens, x, lambda y: -math.expm1(-u * y) * y)

    x0 = -math.log(u)
    pieces = []
    if x0 < 0.0:
        pieces += [(-np.inf, x0), (x0, 0.0)]
    else:
        pieces += [(-np.inf, 0.0)]
    if x0 > 0.0:
        pieces += [(0.0, x0), (x0, np.inf)]
    else:
        pieces += [(0.0, np.inf)]
    total = 0.0
    for a, b in pieces:
        val, _, _ = quad(
            integrand, a, b, epsabs=LEVY_EPSABS, epsrel=LEVY_EPSREL,
            max_nodes=LEVY_MAX_NODES,
        )
        total += val
    return triplet.drift * u + total


def evaluate(phi: BernsteinFunction, u):
    """Evaluate ``phi(u)`` for ``u > 0`` (scalar or array)."""
    arr = np.asarray(u, dtype=float)
    if np.any(~(arr > 0.0)):
        raise DomainError(f"Bernstein functions are evaluated on (0, inf), got {u!r}")
    if phi.eval_fn is not None:
        out = np.asarray(phi.eval_fn(arr), dtype=float)
    else:
        flat = [levy_khintchine(phi.triplet, float(x)) for x in arr.ravel()]
        out = np.asarray(flat, dtype=float).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def invert(phi: BernsteinFunction, v: float, tol: float = 1e-12) -> float:
    """Solve ``phi(u) = v`` by doubling brackets from ``u = 1`` and Brent's method.

    The returned ``u`` satisfies ``|phi(u) - v| <= tol * max(1, v)``.
    """
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    if not v > 0.0:
        raise RangeError(f"v={v} is not above inf phi = 0")
    if v >= phi.sup:
        raise RangeError(f"v={v} is not below sup phi = {phi.sup}")
    lo = hi = 0.0  # log u
    if evaluate(phi, 1.0) < v:
        for _ in range(MAX_DOUBLINGS):
            hi += math.log(2.0)
            if evaluate(phi, math.exp(hi)) >= v:
                break
        else:
            raise RangeError(f"v={v} not reached after {MAX_DOUBLINGS} doublings")
        lo = hi - math.log(2.0)
    else:
        for _ in range(MAX_DOUBLINGS):
            lo -= math.log(2.0)
            if evaluate(phi, math.exp(lo)) <= v:
                break
        else:
            raise RangeError(f"v={v} below phi(2^-{MAX_DOUBLINGS})")
        hi = lo + math.log(2.0)

    def resid(x):
        return evaluate(phi, math.exp(x)) - v

    x = optimize.brentq(resid, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(x)


# ---------------------------------------------------------------------------
# catalog


def _stable(alpha=0.5, scale=1.0):
    _check(0.0 < alpha < 1.0, "stable: alpha must lie in (0, 1)")
    _check(scale > 0.0, "stable: scale must be positive")
    c = scale * alpha / special.gamma(1.0 - alpha)
    triplet = LevyTriplet(
        0.0, lambda y: c * np.power(y, -1.0 - alpha),
        {"kind": "stable", "c": c, "alpha": alpha},
    )
    return dict(eval_fn=lambda u: scale * np.power(u, alpha), triplet=triplet, bern=True)


def _gamma(a=1.0, b=1.0):
    _check(a > 0.0 and b > 0.0, "gamma: a and b must be positive")
    triplet = LevyTriplet(
        0.0, lambda y: a * np.exp(-b * y) / y, {"kind": "gamma", "a": a, "b": b}
    )
    return dict(eval_fn=lambda u: a * np.log1p(u / b), triplet=triplet, bern=True)


def _log():
    return _gamma(1.0, 1.0)


def _stable_log_plus(alpha=0.5, beta=0.2):
    _check(0.0 < alpha < 1.0, "stable-log-plus: alpha must lie in (0, 1)")
    _check(0.0 <= beta < 1.0 - alpha, "stable-log-plus: beta must lie in [0, 1-alpha)")
    return dict(
        eval_fn=lambda u: np.power(u, alpha) * np.power(np.log1p(u), beta), bern=True
    )


def _stable_log_minus(alpha=0.5, beta=0.2):
    _check(0.0 < beta < alpha < 1.0, "stable-log-minus: need 0 < beta < alpha < 1")
    return dict(
        eval_fn=lambda u: np.power(u, alpha) * np.power(np.log1p(u), -beta), bern=True
    )


def _relativistic_like(alpha=0.5):
    _check(0.0 < alpha < 1.0, "relativistic-like: alpha must lie in (0, 1)")
    g = special.gamma(alpha)
    # s(1+s)^-alpha = [(1+s)^(1-alpha) - 1] + [1 - (1+s)^-alpha]
    triplet = LevyTriplet(
        0.0,
        lambda y: np.exp(-y) * np.power(y, alpha - 2.0) * (1.0 - alpha + y) / g,
        {"kind": "relativistic-like", "alpha": alpha},
    )
    return dict(
        eval_fn=lambda u: u * np.exp(-alpha * np.log1p(u)),
        triplet=triplet,
        bern=True,
    )


def _compound_poisson_drift(drift=0.0, rate=1.0, jumps="exponential", jump_mean=1.0):
    _check(drift >= 0.0, "compound-poisson-drift: drift must be non-negative")
    _check(rate >= 0.0, "compound-poisson-drift: rate must be non-negative")
    _check(drift > 0.0 or rate > 0.0, "compound-poisson-drift: phi would vanish")
    _check(jump_mean > 0.0, "compound-poisson-drift: jump_mean must be positive")
    if jumps == "exponential":
        m = jump_mean

        def eval_fn(u):
            return drift * u + rate * m * u / (1.0 + m * u)

        triplet = None
        if rate > 0.0:
            triplet = LevyTriplet(
                drift, lambda y: (rate / m) * np.exp(-y / m),
                {"kind": "compound-poisson", "rate": rate, "jumps": "exponential", "mean": m},
            )
    elif jumps == "unit":
        m = jump_mean

        def eval_fn(u):
            return drift * u - rate * np.expm1(-m * u)

        triplet = None  # atomic Levy measure
    else:
        raise ConstructionError(f"unknown jump law {jumps!r}")
    sup = math.inf if drift > 0.0 else rate
    # bounded phi fails liminf phi(s)/log s > 0
    return dict(eval_fn=eval_fn, triplet=triplet, bern=drift > 0.0, sup=sup)


_FAMILIES = {
    "stable": _stable,
    "log": _log,
    "stable-log-plus": _stable_log_plus,
    "stable-log-minus": _stable_log_minus,
    "relativistic-like": _relativistic_like,
    "gamma": _gamma,
    "compound-poisson-drift": _compound_poisson_drift,
}


def _check(ok, msg):
    if not ok:
        raise ConstructionError(msg)


def catalog(name: str, params: Mapping | None = None, **kwargs) -> BernsteinFunction:
    """Build a named Bernstein function.

    Families and parameters::

        stable                  alpha in (0,1), scale > 0      phi = scale*s^alpha
        log                     -                              phi = log(1+s)
        stable-log-plus         alpha in (0,1), beta in [0,1-alpha)
        stable-log-minus        0 < beta < alpha < 1
        relativistic-like       alpha in (0,1)                 phi = s(1+s)^-alpha
        gamma                   a, b > 0                       phi = a*log(1+s/b)
        compound-poisson-drift  drift >= 0, rate >= 0, jumps in {exponential, unit},
                                jump_mean > 0
    """
    key = name.replace("_", "-").lower()
    if key not in _FAMILIES:
        raise ConstructionError(f"unknown Bernstein family {name!r}; known: {CATALOG_NAMES}")
    p = dict(params or {})
    p.update(kwargs)
    try:
        spec = _FAMILIES[key](**p)
    except TypeError as exc:
        raise ConstructionError(f"bad parameters for {key!r}: {exc}") from None
    return BernsteinFunction(name=key, params=p, **spec)


def from_triplet(triplet: LevyTriplet, name: str | None = None) -> BernsteinFunction:
    """Bernstein function evaluated only through its Levy-Khintchine integral."""
    return BernsteinFunction(eval_fn=None, triplet=triplet, name=name)


# ---------------------------------------------------------------------------
# diagnostics


def default_grid(n: int = 161, lo: float = 1e-8, hi: float = 1e8) -> np.ndarray:
    return np.geomspace(lo, hi, n)


@dataclass(frozen=True)
class ConditionReport:
    ratio_log_liminf_proxy: float
    doubling_liminf_proxy: float
    lam: float
    s_big: float
    s_small: float
    grid_lo: float
    grid_hi: float
    verdict: str


def condition_diagnostics(
    phi: BernsteinFunction,
    lam: float = 2.0,
    grid=None,
    s_big: float = 1e4,
    s_small: float = 1e-4,
) -> ConditionReport:
    """Grid proxies for the two liminf conditions.

    The verdict is ``"inconclusive"`` when ``phi.bern`` is unknown, ``"pass"``
    when the analytic flag is set and both proxies clear their thresholds on
    the whole sampled range, and ``"fail"`` otherwise.
    """
    if not lam > 1.0:
        raise DomainError("lambda must exceed 1")
    s = default_grid() if grid is None else np.sort(np.asarray(grid, dtype=float))
    big = s[s >= s_big]
    small = s[s <= s_small]
    ratio = float(np.min(evaluate(phi, big) / np.log(big))) if big.size else math.nan
    doubling = (
        float(np.min(evaluate(phi, lam * small) / evaluate(phi, small)))
        if small.size else math.nan
    )
    proxies_ok = ratio > 0.0 and doubling > 1.0
    if phi.bern is None:
        verdict = "inconclusive"
    elif phi.bern and proxies_ok:
        verdict = "pass"
    else:
        verdict = "fail"
    return ConditionReport(ratio, doubling, lam, s_big, s_small, float(s[0]), float(s[-1]), verdict)


def _half(grid, endpoint):
    t = np.sort(np.asarray(grid, dtype=float))
    mid = t.size // 2
    if endpoint == "zero":
        return t[: max(mid, 1)]
    if endpoint == "infinity":
        return t[mid:]
    raise DomainError("endpoint must be 'zero' or 'infinity'")


def doubling_index(g, endpoint: str, lam: float, grid, mode: str = "liminf") -> float:
    """Grid proxy for ``liminf g(lam t)/g(t)`` (or ``limsup``) at an endpoint.

    Only the half of the grid adjacent to ``endpoint`` is used.
    """
    if not lam > 1.0:
        raise DomainError("lambda must exceed 1")
    t = _half(grid, endpoint)
    gt = np.asarray(g(t), dtype=float)
    if np.any(np.diff(gt) <= 0.0):
        raise MonotonicityError("g is not strictly increasing on the sampled grid")
    ratio = np.asarray(g(lam * t), dtype=float) / gt
    if mode == "liminf":
        return float(np.min(ratio))
    if mode == "limsup":
        return float(np.max(ratio))
    raise DomainError("mode must be 'liminf' or 'limsup'")


def power_envelope(g, endpoint: str, grid) -> tuple[float, float]:
    """Fit ``g(t) ~ c t^kappa`` on the endpoint half of ``grid``."""
    t = _half(grid, endpoint)
    gt = np.asarray(g(t), dtype=float)
    if np.any(gt <= 0.0):
        raise FitError("g must be positive on the grid")
    slope, intercept, _ = linear_fit(np.log(t), np.log(gt))
    return math.exp(intercept), slope
