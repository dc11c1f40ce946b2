"""An exactly computable test bed: the star-shaped Q-process on ``{0, ..., N}``.

State 0 jumps to ``i`` at rate ``lambda_0 p_i``; every state ``i >= 1`` returns
to 0 at rate ``lambda_i``.  The invariant law is explicit::

    pi_0 = (1 + lambda_0 sum_j p_j / lambda_j)^-1,   pi_i = pi_0 lambda_0 p_i / lambda_i.

Transition rows are computed by uniformization.  Applying the uniformized
matrix ``I + Q/Lambda`` costs ``O(N)`` because of the star structure, so long
horizons stay cheap.

The f-norm on a countable space is a weighted l1 sum.  For a signed measure
``mu`` with ``sum f|mu| < inf`` and any ``|g| <= f`` we have
``|mu(g)| <= sum_i |g_i||mu_i| <= sum_i f_i |mu_i|``, and ``g = f sign(mu)``
attains the bound, hence ``||mu||_f = sum_i f_i |mu_i|``.  With ``f = 1`` this
is twice the total variation distance ``sup_A |mu(A)|``.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, stats

from subrates._numerics import linear_fit
from subrates.errors import (
    ConstructionError,
    DomainError,
    ExponentOverflowError,
    FitError,
)
from subrates.moments import theorem1_rate
from subrates.subordinators import SubordinatorSampler

POISSON_TAIL = 1e-14
MIXING_TOL = 1e-15
MIXING_RATE_FACTOR = 1.25
MIN_MIXING_DRAWS = 1_000


@dataclass(frozen=True)
class QProcessModel:
    """Truncated star-shaped Q-process with its exact invariant law."""

    lam: np.ndarray
    p: np.ndarray
    N: int
    pi: np.ndarray = field(repr=False)

    @property
    def Q(self) -> np.ndarray:
        """Dense Q-matrix (for checks; the algorithms never build it)."""
        q = np.zeros((self.N + 1, self.N + 1))
        q[0, 0] = -self.lam[0]
        q[0, 1:] = self.lam[0] * self.p
        q[1:, 0] = self.lam[1:]
        q[np.arange(1, self.N + 1), np.arange(1, self.N + 1)] = -self.lam[1:]
        return q

    def apply_Q(self, v: np.ndarray) -> np.ndarray:
        """Row vector times Q."""
        out = np.empty_like(v)
        out[0] = -self.lam[0] * v[0] + np.dot(self.lam[1:], v[1:])
        out[1:] = self.lam[0] * self.p * v[0] - self.lam[1:] * v[1:]
        return out

    def stationarity_residual(self) -> float:
        """``max |pi Q|``."""
        return float(np.max(np.abs(self.apply_Q(self.pi))))

    def summability(self) -> float:
        """``sum p_i / lambda_i`` on the truncated range."""
        return float(np.sum(self.p / self.lam[1:]))


def build(lambda_rule, p_rule, N: int) -> QProcessModel:
    """Build the model from rules ``i -> lambda_i`` (i = 0..N) and ``i -> p_i`` (i = 1..N).

    Rules may be callables or sequences.  ``p`` is renormalized to sum 1.
    """
    N = int(N)
    if N < 1:
        raise ConstructionError("need N >= 1")
    lam = _materialize(lambda_rule, np.arange(0, N + 1))
    p = _materialize(p_rule, np.arange(1, N + 1))
    if lam.shape != (N + 1,) or p.shape != (N,):
        raise ConstructionError("rules must give N+1 rates and N weights")
    if not (np.all(np.isfinite(lam)) and np.all(lam > 0.0)):
        raise ConstructionError("all rates lambda_i must be positive and finite")
    if not (np.all(np.isfinite(p)) and np.all(p > 0.0)):
        raise ConstructionError("all weights p_i must be positive and finite")
    p = p / p.sum()
    pi0 = 1.0 / (1.0 + lam[0] * np.sum(p / lam[1:]))
    pi = np.concatenate([[pi0], pi0 * lam[0] * p / lam[1:]])
    return QProcessModel(lam, p, N, pi)


def _materialize(rule, idx):
    if callable(rule):
        return np.asarray([float(rule(int(i))) for i in idx])
    return np.asarray(rule, dtype=float)


def default_model(N: int = 200) -> QProcessModel:
    """``lambda_0 = 1``, ``lambda_i = 1/i``, ``p_i`` proportional to ``2^-i``."""
    return build(lambda i: 1.0 if i == 0 else 1.0 / i, lambda i: 2.0 ** (-i), N)


def two_state(lam0: float, lam1: float) -> QProcessModel:
    return build([lam0, lam1], [1.0], 1)


# ---------------------------------------------------------------------------
# semigroup


def _unit(model, x) -> np.ndarray:
    if not 0 <= int(x) <= model.N:
        raise DomainError(f"state {x} outside 0..{model.N}")
    v = np.zeros(model.N + 1)
    v[int(x)] = 1.0
    return v


def _poisson_weights(mu: float):
    kmax = int(stats.poisson.isf(POISSON_TAIL, mu)) + 1 if mu > 0.0 else 0
    return stats.poisson.pmf(np.arange(kmax + 1), mu)


def transition_row(model: QProcessModel, t: float, x: int) -> np.ndarray:
    """Row ``x`` of ``exp(tQ)`` by uniformization with ``Lambda = max lambda_i``."""
    if not t >= 0.0:
        raise DomainError(f"t must be non-negative, got {t}")
    v = _unit(model, x)
    if t == 0.0:
        return v
    rate = float(np.max(model.lam))
    w = _poisson_weights(rate * t)
    out = w[0] * v
    for k in range(1, w.size):
        v = v + model.apply_Q(v) / rate
        out += w[k] * v
    return out / out.sum()


def apply_semigroup(model: QProcessModel, row: np.ndarray, t: float) -> np.ndarray:
    """``row P^t`` for an arbitrary row vector."""
    if not t >= 0.0:
        raise DomainError("t must be non-negative")
    v = np.asarray(row, dtype=float).copy()
    if t == 0.0:
        return v
    rate = float(np.max(model.lam))
    w = _poisson_weights(rate * t)
    out = w[0] * v
    for k in range(1, w.size):
        v = v + model.apply_Q(v) / rate
        out += w[k] * v
    return out


@dataclass
class MixingCache:
    """Powers ``e_x P^k - pi`` of the uniformized chain, stored until they reach ``pi``.

    The uniformization rate is ``1.25 max lambda_i`` so that the discrete
    chain is aperiodic and the powers converge.  Beyond the stored range the
    row equals ``pi`` to within ``MIXING_TOL`` in l1.
    """

    model: QProcessModel
    x: int
    max_steps: int = 2_000_000

    def __post_init__(self):
        self.rate = MIXING_RATE_FACTOR * float(np.max(self.model.lam))
        # pi Q = 0, so the deviation from pi follows the same recursion
        v = _unit(self.model, self.x) - self.model.pi
        powers = [v]
        stall, best = 0, math.inf
        while len(powers) < self.max_steps:
            gap = float(np.sum(np.abs(v)))
            if gap < MIXING_TOL:
                break
            stall = 0 if gap < 0.999 * best else stall + 1
            best = min(best, gap)
            if stall > 5_000:  # rounding floor reached
                break
            v = v + self.model.apply_Q(v) / self.rate
            powers.append(v)
        self.deviations = np.array(powers)

    def deviation(self, s: float) -> np.ndarray:
        """``exp(sQ)(x, .) - pi``, exactly zero once the row has mixed."""
        mu = self.rate * s
        K = self.deviations.shape[0] - 1
        if mu == 0.0:
            return self.deviations[0].copy()
        spread = 12.0 * math.sqrt(mu) + 12.0
        lo = max(0, int(mu - spread))
        if lo > K:
            return np.zeros(self.model.N + 1)
        hi = min(K, int(mu + spread) + 1)
        w = stats.poisson.pmf(np.arange(lo, hi + 1), mu)
        return w @ self.deviations[lo:hi + 1]

    def row(self, s: float) -> np.ndarray:
        """Row ``x`` of ``exp(sQ)``."""
        return self.model.pi + self.deviation(s)


# ---------------------------------------------------------------------------
# distances and control functions


def f_norm_distance(row, pi, f=None) -> float:
    """``sum_i f_i |row_i - pi_i|`` (``f = 1`` gives twice the total variation)."""
    row = np.asarray(row, dtype=float)
    pi = np.asarray(pi, dtype=float)
    f = np.ones_like(pi) if f is None else np.asarray(f, dtype=float)
    if np.any(f < 1.0):
        raise DomainError("control function must satisfy f >= 1")
    return float(np.sum(f * np.abs(row - pi)))


@dataclass(frozen=True)
class SummabilityReport:
    case: str
    partial_sum: float
    tail_fraction: float
    summable: bool


def summability_report(case: str, params, model: QProcessModel) -> SummabilityReport:
    """Numerical check of each case's summability hypothesis on the truncated range.

    ``tail_fraction`` is the share of the last tenth of the terms; the series
    is declared summable when it is below ``1e-6``.
    """
    lam, p = model.lam[1:], model.p
    th = params["theta"]
    inv = np.maximum(1.0, 1.0 / lam)
    with np.errstate(over="ignore"):
        if case == "a":
            terms = p * inv * lam ** (-0.5) * np.exp(th**2 / lam)
        elif case == "b":
            terms = p * lam ** (-1.0 - th)
        elif case == "c":
            terms = p * inv * np.log(inv) ** th
        else:
            raise DomainError(f"unknown case {case!r}")
    total = float(np.sum(terms))
    tail = float(np.sum(terms[-max(1, terms.size // 10):]))
    frac = tail / total if total > 0 and math.isfinite(total) else (0.0 if total == 0 else math.inf)
    return SummabilityReport(case, total, frac, bool(math.isfinite(total) and frac < 1e-6))


def control_function(case: str, params, model: QProcessModel) -> np.ndarray:
    """Control function ``f`` for cases ``a``, ``b``, ``c``.

    a) ``(1 + lambda^-1/2 exp(theta^2/lambda))^(1-q)``;
    b) ``1 + lambda^(beta-theta)``;
    c) ``[1 + log(1 v 1/lambda)]^(theta-gamma)``.
    """
    lam = model.lam
    th = params["theta"]
    if case == "a":
        q = params.get("q", 0.0)
        if not (th > 0.0 and 0.0 <= q <= 1.0):
            raise DomainError("case a needs theta > 0 and q in [0, 1]")
        log_inner = -0.5 * np.log(lam) + th**2 / lam
        log_f = (1.0 - q) * np.logaddexp(0.0, log_inner)
        if np.max(log_f) > 700.0:
            raise ExponentOverflowError(
                f"case a control function overflows (theta^2/min lambda = {th**2 / lam.min():.3g}); "
                "use a smaller theta or a larger minimal rate"
            )
        return np.exp(log_f)
    if case == "b":
        beta = params["beta"]
        if not 0.0 <= beta <= th:
            raise DomainError("case b needs 0 <= beta <= theta")
        return 1.0 + lam ** (beta - th)
    if case == "c":
        gamma = params["gamma"]
        if not 0.0 <= gamma <= th:
            raise DomainError("case c needs 0 <= gamma <= theta")
        return (1.0 + np.log(np.maximum(1.0, 1.0 / lam))) ** (th - gamma)
    raise DomainError(f"unknown case {case!r}")


# ---------------------------------------------------------------------------
# subordination


@dataclass(frozen=True)
class MixedRow:
    """Mixed row with per-entry standard errors.

    ``deviation`` is the mean of ``exp(S Q)(x, .) - pi`` over draws; keeping it
    separately avoids the rounding floor of subtracting two nearly equal rows.
    """

    row: np.ndarray
    se: np.ndarray
    n: int
    deviation: np.ndarray
    draws: np.ndarray | None = field(default=None, repr=False)

    def distance(self, pi, f=None) -> tuple[float, float]:
        """f-norm distance to ``pi`` with a delta-method standard error."""
        f = np.ones_like(pi) if f is None else np.asarray(f, dtype=float)
        if np.any(f < 1.0):
            raise DomainError("control function must satisfy f >= 1")
        d = float(np.sum(f * np.abs(self.deviation)))
        if self.draws is None:
            return d, 0.0
        g = self.draws @ (f * np.sign(self.deviation))
        return d, float(np.std(g, ddof=1) / math.sqrt(g.size))


def subordinate_row(model: QProcessModel, sampler: SubordinatorSampler, t, x, n, streams=1,
                    cache: MixingCache | None = None) -> MixedRow:
    """Row ``x`` of ``P_phi^t = E exp(S_t Q)`` by Monte Carlo mixing over draws of ``S_t``.

    A deterministic sampler reduces to :func:`transition_row` at ``drift*t``.
    """
    if not t >= 0.0:
        raise DomainError("t must be non-negative")
    if sampler.is_deterministic:
        row = transition_row(model, sampler.params.get("drift", 0.0) * t, x)
        return MixedRow(row, np.zeros_like(row), int(n), row - model.pi)
    if int(n) < MIN_MIXING_DRAWS:
        raise DomainError(f"mixing needs n >= {MIN_MIXING_DRAWS}, got {n}")
    if t == 0.0:
        row = _unit(model, x)
        return MixedRow(row, np.zeros_like(row), int(n), row - model.pi)
    s = sampler.draws(t, n, streams)
    cache = cache if cache is not None and cache.x == x and cache.model is model else MixingCache(model, x)
    devs = np.array([cache.deviation(v) for v in s])
    dev = devs.mean(axis=0)
    se = devs.std(axis=0, ddof=1) / math.sqrt(devs.shape[0])
    return MixedRow(model.pi + dev, se, devs.shape[0], dev, devs)


def subordinate_row_quadrature(model: QProcessModel, a, b, t, x) -> np.ndarray:
    """Gamma-subordinated row ``int exp(sQ)(x, .) Gamma(a t, b)(ds)`` by quadrature."""
    if not t > 0.0:
        raise DomainError("t must be positive")
    cache = MixingCache(model, x)
    dist = stats.gamma(a * t, scale=1.0 / b)
    lo, hi = dist.ppf(1e-15), dist.isf(1e-15)
    row, _ = integrate.quad_vec(lambda s: cache.row(s) * dist.pdf(s), lo, hi, epsabs=1e-13, epsrel=1e-11)
    return row / row.sum()


# ---------------------------------------------------------------------------
# sweeps and fits

RATE_FAMILIES = ("algebraic", "sub-exponential", "logarithmic")


def rate_fit(t_grid, distances=None, family="algebraic", log_distances=None) -> tuple[float, float]:
    """Fitted exponent and rms residual.

    algebraic: slope of ``log d`` vs ``log t``; sub-exponential: slope of
    ``log(-log d)`` vs ``log t``; logarithmic: slope of ``log d`` vs ``log log t``.
    Pass ``log_distances`` instead of ``distances`` for values that underflow.
    """
    t = np.asarray(t_grid, dtype=float)
    if log_distances is None:
        d = np.asarray(distances, dtype=float)
        if np.any(d <= 0.0):
            raise FitError("rate fit needs positive distances")
        with np.errstate(divide="ignore"):
            logd = np.log(d)
    else:
        logd = np.asarray(log_distances, dtype=float)
    if t.size < 6 or logd.size != t.size:
        raise FitError("rate fit needs at least six grid points")
    if np.any(t <= 0.0) or not np.all(np.isfinite(logd)):
        raise FitError("rate fit needs positive distances and times")
    if family == "algebraic":
        x, y = np.log(t), logd
    elif family == "sub-exponential":
        if np.any(logd >= 0.0):
            raise FitError("sub-exponential fit needs distances below 1")
        x, y = np.log(t), np.log(-logd)
    elif family == "logarithmic":
        if np.any(t <= 1.0):
            raise FitError("logarithmic fit needs t > 1")
        x, y = np.log(np.log(t)), logd
    else:
        raise DomainError(f"unknown rate family {family!r}")
    slope, _, rms = linear_fit(x, y)
    return slope, rms


@dataclass(frozen=True)
class DistanceCurve:
    t_grid: np.ndarray
    distances: np.ndarray
    se: np.ndarray
    f_label: str
    fitted_exponent: float | None
    fit_residual: float | None
    rate_prediction: np.ndarray | None = None
    fitted_C: float | None = None

    def envelope_holds(self) -> bool:
        """``distance <= fitted_C * prediction`` at every grid point."""
        if self.rate_prediction is None or self.fitted_C is None:
            raise DomainError("curve has no rate prediction")
        return bool(np.all(self.distances <= self.fitted_C * self.rate_prediction * (1.0 + 1e-12)))

    def to_csv(self, path) -> None:
        pred = self.rate_prediction if self.rate_prediction is not None else np.full(self.t_grid.size, np.nan)
        c = self.fitted_C if self.fitted_C is not None else math.nan
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "distance", "se", "rate_prediction", "fitted_C"])
            for row in zip(self.t_grid, self.distances, self.se, pred):
                w.writerow([repr(float(v)) for v in row] + [repr(float(c))])


def distance_sweep(model: QProcessModel, sampler: SubordinatorSampler | None, f, x, t_grid: Sequence[float],
                   n=10_000, streams=1, family="algebraic", f_label="f", prediction: Callable | None = None,
                   workers=1) -> DistanceCurve:
    """f-norm distance of the plain (``sampler=None``) or subordinated row along ``t_grid``.

    ``prediction`` maps ``t`` to a rate; ``fitted_C`` is then the smallest
    constant with ``distance <= fitted_C * prediction`` on the grid.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise DomainError("empty t grid")
    if np.any(np.diff(t_grid) <= 0.0):
        raise DomainError("t grid must be strictly increasing")
    f = np.ones(model.N + 1) if f is None else np.asarray(f, dtype=float)
    cache = MixingCache(model, x) if sampler is not None and not sampler.is_deterministic else None

    def point(t):
        if sampler is None:
            return f_norm_distance(transition_row(model, t, x), model.pi, f), 0.0
        return subordinate_row(model, sampler, t, x, n, streams, cache).distance(model.pi, f)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            pts = list(pool.map(point, t_grid))
    else:
        pts = [point(t) for t in t_grid]
    d = np.array([p[0] for p in pts])
    se = np.array([p[1] for p in pts])
    exponent = residual = None
    if t_grid.size >= 6 and np.all(d > 0.0):
        exponent, residual = rate_fit(t_grid, d, family)
    pred = fitted_C = None
    if prediction is not None:
        pred = np.array([float(prediction(t)) for t in t_grid])
        fitted_C = float(np.max(d / pred))
    return DistanceCurve(t_grid, d, se, f_label, exponent, residual, pred, fitted_C)


def case_b_prediction(phi, beta):
    """``t -> 1 ^ [phi^{-1}(1/t)]^beta`` for a subordinated case-b chain."""
    return lambda t: theorem1_rate("b", {"beta": beta}, phi, t)


def truncation_stability(N, t_grid, f_case="b", params=None, x=0) -> float:
    """Max difference of plain distances computed at ``N`` and ``2N``."""
    params = {"theta": 2.0, "beta": 1.0} if params is None else params
    out = []
    for m in (N, 2 * N):
        model = default_model(m)
        f = control_function(f_case, params, model)
        out.append(np.array([f_norm_distance(transition_row(model, t, x), model.pi, f) for t in t_grid]))
    return float(np.max(np.abs(out[0] - out[1])))
