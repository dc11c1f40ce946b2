"""Reproducible sampling of subordinators.

Every batch is a pure function of ``(family, params, t, n, seed, stream_id)``.
Random numbers come from a Philox counter-based generator keyed by
``SeedSequence(seed, spawn_key=(stream_id, substream))``, so parallel workers
on distinct streams never overlap and re-running a stream reproduces it
exactly.  Draws are generated sequentially, hence increasing ``n`` only
appends values (prefix stability).

Stable normalization: ``phi(u) = scale * u**alpha`` corresponds to the Levy
density ``c * y**(-1-alpha)`` with ``scale = c * Gamma(1-alpha) / alpha``; see
:func:`levy_constant_to_scale`.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import special, stats

from subrates.bernstein import BernsteinFunction, catalog
from subrates.errors import ConstructionError, DomainError

SAMPLER_FAMILIES = ("stable", "gamma", "compound-poisson-drift")


def generator(seed: int, stream_id: int = 0, substream: int = 0) -> np.random.Generator:
    """Philox generator for one ``(seed, stream_id, substream)`` key."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream_id), int(substream)))
    return np.random.Generator(np.random.Philox(ss))


def open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform variates on the open interval (0, 1)."""
    k = rng.integers(0, 2**53, size=size, dtype=np.int64)
    return (k + 0.5) / 2.0**53


def levy_constant_to_scale(c: float, alpha: float) -> float:
    return c * special.gamma(1.0 - alpha) / alpha


def scale_to_levy_constant(scale: float, alpha: float) -> float:
    return scale * alpha / special.gamma(1.0 - alpha)


@dataclass(frozen=True)
class SampleBatch:
    t: float
    values: np.ndarray
    seed: int
    stream_id: int

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "value"])
            for i, v in enumerate(self.values):
                w.writerow([i, repr(float(v))])


def _check_common(t, n):
    if not t >= 0.0:
        raise DomainError(f"t must be non-negative, got {t}")
    if int(n) < 1:
        raise DomainError(f"n must be at least 1, got {n}")


def kanter_angle_factor(alpha: float, angle: np.ndarray) -> np.ndarray:
    """``log A(U)`` in Kanter's representation ``S = (A(U)/E)**((1-alpha)/alpha)``."""
    return (
        (np.log(np.sin(alpha * angle)) - np.log(np.sin(angle))) / (1.0 - alpha)
        + np.log(np.sin((1.0 - alpha) * angle))
        - np.log(np.sin(alpha * angle))
    )


def sample_stable(alpha, scale, t, n, seed, stream_id=0) -> SampleBatch:
    """Draws of ``S_t`` for ``phi(u) = scale * u**alpha``.

    ``S_t`` has the law of ``(scale*t)**(1/alpha) * S`` with ``S`` standard
    positive stable, generated from two independent uniforms.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not scale > 0.0:
        raise DomainError("scale must be positive")
    _check_common(t, n)
    if t == 0.0:
        return SampleBatch(0.0, np.zeros(int(n)), seed, stream_id)
    u = open_uniform(generator(seed, stream_id), (int(n), 2))
    angle = np.pi * u[:, 0]
    expo = -np.log(u[:, 1])
    log_s = (1.0 - alpha) / alpha * (kanter_angle_factor(alpha, angle) - np.log(expo))
    with np.errstate(over="ignore"):
        values = np.exp(log_s + math.log(scale * t) / alpha)
    return SampleBatch(float(t), values, seed, stream_id)


def sample_stable_angles(alpha, n, seed, stream_id=0) -> np.ndarray:
    """The angle component of :func:`sample_stable` (same stream, same draws).

    Used by conditional Monte Carlo estimators that integrate the exponential
    component out exactly.
    """
    u = open_uniform(generator(seed, stream_id), (int(n), 2))
    return np.pi * u[:, 0]


def sample_gamma(a, b, t, n, seed, stream_id=0) -> SampleBatch:
    """Draws of ``S_t ~ Gamma(shape=a*t, rate=b)``, i.e. ``phi(u) = a*log(1+u/b)``."""
    if not (a > 0.0 and b > 0.0):
        raise DomainError("gamma subordinator needs a, b > 0")
    _check_common(t, n)
    if t == 0.0:
        return SampleBatch(0.0, np.zeros(int(n)), seed, stream_id)
    values = generator(seed, stream_id).gamma(a * t, 1.0 / b, size=int(n))
    return SampleBatch(float(t), values, seed, stream_id)


def exponential_jumps(mean: float = 1.0):
    def draw(rng, size):
        return rng.exponential(mean, size=size)

    return draw


def unit_jumps(size: float = 1.0):
    def draw(rng, count):
        return np.full(count, float(size))

    return draw


def sample_compound_poisson_drift(drift, rate, jump_sampler, t, n, seed, stream_id=0) -> SampleBatch:
    """``S_t = drift*t + sum of N_t jumps`` with ``N_t ~ Poisson(rate*t)``."""
    if not drift >= 0.0:
        raise DomainError(f"drift must be non-negative, got {drift}")
    if not rate >= 0.0:
        raise DomainError(f"jump rate must be non-negative, got {rate}")
    _check_common(t, n)
    n = int(n)
    counts = generator(seed, stream_id, 0).poisson(rate * t, size=n)
    total = int(counts.sum())
    values = np.full(n, drift * t)
    if total:
        jumps = np.asarray(jump_sampler(generator(seed, stream_id, 1), total), dtype=float)
        if np.any(jumps <= 0.0):
            raise DomainError("jump sampler produced non-positive jumps")
        owner = np.repeat(np.arange(n), counts)
        values += np.bincount(owner, weights=jumps, minlength=n)
    return SampleBatch(float(t), values, seed, stream_id)


def stable_density_bound(alpha, c, t, s):
    """Shape ``t * s**(-1-alpha) * exp(-t * s**(-alpha))`` of the stable density bound.

    The multiplicative constant depends on ``(alpha, c)`` and is not known in
    closed form; fit it with :func:`fit_density_constant`.
    """
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.exp(math.log(t) - (1.0 + alpha) * np.log(s) - t * np.power(s, -alpha))
    return float(out) if out.ndim == 0 else out


def density_estimate(values, s_grid):
    """Kernel density of positive samples, estimated on the log scale."""
    values = np.asarray(values, dtype=float)
    kde = stats.gaussian_kde(np.log(values[values > 0.0]))
    s_grid = np.asarray(s_grid, dtype=float)
    return kde(np.log(s_grid)) / s_grid


def fit_density_constant(values, alpha, t, s_grid) -> float:
    """Smallest ``C`` with ``kde(s) <= C * stable_density_bound(alpha, ., t, s)`` on the grid."""
    dens = density_estimate(values, s_grid)
    return float(np.max(dens / stable_density_bound(alpha, None, t, s_grid)))


@dataclass(frozen=True)
class SubordinatorSampler:
    """A named subordinator family with its Bernstein function and seed."""

    family: str
    params: Mapping = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in SAMPLER_FAMILIES:
            raise ConstructionError(f"unknown sampler family {self.family!r}")
        p = dict(self.params)
        try:
            if self.family == "stable":
                if not 0.0 < p.get("alpha", 0.5) < 1.0:
                    raise DomainError("alpha must lie in (0, 1)")
            elif self.family == "compound-poisson-drift":
                if p.get("drift", 0.0) < 0.0:
                    raise DomainError("drift must be non-negative")
            self.phi  # noqa: B018 - validates parameters
        except TypeError as exc:
            raise ConstructionError(str(exc)) from None

    @classmethod
    def stable(cls, alpha=0.5, scale=1.0, seed=0):
        return cls("stable", {"alpha": alpha, "scale": scale}, seed)

    @classmethod
    def stable_from_levy_constant(cls, alpha, c, seed=0):
        return cls.stable(alpha, levy_constant_to_scale(c, alpha), seed)

    @classmethod
    def gamma(cls, a=1.0, b=1.0, seed=0):
        return cls("gamma", {"a": a, "b": b}, seed)

    @classmethod
    def compound_poisson_drift(cls, drift=0.0, rate=1.0, jumps="exponential", jump_mean=1.0, seed=0):
        return cls(
            "compound-poisson-drift",
            {"drift": drift, "rate": rate, "jumps": jumps, "jump_mean": jump_mean},
            seed,
        )

    @classmethod
    def deterministic(cls, drift=1.0, seed=0):
        """Pure drift: ``S_t = drift * t``."""
        return cls.compound_poisson_drift(drift=drift, rate=0.0, seed=seed)

    @property
    def phi(self) -> BernsteinFunction:
        return _phi_cache(self.family, tuple(sorted(dict(self.params).items())))

    @property
    def is_deterministic(self) -> bool:
        return self.family == "compound-poisson-drift" and self.params.get("rate", 1.0) == 0.0

    def sample(self, t, n, stream_id=0) -> SampleBatch:
        p = dict(self.params)
        if self.family == "stable":
            return sample_stable(p.get("alpha", 0.5), p.get("scale", 1.0), t, n, self.seed, stream_id)
        if self.family == "gamma":
            return sample_gamma(p.get("a", 1.0), p.get("b", 1.0), t, n, self.seed, stream_id)
        jumps = p.get("jumps", "exponential")
        mean = p.get("jump_mean", 1.0)
        draw = exponential_jumps(mean) if jumps == "exponential" else unit_jumps(mean)
        return sample_compound_poisson_drift(
            p.get("drift", 0.0), p.get("rate", 1.0), draw, t, n, self.seed, stream_id
        )

    def draws(self, t, n, streams: int = 1, workers: int = 1) -> np.ndarray:
        """Concatenate ``n`` draws split evenly over streams ``0..streams-1``."""
        sizes = _split(int(n), int(streams))
        jobs = [(t, m, k) for k, m in enumerate(sizes) if m > 0]
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                parts = list(pool.map(lambda a: self.sample(*a).values, jobs))
        else:
            parts = [self.sample(*a).values for a in jobs]
        return np.concatenate(parts)


def _split(n, streams):
    if streams < 1:
        raise DomainError("need at least one stream")
    base, extra = divmod(n, streams)
    return [base + (1 if k < extra else 0) for k in range(streams)]


_PHI: dict = {}


def _phi_cache(family, items):
    key = (family, items)
    if key not in _PHI:
        _PHI[key] = catalog(family, dict(items))
    return _PHI[key]
