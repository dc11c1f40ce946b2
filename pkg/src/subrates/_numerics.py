"""Quadrature and fitting helpers shared across modules."""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from subrates.errors import FitError, IntegrationError

# QUADPACK evaluates 21 nodes per subinterval (QAGS) or 15 (QAGI).
NODES_PER_INTERVAL = 21


def quad(func, a, b, *, epsabs=1e-10, epsrel=1e-8, max_nodes=10_000, points=None):
    """Adaptive quadrature with a node budget; returns ``(value, abserr, nodes)``.

    Raises :class:`IntegrationError` when QUADPACK reports non-convergence and
    the error estimate exceeds the requested tolerance by more than 100x.
    """
    limit = max(50, max_nodes // NODES_PER_INTERVAL)
    kwargs = dict(epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    if points is not None and np.isfinite(a) and np.isfinite(b):
        kwargs["points"] = points
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(func, a, b, **kwargs)
    value, abserr, info = out[0], out[1], out[2]
    nodes = int(info.get("neval", 0)) if isinstance(info, dict) else 0
    ier = 0
    if len(out) > 3:
        ier = 1  # a message is only returned when ier > 0
    if not math.isfinite(value):
        raise IntegrationError(
            f"quadrature on [{a}, {b}] returned a non-finite value",
            {"value": value, "abserr": abserr, "neval": nodes},
        )
    if ier and abserr > 100.0 * max(epsabs, epsrel * abs(value)):
        raise IntegrationError(
            f"quadrature on [{a}, {b}] did not converge: {out[3]}",
            {"value": value, "abserr": abserr, "neval": nodes, "message": out[3]},
        )
    return value, abserr, nodes


def loglog_fit(x, y):
    """Least-squares line through ``(log x, log y)``; returns ``(slope, intercept, rms)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(np.log(x)) == 0.0:
        raise FitError("degenerate fit: need at least two distinct abscissae")
    if np.any(y <= 0) or np.any(x <= 0):
        raise FitError("log-log fit needs strictly positive data")
    return linear_fit(np.log(x), np.log(y))


def linear_fit(x, y):
    """Ordinary least squares ``y ~ slope*x + intercept``; returns ``(slope, intercept, rms)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(x) == 0.0:
        raise FitError("degenerate fit: zero variance in the abscissa")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise FitError("fit data contain non-finite values")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))
