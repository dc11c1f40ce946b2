"""Command-line experiment runner.

Each invocation runs one experiment, writes CSV tables and a ``summary.json``
into the output directory, and exits with

* 0 when every in-config assertion passes,
* 1 when an assertion or a numeric computation fails,
* 2 when the configuration or the arguments are invalid.

Configuration files are INI files read with :mod:`configparser`; see the
README for the schema.  Command-line flags override file values, and
``--set section.key=value`` overrides single entries.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from subrates import __version__
from subrates import bernstein, moments, qprocess, ratecalc
from subrates.errors import SubratesError
from subrates.subordinators import SubordinatorSampler

OUT_ENV = "SUBRATES_OUT"
DEFAULT_OUT = "subrates-out"
KINDS = {
    "eval": "eval",
    "invert": "invert",
    "moment": "moment-sweep",
    "bound": "bound-check",
    "qprocess": "qprocess-rate",
    "subordinate": "subordinate-rate",
    "drift": "drift-check",
    "props": "property-suite",
}
MC_KINDS = {"moment-sweep", "bound-check", "qprocess-rate", "subordinate-rate"}
CSV_VERSION = 1


class ConfigError(ValueError):
    """Invalid experiment configuration (exit status 2)."""


# ---------------------------------------------------------------------------
# configuration


def _value(text: str):
    text = text.strip()
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def _floats(text) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        text = " ".join(str(v) for v in text)
    try:
        return [float(v) for v in str(text).replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"expected a list of numbers, got {text!r}") from exc


@dataclass
class ExperimentConfig:
    """Validated experiment description."""

    kind: str
    sections: dict = field(default_factory=dict)
    seed: int = 0
    streams: int = 1
    n: int = 100_000
    out: Path = Path(DEFAULT_OUT)

    def section(self, name) -> dict:
        return dict(self.sections.get(name, {}))

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    @property
    def t_grid(self) -> np.ndarray:
        g = self.section("grid")
        if "t" in g:
            return np.asarray(_floats(g["t"]))
        if "t_min" in g or "t_max" in g or "points" in g:
            lo, hi = float(g.get("t_min", 1.0)), float(g.get("t_max", 1e3))
            pts = int(g.get("points", 8))
            if pts < 1:
                return np.array([])
            if g.get("spacing", "log") == "log":
                return np.geomspace(lo, hi, pts)
            return np.linspace(lo, hi, pts)
        return np.asarray(_DEFAULT_GRIDS.get(self.kind, []), dtype=float)

    def canonical(self) -> dict:
        return {
            "kind": self.kind,
            "sections": {k: {kk: str(vv) for kk, vv in sorted(v.items())} for k, v in sorted(self.sections.items())},
            "seed": self.seed,
            "streams": self.streams,
            "n": self.n,
        }

    @property
    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


_DEFAULT_GRIDS = {
    "moment-sweep": [10.0 ** k for k in np.arange(1.0, 4.01, 0.5)],
    "bound-check": [10.0 ** k for k in np.arange(1.0, 4.01, 0.5)],
    "qprocess-rate": list(np.geomspace(1.0, 1e3, 8)),
    "subordinate-rate": list(np.geomspace(1.0, 1e4, 9)),
}


def load_config(kind, path=None, overrides=(), seed=None, streams=None, n=None, out=None) -> ExperimentConfig:
    sections: dict = {}
    if path is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        sections = {s: {k: _value(v) for k, v in parser.items(s)} for s in parser.sections()}
    for item in overrides:
        key, sep, val = item.partition("=")
        sec, dot, name = key.partition(".")
        if not (sep and dot and name):
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        sections.setdefault(sec.strip(), {})[name.strip()] = _value(val)
    exp = sections.get("experiment", {})
    if "kind" in exp and kind is not None and exp["kind"] != kind:
        raise ConfigError(f"config describes {exp['kind']!r} but the subcommand runs {kind!r}")
    kind = kind or exp.get("kind")
    if kind not in KINDS.values():
        raise ConfigError(f"unknown experiment kind {kind!r}")
    out_dir = out or exp.get("out") or os.environ.get(OUT_ENV) or DEFAULT_OUT
    cfg = ExperimentConfig(
        kind=kind,
        sections={k: v for k, v in sections.items() if k != "experiment"},
        seed=int(seed if seed is not None else exp.get("seed", 0)),
        streams=int(streams if streams is not None else exp.get("streams", 1)),
        n=int(n if n is not None else exp.get("n", 100_000)),
        out=Path(str(out_dir)),
    )
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    if cfg.streams < 1:
        raise ConfigError("streams must be at least 1")
    if cfg.kind in MC_KINDS and cfg.n < 1_000:
        raise ConfigError(f"n must be at least 1000 for {cfg.kind}, got {cfg.n}")
    if cfg.kind in _DEFAULT_GRIDS:
        grid = cfg.t_grid
        if grid.size == 0:
            raise ConfigError("empty t grid")
        if np.any(np.diff(grid) <= 0.0):
            raise ConfigError("t grid must be strictly increasing")
        if np.any(grid < 0.0) or not np.all(np.isfinite(grid)):
            raise ConfigError("t grid must be finite and non-negative")
    if "phi" in cfg.sections:
        _phi(cfg)
    if "subordinator" in cfg.sections or cfg.kind in MC_KINDS:
        _sampler(cfg)


def _family_params(sec: dict):
    params = {k: v for k, v in sec.items() if k != "family"}
    return sec.get("family"), params


def _phi(cfg) -> bernstein.BernsteinFunction:
    sec = cfg.section("phi")
    if not sec:
        return _sampler(cfg).phi
    fam, params = _family_params(sec)
    try:
        return bernstein.catalog(fam, params)
    except (SubratesError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid [phi] section: {exc}") from exc


def _sampler(cfg) -> SubordinatorSampler:
    fam, params = _family_params(cfg.section("subordinator") or {"family": "stable", "alpha": 0.5, "scale": 1.0})
    fam = str(fam).replace("_", "-")
    try:
        return SubordinatorSampler(fam, params, cfg.seed)
    except (SubratesError, TypeError) as exc:
        raise ConfigError(f"invalid [subordinator] section: {exc}") from exc


# ---------------------------------------------------------------------------
# experiments


@dataclass
class Outcome:
    tables: dict = field(default_factory=dict)  # name -> (header, rows)
    results: dict = field(default_factory=dict)
    assertions: dict = field(default_factory=dict)


def _exp_eval(cfg, args) -> Outcome:
    phi = _phi(cfg)
    us = _floats(args.values) if args.values else _floats(cfg.get("eval", "u", "0.1 1 10"))
    rows = [(u, bernstein.evaluate(phi, u)) for u in us]
    return Outcome({"eval": (("u", "phi"), rows)}, {"phi": phi.name})


def _exp_invert(cfg, args) -> Outcome:
    phi = _phi(cfg)
    vs = _floats(args.values) if args.values else _floats(cfg.get("invert", "v", "0.1 1 10"))
    rows = [(v, bernstein.invert(phi, v)) for v in vs]
    return Outcome({"invert": (("v", "u"), rows)}, {"phi": phi.name})


def _exp_moment(cfg, args) -> Outcome:
    sec = cfg.section("moment")
    which = sec.get("kind", "subexp")
    sampler = _sampler(cfg)
    out = Outcome()
    rows = []
    ok = True
    if which == "neg":
        beta = float(sec.get("beta", 0.5))
        phi = _phi(cfg)
        method = sec.get("method", "quadrature")
        for t in cfg.t_grid:
            est = (moments.neg_moment_quadrature(phi, beta, t) if method == "quadrature"
                   else moments.neg_moment_mc(sampler, beta, t, cfg.n, cfg.streams))
            low = moments.neg_moment_lower_bound(phi, beta, t)
            ok &= low <= est.value + 4.0 * est.error
            rows.append((t, est.value, est.error, low, math.nan))
        out.assertions["lower_bound_below_moment"] = bool(ok)
    elif which == "subexp":
        theta, delta = float(sec.get("theta", 1.0)), float(sec.get("delta", 0.5))
        alpha = sampler.params.get("alpha", 0.5)
        c = bernstein_levy_constant(sampler)
        kit = moments.build_ode_kit(theta, delta, c, alpha) if c is not None else None
        for t in cfg.t_grid:
            est = moments.subexp_moment_mc(sampler, theta, delta, t, cfg.n, cfg.streams, sec.get("method", "auto"))
            high = moments.subexp_bound_ode(kit, t) if kit else math.nan
            if kit:
                ok &= est.value <= high + 4.0 * est.error
            rows.append((t, est.value, est.error, math.nan, high))
        if kit:
            out.assertions["mc_below_ode_bound"] = bool(ok)
    elif which == "log":
        gamma = float(sec.get("gamma", 1.0))
        for t in cfg.t_grid:
            est = moments.log_moment_mc(sampler, gamma, t, cfg.n, cfg.streams, cap=bool(sec.get("cap", True)))
            rows.append((t, est.value, est.error, math.nan, math.nan))
    else:
        raise ConfigError(f"unknown moment kind {which!r}")
    out.tables["moment"] = (moments.SWEEP_COLUMNS, rows)
    out.results["moment"] = which
    return out


def bernstein_levy_constant(sampler):
    if sampler.family != "stable":
        return None
    from subrates.subordinators import scale_to_levy_constant

    return scale_to_levy_constant(sampler.params.get("scale", 1.0), sampler.params.get("alpha", 0.5))


def _exp_bound(cfg, args) -> Outcome:
    sec = cfg.section("bound")
    which = sec.get("kind", "subexp")
    out = Outcome()
    rows = []
    if which == "subexp":
        sampler = _sampler(cfg)
        c = bernstein_levy_constant(sampler)
        if c is None:
            raise ConfigError("the sub-exponential bound check needs a stable subordinator")
        alpha = sampler.params.get("alpha", 0.5)
        theta, delta = float(sec.get("theta", 1.0)), float(sec.get("delta", 0.5))
        kit = moments.build_ode_kit(theta, delta, c, alpha)
        mc_ok = chain_ok = True
        logs = []
        for t in cfg.t_grid:
            est = moments.subexp_moment_mc(sampler, theta, delta, t, cfg.n, cfg.streams, sec.get("method", "auto"))
            ode = moments.subexp_bound_ode(kit, t)
            closed = moments.subexp_bound_closed(theta, delta, c, alpha, t)
            mc_ok &= est.value <= ode + 4.0 * est.error
            chain_ok &= ode <= closed * (1.0 + 1e-9)
            logs.append(est.log_value)
            rows.append((t, est.value, est.error, ode, closed))
        out.assertions["mc_below_ode_bound"] = bool(mc_ok)
        out.assertions["ode_below_closed_bound"] = bool(chain_ok)
        grid = cfg.t_grid
        if grid.size >= 6:
            slope, resid = qprocess.rate_fit(grid, family="sub-exponential", log_distances=logs)
            out.results.update(fitted_exponent=slope, fit_residual=resid,
                               predicted_exponent=moments.subexp_exponent(delta, alpha))
    elif which == "neg":
        phi = _phi(cfg)
        beta = float(sec.get("beta", 0.5))
        ok = True
        margins = []
        for t in cfg.t_grid:
            est = moments.neg_moment_quadrature(phi, beta, t)
            low = moments.neg_moment_lower_bound(phi, beta, t)
            ok &= low < est.value
            margins.append(est.value - low)
            rows.append((t, est.value, est.error, low, math.nan))
        out.assertions["lower_bound_below_quadrature"] = bool(ok)
        out.results["min_margin"] = float(min(margins))
    else:
        raise ConfigError(f"unknown bound kind {which!r}")
    out.tables["bound"] = (moments.SWEEP_COLUMNS, rows)
    return out


def _model(cfg, scale_N=1):
    sec = cfg.section("model")
    N = int(sec.get("n", 200)) * scale_N
    lam0 = float(sec.get("lambda0", 1.0))
    rule = sec.get("lambda_rule", "inverse")
    power = float(sec.get("lambda_power", 1.0))
    ratio = float(sec.get("p_ratio", 0.5))
    if rule == "inverse":
        lam = lambda i: lam0 if i == 0 else float(i) ** (-power)  # noqa: E731
    elif rule == "constant":
        lam = lambda i: lam0 if i == 0 else float(sec.get("lambda", 1.0))  # noqa: E731
    else:
        raise ConfigError(f"unknown lambda_rule {rule!r}")
    try:
        return qprocess.build(lam, lambda i: ratio**i, N), int(sec.get("x", 0))
    except SubratesError as exc:
        raise ConfigError(f"invalid [model] section: {exc}") from exc


def _exp_qprocess(cfg, args) -> Outcome:
    model, x = _model(cfg)
    ctl = cfg.section("control") or {"case": "b", "theta": 2.0, "beta": 1.0}
    case = ctl.get("case", "b")
    params = {k: float(v) for k, v in ctl.items() if k != "case"}
    f = qprocess.control_function(case, params, model)
    report = qprocess.summability_report(case, params, model)
    sampler = None if cfg.get("subordinator", "family") == "none" else _sampler(cfg)
    prediction = None
    if case == "b" and sampler is not None:
        prediction = qprocess.case_b_prediction(sampler.phi, params["beta"])
    family = cfg.get("fit", "family", "algebraic")
    curve = qprocess.distance_sweep(model, sampler, f, x, cfg.t_grid, cfg.n, cfg.streams, family,
                                    f_label=f"case-{case}", prediction=prediction)
    out = Outcome()
    pred = curve.rate_prediction if curve.rate_prediction is not None else [math.nan] * curve.t_grid.size
    c = curve.fitted_C if curve.fitted_C is not None else math.nan
    out.tables["distance"] = (("t", "distance", "se", "rate_prediction", "fitted_C"),
                              [(t, d, s, p, c) for t, d, s, p in zip(curve.t_grid, curve.distances, curve.se, pred)])
    out.results.update(fitted_exponent=curve.fitted_exponent, fit_residual=curve.fit_residual, fitted_C=curve.fitted_C,
                       summability_partial_sum=report.partial_sum, summability_tail_fraction=report.tail_fraction)
    out.assertions["summability"] = report.summable
    if prediction is not None:
        out.assertions["envelope"] = curve.envelope_holds()
        if cfg.t_grid.size >= 6:
            logs = [math.log(prediction(t)) for t in cfg.t_grid]
            pexp, _ = qprocess.rate_fit(cfg.t_grid, family=family, log_distances=logs)
            out.results["predicted_exponent"] = pexp
            tol = cfg.get("fit", "exponent_tolerance")
            if tol is not None:
                fe = curve.fitted_exponent
                out.assertions["exponent"] = bool(fe is not None and abs(fe - pexp) <= float(tol) * abs(pexp))
    if cfg.get("fit", "truncation_check", True):
        out.results["truncation_gap"] = _truncation_gap(cfg, case, params, x, cfg.t_grid)
        out.assertions["truncation_stability"] = out.results["truncation_gap"] < 1e-6
    return out


def _truncation_gap(cfg, case, params, x, grid):
    """Max gap between plain distances at ``N`` and ``2N``."""
    gaps = np.zeros(len(grid))
    vals = []
    for scale in (1, 2):
        m, _ = _model(cfg, scale)
        f = qprocess.control_function(case, params, m)
        vals.append([qprocess.f_norm_distance(qprocess.transition_row(m, t, x), m.pi, f) for t in grid])
    gaps = np.abs(np.subtract(*vals))
    return float(np.max(gaps))


def _rate(cfg) -> moments.RateFunction:
    sec = cfg.section("rate") or {"family": "algebraic", "beta": 0.5}
    fam = sec.get("family", "algebraic")
    if fam == "sub-exponential":
        return moments.RateFunction.sub_exponential(float(sec.get("theta", 1.0)), float(sec.get("delta", 1.0)))
    if fam == "algebraic":
        return moments.RateFunction.algebraic(float(sec.get("beta", 0.5)))
    if fam == "logarithmic":
        return moments.RateFunction.logarithmic(float(sec.get("gamma", 1.0)))
    raise ConfigError(f"unknown rate family {fam!r}")


def _exp_subordinate(cfg, args) -> Outcome:
    r = _rate(cfg)
    sampler = _sampler(cfg)
    rows, vals, ses = [], [], []
    for t in cfg.t_grid:
        est = moments.rate_subordinate(r, sampler, t, cfg.n, cfg.streams)
        vals.append(est.value)
        ses.append(est.error)
        rows.append((t, est.value, est.error, math.nan, math.nan))
    mono = all(v2 <= v1 + 3.0 * math.hypot(s1, s2) for v1, v2, s1, s2 in zip(vals, vals[1:], ses, ses[1:]))
    return Outcome({"rate": (moments.SWEEP_COLUMNS, rows)}, {"rate_family": r.family}, {"monotone": bool(mono)})


def _driver(cfg):
    sec = cfg.section("driver") or {"family": "identity"}
    fam = sec.get("family", "identity")
    if fam == "identity":
        return (lambda v: v), 0.5
    if fam == "power":
        d = ratecalc.ConcaveRateDriver.power(float(sec.get("c1", 1.0)), float(sec.get("kappa", 0.5)))
    elif fam == "log-linear":
        d = ratecalc.ConcaveRateDriver.log_linear(float(sec.get("c1", 1.0)), float(sec.get("p", 1.0)))
    else:
        raise ConfigError(f"unknown driver family {fam!r}")
    return d, float(sec.get("q", 0.5))


def _exp_drift(cfg, args) -> Outcome:
    sec = cfg.section("drift")
    spec = ratecalc.ou_quadratic_spec(float(sec.get("b_const", 4.0)), float(sec.get("m", 2.0)))
    driver, q = _driver(cfg)
    grid = np.linspace(float(sec.get("x_min", -10.0)), float(sec.get("x_max", 10.0)), int(sec.get("points", 2001)))
    rep = ratecalc.drift_inequality_check(spec, driver, grid)
    out = Outcome({"drift": (("x", "lhs", "rhs", "margin"), list(zip(rep.x, rep.lhs, rep.rhs, rep.margin)))})
    out.results.update(worst_margin=rep.worst_margin, violations=[float(v) for v in rep.violations[:20]],
                       violation_count=int(rep.violations.size))
    out.assertions["drift_inequality"] = rep.passed
    if isinstance(driver, ratecalc.ConcaveRateDriver):
        tg = cfg.t_grid if cfg.section("grid") else np.geomspace(1.0, 1e4, 20)
        out.tables["drift_rate"] = (("t", "rate"), [(t, ratecalc.drift_rate(driver, q, t)) for t in tg])
    return out


def _exp_props(cfg, args) -> Outcome:
    sec = cfg.section("props")
    samples = int(sec.get("samples", 100_000))
    points = int(sec.get("points", 1000))
    taus = _floats(sec.get("tau", "1 1.5 2 4"))
    alphas = _floats(sec.get("alpha", "0.1 0.3 0.5 0.7 0.9"))
    grid = np.geomspace(1e-12, 0.999, points)
    rows, a1 = [], True
    for tau in taus:
        for alpha in alphas:
            rep = moments.appendix_g_check(tau, alpha, grid)
            a1 &= rep.passed
            rows.append((tau, alpha, rep.min_first_difference, rep.min_second_difference, int(rep.passed)))
    lp = moments.fuzz_log_product(samples, cfg.seed)
    ef = moments.fuzz_efds(samples, cfg.seed)
    out = Outcome({"convexity": (("tau", "alpha", "min_first_difference", "min_second_difference", "passed"), rows)})
    out.results.update(
        log_product_violations=lp.violations, log_product_worst=lp.worst_input,
        efds_violations=ef.violations, samples=samples,
    )
    out.assertions.update(convexity=bool(a1), log_product=lp.passed, efds=ef.passed)
    return out


EXPERIMENTS = {
    "eval": _exp_eval,
    "invert": _exp_invert,
    "moment-sweep": _exp_moment,
    "bound-check": _exp_bound,
    "qprocess-rate": _exp_qprocess,
    "subordinate-rate": _exp_subordinate,
    "drift-check": _exp_drift,
    "property-suite": _exp_props,
}


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def write_table(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def run(cfg: ExperimentConfig, args=None) -> tuple[int, dict]:
    """Run one experiment; returns the exit status and the summary."""
    outcome = EXPERIMENTS[cfg.kind](cfg, args or argparse.Namespace(values=None))
    cfg.out.mkdir(parents=True, exist_ok=True)
    files = []
    for name, (header, rows) in outcome.tables.items():
        path = cfg.out / f"{name}.csv"
        write_table(path, header, rows)
        files.append(path.name)
    failed = sorted(k for k, v in outcome.assertions.items() if not v)
    summary = {
        "kind": cfg.kind,
        "config_hash": cfg.hash,
        "seed": cfg.seed,
        "streams": cfg.streams,
        "n": cfg.n,
        "config": cfg.canonical(),
        "versions": {"subrates": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "csv_format": CSV_VERSION},
        "files": files,
        "results": _jsonable(outcome.results),
        "assertions": {k: bool(v) for k, v in sorted(outcome.assertions.items())},
        "failed": failed,
    }
    with open(cfg.out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return (1 if failed else 0), summary


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subrates", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, kind in list(KINDS.items()) + [("run", None)]:
        p = sub.add_parser(name, help=kind or "run the experiment named in the config file")
        p.add_argument("--config", help="INI configuration file")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
        p.add_argument("--streams", type=int)
        p.add_argument("--n", type=int, help="Monte Carlo sample size")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")
        if name in ("eval", "invert"):
            p.add_argument("values", nargs="*", help="arguments u (eval) or values v (invert)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    if not hasattr(args, "values"):
        args.values = None
    kind = KINDS.get(args.command)
    try:
        cfg = load_config(kind, args.config, args.set, args.seed, args.streams, args.n, args.out)
    except (ConfigError, SubratesError, ValueError) as exc:
        print(f"subrates: invalid configuration: {exc}", file=sys.stderr)
        return 2
    try:
        status, summary = run(cfg, args)
    except ConfigError as exc:
        print(f"subrates: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, SubratesError, ValueError) as exc:
        print(f"subrates: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for name in summary["failed"]:
        print(f"subrates: assertion failed: {name}", file=sys.stderr)
    if args.command in ("eval", "invert"):
        header, rows = next(iter(_tables_from(cfg)))
        for row in rows:
            print(",".join(row))
    print(json.dumps({"kind": summary["kind"], "config_hash": summary["config_hash"],
                      "assertions": summary["assertions"], "out": str(cfg.out)}, sort_keys=True))
    return status


def _tables_from(cfg):
    for name in ("eval", "invert"):
        path = cfg.out / f"{name}.csv"
        if path.exists() and cfg.kind == name:
            lines = path.read_text().splitlines()
            yield lines[0].split(","), [ln.split(",") for ln in lines[1:]]


if __name__ == "__main__":
    sys.exit(main())
