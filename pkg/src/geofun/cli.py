"""Command-line front end.

Every command writes one JSON document with the top-level keys
``schema_version``, ``config``, ``results`` and ``witnesses``; curves and
profiles go to CSV. Exit codes: 0 all checks pass, 1 a check failed or the
computation broke down (the JSON then carries ``results.error`` and a
``diagnostic``), 2 usage or configuration error.

Settings are resolved as command-line flag, then config file (flat
``key = value`` lines, ``tolerance.NAME = value`` for tolerances), then
built-in defaults. The output directory falls back to ``$GEOFUN_OUT`` and
then ``./geofun-out``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import io
from .axioms import SampleSpec, check_axioms, check_jensen_characterization, sample_ball
from .connection import (
    DEFAULT_LAMBDAS,
    FDScheme,
    build_spray,
    check_first_derivative,
    check_homogeneity,
    check_transformation_law,
    extract_with_diagnostics,
    extracted_connection,
    gamma_bar_flat,
    gaussian_connection,
    zero_connection,
)
from .convexity import check_convexity
from .core import quadratic_chart
from .errors import DomainError, GeofunError
from .geodesics import check_arc_closure, compare, subdivide
from .solutions import CATALOG, FIXTURE_IDS, SOLUTION_IDS, LinearSolution, ReparamSolution, get_entry, v_for
from .weierstrass import cauchy_summary, dyadic_steps, first_difference_convergence, growth_ratio, \
    second_divided_difference_profile

log = logging.getLogger("geofun")

COMMANDS = ("check", "extract", "spray", "compare", "roughness", "report")
RHS_CHOICES = ("auto", "zero", "spray", "analytic", "extracted")
CURVE_CHOICES = ("geodesic", "quadratic")

TOLERANCE_DEFAULTS = {
    "jensen": 1e-12,
    "segment": 1e-9,
    "ball": 1e-9,
    "direction": 1e-9,
    "gamma_zero": 1e-12,
    "gamma_oracle": 1e-4,
    "kronecker": 1e-6,
    "transformation": 1e-3,
    "homogeneity": 1e-12,
    "closure": 1e-8,
    "growth": 10.0,
}
COMPARE_TOLERANCES = {"zero": 1e-12, "spray": 1e-5, "analytic": 1e-5, "extracted": 1e-4}
TOLERANCE_KEYS = frozenset(["boundary", "composition", "derived", "compare", *TOLERANCE_DEFAULTS])

DEFAULT_ENDPOINTS = ((0.5, -0.3, 0.2), (-0.4, 0.6, 0.1))


class ConfigError(GeofunError, ValueError):
    """Bad flag, config file entry or solution id (exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    solution: str = "linear"
    dim: int = 2
    seed: int = 0
    samples: int = 10_000
    radius: float = 2.0
    fd_step: float = 1e-3
    depth: int = 8
    ode_step: float = 1e-3
    out: str = "geofun-out"
    format: str = "json"
    tolerances: dict = field(default_factory=dict)
    workers: int = 1
    chunk_size: int | None = None
    probes: int = 5
    points: tuple | None = None
    richardson: bool = True
    chart: str = "none"
    rhs: str = "auto"
    a: tuple | None = None
    b: tuple | None = None
    curve: str = "geodesic"
    t: float = 0.5

    def __post_init__(self):
        if self.solution not in CATALOG:
            raise ConfigError(f"unknown solution id {self.solution!r}; known: {', '.join(CATALOG)}")
        for name in ("dim", "samples", "depth", "probes", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        for name in ("radius", "fd_step", "ode_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.chunk_size is not None and self.chunk_size < 1:
            raise ConfigError("chunk_size must be a positive integer")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.rhs not in RHS_CHOICES:
            raise ConfigError(f"rhs must be one of {', '.join(RHS_CHOICES)}")
        if self.curve not in CURVE_CHOICES:
            raise ConfigError(f"curve must be one of {', '.join(CURVE_CHOICES)}")
        if self.chart not in ("none", "quadratic"):
            raise ConfigError("chart must be none or quadratic")
        unknown = set(self.tolerances) - TOLERANCE_KEYS
        if unknown:
            raise ConfigError(f"unknown tolerance key(s): {', '.join(sorted(unknown))}")
        for pts, name in ((self.points or (), "point"), ([self.a] if self.a else [], "a"),
                          ([self.b] if self.b else [], "b")):
            for p in pts:
                if len(p) != self.dim:
                    raise ConfigError(f"{name} {p} does not have dimension {self.dim}")

    def tol(self, key, default=None):
        if key in self.tolerances:
            return self.tolerances[key]
        return TOLERANCE_DEFAULTS[key] if default is None else default

    def sample_spec(self) -> SampleSpec:
        return SampleSpec(n_samples=self.samples, point_radius=self.radius, seed=self.seed)

    def describe(self) -> dict:
        """Settings that determine the results (the output directory is left out)."""
        d = asdict(self)
        d.pop("out")
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        return d


@dataclass
class Outcome:
    code: int
    path: Path
    results: dict


# --------------------------------------------------------------------------
# configuration


def _vector(text) -> tuple:
    try:
        return tuple(float(x) for x in str(text).split(","))
    except ValueError:
        raise ConfigError(f"cannot parse point {text!r}; use comma-separated numbers") from None


def _points(text) -> tuple:
    return tuple(_vector(p) for p in str(text).split(";") if p.strip())


def _bool(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}")


def _optional_int(text):
    return None if str(text).strip().lower() in ("", "none") else int(text)


_PARSERS = {
    "solution": str, "dim": int, "seed": int, "samples": int, "radius": float, "fd_step": float,
    "depth": int, "ode_step": float, "out": str, "format": str, "workers": int,
    "chunk_size": _optional_int, "probes": int, "points": _points, "richardson": _bool, "chart": str,
    "rhs": str, "a": _vector, "b": _vector, "curve": str, "t": float,
}


def _parse_tolerance(item: str) -> tuple[str, float]:
    key, sep, value = item.partition("=")
    if not sep:
        raise ConfigError(f"tolerance {item!r} must look like KEY=VALUE")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise ConfigError(f"tolerance {key.strip()!r} has non-numeric value {value!r}") from None


def read_config_file(path) -> tuple[dict, dict]:
    """Parse a flat ``key = value`` file into (settings, tolerances)."""
    settings, tolerances = {}, {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key.startswith("tolerance."):
            tolerances.update([_parse_tolerance(f"{key[len('tolerance.'):]}={value}")])
        elif key in _PARSERS:
            try:
                settings[key] = _PARSERS[key](value)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return settings, tolerances


def _command_defaults(command: str) -> dict:
    if command == "roughness":
        return {"solution": "reparam:weierstrass", "dim": 1}
    return {}


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    file_settings, file_tols = read_config_file(args.config) if args.config else ({}, {})
    values = _command_defaults(args.command)
    values.update(file_settings)
    for name in _PARSERS:
        cli_value = getattr(args, name, None)
        if isinstance(cli_value, list):
            cli_value = tuple(cli_value)
        if cli_value is not None:
            values[name] = cli_value
    if "out" not in values:
        values["out"] = environ.get("GEOFUN_OUT") or "geofun-out"
    tolerances = dict(file_tols)
    tolerances.update(_parse_tolerance(t) for t in args.tolerance or [])
    if values.get("a") is not None and "dim" not in file_settings and args.dim is None:
        values["dim"] = len(values["a"])
    try:
        return RunConfig(command=args.command, tolerances=tolerances, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# --------------------------------------------------------------------------
# commands


def _solution(cfg: RunConfig):
    return get_entry(cfg.solution).build(cfg.dim)


def _failure_outcome(cfg: RunConfig, path: Path, exc: GeofunError) -> Outcome:
    results = {"passed": False, "error": f"{type(exc).__name__}: {exc}",
               "diagnostic": getattr(exc, "diagnostic", {})}
    io.write_json(path, io.envelope(cfg.describe(), results))
    return Outcome(1, path, results)


def _finish(cfg, path, results, witnesses=None) -> Outcome:
    io.write_json(path, io.envelope(cfg.describe(), results, witnesses))
    return Outcome(0 if results["passed"] else 1, path, results)


def cmd_check(cfg: RunConfig) -> Outcome:
    """Axiom checks, plus line/ball checks for the genuine solutions and the Jensen test for linear."""
    path = Path(cfg.out) / f"axioms_{io.safe_name(cfg.solution)}.json"
    entry = get_entry(cfg.solution)
    try:
        f = _solution(cfg)
        spec = cfg.sample_spec()
        thresholds = {**entry.thresholds, **cfg.tolerances}
        report = check_axioms(f, spec, thresholds, chunk_size=cfg.chunk_size, workers=cfg.workers)
        if not entry.fixture:
            report = report.merge(check_convexity(f, spec, {k: cfg.tol(k) for k in ("segment", "ball", "direction")}))
        if isinstance(f, LinearSolution):
            report = report.merge(check_jensen_characterization(spec, depth=10, solution=f,
                                                                threshold=cfg.tol("jensen")))
    except GeofunError as exc:
        return _failure_outcome(cfg, path, exc)
    results = report.to_dict()
    witnesses = {r.name: r.witness for r in report.results if not r.passed}
    return _finish(cfg, path, results, witnesses)


def _probe_points(cfg: RunConfig, ctx, radius: float) -> np.ndarray:
    if cfg.points:
        return np.array(cfg.points, dtype=float)
    return sample_ball(np.random.default_rng(cfg.seed), ctx, cfg.probes, radius)


def _gamma_oracle(cfg: RunConfig, f):
    """Closed-form components where known: zero for straight lines, the quadratic form of (a b) b for gaussian."""
    if cfg.solution in ("linear", "reparam:identity"):
        return zero_connection(f.dim), cfg.tol("gamma_zero")
    if cfg.solution == "reparam:gaussian":
        return gaussian_connection(f.context), cfg.tol("gamma_oracle")
    return None, None


def cmd_extract(cfg: RunConfig) -> Outcome:
    path = Path(cfg.out) / f"gamma_{io.safe_name(cfg.solution)}.json"
    try:
        f = _solution(cfg)
        scheme = FDScheme(h=cfg.fd_step, richardson=cfg.richardson)
        oracle, oracle_tol = _gamma_oracle(cfg, f)
        smooth = f.smoothness == "C∞"
        chart = quadratic_chart(f.dim, eps=0.1) if cfg.chart == "quadratic" else None
        pts = _probe_points(cfg, f.context, 1.0 if chart else cfg.radius)
        rows, witnesses, passed = [], {}, True
        for k, a in enumerate(pts):
            ex = extract_with_diagnostics(f, a, scheme)
            row = ex.to_dict()
            dy, dz = check_first_derivative(f, a, scheme)
            row["kronecker_residual"] = [dy, dz]
            if smooth and max(dy, dz) > cfg.tol("kronecker"):
                passed = False
                witnesses[f"kronecker_{k}"] = {"point": a.tolist(), "residual": max(dy, dz)}
            if oracle is not None:
                err = float(np.max(np.abs(ex.gamma - oracle(a))))
                row["oracle_error"] = err
                if err > oracle_tol:
                    passed = False
                    witnesses[f"oracle_{k}"] = {"point": a.tolist(), "error": err}
            if chart is not None and np.linalg.norm(a) <= 1.0:
                tc = check_transformation_law(f, chart, a, scheme)
                row["transformation_residual"] = tc.residual
                if oracle is not None and cfg.solution in ("linear", "reparam:identity"):
                    row["gamma_bar_oracle_error"] = float(np.max(np.abs(tc.gamma_bar - gamma_bar_flat(chart, a))))
                if tc.residual > cfg.tol("transformation"):
                    passed = False
                    witnesses[f"transformation_{k}"] = {"point": a.tolist(), "residual": tc.residual}
            rows.append(row)
    except GeofunError as exc:
        return _failure_outcome(cfg, path, exc)
    results = {
        "solution": cfg.solution,
        "smoothness": f.smoothness,
        "scheme": asdict(scheme),
        "chart": chart.label if chart else None,
        "oracle": oracle.provenance["label"] if oracle else None,
        "all_reliable": all(r["reliable"] for r in rows),
        "points": rows,
        "passed": passed,
    }
    return _finish(cfg, path, results, witnesses)


def _spray_for(cfg: RunConfig, f):
    try:
        v = v_for(f)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    return build_spray(v, f.context, fd_step=cfg.fd_step)


def cmd_spray(cfg: RunConfig) -> Outcome:
    path = Path(cfg.out) / f"spray_{io.safe_name(cfg.solution)}.json"
    f = _solution(cfg)
    s = _spray_for(cfg, f)
    spec = cfg.sample_spec()
    try:
        residual = check_homogeneity(s, spec, DEFAULT_LAMBDAS)
        rng = np.random.default_rng(spec.seed)
        a = sample_ball(rng, f.context, spec.n_samples, spec.point_radius)
        b = sample_ball(rng, f.context, spec.n_samples, spec.point_radius)
        values = s(a, b)
        zero_branch = float(np.max(np.abs(s(a, np.zeros_like(b)))))
    except GeofunError as exc:
        return _failure_outcome(cfg, path, exc)
    tol = cfg.tol("homogeneity")
    results = {
        "solution": cfg.solution,
        "r_source": s.r_source,
        "lambdas": list(DEFAULT_LAMBDAS),
        "homogeneity_residual": residual,
        "zero_branch_max": zero_branch,
        "threshold": tol,
        "n_samples": spec.n_samples,
        "passed": bool(residual <= tol and zero_branch == 0.0),
    }
    if cfg.format == "csv":
        n = f.dim
        header = [f"a{i + 1}" for i in range(n)] + [f"b{i + 1}" for i in range(n)] + [f"s{i + 1}" for i in range(n)]
        io.write_csv(Path(cfg.out) / f"spray_{io.safe_name(cfg.solution)}.csv", header,
                     np.concatenate([a, b, values], axis=1))
    return _finish(cfg, path, results)


def _resolve_rhs(cfg: RunConfig, f):
    entry = get_entry(cfg.solution)
    rhs = cfg.rhs
    if rhs == "auto":
        if isinstance(f, LinearSolution):
            rhs = "zero"
        elif isinstance(f, ReparamSolution) and entry.has_spray:
            rhs = "spray"
        else:
            raise ConfigError(f"{cfg.solution} has no geodesic ODE; pick --rhs explicitly")
    if rhs == "zero":
        return rhs, zero_connection(f.dim)
    if rhs == "spray":
        return rhs, _spray_for(cfg, f)
    if rhs == "analytic":
        if cfg.solution in ("linear", "reparam:identity"):
            return rhs, zero_connection(f.dim)
        if cfg.solution == "reparam:gaussian":
            return rhs, gaussian_connection(f.context)
        raise ConfigError(f"no analytic connection known for {cfg.solution}")
    return rhs, extracted_connection(f, FDScheme(h=cfg.fd_step, richardson=cfg.richardson))


def _endpoints(cfg: RunConfig):
    a = cfg.a if cfg.a is not None else DEFAULT_ENDPOINTS[0][:cfg.dim] + (0.0,) * max(0, cfg.dim - 3)
    b = cfg.b if cfg.b is not None else DEFAULT_ENDPOINTS[1][:cfg.dim] + (0.0,) * max(0, cfg.dim - 3)
    return np.array(a, dtype=float), np.array(b, dtype=float)


def cmd_compare(cfg: RunConfig) -> Outcome:
    f = _solution(cfg)
    rhs_name, rhs = _resolve_rhs(cfg, f)
    stem = f"{io.safe_name(cfg.solution)}_{rhs_name}"
    path = Path(cfg.out) / f"compare_{stem}.json"
    a, b = _endpoints(cfg)
    tol = cfg.tol("compare", COMPARE_TOLERANCES[rhs_name])
    try:
        result = compare(f, rhs, a, b, depth=cfg.depth, step=cfg.ode_step)
    except GeofunError as exc:
        return _failure_outcome(cfg, path, exc)
    io.write_curve_csv(Path(cfg.out) / f"subdivision_{io.safe_name(cfg.solution)}.csv", result.subdivision.curve)
    io.write_curve_csv(Path(cfg.out) / f"ode_{stem}.csv", result.trajectory)
    results = {"solution": cfg.solution, "rhs": rhs_name, "a": a.tolist(), "b": b.tolist(),
               **result.to_dict(), "threshold": tol, "passed": bool(result.sup_distance <= tol)}
    return _finish(cfg, path, results)


def _roughness_curve(cfg: RunConfig):
    if cfg.curve == "quadratic":
        return "quadratic", (lambda t: np.square(np.asarray(t, dtype=float))), None
    f = _solution(cfg)
    a = np.array(cfg.a if cfg.a is not None else (1.0,) + (0.0,) * (cfg.dim - 1))
    b = np.array(cfg.b if cfg.b is not None else (0.0,) * cfg.dim)

    def g(t):
        t = np.asarray(t, dtype=float)
        return f.eval(a, b, t)

    return io.safe_name(cfg.solution), g, (f, a, b)


def cmd_roughness(cfg: RunConfig) -> Outcome:
    name, g, source = _roughness_curve(cfg)
    path = Path(cfg.out) / f"roughness_{name}.json"
    steps = dyadic_steps(4, 12)
    try:
        profile = second_divided_difference_profile(g, cfg.t, steps)
        quotients = first_difference_convergence(g, cfg.t, steps)
        closure = None
        if source is not None:
            f, a, b = source
            closure = check_arc_closure(f, subdivide(f, a, b, cfg.depth), cfg.sample_spec(), cfg.tol("closure"))
    except GeofunError as exc:
        return _failure_outcome(cfg, path, exc)
    ratio = growth_ratio(profile)
    cauchy = cauchy_summary(quotients)
    rough = source is not None and source[0].smoothness == "C1"
    passed = closure is None or closure.passed
    if rough:
        passed = passed and ratio >= cfg.tol("growth") and cauchy["cauchy"]
    io.write_csv(Path(cfg.out) / f"profile_{name}.csv", ["h", "value"], zip(steps, profile))
    q = np.asarray(quotients, dtype=float).reshape(len(steps), -1)
    io.write_csv(Path(cfg.out) / f"firstdiff_{name}.csv",
                 ["h"] + (["value"] if q.shape[1] == 1 else [f"value{i + 1}" for i in range(q.shape[1])]),
                 np.concatenate([np.asarray(steps)[:, None], q], axis=1))
    results = {
        "curve": name,
        "t": cfg.t,
        "steps": steps,
        "second_difference_profile": profile,
        "growth_ratio": ratio,
        "growth_threshold": cfg.tol("growth"),
        "first_differences": quotients,
        "cauchy": cauchy,
        "expect_rough": rough,
        "arc_closure": closure.to_dict() if closure else None,
        "passed": bool(passed),
    }
    witnesses = {"arc_closure": closure.witness} if closure is not None and not closure.passed else {}
    return _finish(cfg, path, results, witnesses)


def cmd_report(cfg: RunConfig) -> Outcome:
    """Run the standard battery for the catalog and summarize exit codes in ``report.json``."""
    jobs = [replace(cfg, command="check", solution=sid) for sid in SOLUTION_IDS]
    jobs += [replace(cfg, command="extract", solution=sid) for sid in ("linear", "reparam:gaussian", "reparam:weierstrass")]
    jobs += [replace(cfg, command="spray", solution=sid) for sid in ("reparam:identity", "reparam:gaussian")]
    jobs += [replace(cfg, command="compare", solution="linear", rhs="zero"),
             replace(cfg, command="compare", solution="reparam:gaussian", rhs="spray"),
             replace(cfg, command="compare", solution="reparam:gaussian", rhs="extracted")]
    jobs += [replace(cfg, command="roughness", solution="reparam:weierstrass", dim=1, a=None, b=None)]
    entries = []
    for job in jobs:
        outcome = RUNNERS[job.command](job)
        entries.append({"command": job.command, "solution": job.solution, "rhs": job.rhs if job.command == "compare" else None,
                        "exit_code": outcome.code, "file": outcome.path.name})
        log.info("%s %s -> %d", job.command, job.solution, outcome.code)
    results = {"runs": entries, "passed": all(e["exit_code"] == 0 for e in entries)}
    return _finish(cfg, Path(cfg.out) / "report.json", results)


RUNNERS = {"check": cmd_check, "extract": cmd_extract, "spray": cmd_spray, "compare": cmd_compare,
           "roughness": cmd_roughness, "report": cmd_report}


# --------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solution", help=f"catalog id: {', '.join(SOLUTION_IDS + FIXTURE_IDS)}")
    p.add_argument("--dim", type=int, help="space dimension (default 2, roughness 1)")
    p.add_argument("--seed", type=int, help="sampling seed (default 0)")
    p.add_argument("--samples", type=int, help="number of random samples (default 10000)")
    p.add_argument("--radius", type=float, help="radius of the sampling ball (default 2)")
    p.add_argument("--fd-step", dest="fd_step", type=float, help="finite-difference step (default 1e-3)")
    p.add_argument("--depth", type=int, help="dyadic subdivision depth (default 8)")
    p.add_argument("--ode-step", dest="ode_step", type=float, help="RK4 step (default 1e-3)")
    p.add_argument("--out", help="output directory (default $GEOFUN_OUT or ./geofun-out)")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--tolerance", action="append", metavar="KEY=VAL",
                   help=f"override a tolerance; keys: {', '.join(sorted(TOLERANCE_KEYS))}")
    p.add_argument("--format", choices=("json", "csv"), help="csv also dumps spray samples")
    p.add_argument("--workers", type=int, help="threads for sampled checks (results do not depend on it)")
    p.add_argument("--chunk-size", dest="chunk_size", type=int, help="samples per evaluation chunk")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geofun", description="Check and compare geodesic solutions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="sampled functional-equation checks")
    _common(p)

    p = sub.add_parser("extract", help="connection components at probe points")
    _common(p)
    p.add_argument("--probes", type=int, help="number of random probe points (default 5)")
    p.add_argument("--point", dest="points", action="append", type=_vector, metavar="X1,X2,...",
                   help="explicit probe point (repeatable)")
    p.add_argument("--no-richardson", dest="richardson", action="store_const", const=False)
    p.add_argument("--chart", choices=("none", "quadratic"), help="also test the transformation law")

    p = sub.add_parser("spray", help="build the spray of a reparametrized solution")
    _common(p)

    p = sub.add_parser("compare", help="subdivision curve against the shot ODE geodesic")
    _common(p)
    p.add_argument("--rhs", choices=RHS_CHOICES, help="geodesic right-hand side (default auto)")
    p.add_argument("--a", type=_vector, metavar="X1,X2,...", help="start point")
    p.add_argument("--b", type=_vector, metavar="X1,X2,...", help="end point")
    p.add_argument("--no-richardson", dest="richardson", action="store_const", const=False)

    p = sub.add_parser("roughness", help="difference-quotient profiles of a geodesic")
    _common(p)
    p.add_argument("--curve", choices=CURVE_CHOICES, help="geodesic of --solution or the quadratic t^2")
    p.add_argument("--t", type=float, help="probe parameter (default 0.5)")
    p.add_argument("--a", type=_vector, metavar="X1,...", help="geodesic start (default e1)")
    p.add_argument("--b", type=_vector, metavar="X1,...", help="geodesic end (default 0)")

    p = sub.add_parser("report", help="run the standard battery and summarize")
    _common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        outcome = RUNNERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"geofun: error: {exc}", file=sys.stderr)
        return 2
    status = "PASS" if outcome.code == 0 else "FAIL"
    subject = "quadratic" if cfg.command == "roughness" and cfg.curve == "quadratic" else cfg.solution
    if cfg.command == "report":
        subject = "catalog"
    print(f"{cfg.command} {subject}: {status} -> {outcome.path}")
    if "error" in outcome.results:
        print(f"  {outcome.results['error']}", file=sys.stderr)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
