"""Command-line driver for orbit runs, comparisons, checks, and sweeps.

Every experiment is described by a flat JSON config file and is
reproducible from that file alone: all randomness flows from the
mandatory ``rng_seed`` field, so identical configs produce byte-identical
artifacts.  Output files are CSV or JSON with 17-significant-digit
decimals, written to a temporary file and renamed into place so a failed
run leaves no partial artifact.

Exit codes: 0 success; 2 configuration problems (unreadable file,
missing or invalid fields); 3 domain failures (singular orbits,
inadmissible invariant values, obstructed integration paths); 4 a
verification suite ran but at least one residual exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, fields

import numpy as np

from . import actionangle as aa
from . import mh
from .maps import (
    InvalidStateError,
    MapParams,
    PhasePoint,
    SingularOrbitError,
    invariant_kdv_p2,
    invariant_mkdv_p2,
    map_for,
    orbit,
    symplecticity_check,
)
from .jets import bracket_jets, jet_seed
from .spectral import (
    DegenerateStepError,
    NonSeparableError,
    canonicity_check,
    dubrovin_residual_discrete,
    entry_bracket_check,
    genus_of,
    invariants_kdv_p3,
    spectral_data,
)

__all__ = ["ExperimentConfig", "ConfigError", "main", "run_verify_suite",
           "EXIT_OK", "EXIT_CONFIG", "EXIT_DOMAIN", "EXIT_RESIDUAL"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_RESIDUAL = 4

VERIFY_SUITES = ("symplectic", "brackets", "dubrovin", "landing", "abel",
                 "conservativity")

_DOMAIN_ERRORS = (SingularOrbitError, InvalidStateError, aa.DomainError,
                  aa.BranchPathError, NonSeparableError, DegenerateStepError)


class ConfigError(ValueError):
    """The experiment configuration cannot be used."""


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Flat description of one experiment run.

    ``family``/``period`` plus ``epsilon``/``delta`` (KdV) or ``rho``
    (MKdV) select the map; ``seed_point`` is the phase-space starting
    point; ``rng_seed`` drives every random draw.  ``gradings`` lists
    the step-size-like values swept by comparisons, ``depth`` the
    bracket-series truncation, and the *_tol fields the quadrature and
    flow tolerances.  ``sweep_points`` optionally pins the invariant
    values of a frequency sweep (numbers for one degree of freedom,
    pairs for two).
    """

    family: str
    period: int
    rng_seed: int
    seed_point: tuple
    epsilon: float | None = None
    delta: float | None = None
    rho: float | None = None
    iterations: int = 10000
    depth: int = 3
    gradings: tuple = (0.08, 0.04, 0.02)
    quad_abs_tol: float = 1e-12
    quad_rel_tol: float = 1e-10
    ode_tol: float = 1e-11
    out_dir: str = "."
    out_format: str = "csv"
    sweep_points: tuple | None = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError("iterations must be at least 1")
        if self.depth < 1 or self.depth > 4:
            raise ConfigError("depth must be between 1 and 4")
        for name in ("quad_abs_tol", "quad_rel_tol", "ode_tol"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be positive")
        if self.out_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.out_format!r}")
        if not all(g > 0.0 for g in self.gradings):
            raise ConfigError("grading values must be positive")

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object with flat keys")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for required in ("family", "period", "rng_seed", "seed_point"):
            if required not in raw:
                raise ConfigError(f"missing required config key {required!r}")
        if not isinstance(raw["rng_seed"], int):
            raise ConfigError("rng_seed must be an integer")
        coerced = dict(raw)
        coerced["seed_point"] = tuple(float(c) for c in raw["seed_point"])
        if "gradings" in raw:
            coerced["gradings"] = tuple(float(g) for g in raw["gradings"])
        if raw.get("sweep_points") is not None:
            pts = raw["sweep_points"]
            coerced["sweep_points"] = tuple(
                tuple(float(c) for c in p) if isinstance(p, (list, tuple))
                else float(p) for p in pts)
        try:
            return cls(**coerced)
        except TypeError as exc:
            raise ConfigError(f"bad config field: {exc}") from exc

    def params(self) -> MapParams:
        kwargs = {"family": self.family, "period": self.period}
        if self.epsilon is not None:
            kwargs["epsilon"] = self.epsilon
        if self.delta is not None:
            kwargs["delta"] = self.delta
        if self.rho is not None:
            kwargs["rho"] = self.rho
        try:
            return MapParams(**kwargs)
        except (InvalidStateError, TypeError) as exc:
            raise ConfigError(f"bad map parameters: {exc}") from exc

    def seed(self) -> PhasePoint:
        try:
            return PhasePoint(self.seed_point)
        except InvalidStateError as exc:
            raise ConfigError(f"bad seed point: {exc}") from exc

    def quad(self) -> aa.QuadratureSpec:
        return aa.QuadratureSpec(abs_tol=self.quad_abs_tol,
                                 rel_tol=self.quad_rel_tol)


# ----------------------------------------------------------------------
# deterministic artifact writing
# ----------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _render_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {_render_json(v, indent + 1)}'
            for k, v in obj.items())
        return "{\n" + body + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        body = ",\n".join(f"{pad}  {_render_json(v, indent + 1)}"
                          for v in seq)
        return "[\n" + body + f"\n{pad}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    return _fmt(obj)


def _csv_text(header, rows, footer=()) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    for row in footer:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".partial-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: ExperimentConfig, stem: str, header, rows, footer=(),
          json_obj=None) -> str:
    if cfg.out_format == "csv":
        path = os.path.join(cfg.out_dir, f"{stem}.csv")
        _write_atomic(path, _csv_text(header, rows, footer))
    else:
        path = os.path.join(cfg.out_dir, f"{stem}.json")
        if json_obj is None:
            json_obj = {"rows": [dict(zip(header, row)) for row in rows]}
            if footer:
                json_obj["footer"] = [list(row) for row in footer]
        _write_atomic(path, _render_json(json_obj) + "\n")
    return path


# ----------------------------------------------------------------------
# admissibility and seed sampling
# ----------------------------------------------------------------------

def _g1_invariant(z: PhasePoint, params: MapParams) -> float:
    q, p = z.coords
    if params.family == "kdv":
        return invariant_kdv_p2(q, p, params.epsilon, params.delta)
    return invariant_mkdv_p2(q, p, params.rho)


def _admissible(z: PhasePoint, params: MapParams) -> bool:
    """True when the point iterates and its invariants sit inside the
    empirically valid region of the action-angle quadratures."""
    try:
        map_for(params)(z, params)
        if params.period == 2:
            pv = _g1_invariant(z, params)
            if params.family == "kdv":
                e4 = params.epsilon ** 4
                return -0.999 * e4 < pv < -1e-6 * e4
            bound = 2.0 * params.rho ** 2 + 8.0 * params.rho + 2.0
            return pv > bound + 1e-3
        raw = spectral_data(z, params).invariants
        aa.frequencies_g2(raw[0], raw[1], params)
        return True
    except _DOMAIN_ERRORS:
        return False


def _sample_seeds(params: MapParams, rng, count: int) -> list:
    box = 0.25 * params.epsilon if params.family == "kdv" else 0.45
    width = 2 * (params.period - 1)
    seeds, attempts = [], 0
    while len(seeds) < count:
        attempts += 1
        if attempts > 200 * count:
            raise aa.DomainError(
                f"could not sample {count} admissible seeds for "
                f"{params.family} period {params.period}")
        z = PhasePoint(tuple(rng.uniform(-box, box, width)))
        if _admissible(z, params):
            seeds.append(z)
    return seeds


# ----------------------------------------------------------------------
# orbit
# ----------------------------------------------------------------------

def cmd_orbit(cfg: ExperimentConfig) -> int:
    params = cfg.params()
    z0 = cfg.seed()
    steps, coords, invs = orbit(z0, params, cfg.iterations)
    n = coords.shape[1] // 2
    header = (["step"] + [f"q{i + 1}" for i in range(n)]
              + [f"p{i + 1}" for i in range(n)]
              + [f"P{i + 1}" for i in range(invs.shape[1])])
    rows = [[int(s)] + [float(c) for c in coords[i]]
            + [float(v) for v in invs[i]] for i, s in enumerate(steps)]
    path = _emit(cfg, "orbit", header, rows)
    print(f"orbit: {len(rows)} rows -> {path}")
    return EXIT_OK


# ----------------------------------------------------------------------
# mh-compare
# ----------------------------------------------------------------------

def _closed_form_diff(z_a: PhasePoint, z_b: PhasePoint, params: MapParams,
                      quad: aa.QuadratureSpec) -> float:
    if params.period == 2:
        p_a, p_b = _g1_invariant(z_a, params), _g1_invariant(z_b, params)
        fn = aa.mh_g1_kdv if params.family == "kdv" else aa.mh_g1_mkdv
        return fn(p_a, p_b, params, quad)
    raw_a = spectral_data(z_a, params).invariants
    raw_b = spectral_data(z_b, params).invariants
    return aa.mh_g2([raw_a, raw_b], params, quad)


def _closed_form_defect(z0: PhasePoint, params: MapParams,
                        quad: aa.QuadratureSpec, window: float = 3.0) -> float:
    """MH drift implied by the worst invariant drift over one window."""
    g = params.delta if params.family == "kdv" else abs(params.tau)
    n = max(4, math.ceil(window / g))
    step = map_for(params)
    if params.period == 2:
        p0 = _g1_invariant(z0, params)
        worst = p0
        z = z0
        for _ in range(n):
            z = step(z, params)
            pk = _g1_invariant(z, params)
            if abs(pk - p0) > abs(worst - p0):
                worst = pk
        fn = aa.mh_g1_kdv if params.family == "kdv" else aa.mh_g1_mkdv
        return abs(fn(p0, worst, params, quad))
    raw0 = np.array(spectral_data(z0, params).invariants)
    worst = raw0
    z = z0
    for _ in range(n):
        z = step(z, params)
        rawk = np.array(spectral_data(z, params).invariants)
        if np.max(np.abs(rawk - raw0)) > np.max(np.abs(worst - raw0)):
            worst = rawk
    return abs(aa.mh_g2([raw0, worst], params, quad))


def cmd_mh_compare(cfg: ExperimentConfig) -> int:
    params = cfg.params()
    tag = mh.tag_for(params)
    grading_name = "delta" if params.family == "kdv" else "tau"
    z_a = cfg.seed()
    rng = np.random.default_rng(cfg.rng_seed)
    z_b = None
    for _ in range(500):
        candidate = _sample_seeds(params, rng, 1)[0]
        if all(_admissible(candidate, mh.with_grading(params, grading_name, g))
               for g in cfg.gradings):
            z_b = candidate
            break
    if z_b is None:
        raise aa.DomainError("no comparison point admissible at every "
                             "grading value")
    series = [(f"bch_depth_{cfg.depth}", mh.bch_series(tag, depth=cfg.depth)),
              ("paper_series", mh.printed_series(tag))]
    quad = cfg.quad()
    rows = []
    defects = {name: [] for name, _ in series}
    defects["closed_form_diff"] = []
    for g in sorted(cfg.gradings, reverse=True):
        par_g = mh.with_grading(params, grading_name, g)
        for name, ser in series:
            value = (ser(z_b, par_g) - ser(z_a, par_g))
            defect, _ = mh.window_defect(None, ser, z_a, par_g)
            rows.append([g, name, value, defect])
            defects[name].append((g, defect))
        value = _closed_form_diff(z_a, z_b, par_g, quad)
        defect = _closed_form_defect(z_a, par_g, quad)
        rows.append([g, "closed_form_diff", value, defect])
        defects["closed_form_diff"].append((g, defect))
    footer = []
    for name, pairs in defects.items():
        ds = [d for _, d in pairs]
        if all(d <= 1e-12 for d in ds) or len(pairs) < 2:
            footer.append(["fitted_slope", name, "conserved"])
            continue
        xs = np.log([g for g, _ in pairs])
        ys = np.log([max(d, 1e-300) for d in ds])
        footer.append(["fitted_slope", name,
                       float(np.polyfit(xs, ys, 1)[0])])
    path = _emit(cfg, "mh_compare", ["grading", "method", "value", "defect"],
                 rows, footer)
    print(f"mh-compare: {len(rows)} rows -> {path}")
    return EXIT_OK


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

def _suite_symplectic(cfg, params, rng) -> list:
    worst = 0.0
    for z in _sample_seeds(params, rng, 100):
        worst = max(worst, symplecticity_check(params, z))
    return [("symplectic_form_defect", worst, 1e-12)]


def _suite_brackets(cfg, params, rng) -> list:
    if params.family != "kdv":
        raise aa.DomainError(
            "the bracket suite checks the rational-chain separation "
            "variables; the exponential family has no such claim")
    checks = []
    worst_canon = 0.0
    for z in _sample_seeds(params, rng, 20):
        worst_canon = max(worst_canon,
                          float(np.max(np.abs(canonicity_check(z, params)))))
    checks.append(("separation_canonicity", worst_canon, 1e-9))
    if params.family == "kdv" and params.period == 3:
        worst_inv = 0.0
        for z in _sample_seeds(params, rng, 20):
            jets = jet_seed(z.coords, 2)
            i1, i2 = invariants_kdv_p3(*jets, params.epsilon, params.delta)
            worst_inv = max(worst_inv,
                            abs(bracket_jets(i1, i2, 2).value))
        checks.append(("invariant_involution", worst_inv, 1e-10))
        worst_entry = 0.0
        for z in _sample_seeds(params, rng, 20):
            lam1, lam2 = rng.uniform(-1.0, 1.0, 2)
            res = entry_bracket_check(float(lam1), float(lam2), z, params)
            worst_entry = max(worst_entry, max(abs(v) for v in res.values()))
        checks.append(("monodromy_entry_brackets", worst_entry, 1e-9))
    return checks


def _suite_dubrovin(cfg, params, rng) -> list:
    tol = 1e-9 if genus_of(params) == 1 else 1e-8
    z = cfg.seed()
    step = map_for(params)
    worst = 0.0
    for _ in range(100):
        worst = max(worst,
                    float(np.max(np.abs(dubrovin_residual_discrete(z, params)))))
        z = step(z, params)
    return [("discrete_dubrovin", worst, tol)]


def _landing_rows(params_map: MapParams, params_flow: MapParams, seeds,
                  ode_tol: float, quad: aa.QuadratureSpec):
    """Landing distances; the flow side may run with mismatched
    parameters, which the negative-control tests exploit."""
    rows = []
    mapper = map_for(params_map)
    for z in seeds:
        target = mapper(z, params_map)
        if params_flow.period == 2:
            pv = _g1_invariant(z, params_flow)
            freq = (aa.frequency_g1_kdv if params_flow.family == "kdv"
                    else aa.frequency_g1_mkdv)
            nu = freq(pv, params_flow, quad)
            landed = aa.interpolating_flow_g1(z, params_flow, nu, ode_tol)
        else:
            raw = spectral_data(z, params_flow).invariants
            rep = aa.frequencies_g2(raw[0], raw[1], params_flow, quad)
            landed = aa.interpolating_flow_g2(z, params_flow, rep.lambda_star,
                                              rep.nu1, ode_tol)
        dist = max(abs(a - b) for a, b in zip(landed.coords, target.coords))
        rows.append(list(z.coords) + [dist, ode_tol])
    return rows


def _suite_landing(cfg, params, rng) -> list:
    tol = 1e-8 if genus_of(params) == 1 else 1e-7
    seeds = _sample_seeds(params, rng, 20)
    rows = _landing_rows(params, params, seeds, cfg.ode_tol, cfg.quad())
    n = 2 * (params.period - 1)
    header = ([f"q{i + 1}" for i in range(n // 2)]
              + [f"p{i + 1}" for i in range(n // 2)]
              + ["distance", "ode_tol"])
    _write_atomic(os.path.join(cfg.out_dir, "landing.csv"),
                  _csv_text(header, rows))
    worst = max(row[-2] for row in rows)
    return [("interpolating_flow_landing", worst, tol)]


def _suite_abel(cfg, params, rng) -> list:
    if genus_of(params) != 2:
        raise aa.DomainError("the Abel suite needs the period-3 KdV map")
    z = cfg.seed()
    quad = cfg.quad()
    raw = spectral_data(z, params).invariants
    steps = aa.abel_step_sum(z, params, quad)
    checks = []
    for k in (0, 1):
        endpoint = aa.abel_endpoint_integral(k, raw[0], raw[1], params, quad)
        checks.append((f"abel_step_sum_k{k}", abs(steps[k] - endpoint), 1e-7))
    rep = aa.frequencies_g2(raw[0], raw[1], params, quad)
    res = aa.jacobi_inversion_check(z, params, rep.lambda_star, rep.nu1,
                                    ode_tol=cfg.ode_tol, quad_spec=quad)
    checks.append(("jacobi_inversion_k0", res["k0"], 1e-6))
    checks.append(("jacobi_inversion_k1", res["k1"], 1e-6))
    return checks


def _suite_conservativity(cfg, params, rng) -> list:
    if genus_of(params) != 2:
        raise aa.DomainError(
            "the conservativity suite needs the period-3 KdV map")
    quad = cfg.quad()
    p1, p2 = spectral_data(cfg.seed(), params).invariants
    h1, h2 = 0.02 * abs(p1), 0.02 * abs(p2)
    loop = [(p1 - h1, p2 - h2), (p1 + h1, p2 - h2), (p1 + h1, p2 + h2),
            (p1 - h1, p2 + h2), (p1 - h1, p2 - h2)]
    loop_val = abs(aa.mh_g2(loop, params, quad))
    h = 1e-4
    d12 = (aa.frequencies_g2(p1, p2 + h, params, quad).nu1
           - aa.frequencies_g2(p1, p2 - h, params, quad).nu1) / (2 * h)
    d21 = (aa.frequencies_g2(p1 + h, p2, params, quad).nu2
           - aa.frequencies_g2(p1 - h, p2, params, quad).nu2) / (2 * h)
    return [("closed_loop_integral", loop_val, 1e-7),
            ("cross_derivative", abs(d12 - d21), 1e-6)]


_SUITE_RUNNERS = {
    "symplectic": _suite_symplectic,
    "brackets": _suite_brackets,
    "dubrovin": _suite_dubrovin,
    "landing": _suite_landing,
    "abel": _suite_abel,
    "conservativity": _suite_conservativity,
}


def run_verify_suite(cfg: ExperimentConfig, suite: str) -> dict:
    """Run one verification suite and return its report dictionary."""
    if suite not in _SUITE_RUNNERS:
        raise ConfigError(f"unknown verify suite {suite!r}; choose from "
                          f"{', '.join(VERIFY_SUITES)}")
    params = cfg.params()
    rng = np.random.default_rng(cfg.rng_seed)
    raw_checks = _SUITE_RUNNERS[suite](cfg, params, rng)
    checks = [{"name": name, "residual": float(res), "tolerance": tol,
               "passed": bool(res <= tol)} for name, res, tol in raw_checks]
    worst = max(checks, key=lambda c: c["residual"] / c["tolerance"])
    return {
        "suite": suite,
        "family": params.family,
        "period": params.period,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
        "worst": worst["name"],
    }


def cmd_verify(cfg: ExperimentConfig, suite: str) -> int:
    report = run_verify_suite(cfg, suite)
    path = os.path.join(cfg.out_dir, f"verify_{suite}.json")
    _write_atomic(path, _render_json(report) + "\n")
    status = "pass" if report["passed"] else "FAIL"
    print(f"verify {suite}: {status} (worst: {report['worst']}) -> {path}")
    return EXIT_OK if report["passed"] else EXIT_RESIDUAL


# ----------------------------------------------------------------------
# freq-sweep
# ----------------------------------------------------------------------

def _default_sweep_points(cfg: ExperimentConfig, params: MapParams):
    if params.period == 2:
        p0 = _g1_invariant(cfg.seed(), params)
        if params.family == "kdv":
            return [p0 * s for s in (0.6, 0.8, 1.0, 1.2, 1.4)]
        bound = 2.0 * params.rho ** 2 + 8.0 * params.rho + 2.0
        return [bound + (p0 - bound) * s for s in (0.5, 0.75, 1.0, 1.5, 2.0)]
    p1, p2 = spectral_data(cfg.seed(), params).invariants
    return [(p1 * a, p2 * b) for a in (0.97, 1.0, 1.03)
            for b in (0.97, 1.0, 1.03)]


def cmd_freq_sweep(cfg: ExperimentConfig) -> int:
    params = cfg.params()
    points = cfg.sweep_points or _default_sweep_points(cfg, params)
    quad = cfg.quad()
    if params.period == 2:
        rows_d = aa.frequency_sweep_g1([float(p) for p in points], params,
                                       quad)
        header = ["P", "nu", "err_est"]
    else:
        rows_d = aa.frequency_sweep_g2(points, params, quad)
        header = ["P1", "P2", "nu1", "nu2", "lambda_star", "err_est"]
    rows = [[r[k] for k in header] for r in rows_d]
    path = _emit(cfg, "freq_sweep", header, rows)
    print(f"freq-sweep: {len(rows)} rows -> {path}")
    return EXIT_OK


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhlab",
        description="Integrable-map laboratory: orbits, modified-Hamiltonian "
                    "comparisons, verification suites, frequency sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("orbit", "iterate the configured map and tabulate invariants"),
            ("mh-compare", "compare bracket-series, printed-series and "
                           "closed-form modified Hamiltonians"),
            ("verify", "run a residual verification suite"),
            ("freq-sweep", "tabulate interpolating-flow frequencies")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to JSON config")
        p.add_argument("--out", default=None,
                       help="output directory (overrides config)")
        p.add_argument("--format", default=None, choices=("csv", "json"),
                       help="artifact format (overrides config)")
        if name == "verify":
            p.add_argument("--suite", required=True, choices=VERIFY_SUITES)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.from_file(args.config)
        if args.out is not None or os.environ.get("MHLAB_OUT"):
            out = args.out or os.environ["MHLAB_OUT"]
            cfg = ExperimentConfig(**{**_as_dict(cfg), "out_dir": out})
        if args.format is not None:
            cfg = ExperimentConfig(**{**_as_dict(cfg),
                                      "out_format": args.format})
        params = cfg.params()
        z0 = cfg.seed()
        map_for(params)(z0, params)  # seed admissibility before any run
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DOMAIN_ERRORS as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    try:
        if args.command == "orbit":
            return cmd_orbit(cfg)
        if args.command == "mh-compare":
            return cmd_mh_compare(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite)
        return cmd_freq_sweep(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DOMAIN_ERRORS as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def _as_dict(cfg: ExperimentConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in fields(cfg)}


if __name__ == "__main__":
    sys.exit(main())
