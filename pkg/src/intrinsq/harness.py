"""Experiment configuration, corpus generation, theorem-scale checks and
report emission.

Empirical "boundedness" at desk scale means: the reported sup ratio moves
by less than the declared stability tolerance under grid halving.  The
checks never assert a constant the underlying statements do not provide;
they record the constant, its refinement drift, and the truncation
diagnostics that produced it.  Negative controls (weights violating the
integral condition, constant symbols) abort with a hypothesis-unmet
outcome rather than passing silently.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .bmo import bmo_norm, symbol_from_id
from .fields import Ball, SampledField
from .intrinsic import (ConeQuadrature, HalfspaceValue, annular_far_bound,
                        aperture_report, cone_kernel_sups,
                        lusin_square_function, square_function)
from .morrey import (ProbeSet, Weight, morrey_norm, weight_from_id,
                     zygmund_constant)
from .orlicz import luxemburg_norm
from .young import YoungFunction, young_from_id

__all__ = [
    "ConfigError",
    "HypothesisUnmetError",
    "ExperimentConfig",
    "VerificationReport",
    "EXPERIMENT_KINDS",
    "build_corpus",
    "run_experiment",
    "emit",
    "parallel_map",
    "square_function_field",
]

WORKERS_ENV = "INTRINSQ_WORKERS"

EXPERIMENT_KINDS = (
    "local_estimate",
    "morrey_bound",
    "vertical_comparability",
    "halfspace_bound",
    "orlicz_bound",
    "commutator_local_estimate",
    "commutator_morrey_bound",
)


class ConfigError(ValueError):
    """Malformed or incomplete experiment configuration."""


class HypothesisUnmetError(RuntimeError):
    """The experiment's integral condition failed; a valid negative result."""

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.detail = detail or {}


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    dim: int = 1
    grid: dict = field(default_factory=lambda: {
        "origin": [-2.0], "h": 0.0625, "shape": [64]})
    young: str = "power:2"
    phi1: str = "orliczmatch"
    phi2: str = "orliczmatch"
    alpha: float = 0.5
    beta_list: list = field(default_factory=lambda: [1.0, 2.0])
    lam: float = 4.5
    symbol: str | None = None
    probes: dict = field(default_factory=lambda: {
        "centers": [[0.0]], "r_min": 0.25, "r_max": 0.5, "count": 2})
    quadrature: dict = field(default_factory=lambda: {
        "t_min": 0.125, "t_max": 0.5, "nodes_per_decade": 6,
        "kernel_nodes": 15, "sigma": 0.25, "beta_max": 2.0,
        "halfspace_cap": 1e9, "s_max": 1e8})
    corpus: list = field(default_factory=lambda: ["indicator:0:1"])
    seed: int = 0
    output: str = "out"
    refine: bool = True
    shift_check: bool = True
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.dim not in (1, 2):
            raise ConfigError("dim must be 1 or 2")
        if not (0 < self.alpha <= 1):
            raise ConfigError("alpha must lie in (0, 1]")
        for key in ("origin", "h", "shape"):
            if key not in self.grid:
                raise ConfigError(f"grid missing {key!r}")
        for key in ("centers", "r_min", "r_max", "count"):
            if key not in self.probes:
                raise ConfigError(f"probes missing {key!r}")
        try:
            self.young_fn()
            self.weight(self.phi1)
            self.weight(self.phi2)
            if self.symbol is not None:
                self.symbol_field()
        except (ValueError, OSError) as exc:
            raise ConfigError(str(exc)) from exc
        if 1.0 not in [float(b) for b in self.beta_list]:
            raise ConfigError("beta_list must contain 1")

    # -- resolved pieces ----------------------------------------------------

    def young_fn(self) -> YoungFunction:
        return young_from_id(self.young)

    def weight(self, spec: str) -> Weight:
        return weight_from_id(spec, phi=self.young_fn(), dim=self.dim)

    def grid_tuple(self, h_scale: float = 1.0):
        h = float(self.grid["h"]) * h_scale
        shape = [int(round(s / h_scale)) for s in np.atleast_1d(self.grid["shape"])]
        return list(self.grid["origin"]), h, tuple(shape)

    def probe_set(self) -> ProbeSet:
        p = self.probes
        return ProbeSet.build(p["centers"], float(p["r_min"]),
                              float(p["r_max"]), int(p["count"]))

    def cone_quadrature(self) -> ConeQuadrature:
        q = self.quadrature
        return ConeQuadrature.build(
            self.dim, float(q["t_min"]), float(q["t_max"]),
            int(q["nodes_per_decade"]), sigma=float(q.get("sigma", 0.25)),
            beta_max=float(q.get("beta_max", 2.0)),
            kernel_nodes=int(q.get("kernel_nodes", 15)),
            halfspace_cap=float(q.get("halfspace_cap", math.inf)),
        )

    def s_max(self) -> float:
        return float(self.quadrature.get("s_max", 1e8))

    def symbol_field(self, h_scale: float = 1.0) -> SampledField:
        origin, h, shape = self.grid_tuple(h_scale)
        return symbol_from_id(self.symbol, self.dim, origin, h, shape)

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def echo(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

def _parse_center(token: str, dim: int):
    vals = [float(v) for v in token.split(",")]
    if len(vals) == 1 and dim > 1:
        vals = vals * dim
    if len(vals) != dim:
        raise ConfigError(f"center {token!r} has wrong dimension")
    return np.asarray(vals)


def _corpus_field(spec: str, idx: int, cfg: ExperimentConfig,
                  h_scale: float) -> SampledField:
    origin, h, shape = cfg.grid_tuple(h_scale)
    dim = cfg.dim
    parts = spec.strip().split(":")
    head = parts[0].lower()
    if head == "zero":
        fn = lambda p: np.zeros(len(p))
    elif head == "const":
        c = float(parts[1])
        fn = lambda p: np.full(len(p), c)
    elif head == "indicator":
        ctr = _parse_center(parts[1], dim)
        rad = float(parts[2])
        fn = lambda p: (np.sqrt(np.sum((p - ctr) ** 2, axis=1)) < rad).astype(float)
    elif head == "bump":
        # truncated power bump |x - x0|^{-gamma} on the unit ball around x0;
        # keep gamma below n/p1 so local Orlicz norms stay finite
        ctr = _parse_center(parts[1], dim)
        gamma = float(parts[2])
        def fn(p, ctr=ctr, gamma=gamma):
            d = np.sqrt(np.sum((p - ctr) ** 2, axis=1))
            out = np.zeros(len(p))
            inside = (d < 1.0) & (d > 0)
            out[inside] = d[inside] ** (-gamma)
            return out
    elif head == "trig":
        k = int(parts[1])
        rng = np.random.default_rng([cfg.seed, idx])
        amps = rng.normal(size=(k, 2 * dim))
        span = float(np.max(np.atleast_1d(cfg.grid["shape"])) * cfg.grid["h"])
        def fn(p, amps=amps, span=span, k=k):
            out = np.zeros(len(p))
            for j in range(k):
                for a in range(p.shape[1]):
                    arg = (j + 1) * math.pi * p[:, a] / span
                    out += amps[j, 2 * a] * np.cos(arg)
                    out += amps[j, 2 * a + 1] * np.sin(arg)
            return out / math.sqrt(k)
    elif head == "step":
        edge = float(parts[1])
        fn = lambda p: np.sign(p[:, 0] - edge)
    else:
        raise ConfigError(f"unknown corpus generator: {spec!r}")
    return SampledField.from_function(fn, dim, origin, h, shape, label=spec)


def build_corpus(cfg: ExperimentConfig,
                 h_scale: float = 1.0) -> list[SampledField]:
    """Deterministic corpus: the same config and seed always produce
    bit-identical fields."""
    return [_corpus_field(spec, idx, cfg, h_scale)
            for idx, spec in enumerate(cfg.corpus)]


# ---------------------------------------------------------------------------
# parallel map
# ---------------------------------------------------------------------------

def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def parallel_map(fn, items, workers: int | None = None) -> list:
    """Order-preserving map; reduction happens by task index, never by
    completion order, so worker count cannot change results."""
    items = list(items)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


@dataclass
class _PointTask:
    kind: str
    f: SampledField
    x: tuple
    alpha: float
    quad: ConeQuadrature
    lam: float | None
    symbol: SampledField | None


def _eval_point(task: _PointTask) -> float:
    return square_function(task.kind, task.f, np.asarray(task.x),
                           task.alpha, task.quad, lam=task.lam,
                           symbol=task.symbol)


def square_function_field(kind: str, f: SampledField, alpha: float,
                          quad: ConeQuadrature, lam: float | None = None,
                          symbol: SampledField | None = None,
                          region: Ball | None = None,
                          workers: int | None = None) -> SampledField:
    """Square-function values materialized on f's grid (0 outside the
    requested region); the per-point tasks fan out to the worker pool."""
    pts = f.center_points()
    if region is not None:
        keep = np.sqrt(np.sum((pts - np.asarray(region.center)) ** 2,
                              axis=1)) < region.radius
    else:
        keep = np.ones(len(pts), dtype=bool)
    tasks = [_PointTask(kind, f, tuple(pts[i]), alpha, quad, lam, symbol)
             for i in np.nonzero(keep)[0]]
    vals = parallel_map(_eval_point, tasks, workers)
    flat = np.zeros(len(pts))
    flat[np.nonzero(keep)[0]] = vals
    return f.like(flat.reshape(f.shape), label=f"{kind}[{f.label}]")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    kind: str
    config: dict
    quadrature: dict
    constants: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    stability: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)
    passed: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "ok" if all(self.passed.values()) else "tolerance_violation"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "status": self.status,
            "config": self.config,
            "quadrature": self.quadrature,
            "constants": self.constants,
            "rows": self.rows,
            "stability": self.stability,
            "findings": self.findings,
            "passed": self.passed,
        }


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, (list, tuple)):
        out[prefix] = "[" + ";".join(_fmt(v) for v in obj) + "]"
    else:
        out[prefix] = _fmt(obj)


def emit(report: VerificationReport, fmt: str, out_dir) -> list[str]:
    """Write the report; deterministic bytes for a fixed report.

    JSON keeps native floats (repr round-trips float64 exactly); CSV
    renders every float at 17 significant digits.  ``fmt`` is 'csv',
    'json' or 'both'.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if fmt in ("json", "both"):
        path = os.path.join(out_dir, f"{report.kind}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")
        paths.append(path)
    if fmt in ("csv", "both"):
        path = os.path.join(out_dir, f"{report.kind}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# kind,{report.kind}\n")
            fh.write(f"# status,{report.status}\n")
            fh.write("# config," + json.dumps(report.config, sort_keys=True)
                     + "\n")
            fh.write("# quadrature,"
                     + json.dumps(report.quadrature, sort_keys=True) + "\n")
            for name in sorted(report.constants):
                fh.write(f"# constant,{name},{_fmt(report.constants[name])}\n")
            for name in sorted(report.stability):
                fh.write(f"# stability,{name},{_fmt(report.stability[name])}\n")
            for name in sorted(report.passed):
                fh.write(f"# passed,{name},{report.passed[name]}\n")
            for note in report.findings:
                fh.write(f"# finding,{note}\n")
            if report.rows:
                flat_rows = []
                for row in report.rows:
                    out: dict = {}
                    _flatten("", row, out)
                    flat_rows.append(out)
                cols = sorted({c for row in flat_rows for c in row})
                fh.write(",".join(cols) + "\n")
                for row in flat_rows:
                    fh.write(",".join(row.get(c, "") for c in cols) + "\n")
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# shared evaluation pieces
# ---------------------------------------------------------------------------

def _tail_norm_integral(f: SampledField, phi: YoungFunction, center,
                        r: float, with_log: bool, t_hi: float,
                        points_per_decade: int = 16) -> float:
    """integral_{2r}^{t_hi} [1 + ln(t/r)]^kappa ||f||_{L^phi(B(x,t))}
    phi^{-1}(t^{-n}) dt/t by log-trapezoid."""
    lo = 2.0 * r
    n_pts = max(2, int(math.ceil(points_per_decade * math.log10(t_hi / lo))) + 1)
    ts = np.exp(np.linspace(math.log(lo), math.log(t_hi), n_pts))
    kappa = 1.0 if with_log else 0.0
    norms = np.array([luxemburg_norm(f, Ball(center, float(t)), phi)
                      for t in ts])
    integrand = ((1.0 + np.log(ts / r)) ** kappa * norms
                 * phi.inverse(ts ** (-float(f.dim))))
    return float(np.trapezoid(integrand, np.log(ts)))


def _local_estimate_constant(cfg: ExperimentConfig, h_scale: float,
                             workers: int | None, with_symbol: bool,
                             symbol_shift: float = 0.0) -> tuple[float, list]:
    phi = cfg.young_fn()
    quad = cfg.cone_quadrature()
    probes = cfg.probe_set()
    fields = build_corpus(cfg, h_scale)
    symbol = None
    norm_b = 1.0
    if with_symbol:
        symbol = cfg.symbol_field(h_scale)
        if symbol_shift:
            symbol = symbol.like(symbol.values + symbol_shift)
        norm_b = bmo_norm(symbol, probes)
        if norm_b <= 0:
            raise HypothesisUnmetError(
                "symbol has zero oscillation; commutator estimates are void")
    t_hi = max(100.0 * float(probes.radii[-1]), 4.0 * fields[0].box_side)
    rows = []
    constant = 0.0
    for f in fields:
        for ball in probes.balls():
            gf = square_function_field(
                "lusin", f, cfg.alpha, quad, symbol=symbol, region=ball,
                workers=workers)
            lhs = luxemburg_norm(gf, ball, phi)
            tail = _tail_norm_integral(f, phi, ball.center, ball.radius,
                                       with_log=with_symbol, t_hi=t_hi)
            rhs = norm_b * tail / float(phi.inverse(ball.radius ** (-cfg.dim)))
            ratio = lhs / rhs if rhs > 0 else 0.0
            rows.append({"field": f.label, "center": list(ball.center),
                         "r": ball.radius, "lhs": lhs, "rhs": rhs,
                         "ratio": ratio})
            constant = max(constant, ratio)
    return constant, rows


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def _exp_local_estimate(cfg: ExperimentConfig, workers, with_symbol: bool
                        ) -> VerificationReport:
    kind = ("commutator_local_estimate" if with_symbol else "local_estimate")
    if with_symbol and cfg.symbol is None:
        raise ConfigError(f"{kind} requires a symbol")
    constant, rows = _local_estimate_constant(cfg, 1.0, workers, with_symbol)
    stability = {}
    passed = {"finite": math.isfinite(constant)}
    tol = cfg.tolerance("stability", 0.05)
    if cfg.refine:
        refined, _ = _local_estimate_constant(cfg, 0.5, workers, with_symbol)
        delta = abs(refined - constant) / constant if constant > 0 else 0.0
        stability["refined_constant"] = refined
        stability["delta"] = delta
        passed["stability"] = delta < tol
    if with_symbol and cfg.shift_check:
        shifted, _ = _local_estimate_constant(cfg, 1.0, workers, True,
                                              symbol_shift=5.0)
        shift_delta = (abs(shifted - constant) / constant
                       if constant > 0 else 0.0)
        stability["shift_delta"] = shift_delta
        passed["shift_invariance"] = shift_delta < cfg.tolerance(
            "shift", 1e-12)
    return VerificationReport(
        kind=kind, config=cfg.echo(),
        quadrature=cfg.cone_quadrature().describe(),
        constants={"empirical_constant": constant},
        rows=rows, stability=stability, passed=passed)


def _morrey_ratio(cfg: ExperimentConfig, h_scale, workers, kind: str,
                  with_symbol: bool) -> tuple[float, list]:
    phi = cfg.young_fn()
    w1 = cfg.weight(cfg.phi1)
    w2 = cfg.weight(cfg.phi2)
    quad = cfg.cone_quadrature()
    probes = cfg.probe_set()
    fields = build_corpus(cfg, h_scale)
    symbol = cfg.symbol_field(h_scale) if with_symbol else None
    norm_b = bmo_norm(symbol, probes) if with_symbol else 1.0
    if with_symbol and norm_b <= 0:
        raise HypothesisUnmetError("symbol has zero oscillation")
    rows = []
    worst = 0.0
    for f in fields:
        denom = morrey_norm(f, phi, w1, probes)
        if denom == 0.0:
            rows.append({"field": f.label, "ratio": 0.0, "num": 0.0,
                         "den": 0.0})
            continue
        sf = square_function_field(kind, f, cfg.alpha, quad,
                                   lam=cfg.lam if kind == "halfspace" else None,
                                   symbol=symbol, workers=workers)
        num = morrey_norm(sf, phi, w2, probes)
        ratio = num / (denom * norm_b)
        worst = max(worst, ratio)
        rows.append({"field": f.label, "ratio": ratio, "num": num,
                     "den": denom})
    return worst, rows


def _require_zygmund(cfg: ExperimentConfig, with_log: bool):
    res = zygmund_constant(cfg.weight(cfg.phi1), cfg.weight(cfg.phi2),
                           cfg.young_fn(), with_log, cfg.probe_set(),
                           cfg.s_max(), cfg.dim)
    if res.status != "ok":
        raise HypothesisUnmetError(
            f"integral condition {res.status} (drift {res.drift:.3g})",
            detail={"status": res.status, "drift": res.drift,
                    "constant": res.constant})
    return res


def _exp_morrey_bound(cfg, workers, with_symbol: bool) -> VerificationReport:
    kind = "commutator_morrey_bound" if with_symbol else "morrey_bound"
    if with_symbol and cfg.symbol is None:
        raise ConfigError(f"{kind} requires a symbol")
    zyg = _require_zygmund(cfg, with_log=with_symbol)
    ratio, rows = _morrey_ratio(cfg, 1.0, workers, "lusin", with_symbol)
    stability = {}
    passed = {"finite": math.isfinite(ratio),
              "condition_ok": zyg.status == "ok"}
    if cfg.refine:
        refined, _ = _morrey_ratio(cfg, 0.5, workers, "lusin", with_symbol)
        delta = abs(refined - ratio) / ratio if ratio > 0 else 0.0
        stability = {"refined_ratio": refined, "delta": delta}
        passed["stability"] = delta < cfg.tolerance("stability", 0.05)
    return VerificationReport(
        kind=kind, config=cfg.echo(),
        quadrature=cfg.cone_quadrature().describe(),
        constants={"morrey_ratio": ratio,
                   "zygmund_constant": zyg.constant,
                   "zygmund_drift": zyg.drift},
        rows=rows, stability=stability, passed=passed)


def _exp_vertical(cfg, workers) -> VerificationReport:
    phi = cfg.young_fn()
    quad = cfg.cone_quadrature()
    probes = cfg.probe_set()
    fields = build_corpus(cfg)
    rows = []
    ratios = []
    for f in fields:
        for ctr in probes.centers:
            g = square_function("vertical", f, np.asarray(ctr), cfg.alpha,
                                quad)
            G = square_function("lusin", f, np.asarray(ctr), cfg.alpha, quad)
            row = {"field": f.label, "center": list(ctr), "vertical": g,
                   "lusin": G}
            if G > 0:
                row["ratio"] = g / G
                ratios.append(g / G)
            rows.append(row)
    constants = {}
    if ratios:
        constants = {"ratio_min": min(ratios), "ratio_max": max(ratios)}
    passed = {"finite": all(math.isfinite(r) for r in ratios)}
    return VerificationReport(
        kind="vertical_comparability", config=cfg.echo(),
        quadrature=cfg.cone_quadrature().describe(),
        constants=constants, rows=rows, passed=passed)


def _exp_halfspace(cfg, workers) -> VerificationReport:
    from .intrinsic import halfspace_square_function
    if cfg.lam <= 3.0 + 2.0 * cfg.alpha / cfg.dim:
        raise HypothesisUnmetError(
            f"lam={cfg.lam} at or below 3 + 2 alpha / n")
    zyg = _require_zygmund(cfg, with_log=False)
    phi = cfg.young_fn()
    quad = cfg.cone_quadrature()
    probes = cfg.probe_set()
    fields = build_corpus(cfg)
    rows = []
    near_ok = True
    far_ok = True
    cap_delta = 0.0
    j_max = int(math.floor(math.log2(quad.beta_max)))
    from dataclasses import replace as _replace
    quad_wide = (_replace(quad, halfspace_cap=2.0 * quad.halfspace_cap)
                 if math.isfinite(quad.halfspace_cap) else quad)
    for f in fields:
        for ctr in probes.centers:
            a_sq = cone_kernel_sups(f, np.asarray(ctr), cfg.alpha, quad)
            hv = halfspace_square_function(f, np.asarray(ctr), cfg.alpha,
                                           cfg.lam, quad, a_sq=a_sq)
            G1 = lusin_square_function(f, np.asarray(ctr), cfg.alpha, quad,
                                       beta=1.0, a_sq=a_sq)
            ann = annular_far_bound(a_sq, quad, cfg.lam, j_max)
            near_ok = near_ok and hv.near_sq <= G1 ** 2 * (1 + 1e-9) + 1e-300
            far_ok = far_ok and hv.far_sq <= ann * 1.05 + 1e-300
            row = {"field": f.label, "center": list(ctr),
                   "value": hv.value, "near_sq": hv.near_sq,
                   "far_sq": hv.far_sq, "unit_cone": G1,
                   "annular_bound": ann}
            if quad_wide is not quad:
                wide = halfspace_square_function(
                    f, np.asarray(ctr), cfg.alpha, cfg.lam, quad_wide,
                    a_sq=a_sq)
                drift = (abs(wide.value - hv.value) / hv.value
                         if hv.value > 0 else 0.0)
                row["cap_doubling_delta"] = drift
                cap_delta = max(cap_delta, drift)
            rows.append(row)
    ratio, ratio_rows = _morrey_ratio(cfg, 1.0, workers, "halfspace", False)
    passed = {"near_part_bounded": near_ok, "far_part_bounded": far_ok,
              "finite": math.isfinite(ratio),
              "cap_stable": cap_delta < cfg.tolerance("stability", 0.05)}
    return VerificationReport(
        kind="halfspace_bound", config=cfg.echo(),
        quadrature=cfg.cone_quadrature().describe(),
        constants={"morrey_ratio": ratio,
                   "zygmund_constant": zyg.constant,
                   "cap_doubling_delta": cap_delta},
        rows=rows + ratio_rows, passed=passed)


def _exp_orlicz_bound(cfg, workers) -> VerificationReport:
    phi = cfg.young_fn()
    quad = cfg.cone_quadrature()
    fields = build_corpus(cfg)
    f0 = fields[0]
    center = tuple(f0.origin + 0.5 * f0.h * np.asarray(f0.shape))
    radius = 0.5 * float(np.linalg.norm(f0.h * np.asarray(f0.shape))) + f0.h
    glob = Ball(center, radius)
    symbol = cfg.symbol_field() if cfg.symbol else None
    probes = cfg.probe_set()
    norm_b = bmo_norm(symbol, probes) if symbol is not None else 1.0
    rows = []
    worst = 0.0
    worst_comm = 0.0
    for f in fields:
        den = luxemburg_norm(f, glob, phi)
        if den == 0.0:
            rows.append({"field": f.label, "ratio": 0.0})
            continue
        gf = square_function_field("lusin", f, cfg.alpha, quad,
                                   workers=workers)
        num = luxemburg_norm(gf, glob, phi)
        row = {"field": f.label, "ratio": num / den}
        worst = max(worst, num / den)
        if symbol is not None and norm_b > 0:
            cf = square_function_field("lusin", f, cfg.alpha, quad,
                                       symbol=symbol, workers=workers)
            cnum = luxemburg_norm(cf, glob, phi)
            row["commutator_ratio"] = cnum / (den * norm_b)
            worst_comm = max(worst_comm, cnum / (den * norm_b))
        rows.append(row)
    constants = {"orlicz_ratio": worst}
    if symbol is not None:
        constants["commutator_ratio"] = worst_comm
    return VerificationReport(
        kind="orlicz_bound", config=cfg.echo(),
        quadrature=cfg.cone_quadrature().describe(),
        constants=constants, rows=rows,
        passed={"finite": math.isfinite(worst)})


def run_experiment(kind: str, cfg: ExperimentConfig,
                   workers: int | None = None) -> VerificationReport:
    """Run one named check; raises HypothesisUnmetError when the
    experiment's integral condition fails (a valid negative outcome)."""
    if kind == "local_estimate":
        return _exp_local_estimate(cfg, workers, with_symbol=False)
    if kind == "commutator_local_estimate":
        return _exp_local_estimate(cfg, workers, with_symbol=True)
    if kind == "morrey_bound":
        return _exp_morrey_bound(cfg, workers, with_symbol=False)
    if kind == "commutator_morrey_bound":
        return _exp_morrey_bound(cfg, workers, with_symbol=True)
    if kind == "vertical_comparability":
        return _exp_vertical(cfg, workers)
    if kind == "halfspace_bound":
        return _exp_halfspace(cfg, workers)
    if kind == "orlicz_bound":
        return _exp_orlicz_bound(cfg, workers)
    raise ConfigError(f"unknown experiment kind {kind!r}; "
                      f"choose from {EXPERIMENT_KINDS}")
