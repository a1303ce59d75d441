"""Command-line interface.

One verb per module plus the theorem-scale verification verbs:

    intrinsq young    --config cfg.json   growth/bracket diagnostics
    intrinsq norm     --config cfg.json   Orlicz and Morrey norms of the corpus
    intrinsq sqfn     --config cfg.json   square-function values at probe centers
    intrinsq zygmund  --config cfg.json   integral-condition constants
    intrinsq hardy    --config cfg.json   supremal Hardy best constant
    intrinsq verify <kind> --config cfg.json

Exit codes: 0 all declared tolerances met, 1 usage or config error,
2 tolerance violation, 3 hypothesis unmet.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .backend import active_backend
from .bmo import bmo_norm, bmo_report
from .harness import (EXPERIMENT_KINDS, ConfigError, ExperimentConfig,
                      HypothesisUnmetError, VerificationReport, build_corpus,
                      default_workers, emit, run_experiment)
from .intrinsic import square_function
from .morrey import (HardyConfig, hardy_best_constant, hardy_extremal_g,
                     hardy_verify, morrey_norm, weight_from_id,
                     zygmund_constant)
from .orlicz import luxemburg_norm
from .young import estimate_growth_constants, verify_inverse_bracket

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2
EXIT_UNMET = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors must exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", default=None, help="report directory")
    p.add_argument("--workers", type=int, default=None,
                   help="worker pool size (default: INTRINSQ_WORKERS or 1)")
    p.add_argument("--format", choices=("csv", "json", "both"),
                   default="both")
    p.add_argument("--seed", type=int, default=None, help="override cfg seed")


def _load(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.seed = int(args.seed)
    return cfg


def _finish(report: VerificationReport, cfg, args) -> int:
    out_dir = args.out if args.out is not None else cfg.output
    paths = emit(report, args.format, out_dir)
    for p in paths:
        print(p)
    return EXIT_OK if report.status == "ok" else EXIT_TOLERANCE


def _cmd_young(args) -> int:
    cfg = _load(args)
    phi = cfg.young_fn()
    grid = np.exp(np.linspace(math.log(1e-3), math.log(min(1e3, phi.domain_cap / 2)), 64))
    growth = estimate_growth_constants(phi, grid)
    bracket = verify_inverse_bracket(
        phi, np.exp(np.linspace(math.log(1e-2), math.log(1e2), 200)))
    report = VerificationReport(
        kind="young", config=cfg.echo(), quadrature={},
        constants={
            "delta2_k": growth.delta2_k,
            "delta2_unbounded": growth.delta2_unbounded,
            "nabla2_k": (growth.nabla2_k if growth.nabla2_k is not None
                         else "absent"),
            "empirical_p0": growth.empirical_p0,
            "empirical_p1": growth.empirical_p1,
            "bracket_inv_low": bracket.inv_low_defect,
            "bracket_inv_high": bracket.inv_high_defect,
            "bracket_conj_low": bracket.conj_low_defect,
            "bracket_conj_high": bracket.conj_high_defect,
        },
        passed={"bracket": bracket.violations(1e-8) == 0})
    return _finish(report, cfg, args)


def _cmd_norm(args) -> int:
    cfg = _load(args)
    phi = cfg.young_fn()
    w1 = cfg.weight(cfg.phi1)
    probes = cfg.probe_set()
    rows = []
    for f in build_corpus(cfg):
        entry = {"field": f.label,
                 "morrey_norm": morrey_norm(f, phi, w1, probes)}
        for ball in probes.balls():
            key = f"lux[{','.join(f'{c:g}' for c in ball.center)};{ball.radius:g}]"
            entry[key] = luxemburg_norm(f, ball, phi)
        rows.append(entry)
    report = VerificationReport(kind="norm", config=cfg.echo(),
                                quadrature={}, rows=rows,
                                passed={"computed": True})
    return _finish(report, cfg, args)


def _cmd_sqfn(args) -> int:
    cfg = _load(args)
    quad = cfg.cone_quadrature()
    probes = cfg.probe_set()
    symbol = cfg.symbol_field() if cfg.symbol else None
    rows = []
    for f in build_corpus(cfg):
        for ctr in probes.centers:
            x = np.asarray(ctr)
            row = {"field": f.label, "center": list(ctr),
                   "lusin": square_function("lusin", f, x, cfg.alpha, quad),
                   "vertical": square_function("vertical", f, x, cfg.alpha,
                                               quad),
                   "halfspace": square_function("halfspace", f, x, cfg.alpha,
                                                quad, lam=cfg.lam)}
            if symbol is not None:
                for kind in ("lusin", "vertical", "halfspace"):
                    row[f"commutator_{kind}"] = square_function(
                        kind, f, x, cfg.alpha, quad,
                        lam=cfg.lam if kind == "halfspace" else None,
                        symbol=symbol)
            rows.append(row)
    report = VerificationReport(kind="sqfn", config=cfg.echo(),
                                quadrature=quad.describe(), rows=rows,
                                passed={"computed": True})
    return _finish(report, cfg, args)


def _cmd_zygmund(args) -> int:
    cfg = _load(args)
    phi = cfg.young_fn()
    probes = cfg.probe_set()
    rows = []
    constants = {}
    for with_log in (False, True):
        res = zygmund_constant(cfg.weight(cfg.phi1), cfg.weight(cfg.phi2),
                               phi, with_log, probes, cfg.s_max(), cfg.dim)
        tag = "log_weighted" if with_log else "plain"
        constants[f"{tag}_constant"] = res.constant
        constants[f"{tag}_status"] = res.status
        constants[f"{tag}_drift"] = res.drift
        rows.extend({"variant": tag, **row} for row in res.per_probe)
    report = VerificationReport(kind="zygmund", config=cfg.echo(),
                                quadrature={"s_max": cfg.s_max()},
                                constants=constants, rows=rows,
                                passed={"computed": True})
    return _finish(report, cfg, args)


def _cmd_hardy(args) -> int:
    cfg = _load(args)
    q = cfg.quadrature
    hc = HardyConfig.build(
        cfg.weight(cfg.phi1), cfg.weight(cfg.phi2),
        weight_from_id(cfg.quadrature.get("hardy_w", "powerlaw:-3")),
        t_min=float(q.get("t_min", 0.1)), t_max=float(q.get("t_max", 100.0)),
        s_max=float(q.get("s_max", 1e6)))
    res = hardy_best_constant(hc)
    if res.status != "ok":
        report = VerificationReport(
            kind="hardy", config=cfg.echo(), quadrature={},
            constants={"status": res.status, "constant": res.constant},
            passed={"finite": False})
        _finish(report, cfg, args)
        return EXIT_UNMET
    grid = hc.t_grid
    corpus = [np.ones_like(grid), grid.copy(), np.sqrt(grid),
              np.minimum(grid, float(np.median(grid)))]
    ver = hardy_verify(hc, corpus)
    report = VerificationReport(
        kind="hardy", config=cfg.echo(),
        quadrature={"t_min": float(grid[0]), "t_max": float(grid[-1]),
                    "s_max": hc.s_max},
        constants={"best_constant": res.constant, "drift": res.drift,
                   "max_ratio": ver.max_ratio,
                   "witness_ratio": ver.witness_ratio},
        passed={"no_violation": not ver.violations})
    return _finish(report, cfg, args)


def _cmd_verify(args) -> int:
    cfg = _load(args)
    try:
        report = run_experiment(args.kind, cfg, workers=args.workers)
    except HypothesisUnmetError as exc:
        stub = VerificationReport(
            kind=args.kind, config=cfg.echo(), quadrature={},
            constants={"hypothesis": "unmet", "reason": str(exc)},
            passed={"hypothesis": False})
        out_dir = args.out if args.out is not None else cfg.output
        for p in emit(stub, args.format, out_dir):
            print(p)
        print(f"hypothesis unmet: {exc}", file=sys.stderr)
        return EXIT_UNMET
    return _finish(report, cfg, args)


def main(argv=None) -> int:
    parser = _Parser(prog="intrinsq",
                     description="square-function and Orlicz-Morrey checks "
                                 f"(backend: {active_backend()})")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("young", _cmd_young), ("norm", _cmd_norm),
                     ("sqfn", _cmd_sqfn), ("zygmund", _cmd_zygmund),
                     ("hardy", _cmd_hardy)):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(fn=fn)
    pv = sub.add_parser("verify")
    pv.add_argument("kind", choices=EXPERIMENT_KINDS)
    _add_common(pv)
    pv.set_defaults(fn=_cmd_verify)
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = default_workers()
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
