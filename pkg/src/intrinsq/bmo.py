"""Bounded-mean-oscillation diagnostics and the commutator square functions.

The norm is the sup over probe balls of the mean of |b - b_B|.  The
companion diagnostics quantify the classical structure of that class on a
grid: the logarithmic drift of nested ball averages, the exponential decay
of the oscillation distribution (with constants fitted, never assumed),
the equivalence with p-mean oscillation, and the Orlicz-mean-oscillation
form used by the commutator estimates.

Symbol catalog ids: "const:c", "log" (log of |x|), "affine:a:b"
(a times the coordinate sum plus b), "table:<path>" (a field CSV).

Singular symbols must be sampled with the singularity on a cell boundary,
never at a center; the built-in grids put 0 between cells, so the
midpoint rule sees only finite values of a locally integrable function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import Ball, SampledField
from .intrinsic import ConeQuadrature, square_function
from .morrey import ProbeSet
from .orlicz import luxemburg_norm
from .young import PowerYoung, YoungFunction

__all__ = [
    "ball_average",
    "bmo_norm",
    "log_drift_constant",
    "OscillationEquivalence",
    "orlicz_oscillation",
    "oscillation_distribution",
    "JohnNirenbergFit",
    "fit_john_nirenberg",
    "BmoReport",
    "bmo_report",
    "commutator_square_function",
    "symbol_from_id",
]


def ball_average(b: SampledField, ball: Ball, min_cells: int = 4) -> float:
    """Midpoint-rule mean of the field over the ball."""
    vals = b.restrict(ball)
    if vals.size < min_cells:
        raise ValueError(
            f"ball covers {vals.size} cells, fewer than {min_cells}"
        )
    return float(vals.mean())


def bmo_norm(b: SampledField, probes: ProbeSet) -> float:
    """sup over probes of the mean oscillation |B|^{-1} int_B |b - b_B|."""
    probes.validate_for(b)
    best = 0.0
    for ball in probes.balls():
        vals = b.restrict(ball)
        if vals.size < 4:
            continue
        best = max(best, float(np.abs(vals - vals.mean()).mean()))
    return best


def log_drift_constant(b: SampledField, probes: ProbeSet) -> float:
    """max over nested probe pairs (same center, t > 2r) of
    |b_{B(x,r)} - b_{B(x,t)}| / (||b||_* ln(t/r))."""
    norm = bmo_norm(b, probes)
    if norm <= 0.0:
        raise ValueError("log drift needs a symbol with positive norm")
    best = 0.0
    for ctr in probes.centers:
        radii = [float(r) for r in probes.radii]
        avgs = {r: ball_average(b, Ball(ctr, r)) for r in radii}
        for r in radii:
            for t in radii:
                if t > 2.0 * r:
                    drift = abs(avgs[r] - avgs[t]) / (norm * math.log(t / r))
                    best = max(best, drift)
    return best


@dataclass
class OscillationEquivalence:
    """Orlicz mean-oscillation versus the plain norm.

    Two normalizations are reported: by phi^{-1}(|B|^{-1}) (the ball
    measure, the one the commutator estimates actually use) and by
    phi^{-1}(r^{-n}); they differ by a factor depending on phi and the
    unit-ball volume.  lhs and ratio refer to the ball-measure form.
    """

    lhs: float
    ratio_to_bmo_norm: float
    lhs_radius_power: float
    ratio_radius_power: float


def orlicz_oscillation(b: SampledField, phi: YoungFunction,
                       probes: ProbeSet) -> OscillationEquivalence:
    """max over probes of phi^{-1}(|B|^{-1}) ||b - b_B||_{L^phi(B)} and its
    ratio to the plain norm; fails the precondition unless phi has finite
    type exponents above 1."""
    if not (phi.p0 > 1.0 and math.isfinite(phi.p1)):
        raise ValueError("equivalence requires type exponents 1 < p0 <= p1 < inf")
    probes.validate_for(b)
    norm = bmo_norm(b, probes)
    best_meas = 0.0
    best_rad = 0.0
    n = b.dim
    for ball in probes.balls():
        vals = b.restrict(ball)
        if vals.size < 4:
            continue
        osc = b.like(np.zeros_like(b.values))
        # oscillation field materialized on the parent grid
        slices, mask = b.ball_mask(ball)
        patch = np.zeros_like(b.values[slices])
        patch[mask] = vals - vals.mean()
        osc.values[slices] = patch
        lux = luxemburg_norm(osc, ball, phi)
        meas = b.discrete_measure(ball)
        best_meas = max(best_meas, float(phi.inverse(1.0 / meas)) * lux)
        best_rad = max(best_rad, float(phi.inverse(ball.radius ** (-n))) * lux)
    ratio_meas = best_meas / norm if norm > 0 else math.nan
    ratio_rad = best_rad / norm if norm > 0 else math.nan
    return OscillationEquivalence(
        lhs=best_meas,
        ratio_to_bmo_norm=ratio_meas,
        lhs_radius_power=best_rad,
        ratio_radius_power=ratio_rad,
    )


def p_mean_oscillation(b: SampledField, ball: Ball, p: float) -> float:
    """(|B|^{-1} int_B |b - b_B|^p)^{1/p} on the shared cell measure."""
    vals = b.restrict(ball)
    if vals.size < 4:
        raise ValueError("ball too small for a meaningful oscillation")
    return float(np.mean(np.abs(vals - vals.mean()) ** p) ** (1.0 / p))


def oscillation_distribution(b: SampledField, ball: Ball,
                             beta_grid: np.ndarray) -> np.ndarray:
    """|{x in B : |b - b_B| > beta}| / |B| on the grid of thresholds."""
    vals = b.restrict(ball)
    osc = np.abs(vals - vals.mean())
    return np.array([(osc > beta).mean() for beta in beta_grid])


@dataclass
class JohnNirenbergFit:
    c1: float
    c2: float
    residual: float
    n_thresholds: int


def fit_john_nirenberg(b: SampledField, probes: ProbeSet,
                       min_cells: int = 10) -> JohnNirenbergFit:
    """Fit mu(beta) <= c1 exp(-c2 beta / ||b||_*) to the pooled empirical
    oscillation distributions over the probe balls.

    The slope comes from least squares on log counts, clipped to
    thresholds with at least min_cells exceeding cells (tails below grid
    resolution are noise); c1 is then inflated so the bound dominates
    every pooled point.  The fit residual is reported, not asserted.
    """
    norm = bmo_norm(b, probes)
    if norm <= 0:
        raise ValueError("John-Nirenberg fit needs a positive norm")
    xs, ys = [], []
    pooled = []
    for ball in probes.balls():
        vals = b.restrict(ball)
        if vals.size < 4 * min_cells:
            continue
        osc = np.abs(vals - vals.mean())
        top = float(osc.max())
        if top <= 0:
            continue
        grid = np.linspace(0.1 * top, 0.95 * top, 24)
        for beta in grid:
            count = int((osc > beta).sum())
            if count >= min_cells:
                mu = count / osc.size
                xs.append(beta / norm)
                ys.append(math.log(mu))
                pooled.append((beta / norm, mu))
    if len(xs) < 4:
        raise ValueError("not enough resolved thresholds for a fit")
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    slope, intercept = np.polyfit(xs, ys, 1)
    c2 = max(-float(slope), 1e-12)
    resid = float(np.sqrt(np.mean((ys - (intercept - c2 * xs)) ** 2)))
    # inflate c1 until the bound dominates the full step structure of the
    # empirical distribution on every probe ball: mu is constant between
    # oscillation values, so dominating the left limit at each value
    # dominates everywhere
    c1 = 1.0
    for ball in probes.balls():
        vals = b.restrict(ball)
        if vals.size < 4:
            continue
        osc = np.sort(np.abs(vals - vals.mean()))
        levels = np.unique(osc[osc > 0])
        mu_geq = 1.0 - np.searchsorted(osc, levels, side="left") / osc.size
        c1 = max(c1, float(np.max(mu_geq * np.exp(c2 * levels / norm))))
    return JohnNirenbergFit(c1=float(c1), c2=float(c2), residual=resid,
                            n_thresholds=len(xs))


@dataclass
class BmoReport:
    norm: float
    log_drift_c: float
    jn_c1: float
    jn_c2: float
    jn_residual: float
    p_norm_equiv: float

    def validate(self) -> None:
        fields = (self.norm, self.log_drift_c, self.jn_c1, self.jn_c2,
                  self.p_norm_equiv)
        if any(v < 0 or not math.isfinite(v) for v in fields):
            raise ValueError("report fields must be finite and nonnegative")


def bmo_report(b: SampledField, probes: ProbeSet) -> BmoReport:
    """Norm, drift constant, John-Nirenberg fit and the L2 comparison."""
    norm = bmo_norm(b, probes)
    drift = log_drift_constant(b, probes) if norm > 0 else 0.0
    jn = fit_john_nirenberg(b, probes)
    l2 = 0.0
    for ball in probes.balls():
        if b.cell_count(ball) >= 4:
            l2 = max(l2, p_mean_oscillation(b, ball, 2.0))
    report = BmoReport(
        norm=norm,
        log_drift_c=drift,
        jn_c1=jn.c1,
        jn_c2=jn.c2,
        jn_residual=jn.residual,
        p_norm_equiv=l2 / norm if norm > 0 else 0.0,
    )
    report.validate()
    return report


def commutator_square_function(kind: str, f: SampledField, b: SampledField,
                               x, alpha: float, quad: ConeQuadrature,
                               lam: float | None = None) -> float:
    """Square function of the given kind with the kernel integrand
    multiplied by b(x) - b(z); identical quadrature skeletons, the symbol
    difference lives inside each node's LP objective."""
    return square_function(kind, f, x, alpha, quad, lam=lam, symbol=b)


# ---------------------------------------------------------------------------
# symbol catalog
# ---------------------------------------------------------------------------

def symbol_from_id(spec: str, dim: int, origin, h: float,
                   shape) -> SampledField:
    parts = spec.strip().split(":")
    head = parts[0].lower()
    if head == "const":
        c = float(parts[1])
        fn = lambda p: np.full(len(p), c)
    elif head == "log":
        fn = lambda p: np.log(np.sqrt(np.sum(p ** 2, axis=1)))
    elif head == "affine":
        a, c = float(parts[1]), float(parts[2])
        fn = lambda p: a * np.sum(p, axis=1) + c
    elif head == "table":
        return SampledField.from_csv(spec[len("table:"):])
    else:
        raise ValueError(f"unknown symbol id: {spec!r}")
    return SampledField.from_function(fn, dim, origin, h, shape, label=spec)
