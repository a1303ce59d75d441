"""Young-function calculus.

A Young function is convex, left-continuous, vanishes at 0 and tends to
infinity; the catalog here is restricted to functions that are finite and
positive on (0, inf), which makes the generalized inverse an honest inverse.
The module provides evaluation, the generalized inverse, the convex
conjugate (Legendre transform, returned as a tabulated function on a log
grid), verification of the inverse brackets

    phi(phi^{-1}(r)) <= r <= phi^{-1}(phi(r)),
    r <= phi^{-1}(r) * conj(phi)^{-1}(r) <= 2 r,

and doubling/growth diagnostics (the Delta2 and Nabla2 constants plus
empirical lower/upper type exponents).

Catalog families, addressable by string id:

    "power:p"   r**p                   (p >= 1)
    "npower:p"  r**p / p
    "exp"       exp(r) - r - 1
    "llogl"     (1 + r) log(1 + r) - r
    "table:<path>"  two-column CSV of (r, value) knots
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "YoungFunction",
    "PowerYoung",
    "NormalizedPowerYoung",
    "ExpYoung",
    "LLogLYoung",
    "TabulatedYoung",
    "GrowthReport",
    "InverseBracketReport",
    "DomainCapError",
    "ConjugateUnboundedError",
    "young_from_id",
    "conjugate_exponent",
    "verify_inverse_bracket",
    "estimate_growth_constants",
]


class DomainCapError(ValueError):
    """Evaluation requested beyond the trusted domain of a Young function."""


class ConjugateUnboundedError(ValueError):
    """Legendre supremum not attained below the domain cap; shrink the range."""


def conjugate_exponent(p: float) -> float:
    """p' with 1/p + 1/p' = 1; maps 1 to inf and inf to 1."""
    if math.isinf(p):
        return 1.0
    if p <= 1.0:
        return math.inf
    return p / (p - 1.0)


def _as_array(r) -> tuple[np.ndarray, bool]:
    arr = np.asarray(r, dtype=float)
    return arr, (arr.ndim == 0)


class YoungFunction:
    """Base class: subclasses provide ``_eval_array`` and optionally a
    closed-form inverse; everything else is generic machinery."""

    kind: str = "abstract"
    p0: float = 1.0
    p1: float = math.inf
    domain_cap: float = 1e12

    # -- evaluation -------------------------------------------------------

    def _eval_array(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, r):
        """phi(r); accepts scalars or arrays, errors outside [0, cap]."""
        arr, scalar = _as_array(r)
        if np.any(arr < 0):
            raise ValueError("Young function argument must be nonnegative")
        if np.any(arr > self.domain_cap):
            raise DomainCapError(
                f"argument above domain cap {self.domain_cap:g} for {self.kind}"
            )
        out = self._eval_array(np.atleast_1d(arr))
        return float(out[0]) if scalar else out.reshape(arr.shape)

    # -- generalized inverse ----------------------------------------------

    def inverse(self, s):
        """inf{r >= 0 : phi(r) > s}; true inverse for this catalog.

        Default is a bracketed bisection to 1e-12 (absolute or relative,
        whichever binds first); subclasses override with closed forms.
        """
        arr, scalar = _as_array(s)
        if np.any(arr < 0):
            raise ValueError("inverse argument must be nonnegative")
        out = self._inverse_bisect(arr)
        return float(out) if scalar else out

    def _inverse_bisect(self, s: np.ndarray) -> np.ndarray:
        cap = self.domain_cap
        lo = np.zeros_like(s)
        hi = np.full_like(s, 1.0)
        # expand hi until phi(hi) >= s, per element
        for _ in range(200):
            need = (self._eval_array(np.minimum(hi, cap)) < s) & (hi < cap)
            if not need.any():
                break
            hi = np.where(need, np.minimum(hi * 2.0, cap), hi)
        if np.any(self._eval_array(np.minimum(hi, cap)) < s):
            raise DomainCapError(f"inverse target above phi(cap) for {self.kind}")
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            above = self._eval_array(mid) > s
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
            if np.all((hi - lo) <= 1e-12 * np.maximum(1.0, np.abs(hi))):
                break
        return 0.5 * (lo + hi)

    # -- convex conjugate ---------------------------------------------------

    def conjugate_values(self, r) -> np.ndarray:
        """Legendre transform sup_s {r s - phi(s)} at the requested points.

        The objective is concave in s for each fixed r, so a golden-section
        shrink on a bracketed interval converges; the bracket is found by
        doubling while the objective still grows.  Raises
        ConjugateUnboundedError when the sup is not attained below the cap.
        """
        pts, scalar = _as_array(r)
        if np.any(pts < 0):
            raise ValueError("conjugate argument must be nonnegative")
        arr = np.atleast_1d(pts).astype(float)
        cap = self.domain_cap
        s_hi = np.minimum(np.maximum(arr, 1.0), cap)
        gain = lambda s: arr * s - self._eval_array(s)
        for _ in range(200):
            grow = (gain(s_hi) > gain(0.5 * s_hi)) & (s_hi < cap)
            if not grow.any():
                break
            s_hi = np.where(grow, np.minimum(2.0 * s_hi, cap), s_hi)
        at_cap = (s_hi >= cap) & (gain(s_hi) > gain(0.999999 * s_hi))
        if at_cap.any():
            worst = float(np.max(arr[at_cap]))
            raise ConjugateUnboundedError(
                f"conjugate unbounded at r={worst:g} within cap {cap:g}; "
                "shrink the requested r-range"
            )
        lo = np.zeros_like(arr)
        hi = s_hi
        inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
        for _ in range(150):
            d = inv_phi * (hi - lo)
            x1 = hi - d
            x2 = lo + d
            swap = gain(x1) > gain(x2)
            hi = np.where(swap, x2, hi)
            lo = np.where(swap, lo, x1)
        s_star = 0.5 * (lo + hi)
        out = np.maximum(gain(s_star), 0.0)
        return float(out[0]) if scalar else out.reshape(pts.shape)

    def conjugate(
        self, r_lo: float = 1e-4, r_hi: float = 1e4, knots: int = 512
    ) -> "TabulatedYoung":
        """Convex conjugate as a tabulated Young function on a log grid."""
        grid = np.exp(np.linspace(math.log(r_lo), math.log(r_hi), knots))
        vals = self.conjugate_values(grid)
        if np.any(vals <= 0.0):
            raise ConjugateUnboundedError(
                "conjugate vanishes on part of the requested range; "
                "the conjugate leaves the finite-positive class there"
            )
        return TabulatedYoung(
            knots_r=grid,
            knots_v=vals,
            p0=conjugate_exponent(self.p1),
            p1=conjugate_exponent(self.p0),
        )

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"{type(self).__name__}(kind={self.kind!r})"


@dataclass(repr=False)
class PowerYoung(YoungFunction):
    """phi(r) = r**p."""

    p: float = 2.0
    domain_cap: float = 1e12

    def __post_init__(self):
        if self.p < 1.0:
            raise ValueError("power exponent must be >= 1")
        self.kind = f"power:{self.p:g}"
        self.p0 = self.p
        self.p1 = self.p

    def _eval_array(self, r):
        return np.power(r, self.p)

    def inverse(self, s):
        arr, scalar = _as_array(s)
        out = np.power(arr, 1.0 / self.p)
        return float(out) if scalar else out


@dataclass(repr=False)
class NormalizedPowerYoung(YoungFunction):
    """phi(r) = r**p / p; self-pairing family under conjugation."""

    p: float = 2.0
    domain_cap: float = 1e12

    def __post_init__(self):
        if self.p <= 1.0:
            raise ValueError("normalized power exponent must be > 1")
        self.kind = f"npower:{self.p:g}"
        self.p0 = self.p
        self.p1 = self.p

    def _eval_array(self, r):
        return np.power(r, self.p) / self.p

    def inverse(self, s):
        arr, scalar = _as_array(s)
        out = np.power(self.p * arr, 1.0 / self.p)
        return float(out) if scalar else out


@dataclass(repr=False)
class ExpYoung(YoungFunction):
    """phi(r) = exp(r) - r - 1; fails Delta2, satisfies Nabla2."""

    domain_cap: float = 700.0  # exp overflow guard

    def __post_init__(self):
        self.kind = "exp"
        self.p0 = 2.0
        self.p1 = math.inf

    def _eval_array(self, r):
        return np.expm1(r) - r


@dataclass(repr=False)
class LLogLYoung(YoungFunction):
    """phi(r) = (1 + r) log(1 + r) - r; the conjugate of ExpYoung."""

    domain_cap: float = 1e12

    def __post_init__(self):
        self.kind = "llogl"
        self.p0 = 1.0
        self.p1 = 2.0

    def _eval_array(self, r):
        return (1.0 + r) * np.log1p(r) - r


@dataclass(repr=False)
class TabulatedYoung(YoungFunction):
    """Monotone log-log interpolation of positive knots, with implicit (0, 0).

    Below the first knot the first segment's log-log slope extrapolates;
    above the last knot evaluation is refused (domain cap).  Power-law data
    is reproduced exactly between knots.
    """

    knots_r: np.ndarray = field(default=None)
    knots_v: np.ndarray = field(default=None)
    p0: float = 1.0
    p1: float = math.inf

    def __post_init__(self):
        r = np.asarray(self.knots_r, dtype=float)
        v = np.asarray(self.knots_v, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ValueError("tabulated knots must be two equal 1-d arrays")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("knot abscissae must be positive and increasing")
        if np.any(v <= 0) or np.any(np.diff(v) < 0):
            raise ValueError("knot values must be positive and nondecreasing")
        self.knots_r = r
        self.knots_v = v
        self.kind = "table"
        self.domain_cap = float(r[-1])
        self._lr = np.log(r)
        self._lv = np.log(v)

    def _segment_eval(self, xs, xp, fp):
        idx = np.clip(np.searchsorted(xp, xs) - 1, 0, xp.size - 2)
        x0 = xp[idx]
        dx = xp[idx + 1] - x0
        slope = (fp[idx + 1] - fp[idx]) / dx
        return fp[idx] + slope * (xs - x0)

    def _eval_array(self, r):
        out = np.zeros_like(r, dtype=float)
        pos = r > 0
        if pos.any():
            out[pos] = np.exp(self._segment_eval(np.log(r[pos]), self._lr, self._lv))
        return out

    def inverse(self, s):
        """Left endpoint of the level set, matching the inf convention."""
        arr, scalar = _as_array(s)
        if np.any(arr < 0):
            raise ValueError("inverse argument must be nonnegative")
        if np.any(arr > self.knots_v[-1]):
            raise DomainCapError("inverse target above the last tabulated value")
        flat = np.atleast_1d(arr).astype(float)
        out = np.zeros_like(flat)
        pos = flat > 0
        if pos.any():
            ls = np.log(flat[pos])
            idx = np.clip(np.searchsorted(self._lv, ls, side="left") - 1, 0,
                          self._lv.size - 2)
            dv = self._lv[idx + 1] - self._lv[idx]
            frac = np.where(dv > 0, (ls - self._lv[idx]) / np.where(dv > 0, dv, 1.0), 0.0)
            out[pos] = np.exp(self._lr[idx] + frac * (self._lr[idx + 1] - self._lr[idx]))
        return float(out[0]) if scalar else out.reshape(arr.shape)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def young_from_id(spec: str) -> YoungFunction:
    """Resolve a catalog id like 'power:2', 'npower:3', 'exp', 'llogl',
    or 'table:/path/to.csv'."""
    parts = spec.strip().split(":")
    head = parts[0].lower()
    if head == "power":
        return PowerYoung(p=float(parts[1]))
    if head == "npower":
        return NormalizedPowerYoung(p=float(parts[1]))
    if head == "exp":
        return ExpYoung()
    if head == "llogl":
        return LLogLYoung()
    if head == "table":
        path = spec[len("table:"):]
        data = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
        return TabulatedYoung(knots_r=data[:, 0], knots_v=data[:, 1])
    raise ValueError(f"unknown Young-function id: {spec!r}")


# ---------------------------------------------------------------------------
# inverse bracket verification
# ---------------------------------------------------------------------------

@dataclass
class InverseBracketReport:
    """Worst-case relative defects of the two inverse brackets.

    All defects are max(0, excess)/r; a defect of 0 means the inequality
    held at every probed point.
    """

    inv_low_defect: float     # phi(phi^{-1}(r)) - r above 0
    inv_high_defect: float    # r - phi^{-1}(phi(r)) above 0
    conj_low_defect: float    # r - phi^{-1}(r) conj^{-1}(r) above 0
    conj_high_defect: float   # phi^{-1}(r) conj^{-1}(r) - 2r above 0
    n_points: int

    def violations(self, tol: float) -> int:
        defects = (self.inv_low_defect, self.inv_high_defect,
                   self.conj_low_defect, self.conj_high_defect)
        return sum(1 for d in defects if d > tol)


def verify_inverse_bracket(
    phi: YoungFunction,
    r_grid: Sequence[float],
    conj: YoungFunction | None = None,
) -> InverseBracketReport:
    """Check both inverse brackets on the grid and report worst defects."""
    r = np.asarray(r_grid, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r_grid must be strictly positive")
    if conj is None:
        # size the table so its value range covers the probe grid; the
        # abscissa range needed for that varies wildly across the catalog
        lo = min(1e-4, float(r.min()) * 1e-2)
        hi = 1.0
        for _ in range(80):
            if float(phi.conjugate_values(hi)) >= 1.1 * float(r.max()):
                break
            hi *= 2.0
        for _ in range(80):
            if float(phi.conjugate_values(lo)) <= 0.9 * float(r.min()):
                break
            lo *= 0.5
        conj = phi.conjugate(r_lo=lo, r_hi=hi)
    inv_r = np.asarray(phi.inverse(r), dtype=float)
    low = (phi.evaluate(inv_r) - r) / r
    high = (r - phi.inverse(phi.evaluate(r))) / r
    prod = inv_r * np.asarray(conj.inverse(r), dtype=float)
    clow = (r - prod) / r
    chigh = (prod - 2.0 * r) / r
    return InverseBracketReport(
        inv_low_defect=float(max(0.0, low.max())),
        inv_high_defect=float(max(0.0, high.max())),
        conj_low_defect=float(max(0.0, clow.max())),
        conj_high_defect=float(max(0.0, chigh.max())),
        n_points=int(r.size),
    )


# ---------------------------------------------------------------------------
# growth diagnostics
# ---------------------------------------------------------------------------

@dataclass
class GrowthReport:
    delta2_k: float
    delta2_unbounded: bool
    nabla2_k: float | None
    empirical_p0: float
    empirical_p1: float
    grid_shrunk: bool

    @property
    def doubling(self) -> bool:
        return not self.delta2_unbounded and math.isfinite(self.delta2_k)


def estimate_growth_constants(
    phi: YoungFunction, r_grid: Sequence[float]
) -> GrowthReport:
    """Doubling constants and empirical type exponents on a log grid.

    delta2_k is the largest sampled phi(2r)/phi(r); the unbounded flag is
    raised when that ratio is attained at the top of the grid and is still
    climbing over the last decade.  nabla2_k scans candidate k for
    phi(r) <= phi(k r) / (2 k) at every grid point; None when no candidate
    works.  The type exponents are envelope fits of log phi(st)/phi(s) over
    dyadic t.
    """
    r = np.asarray(r_grid, dtype=float)
    if r.size < 32:
        raise ValueError("r_grid must have at least 32 points")
    if np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise ValueError("r_grid must be positive and increasing")
    cap = phi.domain_cap
    shrunk = False
    keep = 2.0 * r <= cap
    if not keep.all():
        shrunk = True
        r = r[keep]
        if r.size < 8:
            raise DomainCapError("grid collapses below the domain cap")
    v = phi.evaluate(r)
    v2 = phi.evaluate(2.0 * r)
    ratios = v2 / v
    delta2 = float(ratios.max())
    arg = int(ratios.argmax())
    # climbing over the last decade of the grid
    tail = r >= r[-1] / 10.0
    climbing = (
        arg == r.size - 1
        and ratios[tail][-1] > 1.05 * ratios[tail][0]
    )
    nabla2 = None
    for k in np.exp(np.linspace(math.log(1.001), math.log(64.0), 160)):
        ok = k * r <= cap
        if not ok.any():
            break
        lhs = v[ok]
        rhs = phi.evaluate(k * r[ok]) / (2.0 * k)
        if np.all(lhs <= rhs * (1.0 + 1e-12)):
            nabla2 = float(k)
            break
    # envelope type exponents over dyadic scalings
    p1_emp = 0.0
    p0_emp = math.inf
    for t in (2.0, 4.0, 8.0):
        ok = t * r <= cap
        if ok.any():
            ratio = np.log(phi.evaluate(t * r[ok]) / v[ok]) / math.log(t)
            p1_emp = max(p1_emp, float(ratio.max()))
        down = np.log(v / phi.evaluate(r / t)) / math.log(t)
        p0_emp = min(p0_emp, float(down.min()))
    return GrowthReport(
        delta2_k=delta2,
        delta2_unbounded=bool(climbing),
        nabla2_k=nabla2,
        empirical_p0=p0_emp,
        empirical_p1=p1_emp,
        grid_shrunk=shrunk,
    )
