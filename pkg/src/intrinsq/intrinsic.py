"""Square functions built on the kernel-class supremum.

For a point x, the cone of aperture beta is sampled scale-invariantly: a
fixed lattice of unit offsets eta (spacing sigma) is rescaled by t, so the
node (j, l) sits at (y, t) = (x + t_j eta_l, t_j).  With log-spaced t the
product weight dy dt / t^{n+1} collapses to sigma^n dlog per node, and the
node set for a smaller aperture is literally a subset of the lattice,
which makes monotonicity in the aperture exact.

Aggregates provided: the cone (Lusin) square function, its vertical
version evaluated on the axis y = x, and the weighted half-space version
with weight (t / (t + |x - y|))^{n lam} split into its near (|x - y| < t)
and far parts.  Commutator variants thread the evaluation point into the
kernel coefficients through b(x) - b(z); that difference cannot be pulled
out of the supremum, so it lives inside the LP objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .fields import SampledField
from .lp import kernel_geometry, solve_kernel_lp, DEFAULT_NODE_CAP

__all__ = [
    "ConeQuadrature",
    "HalfspaceValue",
    "ApertureRow",
    "kernel_sup",
    "commutator_kernel_sup",
    "cone_kernel_sups",
    "vertical_kernel_sups",
    "lusin_square_function",
    "vertical_square_function",
    "halfspace_square_function",
    "aperture_report",
    "annular_far_bound",
    "square_function",
    "COMMUTATOR_KINDS",
]

COMMUTATOR_KINDS = ("lusin", "vertical", "halfspace")


@dataclass(frozen=True)
class ConeQuadrature:
    """Scale-invariant cone/half-space quadrature plus kernel resolution.

    t_nodes are log-midpoints with uniform log step dlog; offsets is the
    master unit-offset lattice out to beta_max, sorted by (radius, coords)
    so aperture masks are nested by construction.  kernel_nodes is the
    target node count of the unit-ball discretization behind each LP.
    """

    dim: int
    t_nodes: np.ndarray
    dlog: float
    offsets: np.ndarray
    offset_radii: np.ndarray
    sigma: float
    beta_max: float
    kernel_nodes: int
    halfspace_cap: float = math.inf

    @classmethod
    def build(cls, dim: int, t_min: float, t_max: float,
              nodes_per_decade: int, sigma: float = 0.25,
              beta_max: float = 2.0, kernel_nodes: int = 21,
              halfspace_cap: float = math.inf) -> "ConeQuadrature":
        if not (0 < t_min < t_max):
            raise ValueError("need 0 < t_min < t_max")
        if kernel_nodes > DEFAULT_NODE_CAP:
            raise ValueError("kernel_nodes exceeds the LP node cap")
        n_t = max(1, int(math.ceil(nodes_per_decade * math.log10(t_max / t_min))))
        dlog = math.log(t_max / t_min) / n_t
        t_nodes = t_min * np.exp((np.arange(n_t) + 0.5) * dlog)
        if dim == 1:
            n_off = int(math.ceil(beta_max / sigma))
            pos = (np.arange(n_off) + 0.5) * sigma
            pos = pos[pos < beta_max]
            offs = np.concatenate([-pos[::-1], pos])[:, None]
        elif dim == 2:
            n_off = int(math.ceil(beta_max / sigma))
            ax = (np.arange(-n_off, n_off) + 0.5) * sigma
            xx, yy = np.meshgrid(ax, ax, indexing="ij")
            offs = np.stack([xx.ravel(), yy.ravel()], axis=1)
            offs = offs[np.sqrt(np.sum(offs**2, axis=1)) < beta_max]
        else:
            raise ValueError("only dimensions 1 and 2 are supported")
        radii = np.sqrt(np.sum(offs**2, axis=1))
        order = np.lexsort(tuple(offs[:, a] for a in range(dim - 1, -1, -1))
                           + (radii,))
        offs = np.ascontiguousarray(offs[order])
        radii = radii[order]
        return cls(dim=dim, t_nodes=t_nodes, dlog=dlog, offsets=offs,
                   offset_radii=radii, sigma=sigma, beta_max=beta_max,
                   kernel_nodes=kernel_nodes, halfspace_cap=halfspace_cap)

    @classmethod
    def for_field(cls, f: SampledField, nodes_per_decade: int = 8,
                  **kw) -> "ConeQuadrature":
        """Defaults t to [2h, L/2] for a field with box side L."""
        return cls.build(f.dim, 2.0 * f.h, f.box_side / 2.0,
                         nodes_per_decade, **kw)

    def aperture_mask(self, beta: float) -> np.ndarray:
        if beta > self.beta_max:
            raise ValueError(f"aperture {beta} beyond lattice cap {self.beta_max}")
        return self.offset_radii < beta

    def describe(self) -> dict:
        return {
            "dim": self.dim,
            "t_min": float(self.t_nodes[0] * math.exp(-0.5 * self.dlog)),
            "t_max": float(self.t_nodes[-1] * math.exp(0.5 * self.dlog)),
            "n_t": int(self.t_nodes.size),
            "sigma": self.sigma,
            "beta_max": self.beta_max,
            "kernel_nodes": self.kernel_nodes,
            "halfspace_cap": self.halfspace_cap,
        }


# ---------------------------------------------------------------------------
# kernel-class suprema
# ---------------------------------------------------------------------------

def _coefficients(f: SampledField, y: np.ndarray, t: float,
                  nodes: np.ndarray, vols: np.ndarray,
                  symbol: SampledField | None,
                  symbol_at_x: float) -> np.ndarray:
    """Quadrature-weighted integrand samples over the unit-ball nodes.

    Convention: unit-ball cell volumes absorb the kernel's t^{-n}
    normalization, so the value bound sup <= t^{-n} ||f||_{L1(B(y,t))}
    holds with these weights.
    """
    pts = y[None, :] - t * nodes
    vals = f.evaluate(pts)
    if symbol is not None:
        vals = (symbol_at_x - symbol.evaluate(pts)) * vals
    return vals * vols


def kernel_sup(f: SampledField, y, t: float, alpha: float, m: int) -> float:
    """sup over the mean-zero Hoelder-alpha unit-ball class of
    |convolution of f with the rescaled kernel at (y, t)|."""
    if t < f.h:
        raise ValueError("kernel scale t must be at least one grid cell")
    y = np.asarray(y, dtype=float).reshape(f.dim)
    nodes, vols, A, b = kernel_geometry(f.dim, m, alpha)
    c = _coefficients(f, y, t, nodes, vols, None, 0.0)
    if not np.any(c != 0.0):
        return 0.0
    value, _, _ = solve_kernel_lp(A, b, c)
    return value


def commutator_kernel_sup(f: SampledField, symbol: SampledField, x, y,
                          t: float, alpha: float, m: int) -> float:
    """Same supremum with the integrand multiplied by b(x) - b(z); the
    outer point x enters only through b(x)."""
    if t < f.h:
        raise ValueError("kernel scale t must be at least one grid cell")
    x = np.asarray(x, dtype=float).reshape(f.dim)
    y = np.asarray(y, dtype=float).reshape(f.dim)
    nodes, vols, A, b = kernel_geometry(f.dim, m, alpha)
    bx = float(symbol.evaluate(x[None, :])[0])
    c = _coefficients(f, y, t, nodes, vols, symbol, bx)
    if not np.any(c != 0.0):
        return 0.0
    value, _, _ = solve_kernel_lp(A, b, c)
    return value


def cone_kernel_sups(f: SampledField, x, alpha: float, quad: ConeQuadrature,
                     symbol: SampledField | None = None) -> np.ndarray:
    """Squared suprema on every master lattice node, shape (n_t, n_offsets).

    Computed once and reused by every aperture and half-space aggregate;
    each node is an independent LP, so the array is embarrassingly
    parallel in principle, though this loop is serial and deterministic.
    """
    x = np.asarray(x, dtype=float).reshape(f.dim)
    nodes, vols, A, b = kernel_geometry(f.dim, quad.kernel_nodes, alpha)
    bx = float(symbol.evaluate(x[None, :])[0]) if symbol is not None else 0.0
    out = np.zeros((quad.t_nodes.size, len(quad.offsets)))
    for j, t in enumerate(quad.t_nodes):
        ys = x[None, :] + t * quad.offsets
        for l in range(len(quad.offsets)):
            c = _coefficients(f, ys[l], t, nodes, vols, symbol, bx)
            if not np.any(c != 0.0):
                continue
            value, _, _ = solve_kernel_lp(A, b, c)
            out[j, l] = value * value
    return out


def vertical_kernel_sups(f: SampledField, x, alpha: float,
                         quad: ConeQuadrature,
                         symbol: SampledField | None = None) -> np.ndarray:
    """Squared suprema on the vertical axis (y = x), shape (n_t,)."""
    x = np.asarray(x, dtype=float).reshape(f.dim)
    nodes, vols, A, b = kernel_geometry(f.dim, quad.kernel_nodes, alpha)
    bx = float(symbol.evaluate(x[None, :])[0]) if symbol is not None else 0.0
    out = np.zeros(quad.t_nodes.size)
    for j, t in enumerate(quad.t_nodes):
        c = _coefficients(f, x, t, nodes, vols, symbol, bx)
        if not np.any(c != 0.0):
            continue
        value, _, _ = solve_kernel_lp(A, b, c)
        out[j] = value * value
    return out


# ---------------------------------------------------------------------------
# aggregates
# ---------------------------------------------------------------------------

def _cone_sum(a_sq: np.ndarray, mask: np.ndarray, quad: ConeQuadrature,
              weights: np.ndarray | None = None) -> float:
    cols = a_sq[:, mask]
    if weights is not None:
        cols = cols * weights[None, mask]
    return float(np.sum(cols)) * quad.sigma ** quad.dim * quad.dlog


def lusin_square_function(f: SampledField, x, alpha: float,
                          quad: ConeQuadrature, beta: float = 1.0,
                          a_sq: np.ndarray | None = None,
                          symbol: SampledField | None = None) -> float:
    """Cone aggregate of aperture beta (the intrinsic Lusin function)."""
    if a_sq is None:
        a_sq = cone_kernel_sups(f, x, alpha, quad, symbol=symbol)
    return math.sqrt(_cone_sum(a_sq, quad.aperture_mask(beta), quad))


def vertical_square_function(f: SampledField, x, alpha: float,
                             quad: ConeQuadrature,
                             symbol: SampledField | None = None) -> float:
    """Vertical aggregate: the kernel sup is taken on the axis y = x."""
    a_sq = vertical_kernel_sups(f, x, alpha, quad, symbol=symbol)
    return math.sqrt(float(np.sum(a_sq)) * quad.dlog)


@dataclass(frozen=True)
class HalfspaceValue:
    """Weighted half-space aggregate with its near/far decomposition.

    near_sq is the contribution of |x - y| < t (where the weight is at
    most 1, so near_sq never exceeds the squared unit-aperture cone
    value); far_sq is the rest, truncated at the half-space cap.
    """

    value: float
    near_sq: float
    far_sq: float


def halfspace_square_function(f: SampledField, x, alpha: float, lam: float,
                              quad: ConeQuadrature,
                              a_sq: np.ndarray | None = None,
                              symbol: SampledField | None = None
                              ) -> HalfspaceValue:
    """Aggregate over the upper half-space with weight
    (t / (t + |x - y|))^{n lam}; lam above 1 keeps the far part summable,
    theorem-scale experiments use lam > 3 + 2 alpha / n."""
    if lam <= 1.0:
        raise ValueError("half-space weight exponent lam must exceed 1")
    if a_sq is None:
        a_sq = cone_kernel_sups(f, x, alpha, quad, symbol=symbol)
    w = (1.0 + quad.offset_radii) ** (-quad.dim * lam)
    near_mask = quad.offset_radii < 1.0
    far_mask = ~near_mask
    if math.isfinite(quad.halfspace_cap):
        # node (j, l) sits at |x - y| = t_j * radius_l
        keep = (quad.t_nodes[:, None] * quad.offset_radii[None, :]
                <= quad.halfspace_cap)
        a_sq = a_sq * keep
    near = _cone_sum(a_sq, near_mask, quad, weights=w)
    far = _cone_sum(a_sq, far_mask, quad, weights=w)
    return HalfspaceValue(value=math.sqrt(near + far), near_sq=near,
                          far_sq=far)


@dataclass(frozen=True)
class ApertureRow:
    beta: float
    value: float
    ratio_to_unit: float


def aperture_report(f: SampledField, x, alpha: float, beta_list,
                    quad: ConeQuadrature,
                    a_sq: np.ndarray | None = None,
                    symbol: SampledField | None = None) -> list[ApertureRow]:
    """Cone values for each aperture on the shared nested lattice.

    The squared sums are accumulated incrementally over the nested masks,
    so monotonicity in beta is exact in floating point, not just up to
    rounding.
    """
    betas = sorted(set(float(b) for b in beta_list))
    if 1.0 not in betas:
        raise ValueError("beta_list must contain the unit aperture")
    if a_sq is None:
        a_sq = cone_kernel_sups(f, x, alpha, quad, symbol=symbol)
    rows = []
    acc = 0.0
    prev = np.zeros(len(quad.offsets), dtype=bool)
    unit_value = None
    for beta in betas:
        mask = quad.aperture_mask(beta)
        acc += _cone_sum(a_sq, mask & ~prev, quad)
        prev = mask
        value = math.sqrt(acc)
        if beta == 1.0:
            unit_value = value
        rows.append((beta, value))
    out = []
    for beta, value in rows:
        ratio = value / unit_value if unit_value and unit_value > 0 else math.nan
        out.append(ApertureRow(beta=beta, value=value, ratio_to_unit=ratio))
    return out


def annular_far_bound(a_sq: np.ndarray, quad: ConeQuadrature, lam: float,
                      j_max: int) -> float:
    """Dyadic-annulus majorant of the far part: sum over j of
    2^{-j n lam} times the squared cone value of aperture 2^j."""
    total = 0.0
    for j in range(1, j_max + 1):
        beta = float(2 ** j)
        if beta > quad.beta_max:
            break
        sq = _cone_sum(a_sq, quad.aperture_mask(beta), quad)
        total += 2.0 ** (-j * quad.dim * lam) * sq
    return total


def square_function(kind: str, f: SampledField, x, alpha: float,
                    quad: ConeQuadrature, lam: float | None = None,
                    symbol: SampledField | None = None) -> float:
    """Uniform entry point over the three aggregate kinds; passing a
    symbol field turns each kind into its commutator."""
    if kind == "lusin":
        return lusin_square_function(f, x, alpha, quad, symbol=symbol)
    if kind == "vertical":
        return vertical_square_function(f, x, alpha, quad, symbol=symbol)
    if kind == "halfspace":
        if lam is None:
            raise ValueError("halfspace kind requires lam")
        return halfspace_square_function(f, x, alpha, lam, quad,
                                         symbol=symbol).value
    raise ValueError(f"unknown square-function kind {kind!r}")
