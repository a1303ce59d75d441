"""Dense LP machinery for the Hoelder-kernel supremum.

Discretizing the mean-zero unit-ball kernel class on m nodes turns the
supremum of |integral f(z) k(z) dz| over that class into a linear program

    maximize    c . k
    subject to  |k_i - k_j| <= |z_i - z_j|^alpha     (every pair i < j)
                |k_i|       <= (1 - |z_i|)^alpha     (support bound)
                sum_i w_i k_i = 0                    (mean zero)

The pairwise constraints must all be present: |x - y|^alpha is a snowflake
metric for alpha < 1, so neighbor constraints do not imply the rest.  The
feasible polytope is symmetric about the origin, which is why the signed
maximum equals the supremum of the absolute value.

The solver is a dense active-set walk.  A working set of linearly
independent tight rows (the mean-zero row is always in it) defines the
current face; the walk alternates projection steps along the objective's
component in the face with multiplier tests, choosing blocking and leaving
rows by least constraint index (Bland's rule) so the pivot sequence is
deterministic and cycling-free.  Each iteration re-factorizes the working
set with one QR; the problems are small and dense, so this costs less than
bookkeeping an updated factorization would.

The walk is the package's hot loop and is numba-compiled when the numba
backend is active; the numpy fallback executes the same source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .backend import maybe_jit

__all__ = [
    "LipschitzDualProblem",
    "LpSolverError",
    "kernel_constraints",
    "unit_ball_nodes",
    "lipschitz_dual_value",
    "solve_kernel_lp",
    "DEFAULT_NODE_CAP",
]

DEFAULT_NODE_CAP = 200


class LpSolverError(RuntimeError):
    """Active-set walk failed; message carries iteration diagnostics."""


def unit_ball_nodes(dim: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform cell-center nodes of the unit ball and their cell volumes.

    Dimension 1 returns exactly m nodes on (-1, 1); dimension 2 lays a
    square lattice with roughly m cells inside the disc.
    """
    if dim == 1:
        step = 2.0 / m
        z = (-1.0 + (np.arange(m) + 0.5) * step)[:, None]
        vol = np.full(m, step)
        return z, vol
    if dim == 2:
        k = max(3, int(round(math.sqrt(4.0 * m / math.pi))))
        step = 2.0 / k
        ax = -1.0 + (np.arange(k) + 0.5) * step
        xx, yy = np.meshgrid(ax, ax, indexing="ij")
        pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
        keep = np.sum(pts**2, axis=1) < 1.0
        pts = pts[keep]
        vol = np.full(len(pts), step * step)
        return pts, vol
    raise ValueError("only dimensions 1 and 2 are supported")


def kernel_constraints(points: np.ndarray, weights: np.ndarray,
                       alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Constraint rows (A, b) for the kernel polytope; row 0 is mean zero.

    Row order is fixed (mean zero, pairwise both signs, support bounds both
    signs) because the least-index pivot rule keys off it.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    m = len(pts)
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    w = np.asarray(weights, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff**2, axis=2))
    iu, ju = np.triu_indices(m, k=1)
    dpow = dist[iu, ju] ** alpha
    if np.any(dpow <= 0):
        raise ValueError("node set contains coincident points")
    radii = np.sqrt(np.sum(pts**2, axis=1))
    bound = np.maximum(1.0 - radii, 0.0) ** alpha
    n_pairs = len(iu)
    rows = 1 + 2 * n_pairs + 2 * m
    A = np.zeros((rows, m))
    b = np.zeros(rows)
    A[0, :] = w
    r = 1
    pair_rows = np.arange(n_pairs)
    A[1 + 2 * pair_rows, iu] = 1.0
    A[1 + 2 * pair_rows, ju] = -1.0
    b[1 + 2 * pair_rows] = dpow
    A[2 + 2 * pair_rows, iu] = -1.0
    A[2 + 2 * pair_rows, ju] = 1.0
    b[2 + 2 * pair_rows] = dpow
    r = 1 + 2 * n_pairs
    A[r + np.arange(m), np.arange(m)] = 1.0
    b[r + np.arange(m)] = bound
    A[r + m + np.arange(m), np.arange(m)] = -1.0
    b[r + m + np.arange(m)] = bound
    return A, b


def _active_set_walk(A, b, c, proj_tol, mult_tol, max_iter):
    """Maximize c.x over {A x <= b, rows >= 1; row 0 equality A0.x = 0}.

    Returns (status, value, x, iterations) with status 0 on success,
    1 when no blocking row bounds an improving ray, 2 on the iteration
    cap, 3 on a degenerate working-set factorization.
    """
    M, m = A.shape
    x = np.zeros(m)
    in_w = np.zeros(M, np.bool_)
    wrows = np.zeros(m + 1, np.int64)
    in_w[0] = True
    wrows[0] = 0
    k = 1
    ads = np.zeros(M)
    # admission threshold is an angle: a row nearly inside the working-set
    # span cannot block motion along the face and would degenerate the QR
    row_norms = np.zeros(M)
    for row in range(M):
        s = 0.0
        for i in range(m):
            s += A[row, i] * A[row, i]
        row_norms[row] = math.sqrt(s)
    it = 0
    while it < max_iter:
        it += 1
        awt = np.zeros((m, k))
        for j in range(k):
            row = wrows[j]
            for i in range(m):
                awt[i, j] = A[row, i]
        q, r_fac = np.linalg.qr(awt)
        qtc = np.zeros(k)
        for j in range(k):
            s = 0.0
            for i in range(m):
                s += q[i, j] * c[i]
            qtc[j] = s
        d = np.zeros(m)
        for i in range(m):
            s = c[i]
            for j in range(k):
                s -= q[i, j] * qtc[j]
            d[i] = s
        dn = 0.0
        for i in range(m):
            dn += d[i] * d[i]
        dn = math.sqrt(dn)
        if dn > proj_tol:
            # projection step: walk along d to the first blocking row
            steps = np.full(M, math.inf)
            for row in range(M):
                if in_w[row]:
                    ads[row] = 0.0
                    continue
                ad = 0.0
                for i in range(m):
                    ad += A[row, i] * d[i]
                ads[row] = ad
                if ad > 1e-11 * row_norms[row] * dn:
                    slack = b[row]
                    for i in range(m):
                        slack -= A[row, i] * x[i]
                    if slack < 0.0:
                        slack = 0.0
                    steps[row] = slack / ad
            # pick the least-index row achieving the smallest step whose
            # normal leaves the working-set span; rows numerically inside
            # the span are implied by tight rows and cannot block
            block = -1
            step_taken = 0.0
            while True:
                best = math.inf
                for row in range(M):
                    if steps[row] < best:
                        best = step_taken = steps[row]
                if not math.isfinite(best):
                    return 1, 0.0, x, it
                tie = best + 1e-12 * (1.0 + best)
                cand = -1
                for row in range(M):
                    if steps[row] <= tie:
                        cand = row
                        break
                # orthogonal component of the candidate row against Q
                qta = np.zeros(k)
                for j in range(k):
                    s = 0.0
                    for i in range(m):
                        s += q[i, j] * A[cand, i]
                    qta[j] = s
                rho = 0.0
                for i in range(m):
                    s = A[cand, i]
                    for j in range(k):
                        s -= q[i, j] * qta[j]
                    rho += s * s
                if rho > (1e-9 * row_norms[cand]) ** 2:
                    block = cand
                    break
                steps[cand] = math.inf
            if best > 0.0:
                for i in range(m):
                    x[i] += best * d[i]
            if k > m:
                return 3, 0.0, x, it
            wrows[k] = block
            in_w[block] = True
            k += 1
        else:
            # multiplier test: solve R lam = Q^T c by back substitution
            lam = np.zeros(k)
            singular = False
            for j in range(k - 1, -1, -1):
                s = qtc[j]
                for l in range(j + 1, k):
                    s -= r_fac[j, l] * lam[l]
                if abs(r_fac[j, j]) < 1e-14:
                    singular = True
                    break
                lam[j] = s / r_fac[j, j]
            if singular:
                return 3, 0.0, x, it
            drop_pos = -1
            drop_row = -1
            for j in range(1, k):
                if lam[j] < -mult_tol:
                    row = wrows[j]
                    if drop_row < 0 or row < drop_row:
                        drop_row = row
                        drop_pos = j
            if drop_pos < 0:
                value = 0.0
                for i in range(m):
                    value += c[i] * x[i]
                return 0, value, x, it
            in_w[drop_row] = False
            for j in range(drop_pos, k - 1):
                wrows[j] = wrows[j + 1]
            k -= 1
    return 2, 0.0, x, it


_active_set_walk_compiled = maybe_jit(_active_set_walk)


def solve_kernel_lp(A: np.ndarray, b: np.ndarray,
                    c: np.ndarray) -> tuple[float, np.ndarray, int]:
    """Solve the kernel LP; returns (value, witness, iterations).

    The objective is normalized to unit sup norm before the walk so every
    tolerance is relative; the value is rescaled on the way out, which
    keeps the solve exactly homogeneous up to float rounding.
    """
    c = np.asarray(c, dtype=float)
    scale = float(np.max(np.abs(c))) if c.size else 0.0
    if scale == 0.0 or not math.isfinite(scale):
        if not math.isfinite(scale):
            raise LpSolverError("objective contains non-finite coefficients")
        return 0.0, np.zeros(A.shape[1]), 0
    M, m = A.shape
    max_iter = 5000 + 20 * (m + M)
    status, value, x, iters = _active_set_walk_compiled(
        np.ascontiguousarray(A),
        np.ascontiguousarray(b),
        np.ascontiguousarray(c / scale),
        1e-12,
        1e-12,
        max_iter,
    )
    if status != 0:
        names = {1: "unbounded ray", 2: "iteration cap", 3: "degenerate basis"}
        raise LpSolverError(
            f"active-set walk failed ({names.get(status, status)}) after "
            f"{iters} iterations on m={m}, rows={M}"
        )
    return value * scale, x, iters


@dataclass
class LipschitzDualProblem:
    """One kernel-class supremum instance.

    points are the unit-ball nodes, weights the quadrature cell volumes
    entering the mean-zero constraint, coefficients the quadrature-weighted
    integrand samples, alpha the Hoelder exponent, node_cap the guard on
    the all-pairs constraint count.
    """

    alpha: float
    points: np.ndarray
    weights: np.ndarray
    coefficients: np.ndarray
    node_cap: int = DEFAULT_NODE_CAP

    def constraints(self) -> tuple[np.ndarray, np.ndarray]:
        return kernel_constraints(self.points, self.weights, self.alpha)


def lipschitz_dual_value(prob: LipschitzDualProblem,
                         feas_tol: float = 1e-9) -> tuple[float, np.ndarray]:
    """Maximum of coefficients . k over the kernel polytope, with witness.

    The witness is validated against every constraint to feas_tol.
    """
    m = len(np.atleast_1d(prob.coefficients))
    if m > prob.node_cap:
        raise ValueError(
            f"node count {m} exceeds cap {prob.node_cap}; the all-pairs "
            "constraint matrix would be too large"
        )
    A, b = prob.constraints()
    value, witness, _ = solve_kernel_lp(A, b, np.asarray(prob.coefficients, float))
    resid = A @ witness - b
    worst = float(resid.max()) if resid.size else 0.0
    if worst > feas_tol:
        raise LpSolverError(f"witness infeasible by {worst:.3e}")
    return value, witness


@lru_cache(maxsize=64)
def _cached_geometry(dim: int, m: int, alpha: float):
    nodes, vols = unit_ball_nodes(dim, m)
    A, b = kernel_constraints(nodes, vols, alpha)
    return nodes, vols, np.ascontiguousarray(A), np.ascontiguousarray(b)


def kernel_geometry(dim: int, m: int, alpha: float):
    """Cached (nodes, volumes, A, b) for the standard node sets."""
    return _cached_geometry(int(dim), int(m), float(alpha))
