"""Sampled fields on uniform grids and the balls all local norms live on.

A field stores cell-center samples over a box: ``values[i]`` (or
``values[i, j]`` in dimension 2) belongs to the cell centered at
``origin + (index + 0.5) * h``.  Evaluation outside the box returns 0,
which is the compact-support convention used throughout.  All quadrature
is the midpoint rule over cells whose centers fall strictly inside the
ball in question, so every integral in the package shares one measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = ["Ball", "SampledField", "UNIT_BALL_VOLUME"]

# volume of the unit ball, per supported dimension
UNIT_BALL_VOLUME = {1: 2.0, 2: math.pi}


@dataclass(frozen=True)
class Ball:
    """Euclidean ball; the geometric unit of every local norm."""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def measure(self) -> float:
        """Lebesgue measure v_n r^n."""
        return UNIT_BALL_VOLUME[self.dim] * self.radius ** self.dim

    def scaled(self, factor: float) -> "Ball":
        return Ball(self.center, self.radius * factor)


class SampledField:
    """Real-valued function sampled at cell centers of a uniform grid."""

    def __init__(self, dim, origin, h, values, label=""):
        if dim not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")
        values = np.asarray(values, dtype=float)
        if values.ndim != dim:
            raise ValueError("values array rank must equal dim")
        if values.size == 0:
            raise ValueError("field box must be nonempty")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        if not (h > 0):
            raise ValueError("grid spacing must be positive")
        self.dim = int(dim)
        self.origin = np.asarray(origin, dtype=float).reshape(dim)
        self.h = float(h)
        self.values = values
        self.label = str(label)

    # -- construction -------------------------------------------------------

    @classmethod
    def from_function(cls, fn: Callable, dim: int, origin, h: float,
                      shape, label: str = "") -> "SampledField":
        """Sample ``fn`` at cell centers; ``fn`` maps (k, dim) points to k values."""
        shape = tuple(int(s) for s in np.atleast_1d(shape))
        origin = np.asarray(origin, dtype=float).reshape(dim)
        axes = [origin[a] + (np.arange(shape[a]) + 0.5) * h for a in range(dim)]
        if dim == 1:
            pts = axes[0][:, None]
        else:
            xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
            pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
        vals = np.asarray(fn(pts), dtype=float).reshape(shape)
        return cls(dim, origin, h, vals, label=label)

    def like(self, values, label=None) -> "SampledField":
        return SampledField(self.dim, self.origin, self.h, values,
                            label=self.label if label is None else label)

    # -- geometry -------------------------------------------------------------

    @property
    def shape(self):
        return self.values.shape

    @property
    def box_hi(self) -> np.ndarray:
        return self.origin + self.h * np.asarray(self.shape, dtype=float)

    @property
    def box_side(self) -> float:
        return float(np.min(self.h * np.asarray(self.shape, dtype=float)))

    def centers(self, axis: int) -> np.ndarray:
        return self.origin[axis] + (np.arange(self.shape[axis]) + 0.5) * self.h

    def center_points(self) -> np.ndarray:
        """All cell centers, shape (n_cells, dim)."""
        axes = [self.centers(a) for a in range(self.dim)]
        if self.dim == 1:
            return axes[0][:, None]
        xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
        return np.stack([xx.ravel(), yy.ravel()], axis=1)

    # -- evaluation ------------------------------------------------------------

    def evaluate(self, points) -> np.ndarray:
        """Piecewise-constant evaluation at arbitrary points; 0 outside."""
        pts = np.asarray(points, dtype=float)
        squeeze = pts.ndim == 1
        pts = pts.reshape(-1, self.dim)
        idx = np.floor((pts - self.origin) / self.h).astype(np.int64)
        valid = np.ones(len(pts), dtype=bool)
        for a in range(self.dim):
            valid &= (idx[:, a] >= 0) & (idx[:, a] < self.shape[a])
        out = np.zeros(len(pts))
        if valid.any():
            if self.dim == 1:
                out[valid] = self.values[idx[valid, 0]]
            else:
                out[valid] = self.values[idx[valid, 0], idx[valid, 1]]
        return out[0] if (squeeze and out.size == 1) else out

    # -- ball restriction --------------------------------------------------------

    def ball_mask(self, ball: Ball) -> tuple:
        """Index slices of the ball's bounding box plus the in-ball mask."""
        if ball.dim != self.dim:
            raise ValueError("ball dimension mismatch")
        c = np.asarray(ball.center)
        lo_idx = np.floor((c - ball.radius - self.origin) / self.h).astype(int)
        hi_idx = np.ceil((c + ball.radius - self.origin) / self.h).astype(int)
        lo_idx = np.maximum(lo_idx, 0)
        hi_idx = np.minimum(hi_idx, np.asarray(self.shape))
        slices = tuple(slice(lo_idx[a], max(hi_idx[a], lo_idx[a]))
                       for a in range(self.dim))
        axes = [self.origin[a] + (np.arange(lo_idx[a], max(hi_idx[a], lo_idx[a]))
                                  + 0.5) * self.h - c[a]
                for a in range(self.dim)]
        if self.dim == 1:
            dist2 = axes[0] ** 2
        else:
            dist2 = axes[0][:, None] ** 2 + axes[1][None, :] ** 2
        mask = dist2 < ball.radius ** 2
        return slices, mask

    def restrict(self, ball: Ball) -> np.ndarray:
        """Values at cells whose centers lie inside the ball (flattened)."""
        slices, mask = self.ball_mask(ball)
        return self.values[slices][mask]

    def cell_count(self, ball: Ball) -> int:
        _, mask = self.ball_mask(ball)
        return int(mask.sum())

    def discrete_measure(self, ball: Ball) -> float:
        """Quadrature measure of the ball: in-ball cell count times h^n."""
        return self.cell_count(ball) * self.h ** self.dim

    def integrate_ball(self, ball: Ball, transform=None) -> float:
        vals = self.restrict(ball)
        if transform is not None:
            vals = transform(vals)
        return float(np.sum(vals)) * self.h ** self.dim

    # -- serialization --------------------------------------------------------

    def to_csv(self, path) -> None:
        """Header (dim, origin, h, shape, label) then row-major values.

        Floats are written with repr, which round-trips float64 exactly.
        """
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"dim,{self.dim}\n")
            fh.write("origin," + ",".join(repr(float(c)) for c in self.origin) + "\n")
            fh.write(f"h,{self.h!r}\n")
            fh.write("shape," + ",".join(str(s) for s in self.shape) + "\n")
            fh.write(f"label,{self.label}\n")
            rows = self.values.reshape(self.shape[0], -1)
            for row in rows:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "SampledField":
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh]
        header = {}
        for ln in lines[:5]:
            key, _, rest = ln.partition(",")
            header[key] = rest
        dim = int(header["dim"])
        origin = [float(tok) for tok in header["origin"].split(",")]
        h = float(header["h"])
        shape = tuple(int(tok) for tok in header["shape"].split(","))
        label = header.get("label", "")
        data = [
            [float(tok) for tok in ln.split(",")]
            for ln in lines[5:]
            if ln.strip()
        ]
        values = np.asarray(data, dtype=float).reshape(shape)
        return cls(dim, origin, h, values, label=label)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return (f"SampledField(dim={self.dim}, shape={self.shape}, "
                f"h={self.h:g}, label={self.label!r})")
