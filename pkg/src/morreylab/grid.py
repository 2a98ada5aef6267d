"""Uniform cell-centered grids on a truncated box and ball-restricted quadrature.

The domain is always the axis-aligned box [-L, L]^n (n = 1, 2, 3). Sample
points sit at cell centers, (k + 1/2)h - L per axis, so the origin is never
a sample point and radially singular integrands (|y|^beta with beta < 0,
log|y|) stay finite without special-casing. Integrals over a ball B(x, r)
are midpoint sums over the lattice points strictly inside the ball; the
intersection with the box is implicit in lattice membership, so a ball
hanging over the edge is integrated over its truncated part.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered lattice on [-L, L]^n.

    Attributes
    ----------
    dim : int
        Ambient dimension, 1 <= dim <= 3.
    half_width : float
        Box half-width L.
    cells_per_axis : int
        Number of cells per axis; spacing is h = 2L / cells_per_axis.
    """

    dim: int
    half_width: float
    cells_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if self.cells_per_axis < 2:
            raise ValueError(
                f"cells_per_axis must be at least 2, got {self.cells_per_axis}"
            )

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.cells_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def num_points(self) -> int:
        return self.cells_per_axis**self.dim

    @property
    def diameter(self) -> float:
        """Diameter of the box, 2L sqrt(n)."""
        return 2.0 * self.half_width * float(np.sqrt(self.dim))

    @cached_property
    def axis(self) -> np.ndarray:
        h = self.spacing
        k = np.arange(self.cells_per_axis)
        return (k + 0.5) * h - self.half_width

    @cached_property
    def points(self) -> np.ndarray:
        """All lattice points, shape (num_points, dim), lexicographic in axis index."""
        axes = np.meshgrid(*[self.axis] * self.dim, indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=-1)

    def coarsen(self, factor: int = 2) -> "Grid":
        """Grid with the same box and cells_per_axis // factor cells."""
        if self.cells_per_axis % factor != 0 or self.cells_per_axis // factor < 2:
            raise ValueError(
                f"cannot coarsen {self.cells_per_axis} cells by factor {factor}"
            )
        return Grid(self.dim, self.half_width, self.cells_per_axis // factor)


def make_grid(n: int, half_width: float, cells_per_axis: int) -> Grid:
    """Build a cell-centered grid on [-half_width, half_width]^n."""
    return Grid(n, half_width, cells_per_axis)


@dataclass(frozen=True)
class Ball:
    """Open ball B(x, r). The center need not be a lattice point."""

    center: tuple
    radius: float

    def __post_init__(self):
        center = tuple(float(c) for c in np.atleast_1d(self.center))
        object.__setattr__(self, "center", center)
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")

    @property
    def center_array(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)


@dataclass
class SampledFunction:
    """Scalar field on a grid: one finite real value per lattice point."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.num_points,):
            raise ValueError(
                f"values must have shape ({self.grid.num_points},), "
                f"got {self.values.shape}"
            )
        bad = ~np.isfinite(self.values)
        if bad.any():
            i = int(np.argmax(bad))
            raise ValueError(
                f"non-finite value {self.values[i]} at point {tuple(self.grid.points[i])}"
            )


def sample(expr, grid: Grid) -> SampledFunction:
    """Sample a pointwise expression at every cell center.

    ``expr`` receives the full (num_points, dim) array of lattice points and
    must return one value per point. Non-finite results are rejected with the
    offending point named; cell centers never coincide with the origin, so
    radial singularities at 0 are safe to sample.
    """
    values = np.asarray(expr(grid.points), dtype=float)
    if values.shape != (grid.num_points,):
        values = np.broadcast_to(values, (grid.num_points,)).copy()
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise ValueError(
            f"expression is not finite at lattice point {tuple(grid.points[i])}: "
            f"got {values[i]}"
        )
    return SampledFunction(grid, values)


def radial(fn):
    """Adapt a function of |y| to the (num_points, dim) sampling convention."""

    def expr(points):
        return fn(np.linalg.norm(points, axis=1))

    return expr


def ball_mask(grid: Grid, ball: Ball) -> np.ndarray:
    """Boolean mask of lattice points strictly inside the ball.

    Membership is |p - x| < r; a point exactly on the sphere is excluded.
    """
    d2 = np.sum((grid.points - ball.center_array) ** 2, axis=1)
    return d2 < ball.radius**2


def ball_point_count(grid: Grid, ball: Ball) -> int:
    """Number of lattice points inside the ball; 0 flags an empty ball."""
    return int(np.count_nonzero(ball_mask(grid, ball)))


def ball_quadrature(g: SampledFunction, ball: Ball) -> float:
    """Midpoint-rule integral of g over the truncated ball B(x, r) ∩ box.

    A ball disjoint from the box contributes no points and returns 0.0;
    use :func:`ball_point_count` when emptiness matters.
    """
    grid = g.grid
    mask = ball_mask(grid, ball)
    if not mask.any():
        return 0.0
    return float(np.sum(g.values[mask]) * grid.cell_volume)


class CenterScan:
    """Truncated-ball sums around one center for many radii at once.

    Sorts the lattice by distance to the center once; each radius then
    reduces to a prefix sum. Equal distances keep lattice order (stable
    sort), and strict membership |p - x| < r is preserved by the
    left-sided search. Agreement with :func:`ball_quadrature` is within
    1e-12 relative (summation order differs).
    """

    def __init__(self, grid: Grid, center):
        self.grid = grid
        center = np.asarray(center, dtype=float)
        d2 = np.sum((grid.points - center) ** 2, axis=1)
        self.order = np.argsort(d2, kind="stable")
        self.sorted_d2 = d2[self.order]

    def counts(self, radii) -> np.ndarray:
        r2 = np.asarray(radii, dtype=float) ** 2
        return np.searchsorted(self.sorted_d2, r2, side="left")

    def sums(self, values: np.ndarray, radii) -> np.ndarray:
        """Integrals of ``values`` over B(center, r) ∩ box for each r."""
        csum = np.concatenate([[0.0], np.cumsum(values[self.order])])
        k = self.counts(radii)
        return csum[k] * self.grid.cell_volume
