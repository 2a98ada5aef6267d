"""Scan families: a finite center set crossed with a geometric radius ladder.

Every sup-over-balls quantity in this package (Muckenhoupt characteristics,
Morrey moduli, oscillation seminorms, coupling ratios) is scanned over one of
these families. Centers are kept in lexicographic order and radii ascending,
so max-reductions have a deterministic witness: the first (center, radius)
pair attaining the maximum is the lexicographically smallest one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid

DEFAULT_RATIO = float(np.sqrt(2.0))


@dataclass
class BallFamily:
    """Center set and radius ladder defining the balls to scan.

    centers has shape (C, dim); radii is strictly increasing. Radii must stay
    below the box diameter (a ball that large is pure truncation).
    """

    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        self.centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        self.radii = np.asarray(self.radii, dtype=float)
        if self.centers.size == 0:
            raise ValueError("ball family needs at least one center")
        if self.radii.size == 0:
            raise ValueError("ball family needs at least one radius")
        if np.any(self.radii <= 0) or np.any(np.diff(self.radii) <= 0):
            raise ValueError("radii must be positive and strictly increasing")
        # canonical order: lexicographically sorted centers
        order = np.lexsort(self.centers.T[::-1])
        self.centers = self.centers[order]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def __len__(self) -> int:
        return self.centers.shape[0] * self.radii.size

    def refine(self) -> "BallFamily":
        """Double the radius density (geometric midpoints inserted)."""
        r = self.radii
        mids = np.sqrt(r[:-1] * r[1:])
        merged = np.sort(np.concatenate([r, mids]))
        return BallFamily(self.centers.copy(), merged)

    def with_radii(self, radii) -> "BallFamily":
        return BallFamily(self.centers.copy(), np.asarray(radii, dtype=float))


def geometric_radii(r_min: float, r_max: float, ratio: float = DEFAULT_RATIO) -> np.ndarray:
    """Ladder r_min * ratio^k, covering (r_min, r_max]; ratio in (1, 2].

    Rungs are evaluated as r_min * 2^(k/m) whenever ratio is 2^(1/m), so
    whole doublings land on exact binary multiples of r_min.  A cumulative
    power of fl(sqrt(2)) puts those rungs one ulp high, which silently pulls
    the boundary shell of lattice points into a strict-membership ball.
    """
    if not (1.0 < ratio <= 2.0):
        raise ValueError(f"ladder ratio must be in (1, 2], got {ratio}")
    if not (0 < r_min < r_max):
        raise ValueError(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    count = int(np.floor(np.log(r_max / r_min) / np.log(ratio))) + 1
    steps_per_doubling = round(1.0 / np.log2(ratio))
    if steps_per_doubling >= 1 and np.isclose(
            2.0 ** (1.0 / steps_per_doubling), ratio, rtol=1e-12, atol=0.0):
        exponents = np.arange(count) / steps_per_doubling
    else:
        exponents = np.arange(count) * np.log2(ratio)
    return r_min * 2.0 ** exponents


def default_family(
    grid: Grid,
    centers_per_axis: int = 5,
    r_min: float | None = None,
    r_max: float | None = None,
    ratio: float = DEFAULT_RATIO,
    include_origin: bool = True,
) -> BallFamily:
    """Centers on a coarse sublattice (plus the origin), geometric radii.

    The default ladder runs from 2h (smaller balls see at most one lattice
    point) to just under the box diameter; that covers both the small-ball
    regime |x| < 3r and the far regime |x| >= 3r for off-center balls.
    """
    axis = grid.axis
    idx = np.unique(np.linspace(0, axis.size - 1, centers_per_axis).round().astype(int))
    coarse = axis[idx]
    mesh = np.meshgrid(*[coarse] * grid.dim, indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=-1)
    if include_origin:
        centers = np.vstack([centers, np.zeros((1, grid.dim))])
    centers = np.unique(centers, axis=0)

    if r_min is None:
        r_min = 2.0 * grid.spacing
    if r_max is None:
        r_max = 0.999 * grid.diameter
    if r_max >= grid.diameter:
        raise ValueError("radii must stay below the box diameter")
    return BallFamily(centers, geometric_radii(r_min, r_max, ratio))
