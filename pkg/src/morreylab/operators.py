"""Fractional integral and maximal operators, and their commutators.

The integral operator convolves a sampled function with the kernel
|x - y|^(alpha - n) by midpoint quadrature over the truncated box. The
kernel's integrable singularity at y = x is handled by an analytic cell
integral (exact in 1-D, a two-sided disk bracket in higher dimensions);
without that correction the midpoint sum diverges under refinement.

The maximal operator takes the sup over a geometric radius ladder of
r^(alpha - n) times the ball integral of |f|, exactly as displayed — no
ball-volume normalization, so e.g. M_0 of a constant c is (in the interior)
2c in 1-D, not c. The ladder max undershoots the continuous sup by at most
the factor ladder_defect(alpha, n, ratio) = ratio^(n - alpha).

Evaluation is dense: O(N * M) for M eval points. Pass eval_points to
restrict evaluation (the escape hatch for 2-D grids); there is no FFT path.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .family import DEFAULT_RATIO
from .grid import CenterScan, Grid, SampledFunction
from .weights import unit_sphere_area

# rows per chunk in the dense kernel sweep; bounds peak memory at
# roughly chunk * num_points * 8 bytes
_CHUNK_ROWS = 256


def default_radius_ladder(grid: Grid, steps_per_doubling: int = 2) -> np.ndarray:
    """Geometric radii h * 2^(k/m) covering [h, box diameter].

    m = steps_per_doubling (2 gives the sqrt(2) ladder). Rungs at whole
    doublings are exact binary multiples of h, so strict ball membership at
    those radii never flips on float rounding of the rung itself.
    """
    if steps_per_doubling < 1:
        raise ValueError("steps_per_doubling must be at least 1")
    h = grid.spacing
    count = int(math.ceil(math.log2(grid.diameter / h) * steps_per_doubling)) + 1
    return h * 2.0 ** (np.arange(count) / steps_per_doubling)


def ladder_defect(alpha: float, dim: int, ratio: float = DEFAULT_RATIO) -> float:
    """Upper bound on (continuous sup) / (ladder max) for the maximal operator."""
    return ratio ** (dim - alpha)


def self_cell_kernel_integral(alpha: float, dim: int, spacing: float) -> float:
    """Integral of |u|^(alpha - n) over one grid cell centered at the origin.

    1-D: exact, 2 (h/2)^alpha / alpha. Higher dimensions: the cell is
    bracketed between the inscribed ball (radius h/2) and the circumscribed
    ball (radius h sqrt(n)/2), whose kernel integrals are
    omega_{n-1} rho^alpha / alpha; the geometric mean of the two is used.
    """
    h = spacing
    base = unit_sphere_area(dim) / alpha * (h / 2.0) ** alpha
    return base * dim ** (alpha / 4.0)


def _check_support(f: SampledFunction, margin_cells: float = 1.0):
    """Warn when f is nonzero within `margin_cells` cells of the box edge.

    Kernel integrals only see the box; a function supported strictly inside
    it has zero truncation error, one leaking to the edge does not.
    """
    grid = f.grid
    nz = f.values != 0.0
    if not nz.any():
        return
    reach = np.max(np.abs(grid.points[nz]))
    limit = grid.half_width - margin_cells * grid.spacing
    if reach > limit:
        warnings.warn(
            f"function support reaches {reach:g}, within one cell of the box "
            f"edge {grid.half_width:g}; box truncation error is no longer zero",
            stacklevel=3,
        )


def _resolve_eval(grid: Grid, eval_points):
    if eval_points is None:
        return grid.points, True
    pts = np.atleast_2d(np.asarray(eval_points, dtype=float))
    if pts.shape[1] != grid.dim:
        raise ValueError(f"eval points must have dimension {grid.dim}")
    return pts, False


def fractional_integral(f: SampledFunction, alpha: float, eval_points=None):
    """Riesz-type potential: out(x) = sum_y f(y) |x - y|^(alpha - n) h^n.

    The y = x term uses the analytic cell integral of the kernel instead of
    the (infinite) midpoint value. Returns a SampledFunction on f's grid, or
    a plain array when eval_points is given. Eval points are expected to be
    lattice points; the self-cell correction applies wherever an eval point
    coincides with one.
    """
    grid = f.grid
    n = grid.dim
    if not (0.0 < alpha < n):
        raise ValueError(f"integral operator needs 0 < alpha < {n}, got {alpha}")
    _check_support(f)
    pts, full = _resolve_eval(grid, eval_points)
    lattice = grid.points
    fv = f.values
    cell = self_cell_kernel_integral(alpha, n, grid.spacing)
    vol = grid.cell_volume
    out = np.empty(pts.shape[0])
    for lo in range(0, pts.shape[0], _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, pts.shape[0])
        diff = pts[lo:hi, None, :] - lattice[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        hit = dist == 0.0
        with np.errstate(divide="ignore"):
            kern = dist ** (alpha - n)
        kern[hit] = 0.0
        out[lo:hi] = kern @ fv * vol
        rows, cols = np.nonzero(hit)
        out[lo + rows] += fv[cols] * cell
    if full:
        return SampledFunction(grid, out)
    return out


def fractional_maximal(f: SampledFunction, alpha: float, radius_ladder=None,
                       eval_points=None):
    """Ladder max of r^(alpha - n) * integral of |f| over B(x, r).

    alpha = 0 gives the (unnormalized) Hardy-Littlewood variant. The ladder
    defaults to default_radius_ladder(grid); the continuous sup exceeds the
    result by at most ladder_defect(alpha, n, ratio).
    """
    grid = f.grid
    n = grid.dim
    if not (0.0 <= alpha < n):
        raise ValueError(f"maximal operator needs 0 <= alpha < {n}, got {alpha}")
    if radius_ladder is None:
        radius_ladder = default_radius_ladder(grid)
    radii = np.asarray(radius_ladder, dtype=float)
    if radii.size == 0:
        raise ValueError("radius ladder is empty")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ValueError("radius ladder must be positive and strictly increasing")
    pts, full = _resolve_eval(grid, eval_points)
    absf = np.abs(f.values)
    scale = radii ** (alpha - n)
    out = np.empty(pts.shape[0])
    for i, x in enumerate(pts):
        sums = CenterScan(grid, x).sums(absf, radii)
        out[i] = float(np.max(scale * sums))
    if full:
        return SampledFunction(grid, out)
    return out


def commutator_integral(b: SampledFunction, f: SampledFunction, alpha: float,
                        eval_points=None):
    """b(x) I_alpha(f)(x) - I_alpha(b f)(x), both terms on the same quadrature.

    Sharing the quadrature makes the constant-b case cancel to roundoff.
    """
    grid = f.grid
    if b.grid != grid:
        raise ValueError("symbol and function live on different grids")
    bf = SampledFunction(grid, b.values * f.values)
    pts, full = _resolve_eval(grid, eval_points)
    if full:
        term1 = b.values * fractional_integral(f, alpha).values
        term2 = fractional_integral(bf, alpha).values
        return SampledFunction(grid, term1 - term2)
    b_at = _values_at_lattice(b, pts)
    term1 = b_at * fractional_integral(f, alpha, eval_points=pts)
    term2 = fractional_integral(bf, alpha, eval_points=pts)
    return term1 - term2


def commutator_maximal(b: SampledFunction, f: SampledFunction, alpha: float,
                       radius_ladder=None, eval_points=None):
    """b(x) M_alpha(f)(x) - M_alpha(b f)(x)."""
    grid = f.grid
    if b.grid != grid:
        raise ValueError("symbol and function live on different grids")
    bf = SampledFunction(grid, b.values * f.values)
    pts, full = _resolve_eval(grid, eval_points)
    if full:
        term1 = b.values * fractional_maximal(f, alpha, radius_ladder).values
        term2 = fractional_maximal(bf, alpha, radius_ladder).values
        return SampledFunction(grid, term1 - term2)
    b_at = _values_at_lattice(b, pts)
    term1 = b_at * fractional_maximal(f, alpha, radius_ladder, eval_points=pts)
    term2 = fractional_maximal(bf, alpha, radius_ladder, eval_points=pts)
    return term1 - term2


def _values_at_lattice(f: SampledFunction, pts: np.ndarray) -> np.ndarray:
    """Values of f at points that must coincide with lattice points."""
    grid = f.grid
    idx = np.empty(pts.shape[0], dtype=int)
    axis = grid.axis
    h = grid.spacing
    flat = np.zeros(pts.shape[0], dtype=int)
    for d in range(grid.dim):
        k = np.rint((pts[:, d] + grid.half_width) / h - 0.5).astype(int)
        if np.any(k < 0) or np.any(k >= axis.size):
            raise ValueError("eval point outside the box")
        if np.max(np.abs(axis[k] - pts[:, d])) > 1e-9 * h:
            raise ValueError("commutator eval points must be lattice points")
        flat = flat * axis.size + k
    idx[:] = flat
    return f.values[idx]
