"""Weights, exponent bookkeeping, and Muckenhoupt-type class diagnostics.

A weight is a positive function w on the truncated box, used two ways:

* as a measure density: Lebesgue integrals pick up a factor w (or a power
  of w) inside the sum;
* symbolically: powers of the standard families (constants, radial powers,
  pinched perturbations) are formed by exponent arithmetic, never by
  pointwise float powers of sampled arrays, so identities like
  (w^q)^(1/q) == w hold exactly.

Class membership (A_p and the offdiagonal A_{p,q} family) is *estimated*:
the defining sup over all balls is replaced by a max over a finite scan
family, evaluated on a ladder of coarsened grids. A weight is reported
in-class when the ladder stabilizes; steadily growing maxima across every
refinement level are reported as divergent. These are numerical verdicts
with witnesses, not proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .family import BallFamily
from .grid import Ball, CenterScan, Grid

# ball-scan verdict knobs (shared by A_p and A_{p,q} scans)
DRIFT_TOL = 0.20        # relative drift between the two finest levels
# Divergence threshold on the increment ratio. Log-divergence gives ratio
# ~1 with a few percent of scan jitter; convergent O(h^s) errors give <= ~0.6.
# 0.9 sits in the gap, clear of both.
GROWTH_RATIO = 0.9
GROWTH_FLOOR = 1e-3     # increments below this fraction of the value are noise
SCAN_LEVELS = 4

_SQRT_PI = math.sqrt(math.pi)


def unit_sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n (2, 2*pi, 4*pi, ...)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class ExponentSet:
    """A compatible (p, q, alpha) triple for the offdiagonal estimates.

    q is the Sobolev-type conjugate determined by 1/q = 1/p - alpha/n; the
    constructor enforces that relation to 1e-12 and the window 0 < alpha < n,
    1 < p < n/alpha (so q is finite and q > p).
    """

    p: float
    q: float
    alpha: float
    dim: int

    def __post_init__(self):
        n = self.dim
        if not (0.0 < self.alpha < n):
            raise ValueError(f"order alpha must lie in (0, {n}), got {self.alpha}")
        if not (1.0 < self.p < n / self.alpha):
            raise ValueError(
                f"p must lie in (1, n/alpha) = (1, {n / self.alpha:g}), got {self.p}"
            )
        resid = abs(1.0 / self.q - (1.0 / self.p - self.alpha / n))
        if resid > 1e-12:
            raise ValueError(f"q is off the 1/q = 1/p - alpha/n line by {resid:.3e}")

    @classmethod
    def from_p_alpha(cls, p: float, alpha: float, dim: int) -> "ExponentSet":
        if not (1.0 < p) or not (0.0 < alpha < dim) or p * alpha >= dim:
            raise ValueError(
                f"need 1 < p < dim/alpha and 0 < alpha < dim; got p={p}, alpha={alpha}"
            )
        q = 1.0 / (1.0 / p - alpha / dim)
        return cls(p=p, q=q, alpha=alpha, dim=dim)

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def q_conj(self) -> float:
        return self.q / (self.q - 1.0)


class Weight:
    """Positive weight on the box, closed under symbolic powers.

    Four shapes: "constant", "power" (amp * |y|^exponent), "pinched"
    (amp * shape(y) with lower <= shape <= upper), "tabulated" (values on a
    grid). pow() is exact for the first three; only tabulated weights fall
    back to pointwise float powers.
    """

    def __init__(self, kind, amp=1.0, exponent=0.0, lower=None, upper=None,
                 shape=None, grid=None, values=None, tail_exponent=None):
        if kind not in ("constant", "power", "pinched", "tabulated"):
            raise ValueError(f"unknown weight kind {kind!r}")
        if amp <= 0 or not np.isfinite(amp):
            raise ValueError(f"weight amplitude must be positive, got {amp}")
        self.kind = kind
        self.amp = float(amp)
        self.exponent = float(exponent)
        self.lower = lower
        self.upper = upper
        self.shape = shape
        self.grid = grid
        self.values = values
        self.tail_exponent = tail_exponent
        if kind == "pinched":
            if not (0 < lower <= upper) or shape is None:
                raise ValueError("pinched weight needs 0 < lower <= upper and a shape")
        if kind == "tabulated":
            if grid is None or values is None:
                raise ValueError("tabulated weight needs a grid and values")
            values = np.asarray(values, dtype=float)
            if values.shape != (grid.num_points,):
                raise ValueError(
                    f"tabulated values shape {values.shape} does not match grid "
                    f"({grid.num_points} points)"
                )
            if np.any(values <= 0) or not np.all(np.isfinite(values)):
                bad = int(np.argmin(values * np.isfinite(values)))
                raise ValueError(
                    f"tabulated weight must be positive and finite; offending "
                    f"point {tuple(grid.points[bad])}"
                )
            self.values = values

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value: float = 1.0) -> "Weight":
        return cls("constant", amp=value)

    @classmethod
    def power(cls, exponent: float, amp: float = 1.0) -> "Weight":
        return cls("power", amp=amp, exponent=exponent)

    @classmethod
    def pinched(cls, shape: Callable, lower: float, upper: float,
                amp: float = 1.0) -> "Weight":
        return cls("pinched", amp=amp, lower=float(lower), upper=float(upper),
                   shape=shape)

    @classmethod
    def tabulated(cls, grid: Grid, values, tail_exponent: float | None = None) -> "Weight":
        return cls("tabulated", grid=grid, values=values,
                   tail_exponent=tail_exponent)

    # -- evaluation --------------------------------------------------------

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "constant":
            return np.full(points.shape[0], self.amp)
        if self.kind == "power":
            r = np.linalg.norm(points, axis=-1)
            return self.amp * r ** self.exponent
        if self.kind == "pinched":
            vals = self.amp * np.asarray(self.shape(points), dtype=float)
            return np.broadcast_to(vals, (points.shape[0],)).astype(float)
        raise ValueError("tabulated weights are grid-bound; use sample_on")

    def sample_on(self, grid: Grid) -> np.ndarray:
        """Values at every lattice point of `grid` (amplitude included)."""
        if self.kind == "tabulated":
            if grid is not self.grid and grid != self.grid:
                raise ValueError("tabulated weight sampled on a different grid")
            return self.values.copy()
        return self(grid.points)

    # -- symbolic algebra --------------------------------------------------

    def pow(self, s: float) -> "Weight":
        """w^s as a weight; exact exponent arithmetic for symbolic kinds."""
        if s == 1.0:
            return self
        a = self.amp ** s
        if self.kind == "constant":
            return Weight.constant(a)
        if self.kind == "power":
            return Weight.power(s * self.exponent, amp=a)
        if self.kind == "pinched":
            lo, hi = self.lower ** s, self.upper ** s
            base = self.shape
            return Weight.pinched(lambda pts, _b=base, _s=s: np.asarray(_b(pts)) ** _s,
                                  min(lo, hi), max(lo, hi), amp=a)
        tail = None if self.tail_exponent is None else s * self.tail_exponent
        return Weight.tabulated(self.grid, self.values ** s, tail_exponent=tail)

    def scaled(self, factor: float) -> "Weight":
        """factor * w (same shape, rescaled amplitude)."""
        if factor <= 0:
            raise ValueError("weight scale factor must be positive")
        w = Weight.__new__(Weight)
        w.__dict__.update(self.__dict__)
        w.amp = self.amp * factor
        if self.kind == "tabulated":
            w.values = self.values * factor
        return w

    def unit_amp(self) -> "Weight":
        """Copy with amplitude 1 (tabulated weights are left untouched)."""
        if self.kind == "tabulated" or self.amp == 1.0:
            return self
        w = Weight.__new__(Weight)
        w.__dict__.update(self.__dict__)
        w.amp = 1.0
        return w

    def __repr__(self):
        if self.kind == "constant":
            return f"Weight.constant({self.amp:g})"
        if self.kind == "power":
            return f"Weight.power({self.exponent:g}, amp={self.amp:g})"
        if self.kind == "pinched":
            return f"Weight.pinched(lower={self.lower:g}, upper={self.upper:g}, amp={self.amp:g})"
        return f"Weight.tabulated(<{self.values.size} values>)"


# ---------------------------------------------------------------------------
# norms of weights over balls


def weight_lq_norm(w: Weight, q: float, ball: Ball, grid: Grid) -> float:
    """Discrete L^q norm of w over the truncated ball: (sum w^q h^n)^(1/q).

    Empty balls give 0. Overflow in w^q raises, naming the offending point.
    """
    if q <= 0:
        raise ValueError(f"norm exponent must be positive, got {q}")
    from .grid import ball_mask

    mask = ball_mask(grid, ball)
    if not mask.any():
        return 0.0
    vals = w.pow(q).sample_on(grid)[mask]
    if not np.all(np.isfinite(vals)):
        bad_local = int(np.argmax(~np.isfinite(vals)))
        pt = grid.points[mask][bad_local]
        raise ValueError(
            f"w^{q:g} overflowed at lattice point {tuple(pt)}; "
            "tame the weight or lower the exponent"
        )
    return float(np.sum(vals) * grid.cell_volume) ** (1.0 / q)


def closed_form_power_norm(beta: float, q: float, ball: Ball, dim: int) -> float:
    """Two-regime envelope for || |y|^(beta/q) ||_{L^q} over an untruncated ball.

    Near regime (|x| < 3r): r^((n+beta)/q). Far regime (|x| >= 3r):
    r^(n/q) (|x|+r)^(beta/q). Bare envelope: no constants attached, so it is
    only ever used in ratios. Requires beta > -n (local integrability).
    """
    if beta <= -dim:
        raise ValueError(f"beta must exceed -n = {-dim} for a locally finite norm")
    if q <= 0:
        raise ValueError(f"norm exponent must be positive, got {q}")
    r = ball.radius
    x = float(np.linalg.norm(ball.center_array))
    if x < 3.0 * r:
        return r ** ((dim + beta) / q)
    return r ** (dim / q) * (x + r) ** (beta / q)


def untruncated_ball_norm(w: Weight, q: float, center, radius: float,
                          dim: int) -> float:
    """|| w ||_{L^q(B(center, radius))} over the *untruncated* ball, symbolically.

    Exact for constants and for radial powers centered at the origin; for
    off-origin power balls the near regime uses the enclosing ball
    B(0, |x| + r) (an upper envelope with the exact small-ball rate) and the
    far regime uses the min/max distance bracket midpoint in log space.
    Pinched weights return the conservative lower-bound constant. Tabulated
    weights have no symbolic norm (ValueError).
    """
    if q <= 0 or radius <= 0:
        raise ValueError("need q > 0 and radius > 0")
    x = float(np.linalg.norm(np.asarray(center, dtype=float)))
    if w.kind == "constant":
        return w.amp * (unit_ball_volume(dim) * radius ** dim) ** (1.0 / q)
    if w.kind == "pinched":
        return w.amp * w.lower * (unit_ball_volume(dim) * radius ** dim) ** (1.0 / q)
    if w.kind == "power":
        beta_m = w.exponent * q          # measure-side exponent of |y|^(e*q)
        if beta_m <= -dim:
            raise ValueError(
                f"|y|^{w.exponent:g} is not in L^{q:g} near the origin"
            )
        omega = unit_sphere_area(dim)
        if x < 3.0 * radius:
            # dominated by the origin: integrate over B(0, x + r) when the
            # ball straddles 0, exactly over B(0, r) when centered there
            rho = radius if x == 0.0 else x + radius
            return w.amp * (omega / (dim + beta_m) * rho ** (dim + beta_m)) ** (1.0 / q)
        lo, hi = x - radius, x + radius
        mid = math.sqrt(lo * hi)
        return w.amp * (unit_ball_volume(dim) * radius ** dim) ** (1.0 / q) * mid ** w.exponent
    raise ValueError("tabulated weights have no symbolic ball norm")


# ---------------------------------------------------------------------------
# scan verdicts


@dataclass
class WeightClassReport:
    """Outcome of a ball-family scan for a Muckenhoupt-type characteristic.

    characteristic : max of the ball functional over the scan family (finest
        grid); the class constant estimate.
    witness_ball : ball attaining the max.
    ball_count : lattice points inside the witness ball.
    refinement_drift : relative change of the characteristic between the two
        finest grid levels.
    levels : (spacing, characteristic) per level, coarse to fine.
    in_class : stabilized and not steadily growing.
    divergent : every refinement grew the characteristic at a sustained rate.
    """

    characteristic: float
    witness_ball: Ball
    ball_count: int
    refinement_drift: float
    levels: tuple
    in_class: bool
    divergent: bool

    def __str__(self):
        tag = "in-class" if self.in_class else ("divergent" if self.divergent else "unstable")
        c = self.witness_ball.center
        return (f"characteristic {self.characteristic:.6g} [{tag}] "
                f"drift {self.refinement_drift:.3f} witness B({c}, {self.witness_ball.radius:g}) "
                f"({self.ball_count} points)")


def _grid_ladder(grid: Grid, levels: int) -> list[Grid]:
    """Coarse-to-fine dyadic grid ladder ending at `grid`."""
    ladder = [grid]
    g = grid
    for _ in range(levels - 1):
        if g.cells_per_axis % 2 or g.cells_per_axis // 2 < 4:
            break
        g = g.coarsen(2)
        ladder.append(g)
    return ladder[::-1]


def _scan_max(grid: Grid, balls: BallFamily, arrays: dict,
              functional: Callable) -> tuple[float, Ball, int]:
    """Max of functional(sums, counts, volume) over the family on one grid.

    arrays maps name -> lattice values; functional receives per-radius summed
    integrals {name: array} plus counts and ball volumes and returns an array
    of ball functional values (nan to skip).
    """
    best = -math.inf
    best_ball = None
    best_count = 0
    vol_cell = grid.cell_volume
    for center in balls.centers:
        scan = CenterScan(grid, center)
        counts = scan.counts(balls.radii)
        sums = {name: scan.sums(vals, balls.radii) for name, vals in arrays.items()}
        vols = counts * vol_cell
        with np.errstate(divide="ignore", invalid="ignore"):
            scores = functional(sums, counts, vols)
        scores = np.where(counts > 0, scores, np.nan)
        if np.all(np.isnan(scores)):
            continue
        k = int(np.nanargmax(scores))
        if scores[k] > best:
            best = float(scores[k])
            best_ball = Ball(tuple(center), float(balls.radii[k]))
            best_count = int(counts[k])
    if best_ball is None:
        raise ValueError("no ball in the family contains a lattice point")
    return best, best_ball, best_count


def _ladder_verdict(values: list[float]) -> tuple[float, bool, bool]:
    """(drift, in_class, divergent) from per-level characteristics.

    Divergence test: every refinement must grow the characteristic by more
    than the noise floor, and the increments must not be shrinking — their
    geometric-mean ratio (last/first, annualized per level) stays >= the
    growth threshold. A log-divergent characteristic has near-constant
    increments (ratio ~ 1); a convergent one has geometrically shrinking
    increments (ratio ~ 2^-s for an O(h^s) error).
    """
    if len(values) < 2:
        return math.nan, True, False
    drift = abs(values[-1] - values[-2]) / max(values[-2], 1e-300)
    divergent = False
    if len(values) >= 3:
        incs = np.diff(values)
        floor = GROWTH_FLOOR * abs(values[-1])
        if np.all(incs > floor):
            mean_ratio = (incs[-1] / incs[0]) ** (1.0 / (incs.size - 1))
            divergent = bool(mean_ratio >= GROWTH_RATIO)
    finite = math.isfinite(values[-1])
    in_class = finite and drift < DRIFT_TOL and not divergent
    return drift, in_class, divergent


def ap_characteristic(w: Weight, p: float, balls: BallFamily, grid: Grid,
                      levels: int = SCAN_LEVELS) -> WeightClassReport:
    """Estimate the A_p constant: sup over balls of

        (integral of w) * (integral of w^(1-p'))^(p-1) / |B|^p

    scanned over the family on a dyadic grid ladder. The weight's amplitude
    cancels in this ratio and is dropped before sampling, so rescaling w is
    bit-exact invariant.
    """
    if p <= 1.0:
        raise ValueError(f"A_p needs p > 1, got {p}")
    if w.kind == "tabulated":
        raise ValueError("class scans need a symbolic weight (powers must be exact)")
    pc = p / (p - 1.0)
    base = w.unit_amp()
    dual = base.pow(1.0 - pc)
    per_level = []
    witness = None
    count = 0
    for g in _grid_ladder(grid, levels):
        arrays = {"w": base.sample_on(g), "dual": dual.sample_on(g)}

        def functional(sums, counts, vols, _p=p):
            return sums["w"] * sums["dual"] ** (_p - 1.0) / vols ** _p

        val, ball, n_pts = _scan_max(g, balls, arrays, functional)
        per_level.append((g.spacing, val))
        witness, count = ball, n_pts
    vals = [v for _, v in per_level]
    drift, in_class, divergent = _ladder_verdict(vals)
    return WeightClassReport(vals[-1], witness, count, drift,
                             tuple(per_level), in_class, divergent)


def apq_characteristic(w: Weight, exps: ExponentSet, balls: BallFamily,
                       grid: Grid, levels: int = SCAN_LEVELS) -> WeightClassReport:
    """Estimate the offdiagonal A_{p,q} constant: sup over balls of

        ||w||_{L^q(B)} * ||w^{-1}||_{L^{p'}(B)} / |B|^(1 + 1/q - 1/p)

    with |B| the truncated ball volume. Amplitude cancels exactly.
    """
    if w.kind == "tabulated":
        raise ValueError("class scans need a symbolic weight (powers must be exact)")
    p, q = exps.p, exps.q
    pc = exps.p_conj
    base = w.unit_amp()
    wq = base.pow(q)
    w_dual = base.pow(-pc)
    expo = 1.0 + 1.0 / q - 1.0 / p
    per_level = []
    witness = None
    count = 0
    for g in _grid_ladder(grid, levels):
        arrays = {"wq": wq.sample_on(g), "dual": w_dual.sample_on(g)}

        def functional(sums, counts, vols):
            return sums["wq"] ** (1.0 / q) * sums["dual"] ** (1.0 / pc) / vols ** expo

        val, ball, n_pts = _scan_max(g, balls, arrays, functional)
        per_level.append((g.spacing, val))
        witness, count = ball, n_pts
    vals = [v for _, v in per_level]
    drift, in_class, divergent = _ladder_verdict(vals)
    return WeightClassReport(vals[-1], witness, count, drift,
                             tuple(per_level), in_class, divergent)


@dataclass
class InclusionReport:
    """Single-direction check: w^q in A_s with s = 1 + q/p'  =>  w in A_{p,q}."""

    premise: WeightClassReport
    conclusion: WeightClassReport
    s: float
    consistent: bool = field(init=False)

    def __post_init__(self):
        self.consistent = (not self.premise.in_class) or self.conclusion.in_class


def apq_inclusion_check(w: Weight, exps: ExponentSet, balls: BallFamily,
                        grid: Grid, levels: int = SCAN_LEVELS) -> InclusionReport:
    """Test the implication 'w^q in A_{1+q/p'} implies w in A_{p,q}' on a scan.

    Returns both scan reports; `consistent` is False only if the premise
    verdict is in-class while the conclusion verdict is not.
    """
    s = 1.0 + exps.q / exps.p_conj
    premise = ap_characteristic(w.pow(exps.q), s, balls, grid, levels=levels)
    conclusion = apq_characteristic(w, exps, balls, grid, levels=levels)
    return InclusionReport(premise, conclusion, s)
