"""Weighted Morrey-type quasinorms over scan families, and BMO oscillation.

The central object is the scan

    sup over (x, r) of  phi(x, r)^(-1/p) * || f ||_{L^p(w-measure, B(x,r))}

with the sup taken over a BallFamily and balls implicitly truncated to the
box. The per-radius profile v(r) = sup over centers is kept (the "modulus
curve"); its small-r behavior is what the vanishing checks interrogate.
Limits at r -> 0 are replaced everywhere by a documented finite surrogate:
a threshold at the smallest scanned radius plus last-decade monotonicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .family import BallFamily
from .grid import Ball, CenterScan, Grid, SampledFunction, ball_mask
from .weights import Weight

# a ball smaller than one cell is quadrature noise
RADIUS_FLOOR_CELLS = 2.0
# last-decade monotonicity slack for the decay surrogates
DECAY_SLACK = 1.10
# required endpoint drop of the admissibility curve across its last decade
ENVELOPE_DECAY_FACTOR = 0.75


class Envelope:
    """Radial envelope phi(x, r), either a pure power r^lam or a table.

    Tabulated envelopes hold one value row per family center (or one shared
    row) on a fixed radius grid, interpolated log-log in between. Values
    beyond the table need a declared tail exponent; there is no silent
    extrapolation.
    """

    def __init__(self, kind, exponent=0.0, radii=None, table=None,
                 tail_exponent=None):
        if kind not in ("power", "table"):
            raise ValueError(f"unknown envelope kind {kind!r}")
        self.kind = kind
        self.exponent = float(exponent)
        self.tail_exponent = tail_exponent
        self.radii = None
        self.table = None
        if kind == "table":
            radii = np.asarray(radii, dtype=float)
            table = np.atleast_2d(np.asarray(table, dtype=float))
            if radii.ndim != 1 or np.any(np.diff(radii) <= 0) or np.any(radii <= 0):
                raise ValueError("envelope radii must be positive and increasing")
            if table.shape[-1] != radii.size:
                raise ValueError("envelope table does not match its radius grid")
            if np.any(table <= 0) or not np.all(np.isfinite(table)):
                raise ValueError("envelope values must be positive and finite")
            self.radii = radii
            self.table = table

    @classmethod
    def power_radial(cls, exponent: float) -> "Envelope":
        return cls("power", exponent=exponent)

    @classmethod
    def tabulated(cls, radii, table, tail_exponent: float | None = None) -> "Envelope":
        return cls("table", radii=radii, table=table, tail_exponent=tail_exponent)

    def at(self, r, center_index: int = 0):
        """phi at radius r (scalar or array) for the given center row."""
        r = np.asarray(r, dtype=float)
        if self.kind == "power":
            out = r ** self.exponent
            return float(out) if out.ndim == 0 else out
        row = self.table[0] if self.table.shape[0] == 1 else self.table[center_index]
        lo, hi = self.radii[0], self.radii[-1]
        scalar = r.ndim == 0
        rr = np.atleast_1d(r)
        if np.any(rr < lo * (1 - 1e-12)):
            raise ValueError(
                f"envelope table starts at {lo:g}, asked for r={rr.min():g}"
            )
        out = np.exp(np.interp(np.log(np.minimum(rr, hi)), np.log(self.radii),
                               np.log(row)))
        beyond = rr > hi * (1 + 1e-12)
        if beyond.any():
            if self.tail_exponent is None:
                raise ValueError(
                    "tail undeclared: envelope table ends at "
                    f"{hi:g} and has no decay exponent"
                )
            out[beyond] = row[-1] * (rr[beyond] / hi) ** self.tail_exponent
        return float(out[0]) if scalar else out

    def growth_exponent(self):
        """Large-r power-law exponent, or None when undeclared."""
        if self.kind == "power":
            return self.exponent
        return self.tail_exponent

    def __repr__(self):
        if self.kind == "power":
            return f"Envelope.power_radial({self.exponent:g})"
        return f"Envelope.tabulated(<{self.table.shape}>, tail={self.tail_exponent})"


@dataclass
class MorreyReport:
    """Scan result: the quasinorm, its witness ball, and the radius profile.

    modulus_curve is a list of (r, v(r)) with v(r) the sup over centers at
    that radius; quasinorm = max over the curve.
    """

    quasinorm: float
    witness: Ball
    modulus_curve: list


def weighted_lp_norm(f: SampledFunction, w: Weight, wpow: float, p: float,
                     ball: Ball) -> float:
    """(integral over the truncated ball of |f|^p w^wpow)^(1/p).

    wpow selects the measure (w^p and w^q appear as measures upstream).
    Empty balls give 0.
    """
    if p < 1:
        raise ValueError(f"norm exponent must be >= 1, got {p}")
    grid = f.grid
    mask = ball_mask(grid, ball)
    if not mask.any():
        return 0.0
    dens = w.pow(wpow).sample_on(grid)[mask]
    vals = np.abs(f.values[mask]) ** p * dens
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmax(~np.isfinite(vals)))
        pt = grid.points[mask][bad]
        raise ValueError(f"|f|^{p:g} w^{wpow:g} overflowed at {tuple(pt)}")
    return float(np.sum(vals) * grid.cell_volume) ** (1.0 / p)


def _scan_radii(fam: BallFamily, grid: Grid) -> np.ndarray:
    floor = RADIUS_FLOOR_CELLS * grid.spacing
    radii = fam.radii[fam.radii >= floor * (1 - 1e-12)]
    if radii.size == 0:
        raise ValueError(
            f"all family radii fall below the {RADIUS_FLOOR_CELLS:g}-cell floor "
            f"({floor:g}); enlarge the radii or refine the grid"
        )
    return radii


def morrey_quasinorm(f: SampledFunction, phi: Envelope, p: float, w: Weight,
                     wpow: float, fam: BallFamily) -> MorreyReport:
    """Scan sup of phi^(-1/p) ||f||_{L^p(w^wpow)} over the family.

    Radii below the 2-cell floor are dropped from the curve. Ties go to the
    lexicographically smallest center, then the smallest radius.
    """
    if p < 1:
        raise ValueError(f"norm exponent must be >= 1, got {p}")
    grid = f.grid
    radii = _scan_radii(fam, grid)
    measure = np.abs(f.values) ** p * w.pow(wpow).sample_on(grid)
    curve = np.zeros(radii.size)
    arg_center = np.zeros(radii.size, dtype=int)
    for ci, center in enumerate(fam.centers):
        norms = CenterScan(grid, center).sums(measure, radii) ** (1.0 / p)
        vals = norms / np.asarray(phi.at(radii, ci), dtype=float) ** (1.0 / p)
        better = vals > curve
        curve[better] = vals[better]
        arg_center[better] = ci
    k = int(np.argmax(curve))
    witness = Ball(tuple(fam.centers[arg_center[k]]), float(radii[k]))
    return MorreyReport(
        quasinorm=float(curve[k]),
        witness=witness,
        modulus_curve=[(float(r), float(v)) for r, v in zip(radii, curve)],
    )


def _last_decade(radii: np.ndarray) -> np.ndarray:
    return radii <= radii[0] * 10.0 * (1 + 1e-12)


def _monotone_decay(radii: np.ndarray, vals: np.ndarray,
                    slack: float = DECAY_SLACK) -> bool:
    """True iff, over the last decade of small radii, v does not grow toward
    r -> 0 beyond the slack factor."""
    sel = _last_decade(radii)
    v = vals[sel]
    return bool(np.all(v[:-1] <= slack * v[1:] + 1e-300))


def vanishing_check(report: MorreyReport, threshold: float, r_knee: float) -> bool:
    """Finite surrogate for 'the modulus tends to 0 with the radius'.

    True iff v at the smallest scanned radius is below `threshold` and v is
    non-increasing toward r -> 0 (within 10% slack) over its last decade.
    The curve must cover at least a decade of radii below r_knee.
    """
    curve = np.asarray(report.modulus_curve, dtype=float)
    radii, vals = curve[:, 0], curve[:, 1]
    below = radii < r_knee
    if not below.any() or radii[below].max() / radii[below].min() < 10.0 * (1 - 1e-12):
        raise ValueError(
            f"modulus curve must cover a decade of radii below {r_knee:g}"
        )
    if vals[0] > threshold:
        return False
    return _monotone_decay(radii[below], vals[below])


@dataclass
class EnvelopeClassReport:
    """Admissibility of phi for a weight measure: small-r decay of the
    weight-mass/phi ratio, and a positive phi floor at unit-plus radii."""

    small_r_decay: bool
    positive_floor: bool
    floor_value: float
    curve: list = field(repr=False)

    def __iter__(self):
        return iter((self.small_r_decay, self.positive_floor))


def envelope_class_check(phi: Envelope, w: Weight, wpow: float,
                         fam: BallFamily, grid: Grid) -> EnvelopeClassReport:
    """Check the two structural requirements on the envelope.

    Decay: u(r) = sup over centers of (integral of w^wpow over B(x,r)) / phi
    must fall as r -> 0. Surrogate: over the smallest scanned decade, u is
    monotone within slack AND u(r_min) <= 0.75 u at the decade top — decays
    slower than r^0.125-per-decade are below the surrogate's resolution and
    reported as not decaying.

    Floor: min over scanned radii > 1 of sup over centers of phi must be
    positive (needs the family to reach past radius 1).
    """
    radii = _scan_radii(fam, grid)
    dens = w.pow(wpow).sample_on(grid)
    u = np.zeros(radii.size)
    phimax = np.zeros(radii.size)
    for ci, center in enumerate(fam.centers):
        mass = CenterScan(grid, center).sums(dens, radii)
        pvals = np.asarray(phi.at(radii, ci), dtype=float)
        u = np.maximum(u, mass / pvals)
        phimax = np.maximum(phimax, pvals)
    sel = _last_decade(radii)
    decade_top = u[sel][-1]
    decay = (_monotone_decay(radii, u)
             and u[0] <= ENVELOPE_DECAY_FACTOR * decade_top)
    above = radii > 1.0
    if not above.any():
        raise ValueError("family has no radii above 1; cannot probe the floor")
    floor = float(np.min(phimax[above]))
    return EnvelopeClassReport(
        small_r_decay=bool(decay),
        positive_floor=floor > 0.0,
        floor_value=floor,
        curve=[(float(r), float(x)) for r, x in zip(radii, u)],
    )


def bmo_seminorm(b: SampledFunction, fam: BallFamily) -> float:
    """Max over the family of the mean oscillation (1/|B|) int |b - b_B|.

    Computed on deviations from b's first sample so constant functions give
    exactly 0. Empty balls are skipped; all-empty is an error.
    """
    grid = b.grid
    dev = b.values - b.values[0]
    best = -math.inf
    r2 = fam.radii ** 2
    for center in fam.centers:
        diff = grid.points - np.asarray(center, dtype=float)
        d2 = np.sum(diff * diff, axis=-1)
        for rr2 in r2:
            sel = d2 < rr2
            if not sel.any():
                continue
            vals = dev[sel]
            osc = float(np.mean(np.abs(vals - np.mean(vals))))
            if osc > best:
                best = osc
    if best == -math.inf:
        raise ValueError("no ball in the family contains a lattice point")
    return best
