"""End-to-end acceptance checks, one test per criterion.

Each test states its tolerance inline and carries its own runtime budget;
`pytest -v` prints one verdict line per criterion. These are the gates the
package has to clear as a whole — module-level edge cases live in the other
test files.
"""

import dataclasses
import math
import time

import numpy as np
import pytest

from morreylab.conditions import coupling_bound
from morreylab.family import BallFamily, default_family, geometric_radii
from morreylab.grid import make_grid, radial, sample
from morreylab.harness import (
    ExperimentConfig,
    roster_function,
    run_all,
    run_experiment,
    symbol_function,
)
from morreylab.morrey import Envelope, bmo_seminorm, morrey_quasinorm, vanishing_check
from morreylab.operators import (
    commutator_integral,
    fractional_integral,
    fractional_maximal,
    ladder_defect,
)
from morreylab.reporting import render_json
from morreylab.weights import ExponentSet, Weight, ap_characteristic, apq_characteristic


def unit_indicator(grid):
    return sample(radial(lambda r: np.where(r < 1.0, 1.0, 0.0)), grid)


def test_criterion_1_analytic_smoothing_values():
    """Half-order smoothing of the unit indicator on the line, h = 2^-8:
    value 4 at the origin and 2(sqrt(3)-1) at x=2, both within 1%."""
    tic = time.perf_counter()
    grid = make_grid(1, 4.0, 2048)  # spacing 2^-8
    # "at the origin" means the nearest lattice point: the kernel cell there
    # is integrated analytically, which is the scheme under test
    origin = tuple(grid.points[np.argmin(np.abs(grid.points[:, 0]))])
    out = fractional_integral(unit_indicator(grid), 0.5,
                              eval_points=[origin, (2.0,)])
    assert out[0] == pytest.approx(4.0, rel=1e-2)
    assert out[1] == pytest.approx(2.0 * (math.sqrt(3.0) - 1.0), rel=1e-2)
    assert time.perf_counter() - tic < 5.0


def test_criterion_2_pointwise_domination():
    """The maximal field stays below ladder_defect times the smoothing of
    |f| at every lattice point, for five functions in one and two
    dimensions."""
    tic = time.perf_counter()
    specs = ["indicator:1", "smooth:1", "singular:0.4", "indicator:1.8", "zero"]
    for dim, cells in ((1, 512), (2, 64)):
        defect = ladder_defect(0.5, dim)
        for spec in specs:
            if spec.startswith("singular") and dim == 2:
                spec = "singular:0.9"  # keep gamma < dim/p on the plane
            f = roster_function(spec, make_grid(dim, 4.0, cells), 2.0).f
            absf = dataclasses.replace(f, values=np.abs(f.values))
            big = fractional_integral(absf, 0.5)
            small = fractional_maximal(f, 0.5)
            assert np.all(small.values <= defect * big.values + 1e-12), (
                f"domination broken for {spec} in {dim}-D")
    assert time.perf_counter() - tic < 120.0


def test_criterion_3_weight_class_sanity():
    """Unit weight has characteristic 1 +/- 2%; the characteristic is
    bit-exact under amplitude rescaling; |y|^-1 is flagged out of A_2 by
    refinement drift."""
    grid = make_grid(1, 4.0, 512)
    fam = default_family(grid, centers_per_axis=5)
    exps = ExponentSet.from_p_alpha(2.0, 0.25, 1)
    unit = apq_characteristic(Weight.constant(), exps, fam, grid)
    assert unit.characteristic == pytest.approx(1.0, rel=2e-2)
    scaled = apq_characteristic(Weight.constant(7.5), exps, fam, grid)
    assert scaled.characteristic == unit.characteristic  # exact
    singular = ap_characteristic(Weight.power(-1.0), 2.0, fam, grid)
    assert singular.divergent
    assert not singular.in_class


def test_criterion_4_power_weight_instance():
    """The |y|^(1/q) instance at (p, alpha, lam, beta) = (2, 1/4, 0.3, 1):
    norm/closed-form ratio within [1/10, 10], origin constant
    (2/(n+beta))^(1/q) within 2%, fitted tail slope lam/p-(n+beta)/q within
    0.05, far-regime domination finite."""
    tic = time.perf_counter()
    cfg = ExperimentConfig(p=2.0, alpha=0.25, input_growth=0.3,
                           weight="power:0.25")
    rep = run_experiment("power-weight", cfg)
    assert rep.status == "pass"
    s = rep.summary
    assert 0.1 <= s["envelope_ratio_cap"] <= 10.0
    assert s["origin_expected"] == pytest.approx((2.0 / 2.0) ** 0.25, rel=1e-12)
    assert s["origin_ratio"] == pytest.approx(s["origin_expected"], rel=2e-2)
    assert s["tail_scaling_exponent"] == pytest.approx(
        0.3 / 2.0 - 2.0 / 4.0, abs=0.05)
    assert math.isfinite(s["far_domination_constant"])
    assert time.perf_counter() - tic < 60.0


def test_criterion_5_coupling_closed_form():
    """For a constant weight and power envelopes the coupling constant is
    1/(n/q - lam/p) = 10 within 3%, invariant under rescaling the radius
    ladder."""
    grid = make_grid(1, 4.0, 1024)
    fam = default_family(grid, centers_per_axis=5)
    phi, psi = Envelope.power_radial(0.3), Envelope.power_radial(0.6)
    rep = coupling_bound(phi, 2.0, psi, 4.0, Weight.constant(), fam, grid)
    assert rep.value == pytest.approx(10.0, rel=3e-2)
    rescaled = coupling_bound(phi, 2.0, psi, 4.0, Weight.constant(),
                              fam.with_radii(fam.radii * 1.7), grid)
    assert rescaled.value == pytest.approx(rep.value, rel=3e-2)


def test_criterion_6_local_estimate_stability():
    """Sup over the default family of the measured/majorant ratio is finite
    and drifts under 20% between spacings 2^-7 and 2^-8, for the three
    default roster functions."""
    tic = time.perf_counter()
    rep = run_experiment("local-estimate", ExperimentConfig(cells=2048))
    assert rep.status == "pass"
    per = rep.details["per_function"]
    assert len(per) == 3
    for name, entry in per.items():
        assert math.isfinite(entry["sup_ratio"]), name
        assert entry["drift"] < 0.20, name
    assert time.perf_counter() - tic < 300.0


def test_criterion_7_commutator_identities():
    """Constant-symbol commutators vanish to 1e-10; normalized commutator
    ratios are invariant under shifting the symbol; the oscillation
    seminorm is exactly 0 for constants and 1/2 +/- 5% for the unit step."""
    grid = make_grid(1, 4.0, 512)
    fam = default_family(grid, centers_per_axis=5)
    f = unit_indicator(grid)
    const_b = symbol_function("const:5", grid)
    assert np.max(np.abs(commutator_integral(const_b, f, 0.25).values)) < 1e-10
    base = ExperimentConfig(cells=512)
    plain = run_experiment("commutator-estimate", base)
    lifted = run_experiment("commutator-estimate",
                            dataclasses.replace(base, symbol="log:5"))
    for key, entry in plain.details["per_function"].items():
        assert lifted.details["per_function"][key]["sup_ratio"] == pytest.approx(
            entry["sup_ratio"], rel=1e-10, abs=1e-15), key
    assert bmo_seminorm(const_b, fam) == 0.0
    step = symbol_function("step", grid)
    assert bmo_seminorm(step, fam) == pytest.approx(0.5, rel=5e-2)


def test_criterion_8_vanishing_structure():
    """The indicator's modulus curve under phi = sqrt(r) follows 2 sqrt(r)
    within 5% over a decade and certifies decay; under phi = r it does not;
    the pinched-weight instance verifies end to end."""
    grid = make_grid(1, 4.0, 1024)
    fam = default_family(grid, centers_per_axis=5)
    f = unit_indicator(grid)
    rep = morrey_quasinorm(f, Envelope.power_radial(0.5), 1.0,
                           Weight.constant(), 1.0, fam)
    compared = 0
    for r, v in rep.modulus_curve:
        if 0.088 <= r <= 1.0001:
            assert v == pytest.approx(2.0 * math.sqrt(r), rel=5e-2)
            compared += 1
    assert compared >= 6
    knee = 1.0
    below = [v for r, v in rep.modulus_curve if r <= knee]
    assert vanishing_check(rep, threshold=0.85 * max(below), r_knee=knee)

    flat = morrey_quasinorm(f, Envelope.power_radial(1.0), 1.0,
                            Weight.constant(), 1.0, fam)
    below = [v for r, v in flat.modulus_curve if r <= knee]
    assert not vanishing_check(flat, threshold=0.85 * max(below), r_knee=knee)

    cfg = ExperimentConfig(weight="pinched:1:3",
                           roster=("indicator:1", "smooth:1", "singular:0.2"))
    assert run_experiment("boundedness", cfg).status == "pass"


def test_criterion_9_reproducibility():
    """Two full suite runs on one configuration render bit-identical report
    bodies."""
    cfg = ExperimentConfig(cells=512)
    first = [render_json(r.body()) for r in run_all(cfg)]
    second = [render_json(r.body()) for r in run_all(cfg)]
    assert first == second
