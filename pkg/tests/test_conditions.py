"""Tail integrals, coupling constants, and the ball-norm models they share.

The closed forms used as oracles: for w constant and phi = r^lam on the
line, the supremizing integrand is 2^(-1/q) t^(lam/p - n/q), so the tail
integral from delta is known exactly, and the coupling constant collapses
to 1/(n/q - lam/p) independent of the ball.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morreylab.conditions import (
    BallNormModel,
    coupling_bound,
    coupling_bound_with_log,
    supremizing_integrand,
    tail_integral,
    tail_integral_with_log,
)
from morreylab.family import default_family
from morreylab.grid import Ball, make_grid
from morreylab.morrey import Envelope
from morreylab.weights import Weight, weight_lq_norm


@pytest.fixture(scope="module")
def line():
    return make_grid(1, 4.0, 1024)


ORIGIN = [(0.0,)]


class TestTailIntegral:
    def test_constant_weight_closed_form(self, line):
        # integrand 2^(-1/4) t^(-0.1), integral from 1 = 10/2^(1/4)
        rep = tail_integral(Envelope.power_radial(0.3), 2.0,
                            Weight.constant(), 4.0, 1.0, ORIGIN, line)
        assert rep.value == pytest.approx(10.0 / 2.0 ** 0.25, rel=1e-4)
        assert rep.tail_method == "analytic"
        assert rep.tail_exponent == pytest.approx(-0.1, abs=1e-12)
        assert not rep.divergent and rep.passes

    def test_supercritical_growth_divergent(self, line):
        # lam/p = 1 beats n/q = 1/4: the tail exponent is positive
        rep = tail_integral(Envelope.power_radial(2.0), 2.0,
                            Weight.constant(), 4.0, 1.0, ORIGIN, line)
        assert rep.divergent
        assert rep.value == math.inf
        assert not rep.passes

    def test_critical_growth_divergent(self, line):
        # lam/p == n/q exactly: log-divergent, flagged by the zero exponent
        rep = tail_integral(Envelope.power_radial(0.5), 2.0,
                            Weight.constant(), 4.0, 1.0, ORIGIN, line)
        assert rep.divergent

    def test_rejects_nonpositive_delta(self, line):
        with pytest.raises(ValueError):
            tail_integral(Envelope.power_radial(0.3), 2.0,
                          Weight.constant(), 4.0, 0.0, ORIGIN, line)

    @settings(max_examples=15, deadline=None)
    @given(delta=st.floats(min_value=0.5, max_value=4.0))
    def test_shrinks_as_delta_grows(self, line, delta):
        phi = Envelope.power_radial(0.3)
        small = tail_integral(phi, 2.0, Weight.constant(), 4.0, delta,
                              ORIGIN, line)
        big = tail_integral(phi, 2.0, Weight.constant(), 4.0, 2.0 * delta,
                            ORIGIN, line)
        assert big.value < small.value

    def test_tabulated_weight_fitted_tail(self, line):
        """A flat tabulated weight with a declared zero tail exponent must
        reproduce the constant-weight value through the fitted path."""
        ones = np.ones(line.points.shape[0])
        wt = Weight.tabulated(line, ones, tail_exponent=0.0)
        rep = tail_integral(Envelope.power_radial(0.3), 2.0, wt, 2.0, 1.0,
                            ORIGIN, line)
        assert rep.tail_method == "truncated"
        assert rep.value == pytest.approx(2.0 ** -0.5 / 0.35, rel=1e-3)

    def test_undeclared_tabulated_weight_refused(self, line):
        ones = np.ones(line.points.shape[0])
        wt = Weight.tabulated(line, ones)
        with pytest.raises(ValueError, match="undeclared"):
            tail_integral(Envelope.power_radial(0.3), 2.0, wt, 2.0, 1.0,
                          ORIGIN, line)

    def test_undeclared_tabulated_envelope_refused(self, line):
        radii = np.geomspace(0.01, 8.0, 50)
        phi = Envelope.tabulated(radii, radii ** 0.3)
        with pytest.raises(ValueError, match="undeclared"):
            tail_integral(phi, 2.0, Weight.constant(), 4.0, 1.0, ORIGIN, line)


class TestWithLogFactor:
    def test_dominates_plain_and_witnesses_smallest_rung(self, line):
        phi = Envelope.power_radial(0.3)
        plain = tail_integral(phi, 2.0, Weight.constant(), 4.0, 1.0,
                              ORIGIN, line)
        logged = tail_integral_with_log(phi, 2.0, Weight.constant(), 4.0,
                                        1.0, ORIGIN, line)
        assert logged.value > plain.value
        # the rung sup grows as r shrinks, so the deepest rung wins
        assert logged.witness[1] == pytest.approx(1.0 / 2.0 ** 10)

    def test_deeper_ladder_only_grows(self, line):
        phi = Envelope.power_radial(0.3)
        shallow = tail_integral_with_log(phi, 2.0, Weight.constant(), 4.0,
                                         1.0, ORIGIN, line, ladder_depth=4)
        deep = tail_integral_with_log(phi, 2.0, Weight.constant(), 4.0,
                                      1.0, ORIGIN, line, ladder_depth=12)
        assert deep.value > shallow.value


class TestCouplingBound:
    def test_constant_weight_closed_form(self, line):
        # every ball gives the same ratio: 1/(n/q - lam/p) = 10
        fam = default_family(line, centers_per_axis=5)
        rep = coupling_bound(Envelope.power_radial(0.3), 2.0,
                             Envelope.power_radial(0.6), 4.0,
                             Weight.constant(), fam, line)
        assert rep.value == pytest.approx(10.0, rel=3e-2)
        assert rep.stable
        assert rep.passes

    def test_invariant_under_ladder_rescaling(self, line):
        fam = default_family(line, centers_per_axis=5)
        stretched = fam.with_radii(fam.radii * 1.7)
        a = coupling_bound(Envelope.power_radial(0.3), 2.0,
                           Envelope.power_radial(0.6), 4.0,
                           Weight.constant(), fam, line)
        b = coupling_bound(Envelope.power_radial(0.3), 2.0,
                           Envelope.power_radial(0.6), 4.0,
                           Weight.constant(), stretched, line)
        assert b.value == pytest.approx(a.value, rel=3e-2)

    def test_supercritical_growth_divergent(self, line):
        fam = default_family(line, centers_per_axis=3)
        rep = coupling_bound(Envelope.power_radial(0.6), 2.0,
                             Envelope.power_radial(1.2), 4.0,
                             Weight.constant(), fam, line)
        assert rep.divergent and not rep.passes

    def test_log_factor_dominates(self, line):
        fam = default_family(line, centers_per_axis=3)
        plain = coupling_bound(Envelope.power_radial(0.3), 2.0,
                               Envelope.power_radial(0.6), 4.0,
                               Weight.constant(), fam, line)
        logged = coupling_bound_with_log(Envelope.power_radial(0.3), 2.0,
                                         Envelope.power_radial(0.6), 4.0,
                                         Weight.constant(), fam, line)
        # ln(e + t/r) >= 1 pointwise under the integral
        assert logged.value >= plain.value


class TestBallNormModel:
    def test_origin_power_matches_quadrature(self, line):
        w = Weight.power(0.5)
        model = BallNormModel(w, 2.0, (0.0,), line)
        for t in (0.1, 0.2, 0.4):
            quad = weight_lq_norm(w, 2.0, Ball((0.0,), t), line)
            assert float(model(t)) == pytest.approx(quad, rel=5e-2)

    def test_far_regime_matches_quadrature(self, line):
        # x >= 3t: the geometric-mean surrogate tracks the true norm
        w = Weight.power(0.5)
        model = BallNormModel(w, 2.0, (1.5,), line)
        for t in (0.1, 0.2, 0.4):
            quad = weight_lq_norm(w, 2.0, Ball((1.5,), t), line)
            assert float(model(t)) == pytest.approx(quad, rel=5e-2)

    def test_near_regime_is_an_upper_envelope(self, line):
        # x < 3t: the model swallows the ball into B(0, x+t); it may be
        # loose there but must never undershoot the measured norm
        w = Weight.power(0.5)
        model = BallNormModel(w, 2.0, (0.25,), line)
        for t in (0.1, 0.2, 0.4):
            quad = weight_lq_norm(w, 2.0, Ball((0.25,), t), line)
            assert float(model(t)) >= 0.98 * quad

    def test_nonintegrable_power_rejected(self, line):
        with pytest.raises(ValueError, match="integrable"):
            BallNormModel(Weight.power(-0.6), 2.0, (0.0,), line)

    def test_supremizing_integrand_closed_form(self, line):
        got = supremizing_integrand(Envelope.power_radial(0.3), 2.0,
                                    Weight.constant(), 4.0, 1.0, ORIGIN, line)
        assert got == pytest.approx(2.0 ** -0.25, rel=1e-12)

    def test_supremizing_integrand_rejects_bad_radius(self, line):
        with pytest.raises(ValueError):
            supremizing_integrand(Envelope.power_radial(0.3), 2.0,
                                  Weight.constant(), 4.0, -1.0, ORIGIN, line)
