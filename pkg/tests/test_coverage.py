import math

import numpy as np
import pytest

from mmwhighway.association import association_probabilities
from mmwhighway.coverage import (
    OutageQuery,
    OutageVariant,
    nakagami_v,
    outage_probability,
    p_cl,
    p_cn,
    rate_coverage,
)
from mmwhighway.numerics import QuadratureSpec
from mmwhighway.scenario import DeploymentConfig, RoadLayout, make_radio_config

FAST = QuadratureSpec(abs_tol=1e-7, rel_tol=1e-6)


@pytest.fixture
def layout():
    return RoadLayout(n_obstacle_lanes=1, obstacle_densities=(1e-2,))


@pytest.fixture
def radio():
    return make_radio_config()


@pytest.fixture
def dep(layout):
    return DeploymentConfig.from_layout(4e-3, layout)


class TestNakagamiV:
    def test_rayleigh(self):
        assert nakagami_v(1) == 1.0

    def test_m2(self):
        assert nakagami_v(2) == pytest.approx(2.0 / math.sqrt(2.0), rel=1e-12)

    def test_m3(self):
        assert nakagami_v(3) == pytest.approx(3.0 * 6.0 ** (-1.0 / 3.0), rel=1e-12)
        assert nakagami_v(3) == pytest.approx(1.6509636244473134, rel=1e-12)

    def test_non_integer_rejected(self):
        with pytest.raises(ValueError):
            nakagami_v(2.5)


class TestConditionalCoverage:
    def test_vanishing_threshold_recovers_association(self, layout, radio, dep):
        assoc = association_probabilities(dep, radio, layout, FAST)
        cov_l = p_cl(1e-12, dep, radio, layout, FAST, assoc)
        cov_n = p_cn(1e-12, dep, radio, layout, FAST, assoc)
        assert cov_l == pytest.approx(assoc.p_los, abs=1e-5)
        assert cov_n == pytest.approx(assoc.p_nlos, abs=1e-5)

    def test_huge_threshold_gives_zero(self, layout, radio, dep):
        assert p_cl(1e12, dep, radio, layout, FAST) == pytest.approx(0.0, abs=1e-6)
        assert p_cn(1e12, dep, radio, layout, FAST) == pytest.approx(0.0, abs=1e-6)

    def test_no_nlos_process(self, layout, radio):
        dep = DeploymentConfig(lambda_bs=4e-3, p_los=1.0)
        assert p_cn(1.0, dep, radio, layout, FAST) == 0.0

    def test_m_cap(self, layout, dep):
        radio = make_radio_config(nakagami_m=11)
        with pytest.raises(ValueError, match="m=11"):
            p_cl(1.0, dep, radio, layout, FAST)

    def test_rayleigh_reduction(self, layout, dep):
        # m=1 must reduce the alternating sum to the single positive term.
        radio = make_radio_config(nakagami_m=1)
        val = p_cl(1.0, dep, radio, layout, FAST)
        assert 0.0 < val < 1.0


class TestOutage:
    def test_query_validation(self):
        with pytest.raises(ValueError):
            OutageQuery(theta=0.0)
        with pytest.raises(ValueError):
            OutageQuery(theta=1.0, kappa=-1.0)

    def test_bounds_and_monotonicity(self, layout, radio, dep):
        grid_db = np.linspace(-10.0, 40.0, 50)
        values = [
            outage_probability(
                OutageQuery(theta=10.0 ** (t / 10.0)), dep, radio, layout, FAST
            )
            for t in grid_db
        ]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert all(b >= a - 1e-6 for a, b in zip(values, values[1:]))

    def test_simplified_variant_close_in_its_regime(self, layout):
        # Steep NLOS attenuation: the LOS-only simplification should track
        # the full law within a couple of hundredths.
        radio = make_radio_config(alpha_nlos=5.76)
        dep = DeploymentConfig.from_layout(4e-3, layout)
        for theta_db in (-5.0, 5.0, 12.0, 20.0):
            theta = 10.0 ** (theta_db / 10.0)
            full = outage_probability(OutageQuery(theta=theta), dep, radio,
                                      layout, FAST)
            simplified = outage_probability(
                OutageQuery(theta=theta, variant=OutageVariant.SIMPLIFIED_LOS_ONLY),
                dep, radio, layout, FAST,
            )
            assert abs(full - simplified) <= 2e-2

    def test_median_variant_bounds(self, layout, radio, dep):
        for theta_db in (0.0, 10.0, 25.0):
            val = outage_probability(
                OutageQuery(theta=10.0 ** (theta_db / 10.0),
                            variant=OutageVariant.MEDIAN_DEPLOYMENT),
                dep, radio, layout, FAST,
            )
            assert 0.0 <= val <= 1.0

    def test_median_variant_beats_side_deployment(self, layout, radio, dep):
        # Halved stand-off and no NLOS service: outage can only improve at
        # moderate thresholds.
        theta = 10.0 ** 1.0
        full = outage_probability(OutageQuery(theta=theta), dep, radio, layout, FAST)
        median = outage_probability(
            OutageQuery(theta=theta, variant=OutageVariant.MEDIAN_DEPLOYMENT),
            dep, radio, layout, FAST,
        )
        assert median <= full + 1e-6


class TestRateCoverage:
    def test_identity_with_outage(self, layout, radio, dep):
        kappa = 4.2e8
        theta = 2.0 ** (kappa / radio.bandwidth_hz) - 1.0
        rc = rate_coverage(kappa, dep, radio, layout, quad=FAST)
        pt = outage_probability(OutageQuery(theta=theta), dep, radio, layout, FAST)
        assert rc + pt == pytest.approx(1.0, abs=1e-12)

    def test_bandwidth_point(self, layout, radio, dep):
        # kappa = W means theta = 1 exactly.
        rc = rate_coverage(radio.bandwidth_hz, dep, radio, layout, quad=FAST)
        pt = outage_probability(OutageQuery(theta=1.0), dep, radio, layout, FAST)
        assert rc == pytest.approx(1.0 - pt, abs=1e-12)

    def test_zero_rate(self, layout, radio, dep):
        assert rate_coverage(0.0, dep, radio, layout, quad=FAST) == 1.0

    def test_nonincreasing_in_rate(self, layout, radio, dep):
        kappas = np.linspace(0.0, 1.2e9, 9)
        vals = [rate_coverage(k, dep, radio, layout, quad=FAST) for k in kappas]
        assert all(a >= b - 1e-6 for a, b in zip(vals, vals[1:]))

    def test_negative_rate_rejected(self, layout, radio, dep):
        with pytest.raises(ValueError):
            rate_coverage(-1.0, dep, radio, layout)
