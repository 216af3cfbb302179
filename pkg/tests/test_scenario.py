import math

import numpy as np
import pytest

from mmwhighway.scenario import (
    DeploymentConfig,
    LinkState,
    RadioConfig,
    RoadLayout,
    ServingLink,
    Side,
    db_to_linear,
    dbm_to_watts,
    derive_intercepts,
    derive_noise,
    exclusion_radius_los,
    exclusion_radius_nlos,
    linear_to_db,
    los_probability,
    make_radio_config,
    path_loss,
    watts_to_dbm,
)


@pytest.fixture
def layout():
    return RoadLayout(n_obstacle_lanes=1, obstacle_densities=(1e-2,))


@pytest.fixture
def radio():
    return make_radio_config()


class TestConversions:
    def test_db_basics(self):
        assert db_to_linear(0.0) == 1.0
        assert db_to_linear(10.0) == 10.0

    def test_round_trip(self):
        for x in (-37.0, -3.2, 0.0, 12.5, 60.0):
            assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-12)

    def test_dbm(self):
        assert dbm_to_watts(27.0) == pytest.approx(0.5011872336272722, rel=1e-12)
        assert watts_to_dbm(dbm_to_watts(14.0)) == pytest.approx(14.0, abs=1e-12)


class TestDerivedConstants:
    def test_intercept_28ghz(self):
        c_l, c_n = derive_intercepts(28e9)
        assert c_l == c_n
        assert linear_to_db(c_l) == pytest.approx(-61.39094384872776, abs=1e-9)

    def test_intercept_fixed_point(self):
        f = 299792458.0 / (4.0 * math.pi)
        c_l, _ = derive_intercepts(f)
        assert c_l == pytest.approx(1.0, rel=1e-12)

    def test_intercept_doubling(self):
        lo, _ = derive_intercepts(14e9)
        hi, _ = derive_intercepts(28e9)
        assert linear_to_db(lo) - linear_to_db(hi) == pytest.approx(
            20.0 * math.log10(2.0), abs=1e-9
        )

    def test_noise_dbm(self):
        sigma = derive_noise(100e6, tx_power_w=1.0)
        assert watts_to_dbm(sigma) == pytest.approx(-93.97518719422811, abs=1e-8)

    def test_noise_unity(self):
        ktw = 1.380649e-23 * 290.0 * 100e6
        assert derive_noise(100e6, tx_power_w=ktw) == pytest.approx(1.0, rel=1e-12)

    def test_noise_at_27dbm(self):
        sigma = derive_noise(100e6, tx_power_w=dbm_to_watts(27.0))
        assert sigma == pytest.approx(10 ** ((-93.97518719422811 - 27.0) / 10.0),
                                      rel=1e-8)


class TestRoadLayout:
    def test_half_width(self, layout):
        assert layout.half_width == pytest.approx(7.4)
        assert layout.obstacle_lane_offsets() == (3.7,)

    def test_two_lane_offsets(self):
        two = RoadLayout(n_obstacle_lanes=2, obstacle_densities=(1e-2, 2e-2))
        assert two.half_width == pytest.approx(11.1)
        assert two.obstacle_lane_offsets() == (3.7, 7.4)

    def test_validation(self):
        with pytest.raises(ValueError):
            RoadLayout(lane_width=0.0)
        with pytest.raises(ValueError):
            RoadLayout(n_obstacle_lanes=0, obstacle_densities=())
        with pytest.raises(ValueError):
            RoadLayout(n_obstacle_lanes=2, obstacle_densities=(1e-2,))
        with pytest.raises(ValueError):
            RoadLayout(obstacle_densities=(-1e-3,))
        with pytest.raises(ValueError):
            RoadLayout(blockage_length=0.0)


class TestLosProbability:
    def test_no_blockages(self):
        empty = RoadLayout(n_obstacle_lanes=2, obstacle_densities=(0.0, 0.0))
        assert los_probability(empty) == 1.0

    def test_table_traffic(self):
        two = RoadLayout(n_obstacle_lanes=2, obstacle_densities=(1e-2, 2e-2))
        assert los_probability(two) == pytest.approx(math.exp(-0.336), rel=1e-12)
        assert los_probability(two) == pytest.approx(0.7146231058160573, rel=1e-12)

    def test_long_footprint_limit(self):
        huge = RoadLayout(blockage_length=1e9)
        assert los_probability(huge) == pytest.approx(0.0, abs=1e-300)

    def test_multiplicative_over_lanes(self):
        a = RoadLayout(obstacle_densities=(1.3e-2,))
        b = RoadLayout(obstacle_densities=(0.7e-2,))
        both = RoadLayout(n_obstacle_lanes=2, obstacle_densities=(1.3e-2, 0.7e-2))
        assert los_probability(both) == pytest.approx(
            los_probability(a) * los_probability(b), rel=1e-12
        )


class TestRadioConfig:
    def test_validity_condition_rejects(self, layout):
        # Intercept bound above the half-width: gain would exceed 1 at the
        # nearest possible BS.
        with pytest.raises(ValueError, match="half-width"):
            make_radio_config(c_los=8.0**2.8, c_nlos=8.0**4.0).validate_against(layout)

    def test_defaults_valid(self, layout, radio):
        radio.validate_against(layout)

    def test_invariants(self):
        with pytest.raises(ValueError):
            make_radio_config(alpha_los=0.9)
        with pytest.raises(ValueError):
            make_radio_config(alpha_los=3.0, alpha_nlos=2.8)
        with pytest.raises(ValueError):
            make_radio_config(beamwidth_deg=180.0)
        with pytest.raises(ValueError):
            make_radio_config(g_tx_main_db=-20.0)  # below the sidelobe
        with pytest.raises(ValueError):
            make_radio_config(nakagami_m=0)

    def test_state_accessors(self, radio):
        assert radio.alpha(LinkState.LOS) == 2.8
        assert radio.alpha(LinkState.NLOS) == 4.0
        assert radio.intercept(LinkState.LOS) == radio.c_los


class TestDeployment:
    def test_derived_densities_exact(self, layout):
        dep = DeploymentConfig.from_layout(4e-3, layout)
        assert dep.p_los == los_probability(layout)
        assert dep.p_nlos == 1.0 - dep.p_los
        assert dep.lambda_los + dep.lambda_nlos == dep.lambda_bs

    def test_q_fixed(self, layout):
        with pytest.raises(ValueError):
            DeploymentConfig.from_layout(4e-3, layout, q=0.3)

    def test_bad_density(self):
        with pytest.raises(ValueError):
            DeploymentConfig(lambda_bs=0.0, p_los=0.9)


class TestPathLoss:
    def test_unit_gain_at_intercept_distance(self):
        # Configuration built so the intercept distance equals the
        # half-width, the boundary the validity condition allows.
        layout = RoadLayout(n_obstacle_lanes=1)
        radio = make_radio_config(c_los=7.4**2.8, c_nlos=7.4**4.0)
        radio.validate_against(layout)
        assert path_loss(7.4, LinkState.LOS, radio, layout) == pytest.approx(
            1.0, rel=1e-12
        )
        assert path_loss(7.4, LinkState.NLOS, radio, layout) == pytest.approx(
            1.0, rel=1e-12
        )

    def test_direct_evaluation(self, layout, radio):
        expected = radio.c_los * 100.0**-2.8
        assert path_loss(100.0, LinkState.LOS, radio, layout) == pytest.approx(
            expected, rel=1e-12
        )

    def test_nlos_below_los(self, layout):
        radio = make_radio_config(c_los=1e-3, c_nlos=1e-3)
        for r in (7.4, 20.0, 500.0):
            assert path_loss(r, LinkState.NLOS, radio, layout) < path_loss(
                r, LinkState.LOS, radio, layout
            )

    def test_strictly_decreasing(self, layout, radio):
        rs = np.linspace(7.4, 2000.0, 200)
        for state in LinkState:
            vals = [path_loss(r, state, radio, layout) for r in rs]
            assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain(self, layout, radio):
        with pytest.raises(ValueError):
            path_loss(7.0, LinkState.LOS, radio, layout)


class TestExclusionRadii:
    @pytest.fixture
    def equal_intercepts(self):
        return make_radio_config(c_los=1e-4, c_nlos=1e-4)

    def test_hand_values(self, layout, equal_intercepts):
        assert exclusion_radius_nlos(10.0, equal_intercepts, layout) == pytest.approx(
            7.4
        )  # max(7.4, 10^0.7 = 5.01)
        assert exclusion_radius_los(10.0, equal_intercepts, layout) == pytest.approx(
            10.0 ** (4.0 / 2.8), rel=1e-12
        )

    def test_symmetric_case(self, layout):
        radio = make_radio_config(c_los=1e-4, c_nlos=1e-4, alpha_los=2.8,
                                  alpha_nlos=2.8)
        r = layout.half_width
        assert exclusion_radius_los(r, radio, layout) == pytest.approx(r)
        assert exclusion_radius_nlos(r, radio, layout) == pytest.approx(r)

    def test_floor_at_half_width(self, layout, equal_intercepts):
        for r in np.linspace(7.4, 3000, 50):
            assert exclusion_radius_los(r, equal_intercepts, layout) >= 7.4
            assert exclusion_radius_nlos(r, equal_intercepts, layout) >= 7.4

    def test_composition_identity(self, layout, radio):
        # Power-law branches invert each other exactly; the half-width floor
        # can only push the composition upward.
        rng = np.random.default_rng(5)
        hw = layout.half_width
        for r in rng.uniform(hw, 5000.0, 1000):
            a_n = exclusion_radius_nlos(r, radio, layout)
            back = exclusion_radius_los(a_n, radio, layout)
            assert back >= r - 1e-9 * r
            if a_n > hw and back > hw:
                assert back == pytest.approx(r, rel=1e-9)


class TestServingLink:
    def test_at_distance(self, layout, radio):
        link = ServingLink.at_distance(12.5, LinkState.LOS, radio, layout)
        assert link.x1 == pytest.approx(math.sqrt(12.5**2 - 7.4**2), rel=1e-12)
        assert link.delta1 == pytest.approx(radio.g_tx_main * radio.g_rx_main)
        assert link.side is Side.UPPER

    def test_below_half_width(self, layout, radio):
        with pytest.raises(ValueError):
            ServingLink.at_distance(7.0, LinkState.LOS, radio, layout)
