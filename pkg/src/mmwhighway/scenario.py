"""Road geometry, radio parameters and the derived constants they imply.

All quantities are stored and combined in linear units (metres, watts,
dimensionless ratios); dB conversions happen only at I/O boundaries.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

__all__ = [
    "BOLTZMANN_CONSTANT",
    "SPEED_OF_LIGHT",
    "DeploymentConfig",
    "LinkState",
    "RadioConfig",
    "RoadLayout",
    "ServingLink",
    "Side",
    "db_to_linear",
    "dbm_to_watts",
    "derive_intercepts",
    "derive_noise",
    "exclusion_radius_los",
    "exclusion_radius_nlos",
    "linear_to_db",
    "los_probability",
    "path_loss",
    "watts_to_dbm",
]

SPEED_OF_LIGHT = 299_792_458.0
BOLTZMANN_CONSTANT = 1.380_649e-23


class LinkState(Enum):
    LOS = "los"
    NLOS = "nlos"


class Side(Enum):
    UPPER = "upper"
    BOTTOM = "bottom"


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    if x <= 0:
        raise ValueError(f"cannot convert non-positive ratio {x} to dB")
    return 10.0 * math.log10(x)


def dbm_to_watts(x_dbm):
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def watts_to_dbm(x_w):
    return linear_to_db(x_w) + 30.0


def derive_intercepts(carrier_hz):
    """Free-space path gain at 1 m, used for both LOS and NLOS intercepts.

    Returns the pair (c_los, c_nlos), both equal to (c / 4 pi f)^2 in linear
    scale.
    """
    if carrier_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    amp = SPEED_OF_LIGHT / (4.0 * math.pi * carrier_hz)
    return amp * amp, amp * amp


def derive_noise(bandwidth_hz, tx_power_w, temperature_k=290.0):
    """Thermal noise power k*T*W normalized by the transmit power."""
    if bandwidth_hz <= 0 or tx_power_w <= 0 or temperature_k <= 0:
        raise ValueError("bandwidth, transmit power and temperature must be positive")
    return BOLTZMANN_CONSTANT * temperature_k * bandwidth_hz / tx_power_w


@dataclass(frozen=True)
class RoadLayout:
    """Lane geometry and per-lane blockage traffic intensities.

    ``obstacle_densities[i]`` is the density (vehicles per metre) of blockage
    lane ``i+1``; the same densities apply to both driving directions.
    ``blockage_width`` only matters to the Monte Carlo simulator, where a
    blockage occludes as a rectangle of this width; width 0 degenerates to
    the footprint segment on the lane axis, which is the regime the
    analytical model describes and the default for theory validation runs.
    """

    lane_width: float = 3.7
    n_obstacle_lanes: int = 1
    obstacle_densities: tuple = (1e-2,)
    blockage_length: float = 11.2
    blockage_width: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, "obstacle_densities", tuple(self.obstacle_densities)
        )
        if self.lane_width <= 0:
            raise ValueError("lane width must be positive")
        if self.n_obstacle_lanes < 1:
            raise ValueError("need at least one obstacle lane per direction")
        if len(self.obstacle_densities) != self.n_obstacle_lanes:
            raise ValueError(
                f"expected {self.n_obstacle_lanes} obstacle densities, "
                f"got {len(self.obstacle_densities)}"
            )
        if any(d < 0 for d in self.obstacle_densities):
            raise ValueError("obstacle densities must be non-negative")
        if self.blockage_length <= 0:
            raise ValueError("blockage footprint length must be positive")
        if self.blockage_width < 0:
            raise ValueError("blockage width must be non-negative")

    @property
    def half_width(self):
        """Distance from the road centre line to either side, w*(N_o+1)."""
        return self.lane_width * (self.n_obstacle_lanes + 1)

    def obstacle_lane_offsets(self):
        """Unsigned y offsets of the obstacle lane axes, lane 1..N_o."""
        return tuple(self.lane_width * k for k in range(1, self.n_obstacle_lanes + 1))


def los_probability(layout):
    """Probability that a given BS is unobstructed, independent of distance.

    Product over the obstacle lanes of the void probability of a footprint
    segment of length ``blockage_length`` centred on the connecting ray.
    """
    total = sum(layout.obstacle_densities)
    return math.exp(-layout.blockage_length * total)


@dataclass(frozen=True)
class RadioConfig:
    """Path loss, fading, antenna and power parameters (all linear units)."""

    carrier_hz: float
    alpha_los: float
    alpha_nlos: float
    c_los: float
    c_nlos: float
    nakagami_m: int
    beamwidth: float  # radians
    g_tx_main: float
    g_tx_side: float
    g_rx_main: float
    g_rx_side: float
    bandwidth_hz: float
    tx_power_w: float
    noise_sigma: float

    def __post_init__(self):
        if self.alpha_los <= 1:
            raise ValueError("LOS path loss exponent must exceed 1")
        if self.alpha_nlos < self.alpha_los:
            raise ValueError("NLOS exponent must be at least the LOS exponent")
        if not (self.c_los > 0 and self.c_nlos > 0):
            raise ValueError("path loss intercepts must be positive")
        if not (isinstance(self.nakagami_m, int) and self.nakagami_m >= 1):
            raise ValueError("fading shape m must be an integer >= 1")
        if not (0 < self.beamwidth < math.pi):
            raise ValueError("beamwidth must lie in (0, pi) radians")
        if not (self.g_tx_main > self.g_tx_side > 0):
            raise ValueError("require g_tx_main > g_tx_side > 0")
        if not (self.g_rx_main > self.g_rx_side > 0):
            raise ValueError("require g_rx_main > g_rx_side > 0")
        if self.bandwidth_hz <= 0 or self.tx_power_w <= 0:
            raise ValueError("bandwidth and transmit power must be positive")
        if self.noise_sigma <= 0:
            raise ValueError("normalized noise power must be positive")

    def alpha(self, state):
        return self.alpha_los if state is LinkState.LOS else self.alpha_nlos

    def intercept(self, state):
        return self.c_los if state is LinkState.LOS else self.c_nlos

    def validate_against(self, layout):
        """Reject configurations whose intercepts would allow path gain > 1.

        The nearest possible BS sits at the road half-width, so the model is
        only meaningful when w*(N_o+1) >= max(C_L^(1/a_L), C_N^(1/a_N)).
        """
        bound = max(
            self.c_los ** (1.0 / self.alpha_los),
            self.c_nlos ** (1.0 / self.alpha_nlos),
        )
        if layout.half_width < bound:
            raise ValueError(
                f"road half-width {layout.half_width:.3f} m is below the "
                f"intercept bound {bound:.3f} m; path gain would exceed 1"
            )


def make_radio_config(
    carrier_hz=28e9,
    alpha_los=2.8,
    alpha_nlos=4.0,
    nakagami_m=3,
    beamwidth_deg=30.0,
    g_tx_main_db=20.0,
    g_tx_side_db=-10.0,
    g_rx_main_db=10.0,
    g_rx_side_db=-10.0,
    bandwidth_hz=100e6,
    tx_power_dbm=27.0,
    temperature_k=290.0,
    c_los=None,
    c_nlos=None,
):
    """Build a RadioConfig from boundary units (dB, degrees, dBm).

    Intercepts default to the free-space value at 1 m for the given carrier.
    """
    auto_l, auto_n = derive_intercepts(carrier_hz)
    tx_power_w = dbm_to_watts(tx_power_dbm)
    return RadioConfig(
        carrier_hz=carrier_hz,
        alpha_los=alpha_los,
        alpha_nlos=alpha_nlos,
        c_los=auto_l if c_los is None else c_los,
        c_nlos=auto_n if c_nlos is None else c_nlos,
        nakagami_m=nakagami_m,
        beamwidth=math.radians(beamwidth_deg),
        g_tx_main=db_to_linear(g_tx_main_db),
        g_tx_side=db_to_linear(g_tx_side_db),
        g_rx_main=db_to_linear(g_rx_main_db),
        g_rx_side=db_to_linear(g_rx_side_db),
        bandwidth_hz=bandwidth_hz,
        tx_power_w=tx_power_w,
        noise_sigma=derive_noise(bandwidth_hz, tx_power_w, temperature_k),
    )


@dataclass(frozen=True)
class DeploymentConfig:
    """BS linear density, side split and the LOS/NLOS thinned densities."""

    lambda_bs: float
    p_los: float
    q: float = 0.5

    def __post_init__(self):
        if self.lambda_bs <= 0:
            raise ValueError("BS density must be positive")
        if not (0 < self.p_los <= 1):
            raise ValueError("LOS probability must lie in (0, 1]")
        if self.q != 0.5:
            # The side-averaged interference products hard-code the fair split.
            raise ValueError("only the symmetric side assignment q = 0.5 is supported")

    @classmethod
    def from_layout(cls, lambda_bs, layout, q=0.5):
        return cls(lambda_bs=lambda_bs, p_los=los_probability(layout), q=q)

    @property
    def p_nlos(self):
        return 1.0 - self.p_los

    @property
    def lambda_los(self):
        return self.p_los * self.lambda_bs

    @property
    def lambda_nlos(self):
        # Defined as the complement so the two densities sum exactly.
        return self.lambda_bs - self.lambda_los

    def density(self, state):
        return self.lambda_los if state is LinkState.LOS else self.lambda_nlos


def path_loss(r, state, radio, layout):
    """Distance-dependent channel gain C_E * r^(-alpha_E); at most 1."""
    if r < layout.half_width:
        raise ValueError(
            f"distance {r} m is inside the road half-width {layout.half_width} m"
        )
    return radio.intercept(state) * r ** (-radio.alpha(state))


def _matched_distance(r, alpha_from, c_from, alpha_to, c_to, half_width):
    # Distance at which a `to`-state BS matches the path gain of a
    # `from`-state BS at distance r.
    matched = (c_from / c_to * r ** (-alpha_from)) ** (-1.0 / alpha_to)
    return max(half_width, matched)


def exclusion_radius_los(r, radio, layout):
    """No LOS BS can be closer than this when a NLOS BS at r is serving."""
    return _matched_distance(
        r, radio.alpha_nlos, radio.c_nlos, radio.alpha_los, radio.c_los,
        layout.half_width,
    )


def exclusion_radius_nlos(r, radio, layout):
    """No NLOS BS can be closer than this when a LOS BS at r is serving."""
    return _matched_distance(
        r, radio.alpha_los, radio.c_los, radio.alpha_nlos, radio.c_nlos,
        layout.half_width,
    )


@dataclass(frozen=True)
class ServingLink:
    """Descriptor of the link between the user at the origin and its BS."""

    side: Side
    state: LinkState
    r1: float
    x1: float
    delta1: float

    @classmethod
    def at_distance(cls, r1, state, radio, layout, side=Side.UPPER):
        if r1 < layout.half_width:
            raise ValueError("serving distance below the road half-width")
        x1 = math.sqrt(max(r1 * r1 - layout.half_width**2, 0.0))
        return cls(
            side=side,
            state=state,
            r1=r1,
            x1=x1,
            delta1=radio.g_tx_main * radio.g_rx_main,
        )
