"""SINR outage probability, its closed-form simplifications and rate coverage.

The outage law combines the association probabilities with two conditional
coverage terms, each an alternating binomial sum of semi-infinite integrals
over the serving distance. At every quadrature node the interference
transform is re-evaluated with the beam geometry rebuilt from that node's
serving distance.
"""

import dataclasses
import math
import warnings
from dataclasses import dataclass
from enum import Enum

from .association import association_probabilities
from .interference import beam_geometry, laplace_interference
from .numerics import DEFAULT_QUADRATURE, integrate_semi_infinite
from .scenario import (
    DeploymentConfig,
    LinkState,
    ServingLink,
    Side,
    exclusion_radius_los,
    exclusion_radius_nlos,
)

__all__ = [
    "OutageQuery",
    "OutageVariant",
    "MAX_NAKAGAMI_M",
    "nakagami_v",
    "outage_probability",
    "p_cl",
    "p_cn",
    "rate_coverage",
]

# The alternating binomial sum loses digits as m grows; the artifact caps it.
MAX_NAKAGAMI_M = 10


class OutageVariant(Enum):
    FULL = "full"
    SIMPLIFIED_LOS_ONLY = "simplified_los_only"
    MEDIAN_DEPLOYMENT = "median_deployment"


@dataclass(frozen=True)
class OutageQuery:
    theta: float  # linear SINR threshold
    kappa: float = 0.0  # bit/s, only used by rate queries
    variant: OutageVariant = OutageVariant.FULL

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError("SINR threshold must be positive")
        if self.kappa < 0:
            raise ValueError("rate threshold must be non-negative")


def nakagami_v(m):
    """Exponent coefficient of the gamma-tail bound for a unit-mean fade."""
    if m < 1 or m != int(m):
        raise ValueError("fading shape m must be an integer >= 1")
    return m * math.factorial(m) ** (-1.0 / m)


def _conditional_coverage(
    theta,
    dep,
    radio,
    layout,
    state,
    include_far_survival=True,
    families=None,
    quad=DEFAULT_QUADRATURE,
):
    """P[SINR > theta and served in `state`], before complements.

    Evaluated as -sum_k (-1)^(m-k) C(m,k) I_k with the serving-distance
    integrals I_k done in the abscissa variable; compensated summation keeps
    the alternating sum stable.
    """
    if theta < 0:
        raise ValueError("SINR threshold must be non-negative")
    m = radio.nakagami_m
    if m > MAX_NAKAGAMI_M:
        raise ValueError(
            f"fading shape m={m} exceeds the supported maximum {MAX_NAKAGAMI_M}"
        )
    lam_e = dep.density(state)
    if lam_e == 0.0:
        return 0.0

    v = nakagami_v(m)
    alpha = radio.alpha(state)
    delta1 = radio.g_tx_main * radio.g_rx_main
    c_e = radio.intercept(state)
    sigma = radio.noise_sigma
    hw = layout.half_width
    other = LinkState.NLOS if state is LinkState.LOS else LinkState.LOS
    lam_other = dep.density(other)
    exclusion = (
        exclusion_radius_nlos if state is LinkState.LOS else exclusion_radius_los
    )

    def make_integrand(k):
        scale = v * theta * (m - k) / (delta1 * c_e)

        def integrand(t):
            weight = 2.0 * lam_e * math.exp(-2.0 * lam_e * t)
            if weight == 0.0:
                return 0.0
            r = math.hypot(t, hw)
            s = scale * r**alpha
            noise_factor = math.exp(-sigma * s)
            if noise_factor == 0.0:
                return 0.0
            link = ServingLink(
                side=Side.UPPER, state=state, r1=r, x1=t, delta1=delta1
            )
            li = laplace_interference(s, link, dep, radio, layout, families=families)
            val = weight * noise_factor * li
            if include_far_survival:
                a_other = exclusion(r, radio, layout)
                b_excl = math.sqrt(max(a_other * a_other - hw * hw, 0.0))
                val *= math.exp(-2.0 * lam_other * b_excl)
            return val

        return integrand

    terms = []
    for k in range(m):
        i_k = integrate_semi_infinite(make_integrand(k), 0.0, quad)
        terms.append((-1.0) ** (m - k) * math.comb(m, k) * i_k)
    return -math.fsum(terms)


def _clamped(value, bound, label):
    if value < -1e-4 or value > bound + 1e-4:
        warnings.warn(
            f"{label}={value:.6g} exceeds its probability bound [0, {bound:.6g}] "
            "by more than quadrature tolerance",
            stacklevel=3,
        )
    return min(max(value, 0.0), bound)


def p_cl(theta, dep, radio, layout, quad=DEFAULT_QUADRATURE, assoc=None):
    """Probability of no outage while served by a LOS BS."""
    if assoc is None:
        assoc = association_probabilities(dep, radio, layout, quad)
    value = _conditional_coverage(theta, dep, radio, layout, LinkState.LOS, quad=quad)
    return _clamped(value, assoc.p_los, "p_cl")


def p_cn(theta, dep, radio, layout, quad=DEFAULT_QUADRATURE, assoc=None):
    """Probability of no outage while served by a NLOS BS."""
    if assoc is None:
        assoc = association_probabilities(dep, radio, layout, quad)
    value = _conditional_coverage(theta, dep, radio, layout, LinkState.NLOS, quad=quad)
    return _clamped(value, assoc.p_nlos, "p_cn")


def _outage_full(theta, dep, radio, layout, quad):
    assoc = association_probabilities(dep, radio, layout, quad)
    cov_l = p_cl(theta, dep, radio, layout, quad, assoc)
    cov_n = p_cn(theta, dep, radio, layout, quad, assoc)
    return assoc.p_los - cov_l + assoc.p_nlos - cov_n


def _outage_simplified(theta, dep, radio, layout, quad):
    # NLOS service treated as negligible: no far-survival damping and the
    # LOS association mass taken as 1.
    cov = _conditional_coverage(
        theta, dep, radio, layout, LinkState.LOS,
        include_far_survival=False, quad=quad,
    )
    return 1.0 - cov


def _outage_median(theta, dep, radio, layout, quad):
    # BSs on the centre line: the stand-off halves and every BS is LOS;
    # interference collapses onto the single upper-LOS family.
    narrow = dataclasses.replace(layout, lane_width=layout.lane_width / 2.0)
    all_los = DeploymentConfig(lambda_bs=dep.lambda_bs, p_los=1.0, q=dep.q)
    cov = _conditional_coverage(
        theta, all_los, radio, narrow, LinkState.LOS,
        include_far_survival=False,
        families=((Side.UPPER, LinkState.LOS),),
        quad=quad,
    )
    return 1.0 - cov


def outage_probability(query, dep, radio, layout, quad=DEFAULT_QUADRATURE):
    """SINR outage probability P_T(theta) for the requested model variant."""
    if query.variant is OutageVariant.FULL:
        value = _outage_full(query.theta, dep, radio, layout, quad)
    elif query.variant is OutageVariant.SIMPLIFIED_LOS_ONLY:
        value = _outage_simplified(query.theta, dep, radio, layout, quad)
    elif query.variant is OutageVariant.MEDIAN_DEPLOYMENT:
        value = _outage_median(query.theta, dep, radio, layout, quad)
    else:
        raise ValueError(f"unknown outage variant {query.variant!r}")
    return min(max(value, 0.0), 1.0)


def rate_coverage(
    kappa,
    dep,
    radio,
    layout,
    variant=OutageVariant.FULL,
    quad=DEFAULT_QUADRATURE,
):
    """Probability that the Shannon rate W*log2(1+SINR) reaches kappa bit/s."""
    if kappa < 0:
        raise ValueError("rate threshold must be non-negative")
    theta = 2.0 ** (kappa / radio.bandwidth_hz) - 1.0
    if theta == 0.0:
        return 1.0
    query = OutageQuery(theta=theta, kappa=kappa, variant=variant)
    return 1.0 - outage_probability(query, dep, radio, layout, quad)
