"""Downlink coverage analysis of mmWave highway networks with vehicular blockages.

Analytical engine (nearest-BS distance laws, interference Laplace transforms,
SINR outage and rate coverage) plus an event-level Monte Carlo simulator used
to cross-validate it.
"""

from .scenario import (
    BOLTZMANN_CONSTANT,
    SPEED_OF_LIGHT,
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
    path_loss,
)
from .association import (
    AssocResult,
    association_probabilities,
    nearest_pdf,
    survival,
    to_abscissa,
)
from .coverage import (
    OutageQuery,
    OutageVariant,
    nakagami_v,
    outage_probability,
    p_cl,
    p_cn,
    rate_coverage,
)
from .interference import (
    BeamGeometry,
    GainSegment,
    beam_geometry,
    gain_segments,
    laplace_interference,
    laplace_segment,
    laplace_side_state,
)
from .numerics import (
    NumericalError,
    QuadratureSpec,
    gamma_fn,
    hyp2f1,
    hyp2f1_regularized,
    integrate_finite,
    integrate_semi_infinite,
)
from .mcsim import (
    Estimate,
    SimConfig,
    Snapshot,
    blockage_event_stats,
    estimate_association,
    estimate_outage,
    estimate_outage_grid,
    estimate_rate_coverage,
    is_los,
    sample_ppp_1d,
    snapshot_sinr,
)

__version__ = "0.1.0"
