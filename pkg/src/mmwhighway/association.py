"""Nearest LOS/NLOS base-station distance laws and association probabilities.

The nearest-point densities have an integrable 1/sqrt singularity at the road
half-width; every integral here is therefore evaluated in the abscissa
variable t = sqrt(r^2 - w^2 (N_o+1)^2), where that singularity cancels and
the densities reduce to plain exponentials.
"""

import math
from dataclasses import dataclass

from .numerics import DEFAULT_QUADRATURE, integrate_semi_infinite
from .scenario import LinkState, exclusion_radius_los, exclusion_radius_nlos

__all__ = [
    "AssocResult",
    "association_probabilities",
    "association_probability_los_direct",
    "nearest_cdf",
    "nearest_pdf",
    "survival",
    "to_abscissa",
]


def to_abscissa(r, layout):
    """Road abscissa |x| of a roadside point at distance r from the origin."""
    hw = layout.half_width
    if r < hw:
        raise ValueError(f"distance {r} m is inside the road half-width {hw} m")
    return math.sqrt(r * r - hw * hw)


def to_distance(x, layout):
    """Distance from the origin of a roadside point at abscissa x."""
    return math.hypot(x, layout.half_width)


def nearest_pdf(r, state, dep, layout):
    """Density of the distance to the closest BS in the given LOS state."""
    hw = layout.half_width
    if r <= hw:
        raise ValueError(f"density undefined at or below the half-width {hw} m")
    lam = dep.density(state)
    if lam == 0.0:
        return 0.0
    b = to_abscissa(r, layout)
    return 2.0 * lam * r / b * math.exp(-2.0 * lam * b)


def survival(t, state, dep, layout):
    """Probability that no BS of the given state lies within distance t."""
    b = to_abscissa(t, layout)
    return math.exp(-2.0 * dep.density(state) * b)


def nearest_cdf(t, state, dep, layout):
    return 1.0 - survival(t, state, dep, layout)


@dataclass(frozen=True)
class AssocResult:
    p_los: float
    p_nlos: float


def _served_nlos_integrand(dep, radio, layout):
    lam_n = dep.lambda_nlos
    lam_l = dep.lambda_los
    hw = layout.half_width

    def f(t):
        r = math.hypot(t, hw)
        a_l = exclusion_radius_los(r, radio, layout)
        b_excl = math.sqrt(max(a_l * a_l - hw * hw, 0.0))
        return 2.0 * lam_n * math.exp(-2.0 * (lam_n * t + lam_l * b_excl))

    return f


def _served_los_integrand(dep, radio, layout):
    lam_n = dep.lambda_nlos
    lam_l = dep.lambda_los
    hw = layout.half_width

    def f(t):
        r = math.hypot(t, hw)
        a_n = exclusion_radius_nlos(r, radio, layout)
        b_excl = math.sqrt(max(a_n * a_n - hw * hw, 0.0))
        return 2.0 * lam_l * math.exp(-2.0 * (lam_l * t + lam_n * b_excl))

    return f


def association_probabilities(dep, radio, layout, quad=DEFAULT_QUADRATURE):
    """Probabilities of being served by a LOS or a NLOS BS.

    The NLOS probability is the integral of the nearest-NLOS density damped
    by the no-closer-LOS survival factor; the LOS probability is reported as
    its complement, which the model guarantees exactly.
    """
    if dep.lambda_nlos == 0.0:
        return AssocResult(p_los=1.0, p_nlos=0.0)
    p_nlos = integrate_semi_infinite(
        _served_nlos_integrand(dep, radio, layout), 0.0, quad
    )
    p_nlos = min(max(p_nlos, 0.0), 1.0)
    return AssocResult(p_los=1.0 - p_nlos, p_nlos=p_nlos)


def association_probability_los_direct(dep, radio, layout, quad=DEFAULT_QUADRATURE):
    """LOS association probability by its own integral (cross-check route)."""
    if dep.lambda_los == 0.0:
        return 0.0
    return integrate_semi_infinite(_served_los_integrand(dep, radio, layout), 0.0, quad)
