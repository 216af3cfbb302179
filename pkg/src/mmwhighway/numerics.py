"""Special functions and adaptive quadrature used by the analytical engine.

All functions are pure and reentrant: no module state, no caching, safe to
call from any number of concurrent callers.
"""

import math
import warnings
from dataclasses import dataclass

import scipy.integrate

__all__ = [
    "NumericalError",
    "QuadratureSpec",
    "gamma_fn",
    "hyp2f1",
    "hyp2f1_regularized",
    "integrate_finite",
    "integrate_semi_infinite",
]

_MAX_SERIES_TERMS = 2000


class NumericalError(ArithmeticError):
    """A numerical routine failed to reach its accuracy target.

    ``partial`` carries the best available estimate when one exists.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy budget and truncation rule for the adaptive quadratures.

    ``truncation_policy`` names the map used to fold ``[a, inf)`` onto a
    finite interval; only the rational map ``r = a + u/(1-u)`` is provided.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-7
    max_subdivisions: int = 200
    truncation_policy: str = "rational"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")
        if self.truncation_policy != "rational":
            raise ValueError(f"unknown truncation policy {self.truncation_policy!r}")


DEFAULT_QUADRATURE = QuadratureSpec()


def gamma_fn(x):
    """Gamma function for positive real arguments."""
    if x <= 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def _hyp2f1_series(a, b, c, z):
    """Direct power series; reliable for |z| < ~0.9."""
    term = 1.0
    total = 1.0
    for k in range(_MAX_SERIES_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        new_total = total + term
        if new_total == total and abs(term) <= 1e-16 * max(abs(total), 1.0):
            return total
        total = new_total
    raise NumericalError(
        f"hypergeometric series did not converge for z={z}", partial=total
    )


def _hyp2f1_near_one(a, b, c, z):
    """Linear transformation in terms of 1 - z, for z close to 1.

    Requires c - a - b away from an integer; the ``z = 1/(s*delta*C*x + 1)``
    arguments arising here always satisfy that since the path loss exponents
    exceed 1.
    """
    s = c - a - b
    if abs(s - round(s)) < 1e-8:
        raise NumericalError(
            f"hyp2f1 transformation ill-conditioned: c-a-b={s} near integer"
        )
    g = math.gamma
    one = g(c) * g(s) / (g(c - a) * g(c - b)) * _hyp2f1_series(a, b, 1.0 - s, 1.0 - z)
    two = (
        (1.0 - z) ** s
        * g(c)
        * g(-s)
        / (g(a) * g(b))
        * _hyp2f1_series(c - a, c - b, 1.0 + s, 1.0 - z)
    )
    return one + two


def hyp2f1(a, b, c, z):
    """Gauss hypergeometric function for real arguments with z <= 1.

    Strategy: direct series for |z| < 0.9, the 1-z linear transformation for
    z in [0.9, 1), the Gauss summation at z = 1, and a Pfaff transformation
    mapping z <= -0.9 into (0, 1).
    """
    if c <= 0 and c == round(c):
        raise ValueError(f"hyp2f1 undefined for non-positive integer c={c}")
    if z > 1.0:
        raise ValueError(f"hyp2f1 requires z <= 1 on the real line, got {z}")
    if z == 0.0:
        return 1.0
    if z == 1.0:
        if c - a - b <= 0:
            raise ValueError("hyp2f1 diverges at z=1 when c-a-b <= 0")
        g = math.gamma
        return g(c) * g(c - a - b) / (g(c - a) * g(c - b))
    if z <= -0.9:
        # Pfaff: 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1))
        return (1.0 - z) ** (-a) * hyp2f1(a, c - b, c, z / (z - 1.0))
    if z >= 0.9:
        return _hyp2f1_near_one(a, b, c, z)
    return _hyp2f1_series(a, b, c, z)


def hyp2f1_regularized(a, b, c, z):
    """Regularized Gauss hypergeometric function 2F1(a,b;c;z) / Gamma(c)."""
    if c <= 0:
        raise ValueError(f"regularized hyp2f1 requires c > 0 here, got {c}")
    return hyp2f1(a, b, c, z) / math.gamma(c)


def _run_quad(func, lo, hi, spec, label):
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.integrate.IntegrationWarning)
        try:
            value, _ = scipy.integrate.quad(
                func,
                lo,
                hi,
                epsabs=spec.abs_tol,
                epsrel=spec.rel_tol,
                limit=spec.max_subdivisions,
            )
        except scipy.integrate.IntegrationWarning as exc:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                value, _ = scipy.integrate.quad(
                    func,
                    lo,
                    hi,
                    epsabs=spec.abs_tol,
                    epsrel=spec.rel_tol,
                    limit=spec.max_subdivisions,
                )
            raise NumericalError(
                f"{label}: {exc} (partial estimate {value!r})", partial=value
            ) from exc
    return value


def integrate_finite(f, a, b, spec=DEFAULT_QUADRATURE):
    """Adaptive quadrature of ``f`` over the finite interval [a, b]."""
    if a > b:
        raise ValueError(f"integrate_finite requires a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0
    return _run_quad(f, a, b, spec, "integrate_finite")


def integrate_semi_infinite(f, a, spec=DEFAULT_QUADRATURE):
    """Adaptive quadrature of ``f`` over [a, inf).

    The interval is folded onto [0, 1) with the rational substitution
    r = a + u/(1-u); the integrands used in this package all decay
    exponentially, which keeps the folded integrand bounded.
    """

    def folded(u):
        du = 1.0 - u
        r = a + u / du
        fr = f(r)
        if fr == 0.0:
            return 0.0
        return fr / (du * du)

    return _run_quad(folded, 0.0, 1.0, spec, "integrate_semi_infinite")
