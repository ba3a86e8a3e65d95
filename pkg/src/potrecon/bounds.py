"""A-priori stability bounds for the linearized potential problem.

All bounds control ||c||_{L^2}^2 through the boundary-data perturbation
level eps (operator-norm scale of the linearized boundary map) and an
a-priori smoothness bound ||c||_{H^1} <= M1, with E = -ln eps.  Domain
enters through D = 2 sup_{x in Omega} |x| <= 1, the n- and (n-1)-volumes,
and a trace constant C >= 1 collected into

    C1 = C^4 (Vol_n)^2  sigma_n 2^(n+2),
    C2 = C^4 (Vol_{n-1})^2 sigma_n (4 / D^(n-2)) [ (1 + 4 D^2)^(n/2) - (2D)^n ],

sigma_n the unit-ball volume.  Two regimes are tracked:

  case a (k > E):   C1 k^(n+4) eps^2 + M1^2 / (1 + E^2 + 3 k^2),
  case b (k <= E):  C1 E^(n+4) eps^2 + C2 E^(n+2) (eps + eps^3)
                                     + M1^2 / (1 + E^2/D^2 + 4 k^2),

and the combined statement (valid in both regimes, with C = max(C1, C2))

    C (k^(n+4) + E^(n+4)) eps^2 + C E^(n+2)(eps + eps^3) + M1^2/(1 + E^2 + 3 k^2).

The high-frequency tail of case a is summarized by

    omega(k) = C1 k^(n+4) eps^2 + M1^2 / (4 k^2),

minimized at k* = (M1^2 / (2 (n+4) C1 eps^2))^(1/(n+6)); for k* <= 1 the
admissible minimum sits at k = 1 with omega(1) = C1 eps^2 + M1^2/4.

With attenuation b > 0 the bound deteriorates exponentially in b:

    C (k^(n+4) + E^(n+4)) e^(2 D b) eps^2
      + C E^(n+4) e^(D^2 b) eps + C E^(n+2) e^(D^2 b) eps
      + M1^2 / (1 + E^2 + 2 k^2),

which is nondecreasing in b for fixed (k, eps, M1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AttenuationModeError, TheoremHypothesisError

__all__ = [
    "StabilityParams",
    "RegimeBound",
    "KStarResult",
    "theorem1_bound",
    "theorem2_bound",
    "omega",
    "omega_and_kstar",
    "unit_ball_volume",
]


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n: pi^{n/2} / Gamma(n/2 + 1)."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class StabilityParams:
    """Inputs to the stability bounds.

    The geometric quantities default to a ball of radius ``radius`` centered
    at the origin: D = 2 radius, Vol_n = sigma_n radius^n, and Vol_{n-1} the
    largest hyperplane projection, a ball of one dimension less.  The bounds
    require D <= 1, so the default radius is 0.5 (the experimental disk of
    radius 0.7 sits outside the hypotheses; pass radius explicitly to see
    the formulas' behavior there anyway at your own risk -- construction
    checks will refuse).
    """

    eps: float
    m1: float
    n: int = 2
    radius: float = 0.5
    trace_constant: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise TheoremHypothesisError(f"violated: n >= 2 (got n = {self.n})")
        if not (0.0 < self.eps < 1.0):
            raise TheoremHypothesisError(f"violated: 0 < eps < 1 (got eps = {self.eps})")
        if self.m1 < 0.0:
            raise TheoremHypothesisError(f"violated: M1 >= 0 (got M1 = {self.m1})")
        if self.radius <= 0.0:
            raise TheoremHypothesisError(f"violated: radius > 0 (got {self.radius})")
        if self.diameter > 1.0:
            raise TheoremHypothesisError(
                f"violated: D <= 1 (got D = {self.diameter}); use radius <= 0.5"
            )
        if self.trace_constant < 1.0:
            raise TheoremHypothesisError(
                f"violated: trace constant C >= 1 (got {self.trace_constant})"
            )

    # -- derived geometry ---------------------------------------------------

    @property
    def diameter(self) -> float:
        """D = 2 sup |x| over the ball."""
        return 2.0 * self.radius

    @property
    def sigma_n(self) -> float:
        return unit_ball_volume(self.n)

    @property
    def vol_n(self) -> float:
        return self.sigma_n * self.radius**self.n

    @property
    def vol_nm1(self) -> float:
        return unit_ball_volume(self.n - 1) * self.radius ** (self.n - 1)

    @property
    def E(self) -> float:
        return -math.log(self.eps)

    @property
    def c1(self) -> float:
        return (
            self.trace_constant**4 * self.vol_n**2 * self.sigma_n * 2.0 ** (self.n + 2)
        )

    @property
    def c2(self) -> float:
        D = self.diameter
        bracket = (1.0 + (2.0 * D) ** 2) ** (self.n / 2.0) - (2.0 * D) ** self.n
        return (
            self.trace_constant**4 * self.vol_nm1**2 * self.sigma_n
            * (4.0 / D ** (self.n - 2)) * bracket
        )


def _check_k(k: float) -> None:
    if k <= 1.0:
        raise TheoremHypothesisError(f"violated: k > 1 (got k = {k})")


@dataclass(frozen=True)
class RegimeBound:
    """Combined bound plus its two regime-split variants at one wavenumber."""

    k: float
    total: float
    case_a: float
    case_b: float
    regime: str                    # 'a' when k > E, else 'b'
    E: float


def theorem1_bound(k: float, p: StabilityParams) -> RegimeBound:
    """The unattenuated bound on ||c||_{L^2}^2 at wavenumber ``k``.

    ``total`` uses the combined three-term statement with C = max(C1, C2),
    which dominates whichever regime bound applies; the sharper case-a and
    case-b expressions are reported alongside.
    """
    _check_k(k)
    E, n = p.E, p.n
    c1, c2 = p.c1, p.c2
    eps, m1 = p.eps, p.m1

    case_a = c1 * k ** (n + 4) * eps**2 + m1**2 / (1.0 + E**2 + 3.0 * k**2)
    case_b = (
        c1 * E ** (n + 4) * eps**2
        + c2 * E ** (n + 2) * (eps + eps**3)
        + m1**2 / (1.0 + E**2 / p.diameter**2 + 4.0 * k**2)
    )
    C = max(c1, c2)
    total = (
        C * (k ** (n + 4) + E ** (n + 4)) * eps**2
        + C * E ** (n + 2) * (eps + eps**3)
        + m1**2 / (1.0 + E**2 + 3.0 * k**2)
    )
    return RegimeBound(
        k=float(k), total=total, case_a=case_a, case_b=case_b,
        regime="a" if k > E else "b", E=E,
    )


def theorem2_bound(k: float, p: StabilityParams, b: float) -> float:
    """The attenuated bound on ||c||_{L^2}^2; requires b > 0.

    Raises
    ------
    AttenuationModeError
        When ``b <= 0``: the unattenuated problem is governed by
        :func:`theorem1_bound`, and silently returning it would hide the
        modelling switch from the caller.
    """
    if b <= 0.0:
        raise AttenuationModeError(
            f"b = {b} is not an attenuated regime; call theorem1_bound for b = 0"
        )
    _check_k(k)
    E, n, D = p.E, p.n, p.diameter
    eps, m1 = p.eps, p.m1
    C = max(p.c1, p.c2)
    return (
        C * (k ** (n + 4) + E ** (n + 4)) * math.exp(2.0 * D * b) * eps**2
        + C * E ** (n + 4) * math.exp(D**2 * b) * eps
        + C * E ** (n + 2) * math.exp(D**2 * b) * eps
        + m1**2 / (1.0 + E**2 + 2.0 * k**2)
    )


def omega(k: float, p: StabilityParams) -> float:
    """High-frequency tail bound omega(k) = C1 k^(n+4) eps^2 + M1^2/(4 k^2)."""
    if k <= 0.0:
        raise TheoremHypothesisError(f"violated: k > 0 (got k = {k})")
    return p.c1 * k ** (p.n + 4) * p.eps**2 + p.m1**2 / (4.0 * k**2)


@dataclass(frozen=True)
class KStarResult:
    """Optimal wavenumber for the omega tail bound.

    ``k_star`` is the unconstrained minimizer; ``k_eval`` clamps it to the
    admissible range k >= 1 (for k* <= 1 the minimum over admissible k sits
    at k = 1); ``omega_min`` = omega(k_eval).
    """

    k_star: float
    k_eval: float
    omega_min: float

    def __iter__(self):
        yield self.k_star
        yield self.omega_min


def omega_and_kstar(p: StabilityParams) -> KStarResult:
    """Minimizer of omega: k* = (M1^2 / (2 (n+4) C1 eps^2))^(1/(n+6)).

    For M1 = 0 the tail term vanishes and omega is minimized at the left
    end of the admissible range, k = 1.
    """
    n = p.n
    k_star = (p.m1**2 / (2.0 * (n + 4) * p.c1 * p.eps**2)) ** (1.0 / (n + 6))
    k_eval = 1.0 if k_star <= 1.0 else k_star
    return KStarResult(k_star=k_star, k_eval=k_eval, omega_min=omega(k_eval, p))
