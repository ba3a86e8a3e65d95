import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from potrecon.bounds import (
    KStarResult,
    StabilityParams,
    omega,
    omega_and_kstar,
    theorem1_bound,
    theorem2_bound,
    unit_ball_volume,
)
from potrecon.errors import AttenuationModeError, TheoremHypothesisError

P = StabilityParams(eps=1e-3, m1=1.0)


def test_unit_ball_volumes():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)


def test_omega_closed_form_at_one():
    assert omega(1.0, P) == P.c1 * P.eps**2 + P.m1**2 / 4.0


@given(st.floats(min_value=0.1, max_value=1e3))
def test_omega_matches_its_definition(k):
    expected = P.c1 * k ** (P.n + 4) * P.eps**2 + P.m1**2 / (4.0 * k**2)
    assert omega(k, P) == pytest.approx(expected, rel=1e-15)


def test_kstar_formula_and_stationarity():
    star = omega_and_kstar(P)
    expected = (P.m1**2 / (2.0 * (P.n + 4) * P.c1 * P.eps**2)) ** (1.0 / (P.n + 6))
    assert star.k_star == pytest.approx(expected, rel=1e-14)
    assert star.k_eval == star.k_star  # interior minimum for these parameters
    assert star.omega_min == omega(star.k_eval, P)
    # stationarity of the tail bound at its minimizer
    h = 1e-6 * star.k_star
    slope = (omega(star.k_star + h, P) - omega(star.k_star - h, P)) / (2.0 * h)
    assert abs(slope) * star.k_star / star.omega_min < 1e-6


def test_kstar_boundary_condition_lands_on_one():
    """m1^2 = 2 (n+4) c1 eps^2 puts the unconstrained minimizer exactly at 1."""
    eps = 1e-3
    probe = StabilityParams(eps=eps, m1=1.0)
    m1 = math.sqrt(2.0 * (probe.n + 4) * probe.c1) * eps
    tuned = StabilityParams(eps=eps, m1=m1)
    star = omega_and_kstar(tuned)
    assert star.k_star == pytest.approx(1.0, rel=1e-12)
    assert star.k_eval == 1.0
    assert star.omega_min == pytest.approx(tuned.c1 * eps**2 + m1**2 / 4.0, rel=1e-14)


def test_kstar_clamps_to_admissible_range():
    smooth = StabilityParams(eps=1e-3, m1=0.0)
    star = omega_and_kstar(smooth)
    assert star.k_star == 0.0
    assert star.k_eval == 1.0
    assert star.omega_min == omega(1.0, smooth)


def test_kstar_result_iterates_as_pair():
    got = tuple(KStarResult(k_star=2.0, k_eval=2.0, omega_min=0.5))
    assert got == (2.0, 0.5)


def test_theorem1_regime_split():
    E = P.E
    low = theorem1_bound(0.9 * E, P)
    high = theorem1_bound(1.1 * E, P)
    assert low.regime == "b"
    assert high.regime == "a"
    assert low.E == E
    # combined statement dominates both regime-specific variants
    for rb in (low, high):
        assert rb.total >= rb.case_a
        assert rb.total >= rb.case_b


def test_theorem1_case_formulas():
    k = 12.0
    rb = theorem1_bound(k, P)
    E, n = P.E, P.n
    assert rb.case_a == pytest.approx(
        P.c1 * k ** (n + 4) * P.eps**2 + P.m1**2 / (1.0 + E**2 + 3.0 * k**2), rel=1e-15
    )
    assert rb.case_b == pytest.approx(
        P.c1 * E ** (n + 4) * P.eps**2
        + P.c2 * E ** (n + 2) * (P.eps + P.eps**3)
        + P.m1**2 / (1.0 + E**2 / P.diameter**2 + 4.0 * k**2),
        rel=1e-15,
    )


def test_case_a_improves_with_k_until_blowup():
    """Increasing stability: the case-a bound first falls with k, then the
    k^(n+4) amplification takes over."""
    ks = np.geomspace(1.5, 2000.0, 64)
    vals = np.array([theorem1_bound(float(k), P).case_a for k in ks])
    i_min = int(np.argmin(vals))
    assert 0 < i_min < len(ks) - 1
    assert np.all(np.diff(vals[: i_min + 1]) < 0.0)
    assert np.all(np.diff(vals[i_min:]) > 0.0)


def test_theorem2_monotone_in_b():
    ks = [2.0, 8.0, 20.0]
    bs = [0.25, 0.5, 1.0, 2.0, 4.0]
    for k in ks:
        vals = [theorem2_bound(k, P, b) for b in bs]
        assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))


def test_theorem2_formula():
    k, b = 9.0, 0.7
    E, n, D = P.E, P.n, P.diameter
    C = max(P.c1, P.c2)
    expected = (
        C * (k ** (n + 4) + E ** (n + 4)) * math.exp(2.0 * D * b) * P.eps**2
        + C * E ** (n + 4) * math.exp(D**2 * b) * P.eps
        + C * E ** (n + 2) * math.exp(D**2 * b) * P.eps
        + P.m1**2 / (1.0 + E**2 + 2.0 * k**2)
    )
    assert theorem2_bound(k, P, b) == pytest.approx(expected, rel=1e-15)


def test_theorem2_rejects_unattenuated():
    with pytest.raises(AttenuationModeError):
        theorem2_bound(5.0, P, 0.0)
    with pytest.raises(AttenuationModeError):
        theorem2_bound(5.0, P, -1.0)


def test_wavenumber_hypothesis():
    with pytest.raises(TheoremHypothesisError):
        theorem1_bound(1.0, P)
    with pytest.raises(TheoremHypothesisError):
        theorem2_bound(0.5, P, 1.0)
    with pytest.raises(TheoremHypothesisError):
        omega(0.0, P)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(eps=0.0, m1=1.0),
        dict(eps=1.0, m1=1.0),
        dict(eps=-0.5, m1=1.0),
        dict(eps=1e-3, m1=-1.0),
        dict(eps=1e-3, m1=1.0, n=1),
        dict(eps=1e-3, m1=1.0, radius=0.6),
        dict(eps=1e-3, m1=1.0, radius=0.0),
        dict(eps=1e-3, m1=1.0, trace_constant=0.5),
    ],
)
def test_parameter_hypotheses(kwargs):
    with pytest.raises(TheoremHypothesisError):
        StabilityParams(**kwargs)


def test_geometry_derived_quantities():
    assert P.diameter == 1.0
    assert P.E == pytest.approx(-math.log(1e-3))
    assert P.sigma_n == pytest.approx(math.pi)
    assert P.vol_n == pytest.approx(math.pi * 0.25)
    assert P.vol_nm1 == pytest.approx(2.0 * 0.5)
