"""Top-level acceptance checks for the reconstruction toolkit.

Each test is one pass/fail property of the finished package, ordered
roughly along the pipeline: probe algebra, attenuation, the forward
solver, measurement consistency, coefficient recovery, synthesis
behavior across truncation radii / wavenumbers / angular coverage, the
stability bounds, and determinism.  The two probe sweeps that several
tests share are module-scoped fixtures so the whole file stays within an
interactive budget (about a minute).
"""

import math

import numpy as np
import pytest
from scipy.special import j1

import potrecon as pr
from potrecon.bounds import StabilityParams, omega, omega_and_kstar, theorem2_bound
from potrecon.measurement import synthesize_measurement
from potrecon.potentials import (
    FOUR_BUMPS,
    TWO_BUMPS,
    constant_potential,
    four_bumps,
    gaussian_mixture,
    single_bump,
    two_bumps,
)
from potrecon.reconstruction import (
    band_relative_error,
    error_metrics,
    fourier_coefficient,
    run_algorithm1,
    synthesize,
)
from potrecon.solver import assemble, solve_dirichlet
from potrecon.waves import attenuated_Y, eval_probe, make_wave_pair

K_REF = 15.2
Y_HAT = np.array([-0.17, 0.98]) / np.hypot(-0.17, 0.98)


@pytest.fixture(scope="module")
def grid200():
    return pr.build_grid(200, 1.0, 0.7)


@pytest.fixture(scope="module")
def boundary200(grid200):
    return pr.boundary_nodes(grid200, 256)


@pytest.fixture(scope="module")
def inv90():
    return pr.build_grid(90, 1.0, 0.7)


@pytest.fixture(scope="module")
def case1_truth(inv90):
    return gaussian_mixture(inv90.interior_xy, TWO_BUMPS)


@pytest.fixture(scope="module")
def case1_sweep(grid200, inv90):
    """Reference sweep: two-bump subject, k = 15.2, probes out to 3k."""
    return run_algorithm1(
        grid200, two_bumps(grid200), pr.build_sampling(), K_REF, m=3.0,
        mode="full", seed=11, inversion_grid=inv90,
        truth_fn=lambda pts: gaussian_mixture(pts, TWO_BUMPS),
        workers=2,
    )


@pytest.fixture(scope="module")
def case1_sweep_coarse(inv90):
    grid = pr.build_grid(100, 1.0, 0.7)
    return run_algorithm1(
        grid, two_bumps(grid), pr.build_sampling(), K_REF, m=3.0,
        mode="full", seed=11, inversion_grid=inv90,
        truth_fn=lambda pts: gaussian_mixture(pts, TWO_BUMPS),
        workers=2,
    )


def test_01_wave_pair_algebra():
    """zeta.zeta = k^2 - ikb and zeta + zeta* = xi over random draws."""
    rng = np.random.default_rng(123)
    n = 10_000
    kappas = rng.uniform(1e-3, 60.0, n)
    thetas = rng.uniform(0.0, 2.0 * np.pi, n)
    ks = rng.uniform(0.5, 30.0, n)
    bs = rng.uniform(0.0, 4.0, n)
    bs[: n // 4] = 0.0  # exercise the unattenuated branch explicitly
    for kappa, theta, k, b in zip(kappas, thetas, ks, bs):
        xi = np.array([kappa * np.cos(theta), kappa * np.sin(theta)])
        pair = make_wave_pair(xi, k, b)
        target = complex(k * k, -k * b)
        dot = pair.zeta[0] ** 2 + pair.zeta[1] ** 2
        assert abs(dot - target) <= 1e-12 * abs(target)
        total = np.array(
            [pair.zeta[0] + pair.zeta_star[0], pair.zeta[1] + pair.zeta_star[1]]
        )
        assert np.max(np.abs(total - xi)) <= 1e-12 * max(kappa, 1.0)
        if b == 0.0:
            # real pair below 2k, purely imaginary transverse part above
            if kappa < 2.0 * k:
                assert pair.mu.imag == 0.0
                assert pair.mu.real == pytest.approx(
                    math.sqrt(k * k - kappa * kappa / 4.0), rel=1e-12
                )
            elif kappa > 2.0 * k:
                assert pair.mu.real == 0.0
                assert pair.mu.imag == pytest.approx(
                    math.sqrt(kappa * kappa / 4.0 - k * k), rel=1e-12
                )


def test_02_attenuation_regime():
    """|Y| <= b with zero tolerance in the band; explicit form when evanescent."""
    rng = np.random.default_rng(321)
    n = 10_000
    ks = rng.uniform(0.5, 30.0, n)
    bs = rng.uniform(1e-6, 5.0, n)
    in_band = rng.uniform(0.0, 1.0, n) * np.sqrt(3.0) * ks
    for kappa, k, b in zip(in_band, ks, bs):
        y = attenuated_Y(kappa, k, b)
        assert y <= 0.0
        assert -y <= b
    ratios = rng.uniform(2.0 + 1e-9, 8.0, n)
    for ratio, k, b in zip(ratios, ks, bs):
        kappa = ratio * k
        gap = 0.5 * kappa * kappa - 2.0 * k * k
        expected = -0.5 * math.sqrt(gap + math.sqrt(gap * gap + 4.0 * k * k * b * b))
        assert attenuated_Y(kappa, k, b) == pytest.approx(expected, rel=1e-12)


def test_03_forward_convergence(grid200):
    """c = 0 probe solve: small at 200^2 and second order under refinement."""
    pair = make_wave_pair(np.array([K_REF * math.sqrt(2.0), 0.0]), K_REF)

    def interior_error(grid):
        system = assemble(grid, None, K_REF, 0.0)
        u = solve_dirichlet(system, lambda pts: eval_probe(pair, pts))
        exact = eval_probe(pair, grid.interior_xy)
        return float(np.linalg.norm(u.values - exact) / np.linalg.norm(exact))

    e200 = interior_error(grid200)
    e100 = interior_error(pr.build_grid(100, 1.0, 0.7))
    assert e200 <= 1e-2
    assert 3.0 <= e100 / e200 <= 5.0


def test_04_linearization_consistency(grid200, boundary200):
    """Full-problem g1' tracks the directly linearized data within 10%."""
    c = single_bump(grid200)  # amplitude-1 Gaussian
    pair = make_wave_pair(8.4 * Y_HAT, K_REF)
    full = synthesize_measurement(grid200, c, pair, boundary200, "full")
    lin = synthesize_measurement(grid200, c, pair, boundary200, "linearized")
    rel = boundary200.norm_l2(
        full.g1_prime.values - lin.g1_prime.values
    ) / boundary200.norm_l2(lin.g1_prime.values)
    assert rel <= 0.10


def test_05_coefficient_accuracy(case1_sweep, grid200, boundary200):
    """Recovered coefficients match the volume oracle in the band kappa <= 2k,
    and the constant-potential disk transform lands on 2 pi r J1(r)."""
    band_err = band_relative_error(case1_sweep.table, 2.0 * K_REF)
    assert band_err <= 0.10

    pair = make_wave_pair(np.array([1.0, 0.0]), K_REF)
    rec = synthesize_measurement(
        grid200, constant_potential(grid200), pair, boundary200, "full"
    )
    bessel = fourier_coefficient(rec)
    target = 2.0 * math.pi * 0.7 * j1(0.7)
    assert target == pytest.approx(1.4470, abs=5e-4)
    assert abs(bessel - target) / target <= 0.05


def test_06_instability_frontier(case1_sweep_coarse):
    """Evanescent probes blow up: frontier error dwarfs band error."""
    table = case1_sweep_coarse.table
    err = np.abs(table.values - table.oracle)
    band = table.kappa <= 2.0 * K_REF
    frontier = (table.kappa > 2.0 * K_REF) & (table.kappa <= 3.0 * K_REF)
    assert err[frontier].max() >= 10.0 * err[band].max()


def test_07_truncation_choice(case1_sweep, inv90, case1_truth):
    """K = 2k is the sweet spot: better than K = k, and K = 3k diverges."""
    errs = {}
    for m in (1.0, 2.0, 3.0):
        field, _ = synthesize(case1_sweep.table, m * K_REF, inv90)
        errs[m], _ = error_metrics(field, case1_truth)
    assert errs[2.0] < errs[1.0]
    assert errs[3.0] > errs[2.0]


def test_08_increasing_stability(inv90):
    """The harder four-bump subject reconstructs better at k = 20 than k = 5."""
    errs = {}
    for k in (5.0, 20.0):
        grid = pr.build_grid(200, 1.0, 0.7)
        res = run_algorithm1(
            grid, four_bumps(grid), pr.build_sampling(), k, m=2.0,
            mode="full", seed=11, inversion_grid=inv90,
            truth_fn=lambda pts: gaussian_mixture(pts, FOUR_BUMPS),
            workers=2,
        )
        errs[k] = res.rel_l2
    assert errs[20.0] < errs[5.0]


def test_09_limited_angles(case1_sweep, inv90, case1_truth):
    """More directions never hurt: 9 >= 7 >= 3 >= 2 lines, same data."""
    subsets = {9: None, 7: range(7), 3: range(3), 2: range(2)}
    errs = {}
    for n_lines, subset in subsets.items():
        table = case1_sweep.table if subset is None else case1_sweep.table.restrict(subset)
        field, _ = synthesize(table, 2.0 * K_REF, inv90)
        errs[n_lines], _ = error_metrics(field, case1_truth)
    assert errs[9] <= errs[7] <= errs[3] <= errs[2]


def test_10_stability_bounds():
    """Closed forms are exact; k* matches a fine grid search; attenuation
    only makes the bound worse."""
    p = StabilityParams(eps=1e-3, m1=1.0)
    assert omega(1.0, p) == p.c1 * p.eps**2 + p.m1**2 / 4.0

    tuned = StabilityParams(eps=1e-3, m1=math.sqrt(2.0 * (p.n + 4) * p.c1) * 1e-3)
    assert omega_and_kstar(tuned).k_star == pytest.approx(1.0, rel=1e-12)

    star = omega_and_kstar(p)
    grid_min = min(omega(float(k), p) for k in np.geomspace(1.0, 1e3, 1000))
    assert grid_min >= star.omega_min
    assert (grid_min - star.omega_min) / star.omega_min <= 0.01

    for k in (2.0, 10.0, 25.0):
        vals = [theorem2_bound(k, p, b) for b in (0.25, 0.5, 1.0, 2.0)]
        assert all(hi > lo for lo, hi in zip(vals, vals[1:]))


def test_11_reality_and_determinism(case1_sweep, inv90, tmp_path):
    """The synthesized field is real up to round-off, and identical seeds
    give bit-identical outputs."""
    _, residue = synthesize(case1_sweep.table, 2.0 * K_REF, inv90)
    assert residue <= 1e-12

    from potrecon.outputs import write_coefficient_csv

    grid = pr.build_grid(100, 1.0, 0.7)
    paths = []
    for tag in ("first", "second"):
        res = run_algorithm1(
            grid, two_bumps(grid), pr.build_sampling(), K_REF, m=1.0,
            mode="full", noise_level=0.01, seed=3, inversion_grid=inv90,
            workers=2,
        )
        paths.append(write_coefficient_csv(tmp_path / f"{tag}.csv", res.table))
    assert paths[0].read_bytes() == paths[1].read_bytes()
