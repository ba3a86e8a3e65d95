"""Simulated boundary measurements for one probe pair.

For a probe u0 = exp(i zeta.x) the linearized Neumann data is

    g1' := g1 - dnu u0 = dnu(u - u0),

where u solves the full problem with Dirichlet data g0 = u0|_{boundary}.
Two synthesis modes are provided:

``full``
    Realize both boundary maps with the same discrete operator: solve the
    full (nonlinear-in-c) problem for u and the c = 0 problem for u0h,
    both with Dirichlet data g0, then differentiate w = u - u0h.  This is
    the honest route: the data contain the genuine higher-order-in-c
    remainder, so reconstructions do not commit the inverse crime of
    sampling their own forward model.  Subtracting the *discrete* probe
    rather than the analytic one matters: both solves share the probe's
    dispersion error, so it cancels in w, leaving g1' accurate at the
    scale of the small scattered field instead of the O(1) probe.  (w also
    has exactly zero Dirichlet data, which keeps the one-sided boundary
    stencil clean.)

``linearized``
    Solve the linearized sub-problem -Lap u1 - k^2 u1 (+ i k b u1) = -c u0
    with zero Dirichlet data and take g1' = dnu u1 directly.  Useful as the
    idealized comparison (the measurement the linearization assumes).

Optionally, iid circular complex noise is drawn per boundary node and
rescaled so its boundary-L^2 norm is exactly ``noise_level`` times the
clean signal's norm.

``volume_fourier_oracle`` is the independent check: the midpoint rule for
int_Omega c exp(i xi.x) dx over interior grid nodes, needing nothing but
the sampled potential.  ``dtn_norm_estimate`` turns a batch of records
into the empirical boundary-map norm max ||g1'|| / ||g0|| used as the
perturbation level of the stability bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .geometry import BoundaryDiscretization, Grid
from .solver import (
    AssembledSystem,
    PotentialField,
    assemble,
    neumann_trace,
    solve_dirichlet,
    solve_linearized,
)
from .waves import WaveVectorPair, eval_probe

__all__ = [
    "BoundaryTrace",
    "MeasurementRecord",
    "synthesize_measurement",
    "dtn_norm_estimate",
    "volume_fourier_oracle",
]

MODES = ("full", "linearized")


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Complex values sampled at a boundary discretization's nodes."""

    boundary: BoundaryDiscretization
    values: np.ndarray

    def norm(self) -> float:
        return self.boundary.norm_l2(self.values)


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """One probe's linearized Neumann data plus provenance."""

    pair: WaveVectorPair
    g1_prime: BoundaryTrace
    mode: str
    noise_level: float = 0.0
    provenance: dict = field(default_factory=dict)


def _apply_noise(
    values: np.ndarray,
    boundary: BoundaryDiscretization,
    noise_level: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Add circular complex noise scaled to ``noise_level`` times the signal norm."""
    eta = rng.standard_normal(values.shape[0]) + 1j * rng.standard_normal(values.shape[0])
    eta_norm = boundary.norm_l2(eta)
    if eta_norm == 0.0:
        return values
    target = noise_level * boundary.norm_l2(values)
    return values + eta * (target / eta_norm)


def synthesize_measurement(
    grid: Grid,
    c: PotentialField,
    pair: WaveVectorPair,
    boundary: BoundaryDiscretization,
    mode: str = "full",
    noise_level: float = 0.0,
    rng: np.random.Generator | None = None,
    system: AssembledSystem | None = None,
    reference_system: AssembledSystem | None = None,
) -> MeasurementRecord:
    """Simulate the linearized Neumann data g1' for one probe.

    ``system`` optionally reuses an assembled operator: the full mode wants
    ``assemble(grid, c, k, b)``, the linearized mode ``assemble(grid, None,
    k, b)``; passing the wrong flavor is rejected.  The full mode also
    solves the c = 0 problem; ``reference_system`` reuses that operator
    (``assemble(grid, None, k, b)``).  ``rng`` is required when
    ``noise_level > 0``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if noise_level < 0.0:
        raise ValueError(f"noise_level must be >= 0, got {noise_level}")
    if noise_level > 0.0 and rng is None:
        raise ValueError("noise_level > 0 requires an rng for reproducibility")

    if mode == "full":
        if system is None:
            system = assemble(grid, c, pair.k, pair.b)
        elif system.c is not c or system.k != pair.k or system.b != pair.b:
            raise ValueError("assembled system does not match (c, k, b) of this probe")
        if reference_system is None:
            reference_system = assemble(grid, None, pair.k, pair.b)
        elif (
            reference_system.c is not None
            or reference_system.k != pair.k
            or reference_system.b != pair.b
        ):
            raise ValueError("reference system must be assembled with c=None at (k, b)")
        g0 = lambda pts: eval_probe(pair, pts, "u0")
        u = solve_dirichlet(system, g0)
        u0h = solve_dirichlet(reference_system, g0)
        # Same Dirichlet data on both solves: w = u - u0h vanishes on the
        # boundary exactly and carries only the c-scattered field.
        from .solver import ComplexField  # local import to avoid cycle noise

        w = ComplexField(grid=grid, values=u.values - u0h.values, dirichlet=None)
        g1p = neumann_trace(w, boundary)
    else:
        if system is None:
            system = assemble(grid, None, pair.k, pair.b)
        elif system.c is not None or system.k != pair.k or system.b != pair.b:
            raise ValueError("linearized mode wants a system assembled with c=None")
        source = -c.values * eval_probe(pair, grid.interior_xy, "u0")
        u1 = solve_linearized(system, source)
        g1p = neumann_trace(u1, boundary)

    if noise_level > 0.0:
        g1p = _apply_noise(g1p, boundary, noise_level, rng)

    return MeasurementRecord(
        pair=pair,
        g1_prime=BoundaryTrace(boundary=boundary, values=g1p),
        mode=mode,
        noise_level=noise_level,
        provenance={"grid_n": grid.n_per_side, "k": pair.k, "b": pair.b},
    )


def dtn_norm_estimate(records: Iterable[MeasurementRecord]) -> float:
    """Empirical boundary-map norm: max over records of ||g1'|| / ||g0||.

    Both norms are boundary-L^2 over the record's own discretization; g0 is
    the probe trace the record was generated from.
    """
    best = 0.0
    count = 0
    for rec in records:
        b = rec.g1_prime.boundary
        g0 = eval_probe(rec.pair, b.points, "u0")
        g0_norm = b.norm_l2(g0)
        if g0_norm == 0.0:
            continue
        best = max(best, rec.g1_prime.norm() / g0_norm)
        count += 1
    if count == 0:
        raise ValueError("no usable records to estimate the boundary-map norm from")
    return best


def volume_fourier_oracle(grid: Grid, c: PotentialField, xi) -> complex | np.ndarray:
    """Midpoint-rule Fourier coefficient h^2 sum_j c(x_j) exp(i xi.x_j).

    Independent of every boundary quantity; used as the reference the
    boundary-integral recovery is judged against.  ``xi`` may be one vector
    (returns a scalar) or an (m, 2) array (returns (m,)).
    """
    xi_arr = np.atleast_2d(np.asarray(xi, dtype=float))
    phases = grid.interior_xy @ xi_arr.T                      # (n_int, m)
    vals = grid.h**2 * (c.values @ np.exp(1j * phases))
    if np.ndim(xi) == 1:
        return complex(vals[0])
    return vals
