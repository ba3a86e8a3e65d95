"""Ground-truth potentials used by the experiments and tests.

Both presets are superpositions of isotropic Gaussians

    c(x) = sum_i A_i exp( -|x - p_i|^2 / s_i^2 ),

chosen with centers well inside the disk so the fields are numerically
supported in Omega.  ``two_bumps`` is the basic test subject (one positive
and one negative bump of equal strength); ``four_bumps`` is the harder,
less symmetric subject used for the wavenumber comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Grid
from .solver import PotentialField

__all__ = [
    "GaussianBump",
    "gaussian_mixture",
    "sample_mixture",
    "two_bumps",
    "four_bumps",
    "single_bump",
    "constant_potential",
    "mixture_fourier_transform",
    "preset",
]


@dataclass(frozen=True)
class GaussianBump:
    amplitude: float
    center: tuple[float, float]
    width: float

    def __post_init__(self) -> None:
        if self.width <= 0.0:
            raise ValueError(f"width must be positive, got {self.width}")


#: One positive and one negative bump of equal strength.
TWO_BUMPS = (
    GaussianBump(+1.0, (-0.25, 0.20), 0.15),
    GaussianBump(-1.0, (+0.25, -0.20), 0.15),
)

#: Four bumps of mixed signs and unequal widths, spread around the disk.
FOUR_BUMPS = (
    GaussianBump(+1.0, (-0.30, 0.30), 0.15),
    GaussianBump(-0.8, (0.35, 0.15), 0.13),
    GaussianBump(+0.9, (0.05, -0.35), 0.16),
    GaussianBump(-1.0, (-0.20, -0.15), 0.12),
)


def gaussian_mixture(points: np.ndarray, bumps) -> np.ndarray:
    """Evaluate a Gaussian mixture at an (m, 2) array of points."""
    points = np.asarray(points, dtype=float)
    out = np.zeros(points.shape[0])
    for b in bumps:
        d2 = (points[:, 0] - b.center[0]) ** 2 + (points[:, 1] - b.center[1]) ** 2
        out += b.amplitude * np.exp(-d2 / b.width**2)
    return out


def sample_mixture(grid: Grid, bumps, m1: float | None = None) -> PotentialField:
    return PotentialField(
        grid=grid, values=gaussian_mixture(grid.interior_xy, bumps), m1=m1
    )


def two_bumps(grid: Grid) -> PotentialField:
    return sample_mixture(grid, TWO_BUMPS)


def four_bumps(grid: Grid) -> PotentialField:
    return sample_mixture(grid, FOUR_BUMPS)


def single_bump(
    grid: Grid,
    center: tuple[float, float] = (0.15, 0.10),
    width: float = 0.2,
    amplitude: float = 1.0,
) -> PotentialField:
    return sample_mixture(grid, (GaussianBump(amplitude, center, width),))


def constant_potential(grid: Grid, value: float = 1.0) -> PotentialField:
    return PotentialField(grid=grid, values=np.full(grid.n_interior, value))


def mixture_fourier_transform(xi: np.ndarray, bumps) -> np.ndarray:
    """Whole-plane Fourier transform of a mixture, int c e^{i xi.x} dx.

    For one bump this is A pi s^2 exp(i xi.p) exp(-s^2 |xi|^2 / 4).  For
    mixtures supported well inside the disk it approximates the disk
    integral up to the (exponentially small) tail outside Omega, and serves
    as a closed-form cross-check of the volume-quadrature oracle.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    out = np.zeros(xi.shape[0], dtype=complex)
    for b in bumps:
        phase = xi[:, 0] * b.center[0] + xi[:, 1] * b.center[1]
        xi2 = xi[:, 0] ** 2 + xi[:, 1] ** 2
        out += (
            b.amplitude * np.pi * b.width**2
            * np.exp(1j * phase - b.width**2 * xi2 / 4.0)
        )
    return out


_PRESETS = {
    "case1": TWO_BUMPS,
    "case2": FOUR_BUMPS,
}


def preset(name: str):
    """Look up a named bump collection ('case1' or 'case2')."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown potential preset {name!r}; know {sorted(_PRESETS)}")
