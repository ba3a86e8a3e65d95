"""Embedded-disk geometry: Cartesian grids, cut cells, boundary quadrature.

The computational domain is the open disk

    Omega = { x in R^2 : |x| < r },      r < L,

embedded in the square [-L, L]^2, which is discretized by a uniform
``n x n`` node lattice with spacing ``h = 2 L / (n - 1)``.  A lattice node
is *interior* iff it lies strictly inside the disk.  Where a lattice arm
from an interior node crosses the circle, the crossing point and the
fractional arm length ``theta in (0, 1]`` are recorded; the Helmholtz
assembly uses them for Shortley-Weller irregular stencils, and the
boundary-trace code uses the same machinery for its interpolation cells.

The boundary circle itself is discretized separately by ``N_b`` uniformly
spaced angular nodes with trapezoid weights ``2 pi r / N_b`` (exact for
periodic trapezoid quadrature); all boundary integrals in the package are
plain weighted sums over these nodes.

Arrays in the frozen dataclasses are marked read-only after construction,
so instances are safe to share between concurrent solves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainGeometryError

__all__ = [
    "Grid",
    "BoundaryDiscretization",
    "build_grid",
    "boundary_nodes",
]

# Arm direction order used throughout the cut-cell arrays: +x, -x, +y, -y.
ARM_STEPS = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform square lattice with an embedded-disk interior mask.

    ``interior_index`` maps lattice (ix, iy) to a sequential interior node
    number (or -1); the ordering is row-major in ix, then iy, and is part
    of the determinism contract (solution vectors are comparable bit-for-bit
    between runs).

    Cut-cell arrays are indexed ``[interior_node, arm]`` with arms ordered
    +x, -x, +y, -y:

    - ``neighbor``  : interior index of the arm's neighbor, or -1 if the arm
                      crosses the circle;
    - ``arm_frac``  : fractional arm length theta in (0, 1] (1.0 for full arms);
    - ``cut_points``: circle crossing coordinates for every cut arm, in the
                      order produced by ``np.argwhere(neighbor == -1)``.
    """

    n_per_side: int
    half_width: float
    radius: float
    h: float
    xs: np.ndarray                 # (n,) lattice coordinates, shared by x and y
    interior_index: np.ndarray     # (n, n) int, -1 for exterior nodes
    interior_ij: np.ndarray        # (n_int, 2) lattice indices of interior nodes
    interior_xy: np.ndarray        # (n_int, 2) coordinates of interior nodes
    neighbor: np.ndarray           # (n_int, 4) int
    arm_frac: np.ndarray           # (n_int, 4) float
    cut_arms: np.ndarray           # (n_cut, 2) rows (interior node, arm)
    cut_points: np.ndarray         # (n_cut, 2) circle crossings

    @property
    def n_interior(self) -> int:
        return self.interior_xy.shape[0]

    def interior_mask_on(self, points: np.ndarray) -> np.ndarray:
        """Strict-interior test |x| < r for an (m, 2) array of points."""
        return np.einsum("ij,ij->i", points, points) < self.radius**2


@dataclass(frozen=True, eq=False)
class BoundaryDiscretization:
    """Uniform angular nodes on the circle |x| = r with trapezoid weights."""

    radius: float
    thetas: np.ndarray    # (N_b,) angles in [0, 2 pi)
    points: np.ndarray    # (N_b, 2)
    normals: np.ndarray   # (N_b, 2) outward unit normals (= points / r)
    weights: np.ndarray   # (N_b,) quadrature weights, each 2 pi r / N_b

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def integrate(self, values: np.ndarray) -> complex:
        """Weighted sum approximating the line integral over the circle."""
        return complex(np.sum(values * self.weights))

    def norm_l2(self, values: np.ndarray) -> float:
        """Boundary L^2 norm sqrt(sum w_j |v_j|^2)."""
        return float(np.sqrt(np.sum(self.weights * np.abs(values) ** 2)))


def build_grid(n_per_side: int, half_width: float, radius: float) -> Grid:
    """Build the lattice, interior mask, and cut-cell tables.

    Raises
    ------
    DomainGeometryError
        If the disk does not fit strictly inside the square, or the lattice
        is too coarse to contain interior nodes.
    """
    if n_per_side < 3:
        raise DomainGeometryError(f"n_per_side must be >= 3, got {n_per_side}")
    if not (0.0 < radius < half_width):
        raise DomainGeometryError(
            f"need 0 < radius < half_width, got radius={radius}, half_width={half_width}"
        )

    n = int(n_per_side)
    h = 2.0 * half_width / (n - 1)
    xs = -half_width + h * np.arange(n)

    xg, yg = np.meshgrid(xs, xs, indexing="ij")
    inside = xg**2 + yg**2 < radius**2
    if not inside.any():
        raise DomainGeometryError(
            f"no lattice nodes fall inside the disk (n={n}, radius={radius})"
        )

    interior_index = np.full((n, n), -1, dtype=np.int64)
    ij = np.argwhere(inside)                      # row-major: ix varies slowest
    interior_index[ij[:, 0], ij[:, 1]] = np.arange(ij.shape[0])
    xy = np.column_stack((xs[ij[:, 0]], xs[ij[:, 1]]))

    n_int = ij.shape[0]
    neighbor = np.full((n_int, 4), -1, dtype=np.int64)
    arm_frac = np.ones((n_int, 4))

    for a, step in enumerate(ARM_STEPS):
        nb_ij = ij + step                          # all valid: the disk is strictly inside
        nb_ok = (
            (nb_ij[:, 0] >= 0) & (nb_ij[:, 0] < n)
            & (nb_ij[:, 1] >= 0) & (nb_ij[:, 1] < n)
        )
        if not nb_ok.all():
            # An interior node at the lattice edge means the circle pokes out of
            # the lattice once arms are attached; the caller chose r too close to L.
            raise DomainGeometryError(
                "disk boundary leaves the lattice; decrease radius or refine"
            )
        neighbor[:, a] = interior_index[nb_ij[:, 0], nb_ij[:, 1]]

        cut = neighbor[:, a] < 0
        if cut.any():
            # Solve |x + t h e|^2 = r^2 for the outward crossing fraction t.
            x_cut = xy[cut]
            e = step.astype(float)
            proj = x_cut @ e                       # x . e  (h-free component)
            disc = proj**2 + (radius**2 - np.einsum("ij,ij->i", x_cut, x_cut))
            t = (-proj + np.sqrt(disc)) / h
            arm_frac[cut, a] = t

    cut_arms = np.argwhere(neighbor < 0)
    frac = arm_frac[cut_arms[:, 0], cut_arms[:, 1]]
    if cut_arms.size and not ((frac > 0.0) & (frac <= 1.0)).all():
        raise DomainGeometryError("cut-cell fraction outside (0, 1]; geometry inconsistent")
    cut_points = (
        xy[cut_arms[:, 0]]
        + (frac[:, None] * h) * ARM_STEPS[cut_arms[:, 1]].astype(float)
    )

    grid = Grid(
        n_per_side=n,
        half_width=float(half_width),
        radius=float(radius),
        h=h,
        xs=xs,
        interior_index=interior_index,
        interior_ij=ij,
        interior_xy=xy,
        neighbor=neighbor,
        arm_frac=arm_frac,
        cut_arms=cut_arms,
        cut_points=cut_points,
    )
    for arr in (grid.xs, grid.interior_index, grid.interior_ij, grid.interior_xy,
                grid.neighbor, grid.arm_frac, grid.cut_arms, grid.cut_points):
        arr.setflags(write=False)
    return grid


def boundary_nodes(grid: Grid, n_points: int = 256) -> BoundaryDiscretization:
    """Uniform angular discretization of the boundary circle.

    The trapezoid rule on a uniform periodic partition integrates constants
    exactly, so the weights sum to the circumference 2 pi r to rounding.
    """
    if n_points < 4:
        raise DomainGeometryError(f"n_points must be >= 4, got {n_points}")
    r = grid.radius
    thetas = 2.0 * np.pi * np.arange(n_points) / n_points
    normals = np.column_stack((np.cos(thetas), np.sin(thetas)))
    points = r * normals
    weights = np.full(n_points, 2.0 * np.pi * r / n_points)
    b = BoundaryDiscretization(
        radius=r, thetas=thetas, points=points, normals=normals, weights=weights
    )
    for arr in (b.thetas, b.points, b.normals, b.weights):
        arr.setflags(write=False)
    return b
