"""Polar sampling of the phase plane and Hermitian symmetry handling.

Fourier coefficients are probed on radial lines: directions

    y_s = (cos theta_s, sin theta_s),     theta_s = s * 2 pi / N,  s = 0..N-1,

and lengths kappa_l = kappa_min + l * kappa_step up to kappa_max, so each
probed frequency is xi<l;s> = kappa_l * y_s.  Each point carries the polar
quadrature weight of its annular sector,

    sigma<l;s> = kappa_l * kappa_step * delta_theta / (2 pi)^2,

with delta_theta = 2 pi / N; the weights of the full plan therefore sum to
approximately (area of the disk |xi| <= kappa_max) / (2 pi)^2, i.e. the
plan by itself tiles the whole plane for the inverse transform.

A real potential satisfies F[c](-xi) = conj(F[c](xi)), so recovered
coefficients are Hermitian-completed before synthesis: the mirror of every
point is added with the conjugate value (existing mirrors are averaged).
The completed table has twice the angular density, and each completed point
carries HALF the source point's plan weight -- summing the completed table
then equals taking the real part of the plan-indexed sum, and the
synthesized field is real by construction.

``restrict_lines`` models limited-angle data: it keeps a subset of the
lines and rescales the angular weight by (N / |subset|) so the retained
sectors still tile the plane.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "SamplingPlan",
    "build_sampling",
    "hermitian_complete",
    "restrict_lines",
    "mirror_lines",
]

#: Absolute tolerance used when matching mirrored frequency vectors.
_MIRROR_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    """Radial-line sampling of the phase plane with polar quadrature weights."""

    thetas: np.ndarray          # (N,) line angles
    kappas: np.ndarray          # (M,) lengths, uniformly spaced
    kappa_step: float
    delta_theta: float          # angular weight per line (2 pi / N, rescaled on restriction)

    @property
    def n_lines(self) -> int:
        return self.thetas.shape[0]

    @property
    def n_kappas(self) -> int:
        return self.kappas.shape[0]

    @property
    def n_points(self) -> int:
        return self.n_lines * self.n_kappas

    @property
    def directions(self) -> np.ndarray:
        """(N, 2) unit direction per line."""
        return np.column_stack((np.cos(self.thetas), np.sin(self.thetas)))

    def sigma(self, kappa) -> np.ndarray:
        """Quadrature weight kappa * d_kappa * d_theta / (2 pi)^2."""
        return (
            np.asarray(kappa, dtype=float)
            * self.kappa_step * self.delta_theta / (4.0 * np.pi**2)
        )

    def points(self) -> tuple[np.ndarray, ...]:
        """Flatten to per-point arrays (line, kappa_index, kappa, theta, xi, sigma).

        Ordering is lengths-outer / lines-inner, matching the reconstruction
        loop (one outer iteration per length kappa_l, inner per direction).
        """
        ell = np.repeat(np.arange(self.n_kappas), self.n_lines)
        s = np.tile(np.arange(self.n_lines), self.n_kappas)
        kap = self.kappas[ell]
        th = self.thetas[s]
        xi = kap[:, None] * np.column_stack((np.cos(th), np.sin(th)))
        return ell, s, kap, th, xi, self.sigma(kap)


def build_sampling(
    n_lines: int = 9,
    kappa_min: float = 1.0,
    kappa_max: float = 50.0,
    kappa_step: float = 0.2,
) -> SamplingPlan:
    """Build the uniform radial-line plan.

    Raises
    ------
    ConfigurationError
        For an empty length range, a nonpositive step, or no lines.
    """
    if n_lines < 1:
        raise ConfigurationError(f"n_lines must be >= 1, got {n_lines}")
    if kappa_step <= 0.0:
        raise ConfigurationError(f"kappa_step must be positive, got {kappa_step}")
    if kappa_min <= 0.0:
        raise ConfigurationError(f"kappa_min must be positive, got {kappa_min}")
    if kappa_max < kappa_min:
        raise ConfigurationError(
            f"empty length range: kappa_max {kappa_max} < kappa_min {kappa_min}"
        )
    count = int(round((kappa_max - kappa_min) / kappa_step)) + 1
    kappas = kappa_min + kappa_step * np.arange(count)
    kappas = kappas[kappas <= kappa_max * (1.0 + 1e-12)]
    thetas = 2.0 * np.pi * np.arange(n_lines) / n_lines
    plan = SamplingPlan(
        thetas=thetas,
        kappas=kappas,
        kappa_step=float(kappa_step),
        delta_theta=2.0 * np.pi / n_lines,
    )
    plan.thetas.setflags(write=False)
    plan.kappas.setflags(write=False)
    return plan


def restrict_lines(plan: SamplingPlan, line_indices) -> SamplingPlan:
    """Keep a subset of lines, rescaling weights by n_lines/|subset|.

    Raises
    ------
    ConfigurationError
        For an empty, duplicated, or out-of-range subset.
    """
    idx = np.asarray(sorted(line_indices), dtype=int)
    if idx.size == 0:
        raise ConfigurationError("line subset is empty")
    if np.unique(idx).size != idx.size:
        raise ConfigurationError(f"line subset has duplicates: {idx.tolist()}")
    if idx.min() < 0 or idx.max() >= plan.n_lines:
        raise ConfigurationError(
            f"line indices {idx.tolist()} out of range 0..{plan.n_lines - 1}"
        )
    scale = plan.n_lines / idx.size
    sub = replace(
        plan,
        thetas=plan.thetas[idx].copy(),
        delta_theta=plan.delta_theta * scale,
    )
    sub.thetas.setflags(write=False)
    return sub


def hermitian_complete(plan: SamplingPlan, coefficients: dict) -> dict:
    """Close a coefficient map under xi -> -xi with conjugate values.

    ``coefficients`` maps frequency tuples (xi1, xi2) to complex values.
    Points whose mirror already exists (within a small absolute tolerance,
    to forgive polar-to-Cartesian rounding) are averaged with the
    conjugated mirror, making the pair exactly consistent; missing mirrors
    are added.  The result is a new dict; the input is not modified.
    """
    from scipy.spatial import cKDTree

    items = list(coefficients.items())
    if not items:
        return {}
    xi_arr = np.array([xy for xy, _ in items], dtype=float)
    vals = np.array([v for _, v in items], dtype=complex)
    atol = _MIRROR_ATOL * max(1.0, float(np.abs(xi_arr).max()))
    tree = cKDTree(xi_arr)
    dist, idx = tree.query(-xi_arr, k=1, distance_upper_bound=atol)

    out: dict[tuple[float, float], complex] = {}
    for i, (xi, _) in enumerate(items):
        key = (float(xi[0]), float(xi[1]))
        if np.isfinite(dist[i]):
            out[key] = complex(0.5 * (vals[i] + np.conj(vals[idx[i]])))
        else:
            out[key] = complex(vals[i])
            out[(-key[0], -key[1])] = complex(np.conj(vals[i]))
    return out


def mirror_lines(plan: SamplingPlan) -> np.ndarray:
    """Index of each line's antipodal partner within the plan, or -1.

    Line s' mirrors line s when their unit directions are opposite.  For an
    odd number of uniformly spaced lines no partner exists and every entry
    is -1; for an even number every line pairs up.
    """
    d = plan.directions
    out = np.full(plan.n_lines, -1, dtype=np.int64)
    for s in range(plan.n_lines):
        gaps = np.abs(d + d[s]).sum(axis=1)
        j = int(np.argmin(gaps))
        if gaps[j] < _MIRROR_ATOL:
            out[s] = j
    return out
