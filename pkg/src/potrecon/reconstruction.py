"""One-Fourier-mode-per-probe reconstruction of the potential.

The driver loops over phase-space sample points xi<l;s> = kappa_l * y_s
(lengths outer, directions inner).  For each point it

1. builds the probe pair for xi and synthesizes the linearized Neumann
   data g1' (full nonlinear forward solve by default, see
   :mod:`potrecon.measurement`),
2. recovers one Fourier coefficient by the boundary integral

       F[c](xi) ~ int_{boundary} g1' v ds,

3. deposits the coefficient into a table with its polar quadrature weight.

After the sweep the potential is synthesized by the weighted inverse
transform over the Hermitian-completed table, truncated at |xi| <= K = m k:

    c_inv(x) = Re sum_{kappa_l <= K} sigma<l;s> F(xi<l;s>) exp(-i xi.x),

evaluated on a coarser inversion grid.  The imaginary residue of the
completed-table sum is recorded (it must vanish to rounding; a real
synthesis is a structural property, not luck).

Independent solves per probe share one sparse factorization, so the sweep
is organized in vectorized chunks of right-hand sides; results are
bit-identical regardless of chunk size or worker count because every
probe's output lands in a preallocated slot and noise is drawn from a
per-probe seed stream (seed, l, s).
"""

from __future__ import annotations

import time
import warnings as _warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from threading import Lock
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, CoverageError, NearEigenvalueWarning
from .geometry import BoundaryDiscretization, Grid, boundary_nodes, build_grid
from .measurement import MeasurementRecord, _apply_noise, volume_fourier_oracle
from .sampling import SamplingPlan
from .solver import (
    AMPLIFICATION_THRESHOLD,
    NEAR_EIGENVALUE_PROXIMITY,
    RESIDUAL_THRESHOLD,
    PotentialField,
    _bilinear_matrix,
    assemble,
    trace_operator,
)
from .waves import eval_probe, make_wave_pair

__all__ = [
    "CoefficientTable",
    "ReconstructionResult",
    "fourier_coefficient",
    "run_algorithm1",
    "synthesize",
    "error_metrics",
    "band_relative_error",
]

_KAPPA_TOL = 1e-12


def fourier_coefficient(record: MeasurementRecord) -> complex:
    """Recover F[c](xi) from one record: the weighted sum over boundary nodes
    of g1' times the conjugate-direction probe v."""
    b = record.g1_prime.boundary
    v = eval_probe(record.pair, b.points, "v")
    return complex(np.sum(b.weights * record.g1_prime.values * v))


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Recovered Fourier coefficients on the sampled phase points.

    Per-point arrays all have length P; ``line`` indexes into
    ``line_angles``.  ``oracle`` holds the volume-quadrature reference when
    it was computed, ``flagged`` marks probes whose solve tripped the
    near-eigenvalue heuristics.
    """

    k: float
    b: float
    mode: str
    grid_n: int
    line_angles: np.ndarray        # (L,)
    line: np.ndarray               # (P,) int
    kappa: np.ndarray              # (P,)
    theta: np.ndarray              # (P,)
    xi: np.ndarray                 # (P, 2)
    sigma: np.ndarray              # (P,)
    values: np.ndarray             # (P,) complex
    oracle: np.ndarray | None = None
    flagged: np.ndarray | None = None

    @property
    def n_points(self) -> int:
        return self.kappa.shape[0]

    @property
    def kappa_max(self) -> float:
        return float(self.kappa.max(initial=0.0))

    def restrict(self, line_indices: Sequence[int]) -> "CoefficientTable":
        """Keep a subset of lines; weights rescale by n_lines/|subset|.

        This reuses already-recovered coefficients, so limited-angle
        studies do not pay for new forward solves.
        """
        idx = np.asarray(sorted(set(int(i) for i in line_indices)), dtype=int)
        if idx.size == 0:
            raise ConfigurationError("line subset is empty")
        if idx.min() < 0 or idx.max() >= self.line_angles.shape[0]:
            raise ConfigurationError(
                f"line indices {idx.tolist()} out of range 0..{self.line_angles.shape[0] - 1}"
            )
        keep = np.isin(self.line, idx)
        renumber = np.full(self.line_angles.shape[0], -1, dtype=int)
        renumber[idx] = np.arange(idx.size)
        scale = self.line_angles.shape[0] / idx.size
        return replace(
            self,
            line_angles=self.line_angles[idx].copy(),
            line=renumber[self.line[keep]],
            kappa=self.kappa[keep].copy(),
            theta=self.theta[keep].copy(),
            xi=self.xi[keep].copy(),
            sigma=self.sigma[keep] * scale,
            values=self.values[keep].copy(),
            oracle=None if self.oracle is None else self.oracle[keep].copy(),
            flagged=None if self.flagged is None else self.flagged[keep].copy(),
        )


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Everything one reconstruction run produced."""

    c_inv: PotentialField
    table: CoefficientTable
    K: float
    k: float
    b: float
    mode: str
    noise_level: float
    imag_residue: float
    dtn_norm: float
    rel_l2: float | None
    rel_linf: float | None
    truth: np.ndarray | None       # ground truth on the inversion grid's interior
    warnings: list[str]
    timings: dict[str, float]
    resonance_proximity: float = float("inf")
    near_eigenvalue: bool = False


# --------------------------------------------------------------------------
# Synthesis
# --------------------------------------------------------------------------

def _mirror_partners(xi: np.ndarray) -> np.ndarray:
    """Per-point index of the antipodal table point, or -1 when absent."""
    from scipy.spatial import cKDTree

    if xi.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    atol = 1e-9 * max(1.0, float(np.abs(xi).max()))
    dist, idx = cKDTree(xi).query(-xi, k=1, distance_upper_bound=atol)
    out = np.where(np.isfinite(dist), idx, -1).astype(np.int64)
    return out


def synthesize(
    table: CoefficientTable,
    K: float,
    inversion_grid: Grid,
    chunk_size: int = 512,
) -> tuple[PotentialField, float]:
    """Weighted inverse transform of the Hermitian-completed table, |xi| <= K.

    Returns the synthesized potential on the inversion grid's interior
    nodes together with the relative imaginary residue of the completed
    sum (max |Im| / max |Re|), which must be at rounding level.

    Raises
    ------
    CoverageError
        When ``K`` exceeds the table's sampled band: truncating there would
        silently synthesize from missing data.
    """
    if K <= 0.0:
        raise ConfigurationError(f"truncation radius K must be positive, got {K}")
    if table.n_points == 0:
        raise CoverageError("coefficient table is empty", 0.0, K)
    kmax = table.kappa_max
    # A coverage hole means a whole sample is absent from (kmax, K]: the
    # first such candidate sits one radial step beyond the last sample, so
    # K strictly inside (kmax, kmax + step) misses nothing.
    if K >= kmax * (1.0 + _KAPPA_TOL) + _kappa_spacing(table) or (
        _kappa_spacing(table) == 0.0 and K > kmax * (1.0 + _KAPPA_TOL)
    ):
        raise CoverageError(
            f"truncation K = {K:.6g} exceeds sampled band kappa <= {kmax:.6g}; "
            f"the band ({kmax:.6g}, {K:.6g}] was never measured",
            kmax,
            K,
        )

    keep = table.kappa <= K * (1.0 + _KAPPA_TOL)
    xi = table.xi[keep]
    vals = table.values[keep]
    sig = table.sigma[keep]

    # Hermitian completion at the point level: average onto existing
    # mirrors, add missing mirrors with half weight on both halves.
    partner = _mirror_partners(xi)
    have = partner >= 0
    avg = vals.copy()
    avg[have] = 0.5 * (vals[have] + np.conj(vals[partner[have]]))

    xi_c = np.concatenate([xi, -xi[~have]], axis=0)
    vals_c = np.concatenate([avg, np.conj(avg[~have])])
    w_c = np.concatenate([np.where(have, sig, 0.5 * sig), 0.5 * sig[~have]])

    pts = inversion_grid.interior_xy
    acc = np.zeros(pts.shape[0], dtype=complex)
    coeff = w_c * vals_c
    for a in range(0, xi_c.shape[0], chunk_size):
        blk = slice(a, a + chunk_size)
        acc += np.exp(-1j * (pts @ xi_c[blk].T)) @ coeff[blk]

    re_max = float(np.abs(acc.real).max(initial=0.0))
    im_max = float(np.abs(acc.imag).max(initial=0.0))
    residue = im_max / re_max if re_max > 0.0 else im_max
    return PotentialField(grid=inversion_grid, values=acc.real.copy()), residue


def _kappa_spacing(table: CoefficientTable) -> float:
    u = np.unique(table.kappa)
    if u.size < 2:
        return 0.0
    return float(np.min(np.diff(u)))


def error_metrics(c_inv: PotentialField, reference: np.ndarray) -> tuple[float, float]:
    """Relative L2 and Linf errors against reference values on the same nodes."""
    ref = np.asarray(reference, dtype=float)
    if ref.shape != c_inv.values.shape:
        raise ValueError(f"reference shape {ref.shape} != field shape {c_inv.values.shape}")
    diff = c_inv.values - ref
    l2 = float(np.linalg.norm(diff) / np.linalg.norm(ref))
    linf = float(np.abs(diff).max() / np.abs(ref).max())
    return l2, linf


def band_relative_error(
    table: CoefficientTable, kappa_hi: float, kappa_lo: float = 0.0
) -> float:
    """Aggregate relative coefficient error over kappa_lo < kappa <= kappa_hi.

    Defined as sum |recovered - oracle| / sum |oracle| over the band
    (relative-L1 aggregate); per-point ratios would blow up at the oracle's
    zeros, which genuinely occur along some rays for sign-changing
    potentials.
    """
    if table.oracle is None:
        raise ValueError("table has no oracle values to compare against")
    band = (table.kappa > kappa_lo) & (table.kappa <= kappa_hi * (1.0 + _KAPPA_TOL))
    if not band.any():
        raise ValueError(f"no table points in band ({kappa_lo}, {kappa_hi}]")
    num = float(np.abs(table.values[band] - table.oracle[band]).sum())
    den = float(np.abs(table.oracle[band]).sum())
    return num / den


# --------------------------------------------------------------------------
# The sweep driver
# --------------------------------------------------------------------------

def _zeta_arrays(xi: np.ndarray, k: float, b: float):
    """Stack probe vectors for a batch of frequency points."""
    P = xi.shape[0]
    zeta = np.empty((2, P), dtype=complex)
    zeta_star = np.empty((2, P), dtype=complex)
    for j in range(P):
        pair = make_wave_pair(xi[j], k, b)
        zeta[:, j] = pair.zeta
        zeta_star[:, j] = pair.zeta_star
    return zeta, zeta_star


def run_algorithm1(
    grid: Grid,
    c: PotentialField,
    plan: SamplingPlan,
    k: float,
    b: float = 0.0,
    m: float = 2.0,
    mode: str = "full",
    noise_level: float = 0.0,
    *,
    seed: int = 0,
    boundary: BoundaryDiscretization | None = None,
    n_boundary: int = 256,
    inversion_grid: Grid | None = None,
    truth_fn: Callable[[np.ndarray], np.ndarray] | None = None,
    compute_oracle: bool = True,
    chunk_size: int = 64,
    workers: int = 1,
) -> ReconstructionResult:
    """Sweep the plan's phase points at wavenumber ``k`` and synthesize c_inv.

    Only plan points with kappa <= K = m k are measured and used; K beyond
    the plan's band raises :class:`CoverageError` up front.  ``truth_fn``
    evaluates the ground truth at arbitrary points for error metrics; when
    omitted, ``c`` is resampled from the forward grid by bilinear
    interpolation.  Pass ``compute_oracle=False`` to skip the independent
    volume-quadrature reference (it needs the true potential, which a
    blind run would not have).
    """
    t0 = time.perf_counter()
    if mode not in ("full", "linearized"):
        raise ConfigurationError(f"mode must be 'full' or 'linearized', got {mode!r}")
    if m <= 0.0:
        raise ConfigurationError(f"truncation multiple m must be positive, got {m}")
    if noise_level < 0.0:
        raise ConfigurationError(f"noise_level must be >= 0, got {noise_level}")
    K = m * k
    plan_kmax = float(plan.kappas.max())
    if K >= plan_kmax + plan.kappa_step:
        raise CoverageError(
            f"K = m k = {K:.6g} exceeds the plan's band kappa <= {plan_kmax:.6g}; "
            f"the band ({plan_kmax:.6g}, {K:.6g}] is unsampled",
            plan_kmax,
            K,
        )
    if boundary is None:
        boundary = boundary_nodes(grid, n_boundary)
    if inversion_grid is None:
        inversion_grid = build_grid(90, grid.half_width, grid.radius)

    ell, s_idx, kap, th, xi, sig = plan.points()
    sel = kap <= K * (1.0 + _KAPPA_TOL)
    ell, s_idx, kap, th, xi, sig = (
        ell[sel], s_idx[sel], kap[sel], th[sel], xi[sel], sig[sel]
    )
    P = kap.shape[0]

    timings: dict[str, float] = {}
    t1 = time.perf_counter()
    system = assemble(grid, c if mode == "full" else None, k, b)
    system.factorization  # force the one-time factorization now
    # Full mode subtracts the c = 0 solve of the same discrete operator, so
    # the probe's dispersion error cancels in the difference field.
    ref_system = None
    if mode == "full":
        ref_system = assemble(grid, None, k, b)
        ref_system.factorization
    timings["assemble_factorize"] = time.perf_counter() - t1

    proximity = system.resonance_proximity()
    near_eig = proximity < NEAR_EIGENVALUE_PROXIMITY

    trace_op = trace_operator(grid, boundary)
    zeta, zeta_star = _zeta_arrays(xi, k, b)

    values = np.empty(P, dtype=complex)
    dtn_ratio = np.empty(P)
    flagged = np.zeros(P, dtype=bool)
    residuals = np.zeros(P)
    amps = np.zeros(P)

    two_h = 2.0 * grid.h
    w_col = boundary.weights
    lock = Lock()

    def do_chunk(a: int) -> None:
        blk = slice(a, min(a + chunk_size, P))
        z_blk = zeta[:, blk]
        if mode == "full":
            g_cut = np.exp(1j * (grid.cut_points @ z_blk))
            rhs = system.boundary_coupling @ g_cut
        else:
            u0_int = np.exp(1j * (grid.interior_xy @ z_blk))
            rhs = (-c.values)[:, None] * u0_int
        with lock:                      # SuperLU back-substitution, serialized
            u = system.solve_raw(rhs)
            u0h = ref_system.solve_raw(rhs) if mode == "full" else None
        resid = np.linalg.norm(system.matrix @ u - rhs, axis=0)
        rhs_norm = np.linalg.norm(rhs, axis=0)
        np.divide(resid, rhs_norm, out=resid, where=rhs_norm > 0)

        if mode == "full":
            w = u - u0h
            amp = np.abs(u).max(axis=0) / np.maximum(np.abs(g_cut).max(axis=0), 1e-300)
        else:
            w = u
            amp = np.zeros(w.shape[1])
        traces = (-4.0 * (trace_op.ring1 @ w) + (trace_op.ring2 @ w)) / two_h

        if noise_level > 0.0:
            for j in range(*blk.indices(P)):
                rng = np.random.default_rng((seed, int(ell[j]), int(s_idx[j])))
                traces[:, j - blk.start] = _apply_noise(
                    traces[:, j - blk.start], boundary, noise_level, rng
                )

        v_bnd = np.exp(1j * (boundary.points @ zeta_star[:, blk]))
        values[blk] = np.einsum("b,bj,bj->j", w_col, traces, v_bnd)

        g0_bnd = np.exp(1j * (boundary.points @ z_blk))
        g0_norms = np.sqrt(np.einsum("b,bj->j", w_col, np.abs(g0_bnd) ** 2))
        t_norms = np.sqrt(np.einsum("b,bj->j", w_col, np.abs(traces) ** 2))
        dtn_ratio[blk] = t_norms / np.maximum(g0_norms, 1e-300)

        residuals[blk] = resid
        amps[blk] = amp
        flagged[blk] = (resid > RESIDUAL_THRESHOLD) | (amp > AMPLIFICATION_THRESHOLD)

    t1 = time.perf_counter()
    starts = list(range(0, P, chunk_size))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(do_chunk, starts))
    else:
        for a in starts:
            do_chunk(a)
    timings["probe_sweep"] = time.perf_counter() - t1

    warn_list: list[str] = []
    if near_eig:
        msg = (
            f"k={k:.6g} sits within {proximity:.3f} mean spacings of an "
            f"operator eigenvalue; recovered coefficients may be degraded"
        )
        warn_list.append(msg)
        _warnings.warn(NearEigenvalueWarning(msg, residual=0.0), stacklevel=2)
    if flagged.any():
        worst = int(np.argmax(residuals + amps))
        msg = (
            f"{int(flagged.sum())} of {P} probe solves look near-resonant at "
            f"k={k:.6g} (worst residual {residuals[worst]:.3e}, "
            f"amplification {amps[worst]:.3g})"
        )
        warn_list.append(msg)
        _warnings.warn(
            NearEigenvalueWarning(msg, residual=float(residuals[worst]),
                                  amplification=float(amps[worst])),
            stacklevel=2,
        )

    t1 = time.perf_counter()
    oracle = None
    if compute_oracle:
        oracle = np.empty(P, dtype=complex)
        for a in range(0, P, 512):
            blk = slice(a, a + 512)
            oracle[blk] = volume_fourier_oracle(grid, c, xi[blk])
    timings["oracle"] = time.perf_counter() - t1

    table = CoefficientTable(
        k=k, b=b, mode=mode, grid_n=grid.n_per_side,
        line_angles=plan.thetas.copy(), line=s_idx, kappa=kap, theta=th,
        xi=xi, sigma=sig, values=values, oracle=oracle, flagged=flagged,
    )

    t1 = time.perf_counter()
    c_inv, residue = synthesize(table, K, inversion_grid)
    timings["synthesis"] = time.perf_counter() - t1

    if truth_fn is not None:
        truth = np.asarray(truth_fn(inversion_grid.interior_xy), dtype=float)
    else:
        resample = _bilinear_matrix(grid, inversion_grid.interior_xy)
        truth = resample @ c.values
    rel_l2, rel_linf = error_metrics(c_inv, truth)

    timings["total"] = time.perf_counter() - t0
    return ReconstructionResult(
        c_inv=c_inv, table=table, K=K, k=k, b=b, mode=mode,
        noise_level=noise_level, imag_residue=residue,
        dtn_norm=float(dtn_ratio.max(initial=0.0)),
        rel_l2=rel_l2, rel_linf=rel_linf, truth=truth,
        warnings=warn_list, timings=timings,
        resonance_proximity=proximity, near_eigenvalue=near_eig,
    )
