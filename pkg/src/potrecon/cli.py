"""Command-line experiment harness.

Five subcommands cover the toolkit's workflows::

    potrecon forward      one probe's boundary data products (u0, g0, g1,
                          u - u0, g1') for the (k, kappa, y_hat) of the
                          config's [forward] section
    potrecon reconstruct  the full pipeline for every (k, m) pair in the
                          config: coefficient tables, recovered potentials,
                          error summary
    potrecon sweep-k      reconstruction at K = 2k across the config's k
                          list; error-vs-k table
    potrecon bounds       theoretical stability-bound sweep and the k*
                          report
    potrecon attenuation  reconstruction error versus damping b at fixed k,
                          with the attenuated bound alongside

Common flags: --config PATH, --out DIR, --workers N, --seed S,
--mode {full,linearized}, --noise R.  Exit codes: 0 success, 2 config
error, 3 solver failure, 4 coverage error.  Every run writes a
manifest.json recording the resolved-config digest, seed, version,
timings, and warnings; all CSV outputs are byte-identical across reruns
with the same config and seed.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .bounds import StabilityParams, omega, omega_and_kstar, theorem1_bound, theorem2_bound
from .config import ExperimentConfig, config_hash, load_config
from .errors import (
    AttenuationModeError,
    ConfigurationError,
    CoverageError,
    SolverFailure,
    TheoremHypothesisError,
)
from .geometry import Grid, boundary_nodes, build_grid
from .measurement import synthesize_measurement
from .outputs import (
    RunManifest,
    result_header,
    write_boundary_csv,
    write_coefficient_csv,
    write_csv,
    write_heatmap,
    write_lattice_csv,
    write_manifest,
    write_result_row,
)
from .potentials import gaussian_mixture, sample_mixture
from .reconstruction import ReconstructionResult, error_metrics, run_algorithm1, synthesize
from .solver import ComplexField, PotentialField, assemble, neumann_trace, solve_dirichlet
from .waves import eval_probe, make_wave_pair

__all__ = ["main"]


def _slug(value: float) -> str:
    return ("%g" % value).replace(".", "p").replace("-", "m")


def _materialize_potential(
    cfg: ExperimentConfig, grid: Grid
) -> tuple[PotentialField, Callable[[np.ndarray], np.ndarray]]:
    """Sample the configured potential on ``grid`` plus its exact evaluator."""
    resolved = cfg.potential.resolve()
    if resolved == "constant":
        radius = grid.radius

        def truth(points: np.ndarray) -> np.ndarray:
            inside = np.einsum("ij,ij->i", points, points) < radius**2
            return np.where(inside, 1.0, 0.0)

        return PotentialField(grid=grid, values=np.ones(grid.n_interior)), truth
    bumps = resolved
    return sample_mixture(grid, bumps), lambda pts: gaussian_mixture(pts, bumps)


def _reconstruct_one(
    cfg: ExperimentConfig,
    k: float,
    m: float,
    seed: int,
    workers: int,
    grid: Grid,
    c: PotentialField,
    truth_fn: Callable[[np.ndarray], np.ndarray],
    inversion_grid: Grid,
) -> ReconstructionResult:
    return run_algorithm1(
        grid,
        c,
        cfg.plan.build(),
        k,
        b=cfg.physics.b,
        m=m,
        mode=cfg.measurement.mode,
        noise_level=cfg.measurement.noise_level,
        seed=seed,
        n_boundary=cfg.domain.n_boundary,
        inversion_grid=inversion_grid,
        truth_fn=truth_fn,
        workers=workers,
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_forward(cfg: ExperimentConfig, out: Path, seed: int, workers: int,
                manifest: RunManifest) -> None:
    t0 = time.perf_counter()
    fwd = cfg.forward
    grid = build_grid(cfg.domain.n_per_side_forward, cfg.domain.half_width,
                      cfg.domain.radius)
    boundary = boundary_nodes(grid, cfg.domain.n_boundary)
    c, _ = _materialize_potential(cfg, grid)
    xi = fwd.kappa * fwd.direction()
    pair = make_wave_pair(xi, fwd.k, cfg.physics.b)

    system = assemble(grid, c, fwd.k, cfg.physics.b)
    reference = assemble(grid, None, fwd.k, cfg.physics.b)
    g0_fn = lambda pts: eval_probe(pair, pts, "u0")
    u = solve_dirichlet(system, g0_fn)
    u0h = solve_dirichlet(reference, g0_fn)
    w = ComplexField(grid=grid, values=u.values - u0h.values, dirichlet=None)

    u0_int = eval_probe(pair, grid.interior_xy, "u0")
    g0 = eval_probe(pair, boundary.points, "u0")
    g1 = neumann_trace(u, boundary)
    g1_prime = neumann_trace(w, boundary)
    manifest.timings["solve"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    manifest.record([
        write_lattice_csv(out / "u0.csv", grid, u0_int),
        write_lattice_csv(out / "u_minus_u0.csv", grid, w.values),
        write_boundary_csv(out / "g0.csv", boundary, g0),
        write_boundary_csv(out / "g1.csv", boundary, g1),
        write_boundary_csv(out / "g1_prime.csv", boundary, g1_prime),
    ])
    fmt = cfg.output.heatmap
    manifest.record(write_heatmap(out / "u0_re", grid, u0_int.real, fmt))
    manifest.record(write_heatmap(out / "u_minus_u0_re", grid, w.values.real, fmt))
    manifest.timings["write"] = time.perf_counter() - t0


def cmd_reconstruct(cfg: ExperimentConfig, out: Path, seed: int, workers: int,
                    manifest: RunManifest) -> None:
    grid = build_grid(cfg.domain.n_per_side_forward, cfg.domain.half_width,
                      cfg.domain.radius)
    inv = build_grid(cfg.domain.n_per_side_inversion, cfg.domain.half_width,
                     cfg.domain.radius)
    c, truth_fn = _materialize_potential(cfg, grid)
    truth = np.asarray(truth_fn(inv.interior_xy), dtype=float)
    m_list = sorted(cfg.physics.m)
    error_rows = []
    for k in cfg.physics.k:
        t0 = time.perf_counter()
        res = _reconstruct_one(cfg, k, m_list[-1], seed, workers, grid, c,
                               truth_fn, inv)
        manifest.timings[f"k_{_slug(k)}"] = time.perf_counter() - t0
        manifest.warnings.extend(res.warnings)
        manifest.record([
            write_coefficient_csv(out / f"coefficients_k{_slug(k)}.csv", res.table)
        ])
        for m in m_list:
            if m == m_list[-1]:
                c_inv, residue = res.c_inv, res.imag_residue
                rel_l2, rel_linf = res.rel_l2, res.rel_linf
            else:
                c_inv, residue = synthesize(res.table, m * k, inv)
                rel_l2, rel_linf = error_metrics(c_inv, truth)
            partial = replace(
                res, c_inv=c_inv, K=m * k, imag_residue=residue,
                rel_l2=rel_l2, rel_linf=rel_linf,
            )
            error_rows.append(write_result_row(partial))
            stem = f"c_inv_k{_slug(k)}_m{_slug(m)}"
            if cfg.output.write_grids:
                manifest.record([
                    write_lattice_csv(out / f"{stem}.csv", inv, c_inv.values)
                ])
            manifest.record(
                write_heatmap(out / stem, inv, c_inv.values, cfg.output.heatmap)
            )
    manifest.record([write_csv(out / "errors.csv", result_header(), error_rows)])


def cmd_sweep_k(cfg: ExperimentConfig, out: Path, seed: int, workers: int,
                manifest: RunManifest) -> None:
    grid = build_grid(cfg.domain.n_per_side_forward, cfg.domain.half_width,
                      cfg.domain.radius)
    inv = build_grid(cfg.domain.n_per_side_inversion, cfg.domain.half_width,
                     cfg.domain.radius)
    c, truth_fn = _materialize_potential(cfg, grid)
    rows = []
    for k in cfg.physics.k:
        t0 = time.perf_counter()
        res = _reconstruct_one(cfg, k, 2.0, seed, workers, grid, c, truth_fn, inv)
        manifest.timings[f"k_{_slug(k)}"] = time.perf_counter() - t0
        manifest.warnings.extend(res.warnings)
        rows.append(write_result_row(res))
        if cfg.output.write_grids:
            manifest.record([
                write_lattice_csv(out / f"c_inv_k{_slug(k)}.csv", inv,
                                  res.c_inv.values)
            ])
        manifest.record(
            write_heatmap(out / f"c_inv_k{_slug(k)}", inv, res.c_inv.values,
                          cfg.output.heatmap)
        )
    manifest.record([write_csv(out / "error_vs_k.csv", result_header(), rows)])


def cmd_bounds(cfg: ExperimentConfig, out: Path, seed: int, workers: int,
               manifest: RunManifest) -> None:
    t0 = time.perf_counter()
    b = cfg.physics.b
    header = ["k", "bound", "case_a", "case_b", "regime", "omega",
              "kstar_flag", "status"]
    if b > 0.0:
        header.insert(6, "theorem2")
    rows: list[tuple] = []
    try:
        params = cfg.bounds.params()
    except TheoremHypothesisError as exc:
        reason = f"rejected: {exc}"
        ks = np.geomspace(1.0 + 1e-9, 100.0, 128)
        for k in ks:
            row = [float(k), float("nan"), float("nan"), float("nan"), "",
                   float("nan"), 0, reason]
            if b > 0.0:
                row.insert(6, float("nan"))
            rows.append(tuple(row))
        manifest.warnings.append(reason)
        manifest.record([write_csv(out / "bounds.csv", header, rows)])
        manifest.timings["bounds"] = time.perf_counter() - t0
        return

    star = omega_and_kstar(params)
    k_star, k_eval, omega_min = star.k_star, star.k_eval, star.omega_min
    k_hi = max(params.E, 2.0 * k_eval, 10.0)
    ks = np.geomspace(1.0 + 1e-9, k_hi, 256)
    flag_idx = int(np.argmin(np.abs(ks - k_eval)))
    for i, k in enumerate(ks):
        bound = theorem1_bound(float(k), params)
        row = [
            float(k), float(bound.total), float(bound.case_a),
            float(bound.case_b), bound.regime, float(omega(float(k), params)),
            int(i == flag_idx), "ok",
        ]
        if b > 0.0:
            row.insert(6, float(theorem2_bound(float(k), params, b)))
        rows.append(tuple(row))
    manifest.record([write_csv(out / "bounds.csv", header, rows)])

    report_rows = [
        ("k_star", float(k_star)),
        ("k_eval", float(k_eval)),
        ("omega_min", float(omega_min)),
        ("omega_at_1", float(omega(1.0, params))),
        ("E", float(params.E)),
    ]
    manifest.record([write_csv(out / "kstar.csv", ("quantity", "value"), report_rows)])
    manifest.timings["bounds"] = time.perf_counter() - t0


def cmd_attenuation(cfg: ExperimentConfig, out: Path, seed: int, workers: int,
                    manifest: RunManifest, b_values: Sequence[float]) -> None:
    if not b_values:
        raise ConfigurationError("attenuation needs at least one b value")
    if any(bv <= 0.0 for bv in b_values):
        raise AttenuationModeError(
            f"attenuation sweep needs positive b values, got {tuple(b_values)}"
        )
    grid = build_grid(cfg.domain.n_per_side_forward, cfg.domain.half_width,
                      cfg.domain.radius)
    inv = build_grid(cfg.domain.n_per_side_inversion, cfg.domain.half_width,
                     cfg.domain.radius)
    c, truth_fn = _materialize_potential(cfg, grid)
    k = cfg.physics.k[0]
    m = cfg.physics.m[0]
    try:
        params: StabilityParams | None = cfg.bounds.params()
    except TheoremHypothesisError:
        params = None

    header = list(result_header()) + ["theorem2"]
    rows = []
    for bv in b_values:
        t0 = time.perf_counter()
        cfg_b = replace(cfg, physics=replace(cfg.physics, b=float(bv)))
        res = _reconstruct_one(cfg_b, k, m, seed, workers, grid, c, truth_fn, inv)
        manifest.timings[f"b_{_slug(bv)}"] = time.perf_counter() - t0
        manifest.warnings.extend(res.warnings)
        t2 = theorem2_bound(k, params, float(bv)) if params is not None else float("nan")
        rows.append(write_result_row(res) + (float(t2),))
        if cfg.output.write_grids:
            manifest.record([
                write_lattice_csv(out / f"c_inv_b{_slug(bv)}.csv", inv,
                                  res.c_inv.values)
            ])
    manifest.record([write_csv(out / "error_vs_b.csv", header, rows)])


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=None,
                        help="experiment config file (INI); defaults throughout")
    common.add_argument("--out", metavar="DIR", default=None,
                        help="output directory (overrides [output] directory)")
    common.add_argument("--workers", metavar="N", type=int, default=1,
                        help="probe-solve fan-out width (default 1)")
    common.add_argument("--seed", metavar="S", type=int, default=0,
                        help="noise seed (default 0)")
    common.add_argument("--mode", choices=("full", "linearized"), default=None,
                        help="override [measurement] mode")
    common.add_argument("--noise", metavar="R", type=float, default=None,
                        help="override [measurement] noise_level")

    parser = argparse.ArgumentParser(
        prog="potrecon",
        description="Reconstruction toolkit for a disk-supported Schrodinger "
                    "potential from linearized boundary data at large wavenumber.",
    )
    parser.add_argument("--version", action="version", version=f"potrecon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("forward", parents=[common],
                   help="dump one probe's boundary data products")
    sub.add_parser("reconstruct", parents=[common],
                   help="run the full reconstruction pipeline")
    sub.add_parser("sweep-k", parents=[common],
                   help="reconstruction error across the config's k list at K = 2k")
    sub.add_parser("bounds", parents=[common],
                   help="theoretical stability-bound sweep and k* report")
    att = sub.add_parser("attenuation", parents=[common],
                         help="reconstruction error versus damping b at fixed k")
    att.add_argument("--b-values", metavar="LIST", default="0.5,1,2",
                     help="comma-separated positive damping values (default 0.5,1,2)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            cfg = load_config(path=args.config)
        else:
            cfg = ExperimentConfig()
        if args.mode is not None:
            cfg = replace(cfg, measurement=replace(cfg.measurement, mode=args.mode))
        if args.noise is not None:
            if args.noise < 0.0:
                raise ConfigurationError(f"--noise must be nonnegative, got {args.noise}")
            cfg = replace(cfg, measurement=replace(cfg.measurement,
                                                   noise_level=args.noise))
        if args.out is not None:
            cfg = replace(cfg, output=replace(cfg.output, directory=args.out))
        if args.workers < 1:
            raise ConfigurationError(f"--workers must be at least 1, got {args.workers}")

        out = Path(cfg.output.directory)
        out.mkdir(parents=True, exist_ok=True)
        manifest = RunManifest(
            config_digest=config_hash(cfg, args.seed),
            seed=args.seed,
            version=__version__,
            command=args.command,
        )
        t0 = time.perf_counter()
        if args.command == "forward":
            cmd_forward(cfg, out, args.seed, args.workers, manifest)
        elif args.command == "reconstruct":
            cmd_reconstruct(cfg, out, args.seed, args.workers, manifest)
        elif args.command == "sweep-k":
            cmd_sweep_k(cfg, out, args.seed, args.workers, manifest)
        elif args.command == "bounds":
            cmd_bounds(cfg, out, args.seed, args.workers, manifest)
        else:
            try:
                b_values = tuple(
                    float(p) for p in str(args.b_values).split(",") if p.strip()
                )
            except ValueError as exc:
                raise ConfigurationError(
                    f"--b-values must be comma-separated numbers: {exc}"
                ) from exc
            cmd_attenuation(cfg, out, args.seed, args.workers, manifest, b_values)
        manifest.timings["total"] = time.perf_counter() - t0
        manifest_path = write_manifest(out / "manifest.json", manifest)
        for line in manifest.warnings:
            print(f"warning: {line}", file=sys.stderr)
        for path in manifest.outputs + [str(manifest_path)]:
            print(f"wrote {path}")
        return 0
    except (ConfigurationError, TheoremHypothesisError, AttenuationModeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CoverageError as exc:
        print(f"coverage error: {exc}", file=sys.stderr)
        return 4
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
