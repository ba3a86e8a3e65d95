"""File artifacts: CSV tables, PGM/PNG heatmaps, run manifests.

Every figure-type artifact has a machine-readable CSV twin, and every run
directory gets a JSON manifest recording the resolved config digest, seed,
toolkit version, per-stage timings, and any solver warnings.  CSV files are
RFC-4180 style: comma-separated, CRLF line endings, one header row, floats
rendered with 17 significant digits so identical runs are byte-identical
(timings live only in the manifest, which is exempt from that guarantee).

Heatmaps are 8-bit binary PGM (P5).  The value-to-gray mapping is linear:
gray = round(255 * (v - vmin) / (vmax - vmin)), with vmin/vmax recorded in
a ``<name>.range.txt`` sidecar (two lines, min then max), so the original
scale can be recovered.  Nodes outside the disk map to gray 0.  Image row 0
is the top of the picture (largest y); column 0 is the smallest x.  With
``heatmap = png`` the same 8-bit image is written through Pillow instead.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import ConfigurationError
from .geometry import BoundaryDiscretization, Grid
from .reconstruction import CoefficientTable, ReconstructionResult

__all__ = [
    "RunManifest",
    "format_value",
    "write_csv",
    "write_heatmap",
    "write_lattice_csv",
    "write_boundary_csv",
    "write_coefficient_csv",
    "write_result_row",
    "result_header",
    "write_manifest",
]


def format_value(value: Any) -> str:
    """Render one CSV cell: floats get 17 significant digits."""
    if isinstance(value, bool) or isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    if isinstance(value, (complex, np.complexfloating)):
        raise TypeError("complex values must be split into re/im columns")
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write one RFC-4180 CSV file (CRLF, header row, formatted floats)."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return p


# ---------------------------------------------------------------------------
# Heatmaps
# ---------------------------------------------------------------------------

def _to_gray(lattice: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, float, float]:
    vals = lattice[mask]
    vmin = float(vals.min()) if vals.size else 0.0
    vmax = float(vals.max()) if vals.size else 0.0
    gray = np.zeros(lattice.shape, dtype=np.uint8)
    if vmax > vmin:
        scaled = (lattice - vmin) * (255.0 / (vmax - vmin))
        gray[mask] = np.rint(scaled[mask]).astype(np.uint8)
    return gray, vmin, vmax


def write_heatmap(
    path: str | Path,
    grid: Grid,
    values: np.ndarray,
    fmt: str = "pgm",
) -> list[Path]:
    """Write a gray heatmap of per-interior-node ``values`` plus its sidecar.

    ``path`` should carry no extension; ``.pgm``/``.png`` and
    ``.range.txt`` are appended.  Returns the written paths.
    """
    if fmt == "none":
        return []
    if fmt not in ("pgm", "png"):
        raise ConfigurationError(f"unknown heatmap format {fmt!r}")
    vals = np.asarray(values, dtype=float)
    if vals.shape != (grid.n_interior,):
        raise ValueError(
            f"expected {grid.n_interior} interior values, got shape {vals.shape}"
        )
    n = grid.n_per_side
    lattice = np.zeros((n, n))
    mask = np.zeros((n, n), dtype=bool)
    lattice[grid.interior_ij[:, 0], grid.interior_ij[:, 1]] = vals
    mask[grid.interior_ij[:, 0], grid.interior_ij[:, 1]] = True

    gray, vmin, vmax = _to_gray(lattice, mask)
    image = gray.T[::-1, :]                  # row 0 = largest y, col 0 = smallest x

    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if fmt == "pgm":
        target = p.with_suffix(".pgm")
        with target.open("wb") as fh:
            fh.write(f"P5\n{n} {n}\n255\n".encode("ascii"))
            fh.write(image.tobytes())
        written.append(target)
    else:
        try:
            from PIL import Image
        except ImportError as exc:
            raise ConfigurationError(
                "heatmap = png needs the Pillow package; install it or use pgm"
            ) from exc
        target = p.with_suffix(".png")
        Image.fromarray(image, mode="L").save(target)
        written.append(target)

    sidecar = p.parent / (p.name + ".range.txt")
    sidecar.write_text("%.17g\n%.17g\n" % (vmin, vmax))
    written.append(sidecar)
    return written


# ---------------------------------------------------------------------------
# Field and table dumps
# ---------------------------------------------------------------------------

def write_lattice_csv(path: str | Path, grid: Grid, values: np.ndarray) -> Path:
    """Interior-node complex field as i, j, x, y, re, im rows."""
    vals = np.asarray(values)
    rows = (
        (
            int(i),
            int(j),
            float(x),
            float(y),
            float(np.real(v)),
            float(np.imag(v)),
        )
        for (i, j), (x, y), v in zip(grid.interior_ij, grid.interior_xy, vals)
    )
    return write_csv(path, ("i", "j", "x", "y", "re", "im"), rows)


def write_boundary_csv(
    path: str | Path, boundary: BoundaryDiscretization, values: np.ndarray
) -> Path:
    """Boundary trace as index, theta, x, y, re, im rows."""
    vals = np.asarray(values)
    rows = (
        (
            int(idx),
            float(theta),
            float(pt[0]),
            float(pt[1]),
            float(np.real(v)),
            float(np.imag(v)),
        )
        for idx, (theta, pt, v) in enumerate(
            zip(boundary.thetas, boundary.points, vals)
        )
    )
    return write_csv(path, ("index", "theta", "x", "y", "re", "im"), rows)


def write_coefficient_csv(path: str | Path, table: CoefficientTable) -> Path:
    """Recovered Fourier coefficients, one row per phase-space point."""
    header = (
        "line", "kappa", "theta", "xi_x", "xi_y", "sigma",
        "value_re", "value_im", "oracle_re", "oracle_im", "flagged",
    )

    def rows():
        for j in range(table.n_points):
            if table.oracle is not None:
                o_re = float(table.oracle[j].real)
                o_im = float(table.oracle[j].imag)
            else:
                o_re = float("nan")
                o_im = float("nan")
            yield (
                int(table.line[j]),
                float(table.kappa[j]),
                float(table.theta[j]),
                float(table.xi[j, 0]),
                float(table.xi[j, 1]),
                float(table.sigma[j]),
                float(table.values[j].real),
                float(table.values[j].imag),
                o_re,
                o_im,
                int(bool(table.flagged[j])) if table.flagged is not None else 0,
            )

    return write_csv(path, header, rows())


def result_header() -> tuple[str, ...]:
    """Column names for error-summary rows across reconstruction runs."""
    return (
        "k", "b", "K", "mode", "noise_level", "rel_l2", "rel_linf",
        "imag_residue", "dtn_norm", "resonance_proximity", "near_eigenvalue",
        "n_flagged_probes",
    )


def write_result_row(result: ReconstructionResult) -> tuple:
    flagged = result.table.flagged
    return (
        float(result.k),
        float(result.b),
        float(result.K),
        result.mode,
        float(result.noise_level),
        float(result.rel_l2) if result.rel_l2 is not None else float("nan"),
        float(result.rel_linf) if result.rel_linf is not None else float("nan"),
        float(result.imag_residue),
        float(result.dtn_norm),
        float(result.resonance_proximity),
        int(result.near_eigenvalue),
        int(flagged.sum()) if flagged is not None else 0,
    )


# ---------------------------------------------------------------------------
# Run manifest
# ---------------------------------------------------------------------------

@dataclass
class RunManifest:
    """What happened in one CLI run, for provenance and reruns."""

    config_digest: str
    seed: int
    version: str
    command: str
    timings: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)

    def record(self, paths: Iterable[Path | str]) -> None:
        for p in paths:
            self.outputs.append(str(p))


def write_manifest(path: str | Path, manifest: RunManifest) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    payload = asdict(manifest)
    payload["timings"] = {k: round(v, 6) for k, v in manifest.timings.items()}
    p.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return p
