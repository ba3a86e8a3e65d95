import csv
import json

import numpy as np
import pytest

import potrecon as pr
from potrecon.errors import ConfigurationError
from potrecon.outputs import (
    RunManifest,
    format_value,
    result_header,
    write_boundary_csv,
    write_coefficient_csv,
    write_csv,
    write_heatmap,
    write_lattice_csv,
    write_manifest,
)


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(1.0 / 3.0) == "0.33333333333333331"
    assert float(format_value(0.1)) == 0.1
    assert format_value(7) == "7"
    assert format_value(True) == "1"
    assert format_value(np.float64(2.5)) == "2.5"
    assert format_value("full") == "full"
    with pytest.raises(TypeError):
        format_value(1.0 + 2.0j)


def test_write_csv_is_rfc4180(tmp_path):
    path = write_csv(tmp_path / "t.csv", ("a", "b"), [(1.5, "x"), (2.0 / 3.0, "y")])
    raw = path.read_bytes()
    assert b"\r\n" in raw
    assert raw.count(b"\r\n") == 3
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["a", "b"]
    assert float(rows[2][0]) == 2.0 / 3.0  # full precision round-trip


def test_heatmap_pgm(tmp_path, grid60):
    values = grid60.interior_xy[:, 0]  # linear ramp in x
    paths = write_heatmap(tmp_path / "field", grid60, values, "pgm")
    assert [p.name for p in paths] == ["field.pgm", "field.range.txt"]
    raw = paths[0].read_bytes()
    header = f"P5\n{grid60.n_per_side} {grid60.n_per_side}\n255\n".encode()
    assert raw.startswith(header)
    assert len(raw) == len(header) + grid60.n_per_side**2
    pixels = np.frombuffer(raw[len(header):], dtype=np.uint8).reshape(
        grid60.n_per_side, grid60.n_per_side
    )
    assert pixels.max() == 255
    # corners are outside the disk and render as background zero
    assert pixels[0, 0] == 0 and pixels[-1, -1] == 0
    # x increases to the right in image coordinates: right half brighter
    mid = grid60.n_per_side // 2
    assert pixels[mid, -10] > pixels[mid, 9]
    lo, hi = paths[1].read_text().split()
    assert float(lo) == pytest.approx(values.min())
    assert float(hi) == pytest.approx(values.max())


def test_heatmap_vertical_orientation(tmp_path, grid60):
    values = grid60.interior_xy[:, 1]  # ramp in y
    paths = write_heatmap(tmp_path / "ramp", grid60, values, "pgm")
    raw = paths[0].read_bytes()
    n = grid60.n_per_side
    header_len = len(f"P5\n{n} {n}\n255\n")
    pixels = np.frombuffer(raw[header_len:], dtype=np.uint8).reshape(n, n)
    mid = n // 2
    # row 0 is the largest y, so the top half is brighter
    assert pixels[9, mid] > pixels[-10, mid]


def test_heatmap_png_roundtrip(tmp_path, grid60):
    pytest.importorskip("PIL")
    from PIL import Image

    values = np.hypot(grid60.interior_xy[:, 0], grid60.interior_xy[:, 1])
    paths = write_heatmap(tmp_path / "disk", grid60, values, "png")
    img = Image.open(paths[0])
    assert img.size == (grid60.n_per_side, grid60.n_per_side)
    assert img.mode == "L"


def test_heatmap_constant_field(tmp_path, grid60):
    paths = write_heatmap(tmp_path / "flat", grid60, np.ones(grid60.n_interior), "pgm")
    n = grid60.n_per_side
    raw = paths[0].read_bytes()
    pixels = np.frombuffer(raw[len(f"P5\n{n} {n}\n255\n"):], dtype=np.uint8)
    assert pixels.max() == 0  # degenerate range renders flat background


def test_heatmap_none_and_validation(tmp_path, grid60):
    assert write_heatmap(tmp_path / "skip", grid60, np.ones(grid60.n_interior), "none") == []
    with pytest.raises(ConfigurationError):
        write_heatmap(tmp_path / "bad", grid60, np.ones(grid60.n_interior), "tiff")
    with pytest.raises(ValueError):
        write_heatmap(tmp_path / "short", grid60, np.ones(3), "pgm")


def test_lattice_and_boundary_csv(tmp_path, grid60, boundary60):
    field = (grid60.interior_xy[:, 0] + 1j * grid60.interior_xy[:, 1]).astype(complex)
    lat = write_lattice_csv(tmp_path / "lat.csv", grid60, field)
    with lat.open(newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["i", "j", "x", "y", "re", "im"]
    assert len(rows) == 1 + grid60.n_interior
    first = rows[1]
    assert float(first[4]) == pytest.approx(float(first[2]))

    trace = np.exp(1j * boundary60.thetas)
    bnd = write_boundary_csv(tmp_path / "bnd.csv", boundary60, trace)
    with bnd.open(newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["index", "theta", "x", "y", "re", "im"]
    assert len(rows) == 1 + boundary60.n_points


def test_coefficient_csv(tmp_path, plan_default):
    from potrecon.reconstruction import CoefficientTable

    ell, s, kap, th, xi, sig = plan_default.points()
    keep = slice(0, 18)
    table = CoefficientTable(
        k=15.2, b=0.0, mode="full", grid_n=100,
        line_angles=plan_default.thetas.copy(),
        line=s[keep], kappa=kap[keep], theta=th[keep], xi=xi[keep],
        sigma=sig[keep], values=np.full(18, 1.0 + 2.0j),
        oracle=None, flagged=np.zeros(18, dtype=bool),
    )
    path = write_coefficient_csv(tmp_path / "coef.csv", table)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:3] == ["line", "kappa", "theta"]
    assert len(rows) == 19
    assert rows[1][6] == "1" and rows[1][7] == "2"
    assert rows[1][8] == "nan"  # absent oracle
    assert rows[1][10] == "0"


def test_result_header_matches_row_width(small_result):
    from potrecon.outputs import write_result_row

    row = write_result_row(small_result)
    assert len(row) == len(result_header())
    assert row[3] == "full"


@pytest.fixture(scope="module")
def small_result(grid60):
    from potrecon.potentials import two_bumps
    from potrecon.reconstruction import run_algorithm1

    plan = pr.build_sampling(kappa_min=0.5, kappa_max=8.0, kappa_step=0.5)
    return run_algorithm1(
        grid60, two_bumps(grid60), plan, 3.0, m=2.0, n_boundary=128,
        inversion_grid=pr.build_grid(40, 1.0, 0.7),
    )


def test_manifest_roundtrip(tmp_path):
    manifest = RunManifest(
        config_digest="ab" * 32, seed=3, version="0.1.0", command="reconstruct",
    )
    manifest.timings["total"] = 1.23456789123
    manifest.warnings.append("sample warning")
    manifest.record([tmp_path / "a.csv", tmp_path / "b.pgm"])
    out = write_manifest(tmp_path / "manifest.json", manifest)
    data = json.loads(out.read_text())
    assert data["command"] == "reconstruct"
    assert data["seed"] == 3
    assert data["timings"]["total"] == 1.234568
    assert [name.endswith((".csv", ".pgm")) for name in data["outputs"]] == [True, True]
    assert list(data) == sorted(data)
