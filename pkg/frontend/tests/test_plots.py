import math
import os

import pytest

from skinplot import PlotJob, SchemaMismatch, read_table, render, contour_lines
from skinplot.jobs import density_columns
from skinplot.marching import is_closed
from skinplot.cli import main


def write_csv(path, text):
    with open(path, "w") as f:
        f.write(text)
    return str(path)


SERIES = ("t,n_1,n_2,n_3,I_total,S,log_norm\n"
          "0.0,1,0,1,0.0,0.0,0.0\n"
          "0.5,0.8,0.3,0.9,0.1,0.2,0.01\n"
          "1.0,0.6,0.5,0.9,0.12,0.3,0.02\n"
          "1.5,0.5,0.6,0.9,0.11,0.35,0.02\n"
          "2.0,0.5,0.6,0.9,0.1,0.36,0.03\n")


def test_read_table_checks_columns(tmp_path):
    p = write_csv(tmp_path / "a.csv", "x,n_1\n1,2\n")
    with pytest.raises(SchemaMismatch) as err:
        read_table(p, "density_heatmap")
    assert "'t'" in str(err.value)


def test_read_table_checks_column_family(tmp_path):
    p = write_csv(tmp_path / "a.csv", "t,S\n1,2\n")
    with pytest.raises(SchemaMismatch) as err:
        read_table(p, "density_heatmap")
    assert "n_" in str(err.value)


def test_read_table_empty_file(tmp_path):
    p = write_csv(tmp_path / "a.csv", "")
    with pytest.raises(SchemaMismatch):
        read_table(p, "norm_growth")


def test_read_table_header_only(tmp_path):
    p = write_csv(tmp_path / "a.csv", "t,log_norm\n")
    with pytest.raises(SchemaMismatch):
        read_table(p, "norm_growth")


def test_read_table_non_numeric(tmp_path):
    p = write_csv(tmp_path / "a.csv", "t,log_norm\n0.0,abc\n")
    with pytest.raises(SchemaMismatch) as err:
        read_table(p, "norm_growth")
    assert "abc" in str(err.value)


def test_read_table_ragged_row(tmp_path):
    p = write_csv(tmp_path / "a.csv", "t,log_norm\n0.0,1.0,2.0\n")
    with pytest.raises(SchemaMismatch):
        read_table(p, "norm_growth")


def test_density_columns_numeric_order():
    header = ["t", "n_2", "n_10", "n_1", "S"]
    assert density_columns(header) == [3, 1, 2]


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        PlotJob("pie_chart", "a.csv", "a.svg")


# marching squares ----------------------------------------------------------

def lingrid(lo, hi, n):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def test_contour_circle_is_closed():
    xs = lingrid(-2.0, 2.0, 81)
    ys = lingrid(-2.0, 2.0, 81)
    grid = [[x * x + y * y for x in xs] for y in ys]
    lines = contour_lines(xs, ys, grid, 1.0)
    assert len(lines) == 1
    loop = lines[0]
    assert is_closed(loop)
    for x, y in loop:
        assert abs(math.hypot(x, y) - 1.0) < 0.01


def test_contour_plane_is_open():
    xs = lingrid(-2.0, 2.0, 21)
    ys = lingrid(-1.0, 1.0, 11)
    grid = [[x for x in xs] for y in ys]
    lines = contour_lines(xs, ys, grid, 0.5)
    assert len(lines) == 1
    line = lines[0]
    assert not is_closed(line)
    for x, y in line:
        assert abs(x - 0.5) < 1e-12
    ends = sorted([line[0][1], line[-1][1]])
    assert ends == [-1.0, 1.0]


def test_contour_level_outside_range():
    xs = ys = lingrid(0.0, 1.0, 5)
    grid = [[0.0 for _ in xs] for _ in ys]
    assert contour_lines(xs, ys, grid, 2.0) == []


def test_contour_saddle_does_not_crash():
    xs = ys = lingrid(-1.0, 1.0, 9)
    grid = [[x * y for x in xs] for y in ys]
    lines = contour_lines(xs, ys, grid, 0.0)
    assert lines
    assert all(len(line) >= 2 for line in lines)


def test_contour_nested_levels():
    xs = ys = lingrid(-2.0, 2.0, 41)
    grid = [[x * x + y * y for x in xs] for y in ys]
    inner = contour_lines(xs, ys, grid, 0.25)
    outer = contour_lines(xs, ys, grid, 2.25)
    assert len(inner) == 1 and len(outer) == 1
    bi = bbox(inner[0])
    bo = bbox(outer[0])
    assert bo[0] < bi[0] and bi[1] < bo[1]
    assert bo[2] < bi[2] and bi[3] < bo[3]


def bbox(line):
    xs = [p[0] for p in line]
    ys = [p[1] for p in line]
    return min(xs), max(xs), min(ys), max(ys)


# rendering -----------------------------------------------------------------

def test_render_all_kinds_from_synthetic_tables(tmp_path):
    series = write_csv(tmp_path / "series.csv", SERIES)
    spectrum = write_csv(tmp_path / "spec.csv",
                         "re,im,residual\n-1.0,0.0,1e-20\n0.0,0.5,1e-20\n1.0,-0.5,1e-20\n")
    norms = write_csv(tmp_path / "norms.csv",
                      "t,log_norm\n0.0,0.0\n0.5,0.7\n1.0,1.5\n1.5,2.1\n")
    wf_rows = ["site,index,abs_psi"]
    for idx in range(2):
        for site in range(1, 9):
            val = math.exp(-(8 - site) * (1.0 + 0.1 * idx))
            wf_rows.append("%d,%d,%.6e" % (site, idx, val))
    wf_rows.append("1,2,0.0")
    wf = write_csv(tmp_path / "wf.csv", "\n".join(wf_rows) + "\n")
    grid_rows = ["re,im,log10_smin"]
    for im in lingrid(-1.0, 1.0, 9):
        for re in lingrid(-2.0, 2.0, 17):
            grid_rows.append("%g,%g,%g" % (re, im, -3.0 + re * re + im * im))
    grid = write_csv(tmp_path / "grid.csv", "\n".join(grid_rows) + "\n")

    inputs = {"density_heatmap": series, "steady_profile": series,
              "pseudo_contour": grid, "wavefunction_log": wf,
              "norm_growth": norms, "spectrum_scatter": spectrum}
    for kind, src in inputs.items():
        out = tmp_path / ("%s.svg" % kind)
        render(PlotJob(kind, src, str(out)))
        data = out.read_bytes()
        assert data.startswith(b"<?xml")
        assert b"</svg>" in data


def test_render_is_deterministic(tmp_path):
    src = write_csv(tmp_path / "n.csv",
                    "t,log_norm\n0.0,0.0\n1.0,1.1\n2.0,2.3\n")
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    render(PlotJob("norm_growth", src, str(a)))
    render(PlotJob("norm_growth", src, str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_pseudo_contour_needs_two_dimensional_grid(tmp_path):
    src = write_csv(tmp_path / "g.csv",
                    "re,im,log10_smin\n0.0,0.0,-1\n0.0,1.0,-2\n")
    with pytest.raises(SchemaMismatch):
        render(PlotJob("pseudo_contour", src, str(tmp_path / "g.svg")))


# command line --------------------------------------------------------------

def test_cli_renders(tmp_path):
    src = write_csv(tmp_path / "n.csv", "t,log_norm\n0.0,0.0\n1.0,1.0\n")
    out = tmp_path / "n.svg"
    assert main(["norm_growth", "--in", src, "--out", str(out)]) == 0
    assert out.exists()


def test_cli_unknown_kind_usage_error(tmp_path):
    assert main(["pie_chart", "--in", "a.csv", "--out", "a.svg"]) == 2


def test_cli_bad_levels_usage_error(tmp_path):
    src = write_csv(tmp_path / "n.csv", "t,log_norm\n0.0,0.0\n")
    assert main(["pseudo_contour", "--in", src, "--out",
                 str(tmp_path / "o.svg"), "--levels", "a,b"]) == 2


def test_cli_schema_mismatch_writes_nothing(tmp_path):
    src = write_csv(tmp_path / "bad.csv", "x,y\n1,2\n")
    out = tmp_path / "bad.svg"
    assert main(["norm_growth", "--in", src, "--out", str(out)]) == 3
    assert not out.exists()


def test_cli_empty_csv_writes_nothing(tmp_path):
    src = write_csv(tmp_path / "empty.csv", "")
    out = tmp_path / "empty.svg"
    assert main(["spectrum_scatter", "--in", src, "--out", str(out)]) == 3
    assert not out.exists()


def test_cli_missing_input_file(tmp_path):
    out = tmp_path / "o.svg"
    assert main(["norm_growth", "--in", str(tmp_path / "nope.csv"),
                 "--out", str(out)]) == 3
    assert not out.exists()


def test_cli_options_pass_through(tmp_path):
    series = write_csv(tmp_path / "series.csv", SERIES)
    assert main(["steady_profile", "--in", series, "--out",
                 str(tmp_path / "p.svg"), "--window", "1.0"]) == 0
    grid_rows = ["re,im,log10_smin"]
    for im in lingrid(-1.0, 1.0, 5):
        for re in lingrid(-1.0, 1.0, 5):
            grid_rows.append("%g,%g,%g" % (re, im, -2.0 + re * re + im * im))
    grid = write_csv(tmp_path / "grid.csv", "\n".join(grid_rows) + "\n")
    assert main(["pseudo_contour", "--in", grid, "--out",
                 str(tmp_path / "g.svg"), "--levels", "-1.5,-1.0"]) == 0
    wf = write_csv(tmp_path / "wf.csv",
                   "site,index,abs_psi\n1,0,1e-6\n2,0,1e-4\n3,0,1e-2\n4,0,1.0\n")
    assert main(["wavefunction_log", "--in", wf, "--out",
                 str(tmp_path / "w.svg"), "--xi", "0.91"]) == 0
