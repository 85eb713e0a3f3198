"""Command-line interface: build, verify, plot, reports."""

import json
import math
import os

import numpy as np
import pytest

from gcurves.cli import main, render_curve_svg
from gcurves.descent_curves import write_curve_csv
from gcurves.involute_engine import limit_spiral
from gcurves.surface_kernel import euclidean, hyperbolic, sphere


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


def _path_points(d: str) -> np.ndarray:
    return np.array(
        [[float(p) for p in pair.split()] for pair in d.replace("M", "").replace("L", ",").split(",")]
    )


@pytest.fixture(scope="module")
def geodesic_csv(workdir):
    from test_descent_curves import geodesic_curve

    path = workdir / "geodesic.csv"
    write_curve_csv(geodesic_curve(euclidean(), 2.0, 51), path)
    return str(path)


@pytest.fixture(scope="module")
def spiral_csv(workdir, a_star):
    path = workdir / "spiral.csv"
    write_curve_csv(limit_spiral(a_star, 1.0), path)
    return str(path)


@pytest.fixture(scope="module")
def bad_arc_csv(workdir):
    from test_descent_curves import circle_arc

    path = workdir / "arc.csv"
    write_curve_csv(circle_arc(1.5 * math.pi), path)
    return str(path)


class TestBuild:
    def test_default_config_passes(self, workdir, capsys):
        out = workdir / "build"
        rc = main(["build-self-involute", "--out-dir", str(out)])
        payload = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert payload["pass"] is True
        assert os.path.exists(out / "self_involute.csv")
        assert os.path.exists(out / "theta_grid.csv")
        with open(out / "theta_grid.csv") as fh:
            assert fh.readline().strip() == "t,theta,theta_prime"

    def test_custom_config_smaller_arc(self, workdir, capsys):
        cfg = workdir / "fast.cfg"
        cfg.write_text("A = 0.9\ngrid_size = 3000\ns0_max = 0.02\n")
        out = workdir / "build_small"
        rc = main(["build-self-involute", "--config", str(cfg), "--out-dir", str(out)])
        payload = json.loads(capsys.readouterr().out)
        # a steep start slope gives a valid (rotated) curve with a shorter arc
        assert rc == 0
        assert payload["metrics"]["s0"] <= 0.02 + 1e-12
        assert abs(payload["metrics"]["rotation_angle"]) > 1e-3
        assert payload["metrics"]["fundamental_slope"] is False

    def test_invalid_slope_fails_cleanly(self, workdir, capsys):
        cfg = workdir / "bad.cfg"
        cfg.write_text("A = 1.5\n")
        rc = main(["build-self-involute", "--config", str(cfg), "--out-dir", str(workdir)])
        payload = json.loads(capsys.readouterr().out)
        assert rc == 1
        assert payload["pass"] is False
        assert "error" in payload["metrics"]


class TestVerify:
    def test_geodesic_bound(self, geodesic_csv, capsys):
        rc = main(["verify", geodesic_csv, "--surface", "euclidean", "--bound", "--gcurve"])
        payload = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert payload["metrics"]["bound_ok"] is True
        assert payload["metrics"]["hull_perimeter"] == pytest.approx(4.0, abs=1e-9)

    def test_long_arc_fails_gcurve(self, bad_arc_csv, capsys):
        rc = main(["verify", bad_arc_csv, "--surface", "euclidean", "--gcurve"])
        payload = json.loads(capsys.readouterr().out)
        assert rc == 1
        assert payload["metrics"]["g_ok"] is False

    def test_spiral_maximal(self, spiral_csv, capsys):
        rc = main(["verify", spiral_csv, "--surface", "euclidean", "--maximal"])
        payload = json.loads(capsys.readouterr().out)
        assert rc == 0
        assert payload["metrics"]["maximal_ok"] is True
        assert payload["metrics"]["max_rel_perimeter_defect"] < 1e-3

    def test_report_file_written(self, geodesic_csv, workdir, capsys):
        report = workdir / "report.json"
        main(
            [
                "verify",
                geodesic_csv,
                "--surface",
                "euclidean",
                "--bound",
                "--report",
                str(report),
            ]
        )
        capsys.readouterr()
        payload = json.loads(report.read_text())
        assert payload["command"] == "verify"
        # stable key order: serialized keys are sorted
        text = report.read_text()
        assert text.index('"command"') < text.index('"inputs"') < text.index('"metrics"')

    def test_malformed_csv(self, workdir, capsys):
        bad = workdir / "malformed.csv"
        bad.write_text("s,x1,x2,x3,t1,t2,t3,kappa\n1,2,3\n")
        rc = main(["verify", str(bad), "--surface", "euclidean", "--gcurve"])
        err = capsys.readouterr().err
        assert rc == 2
        assert "line 2" in err


class TestSuite:
    def test_fast_suite_passes(self, workdir, capsys):
        report = workdir / "suite.json"
        rc = main(["suite", "--fast", "--report", str(report)])
        out = capsys.readouterr().out
        assert rc == 0
        assert out.count("[PASS]") == 9
        payload = json.loads(report.read_text())
        assert payload["pass"] is True


class TestPlot:
    def test_deterministic_output(self, spiral_csv, workdir, capsys):
        out1 = workdir / "a.svg"
        out2 = workdir / "b.svg"
        main(["plot", spiral_csv, "--surface", "euclidean", "--out", str(out1), "--hull", "--involute"])
        main(["plot", spiral_csv, "--surface", "euclidean", "--out", str(out2), "--hull", "--involute"])
        capsys.readouterr()
        assert out1.read_bytes() == out2.read_bytes()

    def test_geodesic_is_straight_segment(self, geodesic_csv, workdir, capsys):
        out = workdir / "geo.svg"
        main(["plot", geodesic_csv, "--surface", "euclidean", "--out", str(out)])
        capsys.readouterr()
        text = out.read_text()
        # one path, whose points are collinear in the svg plane
        d = text.split('<path d="')[1].split('"')[0]
        pts = np.array(
            [[float(p) for p in pair.split()] for pair in d.replace("M", "").replace("L", ",").split(",")]
        )
        v = pts - pts[0]
        cross = v[:, 0] * v[-1, 1] - v[:, 1] * v[-1, 0]
        assert np.max(np.abs(cross)) < 1e-3

    def test_klein_disc_boundary_drawn(self, workdir, capsys):
        from gcurves.descent_curves import generate_descent_curve

        c = generate_descent_curve(3, hyperbolic(), 40)
        path = workdir / "klein.csv"
        write_curve_csv(c, path)
        out = workdir / "klein.svg"
        main(["plot", str(path), "--surface", "hyperbolic", "--out", str(out)])
        capsys.readouterr()
        text = out.read_text()
        assert "<circle" in text
        # curve stays strictly inside the disc circle
        d = text.split('<path d="')[1].split('"')[0]
        pts = np.array(
            [[float(p) for p in pair.split()] for pair in d.replace("M", "").replace("L", ",").split(",")]
        )
        cx = float(text.split('cx="')[1].split('"')[0])
        cy = float(text.split('cy="')[1].split('"')[0])
        rr = float(text.split('r="')[1].split('"')[0])
        rad = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
        assert np.max(rad) < rr

    def test_involute_overlay_coincides_for_self_involute(self, spiral_csv, workdir, capsys, a_star):
        out = workdir / "overlay.svg"
        main(["plot", spiral_csv, "--surface", "euclidean", "--out", str(out), "--involute"])
        capsys.readouterr()
        text = out.read_text()
        paths = text.split('<path d="')
        curve_pts = _path_points(paths[1].split('"')[0])
        inv_pts = _path_points(paths[2].split('"')[0])
        # the involute point at string parameter s sits at arc a*s of the
        # curve, so overlay samples with a*s <= length coincide with it
        s = limit_spiral(a_star, 1.0).s
        inv_pts = inv_pts[s * a_star <= 1.0]
        a, b = curve_pts[:-1], curve_pts[1:]
        ab = b - a
        ap = inv_pts[:, None, :] - a[None, :, :]
        t = np.clip((ap * ab[None]).sum(2) / (ab * ab).sum(1)[None], 0.0, 1.0)
        d2 = ((ap - t[:, :, None] * ab[None]) ** 2).sum(2)
        assert float(np.sqrt(d2.min(axis=1)).max()) < 0.5

    def test_caption_notes_distortion(self, a_star):
        from test_descent_curves import geodesic_curve

        svg = render_curve_svg(limit_spiral(a_star, 0.5))
        assert "chart view" in svg
        svg_sphere = render_curve_svg(geodesic_curve(sphere(), 1.0))
        assert "distorted" in svg_sphere
