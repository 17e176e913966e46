import hashlib

import numpy as np
import pytest

from r3sgm.cli import main
from r3sgm.datasets import random_dot_stereogram
from r3sgm.imageio import read_disparity, write_pfm, write_pgm


@pytest.fixture
def scene(tmp_path):
    s = random_dot_stereogram(height=32, width=64, seed=5)
    write_pgm(tmp_path / "l.pgm", s.left)
    write_pgm(tmp_path / "r.pgm", s.right)
    gt = np.where(np.isfinite(s.gt), s.gt * 256, 0).astype(np.uint16)
    write_pgm(tmp_path / "gt.pgm", gt)
    return tmp_path


def _digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_compute_writes_maps(scene, capsys):
    out = scene / "d.pfm"
    rc = main(["compute", "--left", str(scene / "l.pgm"), "--right", str(scene / "r.pgm"),
               "--dmax", "32", "--window", "13", "--out", str(out),
               "--dump-right", str(scene / "dr.pfm")])
    assert rc == 0
    assert read_disparity(out).shape == (32, 64)
    assert (scene / "dr.pfm").exists()
    keys = [line.split("=")[0] for line in capsys.readouterr().out.splitlines()]
    assert "density" in keys and "seconds" in keys


def test_compute_is_deterministic(scene):
    digests = []
    for name in ("a.pfm", "b.pfm"):
        main(["compute", "--left", str(scene / "l.pgm"), "--right", str(scene / "r.pgm"),
              "--dmax", "16", "--out", str(scene / name)])
        digests.append(_digest(scene / name))
    assert digests[0] == digests[1]


def test_even_window_rejected(scene, capsys):
    rc = main(["compute", "--left", str(scene / "l.pgm"), "--right", str(scene / "r.pgm"),
               "--window", "4", "--out", str(scene / "d.pfm")])
    err = capsys.readouterr().err
    assert rc != 0 and "odd" in err and len(err.strip().splitlines()) == 1


def test_eval_lines_and_csv(scene, capsys):
    gt = np.full((10, 10), 20 * 256, dtype=np.uint16)
    write_pgm(scene / "g.pgm", gt)
    est = np.full((10, 10), 20, dtype=np.int32)
    est[3, 4] = 30
    write_pfm(scene / "e.pfm", est)
    csv = scene / "eval.csv"
    args = ["eval", "--est", str(scene / "e.pfm"), "--gt", str(scene / "g.pgm"),
            "--gt-scale", "256", "--csv", str(csv)]
    assert main(args) == 0
    assert "bad_valid=0.0100" in capsys.readouterr().out.splitlines()
    main(args)
    rows = csv.read_text().splitlines()
    assert rows[0].startswith("window,") and len(rows) == 3


def test_eval_perfect_and_missing_gt(scene, capsys):
    write_pfm(scene / "e.pfm", np.full((2, 2), 4, dtype=np.int32))
    write_pgm(scene / "g.pgm", np.full((2, 2), 4, dtype=np.uint8))
    assert main(["eval", "--est", str(scene / "e.pfm"), "--gt", str(scene / "g.pgm")]) == 0
    assert "bad_valid=0.0000" in capsys.readouterr().out
    assert main(["eval", "--est", str(scene / "e.pfm"), "--gt", str(scene / "none.pgm")]) != 0


def test_sweep_six_rows(scene, capsys):
    out = scene / "sweep.csv"
    rc = main(["sweep", "--left", str(scene / "l.pgm"), "--right", str(scene / "r.pgm"),
               "--gt", str(scene / "gt.pgm"), "--gt-scale", "256", "--dmax", "16",
               "--widths", "3,5,7,9,11,13", "--csv", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 7 and [l.split(",")[0] for l in lines[1:]] == ["3", "5", "7", "9", "11", "13"]


def test_sweep_rejects_even_width(capsys):
    assert main(["sweep", "--synthetic", "--widths", "3,4"]) != 0
    assert "odd" in capsys.readouterr().err


def test_bench_single_line(capsys):
    assert main(["bench", "--size", "1242x375", "--dmax", "128"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 1 and "px_per_s=" in out[0] and "peak_buffer=" in out[0]


def test_bench_peak_independent_of_height(capsys):
    fields = []
    for size in ("96x24", "96x48"):
        main(["bench", "--size", size, "--dmax", "15", "--window", "5"])
        line = capsys.readouterr().out.strip()
        fields.append(dict(kv.split("=") for kv in line.split())["peak_buffer"])
    assert fields[0] == fields[1]
