import json

import pytest

from sensorcover.cli import main, parse_range
from sensorcover.geometry import instance_from_json
from sensorcover.render import read_pgm
from sensorcover.solver import solve_full


def run(argv):
    return main([str(a) for a in argv])


def test_parse_range():
    assert parse_range("3:12:1") == [float(v) for v in range(3, 13)]
    assert parse_range("3:4:0.5") == [3.0, 3.5, 4.0]
    assert parse_range("5.5") == [5.5]


def test_generate_by_density(tmp_path):
    out = tmp_path / "inst.json"
    assert run(["generate", "--gamma", 4, "--phi", 6, "--base-count", 50, "--seed", 9, "--out", out]) == 0
    inst = instance_from_json(out.read_text())
    assert (inst.params.M, inst.params.N, inst.params.seed) == (50, 75, 9)


def test_generate_raw_params_to_stdout(capsys):
    assert run(["generate", "--M", 5, "--N", 3, "--a", 0.1, "--A", 2.0]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["params"]["A"] == 2.0 and len(doc["points"]) == 5


def test_classify_zero_points(tmp_path, capsys):
    inst = tmp_path / "empty.json"
    assert run(["generate", "--M", 0, "--N", 4, "--a", 0.05, "--out", inst]) == 0
    assert run(["classify", inst]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["set_labels"] == ["NonCovering"] * 4 and doc["necessary_sets"] == []


def test_file_round_trip_matches_in_process(tmp_path):
    inst_path, cls_path, sol_path = tmp_path / "i.json", tmp_path / "c.json", tmp_path / "s.json"
    assert run(["generate", "--gamma", 3, "--phi", 3, "--base-count", 60, "--seed", 2, "--out", inst_path]) == 0
    assert run(["classify", inst_path, "--out", cls_path]) == 0
    assert run(["solve", inst_path, "--out", sol_path]) == 0
    inst = instance_from_json(inst_path.read_text())
    sol = solve_full(inst)
    assert json.loads(sol_path.read_text()) == json.loads(sol.to_json())
    assert json.loads(cls_path.read_text()) == sol.classification.to_dict()


@pytest.mark.parametrize(
    "argv",
    [
        ["generate", "--gamma", 3],
        ["generate", "--gamma", -1, "--phi", 2],
        ["generate", "--bogus"],
        ["sweep", "--gamma-range", "3:x:1"],
        ["frobnicate"],
        [],
    ],
)
def test_invalid_arguments_exit_1(argv, capsys):
    assert run(argv) == 1
    assert capsys.readouterr().err


def test_malformed_instance_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["classify", bad]) == 1
    assert run(["solve", tmp_path / "missing.json"]) == 1


def _sweep(tmp_path, name, extra=()):
    out = tmp_path / f"{name}.csv"
    raw = tmp_path / f"{name}.raw.csv"
    argv = ["sweep", "--gamma-range", "3:12:9", "--phi-range", "3:12:9", "--reps", 3, "--base-count", 100,
            "--seed", 5, "--out", out, "--emit-raw", raw, "--quiet", *extra]
    assert run(argv) == 0
    return out, raw


def test_sweep_outputs_are_byte_identical(tmp_path):
    a, a_raw = _sweep(tmp_path, "a")
    b, b_raw = _sweep(tmp_path, "b", ["--threads", 2])
    assert a.read_bytes() == b.read_bytes()
    assert a_raw.read_bytes() == b_raw.read_bytes()
    lines = a.read_text().splitlines()
    assert len(lines) == 1 + 4
    assert lines[0].startswith("gamma,phi,reps,uncov_pts_mean,uncov_pts_std")
    meta = json.loads(a.with_suffix(".meta.json").read_text())
    assert meta["std"].startswith("population") and meta["rng"]


def test_render_from_sweep(tmp_path):
    agg, _ = _sweep(tmp_path, "grid")
    img = tmp_path / "uncov.pgm"
    assert run(["render", agg, "--metric", "uncov_pts_mean", "--block", 4, "--out", img]) == 0
    pix = read_pgm(img)
    assert pix.shape == (8, 8)
    # origin (gamma=3, phi=3) is bottom-left, (12, 12) is top-right
    assert pix[0, -1] < pix[-1, 0]
    assert img.with_suffix(".legend.txt").exists() and img.with_suffix(".matrix.txt").exists()


def test_render_missing_metric(tmp_path, capsys):
    agg, _ = _sweep(tmp_path, "m")
    assert run(["render", agg, "--metric", "nope_mean", "--out", tmp_path / "x.pgm"]) == 1
    assert "nope_mean" in capsys.readouterr().err


def test_classify_redundant_flag(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    assert main(["generate", "--gamma", "6", "--phi", "4", "--base-count", "40", "--seed", "2", "--out", str(inst)]) == 0
    assert main(["classify", str(inst)]) == 0
    plain = json.loads(capsys.readouterr().out)
    assert main(["classify", str(inst), "--redundant-sets"]) == 0
    extra = json.loads(capsys.readouterr().out)
    assert "Redundant" not in plain["set_labels"] and "Redundant" in extra["set_labels"]
    assert main(["solve", str(inst), "--redundant-sets"]) == 0
    assert main(["solve", str(inst)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(json.loads(out[0])["chosen_sets"]) == len(json.loads(out[1])["chosen_sets"])
