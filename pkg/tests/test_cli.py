import json
import math
import re

from click.testing import CliRunner

from tilepress.cli import main


def run(*args, **kw):
    return CliRunner().invoke(main, list(args), **kw)


def test_gen_validate_roundtrip(tmp_path):
    path = tmp_path / "l22.json"
    res = run("gen", "lattes-2x2", "-o", str(path))
    assert res.exit_code == 0, res.output
    res = run("validate", str(path))
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["pass"] is True
    assert doc["n_tiles"] == 8
    assert doc["ramification_sum"] == 6
    assert doc["seed"] == 0


def test_gen_with_flags(tmp_path):
    path = tmp_path / "f.json"
    res = run("gen", "flap", "--k", "2", "--flaps", "1", "-o", str(path))
    assert res.exit_code == 0
    assert json.loads(path.read_text())["degree"] == 6


def test_validate_rejects_corrupted(tmp_path):
    res = run("gen", "lattes-2x2", "-o", str(tmp_path / "r.json"))
    doc = json.loads((tmp_path / "r.json").read_text())
    doc["tiles"][0]["sides"][0]["neighbor_side"] = 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    res = run("validate", str(bad))
    assert res.exit_code == 1
    assert json.loads(res.output)["pass"] is False


def test_cells_counts():
    res = run("cells", "lattes-3x3", "-n", "2")
    doc = json.loads(res.output)
    assert doc["tiles"] == 2 * 81
    assert doc["edges"] == 4 * 81
    assert doc["ramification_sum"] == doc["ramification_expected"] == 160


def test_subsys_carpet_entropy():
    res = run("subsys", "lattes-3x3", "--exclude", "w11,b11")
    doc = json.loads(res.output)
    assert abs(doc["h_top"] - math.log(8)) < 1e-9
    assert doc["primitivity"] == "stronglyPrimitive"


def test_pressure_and_rate_csv():
    res = run("pressure", "lattes-2x2", "--phi", "indicator")
    doc = json.loads(res.output)
    assert abs(doc["value"] - math.log(3 + math.e)) < 1e-9
    res = run("--format", "csv", "rate", "lattes-2x2", "--xs", "0.25:0.5:2")
    lines = res.output.strip().split("\n")
    assert lines[0] == "x,K"
    vals = [line.split(",") for line in lines[1:]]
    assert float(vals[0][1]) < 1e-9  # K at the mean
    # '.'-decimal, 12 significant digits
    assert re.fullmatch(r"[0-9.e+-]+", vals[1][1])
    assert abs(float(vals[1][1]) - (0.5 * math.log(2) + 0.5 * math.log(2 / 3))) < 1e-6


def test_error_json_and_exit_code():
    res = run("pressure", "no-such-rule")
    assert res.exit_code == 1
    err = json.loads(res.output.strip().splitlines()[-1])
    assert err["error"] == "ValueError"


def test_cap_enforced():
    res = run("--cap", "3", "cells", "lattes-2x2", "-n", "5")
    assert res.exit_code == 1


def test_bad_tol_rejected():
    res = run("--tol", "2", "cells", "lattes-2x2")
    assert res.exit_code == 1


def test_outputs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        res = run("--out", str(out), "--format", "csv", "equidist", "lattes-2x2",
                  "--phi", "indicator", "--n-range", "4:6:2")
        assert res.exit_code == 0, res.output
    fa, fb = a / "equidist.csv", b / "equidist.csv"
    assert fa.read_bytes() == fb.read_bytes()


def test_render_base_and_overlays(tmp_path):
    out = tmp_path / "svg"
    res = run("--out", str(out), "render", "lattes-2x2", "--depth", "2")
    assert res.exit_code == 0, res.output
    white = (out / "lattes-2x2-d2-white.svg").read_text()
    assert white.count("<polygon") == 16  # d^2 words per face

    res = run("--out", str(out), "render", "lattes-3x3", "--depth", "3",
              "--overlay", "subsystem", "--exclude", "w11,b11")
    assert res.exit_code == 0, res.output
    white = (out / "lattes-3x3-d3-subsystem-white.svg").read_text()
    assert white.count('class="member"') == 8**3
    assert white.count("<polygon") == 9**3

    res = run("--out", str(out), "render", "lattes-2x2", "--depth", "2",
              "--overlay", "pairs")
    assert res.exit_code == 0, res.output
    both = (out / "lattes-2x2-d2-pairs-white.svg").read_text() + \
        (out / "lattes-2x2-d2-pairs-black.svg").read_text()
    fills = re.findall(r'class="(pair-\d+)"', both)
    assert len(fills) == 2 * 16
    groups = {}
    for g in fills:
        groups[g] = groups.get(g, 0) + 1
    assert len(groups) == 16 and set(groups.values()) == {2}

    res = run("--out", str(out), "render", "flap-2-1", "--depth", "3",
              "--overlay", "flower", "--vertex", "w00:0")
    assert res.exit_code == 0, res.output
    both = (out / "flap-2-1-d3-flower-white.svg").read_text() + \
        (out / "flap-2-1-d3-flower-black.svg").read_text()
    assert both.count('class="flower"') == 2 * 2**3


def test_render_requires_geometry_flags():
    res = run("render", "lattes-2x2", "--overlay", "subsystem")
    assert res.exit_code == 1
    assert "exclude" in json.loads(res.output.strip().splitlines()[-1])["message"]


def test_ldp_law_csv():
    res = run("--format", "csv", "ldp", "lattes-2x2", "--mode", "law", "-n", "4")
    lines = res.output.strip().split("\n")
    assert lines[0] == "value,probability"
    probs = [float(line.split(",")[1]) for line in lines[1:]]
    assert abs(sum(probs) - 1.0) < 1e-9


def test_usc_csv():
    res = run("--format", "csv", "usc", "flap-2-1", "--n-range", "1:3")
    lines = res.output.strip().split("\n")
    assert lines[0] == "n,h_top,h_n,rate_n,mass_outside"
    first = lines[1].split(",")
    assert abs(float(first[1]) - math.log(4)) < 1e-9


def test_density_subcommand(tmp_path):
    targets = tmp_path / "targets.json"
    targets.write_text(json.dumps({
        "eps": 0.2,
        "targets": [
            {"weight": "1/2", "exclude_tiles": ["w11", "b11"]},
            {"weight": "1/2"},
        ],
        "observables": ["indicator"],
    }))
    res = run("density", "lattes-3x3", str(targets))
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    assert doc["success"] is True
    goal = 0.5 * math.log(8) + 0.5 * math.log(9)
    assert abs(doc["h_nu"] - goal) <= 0.2
