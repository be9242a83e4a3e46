import json
import shutil

import pytest

from conftest import timed_run
from morsewitten.cli import export_flowlines, main, run_scenario, summary
from morsewitten.errors import UnknownScenario
from morsewitten.scenarios import SCENARIOS, asset_dir


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in SCENARIOS:
        assert name in out


def test_unknown_scenario(capsys):
    with pytest.raises(UnknownScenario) as err:
        run_scenario("no_such")
    assert "round_sphere" in str(err.value)
    assert main(["run", "no_such"]) == 2
    assert "tilted_torus" in capsys.readouterr().err


def test_round_sphere_report_is_byte_stable(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["run", "round_sphere", "--report", str(a)]) == 0
    assert main(["run", "round_sphere", "--report", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["match"] is True
    assert [g["betti"] for g in data["morse_homology"]] == [1, 0, 1]
    assert "timings" not in a.read_text()
    timings = json.loads((tmp_path / "a.timings.json").read_text())
    assert "critical_points" in timings
    out = capsys.readouterr().out
    assert "match" in out and "morse homology" in out


def test_tilted_torus_report():
    report, _ = timed_run("tilted_torus")
    p = report.payload
    assert report.ok
    assert [g["betti"] for g in p["morse_homology"]] == [1, 2, 1]
    assert {(c["count"], c["n"]) for c in p["connections"]} == {(2, 0)}
    assert p["complex"]["ranks"] == [1, 2, 1]


def test_untilted_torus_exits_nonzero():
    report, _ = timed_run("untilted_torus")
    assert not report.ok
    assert "violation" in summary(report)


def test_projective_plane_mesh_only(capsys):
    assert main(["run", "projective_plane"]) == 0
    assert "0+T2" in capsys.readouterr().out


def test_mesh_homology_command(capsys):
    assert main(["mesh-homology", str(asset_dir() / "rp2.off"), "--json"]) == 0
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert json.loads(last)[1] == {"degree": 1, "betti": 0, "torsion": [2]}


def test_filtration_command(capsys):
    assert main(["filtration", "tilted_torus"]) == 0
    assert "passed" in capsys.readouterr().out
    assert main(["filtration", "projective_plane"]) == 2


def test_export_flowlines(tmp_path):
    report, _ = timed_run("two_peak_sphere")
    csvs = export_flowlines(report, tmp_path, "csv")
    assert len(csvs) == 4
    lines = csvs[0].read_text().splitlines()
    assert lines[0] == "time,x,y,z" and len(lines) > 10
    (svg,) = export_flowlines(report, tmp_path, "svg", plane="xz")
    text = svg.read_text()
    assert text.startswith("<svg") and text.count("<polyline") == 4


def test_asset_dir_override(tmp_path, monkeypatch):
    shutil.copy(asset_dir() / "tetrahedron.off", tmp_path / "rp2.off")
    monkeypatch.setenv("MORSE_ASSET_DIR", str(tmp_path))
    assert asset_dir() == tmp_path
    report = run_scenario("projective_plane")
    assert not report.match
