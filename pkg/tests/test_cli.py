import json
import subprocess
import sys

import pytest

from hypercomb.cli import main

from .conftest import SQUARE_TEXT


def run_cli(args):
    return main(list(args))


def test_gen_and_reingest(tmp_path):
    out = tmp_path / "run"
    assert run_cli(["gen", "--family", "free:2", "--radius", "3",
                    "--out", str(out)]) == 0
    text = (out / "graph.txt").read_text()
    assert text.startswith("base 1\nradius 3\ntrust 1\n")
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["n_vertices"] == 53


def test_delta_on_square_file(tmp_path):
    graph_file = tmp_path / "square.txt"
    graph_file.write_text(SQUARE_TEXT)
    out = tmp_path / "run"
    assert run_cli(["delta", "--graph", str(graph_file),
                    "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["delta"] == 2
    assert report["mode"] == "exact"
    assert report["triples_scanned"] > 0
    assert "worst_triple" in report


def test_bicomb_reports_chain_and_bounds(tmp_path):
    out = tmp_path / "run"
    code = run_cli(["bicomb", "ab", "BA", "--family", "free:2", "--radius", "4",
                    "--no-trust-check", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["bounds"]["ok"]
    assert len(report["chain"]) == 4  # the geodesic has four edges


def test_verify_all_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        code = run_cli(["verify-all", "--family", "cyclic:3,3", "--radius", "5",
                        "--seed", "7", "--extended-sources", "5",
                        "--extended-targets", "6", "--out", str(out)])
        assert code == 0
    r1 = (out1 / "report.json").read_bytes()
    r2 = (out2 / "report.json").read_bytes()
    assert r1 == r2
    m1 = json.loads((out1 / "manifest.json").read_text())
    m2 = json.loads((out2 / "manifest.json").read_text())
    m1["config"].pop("out")
    m2["config"].pop("out")
    assert m1 == m2
    assert m1["n_violations"] == 0


def test_unknown_flag_exits_with_usage_error():
    with pytest.raises(SystemExit) as exc:
        run_cli(["delta", "--family", "free:2", "--radius", "2",
                 "--definitely-not-a-flag"])
    assert exc.value.code == 2


def test_missing_source_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run_cli(["delta"])
    assert exc.value.code == 2


def test_size_cap_exit_code(tmp_path):
    code = run_cli(["gen", "--family", "free:2", "--radius", "9",
                    "--vertex-cap", "100", "--out", str(tmp_path / "x")])
    assert code == 3


def test_area_sweep_and_decay(tmp_path):
    out = tmp_path / "area"
    assert run_cli(["area-sweep", "--family", "cyclic:3,3", "--radius", "6",
                    "--samples", "300", "--seed", "3",
                    "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["sup"] in ("0", "3")
    assert (out / "raw.csv").read_text().startswith("a,b,c,area")

    out2 = tmp_path / "decay"
    assert run_cli(["decay", "--family", "free:2", "--radius", "5",
                    "--samples", "120", "--seed", "5",
                    "--out", str(out2)]) == 0
    report = json.loads((out2 / "report.json").read_text())
    assert report["bb"]["violations"] == 0
    assert report["aa"]["violations"] == 0
    assert report["main"]["violations"] == 0


def test_ideal_and_cocycle_commands(tmp_path):
    out = tmp_path / "ideal"
    code = run_cli(["ideal", "--family", "free:2", "--radius", "6",
                    "--xi", "aaaaaa", "--eta", "bbbbbb", "--probe-x", "1",
                    "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["conditions"]["ok"]
    assert report["nonzero_edge"]["found"]

    out2 = tmp_path / "cocycle"
    code = run_cli(["cocycle", "--family", "free:2", "--radius", "6",
                    "--triple", "aaaaaa", "bbbbbb", "BBBBBB",
                    "--out", str(out2)])
    assert code == 0
    report = json.loads((out2 / "report.json").read_text())
    assert report["witness"]["found"]
    assert report["permutation_law"]["invariant_under_s3"]
    assert report["params"]["R"] == 307


def test_export_dot(tmp_path):
    out = tmp_path / "dot"
    assert run_cli(["export-dot", "--family", "cyclic:2,2", "--radius", "2",
                    "--out", str(out)]) == 0
    dot = (out / "graph.dot").read_text()
    assert dot.startswith("graph ball {")
    assert dot.count(" -- ") == 4


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "hypercomb.cli", "--help"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verify-all" in proc.stdout
