import json
import math

import pytest

from app.cli import main
from app.experiments import read_csv


def test_kak_command(capsys):
    assert main(["kak", "cphase:pi"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["alpha"] == pytest.approx(math.pi / 4)


def test_kak_from_matrix_file(tmp_path, capsys):
    path = tmp_path / "swap.json"
    swap = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]
    path.write_text(json.dumps({"matrix": swap}))
    assert main(["kak", str(path)]) == 0
    body = json.loads(capsys.readouterr().out)
    assert [body["alpha"], body["beta"], body["gamma"]] == pytest.approx([math.pi / 4] * 3)


def test_errors_exit_with_status_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"matrix": [[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]}))
    assert main(["kak", str(path)]) == 2
    assert "not unitary" in capsys.readouterr().err


def test_mitigate_command(capsys):
    assert main(["mitigate", "--parasitic", "cphase:9deg"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["parasitic_triple"][0] == pytest.approx(math.radians(9) / 4)


def test_recompile_command(tmp_path, capsys):
    circuit = tmp_path / "circuit.txt"
    args = ["recompile", "--target", "cz", "--native", "cz", "--restarts", "5", "--circuit-out", str(circuit)]
    assert main(args) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["native_gates_used"] == 1
    assert "NAT(q0,q1,native)" in circuit.read_text()


def test_scan_command(tmp_path):
    out = tmp_path / "scan.csv"
    args = ["scan", "--grid-step", "pi/8", "--m", "3", "--restarts", "10", "--out", str(out)]
    assert main(args) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "alpha,beta,gamma,m,infidelity,native_count"
    assert len(lines) == 13


def test_sweep_and_report_commands(tmp_path, capsys):
    spec = tmp_path / "sweep.toml"
    spec.write_text(
        'strategies = ["NoMitigate", "KAK-Approx"]\n'
        "parasitic_angles_deg = [3.0, 9.0]\n"
        "[target_family]\n"
        'kind = "iswap_grid"\n'
        "count = 2\n"
    )
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--spec", str(spec), "--out", str(out)]) == 0
    assert len(read_csv(out)) == 8
    assert main(["report", "--in", str(out)]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["crossovers"] == [{"strategy_a": "KAK-Approx", "strategy_b": "NoMitigate", "angle_deg": "no crossing"}]


def test_missing_spec_file(tmp_path):
    assert main(["sweep", "--spec", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x.csv")]) == 2
