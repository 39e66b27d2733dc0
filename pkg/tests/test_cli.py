import json
import pytest

from aqolab.cli import main


@pytest.fixture()
def grover_family(tmp_path):
    path = tmp_path / "grover.json"
    path.write_text(json.dumps({"family": "grover", "d0": 1}))
    return str(path)


@pytest.fixture()
def triangle(tmp_path):
    path = tmp_path / "tri.json"
    path.write_text(
        json.dumps({"n": 3, "couplings": [[0, 1, 1], [1, 2, 1], [0, 2, 1]], "fields": [0, 0, 0]})
    )
    return str(path)


def test_spectrum_prints_levels(triangle, capsys):
    assert main(["spectrum", triangle]) == 0
    out = capsys.readouterr().out
    assert "(-1,6)" in out and "(3,2)" in out


def test_gap_scan_csv(grover_family, tmp_path):
    out = tmp_path / "scan.csv"
    assert main(["gap-scan", grover_family, "--n", "14", "--grid", "200", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "s,g_true,g_lower,region"
    assert len(lines) == 201
    for line in lines[1:]:
        s, g, lo, region = line.split(",")
        assert float(lo) <= float(g) + 1e-12
        assert region in ("left", "window", "right")


def test_certify_json(grover_family, capsys):
    assert main(["certify", grover_family, "--n", "14"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["max_soundness_violation"] <= 1e-12
    assert payload["sandwich_violations"] == 0


def test_schedule_summary(grover_family, tmp_path):
    summary = tmp_path / "plan.json"
    csv = tmp_path / "plan.csv"
    assert main([
        "schedule", grover_family, "--n", "12", "--out", str(csv),
        "--summary", str(summary),
    ]) == 0
    plan = json.loads(summary.read_text())
    assert set(plan) == {"p", "eps", "c", "B1", "B2", "T"}
    assert plan["T"] > 0


def test_evolve_report(grover_family, capsys):
    assert main(["evolve", grover_family, "--n", "10", "--c", "0.07", "--time-cap", "2000"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["fidelity"] >= 0.8
    assert payload["norm_drift"] <= 1e-8


def test_scaling_csv(grover_family, tmp_path):
    out = tmp_path / "scaling.csv"
    assert main([
        "scaling", grover_family, "--n-min", "8", "--n-max", "10",
        "--time-cap", "2000", "--out", str(out),
    ]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,T,fidelity,g_min"
    assert lines[-1].startswith("# slope_log2T_vs_n,")


def test_extract_exact(triangle, capsys):
    assert main(["extract", triangle, "--oracle", "exact"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert sum(payload["degeneracies"]) == 2 ** 3
    assert payload["degeneracies"] == [6, 2]


def test_extract_noisy_and_prob(triangle, capsys):
    assert main(["extract", triangle, "--oracle", "noisy:1/100000000"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["degeneracies"] == [6, 2]
    assert main(["extract", triangle, "--oracle", "prob:0:0.9", "--k-samples", "16"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["degeneracies"] == [6, 2]


def test_sat_verdicts(tmp_path, capsys):
    sat = tmp_path / "sat.cnf"
    sat.write_text("p cnf 3 1\n1 2 3 0\n")
    assert main(["sat", str(sat)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["satisfiable"] is True and payload["min_energy"] == "0/1"
    unsat = tmp_path / "unsat.cnf"
    unsat.write_text("p cnf 1 4\n1 1 1 0\n1 1 1 0\n-1 -1 -1 0\n-1 -1 -1 0\n")
    assert main(["sat", str(unsat)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["satisfiable"] is False and payload["min_energy"] == "1/12"


def test_verify_bounds_csv(grover_family, capsys):
    assert main(["verify-bounds", grover_family, "--n", "8", "--points", "10"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("s,gap,ratio_p_prime")
    assert float(out[-1].split(",")[1]) <= 1 + 1e-3


def test_exit_codes(grover_family, tmp_path, capsys):
    # parse error
    assert main(["spectrum", str(tmp_path / "missing.json")]) == 1
    # precondition error: the gap condition fails at n = 8, c = 0.02
    assert main(["gap-scan", grover_family, "--n", "8"]) == 2
    # precision-insufficient: coarse noisy oracle
    tri = tmp_path / "tri.json"
    tri.write_text(json.dumps({"n": 2, "couplings": [[0, 1, 1]], "fields": [0, 0]}))
    assert main(["extract", str(tri), "--oracle", "noisy:1/2"]) == 4
    capsys.readouterr()


def test_byte_identical_reruns(grover_family, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        main(["gap-scan", grover_family, "--n", "12", "--grid", "100", "--out", str(out)])
    assert a.read_bytes() == b.read_bytes()
    c, d = tmp_path / "c.json", tmp_path / "d.json"
    tri = tmp_path / "tri2.json"
    tri.write_text(json.dumps({"n": 3, "couplings": [[0, 1, 1], [1, 2, 1], [0, 2, 1]], "fields": [0, 0, 0]}))
    for out in (c, d):
        main(["--seed", "7", "extract", str(tri), "--oracle", "prob:0:0.8", "--out", str(out)])
    assert c.read_bytes() == d.read_bytes()
