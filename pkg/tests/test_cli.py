import json

import numpy as np
import pytest

from contraction_lab.cli import main
from contraction_lab.systems import gaussian_system, save_system


@pytest.fixture
def system_file(tmp_path):
    path = tmp_path / "system.txt"
    save_system(path, gaussian_system(10, 4, seed=1))
    return str(path)


@pytest.fixture
def system_file_without_solution(tmp_path):
    system = gaussian_system(8, 3, seed=2)
    path = tmp_path / "nosol.txt"
    with open(path, "w") as fh:
        fh.write(f"{system.A.shape[0]} {system.A.shape[1]}\n")
        for row in system.A:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
        fh.write(" ".join(repr(float(v)) for v in system.b) + "\n")
    return str(path)


def test_solve_row_count_contract(tmp_path, system_file):
    out = tmp_path / "trace.csv"
    code = main(
        ["solve", "--method", "rk", "--system", system_file, "--steps", "1000", "--seed", "7", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1002  # header + t = 0..1000
    assert lines[0] == "t,dist_sq,residual_sq,mnorm_sq"


def test_solve_byte_identical_reruns(tmp_path, system_file):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["solve", "--method", "block", "--block-size", "3", "--system", system_file, "--steps", "200", "--seed", "11"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_solve_rht_logs_frobenius(tmp_path, system_file, capsys):
    out = tmp_path / "t.csv"
    code = main(
        ["solve", "--method", "block", "--block-size", "4", "--rht", "--system", system_file,
         "--steps", "50", "--seed", "5", "--out", str(out)]
    )
    assert code == 0
    captured = capsys.readouterr().out
    assert "rht: frobenius norm" in captured
    before, after = captured.split("norm ")[1].split("\n")[0].split(" -> ")
    assert float(before) == pytest.approx(float(after), rel=1e-8)


def test_solve_missing_solution_uses_min_norm(tmp_path, system_file_without_solution):
    out = tmp_path / "t.csv"
    code = main(
        ["solve", "--method", "rk", "--system", system_file_without_solution,
         "--steps", "100", "--seed", "3", "--out", str(out)]
    )
    assert code == 0
    rows = out.read_text().splitlines()[1:]
    dist0 = float(rows[0].split(",")[1])
    assert dist0 > 0  # distance measured against the computed min-norm solution


def test_solve_exit_codes(tmp_path, system_file):
    assert main(["solve", "--method", "rk", "--system", str(tmp_path / "nope.txt"), "--seed", "1"]) == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2\n1 0\nbroken row\n1 2\n")
    assert main(["solve", "--method", "rk", "--system", str(bad), "--seed", "1"]) == 1
    incons = tmp_path / "incons.txt"
    incons.write_text("2 1\n1\n1\n0.0 1.0\n")
    assert main(["solve", "--method", "rk", "--system", str(incons), "--seed", "1"]) == 2


def test_config_file_with_flag_precedence(tmp_path, system_file):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"method = rk\nsystem = {system_file}\nsteps = 5\nseed = 9\n")
    out = tmp_path / "t.csv"
    code = main(["solve", "--config", str(cfg), "--steps", "7", "--out", str(out)])
    assert code == 0
    assert len(out.read_text().splitlines()) == 9  # header + t=0..7, flag wins


def test_recursion_halving_spectrum(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["recursion", "--spectrum", "0.5", "--steps", "10", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    mu = [float(line.split(",")[1]) for line in rows[1:]]
    assert mu == [0.5 ** (t + 1) for t in range(11)]


def test_recursion_fit_and_plot_script(tmp_path):
    out = tmp_path / "r.csv"
    script = tmp_path / "plot.py"
    code = main(
        ["recursion", "--spectrum", "loglin(20,1,1e-10)", "--steps", "2000",
         "--fit", "100:2000", "--out", str(out), "--plot-script", str(script)]
    )
    assert code == 0
    text = script.read_text()
    assert str(out) in text and "loglog" in text
    compile(text, str(script), "exec")  # emitted script must be valid python


def test_recursion_lambda_columns(tmp_path):
    out = tmp_path / "r.csv"
    assert main(
        ["recursion", "--spectrum", "0.9,0.1", "--steps", "5", "--lambda-columns", "--out", str(out)]
    ) == 0
    header = out.read_text().splitlines()[0]
    assert header == "t,mu_t,lambda_0,lambda_1"


def test_recursion_invalid_spectrum(tmp_path):
    assert main(["recursion", "--spectrum", "1.5", "--steps", "5", "--out", str(tmp_path / "x.csv")]) == 2


def test_recursion_lower_bound_family(tmp_path, capsys):
    out = tmp_path / "lb.csv"
    assert main(["recursion", "--lower-bound-family", "300", "--out", str(out)]) == 0
    assert "ratio=" in capsys.readouterr().out
    header = out.read_text().splitlines()[0]
    assert header == "t,mu_t,normalized"


def test_certify_default_and_json(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    assert main(["certify", "--json", str(report_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("[ ok ]") == 9
    payload = json.loads(report_path.read_text())
    assert len(payload["certificates"]) == 9
    assert all(entry["verified"] for entry in payload["certificates"])


def test_certify_only_and_tamper(capsys):
    assert main(["certify", "--only", "lower-bound-chain"]) == 0
    assert main(["certify", "--tamper"]) == 3
    assert main(["certify", "--only", "unknown-name"]) == 2


def test_simulate_monte_carlo(tmp_path, system_file):
    out = tmp_path / "sim.csv"
    code = main(
        ["simulate", "--system", system_file, "--method", "rk", "--steps", "100",
         "--replicates", "8", "--seed", "3", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("t,mean_norm_sq,")
    assert len(lines) == 102


def test_simulate_byte_identical_reruns(tmp_path, system_file):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--system", system_file, "--method", "rk", "--steps", "50",
            "--replicates", "4", "--seed", "21"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_single_replicate_warns(tmp_path, system_file, capsys):
    out = tmp_path / "sim.csv"
    code = main(
        ["simulate", "--system", system_file, "--method", "rk", "--steps", "20",
         "--replicates", "1", "--seed", "3", "--out", str(out)]
    )
    assert code == 0
    assert "replicates=1" in capsys.readouterr().err
    first_row = out.read_text().splitlines()[1]
    assert first_row.endswith(",,,")  # stderr columns are empty


def test_simulate_synthetic_spectrum_geometric(tmp_path):
    out = tmp_path / "sim.csv"
    code = main(
        ["simulate", "--spectrum", "0.5", "--steps", "10", "--replicates", "4",
         "--seed", "2", "--out", str(out)]
    )
    assert code == 0
    rows = out.read_text().splitlines()[1:]
    norms = [float(r.split(",")[1]) for r in rows]
    assert norms == pytest.approx([0.25**t for t in range(11)], rel=1e-12)


def test_simulate_requires_exactly_one_source(system_file):
    assert main(["simulate", "--seed", "1"]) == 2
    assert main(["simulate", "--system", system_file, "--spectrum", "0.5", "--seed", "1"]) == 2


def test_simulate_requires_seed(system_file):
    assert main(["simulate", "--system", system_file, "--method", "rk"]) == 2


def test_fit_command(tmp_path, capsys):
    out = tmp_path / "r.csv"
    main(["recursion", "--spectrum", "loglin(10,1,1e-6)", "--steps", "500", "--out", str(out)])
    capsys.readouterr()
    assert main(["fit", "--input", str(out), "--column", "mu_t", "--window", "50:500"]) == 0
    assert "slope=" in capsys.readouterr().out
    assert main(["fit", "--input", str(out), "--column", "missing"]) == 2
