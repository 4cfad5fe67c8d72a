import csv
import math

import numpy as np
import pytest

from memflow import volterra as vt
from memflow.cli import main


def read(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_relax_exponential(tmp_path):
    assert main(["relax", "--kernel", "exponential nu=1", "--alpha", "1", "--t-end", "5",
                 "--dt", "0.001", "--out", str(tmp_path)]) == 0
    header, data = read(tmp_path / "relax.csv")
    assert header == ["t", "s"]
    row = data[1000]
    assert row[0] == 1.0
    assert abs(row[1] - vt.closed_form_exponential(1.0, 2.0, 1.0)) <= 5e-3
    _, ref = read(tmp_path / "relax_memoryless.csv")
    assert np.allclose(ref[:, 1], np.exp(-2 * ref[:, 0]), rtol=1e-15)
    assert (tmp_path / "relax.svg").read_text().count("<polyline") == 2


def test_relax_zero(tmp_path):
    assert main(["relax", "--kernel", "zero", "--out", str(tmp_path)]) == 0
    _, data = read(tmp_path / "relax.csv")
    assert data[-1, 0] == 5.0
    assert np.max(np.abs(data[:, 1] - np.exp(-2 * data[:, 0]))) <= 5e-3


def test_sweep_beta(tmp_path):
    assert main(["sweep", "--kernel", "stretched nu=1", "--axis", "beta", "--values", "0.5,1,2",
                 "--out", str(tmp_path)]) == 0
    header, data = read(tmp_path / "sweep_beta.csv")
    assert header == ["t", "s[beta=0.5]", "s[beta=1]", "s[beta=2]", "memoryless"]
    at2 = data[2000, 1:4]
    assert at2[0] > at2[1] > at2[2]


def test_sweep_threads_deterministic(tmp_path, monkeypatch):
    args = ["sweep", "--kernel", "powerlaw nu=1", "--axis", "nu", "--values", "0.5,1,2",
            "--t-end", "2", "--dt", "0.01"]
    monkeypatch.setenv("MEMFLOW_THREADS", "1")
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    monkeypatch.setenv("MEMFLOW_THREADS", "3")
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "sweep_nu.csv").read_bytes() == (tmp_path / "b" / "sweep_nu.csv").read_bytes()


def test_resolvent(tmp_path):
    assert main(["resolvent", "--kernel", "exponential", "--out", str(tmp_path)]) == 0
    _, data = read(tmp_path / "resolvent.csv")
    assert np.max(np.abs(data[:, 1] - (0.5 + 0.5 * np.exp(-2 * data[:, 0])))) <= 5e-4


def test_evolve(tmp_path):
    assert main(["evolve", "--kernel", "zero", "--datum", "1,0.1", "--t-end", "1", "--dt", "0.01",
                 "--out", str(tmp_path)]) == 0
    header, data = read(tmp_path / "coefficients.csv")
    assert header == ["t", "n", "c"]
    mode1 = data[data[:, 1] == 1]
    assert np.allclose(mode1[:, 2], 0.1 * np.exp(-mode1[:, 0]), rtol=1e-2)
    assert np.all(data[data[:, 1] == 0, 2] == 1.0)
    header, _ = read(tmp_path / "field.csv")
    assert header == ["t", "x", "u"]


def test_datum_file(tmp_path):
    f = tmp_path / "d.txt"
    f.write_text("1.0\n0.1\n")
    assert main(["evolve", "--kernel", "zero", "--datum", str(f), "--t-end", "1", "--dt", "0.1",
                 "--out", str(tmp_path / "o")]) == 0


def test_entropy_decay_default(tmp_path, capsys):
    assert main(["entropy-decay", "--kernel", "exponential nu=1", "--alpha", "1",
                 "--out", str(tmp_path)]) == 0
    assert "PASS" in capsys.readouterr().out
    header, data = read(tmp_path / "entropy.csv")
    assert header == ["t", "entropy", "envelope", "memoryless", "margin"]
    assert np.all(data[:, 4] >= -1e-6 * data[0, 1])
    assert (tmp_path / "entropy.svg").read_text().count("<polyline") == 3


def test_entropy_decay_zero_kernel(tmp_path):
    assert main(["entropy-decay", "--kernel", "zero", "--datum", "1,0.1,0.05",
                 "--times", "0.5,1,2,4", "--out", str(tmp_path)]) == 0
    _, data = read(tmp_path / "entropy.csv")
    # entropy sits on or below the semigroup curve, within the truncation/quadrature budget
    assert np.all(data[:, 1] <= data[:, 3] * (1 + 1e-6))
    assert np.max(np.abs(data[:, 1] - data[:, 3])) <= 1e-3


def test_entropy_decay_positivity(tmp_path, capsys):
    code = main(["entropy-decay", "--kernel", "zero", "--datum", "0.1,1", "--nodes", "16",
                 "--out", str(tmp_path)])
    assert code == 2
    assert "positivity violated at x=" in capsys.readouterr().err


def test_entropy_decay_inflated_rate_fails(tmp_path):
    code = main(["entropy-decay", "--kernel", "zero", "--datum", "1,0.2", "--mu", "3",
                 "--times", "0.1,0.5,1", "--out", str(tmp_path)])
    assert code == 1


def test_verify_only_laplace(tmp_path, capsys):
    assert main(["verify", "--only", "laplace"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert all(line.split()[1].startswith("laplace.") for line in lines[:-1])
    assert len(lines) >= 4


def test_verify_bad_tabulated(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text("t,k\n0,1\n1,2\n2,0.5\n3,0.25\n")
    code = main(["verify", "--only", "kernels", "--kernel", f"tabulated file={f} tail=exp:1"])
    out = capsys.readouterr().out
    assert code == 1
    fails = [line for line in out.splitlines() if line.startswith("FAIL")]
    assert fails and all("audit" in line for line in fails)


def test_verify_full(verify_runs):
    code, report = verify_runs[0]
    lines = report.decode().splitlines()
    checks = lines[:-1]
    assert len(checks) >= 25
    fails = sorted(line.split()[1] for line in checks if line.startswith("FAIL"))
    # the two statements that do not hold as written (see README, "Known failures")
    assert fails == ["decay.memoryless_equality", "figures.order[stretched_beta]"]
    assert code == 1


def test_verify_deterministic(verify_runs):
    assert verify_runs[0][1] == verify_runs[1][1]


@pytest.mark.parametrize("argv", [
    ["relax", "--kernel", "nonsense"],
    ["relax", "--kernel", "stretched beta=-1"],
    ["relax", "--dt", "0.3", "--t-end", "1"],
    ["relax", "--mu", "-1"],
    ["sweep", "--kernel", "stretched", "--axis", "beta"],
    ["sweep", "--kernel", "stretched", "--axis", "beta", "--values", "1,-2"],
    ["verify", "--only", "nope"],
    ["entropy-decay", "--datum", "1,x"],
    ["bogus"],
])
def test_input_errors(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)] if argv != ["bogus"] else argv) == 2


def test_help_exit_zero(capsys):
    assert main(["--help"]) == 0
