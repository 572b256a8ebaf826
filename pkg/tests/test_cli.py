import numpy as np
import pytest

from fracsfe import load_field
from fracsfe.cli import CSV_HEADER, main

CONFIG = """
[problem]
N = 2
s = 0.6
a = 1
L = 40
n = 64
init_amplitude = 3
init_width = 2

[nonlinearity]
mass_case = positive
term = -1, 1
term = 1, 3

[solver]
{solver}

[output]
directory = "{out}"
{output}
"""


def write_config(tmp_path, solver="", output="", name="run.cfg", out="out"):
    path = tmp_path / name
    path.write_text(CONFIG.format(solver=solver, output=output, out=(tmp_path / out).as_posix()))
    return path


def read_block(text):
    out = {}
    for line in text.splitlines():
        if " = " in line:
            k, v = line.split(" = ", 1)
            out.setdefault(k, v)
    return out


class TestSolve:
    def test_converged_run(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["solve", str(cfg)]) == 0
        out = tmp_path / "out"
        report = (out / "report.txt").read_text()
        assert "converged = true" in report
        assert (out / "fields" / "solution_0.frf").exists()
        rows = (out / "iterations.csv").read_text().splitlines()
        assert rows[0] == CSV_HEADER and len(rows) > 2
        assert "status = converged" in (out / "summary.txt").read_text()

    def test_not_converged(self, tmp_path):
        cfg = write_config(tmp_path, solver="max_iter = 1")
        assert main(["solve", str(cfg)]) == 1
        report = (tmp_path / "out" / "report.txt").read_text()
        assert "[failure]" in report and "NotConverged" in report

    def test_no_field_dump(self, tmp_path):
        cfg = write_config(tmp_path, output="dump_fields = false\ncsv = false")
        assert main(["solve", str(cfg)]) == 0
        assert not (tmp_path / "out" / "fields").exists()
        assert not (tmp_path / "out" / "iterations.csv").exists()

    def test_deterministic(self, tmp_path):
        a = write_config(tmp_path, name="a.cfg", out="a")
        b = write_config(tmp_path, name="b.cfg", out="b")
        assert main(["solve", str(a)]) == 0 and main(["solve", str(b)]) == 0
        ra = (tmp_path / "a" / "report.txt").read_bytes()
        rb = (tmp_path / "b" / "report.txt").read_bytes()
        assert ra == rb
        assert (tmp_path / "a" / "fields" / "solution_0.frf").read_bytes() == (
            tmp_path / "b" / "fields" / "solution_0.frf").read_bytes()


class TestVerify:
    def test_round_trip(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert main(["solve", str(cfg)]) == 0
        capsys.readouterr()
        field = tmp_path / "out" / "fields" / "solution_0.frf"
        assert main(["verify", str(cfg), str(field)]) == 0
        verified = read_block(capsys.readouterr().out)
        solved = read_block((tmp_path / "out" / "report.txt").read_text().split("[solution 0]")[1])
        for key in ("energy", "pohozaev", "pde_residual", "fibering_gap", "sup_norm"):
            a, b = float(verified[key]), float(solved[key])
            assert abs(a - b) <= 1e-12 * max(1.0, abs(b))
        assert verified["converged"] == "true"
        assert np.all(np.isfinite(load_field(field).values))

    def test_missing_field(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["verify", str(cfg), str(tmp_path / "absent.frf")]) == 3

    def test_corrupt_field(self, tmp_path):
        cfg = write_config(tmp_path)
        bad = tmp_path / "bad.frf"
        bad.write_bytes(b"not a field")
        assert main(["verify", str(cfg), str(bad)]) == 3


class TestErrors:
    def test_missing_config(self, tmp_path):
        assert main(["solve", str(tmp_path / "absent.cfg")]) == 3

    def test_parse_error(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("[problem\n")
        assert main(["solve", str(path)]) == 2
        assert "line 1" in capsys.readouterr().err

    def test_validation_error(self, tmp_path, capsys):
        path = write_config(tmp_path)
        path.write_text(path.read_text().replace("term = 1, 3", "term = 1, 4"))
        assert main(["solve", str(path)]) == 2
        assert "2*_s - 1" in capsys.readouterr().err

    def test_bad_k(self, tmp_path):
        assert main(["multistart", str(write_config(tmp_path)), "--k", "0"]) == 2

    def test_unknown_verb(self):
        with pytest.raises(SystemExit):
            main(["bogus"])


class TestOtherVerbs:
    def test_sweep_eps_case_two(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["sweep-eps", str(cfg)]) == 0
        assert "mode = continuation" in (tmp_path / "out" / "report.txt").read_text()

    def test_multistart_single(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["multistart", str(cfg), "--k", "1"]) == 0
        report = (tmp_path / "out" / "report.txt").read_text()
        assert "least_energy = true" in report
