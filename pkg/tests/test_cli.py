import csv
import math
import subprocess
import sys

import pytest

from heisenberg_damped.cli import main, propcheck_samples

SMALL_GFT = """\
group.n = 1
grid.lambda_min = 0.1
grid.lambda_max = 2.0
grid.panels = 2
grid.points = 4
trunc.k_max = 8
trunc.l_max = 8
gft.check_nodes = 2
"""


def read_csv(path):
    raw = path.read_bytes()
    assert b"\r" not in raw
    raw.decode("ascii")
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_scenario_n1_flat(tmp_path, capsys):
    assert main(["scenario", "--config", "n1_flat", "--out", str(tmp_path)]) == 0
    norms = read_csv(tmp_path / "norms.csv")
    assert norms[0] == ["t", "norm_u", "norm_dtu", "norm_gradu", "norm_Tu"]
    assert len(norms) == 33
    report = read_csv(tmp_path / "report.csv")
    assert report[0] == ["observable", "slope", "stderr", "expected", "tol", "pass"]
    slopes = {row[0]: float(row[1]) for row in report[1:]}
    assert slopes == pytest.approx({"u": -1.0, "gradu": -1.5, "dtu": -2.0, "Tu": -2.0}, abs=0.05)
    assert all(row[5] == "true" for row in report[1:])
    assert "PASS" in capsys.readouterr().out


def test_csv_numbers_have_round_trip_precision(tmp_path):
    main(["scenario", "--config", "n1_flat", "--out", str(tmp_path), "--quiet"])
    for row in read_csv(tmp_path / "norms.csv")[1:]:
        for cell in row:
            value = float(cell)
            assert cell == "%.17g" % value


def test_scenario_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["scenario", "--config", "n1_flat", "--out", str(a), "--quiet"])
    main(["scenario", "--config", "n1_flat", "--out", str(b), "--quiet"])
    for name in ("norms.csv", "report.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_scenario_n2_flat(tmp_path):
    assert main(["scenario", "--config", "n2_flat", "--out", str(tmp_path), "--quiet"]) == 0
    slopes = {row[0]: float(row[1]) for row in read_csv(tmp_path / "report.csv")[1:]}
    assert slopes == pytest.approx({"u": -1.5, "gradu": -2.0, "dtu": -2.5, "Tu": -2.5}, abs=0.05)


def test_zero_data_refuse_fit(tmp_path, capsys):
    assert main(["scenario", "--config", "zero", "--out", str(tmp_path)]) == 3
    rows = read_csv(tmp_path / "norms.csv")[1:]
    assert all(float(v) == 0.0 for row in rows for v in row[1:])
    assert "fit refused" in capsys.readouterr().out


def test_l2_scenario(tmp_path):
    assert main(["scenario", "--config", "l2_bandlimited", "--out", str(tmp_path), "--quiet"]) == 0
    report = read_csv(tmp_path / "report.csv")
    assert [row[0] for row in report[1:]] == ["u", "gradu", "dtu"]
    assert [float(row[3]) for row in report[1:]] == [-0.0, -0.5, -1.0]
    assert all(row[5] == "true" for row in report[1:])


def test_scenario_failure_exit(tmp_path):
    cfg = write(tmp_path, "tol.u = 1e-9\n")
    assert main(["scenario", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 1


def test_config_error_exit(tmp_path, capsys):
    cfg = write(tmp_path, "group.n = 1\ngrid.lambda_min = -1\n")
    assert main(["scenario", "--config", cfg, "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "grid.lambda_min" in err


def test_missing_config_exit(tmp_path):
    assert main(["scenario", "--config", str(tmp_path / "none.cfg"), "--quiet"]) == 2


def test_invalid_profile_exit(tmp_path):
    cfg = write(tmp_path, "u0.kind = power\nu0.sigma = -1.5\n")
    assert main(["scenario", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 2


def test_propcheck_golden_sample(capsys):
    assert propcheck_samples(1, 123) == [(0.25, 2.0, 0j, 1 + 0j)]
    assert main(["propcheck", "--samples", "1", "--seed", "5"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_propcheck_is_deterministic(tmp_path, capsys):
    main(["propcheck", "--samples", "40", "--seed", "9", "--out", str(tmp_path / "a")])
    first = capsys.readouterr().out
    main(["propcheck", "--samples", "40", "--seed", "9", "--out", str(tmp_path / "b")])
    assert capsys.readouterr().out == first
    assert (tmp_path / "a" / "propcheck.csv").read_bytes() == (tmp_path / "b" / "propcheck.csv").read_bytes()
    rows = read_csv(tmp_path / "a" / "propcheck.csv")
    assert rows[0] == ["z", "t", "rel_dev"] and len(rows) == 41


def test_propcheck_seeds_differ():
    assert propcheck_samples(5, 1) != propcheck_samples(5, 2)
    z = [s[0] for s in propcheck_samples(500, 3)[1:]]
    t = [s[1] for s in propcheck_samples(500, 3)[1:]]
    assert 1e-6 <= min(z) and max(z) <= 1e3
    assert 0 <= min(t) and max(t) <= 200


def test_propcheck_rejects_no_samples():
    assert main(["propcheck", "--samples", "0", "--quiet"]) == 2


def test_gftcheck_small_gaussian(tmp_path, capsys):
    cfg = write(tmp_path, SMALL_GFT + "gft.gap = 1.0\n")
    assert main(["gftcheck", "--config", cfg, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "grid-side L2 norm" in out and "Riemann-Lebesgue margin" in out
    rows = read_csv(tmp_path / "gft.csv")
    assert rows[0] == ["lambda", "hs_norm", "op_norm", "rl_margin"]
    assert len(rows) == 9
    assert all(float(r[3]) >= 0 for r in rows[1:])


def test_gftcheck_zero_function(tmp_path, capsys):
    cfg = write(tmp_path, SMALL_GFT + "gft.function = zero\n")
    assert main(["gftcheck", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "grid-side L2 norm        0\n" in out
    assert "Plancherel-side L2 norm  0\n" in out


def test_gftcheck_coarse_grid_is_numerical_failure(tmp_path, capsys):
    cfg = write(tmp_path, SMALL_GFT.replace("grid.lambda_max = 2.0", "grid.lambda_max = 6.0")
                + "gft.points = 2\ngft.refine = 0.25\n")
    assert main(["gftcheck", "--config", cfg]) == 3
    assert "changes by" in capsys.readouterr().out


def test_gftcheck_needs_heisenberg_one(tmp_path):
    cfg = write(tmp_path, SMALL_GFT.replace("group.n = 1", "group.n = 2"))
    assert main(["gftcheck", "--config", cfg, "--quiet"]) == 2


def test_tailbound(tmp_path, capsys):
    assert main(["tailbound", "--n", "1", "--kmax", "-1", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    tail = float(out.split("tail=")[1].split()[0])
    assert tail == pytest.approx(math.pi ** 2 / 8, rel=1e-15)
    rows = read_csv(tmp_path / "tailbound.csv")
    tails = [float(r[2]) for r in rows[1:]]
    assert tails == sorted(tails, reverse=True)


def test_tailbound_rejects_bad_input():
    assert main(["tailbound", "--n", "0", "--quiet"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "heisenberg_damped", "tailbound", "--n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "n=2" in proc.stdout


def test_missing_command_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
