import csv
import json
import math

import jsonschema
import numpy as np
import pytest

from mzsphere import cli
from mzsphere._errors import NumericalError
from mzsphere.concentration import trace_closed_form
from mzsphere.harmonic import read_coefficients


def _report(out, command):
    return json.loads((out / f"{command.replace('-', '_')}.json").read_text())


@pytest.fixture(scope="module")
def family_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("fam")
    assert cli.run(["gen", "--kind", "fibonacci", "--c", "1.5", "--Ls", "4,8", "--out", str(d)]) == 0
    return d


def test_gen_writes_family(family_dir):
    assert (family_dir / "Z_4.pts").exists() and (family_dir / "family.json").exists()
    rep = _report(family_dir, "gen")
    assert [r["L"] for r in rep["per_L"]] == [4, 8]
    assert all(r["role"] == "mz" for r in rep["per_L"])


def test_spectrum_command(tmp_path):
    assert cli.run(["spectrum", "--L", "24", "--alpha", "6", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "spectrum_eigenvalues.csv")))
    assert len(rows) == 625
    lam = np.array([float(r["lambda"]) for r in rows])
    assert abs(lam.sum() - trace_closed_form(2, 24, 6.0)) <= 1e-8 * trace_closed_form(2, 24, 6.0)
    assert np.all(np.diff(lam) <= 0)


def test_mz_bounds_pipeline(family_dir, tmp_path, capsys):
    assert cli.run(["mz-bounds", "--family", str(family_dir), "--out", str(tmp_path)]) == 0
    assert "verdict: MZ-consistent at p=2" in capsys.readouterr().out
    rep = _report(tmp_path, "mz-bounds")
    assert [r["L"] for r in rep["per_L"]] == [4, 8]
    assert all(r["A"] > 0 and r["condition"] < 5 for r in rep["per_L"])
    assert rep["params"]["family"] == str(family_dir)


def test_mz_bounds_with_p(family_dir, tmp_path):
    args = ["mz-bounds", "--family", str(family_dir), "--Ls", "4", "--p", "inf", "--trials", "3", "--out", str(tmp_path)]
    assert cli.run(args) == 0
    row = _report(tmp_path, "mz-bounds")["per_L"][0]
    assert 0 < row["lower_A_est"] <= row["upper_B_est"] <= 1 + 1e-9
    assert _report(tmp_path, "mz-bounds")["params"]["p"] == "inf"


def test_interpolate_writes_coefficients(family_dir, tmp_path):
    assert cli.run(["interpolate", "--family", str(family_dir), "--L", "4", "--out", str(tmp_path)]) == 0
    c = read_coefficients(tmp_path / "interpolant_L4.coef")
    assert c.shape == (25,) and c[0] == pytest.approx(math.sqrt(4 * math.pi))


def test_json_is_byte_identical(family_dir, tmp_path):
    args = ["density", "--family", str(family_dir), "--alphas", "2,4", "--out", str(tmp_path)]
    assert cli.run(args) == 0
    first = (tmp_path / "density.json").read_bytes()
    first_csv = (tmp_path / "density.csv").read_bytes()
    assert cli.run(args) == 0
    assert (tmp_path / "density.json").read_bytes() == first
    assert (tmp_path / "density.csv").read_bytes() == first_csv


def test_floats_round_trip(tmp_path):
    assert cli.run(["trace-deficit", "--L", "60", "--out", str(tmp_path)]) == 0
    rep = _report(tmp_path, "trace-deficit")
    rows = list(csv.DictReader(open(tmp_path / "trace_deficit.csv")))
    for r, c in zip(rep["per_L"], rows):
        for k, v in r.items():
            if isinstance(v, float):
                assert float(c[k]) == v


def _all_invocations(fam):
    return [
        ["kernel-check", "--Ls", "0,4"],
        ["spectrum", "--L", "6", "--theta", "0.5"],
        ["trace-deficit", "--L", "40", "--alphas", "2,3,4,8"],
        ["density", "--family", fam, "--alphas", "2,4"],
        ["mz-bounds", "--family", fam],
        ["interpolate", "--family", fam, "--L", "4", "--constant", "2.0"],
        ["carleson", "--family", fam],
        ["asymptotics", "jacobi-lp", "--p", "4", "--Ls", "8,16,64"],
        ["asymptotics", "projection-norm", "--Ls", "8,16,64"],
        ["asymptotics", "kernel-constant", "--Ls", "8,16,64"],
        ["multiplier-check", "--Ls", "4,8"],
        ["mollifier", "--Ls", "8,16"],
        ["cis-diagnostic", "--family", fam],
        ["gen", "--kind", "random", "--Ls", "2", "--c", "2"],
    ]


def test_every_report_matches_schema(family_dir, tmp_path):
    schema = cli.load_schema()
    seen = set()
    for i, argv in enumerate(_all_invocations(str(family_dir))):
        out = tmp_path / str(i)
        assert cli.run(argv + ["--out", str(out)]) == 0, argv
        rep = _report(out, argv[0])
        jsonschema.validate(rep, schema)
        assert rep["command"] == argv[0] and rep["params"]["command"] == argv[0]
        seen.add(argv[0])
    assert seen == set(cli.COMMANDS) - {"accept"}


def test_accept_quick(tmp_path, capsys):
    assert cli.run(["accept", "--quick", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 13 and "verdict: pass" in out
    jsonschema.validate(_report(tmp_path, "accept"), cli.load_schema())


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.run(["kernel-check", "--Ls", "2"]) == 0
    assert (tmp_path / "env" / "kernel_check.json").exists()


def test_exit_codes(tmp_path, monkeypatch, capsys):
    assert cli.run(["spectrum", "--L", "4", "--alpha", "1", "--out", str(tmp_path)]) == 0
    assert cli.run([]) == 2
    assert cli.run(["no-such-command"]) == 2
    assert cli.run(["spectrum", "--out", str(tmp_path)]) == 2  # missing --L
    assert cli.run(["kernel-check", "--Ls", "a,b"]) == 2
    assert cli.run(["mz-bounds", "--family", str(tmp_path / "missing"), "--out", str(tmp_path)]) == 2
    assert cli.run(["spectrum", "--L", "4", "--theta", "4.0", "--out", str(tmp_path)]) == 2

    def boom(args, cfg):
        raise NumericalError("did not converge")

    monkeypatch.setitem(cli.COMMANDS, "spectrum", boom)
    assert cli.run(["spectrum", "--L", "4", "--alpha", "1", "--out", str(tmp_path)]) == 1
    assert "did not converge" in capsys.readouterr().err


def test_failed_acceptance_exits_one(tmp_path, monkeypatch):
    from mzsphere import acceptance

    real = acceptance.run_all

    def one_fails(quick=False):
        res = real(quick=True)
        res[0].passed = False
        return res

    monkeypatch.setattr(acceptance, "run_all", one_fails)
    assert cli.run(["accept", "--out", str(tmp_path)]) == 1
    assert _report(tmp_path, "accept")["verdict"] == "fail"


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "mzsphere", "kernel-check", "--Ls", "1", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "verdict: pass" in proc.stdout
