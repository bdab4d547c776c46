import json
import os
import subprocess
import sys

import pytest

from dtwall.cli import main
from dtwall.invariants import dump_table, random_table

GEO = ["--h3", "6", "--c2h", "12"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def toy(tmp_path, capsys):
    assert main(["toy", "--out-dir", str(tmp_path)]) == 0
    capsys.readouterr()
    return str(tmp_path / "I.json"), str(tmp_path / "P.json")


def test_dt4_toy(capsys, toy):
    I, P = toy
    code, out, _ = run(capsys, "dt4", *GEO, "--I", I, "--P", P, "--m", "2", "--k", "0", "--n", "-2")
    assert code == 0
    assert out.startswith("m=2 k=0 n=-2 dt4=-10 eta=0 terms=1")
    code, out, _ = run(capsys, "--format", "json", "dt4", *GEO, "--I", I, "--P", P,
                       "--m", "2", "--k", "0", "--n", "-2")
    row = json.loads(out)["results"][0]
    assert row["dt4"] == "-10" and row["terms"] == 1 and not row["out_of_regime"]
    assert row["validity"]["lower_bound_status"] == "conditional on BMT"


def test_dt4_flags_out_of_regime(capsys, toy):
    I, P = toy
    code, out, _ = run(capsys, "dt4", *GEO, "--I", I, "--P", P, "--m", "2", "--k", "0", "--n", "0")
    assert code == 0 and "OUT-OF-REGIME" in out


def test_geometry_file(capsys, toy, tmp_path):
    g = tmp_path / "geo.json"
    g.write_text(json.dumps({"H3": 6, "c2H": 12, "chiX": 0}))
    I, P = toy
    code, out, _ = run(capsys, "dt4", "--geometry", str(g), "--I", I, "--P", P, "--m", "2", "--k", "0", "--n", "-2")
    assert code == 0 and "dt4=-10" in out


def test_series_toy(capsys, toy, tmp_path):
    I, P = toy
    code, out, _ = run(capsys, "series", *GEO, "--I", I, "--P", P, "--m", "2", "--window-x=-4:4")
    assert code == 0
    assert "-10/1 -12 0" in out.splitlines()
    code, out, _ = run(capsys, "series", *GEO, "--I", I, "--P", P, "--m", "2", "--window-x=-4:4", "--euler")
    assert "10/1 -12 0" in out.splitlines()
    table = tmp_path / "dt4.json"
    table.write_text(json.dumps({"kind": "DT4", "entries": [{"k": 0, "n": -2, "value": -10}]}))
    code, out, _ = run(capsys, "series", *GEO, "--I", I, "--P", P, "--m", "2", "--window-x=-4:4",
                       "--compare", str(table))
    assert out.rstrip().endswith("# 0 differences")


def test_walls_toy(capsys):
    code, out, _ = run(capsys, "walls", *GEO, "--m", "2", "--k", "0", "--n", "-2")
    assert code == 0
    assert "wall u0=3 splittings=1" in out
    assert "polar=boundary" in out
    code, out, _ = run(capsys, "--format", "json", "walls", *GEO, "--m", "2", "--k", "0", "--n", "-2")
    obj = json.loads(out)
    assert [w["u0"] for w in obj["walls"]] == ["3"] and obj["window"] == ["3", "3"]


def test_localdt(capsys):
    code, out, _ = run(capsys, "localdt", *GEO, "--m", "1", "--a-range", "0:1",
                       "--window-x=-1:0", "--window-y=-3:3")
    assert code == 0 and "-1/1 -6 -6" in out.splitlines()


def test_check(capsys):
    code, out, _ = run(capsys, "check", *GEO, "--m", "2", "--k", "0", "--n", "-3")
    assert code == 0 and "d4-bound: VIOLATED" in out
    code, out, _ = run(capsys, "--format", "json", "check", *GEO, "--m", "2", "--k", "0", "--n", "-2",
                       "--degC", "1")
    obj = json.loads(out)
    assert obj["d4_bound"] and obj["eta"] == "0" and obj["hcn"]


def test_hn(capsys):
    code, out, _ = run(capsys, "hn", "--equality-case", "3")
    assert code == 0 and "slack=0" in out
    code, out, _ = run(capsys, "hn", "--samples", "20", "--seed", "4")
    assert code == 0 and len(out.splitlines()) == 20 and "holds=False" not in out
    code, out, _ = run(capsys, "hn", "--samples", "5", "--gram", "2,1;1,-2", "--L", "1,0")
    assert code == 0 and len(out.splitlines()) == 5


def test_dtpt(capsys, tmp_path):
    assert main(["toy", "--out-dir", str(tmp_path), "--degree0", "--chix", "-200", "--table-format", "tsv"]) == 0
    capsys.readouterr()
    code, out, _ = run(capsys, "dtpt", "--I", str(tmp_path / "I.tsv"), "--P", str(tmp_path / "P.tsv"),
                       "--chix", "-200")
    assert code == 0 and out.strip() == "0 differences"


def test_usage_errors(capsys, toy):
    I, P = toy
    assert run(capsys, "dt4", "--I", I, "--P", P, "--m", "2", "--k", "0", "--n", "-2")[0] == 1
    assert run(capsys, "dt4", *GEO, "--I", "/nonexistent.json", "--P", P, "--m", "2", "--k", "0", "--n", "0")[0] == 1
    assert run(capsys, "walls", *GEO, "--m", "2")[0] == 1
    assert run(capsys)[0] == 1
    assert run(capsys, "dt4", "--bogus")[0] == 1
    assert run(capsys, "--help")[0] == 0


def test_integrality_violation_exit_code(capsys, toy):
    I, P = toy
    code, _, err = run(capsys, "dt4", "--h3", "6", "--c2h", "1", "--I", I, "--P", P,
                       "--m", "2", "--k", "0", "--n", "-2")
    assert code == 2 and "integrality" in err
    assert run(capsys, "localdt", "--h3", "5", "--c2h", "1", "--m", "1", "--a-range", "0:1",
               "--window-x=-1:0", "--window-y=-3:3")[0] == 2


def cli(args, env_extra=None):
    env = dict(os.environ)
    env.update(env_extra or {})
    return subprocess.run([sys.executable, "-m", "dtwall", *args], capture_output=True, env=env, check=True).stdout


def test_json_output_deterministic_across_workers(tmp_path):
    for name, seed in (("I.json", 1), ("P.json", 2)):
        dump_table(random_table("PT" if name == "P.json" else "DT_ideal", 4, 10, seed), tmp_path / name)
    args = ["--format", "json", "dt4", *GEO, "--I", str(tmp_path / "I.json"), "--P", str(tmp_path / "P.json"),
            "--m", "2", "--k-range", "0:5", "--n-range=-6:2"]
    one = cli(args + ["--workers", "1"])
    assert one == cli(args + ["--workers", "1"])
    assert one == cli(args + ["--workers", "3"])
    assert one == cli(args, {"DTWALL_THREADS": "2"})
