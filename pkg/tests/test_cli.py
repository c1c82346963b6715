import csv
import io
import json
import math

import pytest

from opreal.cli import EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, main, real


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--json")
    assert code == EXIT_OK
    return json.loads(text)


@pytest.mark.parametrize("text, value", [("0.5", 0.5), ("pi/6", math.pi / 6), ("3pi/8", 3 * math.pi / 8), ("-pi", -math.pi), ("2*pi/3", 2 * math.pi / 3)])
def test_real_parser(text, value):
    assert real(text) == pytest.approx(value, abs=1e-15)


def test_reproduce_rows():
    doc = run_json("reproduce")
    rows = {r["name"]: r for r in doc["results"]}
    assert rows["upsilon_bound"]["computed"] == 2.5
    assert rows["bell_quantum_max"]["computed"] == pytest.approx(2 + math.sqrt(2), abs=1e-8)
    assert rows["werner_bell_threshold"]["computed"] == pytest.approx(0.7559289, abs=1e-7)
    assert all(r["ok"] for r in doc["results"])
    assert doc["command"] == "reproduce" and doc["library_version"]


def test_reproduce_tolerance_failure_exit_code():
    code, _ = run("reproduce", "--tolerance", "1e-20")
    assert code == EXIT_TOLERANCE


def test_scan_f_axis(tmp_path):
    path = tmp_path / "scan.csv"
    doc = run_json("scan", "--axis", "f", "--steps", "101", "--csv", str(path))
    lhs = [r["lhs"] for r in doc["results"]]
    assert all(b > a for a, b in zip(lhs, lhs[1:]))
    for r in doc["results"]:
        assert r["lhs"] == pytest.approx(1.5 + 1.5 * r["f"], abs=1e-8)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.startswith(b"theta,f,lhs,bound,margin,violated,f_min,werner_class\n")


def test_scan_csv_round_trips_through_json(tmp_path):
    path = tmp_path / "scan.csv"
    doc = run_json("scan", "--axis", "f", "--steps", "31", "--csv", str(path))
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(doc["results"])
    for row, rec in zip(rows, doc["results"]):
        for k, cell in row.items():
            v = rec[k]
            if v is None:
                assert cell == ""
            elif isinstance(v, bool):
                assert cell == ("true" if v else "false")
            elif isinstance(v, float):
                assert float(cell) == v
            else:
                assert cell == str(v)


def test_scan_theta_axis_constant_lhs():
    doc = run_json("scan", "--axis", "theta", "--range", "0.05,1.5", "--steps", "12")
    assert all(r["lhs"] == pytest.approx(3.0, abs=1e-9) for r in doc["results"])


def test_scan_two_steps_endpoints():
    doc = run_json("scan", "--axis", "f", "--steps", "2")
    assert [r["lhs"] for r in doc["results"]] == [1.5, 3.0]


@pytest.mark.parametrize(
    "argv",
    [
        ("scan", "--axis", "f", "--range", "1,0"),
        ("scan", "--axis", "f", "--range", "0;1"),
        ("scan", "--axis", "f", "--range", "0,2"),
        ("scan", "--axis", "f", "--steps", "1"),
        ("scan", "--axis", "phase"),
        ("protocol", "p3"),
        ("sample", "--n", "0"),
        ("bogus",),
    ],
)
def test_usage_errors(argv, capsys):
    code, _ = run(*argv)
    assert code == EXIT_USAGE


def test_protocol_examples():
    res = run_json("protocol", "p1", "--theta", "pi/3", "--obs", "x")["results"]
    assert res["trace_distance"] == pytest.approx(0.25, abs=1e-12) and res["operationally_real"] is True
    res = run_json("protocol", "p1", "--mixed", "--obs", "x")["results"]
    assert res["operationally_real"] is False
    res = run_json("protocol", "p2", "--theta", "pi/4", "--obs", "z")["results"]
    assert res["trace_distance"] == pytest.approx(0.5, abs=1e-12) and res["operationally_real"] is True


def test_sample_report():
    doc = run_json("sample", "--theta", "pi/6", "--f", "0.8", "--n", "100000", "--seed", "9")
    res = doc["results"]
    assert doc["seed"] == 9
    assert res["exact"] == pytest.approx(2.7, abs=1e-8)
    assert abs(res["z_score"]) < 4
    assert "Philox" in res["rng"]


@pytest.mark.parametrize("cmd", [("sample", "--n", "20000", "--seed", "5"), ("scan", "--axis", "f", "--steps", "7"), ("reproduce",)])
def test_byte_identical_output(cmd):
    assert run(*cmd)[1] == run(*cmd)[1]
    assert run(*cmd, "--json")[1] == run(*cmd, "--json")[1]
