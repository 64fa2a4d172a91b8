import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from runprob.cli import (
    CSV_HEADER,
    OutputRecord,
    format_float,
    main,
    records_from_csv,
    records_to_csv,
    records_to_json,
)
from runprob.core import to_rational

from conftest import fibonacci, naive_z


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_exact_json(capsys):
    code, out, _ = run(capsys, "compute", "--p", "1/2", "--r", "2", "--n", "3", "--method", "exact", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["z_exact"] == "5/8"
    assert rec["y_float"] == "0.375"
    assert rec["method"] == "ClosedForm"


def test_compute_default_is_closed_form(capsys):
    code, out, _ = run(capsys, "compute", "--p", "0.5", "--r", "2", "--n", "3")
    assert code == 0
    assert "5/8" in out and "ClosedForm" in out


def test_compute_spectral_refusal(capsys):
    code, out, err = run(capsys, "compute", "--p", "1/2", "--r", "1", "--n", "10", "--method", "spectral")
    assert code == 3
    assert out == ""
    assert "NearMultiple" in err and "recurrence" in err


def test_compute_n_below_r(capsys):
    code, out, _ = run(capsys, "compute", "--p", "1", "--r", "3", "--n", "2", "--method", "exact", "--format", "csv")
    assert code == 0
    (rec,) = records_from_csv(out)
    assert rec.z_exact == "1"


@pytest.mark.parametrize("method", ["exact", "recurrence", "series", "spectral", "asymptotic", "matrix", "brute"])
def test_compute_every_method(capsys, method):
    code, out, _ = run(capsys, "compute", "--p", "1/3", "--r", "3", "--n", "12", "--method", method, "--format", "json")
    assert code == 0
    rec = json.loads(out)
    exact = naive_z(F(1, 3), 3, 12)
    if rec["z_exact"]:
        assert to_rational(rec["z_exact"]) == exact
    allowed = float(rec["error_bound"] or 0) + 1e-15
    assert abs(float(rec["z_float"]) - float(exact)) <= allowed


def test_compute_mc(capsys):
    code, out, _ = run(
        capsys, "compute", "--p", "1/2", "--r", "2", "--n", "3", "--method", "mc", "--trials", "20000", "--seed", "5", "--format", "json"
    )
    assert code == 0
    rec = json.loads(out)
    assert rec["z_exact"] == ""
    assert abs(float(rec["z_float"]) - 0.625) <= float(rec["error_bound"])


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "--p", "3/2", "--r", "2", "--n", "3"],
        ["compute", "--p", "1/2", "--r", "0", "--n", "3"],
        ["compute", "--p", "x", "--r", "2", "--n", "3"],
        ["table", "--p", "1/2", "--r", "2", "--n-max", "-1"],
        ["roots", "--p", "1", "--r", "4"],
        ["roots", "--p", "0", "--r", "4"],
        ["verify", "--p-list", "3/2"],
        ["verify", "--n-max", "301"],
        ["verify", "--r-max", "11"],
    ],
)
def test_domain_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err


def test_brute_cap_is_refusal(capsys):
    code, _, err = run(capsys, "compute", "--p", "1/2", "--r", "2", "--n", "30", "--method", "brute")
    assert code == 3
    assert "exact" in err


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", "--p", "1/2", "--r", "2", "--n-max", "4", "--format", "csv")
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == "n,r,p,z_exact,z_float,y_float,method,error_bound"
    assert "\r" not in out
    records = records_from_csv(out)
    assert [r.n for r in records] == list(range(5))
    assert records[-1].z_exact == "1/2"


def test_table_p_zero(capsys):
    code, out, _ = run(capsys, "table", "--p", "0", "--r", "1", "--n-max", "3", "--format", "json")
    assert code == 0
    assert [rec["z_exact"] for rec in json.loads(out)] == ["1"] * 4


def test_table_fibonacci(capsys):
    code, out, _ = run(capsys, "table", "--p", "1/2", "--r", "2", "--n-max", "10", "--format", "csv")
    assert code == 0
    for rec in records_from_csv(out):
        assert to_rational(rec.z_exact) * 2**rec.n == fibonacci(rec.n + 2)


def test_roots_json(capsys):
    code, out, _ = run(capsys, "roots", "--p", "1/2", "--r", "2", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["condition_flag"] == "WellSeparated"
    assert len(obj["roots"]) == 3
    assert all(float(root["x"][1]) == 0.0 for root in obj["roots"])
    assert float(obj["roots"][0]["x"][0]) == pytest.approx(5**0.5 - 1)


def test_roots_near_multiple(capsys):
    code, out, _ = run(capsys, "roots", "--p", "1/2", "--r", "1")
    assert code == 0
    assert "NearMultiple" in out


def test_verify_acceptance_grid(capsys):
    code, out, err = run(capsys, "verify", "--n-max", "50", "--r-max", "6", "--p-list", "1/3,1/2,2/3")
    assert code == 0, err
    assert "FAIL" not in out


def test_verify_trivial_grid_json(capsys):
    code, out, _ = run(capsys, "verify", "--n-max", "0", "--r-max", "1", "--p-list", "1/2", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert all(row["status"] == "pass" for row in rows)
    assert all(row["max_abs"] == "0" for row in rows)


def test_verify_reports_violation(capsys, monkeypatch):
    import runprob.verify as v

    monkeypatch.setattr(v, "MATRIX_ABS", -1.0)
    code, out, err = run(capsys, "verify", "--n-max", "3", "--r-max", "1", "--p-list", "1/3", "--format", "csv")
    assert code == 1
    assert "violation: p=1/3 r=1 n=0 MatrixPower~Exact" in err
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["pair"]: r["status"] for r in rows}["MatrixPower~Exact"] == "FAIL"


def test_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "runprob.cli", "compute", "--p", "2/3", "--r", "2", "--n", "3", "--format", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert records_from_csv(proc.stdout)[0].z_exact == "11/27"


finite = st.floats(allow_nan=False, allow_infinity=False)
records = st.builds(
    OutputRecord,
    n=st.integers(0, 10**6),
    r=st.integers(1, 100),
    p=st.fractions(min_value=0, max_value=1).map(lambda x: f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)),
    z_exact=st.one_of(st.just(""), st.fractions(min_value=0, max_value=1).map(str)),
    z_float=finite.map(format_float),
    y_float=finite.map(format_float),
    method=st.sampled_from(["ClosedForm", "Recurrence", "Series", "Spectral", "Asymptotic", "MatrixPower", "BruteForce", "MonteCarlo"]),
    error_bound=st.one_of(st.just(""), st.floats(min_value=0, allow_infinity=False).map(format_float)),
)


@given(st.lists(records, max_size=5))
def test_csv_json_round_trip(recs):
    assert records_from_csv(records_to_csv(recs)) == recs
    assert [OutputRecord.from_json_obj(o) for o in json.loads(records_to_json(recs))] == recs


@given(finite)
def test_float_text_round_trips(x):
    assert float(format_float(x)) == x


@given(st.fractions(min_value=0, max_value=1))
def test_rational_text_round_trips(x):
    rec = OutputRecord(1, 1, str(x), str(x), "0", "1", "Series", "")
    assert to_rational(rec.p) == x
    assert CSV_HEADER == list(rec.to_json_obj())
